//! Balanced multisets of indices: balance and irreducibility tests, direct
//! enumeration of the irreducible ones, the recursive order-4 construction,
//! and the minimum geometric mean `Δ̃_n`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Result, XsepError};
use crate::index::{check_qubits, dim, Index};
use crate::xstate::DiagVec;

/// Default bound on the raw search-space estimate of direct enumeration.
pub const DEFAULT_ENUMERATION_BOUND: f64 = 1e10;

/// Largest family size `recursive_t4` will materialize.
pub const MAX_MATERIALIZED: usize = 2_000_000;

/// A multiset of n-bit indices kept sorted by rank.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BalancedMultiset {
    n: usize,
    elements: Vec<Index>,
}

impl BalancedMultiset {
    /// Sorts the elements; rejects an empty list or mixed qubit counts.
    /// Balance is not required here, see [`BalancedMultiset::is_balanced`].
    pub fn new(mut elements: Vec<Index>) -> Result<Self> {
        let n = match elements.first() {
            Some(i) => i.n(),
            None => return Err(XsepError::Invalid("empty multiset".into())),
        };
        if let Some(j) = elements.iter().find(|j| j.n() != n) {
            return Err(XsepError::MixedQubits(n, j.n()));
        }
        elements.sort();
        Ok(Self { n, elements })
    }

    /// Parses 0/1 strings, e.g. `["000", "011", "101", "110"]`.
    pub fn parse(items: &[&str]) -> Result<Self> {
        Self::new(
            items
                .iter()
                .map(|s| s.parse())
                .collect::<Result<Vec<Index>>>()?,
        )
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn elements(&self) -> &[Index] {
        &self.elements
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Per-position balance: as many zeros as ones at every digit.
    pub fn is_balanced(&self) -> bool {
        let half = self.order();
        (1..=self.n).all(|k| {
            let ones = self.elements.iter().filter(|i| i.bit(k) == 1).count();
            2 * ones == half
        })
    }

    /// Balanced, and no nonempty proper sub-multiset is balanced.
    pub fn is_irreducible(&self) -> bool {
        self.is_balanced() && !has_balanced_proper_part(self.n, &self.elements)
    }

    /// The multiset `{ī : i ∈ T}`.
    pub fn conjugate(&self) -> Self {
        let mut elements: Vec<Index> = self.elements.iter().map(|i| i.complement()).collect();
        elements.sort();
        Self {
            n: self.n,
            elements,
        }
    }

    /// `(∏_{i∈T} a_i)^{1/#T}`, computed through logarithms.
    pub fn geometric_mean(&self, a: &DiagVec) -> f64 {
        let mut acc = 0.0;
        for &i in &self.elements {
            let v = a.get(i);
            if v <= 0.0 {
                return 0.0;
            }
            acc += v.ln();
        }
        (acc / self.order() as f64).exp()
    }

    pub fn contains(&self, i: Index) -> bool {
        self.elements.binary_search(&i).is_ok()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.elements.iter().map(|i| i.to_string()).collect()
    }
}

impl fmt::Display for BalancedMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (p, i) in self.elements.iter().enumerate() {
            if p > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for BalancedMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for BalancedMultiset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

/// Balance test on a raw list; rejects mixed qubit counts.
pub fn is_balanced(elements: &[Index]) -> Result<bool> {
    Ok(BalancedMultiset::new(elements.to_vec())?.is_balanced())
}

/// Irreducibility test on a raw list; rejects mixed qubit counts.
pub fn is_irreducible(elements: &[Index]) -> Result<bool> {
    Ok(BalancedMultiset::new(elements.to_vec())?.is_irreducible())
}

// Sub-multiset sums are packed into a u128: field k (7 bits) counts ones at
// digit k, field n counts elements. Sums add field-wise without carries while
// every count stays below 128.
const FIELD: u32 = 7;
const PACK_LIMIT: usize = 127;

#[inline]
fn spread(i: Index) -> u128 {
    let n = i.n();
    let mut w = 1u128 << (FIELD as usize * n);
    for k in 1..=n {
        if i.bit(k) == 1 {
            w |= 1u128 << (FIELD as usize * (k - 1));
        }
    }
    w
}

#[derive(Clone, Copy)]
struct Packing {
    n: usize,
    ones: u128,
}

impl Packing {
    fn new(n: usize) -> Self {
        let ones = (0..n).map(|k| 1u128 << (FIELD as usize * k)).sum();
        Self { n, ones }
    }

    #[inline]
    fn balanced(self, w: u128) -> bool {
        let size = w >> (FIELD as usize * self.n);
        size % 2 == 0 && w == (size / 2) * self.ones + (size << (FIELD as usize * self.n))
    }
}

fn has_balanced_proper_part(n: usize, elements: &[Index]) -> bool {
    let m = elements.len();
    if m <= 1 {
        return false;
    }
    if m > PACK_LIMIT {
        return has_balanced_proper_part_wide(n, elements);
    }
    let pack = Packing::new(n);
    let full: u128 = elements.iter().map(|&i| spread(i)).sum();
    let mut sums: HashSet<u128> = HashSet::new();
    for &i in elements {
        let w = spread(i);
        let mut next: Vec<u128> = sums.iter().map(|s| s + w).collect();
        next.push(w);
        for s in next {
            if s != full && pack.balanced(s) {
                return true;
            }
            sums.insert(s);
        }
    }
    false
}

fn has_balanced_proper_part_wide(n: usize, elements: &[Index]) -> bool {
    let m = elements.len();
    let mut sums: HashSet<Vec<i32>> = HashSet::new();
    for &i in elements {
        let mut w = vec![0i32; n + 1];
        for k in 1..=n {
            w[k - 1] = if i.bit(k) == 1 { 1 } else { -1 };
        }
        w[n] = 1;
        let mut next: Vec<Vec<i32>> = sums
            .iter()
            .map(|s| s.iter().zip(&w).map(|(x, y)| x + y).collect())
            .collect();
        next.push(w);
        for s in next {
            let size = s[n] as usize;
            if size < m && s[..n].iter().all(|&x| x == 0) {
                return true;
            }
            sums.insert(s);
        }
    }
    false
}

/// How a catalog was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Generation {
    Direct,
    Recursive,
}

/// Irreducible balanced multisets grouped by order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultisetCatalog {
    pub n: usize,
    pub method: Generation,
    /// Family sizes by order; present even when the members were not built.
    pub counts: BTreeMap<usize, u64>,
    /// Members by order, canonically sorted.
    pub families: BTreeMap<usize, Vec<BalancedMultiset>>,
}

impl MultisetCatalog {
    pub fn family(&self, order: usize) -> &[BalancedMultiset] {
        self.families.get(&order).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, order: usize) -> u64 {
        self.counts.get(&order).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &BalancedMultiset> {
        self.families.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.families.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes")
    }
}

/// `log10` of the binomial `C(2^n + m - 1, m)`, the number of multisets of
/// order `m` before pruning.
fn log10_search_size(n: usize, m: usize) -> f64 {
    let d = dim(n) as f64;
    (1..=m)
        .map(|j| ((d + j as f64 - 1.0) / j as f64).log10())
        .sum()
}

/// All irreducible balanced multisets of even orders `2..=max_order`.
pub fn enumerate_irreducible(n: usize, max_order: usize) -> Result<MultisetCatalog> {
    enumerate_irreducible_bounded(n, max_order, DEFAULT_ENUMERATION_BOUND)
}

/// As [`enumerate_irreducible`], with an explicit bound on the unpruned
/// search size.
pub fn enumerate_irreducible_bounded(
    n: usize,
    max_order: usize,
    bound: f64,
) -> Result<MultisetCatalog> {
    check_qubits(n)?;
    let cap = dim(n) / 2;
    if max_order > cap.max(2) {
        return Err(XsepError::Invalid(format!(
            "max order {max_order} exceeds 2^(n-1) = {cap}"
        )));
    }
    if max_order > PACK_LIMIT {
        return Err(XsepError::Invalid(format!(
            "max order {max_order} exceeds the enumerator limit {PACK_LIMIT}"
        )));
    }
    let orders: Vec<usize> = (2..=max_order).step_by(2).collect();
    let estimate: f64 = orders
        .iter()
        .map(|&m| 10f64.powf(log10_search_size(n, m)))
        .sum();
    if estimate > bound {
        return Err(XsepError::CostGuard { estimate, bound });
    }
    let mut counts = BTreeMap::new();
    let mut families = BTreeMap::new();
    for m in orders {
        let fam = enumerate_order(n, m);
        counts.insert(m, fam.len() as u64);
        families.insert(m, fam);
    }
    Ok(MultisetCatalog {
        n,
        method: Generation::Direct,
        counts,
        families,
    })
}

struct Search {
    n: usize,
    m: usize,
    pack: Packing,
    spreads: Vec<u128>,
}

impl Search {
    fn dfs(
        &self,
        seq: &mut Vec<u32>,
        ones: &mut [usize],
        sums: &[u128],
        out: &mut Vec<BalancedMultiset>,
    ) {
        let depth = seq.len();
        let last = *seq.last().expect("seeded with a first element");
        let half = self.m / 2;
        let d = dim(self.n) as u32;
        let remaining_after = self.m - depth - 1;
        for x in last..d {
            // Balance feasibility at each digit.
            let ok = (0..self.n).all(|k| {
                let b = ((x >> (self.n - 1 - k)) & 1) as usize;
                let o = ones[k] + b;
                let z = depth + 1 - o;
                o <= half && z <= half
            });
            if !ok {
                continue;
            }
            let w = self.spreads[x as usize];
            let mut next = Vec::with_capacity(2 * sums.len() + 1);
            next.extend_from_slice(sums);
            let full = sums.last().copied().unwrap_or(0) + w;
            let mut bad = self.pack.balanced(w) && remaining_after > 0;
            if !bad {
                for &s in sums {
                    let t = s + w;
                    if self.pack.balanced(t) && (remaining_after > 0 || t != full) {
                        bad = true;
                        break;
                    }
                    next.push(t);
                }
            }
            if bad {
                continue;
            }
            next.push(w);
            if remaining_after == 0 {
                let mut elements: Vec<Index> = seq
                    .iter()
                    .map(|&b| Index::new(self.n, b).expect("in range"))
                    .collect();
                elements.push(Index::new(self.n, x).expect("in range"));
                out.push(BalancedMultiset {
                    n: self.n,
                    elements,
                });
                continue;
            }
            // Keep the running full sum last so the next level can find it.
            next.sort_unstable();
            next.dedup();
            let pos = next
                .iter()
                .position(|&t| t == full)
                .expect("full sum present");
            let f = next.remove(pos);
            next.push(f);
            for k in 0..self.n {
                ones[k] += ((x >> (self.n - 1 - k)) & 1) as usize;
            }
            seq.push(x);
            self.dfs(seq, ones, &next, out);
            seq.pop();
            for k in 0..self.n {
                ones[k] -= ((x >> (self.n - 1 - k)) & 1) as usize;
            }
        }
    }
}

fn enumerate_order(n: usize, m: usize) -> Vec<BalancedMultiset> {
    let search = Search {
        n,
        m,
        pack: Packing::new(n),
        spreads: Index::all(n).map(spread).collect(),
    };
    let chunks: Vec<Vec<BalancedMultiset>> = (0..dim(n) as u32)
        .into_par_iter()
        .map(|x| {
            let mut out = Vec::new();
            let mut ones = vec![0usize; n];
            for k in 0..n {
                ones[k] = ((x >> (n - 1 - k)) & 1) as usize;
            }
            if m == 1 {
                return out;
            }
            let w = search.spreads[x as usize];
            search.dfs(&mut vec![x], &mut ones, &[w], &mut out);
            out
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

/// Number of members of `𝒯_{n,4}` from the recursion
/// `#𝒯_{3,4} = 2`, `#𝒯_{n+1,4} = 6 #𝒯_{n,4} + 2^{n-1}(2^{n-1} - 1)`.
pub fn t4_count(n: usize) -> Result<u64> {
    check_qubits(n)?;
    if n < 3 {
        return Ok(0);
    }
    let mut count = 2u64;
    for k in 3..n {
        let h = 1u64 << (k - 1);
        count = 6 * count + h * (h - 1);
    }
    Ok(count)
}

/// Builds `𝒯_{n,4}` by lifting from `𝒯_{3,4}` one qubit at a time.
pub fn recursive_t4(n: usize) -> Result<Vec<BalancedMultiset>> {
    check_qubits(n)?;
    if n < 3 {
        return Err(XsepError::Invalid(format!(
            "the recursive construction starts at n = 3, got {n}"
        )));
    }
    let size = t4_count(n)? as usize;
    if size > MAX_MATERIALIZED {
        return Err(XsepError::CostGuard {
            estimate: size as f64,
            bound: MAX_MATERIALIZED as f64,
        });
    }
    let mut family = vec![
        BalancedMultiset::parse(&["000", "011", "101", "110"])?,
        BalancedMultiset::parse(&["001", "010", "100", "111"])?,
    ];
    for k in 3..n {
        family = lift_t4(k, &family)?;
    }
    Ok(family)
}

const LIFT_PATTERNS: [[u8; 4]; 6] = [
    [0, 0, 1, 1],
    [0, 1, 0, 1],
    [0, 1, 1, 0],
    [1, 1, 0, 0],
    [1, 0, 1, 0],
    [1, 0, 0, 1],
];

/// `𝒯_{n+1,4}` from `𝒯_{n,4}`: six digit patterns per member, plus two lifts
/// per pair of disjoint conjugate pairs.
fn lift_t4(n: usize, family: &[BalancedMultiset]) -> Result<Vec<BalancedMultiset>> {
    let mut out = Vec::with_capacity(6 * family.len() + (1 << (2 * n - 2)));
    for t in family {
        let e = t.elements();
        for p in LIFT_PATTERNS {
            out.push(BalancedMultiset::new(
                (0..4)
                    .map(|q| e[q].prepend(p[q]))
                    .collect::<Result<Vec<_>>>()?,
            )?);
        }
    }
    let reps: Vec<Index> = Index::all(n)
        .filter(|i| i.is_pair_representative())
        .collect();
    for (a, &i) in reps.iter().enumerate() {
        for &j in &reps[a + 1..] {
            for (x, y) in [(0u8, 1u8), (1, 0)] {
                out.push(BalancedMultiset::new(vec![
                    i.prepend(x)?,
                    i.complement().prepend(x)?,
                    j.prepend(y)?,
                    j.complement().prepend(y)?,
                ])?);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Catalog built from the recursive order-4 family and the conjugate pairs.
/// Counts are filled for order 4 even when the family is too large to build.
pub fn recursive_catalog(n: usize) -> Result<MultisetCatalog> {
    check_qubits(n)?;
    let mut counts = BTreeMap::new();
    let mut families = BTreeMap::new();
    let pairs = pair_family(n);
    counts.insert(2, pairs.len() as u64);
    families.insert(2, pairs);
    if n >= 3 {
        counts.insert(4, t4_count(n)?);
        if t4_count(n)? as usize <= MAX_MATERIALIZED {
            families.insert(4, recursive_t4(n)?);
        }
    }
    Ok(MultisetCatalog {
        n,
        method: Generation::Recursive,
        counts,
        families,
    })
}

/// `𝒯_{n,2}`: the sets `{i, ī}`.
pub fn pair_family(n: usize) -> Vec<BalancedMultiset> {
    Index::all(n)
        .filter(|i| i.is_pair_representative())
        .map(|i| BalancedMultiset {
            n,
            elements: vec![i, i.complement()],
        })
        .collect()
}

/// Largest n for which the default `Δ̃` catalog includes order 4.
const DELTA_T4_MAX_QUBITS: usize = 8;

/// Catalog used for `Δ̃_n`: complete for `n ≤ 4`; orders 2 and 4 for larger
/// `n` (up to `n = 8`), pairs only beyond. Partial catalogs still give upper
/// bounds for `Δ_n`.
pub fn delta_catalog(n: usize) -> Result<&'static MultisetCatalog> {
    check_qubits(n)?;
    static CACHE: [OnceLock<MultisetCatalog>; 17] = [const { OnceLock::new() }; 17];
    let cell = &CACHE[n];
    if let Some(c) = cell.get() {
        return Ok(c);
    }
    let built = if n <= 4 {
        enumerate_irreducible(n, (dim(n) / 2).max(2))?
    } else if n <= DELTA_T4_MAX_QUBITS {
        recursive_catalog(n)?
    } else {
        let pairs = pair_family(n);
        MultisetCatalog {
            n,
            method: Generation::Recursive,
            counts: BTreeMap::from([(2, pairs.len() as u64)]),
            families: BTreeMap::from([(2, pairs)]),
        }
    };
    Ok(cell.get_or_init(|| built))
}

/// True when [`delta_catalog`] lists every irreducible balanced multiset.
pub fn delta_catalog_is_complete(n: usize) -> bool {
    n <= 4
}

/// `Δ̃_n(a)`: the least geometric mean of `a` over the catalog, with a
/// minimizing multiset.
pub fn tilde_delta_with(a: &DiagVec, catalog: &MultisetCatalog) -> (f64, Option<BalancedMultiset>) {
    let mut best = (f64::INFINITY, None);
    for t in catalog.iter() {
        let g = t.geometric_mean(a);
        if g < best.0 {
            best = (g, Some(t.clone()));
        }
    }
    best
}

/// `Δ̃_n(a)` over the default catalog for `a.n()`.
pub fn tilde_delta(a: &DiagVec) -> Result<f64> {
    Ok(tilde_delta_with(a, delta_catalog(a.n())?).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility_examples() {
        let t = BalancedMultiset::parse(&["000", "011", "101", "110"]).unwrap();
        assert!(t.is_irreducible());
        let r = BalancedMultiset::parse(&["000", "111", "001", "110"]).unwrap();
        assert!(r.is_balanced());
        assert!(!r.is_irreducible());
        for i in Index::all(4) {
            let p = BalancedMultiset::new(vec![i, i.complement()]).unwrap();
            assert!(p.is_irreducible());
        }
        let u = BalancedMultiset::parse(&["000", "001"]).unwrap();
        assert!(!u.is_balanced());
        assert!(matches!(
            BalancedMultiset::parse(&["00", "111"]),
            Err(XsepError::MixedQubits(2, 3))
        ));
    }

    #[test]
    fn small_counts() {
        let c = enumerate_irreducible(2, 2).unwrap();
        assert_eq!(c.count(2), 2);
        let c = enumerate_irreducible(3, 4).unwrap();
        assert_eq!(c.count(2), 4);
        assert_eq!(c.count(4), 2);
        assert_eq!(
            c.family(4)[0],
            BalancedMultiset::parse(&["000", "011", "101", "110"]).unwrap()
        );
        assert_eq!(c.family(4)[1], c.family(4)[0].conjugate());
    }

    #[test]
    fn recursion_counts() {
        assert_eq!(t4_count(3).unwrap(), 2);
        assert_eq!(t4_count(4).unwrap(), 24);
        assert_eq!(t4_count(5).unwrap(), 200);
        assert_eq!(t4_count(6).unwrap(), 1440);
        assert_eq!(recursive_t4(4).unwrap().len(), 24);
    }

    #[test]
    fn cost_guard_reports_estimate() {
        match enumerate_irreducible(6, 32) {
            Err(XsepError::CostGuard { estimate, bound }) => assert!(estimate > bound),
            other => panic!("expected cost guard, got {other:?}"),
        }
    }

    #[test]
    fn tilde_delta_of_ones() {
        for n in 1..=4 {
            let a = DiagVec::constant(n, 1.0).unwrap();
            assert!((tilde_delta(&a).unwrap() - 1.0).abs() < 1e-15);
        }
    }
}
