//! The sign map `Θ_n`, basic families of order-4 multisets, phase identities
//! and the phase difference.
//!
//! Phase vectors are antisymmetric, so everything here works on the `2^{n-1}`
//! representatives (first digit 0). Inner products are reported in the full
//! `2^n`-coordinate convention, which is twice the half-space one.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Result, XsepError};
use crate::index::{check_qubits, dim, Index};
use crate::multiset::BalancedMultiset;
use crate::xstate::{HermVec, PhaseVec};

/// Largest n for which the orthonormal complement basis is built.
pub const MAX_PHASE_QUBITS: usize = 10;

/// Default tolerance for identity sums.
pub const IDENTITY_TOL: f64 = 1e-8;

/// `[Θ_n(e_k)]_i = 1 - 2 i(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMap {
    n: usize,
}

impl ThetaMap {
    pub fn new(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, i: Index, k: usize) -> f64 {
        i.sign(k)
    }

    /// Full `2^n x n` sign matrix in lexicographic row order.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(dim(self.n), self.n, |r, k| {
            Index::new(self.n, r as u32)
                .expect("row in range")
                .sign(k + 1)
        })
    }

    /// Rows for the representatives only.
    fn half_matrix(&self) -> DMatrix<f64> {
        let m = self.matrix();
        m.rows(0, dim(self.n) / 2).into_owned()
    }

    /// `Θ_n(t)`.
    pub fn apply(&self, t: &[f64]) -> Result<PhaseVec> {
        if t.len() != self.n {
            return Err(XsepError::Length {
                expected: self.n,
                got: t.len(),
            });
        }
        let half: Vec<f64> = Index::all(self.n)
            .take(dim(self.n) / 2)
            .map(|i| (1..=self.n).map(|k| i.sign(k) * t[k - 1]).sum())
            .collect();
        PhaseVec::from_half(self.n, &half)
    }

    /// Numerical rank from the singular values.
    pub fn rank(&self) -> usize {
        let svd = self.matrix().svd(false, false);
        let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
        svd.singular_values
            .iter()
            .filter(|&&s| s > 1e-10 * top.max(1.0))
            .count()
    }

    /// `dim V_n^ph - rank Θ_n`, with `dim V_n^ph = 2^{n-1}` counted from the
    /// representatives and the rank taken on the representative rows.
    pub fn complement_dimension(&self) -> usize {
        let h = self.half_matrix();
        let svd = h.svd(false, false);
        let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let r = svd
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-10 * top.max(1.0))
            .count();
        dim(self.n) / 2 - r
    }

    /// Residual of the least-squares fit of `θ` by the image of `Θ_n`.
    pub fn image_residual(&self, theta: &PhaseVec) -> f64 {
        let m = self.matrix();
        let y = nalgebra::DVector::from_column_slice(theta.values());
        let svd = m.clone().svd(true, true);
        let t = svd.solve(&y, 1e-12).expect("svd solve");
        (m * t - y).norm()
    }
}

/// `ξ_T = ½ Σ_{i∈T} (e_i − e_ī)`.
pub fn xi_vector(t: &BalancedMultiset) -> PhaseVec {
    let n = t.n();
    let mut half = vec![0.0; dim(n) / 2];
    for &i in t.elements() {
        if i.is_pair_representative() {
            half[i.rank()] += 0.5;
        } else {
            half[i.complement().rank()] -= 0.5;
        }
    }
    PhaseVec::from_half(n, &half).expect("length matches")
}

/// Full-coordinate inner product `Σ_i x_i y_i`.
pub fn phase_inner(x: &PhaseVec, y: &PhaseVec) -> f64 {
    x.values().iter().zip(y.values()).map(|(a, b)| a * b).sum()
}

/// `⟨θ, ξ_T⟩ = Σ_{i∈T} θ_i`.
pub fn identity_sum(theta: &PhaseVec, t: &BalancedMultiset) -> f64 {
    t.elements().iter().map(|&i| theta.get(i)).sum()
}

/// Starts with 0 and has at least two ones.
pub fn is_non_elementary(i: Index) -> bool {
    i.is_pair_representative() && i.weight() >= 2
}

/// `i_min` (the lowest set digit of `i`) and `i_res = i − i_min`.
pub fn split_non_elementary(i: Index) -> (Index, Index) {
    let low = i.bits() & i.bits().wrapping_neg();
    let n = i.n();
    (
        Index::new(n, low).expect("in range"),
        Index::new(n, i.bits() ^ low).expect("in range"),
    )
}

/// One entry of a basic family: the non-elementary index and
/// `T_i = {0, i, ī_min, ī_res}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasicMember {
    pub index: Index,
    pub multiset: BalancedMultiset,
}

/// `T_i` for every non-elementary `i`, in rank order. Empty for `n < 3`.
pub fn basic_family(n: usize) -> Result<Vec<BasicMember>> {
    check_qubits(n)?;
    let zero = Index::new(n, 0)?;
    Index::all(n)
        .filter(|&i| is_non_elementary(i))
        .map(|i| {
            let (lo, res) = split_non_elementary(i);
            Ok(BasicMember {
                index: i,
                multiset: BalancedMultiset::new(vec![zero, i, lo.complement(), res.complement()])?,
            })
        })
        .collect()
}

/// Whether every basic-family sum of `θ` vanishes, exactly or modulo `2π`.
pub fn satisfies_phase_identities(theta: &PhaseVec, mod2pi: bool, tol: f64) -> Result<bool> {
    for m in basic_family(theta.n())? {
        let s = identity_sum(theta, &m.multiset);
        let d = if mod2pi {
            distance_to_lattice(s)
        } else {
            s.abs()
        };
        if !(d <= tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distance from `x` to `2πℤ`.
pub fn distance_to_lattice(x: f64) -> f64 {
    reduce_angle(x).abs()
}

/// Representative of `x` modulo `2π` in `(−π, π]`.
pub fn reduce_angle(x: f64) -> f64 {
    let mut r = x.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

struct ComplementBasis {
    members: Vec<BasicMember>,
    /// Orthonormal (half-space inner product) columns, one per member.
    q: DMatrix<f64>,
}

fn complement_basis(n: usize) -> Result<&'static ComplementBasis> {
    check_qubits(n)?;
    if n > MAX_PHASE_QUBITS {
        return Err(XsepError::QubitCount {
            n,
            max: MAX_PHASE_QUBITS,
        });
    }
    static CACHE: [OnceLock<ComplementBasis>; MAX_PHASE_QUBITS + 1] =
        [const { OnceLock::new() }; MAX_PHASE_QUBITS + 1];
    Ok(CACHE[n].get_or_init(|| {
        let members = basic_family(n).expect("valid n");
        let h = dim(n) / 2;
        let mut q = DMatrix::<f64>::zeros(h, members.len());
        for (c, m) in members.iter().enumerate() {
            let xi = xi_vector(&m.multiset);
            let mut v = nalgebra::DVector::from_column_slice(&xi.values()[..h]);
            // Two passes of modified Gram-Schmidt.
            for _ in 0..2 {
                for p in 0..c {
                    let col = q.column(p);
                    let d = col.dot(&v);
                    v -= col * d;
                }
            }
            let norm = v.norm();
            q.set_column(c, &(v / norm));
        }
        ComplementBasis { members, q }
    }))
}

/// `Φ_n(c)`: coordinates of the phase part against the orthonormalized
/// ξ-basis of `V_n^ph ⊖ image Θ_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseDifference {
    pub n: usize,
    /// Coefficients against the orthonormal basis (full-coordinate inner
    /// product), ordered as the basic family.
    pub coefficients: Vec<f64>,
    /// Basic-family sums of the principal-branch phase part.
    pub raw_sums: Vec<f64>,
    /// The same sums reduced to `(−π, π]`.
    pub reduced_sums: Vec<f64>,
    /// Non-elementary indices labelling the basic family.
    pub labels: Vec<String>,
}

impl PhaseDifference {
    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_trivial(&self, tol: f64) -> bool {
        self.reduced_sums.iter().all(|s| s.abs() <= tol)
    }
}

/// Phase difference of a vector with nonzero entries.
///
/// Phases are read on the principal branch. Each basic-family sum is reduced
/// modulo `2π` into `(−π, π]`, and the phase part is shifted by a `2π`-integer
/// antisymmetric vector realizing those reduced sums before projecting; this
/// makes the result invariant under torus twists `c ↦ c ∘ α̃`.
pub fn phase_difference(c: &HermVec) -> Result<PhaseDifference> {
    let n = c.n();
    if let Some(i) = c.first_zero() {
        return Err(XsepError::ZeroEntry(i.to_string()));
    }
    let basis = complement_basis(n)?;
    let theta = c.phase_part();
    let h = dim(n) / 2;
    let mut shifted: Vec<f64> = theta.values()[..h].to_vec();
    let mut m = vec![0i64; h];
    let mut raw_sums = Vec::with_capacity(basis.members.len());
    let mut reduced_sums = Vec::with_capacity(basis.members.len());
    for member in &basis.members {
        let s = identity_sum(&theta, &member.multiset);
        let r = reduce_angle(s);
        raw_sums.push(s);
        reduced_sums.push(r);
        let k = ((s - r) / TAU).round() as i64;
        // Σ_T m = m_0 + m_i − m_{i_min} − m_{i_res}, with elementary
        // representatives unshifted; i_res < i has been assigned already.
        let (_, res) = split_non_elementary(member.index);
        m[member.index.rank()] = k + m[res.rank()];
        shifted[member.index.rank()] -= TAU * m[member.index.rank()] as f64;
    }
    let v = nalgebra::DVector::from_column_slice(&shifted);
    let coefficients = (basis.q.transpose() * v)
        .iter()
        .map(|x| x * std::f64::consts::SQRT_2)
        .collect();
    Ok(PhaseDifference {
        n,
        coefficients,
        raw_sums,
        reduced_sums,
        labels: basis.members.iter().map(|m| m.index.to_string()).collect(),
    })
}

/// Phase difference of an abstract phase vector, without `2π` reduction.
pub fn phase_difference_exact(theta: &PhaseVec) -> Result<Vec<f64>> {
    let n = theta.n();
    let basis = complement_basis(n)?;
    let h = dim(n) / 2;
    let v = nalgebra::DVector::from_column_slice(&theta.values()[..h]);
    Ok((basis.q.transpose() * v)
        .iter()
        .map(|x| x * std::f64::consts::SQRT_2)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn theta_small_matrices() {
        let m = ThetaMap::new(2).unwrap().matrix();
        assert_eq!(
            m,
            DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0])
        );
    }

    #[test]
    fn basic_family_n3_and_n4() {
        let f = basic_family(3).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(
            f[0].multiset,
            BalancedMultiset::parse(&["000", "011", "101", "110"]).unwrap()
        );
        let f = basic_family(4).unwrap();
        let labels: Vec<String> = f.iter().map(|m| m.index.to_string()).collect();
        assert_eq!(labels, ["0011", "0101", "0110", "0111"]);
        assert!(basic_family(2).unwrap().is_empty());
    }

    #[test]
    fn n3_coefficient_is_scaled_sum() {
        let mut half = vec![Complex64::new(1.0, 0.0); 4];
        half[3] = Complex64::new(-1.0, 0.0);
        let c = HermVec::from_half(3, half).unwrap();
        let pd = phase_difference(&c).unwrap();
        assert!((pd.raw_sums[0] - PI).abs() < 1e-15);
        assert!((pd.coefficients[0] - PI / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn angle_reduction() {
        assert!((reduce_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((reduce_angle(-PI) - PI).abs() < 1e-12);
        assert!(distance_to_lattice(TAU * 5.0) < 1e-12);
    }
}
