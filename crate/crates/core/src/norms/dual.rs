//! The dual functionals `Δ_n(a) = inf{⟨s,a⟩ : δ_n(s) = 1}` and
//! `‖c‖′_X_n = sup{⟨u,c⟩ : ‖u‖_X_n = 1}`.
//!
//! Both are approached by cutting planes. For `Δ_n`, every `r > 0` gives the
//! valid constraint `⟨s, r̃⟩ ≥ 1` on `{δ_n(s) ≥ 1}`, so the finite linear
//! program is a relaxation (a lower bound, certified through its dual
//! multipliers) and each iterate `s` gives the upper bound
//! `⟨a,s⟩ / δ-lower(s)`. For `‖c‖′_X_n`, every torus point `α` gives
//! `⟨u, α̃⟩ ≤ 1` on the unit ball of `‖·‖_X_n`, so the finite program bounds
//! from above (certified through the conic combination `c = Σ λ_j α̃_j`) and
//! each iterate `u` gives the lower bound `⟨c,u⟩ / ‖u‖_X-upper`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::delta::delta_detailed;
use super::torus::torus_max;
use super::{BoundInterval, Method, OptimConfig};
use crate::error::{Result, XsepError};
use crate::index::{dim, signed_sum, Index};
use crate::lp::{Lp, LpOutcome, Sense};
use crate::multiset::{
    delta_catalog, delta_catalog_is_complete, tilde_delta_with, BalancedMultiset,
};
use crate::xstate::{DiagVec, HermVec};

/// Largest n handled by the cutting-plane programs.
pub const MAX_LP_QUBITS: usize = 6;

/// Enclosure of `Δ_n(a)` with its ingredients.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaCapResult {
    pub bound: BoundInterval,
    /// `min_i sqrt(a_i a_ī)`.
    pub pair_min: f64,
    /// Least geometric mean over the catalog in use, and a minimizer.
    pub tilde: Option<(f64, BalancedMultiset)>,
    /// Whether that catalog lists every irreducible balanced multiset.
    pub tilde_complete: bool,
    /// Enclosure from the cutting-plane program alone.
    pub optimization: Option<BoundInterval>,
    /// A vector `s ≥ 0` with `⟨a,s⟩ / δ-lower(s) = bound.upper`.
    pub best_s: Option<DiagVec>,
}

impl DeltaCapResult {
    /// True when the optimization upper endpoint sits below `Δ̃_n` by more
    /// than `rel_tol` (relative), which would separate `Δ_n` from `Δ̃_n`.
    pub fn below_tilde(&self, rel_tol: f64) -> bool {
        match (&self.optimization, &self.tilde) {
            (Some(o), Some((t, _))) => o.upper < t * (1.0 - rel_tol),
            _ => false,
        }
    }
}

pub fn delta_cap(a: &DiagVec, cfg: &OptimConfig) -> Result<BoundInterval> {
    Ok(delta_cap_detailed(a, cfg)?.bound)
}

/// `s_T = (1/ℓ)(∏_{i∈T} a_i)^{1/ℓ} Σ_{i∈T} a_i^{-1} e_i` for `ℓ = #T`, which
/// has `⟨a, s_T⟩` equal to the geometric mean and `δ_n(s_T) ≥ 1`.
pub fn multiset_pattern(a: &DiagVec, t: &BalancedMultiset) -> Result<DiagVec> {
    let gm = t.geometric_mean(a);
    let ell = t.order() as f64;
    let mut s = vec![0.0; dim(a.n())];
    for &i in t.elements() {
        let ai = a.get(i);
        if ai <= 0.0 {
            return Err(XsepError::Precondition(format!("a_{i} is zero")));
        }
        s[i.rank()] += gm / (ell * ai);
    }
    DiagVec::new(a.n(), s)
}

pub fn delta_cap_detailed(a: &DiagVec, cfg: &OptimConfig) -> Result<DeltaCapResult> {
    let n = a.n();
    if let Some(p) = a.values().iter().position(|&x| x < 0.0) {
        return Err(XsepError::Negative {
            index: Index::new(n, p as u32)?.to_string(),
            value: a.values()[p],
        });
    }
    let (pair_min, pair_idx) = a.min_pair_geometric_mean();
    let pair_set = BalancedMultiset::new(vec![pair_idx, pair_idx.complement()])?;
    let mut out = DeltaCapResult {
        bound: BoundInterval::exact(0.0, Method::ZeroPattern),
        pair_min,
        tilde: None,
        tilde_complete: false,
        optimization: None,
        best_s: None,
    };
    if pair_min == 0.0 {
        return Ok(out);
    }

    if cfg.closed_forms && n <= 3 {
        let catalog = delta_catalog(n)?;
        let (value, t) = tilde_delta_with(a, catalog);
        let t = t.expect("nonempty catalog");
        out.bound = BoundInterval::exact(value, Method::ClosedForm);
        out.best_s = Some(multiset_pattern(a, &t)?);
        out.tilde = Some((value, t));
        out.tilde_complete = true;
        return Ok(out);
    }

    out.bound = BoundInterval::new(a.min(), Method::Sandwich, pair_min, Method::MultisetMean);
    out.best_s = Some(multiset_pattern(a, &pair_set)?);
    if cfg.closed_forms {
        let catalog = delta_catalog(n)?;
        let (value, t) = tilde_delta_with(a, catalog);
        let t = t.expect("nonempty catalog");
        if value < out.bound.upper {
            out.bound.lower_upper(value, Method::MultisetMean);
            out.best_s = Some(multiset_pattern(a, &t)?);
        }
        out.tilde = Some((value, t));
        out.tilde_complete = delta_catalog_is_complete(n);
    }
    if n <= MAX_LP_QUBITS {
        if let Some((opt, s)) = delta_cutting_plane(a, cfg)? {
            if opt.upper < out.bound.upper {
                out.bound.lower_upper(opt.upper, Method::CuttingPlane);
                out.best_s = Some(s);
            }
            out.bound.raise_lower(opt.lower, Method::CuttingPlane);
            out.optimization = Some(opt);
        }
    }
    Ok(out)
}

fn monomial_values(n: usize, rho: &[f64]) -> Vec<f64> {
    Index::all(n).map(|i| signed_sum(i, rho).exp()).collect()
}

/// Minimizer of `Σ s_i e^{⟨σ_i, ρ⟩}` over the box `[-L, L]^n` by cyclic
/// exact coordinate minimization (each coordinate sees `A e^x + B e^{-x}`).
fn box_minimizer(s: &DiagVec, start: Vec<f64>, radius: f64) -> Vec<f64> {
    let n = s.n();
    let v = s.values();
    let mut rho: Vec<f64> = start.iter().map(|x| x.clamp(-radius, radius)).collect();
    let mut terms: Vec<f64> = Index::all(n)
        .map(|i| v[i.rank()] * signed_sum(i, &rho).exp())
        .collect();
    let mut last = terms.iter().sum::<f64>();
    for _ in 0..500 {
        for k in 1..=n {
            let (mut plus, mut minus) = (0.0, 0.0);
            for i in Index::all(n) {
                if i.bit(k) == 0 {
                    plus += terms[i.rank()];
                } else {
                    minus += terms[i.rank()];
                }
            }
            let old = rho[k - 1];
            let new = if plus == 0.0 {
                radius
            } else if minus == 0.0 {
                -radius
            } else {
                (old + 0.5 * (minus / plus).ln()).clamp(-radius, radius)
            };
            let step = new - old;
            if step != 0.0 {
                rho[k - 1] = new;
                for i in Index::all(n) {
                    terms[i.rank()] *= (i.sign(k) * step).exp();
                }
            }
        }
        let f = terms.iter().sum::<f64>();
        if f > last * (1.0 - 1e-12) {
            break;
        }
        last = f;
    }
    rho
}

/// `ρ ∈ [-L, L]^n` minimizing `max_{s_i > 0} ⟨σ_i, ρ⟩`. When `δ_n(s) = 0`
/// this points down the valley that coordinate descent alone crawls along.
fn descent_corner(s: &DiagVec, radius: f64) -> Option<Vec<f64>> {
    let n = s.n();
    let mut lp = Lp::minimize();
    let rho: Vec<usize> = (0..n).map(|_| lp.var(0.0, -radius, radius)).collect();
    let t = lp.var(1.0, -(n as f64) * radius, n as f64 * radius);
    for i in Index::all(n).filter(|&i| s.get(i) > 0.0) {
        let mut row: Vec<(usize, f64)> = rho
            .iter()
            .enumerate()
            .map(|(k, &v)| (v, i.sign(k + 1)))
            .collect();
        row.push((t, -1.0));
        lp.row(row, Sense::Le, 0.0);
    }
    match lp.solve() {
        Ok(LpOutcome::Optimal { x, .. }) => Some(rho.iter().map(|&v| x[v]).collect()),
        _ => None,
    }
}

fn delta_cutting_plane(a: &DiagVec, cfg: &OptimConfig) -> Result<Option<(BoundInterval, DiagVec)>> {
    let n = a.n();
    let d = dim(n);
    let inner_cfg = OptimConfig {
        closed_forms: false,
        ..cfg.clone()
    };
    let mut cuts: Vec<Vec<f64>> = vec![monomial_values(n, &vec![0.0; n])];
    for k in 0..n {
        for sign in [1.0, -1.0] {
            let mut rho = vec![0.0; n];
            rho[k] = sign;
            cuts.push(monomial_values(n, &rho));
        }
    }
    let mut best_upper = f64::INFINITY;
    let mut best_s = None;
    for _ in 0..cfg.lp_rounds {
        let mut lp = Lp::minimize();
        let s_vars: Vec<usize> = (0..d)
            .map(|r| lp.var(a.values()[r], 0.0, f64::INFINITY))
            .collect();
        for cut in &cuts {
            // Rows are scaled to unit maximum; the solver dislikes spreads of e^{2nL}.
            let big = cut.iter().fold(0.0f64, |m, &x| m.max(x));
            lp.row(
                s_vars
                    .iter()
                    .zip(cut)
                    .map(|(&v, &c)| (v, c / big))
                    .collect(),
                Sense::Ge,
                1.0 / big,
            );
        }
        let (relaxed, s) = match lp.solve() {
            Ok(LpOutcome::Optimal { objective, x }) => {
                (objective, x.iter().map(|v| v.max(0.0)).collect::<Vec<_>>())
            }
            _ => break,
        };
        let s = DiagVec::new(n, s)?;
        let dres = delta_detailed(&s, &inner_cfg)?;
        if dres.bound.lower > 0.0 {
            let cand = a.pairing(&s) / dres.bound.lower;
            if cand < best_upper {
                best_upper = cand;
                best_s = Some(s.clone());
            }
        }
        if dres.bound.upper >= 1.0 - 1e-10
            || (best_upper.is_finite() && best_upper - relaxed <= 1e-9 * best_upper)
        {
            break;
        }
        let start = match dres.log_r {
            Some(r) => r,
            None => descent_corner(&s, cfg.log_radius).unwrap_or_else(|| vec![0.0; n]),
        };
        let rho = box_minimizer(&s, start, cfg.log_radius);
        let cut = monomial_values(n, &rho);
        let lhs: f64 = s.values().iter().zip(&cut).map(|(x, y)| x * y).sum();
        if lhs >= 1.0 - 1e-12 {
            break;
        }
        cuts.push(cut);
    }

    // Certified lower endpoint: Σ λ_j with Σ_j λ_j r̃_j ≤ a, rescaled so the
    // inequality holds in floating point.
    // Columns are scaled like the rows above: λ_j = μ_j / max r̃_j.
    let scale: Vec<f64> = cuts
        .iter()
        .map(|cut| cut.iter().fold(0.0f64, |m, &x| m.max(x)))
        .collect();
    let mut lp = Lp::maximize();
    let mu: Vec<usize> = scale
        .iter()
        .map(|b| lp.var(1.0 / b, 0.0, f64::INFINITY))
        .collect();
    for r in 0..d {
        lp.row(
            mu.iter()
                .zip(&cuts)
                .zip(&scale)
                .map(|((&v, cut), b)| (v, cut[r] / b))
                .collect(),
            Sense::Le,
            a.values()[r],
        );
    }
    let lower = match lp.solve() {
        Ok(LpOutcome::Optimal { x, .. }) => {
            let lam: Vec<f64> = x.iter().zip(&scale).map(|(v, b)| v.max(0.0) / b).collect();
            let mut factor: f64 = 1.0;
            for r in 0..d {
                let m: f64 = lam.iter().zip(&cuts).map(|(l, cut)| l * cut[r]).sum();
                if m > a.values()[r] {
                    factor = factor.min(a.values()[r] / m);
                }
            }
            lam.iter().sum::<f64>() * factor * (1.0 - 1e-12)
        }
        _ => 0.0,
    };
    let Some(s) = best_s else { return Ok(None) };
    Ok(Some((
        BoundInterval::new(
            lower,
            Method::CuttingPlane,
            best_upper,
            Method::CuttingPlane,
        ),
        s,
    )))
}

/// Enclosure of `‖c‖′_X_n` with a dual certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct DualNormResult {
    pub bound: BoundInterval,
    /// A vector `u` with `‖u‖_X_n ≤ 1` (certified) and `⟨c,u⟩ = bound.lower`.
    pub witness_u: HermVec,
    /// Cutting-plane rounds used.
    pub rounds: usize,
}

pub fn dual_norm(c: &HermVec, cfg: &OptimConfig) -> Result<BoundInterval> {
    Ok(dual_norm_detailed(c, cfg)?.bound)
}

pub fn dual_norm_detailed(c: &HermVec, cfg: &OptimConfig) -> Result<DualNormResult> {
    dual_norm_targeted(c, cfg, f64::NEG_INFINITY, f64::INFINITY)
}

/// Like [`dual_norm_detailed`], but the cutting-plane loop stops as soon as
/// the enclosure settles a comparison: its upper endpoint drops to `below`
/// or its lower endpoint reaches `above`.
pub fn dual_norm_targeted(
    c: &HermVec,
    cfg: &OptimConfig,
    below: f64,
    above: f64,
) -> Result<DualNormResult> {
    let n = c.n();
    let h = dim(n) / 2;
    let inf = c.norm_inf();
    if inf == 0.0 {
        return Ok(DualNormResult {
            bound: BoundInterval::exact(0.0, Method::ClosedForm),
            witness_u: HermVec::zeros(n)?,
            rounds: 0,
        });
    }
    // A single conjugate pair: ‖u‖_X = 2|u_j| and ⟨c,u⟩ = 2|c_j|.
    let jmax = (0..h)
        .max_by(|&x, &y| c.half()[x].norm().total_cmp(&c.half()[y].norm()))
        .expect("nonempty");
    let mut pair_u = vec![Complex64::new(0.0, 0.0); h];
    pair_u[jmax] = c.half()[jmax].conj() / (2.0 * c.half()[jmax].norm());
    let pair_u = HermVec::from_half(n, pair_u)?;
    if n <= 2 {
        return Ok(DualNormResult {
            bound: BoundInterval::exact(inf, Method::ClosedForm),
            witness_u: pair_u,
            rounds: 0,
        });
    }

    let mut bound = BoundInterval::new(inf, Method::Sandwich, 0.5 * c.norm_1(), Method::Sandwich);
    let mut witness = pair_u;

    // Phase-aligned direction u = e^{-iθ}: ⟨c,u⟩ = ‖c‖_1.
    let aligned = HermVec::from_half(
        n,
        c.half()
            .iter()
            .map(|z| {
                if z.norm() > 0.0 {
                    z.conj() / z.norm()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect(),
    )?;
    let xa = torus_max(&aligned, cfg.torus_tol(n), cfg.max_evals, cfg.grid);
    let ratio = c.pairing(&aligned) / xa.bound.upper;
    if ratio > bound.lower {
        bound.raise_lower(ratio, Method::FeasiblePoint);
        witness = aligned.scaled(1.0 / xa.bound.upper);
    }

    let mut rounds = 0;
    if n <= MAX_LP_QUBITS && bound.upper > below && bound.lower < above {
        let cg = dual_cutting_plane(c, cfg, &xa.angles, below, above)?;
        rounds = cg.rounds;
        if let Some((value, u)) = cg.lower {
            if value > bound.lower {
                bound.raise_lower(value, Method::CuttingPlane);
                witness = u;
            }
        }
        if let Some(up) = cg.upper {
            bound.lower_upper(up, Method::CuttingPlane);
        }
    }
    Ok(DualNormResult {
        bound,
        witness_u: witness,
        rounds,
    })
}

struct ColumnGeneration {
    lower: Option<(f64, HermVec)>,
    upper: Option<f64>,
    rounds: usize,
}

fn atom(n: usize, phi: &[f64]) -> Vec<Complex64> {
    (0..dim(n) / 2)
        .map(|b| {
            Complex64::from_polar(
                1.0,
                signed_sum(Index::new(n, b as u32).expect("in range"), phi),
            )
        })
        .collect()
}

fn pricing_tol(n: usize) -> f64 {
    match n {
        0..=3 => 1e-10,
        4 => 1e-6,
        _ => 1e-4,
    }
}

fn dual_cutting_plane(
    c: &HermVec,
    cfg: &OptimConfig,
    seed_angles: &[f64],
    below: f64,
    above: f64,
) -> Result<ColumnGeneration> {
    let n = c.n();
    let h = dim(n) / 2;
    let mut atoms: Vec<Vec<Complex64>> = Vec::new();
    // φ_1 on quarter turns, the rest in {0, π/2}: a spanning, sign-symmetric
    // starting set.
    for q in 0..4 {
        for bits in 0..(1usize << (n - 1)) {
            let mut phi = vec![q as f64 * FRAC_PI_2];
            for k in 0..n - 1 {
                phi.push(if bits >> k & 1 == 1 { FRAC_PI_2 } else { 0.0 });
            }
            atoms.push(atom(n, &phi));
        }
    }
    atoms.push(atom(n, seed_angles));

    let mut best: Option<(f64, HermVec)> = None;
    let mut rounds = 0;
    for _ in 0..cfg.lp_rounds {
        rounds += 1;
        let mut lp = Lp::maximize();
        let xs: Vec<usize> = (0..h)
            .map(|b| lp.var(2.0 * c.half()[b].re, -1.0, 1.0))
            .collect();
        let ys: Vec<usize> = (0..h)
            .map(|b| lp.var(-2.0 * c.half()[b].im, -1.0, 1.0))
            .collect();
        for at in &atoms {
            let mut row = Vec::with_capacity(2 * h);
            for b in 0..h {
                row.push((xs[b], 2.0 * at[b].re));
                row.push((ys[b], -2.0 * at[b].im));
            }
            lp.row(row, Sense::Le, 1.0);
        }
        let (relaxed, x) = match lp.solve() {
            Ok(LpOutcome::Optimal { objective, x }) => (objective, x),
            _ => break,
        };
        let u = HermVec::from_half(
            n,
            (0..h).map(|b| Complex64::new(x[xs[b]], x[ys[b]])).collect(),
        )?;
        let price = torus_max(&u, pricing_tol(n), cfg.max_evals, cfg.grid);
        let up = price.bound.upper;
        if up > 0.0 {
            let value = c.pairing(&u) / up;
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((value, u.scaled(1.0 / up)));
            }
        }
        let settled = relaxed <= below || best.as_ref().is_some_and(|(v, _)| *v >= above);
        if settled || price.bound.lower <= 1.0 + 1e-9 {
            break;
        }
        atoms.push(atom(n, &price.angles));
    }

    // Re-certify the best direction at the configured tolerance.
    if let Some((_, u)) = &best {
        let fine = torus_max(u, cfg.torus_tol(n), cfg.max_evals, cfg.grid);
        if fine.bound.upper > 0.0 {
            let value = c.pairing(u) / fine.bound.upper;
            best = Some((value, u.scaled(1.0 / fine.bound.upper)));
        }
    }

    // Upper endpoint from c = Σ λ_j α̃_j + residual, ‖residual‖′ ≤ ½‖residual‖_1.
    let mut lp = Lp::minimize();
    let lam: Vec<usize> = atoms
        .iter()
        .map(|_| lp.var(1.0, 0.0, f64::INFINITY))
        .collect();
    for b in 0..h {
        lp.row(
            lam.iter()
                .zip(&atoms)
                .map(|(&v, at)| (v, at[b].re))
                .collect(),
            Sense::Eq,
            c.half()[b].re,
        );
        lp.row(
            lam.iter()
                .zip(&atoms)
                .map(|(&v, at)| (v, at[b].im))
                .collect(),
            Sense::Eq,
            c.half()[b].im,
        );
    }
    let upper = match lp.solve()? {
        LpOutcome::Optimal { x, .. } => {
            let x: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
            let mut resid = 0.0;
            for b in 0..h {
                let comb: Complex64 = x.iter().zip(&atoms).map(|(l, at)| at[b] * *l).sum();
                resid += (c.half()[b] - comb).norm();
            }
            // ½‖r‖_1 over all 2^n entries is the sum over representatives.
            Some(x.iter().sum::<f64>() + resid)
        }
        _ => None,
    };
    Ok(ColumnGeneration {
        lower: best,
        upper,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_cap_closed_forms() {
        let cfg = OptimConfig::default();
        let a = DiagVec::new(2, vec![1.0, 4.0, 9.0, 16.0]).unwrap();
        let b = delta_cap(&a, &cfg).unwrap();
        assert_eq!((b.lower, b.upper), (4.0, 4.0));
        let b = delta_cap(&DiagVec::constant(4, 1.0).unwrap(), &cfg).unwrap();
        assert!(
            (b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12,
            "{b:?}"
        );
    }

    #[test]
    fn dual_norm_of_ones() {
        for n in 1..=4 {
            let c = HermVec::constant(n, 1.0).unwrap();
            let b = dual_norm(&c, &OptimConfig::default()).unwrap();
            assert!(b.contains(1.0, 1e-9), "{n}: {b:?}");
            assert!(b.width() < 1e-6, "{n}: {b:?}");
        }
    }

    #[test]
    fn pattern_has_geometric_mean_pairing() {
        let a = DiagVec::new(3, vec![2.0, 1.0, 3.0, 5.0, 7.0, 1.5, 0.5, 4.0]).unwrap();
        let t = BalancedMultiset::parse(&["000", "011", "101", "110"]).unwrap();
        let s = multiset_pattern(&a, &t).unwrap();
        assert!((a.pairing(&s) - t.geometric_mean(&a)).abs() < 1e-12);
    }
}
