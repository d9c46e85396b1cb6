//! Brute-force reference computations: grid searches, random separable
//! states, and dense partial-transpose checks. Slow on purpose; they share
//! no code with the certified routines beyond the basic vector types.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, XsepError};
use crate::index::{dim, Index};
use crate::xstate::{assemble, dense_is_ppt, DenseState, DiagVec, HermVec, XState};

/// Largest number of grid points a single oracle call may visit.
pub const GRID_BOUND: f64 = 1e8;

/// Largest n for dense eigenvalue checks.
pub const MAX_ORACLE_QUBITS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleConfig {
    /// Points per axis.
    pub grid: usize,
    /// Half-width `L` of the log-radius box `[-L, L]^n`.
    pub log_radius: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid: 201,
            log_radius: 6.0,
            samples: 1000,
            seed: 0,
        }
    }
}

fn guard(m: usize, n: usize) -> Result<()> {
    let cost = (m as f64).powi(n as i32);
    if cost > GRID_BOUND {
        return Err(XsepError::CostGuard {
            estimate: cost,
            bound: GRID_BOUND,
        });
    }
    Ok(())
}

/// Decodes a flat grid position into per-axis offsets.
fn axes(mut flat: usize, m: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for x in out.iter_mut() {
        *x = flat % m;
        flat /= m;
    }
    out
}

/// `min Σ s_i r^i` over `log r` on an `m`-point grid of `[-L, L]^n`.
pub fn grid_delta(s: &DiagVec, radius: f64, m: usize) -> Result<f64> {
    let n = s.n();
    if m < 2 {
        return Err(XsepError::Invalid("grid needs at least 2 points".into()));
    }
    guard(m, n)?;
    let step = 2.0 * radius / (m - 1) as f64;
    let total = m.pow(n as u32);
    let best = (0..total)
        .into_par_iter()
        .map(|flat| {
            let rho: Vec<f64> = axes(flat, m, n)
                .iter()
                .map(|&k| -radius + k as f64 * step)
                .collect();
            Index::all(n)
                .map(|i| {
                    let e: f64 = (1..=n).map(|k| i.sign(k) * rho[k - 1]).sum();
                    s.get(i) * e.exp()
                })
                .sum::<f64>()
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

/// `max Σ u_i α^i` over the grid `α_k = e^{2πi j/m}`.
pub fn grid_xnorm(u: &HermVec, m: usize) -> Result<f64> {
    let n = u.n();
    if m == 0 {
        return Err(XsepError::Invalid("grid needs at least 1 point".into()));
    }
    guard(m, n)?;
    let full = u.to_full();
    let total = m.pow(n as u32);
    let step = std::f64::consts::TAU / m as f64;
    let best = (0..total)
        .into_par_iter()
        .map(|flat| {
            let z: Vec<Complex64> = axes(flat, m, n)
                .iter()
                .map(|&k| Complex64::from_polar(1.0, k as f64 * step))
                .collect();
            Index::all(n)
                .map(|i| {
                    let mut mono = Complex64::new(1.0, 0.0);
                    for k in 1..=n {
                        mono *= if i.bit(k) == 0 {
                            z[k - 1]
                        } else {
                            z[k - 1].conj()
                        };
                    }
                    (full[i.rank()] * mono).re
                })
                .sum::<f64>()
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// `δ_3(s) = 2 inf_r [sqrt((s000 r + s001/r)(s110 r + s111/r))
/// + sqrt((s010 r + s011/r)(s100 r + s101/r))]` by golden-section search in
/// `log r ∈ [-L, L]`.
pub fn nested_delta3(s: &DiagVec, radius: f64) -> Result<f64> {
    if s.n() != 3 {
        return Err(XsepError::Invalid(format!(
            "expected 3 qubits, got {}",
            s.n()
        )));
    }
    let v = s.values();
    let f = |rho: f64| {
        let r = rho.exp();
        let t = |a: usize, b: usize| v[a] * r + v[b] / r;
        2.0 * ((t(0, 1) * t(6, 7)).sqrt() + (t(2, 3) * t(4, 5)).sqrt())
    };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (-radius, radius);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    Ok(f1.min(f2).min(f(lo)).min(f(hi)))
}

/// Haar-random single-qubit pure state (uniform on the Bloch sphere).
fn random_qubit<R: Rng>(rng: &mut R) -> [Complex64; 2] {
    let mut z = [Complex64::new(0.0, 0.0); 2];
    for w in z.iter_mut() {
        *w = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    let norm = (z[0].norm_sqr() + z[1].norm_sqr()).sqrt();
    [z[0] / norm, z[1] / norm]
}

/// Random pure product vector on `n` qubits.
pub fn random_product_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..n {
        let q = random_qubit(rng);
        v = v.iter().flat_map(|z| [z * q[0], z * q[1]]).collect();
    }
    v
}

/// Mixture of `k` random pure product states with Dirichlet(1, …, 1) weights.
pub fn sample_separable_with<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<DenseState> {
    if k == 0 {
        return Err(XsepError::Invalid("need at least one product term".into()));
    }
    if n == 0 || n > crate::xstate::MAX_DENSE_QUBITS {
        return Err(XsepError::QubitCount {
            n,
            max: crate::xstate::MAX_DENSE_QUBITS,
        });
    }
    let d = dim(n);
    let w: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    let mut m = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for wj in w {
        let v = DVector::from_vec(random_product_vector(n, rng));
        m += (&v * v.adjoint()) * Complex64::new(wj / total, 0.0);
    }
    DenseState::new(n, m, 1e-12)
}

pub fn sample_separable(n: usize, k: usize, seed: u64) -> Result<DenseState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_separable_with(n, k, &mut rng)
}

/// Separability of a two-qubit X-state from the eigenvalues of its dense
/// partial transpose.
pub fn two_qubit_oracle(x: &XState) -> Result<bool> {
    if x.n() != 2 {
        return Err(XsepError::Invalid(format!(
            "expected 2 qubits, got {}",
            x.n()
        )));
    }
    let m = assemble(&x.a, &x.c)?;
    Ok(dense_is_ppt(&m, 2, 1e-12 * x.scale()))
}

/// Dense check of every partial transpose of `X(a, c)`, `n ≤ 4`.
pub fn dense_ppt_oracle(x: &XState, tol: f64) -> Result<bool> {
    if x.n() > MAX_ORACLE_QUBITS {
        return Err(XsepError::QubitCount {
            n: x.n(),
            max: MAX_ORACLE_QUBITS,
        });
    }
    Ok(dense_is_ppt(&assemble(&x.a, &x.c)?, x.n(), tol))
}

/// Random unit-trace positive X-state: `a` uniform on the simplex, then each
/// `c_i` uniform in the disc of radius `sqrt(a_i a_ī)` times `reach`.
pub fn random_xstate<R: Rng>(n: usize, reach: f64, rng: &mut R) -> Result<XState> {
    let raw: Vec<f64> = (0..dim(n)).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let a = DiagVec::new(n, raw.iter().map(|x| x / total).collect())?;
    let half = Index::all(n)
        .take(dim(n) / 2)
        .map(|i| {
            let g = (a.get(i) * a.get(i.complement())).sqrt();
            let radius = g * reach * rng.random::<f64>().sqrt();
            Complex64::from_polar(
                radius.min(g),
                rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            )
        })
        .collect();
    XState::new(a, HermVec::from_half(n, half)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_delta_one_qubit() {
        let s = DiagVec::constant(1, 1.0).unwrap();
        assert!((grid_delta(&s, 3.0, 601).unwrap() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn guard_trips() {
        let s = DiagVec::constant(9, 1.0).unwrap();
        assert!(matches!(
            grid_delta(&s, 1.0, 100),
            Err(XsepError::CostGuard { .. })
        ));
    }

    #[test]
    fn product_mixture_has_unit_trace() {
        let rho = sample_separable(3, 5, 7).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        rho.validate_state(1e-12).unwrap();
    }
}
