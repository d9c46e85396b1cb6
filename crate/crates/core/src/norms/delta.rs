//! `δ_n(s) = inf_{r>0} Σ_i s_i r^i`.
//!
//! In log variables `ρ = log r` the objective is `Σ_i s_i exp⟨σ_i, ρ⟩` with
//! `σ_i(k) = 1 − 2 i(k)`, a convex function. The upper endpoint is the value
//! at the Newton minimizer; the lower endpoint comes from weighted AM-GM with
//! exactly balanced weights `w` (`Σ_i w_i σ_i = 0`, `Σ w = 1`), which gives
//! `δ_n(s) ≥ ∏ (s_i / w_i)^{w_i}`.

use nalgebra::{DMatrix, DVector};

use super::{BoundInterval, Method, OptimConfig};
use crate::error::{Result, XsepError};
use crate::index::{dim, Index};
use crate::lp::{Lp, LpOutcome, Sense};
use crate::xstate::DiagVec;

/// Enclosure of `δ_n(s)` with the data behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaResult {
    pub bound: BoundInterval,
    /// A point `ρ = log r` whose objective value is `bound.upper`
    /// (absent for the `n ≤ 2` formulas).
    pub log_r: Option<Vec<f64>>,
    /// Balanced AM-GM weights over all `2^n` indices behind `bound.lower`.
    pub weights: Option<Vec<f64>>,
}

pub fn delta(s: &DiagVec, cfg: &OptimConfig) -> Result<BoundInterval> {
    Ok(delta_detailed(s, cfg)?.bound)
}

pub fn delta_detailed(s: &DiagVec, cfg: &OptimConfig) -> Result<DeltaResult> {
    let n = s.n();
    if let Some(p) = s.values().iter().position(|&x| x < 0.0) {
        return Err(XsepError::Negative {
            index: Index::new(n, p as u32)?.to_string(),
            value: s.values()[p],
        });
    }
    let v = s.values();
    if cfg.closed_forms && n <= 2 {
        let value = if n == 1 {
            2.0 * (v[0] * v[1]).sqrt()
        } else {
            2.0 * ((v[0] * v[3]).sqrt() + (v[1] * v[2]).sqrt())
        };
        return Ok(DeltaResult {
            bound: BoundInterval::exact(value, Method::ClosedForm),
            log_r: None,
            weights: None,
        });
    }

    let signs: Vec<Vec<f64>> = Index::all(n)
        .map(|i| (1..=n).map(|k| i.sign(k)).collect())
        .collect();
    let support: Vec<usize> = (0..dim(n)).filter(|&r| v[r] > 0.0).collect();
    if support.is_empty() {
        return Ok(zero_result(vec![0.0; n]));
    }

    let (essential, interior) = if support.len() == dim(n) {
        (support.clone(), vec![1.0 / dim(n) as f64; dim(n)])
    } else {
        essential_support(n, &support, &signs)?
    };
    if essential.is_empty() {
        let d = recession(n, &[], &support, &signs).unwrap_or_else(|| vec![0.0; n]);
        let t = escape_length(v, &support, &signs, &vec![0.0; n], &d, 0.0, 1e-6);
        let point: Vec<f64> = d.iter().map(|x| x * t).collect();
        return Ok(zero_result(point));
    }

    let logs: Vec<f64> = essential.iter().map(|&r| v[r].ln()).collect();
    let sig: Vec<&[f64]> = essential.iter().map(|&r| signs[r].as_slice()).collect();
    let rho = newton(n, &logs, &sig, cfg);

    // Upper endpoint: the objective at an explicit point. Off the essential
    // support, slide along a recession direction until those terms vanish.
    let f_ess = posynomial(v, &signs, &essential, &rho);
    let mut point = rho.clone();
    if essential.len() < support.len() {
        let rest: Vec<usize> = support
            .iter()
            .copied()
            .filter(|r| !essential.contains(r))
            .collect();
        if let Some(d) = recession(n, &essential, &rest, &signs) {
            let t = escape_length(v, &rest, &signs, &rho, &d, f_ess, 1e-17);
            point = rho.iter().zip(&d).map(|(x, y)| x + t * y).collect();
        }
    }
    let upper = posynomial(v, &signs, &support, &point).min(s.sum());

    // Lower endpoint: softmax weights at the minimizer, corrected to exact
    // balance and mixed with an interior balanced weight if needed.
    let p = softmax(&logs, &sig, &rho);
    let w = balance(
        n,
        &p,
        &sig,
        &essential.iter().map(|&r| interior[r]).collect::<Vec<_>>(),
    );
    let mut log_bound = 0.0;
    for (q, &wi) in w.iter().enumerate() {
        if wi > 0.0 {
            log_bound += wi * (logs[q] - wi.ln());
        }
    }
    let lower = log_bound.exp() * (1.0 - 1e-13);
    let mut weights = vec![0.0; dim(n)];
    for (q, &r) in essential.iter().enumerate() {
        weights[r] = w[q];
    }
    Ok(DeltaResult {
        bound: BoundInterval::new(lower, Method::GpDual, upper, Method::FeasiblePoint),
        log_r: Some(point),
        weights: Some(weights),
    })
}

fn zero_result(point: Vec<f64>) -> DeltaResult {
    DeltaResult {
        bound: BoundInterval::exact(0.0, Method::ZeroPattern),
        log_r: Some(point),
        weights: None,
    }
}

fn posynomial(v: &[f64], signs: &[Vec<f64>], terms: &[usize], rho: &[f64]) -> f64 {
    terms
        .iter()
        .map(|&r| v[r] * dot(&signs[r], rho).exp())
        .sum()
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn softmax(logs: &[f64], sig: &[&[f64]], rho: &[f64]) -> Vec<f64> {
    let z: Vec<f64> = logs.iter().zip(sig).map(|(l, s)| l + dot(s, rho)).collect();
    let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|x| (x - zmax).exp()).collect();
    let total: f64 = e.iter().sum();
    e.iter().map(|x| x / total).collect()
}

fn log_sum_exp(logs: &[f64], sig: &[&[f64]], rho: &[f64]) -> f64 {
    let z: Vec<f64> = logs.iter().zip(sig).map(|(l, s)| l + dot(s, rho)).collect();
    let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    zmax + z.iter().map(|x| (x - zmax).exp()).sum::<f64>().ln()
}

/// Damped Newton on `log Σ exp(logs_q + ⟨σ_q, ρ⟩)`.
fn newton(n: usize, logs: &[f64], sig: &[&[f64]], cfg: &OptimConfig) -> Vec<f64> {
    let mut rho = vec![0.0; n];
    let mut value = log_sum_exp(logs, sig, &rho);
    for _ in 0..cfg.max_iter {
        let p = softmax(logs, sig, &rho);
        let mut g = DVector::<f64>::zeros(n);
        let mut h = DMatrix::<f64>::zeros(n, n);
        for (q, s) in sig.iter().enumerate() {
            for a in 0..n {
                g[a] += p[q] * s[a];
                for b in 0..n {
                    h[(a, b)] += p[q] * s[a] * s[b];
                }
            }
        }
        h -= &g * g.transpose();
        if g.amax() <= cfg.descent_tol {
            break;
        }
        let mut mu = 1e-12 * (1.0 + h.trace());
        let step = loop {
            let reg = &h + DMatrix::<f64>::identity(n, n) * mu;
            if let Some(ch) = reg.cholesky() {
                break ch.solve(&(-&g));
            }
            mu *= 100.0;
        };
        let slope = g.dot(&step);
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-20 {
            let trial: Vec<f64> = rho
                .iter()
                .zip(step.iter())
                .map(|(x, d)| x + t * d)
                .collect();
            let tv = log_sum_exp(logs, sig, &trial);
            if tv <= value + 1e-4 * t * slope {
                rho = trial;
                value = tv;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    rho
}

/// Projects `p` onto `{w : Σ w_q σ_q = 0, Σ w = 1}` in the least-squares
/// sense, then mixes with `interior` (balanced, positive) to restore `w ≥ 0`.
fn balance(n: usize, p: &[f64], sig: &[&[f64]], interior: &[f64]) -> Vec<f64> {
    let m = p.len();
    let a = DMatrix::from_fn(n + 1, m, |row, q| if row < n { sig[q][row] } else { 1.0 });
    let pv = DVector::from_column_slice(p);
    let mut target = DVector::<f64>::zeros(n + 1);
    target[n] = 1.0;
    let resid = &target - &a * &pv;
    let aat = &a * a.transpose();
    let y = aat
        .svd(true, true)
        .solve(&resid, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(n + 1));
    let mut w: Vec<f64> = (&pv + a.transpose() * y).iter().copied().collect();

    let total: f64 = interior.iter().sum();
    let inner: Vec<f64> = interior.iter().map(|x| x / total).collect();
    let mut tau: f64 = 0.0;
    for (wi, oi) in w.iter().zip(&inner) {
        if *wi < 0.0 {
            tau = tau.max(-wi / (oi - wi));
        }
    }
    if tau > 0.0 {
        for (wi, oi) in w.iter_mut().zip(&inner) {
            *wi = (1.0 - tau) * *wi + tau * oi;
        }
    }
    for wi in w.iter_mut() {
        if *wi < 0.0 {
            *wi = 0.0;
        }
    }
    w
}

/// Indices of the support that carry positive weight in some balanced
/// weight vector, with one such vector positive on all of them.
fn essential_support(
    n: usize,
    support: &[usize],
    signs: &[Vec<f64>],
) -> Result<(Vec<usize>, Vec<f64>)> {
    let mut lp = Lp::maximize();
    let w: Vec<usize> = support
        .iter()
        .map(|_| lp.var(0.0, 0.0, f64::INFINITY))
        .collect();
    let t: Vec<usize> = support.iter().map(|_| lp.var(1.0, 0.0, 1.0)).collect();
    for q in 0..support.len() {
        lp.row(vec![(t[q], 1.0), (w[q], -1.0)], Sense::Le, 0.0);
    }
    for k in 0..n {
        lp.row(
            support
                .iter()
                .enumerate()
                .map(|(q, &r)| (w[q], signs[r][k]))
                .collect(),
            Sense::Eq,
            0.0,
        );
    }
    let x = match lp.solve()? {
        LpOutcome::Optimal { x, .. } => x,
        _ => return Err(XsepError::Lp("support program has no optimum".into())),
    };
    let mut essential = Vec::new();
    let mut interior = vec![0.0; dim(n)];
    for (q, &r) in support.iter().enumerate() {
        if x[t[q]] > 0.5 {
            essential.push(r);
            interior[r] = x[w[q]];
        }
    }
    Ok((essential, interior))
}

/// A direction `d` with `⟨σ_i, d⟩ = 0` on `flat` and `≤ −1` on `falling`.
fn recession(n: usize, flat: &[usize], falling: &[usize], signs: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut lp = Lp::minimize();
    let d: Vec<usize> = (0..n).map(|_| lp.var(0.0, -1e4, 1e4)).collect();
    for &r in flat {
        lp.row(
            d.iter()
                .enumerate()
                .map(|(k, &v)| (v, signs[r][k]))
                .collect(),
            Sense::Eq,
            0.0,
        );
    }
    for &r in falling {
        lp.row(
            d.iter()
                .enumerate()
                .map(|(k, &v)| (v, signs[r][k]))
                .collect(),
            Sense::Le,
            -1.0,
        );
    }
    match lp.solve() {
        Ok(LpOutcome::Optimal { x, .. }) => Some(x),
        _ => None,
    }
}

/// Step length along `d` after which each listed term is at most
/// `frac * scale / #terms` (assuming `⟨σ_i, d⟩ ≤ −1` on them), or at most
/// `frac` when `scale` is 0.
fn escape_length(
    v: &[f64],
    terms: &[usize],
    signs: &[Vec<f64>],
    rho: &[f64],
    d: &[f64],
    scale: f64,
    frac: f64,
) -> f64 {
    let target = if scale > 0.0 {
        (frac * scale / terms.len().max(1) as f64).ln()
    } else {
        (frac / terms.len().max(1) as f64).ln()
    };
    let mut t: f64 = 0.0;
    for &r in terms {
        let slope = -dot(&signs[r], d);
        if slope <= 0.0 {
            continue;
        }
        let level = v[r].ln() + dot(&signs[r], rho);
        t = t.max((level - target) / slope);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(n: usize, v: &[f64]) -> DiagVec {
        DiagVec::new(n, v.to_vec()).unwrap()
    }

    #[test]
    fn closed_forms() {
        let cfg = OptimConfig::default();
        let b = delta(&dv(1, &[1.0, 1.0]), &cfg).unwrap();
        assert_eq!((b.lower, b.upper), (2.0, 2.0));
        let b = delta(&dv(2, &[1.0, 4.0, 9.0, 16.0]), &cfg).unwrap();
        assert_eq!((b.lower, b.upper), (20.0, 20.0));
    }

    #[test]
    fn numeric_route_matches_closed_forms() {
        let cfg = OptimConfig {
            closed_forms: false,
            ..OptimConfig::default()
        };
        let b = delta(&dv(2, &[1.0, 4.0, 9.0, 16.0]), &cfg).unwrap();
        assert!(b.lower <= 20.0 + 1e-12 && b.upper >= 20.0 - 1e-12);
        assert!(b.width() < 1e-9, "{b:?}");
    }

    #[test]
    fn all_ones() {
        let b = delta(&DiagVec::constant(4, 1.0).unwrap(), &OptimConfig::default()).unwrap();
        assert!((b.lower - 16.0).abs() < 1e-9 && (b.upper - 16.0).abs() < 1e-9);
    }

    #[test]
    fn unbalanced_support_is_zero() {
        let mut v = vec![0.0; 8];
        v[0] = 1.0;
        v[1] = 2.0;
        let b = delta(&dv(3, &v), &OptimConfig::default()).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
    }

    #[test]
    fn inessential_terms_are_dropped() {
        // {000, 111} is balanced; 001 cannot join any balanced weight.
        let mut v = vec![0.0; 8];
        v[0] = 1.0;
        v[7] = 4.0;
        v[1] = 3.0;
        let r = delta_detailed(&dv(3, &v), &OptimConfig::default()).unwrap();
        assert!((r.bound.lower - 4.0).abs() < 1e-9, "{:?}", r.bound);
        assert!((r.bound.upper - 4.0).abs() < 1e-9, "{:?}", r.bound);
    }

    #[test]
    fn negative_rejected() {
        assert!(matches!(
            delta(&dv(1, &[1.0, -1.0]), &OptimConfig::default()),
            Err(XsepError::Negative { .. })
        ));
    }
}
