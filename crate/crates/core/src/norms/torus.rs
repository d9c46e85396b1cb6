//! `‖u‖_X_n = sup_{α ∈ 𝕋^n} Σ_i u_i α^i`.
//!
//! For `n ≥ 3` the last `m = n − 2` qubits are contracted at angles `ψ`,
//! leaving a two-qubit vector `v(ψ)` whose torus supremum is exactly
//! `2(|v_00| + |v_01|)`. The remaining supremum over `ψ ∈ [0, π)^m` (each
//! angle has period π up to a sign of `v`) is certified by branch and bound
//! with a second-order bound on every box.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::{BoundInterval, Method, OptimConfig};
use crate::index::{dim, Index};
use crate::xstate::HermVec;

/// Enclosure of `‖u‖_X_n` with a maximizing point.
#[derive(Clone, Debug, PartialEq)]
pub struct XnormResult {
    pub bound: BoundInterval,
    /// Angles `φ` with `Σ_i u_i e^{i⟨σ_i, φ⟩}` equal to the best value found.
    pub angles: Vec<f64>,
    /// Objective evaluations spent.
    pub evaluations: usize,
    /// True when the evaluation budget ran out before the target gap.
    pub budget_exhausted: bool,
}

pub fn xnorm(u: &HermVec, cfg: &OptimConfig) -> BoundInterval {
    xnorm_detailed(u, cfg).bound
}

pub fn xnorm_detailed(u: &HermVec, cfg: &OptimConfig) -> XnormResult {
    torus_max(u, cfg.torus_tol(u.n()), cfg.max_evals, cfg.grid)
}

/// Certified torus supremum with absolute gap target `rel_tol · ‖u‖_1`.
pub(crate) fn torus_max(u: &HermVec, rel_tol: f64, max_evals: usize, grid: usize) -> XnormResult {
    let n = u.n();
    let l1 = u.norm_1();
    let floor = 2.0 * u.norm_inf();
    if l1 == 0.0 {
        return XnormResult {
            bound: BoundInterval::exact(0.0, Method::ClosedForm),
            angles: vec![0.0; n],
            evaluations: 0,
            budget_exhausted: false,
        };
    }
    if n <= 2 {
        let h = u.half();
        let angles = if n == 1 {
            vec![-h[0].arg()]
        } else {
            inner_angles(h[0], h[1]).to_vec()
        };
        return XnormResult {
            bound: BoundInterval::exact(l1, Method::ClosedForm),
            angles,
            evaluations: 0,
            budget_exhausted: false,
        };
    }

    let c = Contracted::new(u);
    let m = c.m;
    let tol = rel_tol * l1;
    let per_axis = match m {
        1 => grid.max(4),
        2 => (grid / 4).max(4),
        3 => (grid / 8).max(4),
        _ => 4,
    };
    let h0 = PI / (2.0 * per_axis as f64);

    let mut st = Search {
        heap: BinaryHeap::new(),
        best: f64::NEG_INFINITY,
        best_psi: vec![0.0; m],
        evaluations: 0,
        pruned_max: f64::NEG_INFINITY,
    };
    for flat in 0..per_axis.pow(m as u32) {
        let mut rem = flat;
        let mut center = vec![0.0; m];
        for x in center.iter_mut() {
            *x = ((rem % per_axis) as f64 + 0.5) * 2.0 * h0;
            rem /= per_axis;
        }
        st.consider(&c, center, h0);
    }

    let mut budget_exhausted = false;
    let upper = loop {
        let top = match st.heap.pop() {
            Some(t) => t,
            None => break st.best.max(st.pruned_max),
        };
        if top.ub <= st.best + tol {
            break top.ub.max(st.pruned_max).max(st.best);
        }
        if st.evaluations >= max_evals {
            budget_exhausted = true;
            break top.ub.max(st.pruned_max);
        }
        let h = top.h / 2.0;
        for corner in 0..(1usize << m) {
            let center: Vec<f64> = top
                .center
                .iter()
                .enumerate()
                .map(|(k, &x)| if corner >> k & 1 == 1 { x + h } else { x - h })
                .collect();
            st.consider(&c, center, h);
        }
        if st.heap.len() > 1 << 20 {
            st.prune(tol);
        }
    };
    let best_psi = st.best_psi;
    let evaluations = st.evaluations;

    let (v0, v1) = c.values(&best_psi);
    let inner = inner_angles(v0, v1);
    let mut angles = inner.to_vec();
    angles.extend_from_slice(&best_psi);
    let lower_value = u.torus_value(&angles);

    let mut bound = BoundInterval::new(
        lower_value,
        Method::FeasiblePoint,
        upper,
        Method::GridLipschitz,
    );
    bound.lower_upper(l1, Method::Sandwich);
    bound.raise_lower(floor, Method::Sandwich);
    XnormResult {
        bound,
        angles,
        evaluations,
        budget_exhausted,
    }
}

/// Angles `(φ_1, φ_2)` maximizing `2 Re(v_00 α_1 α_2) + 2 Re(v_01 α_1 ᾱ_2)`.
fn inner_angles(v0: Complex64, v1: Complex64) -> [f64; 2] {
    let t0 = v0.arg();
    let t1 = v1.arg();
    [-(t0 + t1) / 2.0, -(t0 - t1) / 2.0]
}

struct Search {
    heap: BinaryHeap<Node>,
    best: f64,
    best_psi: Vec<f64>,
    evaluations: usize,
    /// Largest bound among discarded boxes.
    pruned_max: f64,
}

impl Search {
    fn consider(&mut self, c: &Contracted, center: Vec<f64>, h: f64) {
        let (value, ub) = c.box_bound(&center, h);
        self.evaluations += 1;
        if value > self.best {
            self.best = value;
            self.best_psi = center.clone();
        }
        self.heap.push(Node { ub, center, h });
    }

    /// Drops boxes that cannot beat the incumbent by more than `tol`.
    fn prune(&mut self, tol: f64) {
        let nodes: Vec<Node> = self.heap.drain().collect();
        for node in nodes {
            if node.ub > self.best + tol {
                self.heap.push(node);
            } else {
                self.pruned_max = self.pruned_max.max(node.ub);
            }
        }
    }
}

struct Node {
    ub: f64,
    center: Vec<f64>,
    h: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.ub.total_cmp(&other.ub) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub.total_cmp(&other.ub)
    }
}

/// `u` with the last `m` qubits left as angle variables.
struct Contracted {
    m: usize,
    w: [Vec<Complex64>; 2],
    signs: Vec<Vec<f64>>,
    abs_sum: [f64; 2],
}

impl Contracted {
    fn new(u: &HermVec) -> Self {
        let m = u.n() - 2;
        let len = dim(m);
        let half = u.half();
        let w = [half[..len].to_vec(), half[len..2 * len].to_vec()];
        let signs = Index::all(m)
            .map(|l| (1..=m).map(|k| l.sign(k)).collect())
            .collect();
        let abs_sum = [
            w[0].iter().map(|z| z.norm()).sum(),
            w[1].iter().map(|z| z.norm()).sum(),
        ];
        Self {
            m,
            w,
            signs,
            abs_sum,
        }
    }

    /// `e^{i⟨σ_l, ψ⟩}` for every `l` in rank order.
    fn phases(&self, psi: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(1.0, 0.0)];
        for &a in psi {
            let e = Complex64::from_polar(1.0, a);
            let mut next = Vec::with_capacity(out.len() * 2);
            for p in &out {
                next.push(p * e);
                next.push(p * e.conj());
            }
            out = next;
        }
        out
    }

    fn values(&self, psi: &[f64]) -> (Complex64, Complex64) {
        let e = self.phases(psi);
        let v0 = self.w[0].iter().zip(&e).map(|(a, b)| a * b).sum();
        let v1 = self.w[1].iter().zip(&e).map(|(a, b)| a * b).sum();
        (v0, v1)
    }

    /// Objective at the center and an upper bound over the box of half-width
    /// `h` around it.
    ///
    /// With `v = v_j(c)`, gradient `g_k` and `δ` in the box,
    /// `v_j(c+δ) = v + Σ g_k δ_k + R` where `|R| ≤ ½ (m h)² Σ_l |w_jl|`.
    /// Writing `v̂* Σ g_k δ_k = x + iy` with `x ≥ −X`, `|y| ≤ Y`,
    /// `|v + Σ g_k δ_k| ≤ |v| + x + Y² / (2(|v| − X))` when `|v| > X`.
    /// The linear parts `x` of both terms are combined before maximizing.
    fn box_bound(&self, psi: &[f64], h: f64) -> (f64, f64) {
        let m = self.m;
        let e = self.phases(psi);
        let mut lin = vec![0.0; m];
        let mut base = 0.0;
        let mut extra = 0.0;
        for j in 0..2 {
            let mut v = Complex64::new(0.0, 0.0);
            let mut g = vec![Complex64::new(0.0, 0.0); m];
            for (l, (&wl, &el)) in self.w[j].iter().zip(&e).enumerate() {
                let t = wl * el;
                v += t;
                let it = Complex64::new(-t.im, t.re);
                for k in 0..m {
                    g[k] += it * self.signs[l][k];
                }
            }
            let a = v.norm();
            base += a;
            extra += 0.5 * (m as f64 * h).powi(2) * self.abs_sum[j];
            let mut merged = false;
            if a > 0.0 {
                let vhat = v.conj() / a;
                let proj: Vec<Complex64> = g.iter().map(|gk| vhat * gk).collect();
                let big_x: f64 = proj.iter().map(|p| p.re.abs()).sum::<f64>() * h;
                let big_y: f64 = proj.iter().map(|p| p.im.abs()).sum::<f64>() * h;
                if a - big_x > 1e-3 * a {
                    for k in 0..m {
                        lin[k] += proj[k].re;
                    }
                    extra += big_y * big_y / (2.0 * (a - big_x));
                    merged = true;
                }
            }
            if !merged {
                extra += g.iter().map(|gk| gk.norm()).sum::<f64>() * h;
            }
        }
        let ub = base + lin.iter().map(|x| x.abs()).sum::<f64>() * h + extra;
        (2.0 * base, 2.0 * ub)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ones_attain_l1() {
        for n in 1..=5 {
            let u = HermVec::constant(n, 1.0).unwrap();
            let cfg = OptimConfig::default();
            let b = xnorm(&u, &cfg);
            let l1 = dim(n) as f64;
            assert!((b.upper - l1).abs() < 1e-12);
            assert!(l1 - b.lower <= cfg.torus_tol(n) * l1, "{n}: {b:?}");
        }
    }

    #[test]
    fn three_qubit_example() {
        // u000 = u001 = u010 = 1, u011 = -1: 2 sup(|α+1| + |α-1|) = 4√2.
        let u = HermVec::from_half(3, vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)])
            .unwrap();
        let r = xnorm_detailed(&u, &OptimConfig::default());
        let want = 4.0 * 2f64.sqrt();
        assert!(r.bound.contains(want, 1e-12), "{:?}", r.bound);
        assert!(r.bound.width() < 1e-8, "{:?}", r.bound);
        assert!((u.torus_value(&r.angles) - r.bound.lower).abs() < 1e-12);
    }

    #[test]
    fn two_qubit_closed_form() {
        let u = HermVec::from_half(2, vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let b = xnorm(&u, &OptimConfig::default());
        assert_eq!((b.lower, b.upper), (4.0, 4.0));
    }
}
