//! The four functionals `δ_n`, `‖·‖_X_n`, `Δ_n` and `‖·‖′_X_n`, each
//! returned as a certified enclosure.

mod delta;
mod dual;
mod torus;

use serde::Serialize;

pub use delta::{delta, delta_detailed, DeltaResult};
pub use dual::{
    delta_cap, delta_cap_detailed, dual_norm, dual_norm_detailed, dual_norm_targeted,
    multiset_pattern, DeltaCapResult, DualNormResult, MAX_LP_QUBITS,
};
pub use torus::{xnorm, xnorm_detailed, XnormResult};

/// How an endpoint of a [`BoundInterval`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Explicit formula; both endpoints coincide.
    ClosedForm,
    /// Weighted AM-GM bound from balanced weights.
    GpDual,
    /// Branch-and-bound over angle boxes with a certified per-box bound.
    GridLipschitz,
    /// Objective evaluated at an explicit point.
    FeasiblePoint,
    /// `2‖u‖_∞ ≤ ‖u‖_X ≤ ‖u‖_1` or `‖c‖_∞ ≤ ‖c‖′ ≤ ½‖c‖_1`.
    Sandwich,
    /// Exact zero forced by the support of the input.
    ZeroPattern,
    /// Minimum geometric mean over irreducible balanced multisets.
    MultisetMean,
    /// Finite linear relaxation with a verified certificate.
    CuttingPlane,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::GpDual => "gp-dual",
            Method::GridLipschitz => "grid-lipschitz",
            Method::FeasiblePoint => "feasible-point",
            Method::Sandwich => "sandwich",
            Method::ZeroPattern => "zero-pattern",
            Method::MultisetMean => "multiset-mean",
            Method::CuttingPlane => "cutting-plane",
        }
    }
}

/// Certified enclosure `[lower, upper]` of an infimum or supremum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundInterval {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: Method,
    pub upper_method: Method,
}

impl BoundInterval {
    pub fn new(lower: f64, lower_method: Method, upper: f64, upper_method: Method) -> Self {
        // Rounding can push a tight lower endpoint a hair above the upper one.
        let lower = if lower > upper { upper } else { lower };
        Self {
            lower,
            upper,
            lower_method,
            upper_method,
        }
    }

    pub fn exact(value: f64, method: Method) -> Self {
        Self::new(value, method, value, method)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lower - tol <= x && x <= self.upper + tol
    }

    /// Raises the lower endpoint to `value` if that is an improvement.
    pub fn raise_lower(&mut self, value: f64, method: Method) {
        if value > self.lower {
            self.lower = value.min(self.upper);
            self.lower_method = method;
        }
    }

    /// Lowers the upper endpoint to `value` if that is an improvement.
    pub fn lower_upper(&mut self, value: f64, method: Method) {
        if value < self.upper {
            self.upper = value;
            self.upper_method = method;
            if self.lower > self.upper {
                self.lower = self.upper;
            }
        }
    }

    /// Endpoints multiplied by a nonnegative factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            lower: self.lower * factor,
            upper: self.upper * factor,
            ..*self
        }
    }
}

/// Search budgets and tolerances. The seed fixes every stochastic choice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimConfig {
    /// Initial subdivisions per angle in torus searches.
    pub grid: usize,
    /// Random restarts in heuristic searches.
    pub multistart: usize,
    /// Gradient tolerance of the log-space Newton descent.
    pub descent_tol: f64,
    /// Iteration cap of the Newton descent.
    pub max_iter: usize,
    pub seed: u64,
    /// Certified-gap target for torus suprema, relative to `‖u‖_1`;
    /// `None` picks a default by qubit count.
    pub torus_rel_tol: Option<f64>,
    /// Objective evaluations allowed per torus search.
    pub max_evals: usize,
    /// Rounds of the cutting-plane loops for `Δ_n` and `‖·‖′_X_n`.
    pub lp_rounds: usize,
    /// Box `[-L, L]^n` for log-radii of cutting planes.
    pub log_radius: f64,
    /// Use explicit formulas where available.
    pub closed_forms: bool,
    /// Margin for verdict comparisons, relative to the size of the state.
    pub decision_tol: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            grid: 64,
            multistart: 16,
            descent_tol: 1e-13,
            max_iter: 200,
            seed: 0,
            torus_rel_tol: None,
            max_evals: 2_000_000,
            lp_rounds: 400,
            log_radius: 6.0,
            closed_forms: true,
            decision_tol: 1e-9,
        }
    }
}

impl OptimConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Default certified-gap target for torus suprema.
    pub fn torus_tol(&self, n: usize) -> f64 {
        self.torus_rel_tol.unwrap_or(match n {
            0..=3 => 1e-10,
            4 => 1e-6,
            5 => 1e-4,
            _ => 1e-3,
        })
    }
}
