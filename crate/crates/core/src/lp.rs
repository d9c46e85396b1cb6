//! Small dense linear programs on top of `microlp`.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};

use crate::error::{Result, XsepError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sense {
    Le,
    Ge,
    Eq,
}

pub(crate) struct Lp {
    maximize: bool,
    objective: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    rows: Vec<(Vec<(usize, f64)>, Sense, f64)>,
}

pub(crate) enum LpOutcome {
    Optimal { objective: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl Lp {
    pub(crate) fn maximize() -> Self {
        Self {
            maximize: true,
            objective: Vec::new(),
            bounds: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub(crate) fn minimize() -> Self {
        Self {
            maximize: false,
            ..Self::maximize()
        }
    }

    pub(crate) fn var(&mut self, obj: f64, lo: f64, hi: f64) -> usize {
        self.objective.push(obj);
        self.bounds.push((lo, hi));
        self.objective.len() - 1
    }

    pub(crate) fn row(&mut self, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push((terms, sense, rhs));
    }

    pub(crate) fn solve(&self) -> Result<LpOutcome> {
        let mut p = Problem::new(if self.maximize {
            OptimizationDirection::Maximize
        } else {
            OptimizationDirection::Minimize
        });
        let vars: Vec<_> = self
            .objective
            .iter()
            .zip(&self.bounds)
            .map(|(&c, &b)| p.add_var(c, b))
            .collect();
        for (terms, sense, rhs) in &self.rows {
            let expr: Vec<_> = terms
                .iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|&(v, c)| (vars[v], c))
                .collect();
            let op = match sense {
                Sense::Le => ComparisonOp::Le,
                Sense::Ge => ComparisonOp::Ge,
                Sense::Eq => ComparisonOp::Eq,
            };
            p.add_constraint(expr.as_slice(), op, *rhs);
        }
        match p.solve() {
            Ok(SolveOutcome::Solution(sol)) => Ok(LpOutcome::Optimal {
                objective: sol.objective(),
                x: vars.iter().map(|&v| sol.var_value(v)).collect(),
            }),
            Ok(SolveOutcome::Interrupted(_)) => Err(XsepError::Lp("solve interrupted".into())),
            Err(microlp::Error::Infeasible) => Ok(LpOutcome::Infeasible),
            Err(microlp::Error::Unbounded) => Ok(LpOutcome::Unbounded),
            Err(e) => Err(XsepError::Lp(e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_program() {
        let mut lp = Lp::maximize();
        let x = lp.var(1.0, 0.0, f64::INFINITY);
        let y = lp.var(2.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.row(vec![(x, 1.0), (y, 1.0)], Sense::Le, 4.0);
        lp.row(vec![(y, 1.0)], Sense::Le, 1.0);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { objective, x } => {
                assert!((objective - 5.0).abs() < 1e-9);
                assert!((x[0] - 3.0).abs() < 1e-9);
            }
            _ => panic!("expected optimum"),
        }
    }
}
