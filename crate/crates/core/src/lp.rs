//! Small dense linear programs on top of `microlp`.
//!
//! The solvers in this crate only ever build programs with a handful of
//! variables and at most a few thousand rows, so rows are stored densely and
//! handed to the sparse backend with zeros dropped.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Cmp {
    Le,
    Eq,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<f64>,
    cmp: Cmp,
    rhs: f64,
}

/// `minimize c·x` subject to dense rows and per-variable bounds.
#[derive(Clone, Debug)]
pub(crate) struct LinearProgram {
    bounds: Vec<(f64, f64)>,
    rows: Vec<Row>,
}

#[derive(Clone, Debug)]
pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LinearProgram {
    /// All variables start free.
    pub fn new(num_vars: usize) -> Self {
        Self {
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); num_vars],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.bounds.len()
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        self.bounds[var] = (lo, hi);
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, cmp: Cmp, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.num_vars());
        self.rows.push(Row { coeffs, cmp, rhs });
    }

    pub fn minimize(&self, objective: &[f64]) -> Result<LpSolution> {
        self.solve(objective, OptimizationDirection::Minimize)
    }

    pub fn maximize(&self, objective: &[f64]) -> Result<LpSolution> {
        self.solve(objective, OptimizationDirection::Maximize)
    }

    /// Minimizes `objective`, then walks `order` and minimizes each listed
    /// variable in turn while keeping every earlier stage within `slack` of
    /// its optimum.
    pub fn lex_minimize(
        &self,
        objective: &[f64],
        order: &[usize],
        slack: f64,
    ) -> Result<LpSolution> {
        let first = self.minimize(objective)?;
        let mut staged = self.clone();
        let mut last = first.clone();
        let mut bound = (objective.to_vec(), first.objective);
        for &var in order {
            let mut unit = vec![0.0; self.num_vars()];
            unit[var] = 1.0;
            // Exact bound first, relaxed by `slack` if the backend rejects it.
            let mut stage = None;
            for relax in [0.0, slack * (1.0 + bound.1.abs())] {
                let mut trial = staged.clone();
                trial.add_row(bound.0.clone(), Cmp::Le, bound.1 + relax);
                if let Ok(s) = trial.minimize(&unit) {
                    stage = Some((trial, s));
                    break;
                }
            }
            let Some((trial, s)) = stage else { break };
            staged = trial;
            bound = (unit, s.objective);
            last = s;
        }
        let value = dot(objective, &last.x);
        Ok(LpSolution {
            x: last.x,
            objective: value.max(first.objective),
        })
    }

    fn solve(&self, objective: &[f64], direction: OptimizationDirection) -> Result<LpSolution> {
        debug_assert_eq!(objective.len(), self.num_vars());
        let mut problem = Problem::new(direction);
        let vars: Vec<_> = objective
            .iter()
            .zip(&self.bounds)
            .map(|(&c, &b)| problem.add_var(c, b))
            .collect();
        for row in &self.rows {
            let terms: Vec<_> = row
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, &c)| (vars[i], c))
                .collect();
            let op = match row.cmp {
                Cmp::Le => ComparisonOp::Le,
                Cmp::Eq => ComparisonOp::Eq,
            };
            problem.add_constraint(terms.as_slice(), op, row.rhs);
        }
        let outcome = problem.solve().map_err(|e| Error::Lp(e.to_string()))?;
        let solution = outcome
            .into_solution()
            .map_err(|_| Error::Lp("solve interrupted".into()))?;
        let x: Vec<f64> = vars.iter().map(|&v| solution.var_value(v)).collect();
        Ok(LpSolution {
            objective: solution.objective(),
            x,
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
