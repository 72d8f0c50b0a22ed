//! Linear programs in bounded-variable form and the planning LP.
//!
//! ```text
//! min  c'x + offset
//! s.t. row_lo <= A x <= row_hi
//!      lo <= x <= hi
//! ```

use alloc::string::String;
use alloc::vec::Vec;

mod simplex;
pub mod toss;

pub use simplex::{solve, SimplexOptions};
pub use toss::{
    assemble, extract_trajectory, LpOptions, SpatialTrajectory, TossProblem, VarLayout,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    /// Sparse coefficients `(variable, value)`.
    pub coeffs: Vec<(usize, f64)>,
    pub lower: f64,
    pub upper: f64,
}

impl Row {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub names: Vec<String>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
    /// Constant added to the objective.
    pub offset: f64,
    /// Optional starting values for the nonbasic variables.
    pub start: Option<Vec<f64>>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, cost: f64, lower: f64, upper: f64) -> usize {
        self.names.push(name.into());
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.len() - 1
    }

    /// Adds `lower <= sum coeffs <= upper`; zero coefficients are dropped.
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        lower: f64,
        upper: f64,
    ) -> usize {
        let coeffs = coeffs.into_iter().filter(|&(_, a)| a != 0.0).collect();
        self.rows.push(Row {
            name: name.into(),
            coeffs,
            lower,
            upper,
        });
        self.rows.len() - 1
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.offset + self.cost.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Largest violation of a row or variable bound.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut v: f64 = 0.0;
        for (j, &xj) in x.iter().enumerate() {
            v = v.max(self.lower[j] - xj).max(xj - self.upper[j]);
        }
        for r in &self.rows {
            let a = r.eval(x);
            v = v.max(r.lower - a).max(a - r.upper);
        }
        v
    }

    /// Largest violation of a variable bound alone.
    pub fn max_bound_violation(&self, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(j, &xj)| (self.lower[j] - xj).max(xj - self.upper[j]))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub max_violation: f64,
    /// For infeasible problems, the row whose artificial variable stayed
    /// largest at the end of phase one.
    pub row_hint: Option<usize>,
}
