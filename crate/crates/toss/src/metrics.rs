//! Comparison metrics of planned trajectories.

use std::fmt::Write as _;

use serde::Serialize;

use crate::units::{to_deg, to_kmh};

/// One row of the comparison table, in SI units.
///
/// Rates are per step of the trajectory: per grid interval for spatial
/// plans and per sampling interval for the time-domain baseline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodMetrics {
    pub method: String,
    /// Traversal time `t*` (s); `None` when the end was not reached.
    pub t_star: Option<f64>,
    pub v_min: f64,
    pub v_max: f64,
    pub dv_max: f64,
    pub delta_max: f64,
    pub ddelta_max: f64,
}

fn max_step(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max)
}

impl MethodMetrics {
    pub fn from_series(method: &str, t_star: Option<f64>, speed: &[f64], delta: &[f64]) -> Self {
        Self {
            method: method.to_string(),
            t_star,
            v_min: speed.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min),
            v_max: speed.iter().map(|v| v.abs()).fold(0.0, f64::max),
            dv_max: max_step(speed),
            delta_max: delta.iter().map(|d| d.abs()).fold(0.0, f64::max),
            ddelta_max: max_step(delta),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<MethodMetrics>,
}

impl ComparisonTable {
    pub fn get(&self, method: &str) -> Option<&MethodMetrics> {
        self.rows.iter().find(|r| r.method == method)
    }

    /// Table for people: km/h and degrees.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:>8} {:>12} {:>12} {:>13} {:>11} {:>12}",
            "method",
            "t* [s]",
            "|v|min km/h",
            "|v|max km/h",
            "|dv|max km/h",
            "|d|max deg",
            "|dd|max deg"
        );
        for r in &self.rows {
            let t = r.t_star.map_or("-".to_string(), |t| format!("{t:.2}"));
            let _ = writeln!(
                out,
                "{:<8} {:>8} {:>12.1} {:>12.1} {:>13.2} {:>11.2} {:>12.2}",
                r.method,
                t,
                to_kmh(r.v_min),
                to_kmh(r.v_max),
                to_kmh(r.dv_max),
                to_deg(r.delta_max),
                to_deg(r.ddelta_max)
            );
        }
        out
    }
}
