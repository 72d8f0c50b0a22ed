//! Trajectory tables, run summaries and LP dumps.

use std::fmt::Write as _;

use serde::Serialize;
use toss_core::lp::LinearProgram;
use toss_core::planner::{PlanReport, Validation};

use crate::metrics::ComparisonTable;
use crate::run::BaselineRun;
use crate::scenario::Scenario;

pub const CSV_HEADER: &str = "s,e_psi,e_y,v,delta,t,x,y,psi";

/// Shortest decimal text of `x` rounded to 9 significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let r: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{r}")
}

/// Rows `s, e_psi, e_y, v, delta, t, x, y, psi` in SI units. The last row
/// repeats the final control.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryTable {
    pub rows: Vec<[f64; 9]>,
}

impl TrajectoryTable {
    pub fn from_plan(sc: &Scenario, report: &PlanReport) -> toss_core::Result<Self> {
        let tr = &report.pass2;
        let n = tr.intervals();
        let mut rows = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let (p, psi) =
                sc.centerline()
                    .frenet_to_global(tr.stations[j], tr.e_y[j], tr.e_psi[j])?;
            let k = j.min(n - 1);
            rows.push([
                tr.stations[j],
                tr.e_psi[j],
                tr.e_y[j],
                tr.speed[k],
                tr.delta[k],
                tr.time[j],
                p.x,
                p.y,
                psi,
            ]);
        }
        Ok(Self { rows })
    }

    /// Baseline rollout; stations and offsets come from projecting onto the
    /// centerline. Rows stop where the projection fails.
    pub fn from_baseline(sc: &Scenario, run: &BaselineRun) -> Self {
        let c = sc.centerline();
        let u = &run.plan.controls;
        let mut rows = Vec::with_capacity(run.rollout.len());
        for (k, xi) in run.rollout.iter().enumerate() {
            let Ok(f) = c.global_to_frenet(toss_core::geometry::Point2::new(xi.x, xi.y), xi.psi)
            else {
                break;
            };
            let uk = u[k.min(u.len() - 1)];
            let t = sc.initial.time + k as f64 * run.refs.ts;
            rows.push([
                f.s, f.e_psi, f.e_y, uk.speed, uk.delta, t, xi.x, xi.y, xi.psi,
            ]);
        }
        Self { rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 120);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|&v| sig9(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            other => return Err(format!("expected header {CSV_HEADER:?}, found {other:?}")),
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 9 {
                return Err(format!(
                    "line {}: expected 9 columns, found {}",
                    i + 2,
                    cells.len()
                ));
            }
            let mut row = [0.0; 9];
            for (slot, c) in row.iter_mut().zip(&cells) {
                *slot = c
                    .trim()
                    .parse()
                    .map_err(|e| format!("line {}: {c:?}: {e}", i + 2))?;
            }
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TossSummary {
    pub traversal_time: f64,
    pub intervals: usize,
    /// Terminal heading, terminal offset, corridor and waypoint slacks.
    pub slacks: [f64; 4],
    pub max_abs_delta: f64,
    pub max_abs_delta_rate: f64,
    pub objective: f64,
    pub objective_time: f64,
    pub objective_steer: f64,
    pub objective_steer_rate: f64,
    pub objective_slack: f64,
    pub path_length: f64,
    pub lp_solves: usize,
    pub lp_iterations: [usize; 2],
    pub max_violation: f64,
    pub margin: f64,
    pub margin_heading: f64,
    pub slack_used: bool,
    pub corridor_too_narrow: bool,
    pub references_clipped: bool,
}

impl TossSummary {
    pub fn new(report: &PlanReport) -> Self {
        let tr = &report.pass2;
        let o = &tr.objective;
        Self {
            traversal_time: tr.traversal_time(),
            intervals: tr.intervals(),
            slacks: tr.slacks,
            max_abs_delta: tr.gamma[0],
            max_abs_delta_rate: tr.gamma[1],
            objective: o.total,
            objective_time: o.time,
            objective_steer: o.steer,
            objective_steer_rate: o.steer_rate,
            objective_slack: o.slack,
            path_length: tr.path_length,
            lp_solves: report.lp_solves,
            lp_iterations: [report.pass1.lp_iterations, tr.lp_iterations],
            max_violation: tr.max_violation,
            margin: report.margin.delta_e_y,
            margin_heading: report.margin.heading,
            slack_used: report.flags.slack_used,
            corridor_too_narrow: report.flags.corridor_too_narrow,
            references_clipped: report.flags.references_clipped,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LtvSummary {
    pub v_ref: f64,
    pub friction_adapted: bool,
    pub steps: usize,
    pub traversal_time: Option<f64>,
    pub cost: f64,
    pub qp_iterations: usize,
    pub kkt_residual: f64,
    pub max_abs_e_y: f64,
    pub departure_step: Option<usize>,
}

impl LtvSummary {
    pub fn new(run: &BaselineRun) -> Self {
        Self {
            v_ref: run.v_ref,
            friction_adapted: run.friction_adapted,
            steps: run.plan.controls.len(),
            traversal_time: run.t_star,
            cost: run.plan.cost,
            qp_iterations: run.plan.qp.iterations,
            kkt_residual: run.plan.qp.kkt_residual,
            max_abs_e_y: run.lane.max_abs_e_y,
            departure_step: run.lane.departure,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationSummary {
    pub max_e_y_deviation: f64,
    pub max_time_deviation: f64,
    pub corridor_violation: f64,
    pub max_step_defect: f64,
    pub failure: Option<String>,
}

impl From<&Validation> for ValidationSummary {
    fn from(v: &Validation) -> Self {
        Self {
            max_e_y_deviation: v.max_e_y_deviation,
            max_time_deviation: v.max_time_deviation,
            corridor_violation: v.corridor_violation,
            max_step_defect: v.max_step_defect,
            failure: v.failure.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Machine-readable summary of a run. Contains no timings, so identical
/// inputs give identical bytes.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub toss: Option<TossSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ltv: Option<LtvSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<ComparisonTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}

fn mps_name(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect()
}

/// Free-format MPS text of `lp`. The objective constant is written as the
/// negated right-hand side of the cost row.
pub fn to_mps(lp: &LinearProgram, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", mps_name(name));
    out.push_str("ROWS\n N COST\n");
    let rname = |i: usize| mps_name(&lp.rows[i].name);
    for (i, r) in lp.rows.iter().enumerate() {
        let kind = match (r.lower.is_finite(), r.upper.is_finite()) {
            (true, true) if r.lower == r.upper => "E",
            (true, _) => "G",
            (false, true) => "L",
            (false, false) => "N",
        };
        let _ = writeln!(out, " {kind} {}", rname(i));
    }
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.num_vars()];
    for (i, r) in lp.rows.iter().enumerate() {
        for &(j, a) in &r.coeffs {
            by_col[j].push((i, a));
        }
    }
    out.push_str("COLUMNS\n");
    for (j, col) in by_col.iter().enumerate() {
        let cname = mps_name(&lp.names[j]);
        if lp.cost[j] != 0.0 {
            let _ = writeln!(out, " {cname} COST {}", lp.cost[j]);
        }
        for &(i, a) in col {
            let _ = writeln!(out, " {cname} {} {a}", rname(i));
        }
    }
    out.push_str("RHS\n");
    if lp.offset != 0.0 {
        let _ = writeln!(out, " RHS COST {}", -lp.offset);
    }
    let mut ranges = Vec::new();
    for (i, r) in lp.rows.iter().enumerate() {
        let rhs = match (r.lower.is_finite(), r.upper.is_finite()) {
            (true, true) => {
                if r.upper > r.lower {
                    ranges.push((i, r.upper - r.lower));
                }
                r.lower
            }
            (true, false) => r.lower,
            (false, true) => r.upper,
            (false, false) => continue,
        };
        if rhs != 0.0 {
            let _ = writeln!(out, " RHS {} {rhs}", rname(i));
        }
    }
    if !ranges.is_empty() {
        out.push_str("RANGES\n");
        for (i, w) in ranges {
            let _ = writeln!(out, " RNG {} {w}", rname(i));
        }
    }
    out.push_str("BOUNDS\n");
    for j in 0..lp.num_vars() {
        let cname = mps_name(&lp.names[j]);
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        if lo == hi {
            let _ = writeln!(out, " FX BND {cname} {lo}");
            continue;
        }
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " FR BND {cname}");
            }
            (false, true) => {
                let _ = writeln!(out, " MI BND {cname}");
                let _ = writeln!(out, " UP BND {cname} {hi}");
            }
            (true, fin_hi) => {
                if lo != 0.0 {
                    let _ = writeln!(out, " LO BND {cname} {lo}");
                }
                if fin_hi {
                    let _ = writeln!(out, " UP BND {cname} {hi}");
                } else if lo != 0.0 {
                    let _ = writeln!(out, " PL BND {cname}");
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.1), "0.1");
        assert_eq!(sig9(123.456_789_012_3), "123.456789");
        assert_eq!(sig9(-1.0 / 3.0), "-0.333333333");
        assert_eq!(sig9(1.0e-12 / 3.0), "0.000000000000333333333");
        assert_eq!(sig9(-0.0), "0");
    }

    #[test]
    fn csv_round_trip() {
        let t = TrajectoryTable {
            rows: vec![[0.0, 0.01, -0.5, 13.9, 0.02, 0.0, 1.0, 2.0, 0.3]; 3],
        };
        let back = TrajectoryTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back, t);
        assert!(TrajectoryTable::from_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn mps_sections() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 1.0, 0.0, 4.0);
        let y = lp.add_var("y", -1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row("r1", vec![(x, 1.0), (y, 1.0)], 1.0, 3.0);
        lp.add_row("r2", vec![(y, 2.0)], f64::NEG_INFINITY, 5.0);
        lp.offset = 2.0;
        let m = to_mps(&lp, "toy lp");
        for part in [
            "NAME toy_lp",
            " G r1",
            " L r2",
            " x COST 1",
            " RHS COST -2",
            " RNG r1 2",
            " UP BND x 4",
            " FR BND y",
            "ENDATA",
        ] {
            assert!(m.contains(part), "missing {part:?} in\n{m}");
        }
    }
}
