//! Property checks and the bundled example runs.

use toss_core::planner::PlanReport;

use crate::metrics::ComparisonTable;
use crate::output::{
    Check, LtvSummary, RunSummary, TossSummary, TrajectoryTable, ValidationSummary,
};
use crate::run::{
    run_baseline, run_toss, run_validation, toss_metrics, with_end_waypoint, BaselineRun,
};
use crate::scenario::{parse_scenario, Scenario};

/// Bundled scenario files, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("straight", include_str!("../scenarios/straight.toml")),
    ("example1", include_str!("../scenarios/example1.toml")),
    ("example2", include_str!("../scenarios/example2.toml")),
    ("example3", include_str!("../scenarios/example3.toml")),
    ("example4", include_str!("../scenarios/example4.toml")),
    ("example5", include_str!("../scenarios/example5.toml")),
];

/// The five example scenarios run by `examples`.
pub const EXAMPLES: &[&str] = &["example1", "example2", "example3", "example4", "example5"];

pub fn bundled(name: &str) -> Option<Scenario> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| parse_scenario(text, n).expect("bundled scenario parses"))
}

/// Tolerance of the hard-constraint echoes.
pub const CHECK_TOL: f64 = 1e-7;

/// Trajectory columns handed to the constraint checks.
pub struct Columns<'a> {
    pub e_y: &'a [f64],
    /// One per interval.
    pub speed: &'a [f64],
    pub delta: &'a [f64],
    pub time: &'a [f64],
}

/// Hard constraints of a spatial plan, re-checked from its columns.
pub fn constraint_checks(
    sc: &Scenario,
    report: &PlanReport,
    cols: &Columns<'_>,
    tol: f64,
) -> Vec<Check> {
    let p = &sc.vehicle;
    let mut out = Vec::new();

    let worst_dt = cols
        .time
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    out.push(Check::new(
        "time strictly increasing",
        worst_dt > 0.0,
        format!("min t_(j+1) - t_j = {worst_dt:.3e} s"),
    ));

    let fric = &report.friction.speed;
    let excess = cols
        .speed
        .iter()
        .zip(fric)
        .map(|(v, f)| v - f)
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(Check::new(
        "speed within friction limits",
        excess <= tol,
        format!("max v - v_fric = {excess:.3e} m/s"),
    ));

    let (lo, hi) = (sc.corridor.v_min, sc.corridor.v_max);
    let out_of_range = cols
        .speed
        .iter()
        .map(|&v| (lo - v).max(v - hi))
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(Check::new(
        "speed within limits",
        out_of_range <= tol,
        format!("worst excursion {out_of_range:.3e} m/s"),
    ));

    let steer = cols
        .delta
        .iter()
        .map(|&d| (p.steer_min - d).max(d - p.steer_max))
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(Check::new(
        "steering within limits",
        steer <= tol,
        format!("worst excursion {steer:.3e} rad"),
    ));

    let t = sc.planner.t_tilde;
    let mut rate: f64 = 0.0;
    let mut prev = sc.initial.delta;
    for &d in cols.delta {
        rate = rate
            .max((d - prev) - t * p.steer_rate_max)
            .max(t * p.steer_rate_min - (d - prev));
        prev = d;
    }
    out.push(Check::new(
        "steering rate within limits",
        rate <= tol,
        format!("worst excursion {rate:.3e} rad"),
    ));

    let slack = report.pass2.slacks[2];
    let corridor = report
        .corridor
        .iter()
        .map(|r| {
            let y = cols.e_y[r.station];
            (r.lower - slack - y).max(y - r.upper - slack)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(Check::new(
        "corridor rows satisfied",
        corridor <= tol,
        format!("worst excursion {corridor:.3e} m (corridor slack {slack:.3e} m)"),
    ));
    out
}

pub fn plan_checks(sc: &Scenario, report: &PlanReport) -> Vec<Check> {
    let tr = &report.pass2;
    let cols = Columns {
        e_y: &tr.e_y,
        speed: &tr.speed,
        delta: &tr.delta,
        time: &tr.time,
    };
    constraint_checks(sc, report, &cols, CHECK_TOL)
}

/// The same checks on a written and re-read trajectory table.
pub fn table_checks(sc: &Scenario, report: &PlanReport, table: &TrajectoryTable) -> Vec<Check> {
    let n = table.rows.len().saturating_sub(1);
    let (e_y, v, d, t) = (
        table.column(2),
        table.column(3),
        table.column(4),
        table.column(5),
    );
    let cols = Columns {
        e_y: &e_y,
        speed: &v[..n],
        delta: &d[..n],
        time: &t,
    };
    // nine significant digits
    constraint_checks(sc, report, &cols, 1e-6)
}

/// Fraction of intervals planned strictly below the friction limit, by at
/// least `rel` of the limit.
pub fn below_friction_fraction(report: &PlanReport, rel: f64) -> f64 {
    let v = &report.pass2.speed;
    let below = v
        .iter()
        .zip(&report.friction.speed)
        .filter(|(v, f)| **v < **f * (1.0 - rel))
        .count();
    below as f64 / v.len() as f64
}

/// Relative margin below the friction limit that counts as strictly below,
/// well clear of the solver tolerance.
pub const FRICTION_MARGIN: f64 = 1e-6;

/// Output of one scenario run with all its checks.
#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub scenario: Scenario,
    pub report: PlanReport,
    pub baseline: Option<BaselineRun>,
    pub summary: RunSummary,
    pub toss_table: TrajectoryTable,
    pub ltv_table: Option<TrajectoryTable>,
}

impl ScenarioRun {
    pub fn passed(&self) -> bool {
        self.summary.checks.iter().all(|c| c.passed)
    }
}

/// Plans the scenario, runs the baseline when an expectation needs it,
/// validates the plan open loop and evaluates every check.
pub fn run_scenario(sc: &Scenario) -> Result<ScenarioRun, String> {
    let name = &sc.name;
    let e = &sc.expect;
    let baseline = if e.needs_baseline() {
        Some(run_baseline(sc).map_err(|err| format!("{name}: baseline: {err}"))?)
    } else {
        None
    };
    let planned = match (&baseline, e.schedule_end_at_ltv_time) {
        (Some(b), true) => {
            let t = b
                .t_star
                .ok_or_else(|| format!("{name}: baseline never reached the end of the horizon"))?;
            with_end_waypoint(sc, t)
        }
        _ => sc.clone(),
    };
    let report = run_toss(&planned).map_err(|err| format!("{name}: planner: {err}"))?;
    let tr = &report.pass2;

    let mut checks = plan_checks(&planned, &report);
    let toss_table =
        TrajectoryTable::from_plan(&planned, &report).map_err(|err| format!("{name}: {err}"))?;
    let reloaded =
        TrajectoryTable::from_csv(&toss_table.to_csv()).map_err(|err| format!("{name}: {err}"))?;
    let all_reloaded = table_checks(&planned, &report, &reloaded)
        .iter()
        .all(|c| c.passed);
    checks.push(Check::new(
        "written trajectory passes the checks",
        all_reloaded,
        "re-read from CSV",
    ));

    if let Some((t, tol)) = e.traversal_time {
        let got = tr.traversal_time();
        checks.push(Check::new(
            "traversal time",
            (got - t).abs() <= tol,
            format!("{got:.6} s, expected {t} +- {tol} s"),
        ));
    }
    if let Some(tol) = e.waypoint_tolerance {
        let sigma = tr.slacks[3];
        let mut worst: f64 = 0.0;
        for w in &planned.waypoints {
            let j = report
                .grid
                .index_of(w.s)
                .ok_or_else(|| format!("{name}: waypoint {} not on the grid", w.s))?;
            worst = worst.max((tr.time[j] - w.time).abs());
        }
        checks.push(Check::new(
            "waypoints met",
            sigma <= 1e-3 && worst <= tol,
            format!("waypoint slack {sigma:.3e} s, worst arrival error {worst:.3e} s"),
        ));
    }
    if let Some(frac) = e.below_friction_fraction {
        let got = below_friction_fraction(&report, FRICTION_MARGIN);
        checks.push(Check::new(
            "plan stays below friction limits",
            got >= frac,
            format!(
                "{:.1}% of intervals strictly below the limit by a relative {:e}, need {:.0}%",
                100.0 * got,
                FRICTION_MARGIN,
                100.0 * frac
            ),
        ));
    }

    let mut table = None;
    if let Some(b) = &baseline {
        let t = ComparisonTable {
            rows: vec![toss_metrics(&report), b.metrics()],
        };
        let (toss, ltv) = (&t.rows[0], &t.rows[1]);
        if let Some(departs) = e.ltv_departs {
            let detail = match b.lane.departure {
                Some(k) => format!("departs at step {k}, max |e_y| {:.2} m", b.lane.max_abs_e_y),
                None => format!("stays in lane, max |e_y| {:.2} m", b.lane.max_abs_e_y),
            };
            checks.push(Check::new(
                if departs {
                    "baseline departs the lane"
                } else {
                    "baseline stays in lane"
                },
                b.departs() == departs,
                detail,
            ));
        }
        if e.toss_faster_than_ltv {
            let ok = matches!((toss.t_star, ltv.t_star), (Some(a), Some(b)) if a < b);
            checks.push(Check::new(
                "TOSS faster than LTV",
                ok,
                format!("t* {:?} vs {:?} s", toss.t_star, ltv.t_star),
            ));
        }
        if e.smoother_than_ltv {
            checks.push(Check::new(
                "TOSS steering rate below LTV",
                toss.ddelta_max < ltv.ddelta_max,
                format!(
                    "max |d delta| {:.4} vs {:.4} rad",
                    toss.ddelta_max, ltv.ddelta_max
                ),
            ));
            checks.push(Check::new(
                "TOSS steering below LTV",
                toss.delta_max < ltv.delta_max,
                format!(
                    "max |delta| {:.4} vs {:.4} rad",
                    toss.delta_max, ltv.delta_max
                ),
            ));
        }
        table = Some(t);
    }

    let validation = run_validation(&planned, &report);
    let summary = RunSummary {
        scenario: name.clone(),
        toss: Some(TossSummary::new(&report)),
        ltv: baseline.as_ref().map(LtvSummary::new),
        table,
        validation: Some(ValidationSummary::from(&validation)),
        checks,
    };
    let ltv_table = baseline
        .as_ref()
        .map(|b| TrajectoryTable::from_baseline(&planned, b));
    Ok(ScenarioRun {
        scenario: planned,
        report,
        baseline,
        summary,
        toss_table,
        ltv_table,
    })
}

/// Runs scenarios concurrently; results keep the input order.
pub fn run_all(scenarios: &[Scenario]) -> Vec<Result<ScenarioRun, String>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|sc| s.spawn(move || run_scenario(sc)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err("scenario run panicked".to_string()))
            })
            .collect()
    })
}
