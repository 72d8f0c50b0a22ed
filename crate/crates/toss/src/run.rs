//! Single runs of the planner and the baseline on a scenario.

use toss_core::baseline::{
    crossing_time, generate_reference, lane_check, linearize_global, max_reference_steps,
    rollout_nonlinear, solve_ltv, FrictionAdaptation, GlobalControl, GlobalState, LaneReport,
    LtvPlan, LtvProblem, TimedReference,
};
use toss_core::constraints::WaypointSpec;
use toss_core::planner::{plan, plan_open_loop_validation, PlanReport, Validation};
use toss_core::qp::QpOptions;

use crate::metrics::{ComparisonTable, MethodMetrics};
use crate::scenario::Scenario;

/// Steps the automatic baseline horizon adds past the end of the planning
/// horizon, so a lagging vehicle still crosses it.
pub const BASELINE_RUNOUT_STEPS: usize = 40;

pub fn run_toss(sc: &Scenario) -> toss_core::Result<PlanReport> {
    plan(&sc.plan_request())
}

pub fn toss_metrics(report: &PlanReport) -> MethodMetrics {
    let tr = &report.pass2;
    MethodMetrics::from_series("TOSS", Some(tr.traversal_time()), &tr.speed, &tr.delta)
}

#[derive(Clone, Debug)]
pub struct BaselineRun {
    pub v_ref: f64,
    pub friction_adapted: bool,
    pub refs: TimedReference,
    pub plan: LtvPlan,
    /// Nonlinear rollout of the planned controls.
    pub rollout: Vec<GlobalState>,
    pub lane: LaneReport,
    /// Time from planning to crossing the end of the planning horizon.
    pub t_star: Option<f64>,
}

impl BaselineRun {
    pub fn departs(&self) -> bool {
        self.lane.departure.is_some()
    }

    /// Steps up to crossing the end of the horizon (all when never crossed).
    pub fn steps_used(&self) -> usize {
        let k = self.plan.controls.len();
        self.t_star
            .map_or(k, |t| ((t / self.refs.ts).ceil() as usize).clamp(1, k))
    }

    pub fn metrics(&self) -> MethodMetrics {
        let n = self.steps_used();
        let u = &self.plan.controls[..n];
        let v: Vec<f64> = u.iter().map(|u| u.speed).collect();
        let d: Vec<f64> = u.iter().map(|u| u.delta).collect();
        MethodMetrics::from_series("LTV", self.t_star, &v, &d)
    }
}

/// Runs the baseline with the scenario's settings.
pub fn run_baseline(sc: &Scenario) -> toss_core::Result<BaselineRun> {
    run_baseline_with(sc, sc.baseline.v_ref, sc.baseline.friction_adapted)
}

pub fn run_baseline_with(
    sc: &Scenario,
    v_ref: f64,
    friction_adapted: bool,
) -> toss_core::Result<BaselineRun> {
    let c = sc.centerline();
    let p = &sc.vehicle;
    let b = &sc.baseline;
    let init = &sc.initial;
    let adapt = friction_adapted.then_some(FrictionAdaptation {
        vehicle: p,
        v_max: sc.corridor.v_max,
        start_speed: init.speed,
    });
    let steps = match b.steps {
        Some(k) => k,
        None => {
            let max = max_reference_steps(c, init.s, v_ref, b.ts, adapt);
            let to_end = reference_steps_to(sc, v_ref, adapt, sc.s_end()).unwrap_or(max);
            (to_end + BASELINE_RUNOUT_STEPS).min(max)
        }
    };
    let refs = generate_reference(c, init.s, v_ref, b.ts, steps, adapt)?;
    let stages = linearize_global(&refs, p)?;
    let (pos, psi) = c.frenet_to_global(init.s, init.e_y, init.e_psi)?;
    let xi0 = GlobalState {
        x: pos.x,
        y: pos.y,
        psi,
    };
    let pb = LtvProblem {
        refs: &refs,
        stages: &stages,
        xi0,
        u_prev: GlobalControl {
            speed: init.speed,
            delta: init.delta,
        },
        vehicle: p,
        v_min: sc.corridor.v_min,
        v_max: sc.corridor.v_max,
        use_caps: friction_adapted,
    };
    let plan = solve_ltv(&pb, &QpOptions::default())?;
    let rollout = rollout_nonlinear(&plan.controls, xi0, p, b.ts);
    let lane = lane_check(&rollout, c, b.lane_half_width, p);
    // a departed vehicle has not traversed the road
    let t_star = if lane.departure.is_some() {
        None
    } else {
        crossing_time(&lane.stations, b.ts, 0.0, sc.s_end())
    };
    Ok(BaselineRun {
        v_ref,
        friction_adapted,
        refs,
        plan,
        rollout,
        lane,
        t_star,
    })
}

fn reference_steps_to(
    sc: &Scenario,
    v_ref: f64,
    adapt: Option<FrictionAdaptation<'_>>,
    s_end: f64,
) -> Option<usize> {
    let c = sc.centerline();
    let max = max_reference_steps(c, sc.initial.s, v_ref, sc.baseline.ts, adapt);
    let refs = generate_reference(c, sc.initial.s, v_ref, sc.baseline.ts, max, adapt).ok()?;
    refs.stations.iter().position(|&s| s >= s_end)
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub toss: PlanReport,
    pub ltv: BaselineRun,
    pub table: ComparisonTable,
}

pub fn run_compare(sc: &Scenario) -> toss_core::Result<Comparison> {
    let (toss, ltv) = std::thread::scope(|s| {
        let t = s.spawn(|| run_toss(sc));
        let l = run_baseline(sc);
        (t.join().expect("planner thread panicked"), l)
    });
    let (toss, ltv) = (toss?, ltv?);
    let table = ComparisonTable {
        rows: vec![toss_metrics(&toss), ltv.metrics()],
    };
    Ok(Comparison { toss, ltv, table })
}

/// Adds a waypoint at the end of the horizon scheduled at `time`.
pub fn with_end_waypoint(sc: &Scenario, time: f64) -> Scenario {
    let mut out = sc.clone();
    out.waypoints.push(WaypointSpec {
        s: sc.s_end(),
        time: sc.initial.time + time,
        state_box: None,
    });
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderStep {
    pub v_ref: f64,
    pub departs: bool,
    pub max_abs_e_y: f64,
}

/// Baseline lane keeping over a sweep of reference speeds, friction
/// adaptation off.
pub fn speed_ladder(sc: &Scenario, speeds: &[f64]) -> toss_core::Result<Vec<LadderStep>> {
    let runs: Vec<toss_core::Result<BaselineRun>> = std::thread::scope(|s| {
        let handles: Vec<_> = speeds
            .iter()
            .map(|&v| s.spawn(move || run_baseline_with(sc, v, false)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("baseline thread panicked"))
            .collect()
    });
    runs.into_iter()
        .zip(speeds)
        .map(|(r, &v)| {
            r.map(|r| LadderStep {
                v_ref: v,
                departs: r.departs(),
                max_abs_e_y: r.lane.max_abs_e_y,
            })
        })
        .collect()
}

/// Lowest swept speed whose rollout leaves the lane.
pub fn departure_threshold(ladder: &[LadderStep]) -> Option<f64> {
    ladder
        .iter()
        .filter(|s| s.departs)
        .map(|s| s.v_ref)
        .fold(None, |m, v| Some(m.map_or(v, |m: f64| m.min(v))))
}

pub fn run_validation(sc: &Scenario, report: &PlanReport) -> Validation {
    plan_open_loop_validation(report, &sc.corridor, &sc.vehicle)
}
