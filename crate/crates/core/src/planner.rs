//! Two-pass time-optimal smooth-steering planner.
//!
//! Pass one linearizes about the centerline at the current speed. The
//! friction speed caps are computed from its steering profile, then pass
//! two relinearizes about the pass-one trajectory with `q_j` bounded below
//! by the caps.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::constraints::{
    corridor_rows, friction_profile, rate_rows, vehicle_margin, waypoint_rows, waypoint_stations,
    CorridorRow, FrictionProfile, Margin, MarginInput, MarginVariant, PreviousControl,
    WaypointSpec,
};
use crate::error::{invalid, Error, Result};
use crate::geometry::{
    build_grid, map_obstacles, ObstacleBox, RoadCorridor, SpatialGrid, StationBounds,
};
use crate::integrate::{integrate, Tolerances};
use crate::lp::{
    assemble, extract_trajectory, solve, LinearProgram, LpOptions, SimplexOptions,
    SpatialTrajectory, TossProblem,
};
use crate::math::{abs, cos, tan};
use crate::model::{
    linearize_discretize, road_samples, ControlSample, Reference, RoadSample, SpatialState,
    VehicleParams, POLE_GUARD,
};

/// Heading references are clipped to this magnitude before relinearizing.
pub const REFERENCE_HEADING_CLIP: f64 = 1.2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannerConfig {
    /// Horizon `S` (m).
    pub horizon: f64,
    /// Upper bound on the grid spacing (m).
    pub base_step: f64,
    /// Rate transformation parameter `T~` (s).
    pub t_tilde: f64,
    /// Reaction time `Gamma` for the margin heuristic (s).
    pub reaction_time: f64,
    pub margin: MarginVariant,
    pub lp: LpOptions,
    pub simplex: SimplexOptions,
    /// Target `(e_psi, e_y)` at the end of the horizon.
    pub terminal: SpatialState,
    /// Speed used to map moving obstacles; defaults to the initial speed.
    pub nominal_speed: Option<f64>,
    /// Run a third LP relinearized about pass two, with friction caps
    /// recomputed from it.
    pub third_pass: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            horizon: 100.0,
            base_step: 2.0,
            t_tilde: 0.1,
            reaction_time: 0.05,
            margin: MarginVariant::ReactionTime,
            lp: LpOptions::default(),
            simplex: SimplexOptions::default(),
            terminal: SpatialState::new(0.0, 0.0),
            nominal_speed: None,
            third_pass: false,
        }
    }
}

/// Vehicle state at planning time `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialState {
    pub s: f64,
    pub e_psi: f64,
    pub e_y: f64,
    pub speed: f64,
    /// Steering angle applied before planning.
    pub delta: f64,
    pub time: f64,
}

impl InitialState {
    pub fn on_centerline(speed: f64) -> Self {
        Self {
            s: 0.0,
            e_psi: 0.0,
            e_y: 0.0,
            speed,
            delta: 0.0,
            time: 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlanRequest {
    pub corridor: RoadCorridor,
    pub vehicle: VehicleParams,
    pub obstacles: Vec<ObstacleBox>,
    pub waypoints: Vec<WaypointSpec>,
    pub initial: InitialState,
    pub config: PlannerConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PlanFlags {
    /// Some slack exceeds `1e-6`.
    pub slack_used: bool,
    /// The margin fell back to its conservative value or a corridor row
    /// crossed.
    pub corridor_too_narrow: bool,
    /// Pass-one references were clipped to satisfy the pole guards.
    pub references_clipped: bool,
}

#[derive(Clone, Debug)]
pub struct PlanReport {
    pub grid: SpatialGrid,
    pub road: Vec<RoadSample>,
    pub bounds: StationBounds,
    pub corridor: Vec<CorridorRow>,
    pub margin: Margin,
    pub pass1: SpatialTrajectory,
    /// Final trajectory (pass two, or pass three when enabled).
    pub pass2: SpatialTrajectory,
    pub friction: FrictionProfile,
    /// The last LP solved (pass two, or three when enabled).
    pub lp: LinearProgram,
    pub lp_solves: usize,
    pub flags: PlanFlags,
}

impl PlanReport {
    pub fn traversal_time(&self) -> f64 {
        self.pass2.traversal_time()
    }
}

/// Centerline references: zero states and steering, `q = 1/v_tau`.
pub fn init_references(grid: &SpatialGrid, speed: f64) -> Result<Reference> {
    if !(speed > 0.0) {
        return Err(invalid("initial speed must be positive"));
    }
    let n = grid.intervals();
    Ok(Reference {
        states: vec![SpatialState::new(0.0, 0.0); n + 1],
        controls: vec![ControlSample::from_speed(speed, 0.0); n],
    })
}

/// Caps reference speeds at the friction limits and makes them satisfy the
/// per-interval rate limits exactly, starting from the previous speed. Rate
/// rows linearized about such a reference admit the reference itself.
fn limit_reference_speeds(refs: &mut Reference, caps: &[f64], req: &PlanRequest) {
    let p = &req.vehicle;
    let t = req.config.t_tilde;
    let mut v: Vec<f64> = refs
        .controls
        .iter()
        .zip(caps)
        .map(|(u, &c)| u.speed().min(c))
        .collect();
    let mut prev = req.initial.speed;
    for x in v.iter_mut() {
        *x = x.min(prev + t * p.accel_max);
        prev = *x;
    }
    for j in (0..v.len().saturating_sub(1)).rev() {
        v[j] = v[j].min(v[j + 1] - t * p.accel_min);
    }
    for (u, x) in refs.controls.iter_mut().zip(v) {
        u.q = 1.0 / x.max(req.corridor.v_min);
    }
}

/// The first interval's speed must be reachable from the initial speed
/// under the friction cap, or pass two has no feasible point.
fn check_start_below_friction(req: &PlanRequest, friction: &FrictionProfile) -> Result<()> {
    let reachable = req.initial.speed + req.config.t_tilde * req.vehicle.accel_min;
    let cap = friction.speed[0];
    if reachable > cap + 1e-9 {
        return Err(invalid(alloc::format!(
            "initial speed {:.3} m/s cannot be brought below the friction limit {cap:.3} m/s of the first interval",
            req.initial.speed
        )));
    }
    Ok(())
}

/// Clips references into the pole guards. Returns whether anything moved.
fn clip_references(refs: &mut Reference, road: &[RoadSample]) -> bool {
    let mut clipped = false;
    for (z, r) in refs.states.iter_mut().zip(road) {
        let psi = z
            .e_psi
            .clamp(-REFERENCE_HEADING_CLIP, REFERENCE_HEADING_CLIP);
        let mut ey = z.e_y;
        let scale_min = 2.0 * POLE_GUARD;
        if 1.0 - r.kappa * ey < scale_min {
            ey = (1.0 - scale_min) / r.kappa;
        }
        if psi != z.e_psi || ey != z.e_y {
            clipped = true;
            *z = SpatialState::new(psi, ey);
        }
    }
    clipped
}

struct Setup<'a> {
    req: &'a PlanRequest,
    grid: SpatialGrid,
    road: Vec<RoadSample>,
    corridor: Vec<CorridorRow>,
    waypoints: Vec<crate::constraints::WaypointRow>,
}

impl Setup<'_> {
    fn pass(
        &self,
        refs: &Reference,
        q_lower: Option<&[f64]>,
        pass: u8,
        options: LpOptions,
    ) -> Result<(SpatialTrajectory, LinearProgram)> {
        let req = self.req;
        let p = &req.vehicle;
        let stages = linearize_discretize(&self.grid, refs, &self.road, p)?;
        let q_ref: Vec<f64> = refs.controls.iter().map(|u| u.q).collect();
        let prev = PreviousControl {
            speed: req.initial.speed,
            delta: req.initial.delta,
        };
        let rates = rate_rows(&q_ref, p, req.config.t_tilde, prev)?;
        let z0 = SpatialState::new(req.initial.e_psi, req.initial.e_y);
        let pb = TossProblem {
            grid: &self.grid,
            stages: &stages,
            road: &self.road,
            z0,
            tau: req.initial.time,
            rates: &rates,
            corridor: &self.corridor,
            waypoints: &self.waypoints,
            terminal: req.config.terminal,
            v_min: req.corridor.v_min,
            v_max: req.corridor.v_max,
            steer_min: p.steer_min,
            steer_max: p.steer_max,
            q_lower,
            start: Some(&refs.controls),
            options,
        };
        let (lp, layout) = assemble(&pb)?;
        let sol = solve(&lp, &req.config.simplex);
        let tr = extract_trajectory(&pb, &layout, &sol, pass).map_err(|e| match e {
            Error::Lp {
                pass,
                status,
                row_hint: Some(i),
                ..
            } => Error::Lp {
                pass,
                status,
                row_hint: Some(i),
                row: lp.rows.get(i).map(|r| r.name.clone()),
            },
            other => other,
        })?;
        Ok((tr, lp))
    }
}

fn prepare(req: &PlanRequest) -> Result<(Setup<'_>, StationBounds, Margin)> {
    let p = &req.vehicle;
    p.validate()?;
    let cfg = &req.config;
    let init = &req.initial;
    if !(init.speed > 0.0) {
        return Err(invalid("initial speed must be positive"));
    }
    let c = &req.corridor.centerline;
    let nominal = cfg.nominal_speed.unwrap_or(init.speed);
    let mut extents = Vec::with_capacity(req.obstacles.len());
    for ob in &req.obstacles {
        ob.validate()?;
        extents.push(ob.effective_extent(c, init.s, nominal)?);
    }
    let flat: Vec<_> = extents.iter().flatten().copied().collect();
    let grid = build_grid(
        &req.corridor,
        init.s,
        cfg.horizon,
        cfg.base_step,
        &flat,
        &waypoint_stations(&req.waypoints),
    )?;
    let bounds = map_obstacles(&req.corridor, &grid, &req.obstacles, &extents)?;
    // both raw road boundaries, before obstacle tightening
    let boundary = grid
        .stations()
        .iter()
        .map(|&s| {
            let (lo, hi) = req.corridor.bounds_at(s);
            hi.min(abs(lo))
        })
        .fold(f64::INFINITY, f64::min);
    let speed = init.speed.min(req.corridor.v_max);
    let margin = vehicle_margin(
        p,
        MarginInput {
            speed,
            speed_limit: req.corridor.v_max,
            lateral_offset: abs(init.e_y),
            boundary,
            reaction_time: cfg.reaction_time,
        },
        cfg.margin,
    )?;
    let corridor = corridor_rows(&bounds, margin.delta_e_y)?;
    let waypoints = waypoint_rows(&grid, &req.waypoints, init.time)?;
    let road = road_samples(c, &grid);
    Ok((
        Setup {
            req,
            grid,
            road,
            corridor,
            waypoints,
        },
        bounds,
        margin,
    ))
}

/// Runs the planner.
pub fn plan(req: &PlanRequest) -> Result<PlanReport> {
    plan_with(req, req.config.lp)
}

/// Runs the planner with different cost knobs (for instance a minimum-time
/// plan without the minmax steering terms).
pub fn plan_with(req: &PlanRequest, options: LpOptions) -> Result<PlanReport> {
    let (setup, bounds, margin) = prepare(req)?;
    let p = &req.vehicle;
    let v_max = req.corridor.v_max;

    let refs1 = init_references(&setup.grid, req.initial.speed)?;
    let (pass1, _) = setup.pass(&refs1, None, 1, options)?;
    let mut solves = 1;

    let mut friction = friction_profile(&pass1.delta, &setup.grid, p, v_max)?;
    check_start_below_friction(req, &friction)?;
    let mut refs2 = pass1.as_reference();
    let mut clipped = clip_references(&mut refs2, &setup.road);
    limit_reference_speeds(&mut refs2, &friction.speed, req);
    let (mut pass2, mut lp) = setup.pass(&refs2, Some(&friction.q_lower()), 2, options)?;
    solves += 1;

    if req.config.third_pass {
        friction = friction_profile(&pass2.delta, &setup.grid, p, v_max)?;
        check_start_below_friction(req, &friction)?;
        let mut refs3 = pass2.as_reference();
        clipped |= clip_references(&mut refs3, &setup.road);
        limit_reference_speeds(&mut refs3, &friction.speed, req);
        (pass2, lp) = setup.pass(&refs3, Some(&friction.q_lower()), 3, options)?;
        solves += 1;
    }

    let flags = PlanFlags {
        slack_used: pass2.max_slack() > 1e-6,
        corridor_too_narrow: margin.corridor_too_narrow || setup.corridor.iter().any(|r| r.crossed),
        references_clipped: clipped,
    };
    Ok(PlanReport {
        grid: setup.grid,
        road: setup.road,
        bounds,
        corridor: setup.corridor,
        margin,
        pass1,
        pass2,
        friction,
        lp,
        lp_solves: solves,
        flags,
    })
}

/// Nonlinear rollout of a planned trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Validation {
    /// `e_psi`, `e_y`, `t` of the rollout at each station reached.
    pub e_psi: Vec<f64>,
    pub e_y: Vec<f64>,
    pub time: Vec<f64>,
    pub max_e_y_deviation: f64,
    pub max_time_deviation: f64,
    /// Largest excursion of the rollout beyond the corridor rows (m).
    pub corridor_violation: f64,
    /// Largest one-interval defect: the rollout restarted from each
    /// planned state and compared with the next planned state.
    pub max_step_defect: f64,
    /// Set when the integration hit a pole and stopped early.
    pub failure: Option<String>,
}

fn spatial_rhs<'a>(
    c: &'a crate::geometry::Centerline,
    p: &'a VehicleParams,
    u: ControlSample,
) -> impl Fn(f64, &[f64; 3]) -> Result<[f64; 3]> + 'a {
    move |s, x| {
        let kappa = c.curvature_at(s);
        let scale = 1.0 - kappa * x[1];
        let cp = cos(x[0]);
        if !(cp > 0.0) || !(scale > 0.0) {
            return Err(crate::error::Error::Pole {
                station: 0,
                detail: "rollout crossed a pole",
            });
        }
        Ok([
            scale * tan(u.delta) / (p.wheelbase * cp) - kappa,
            scale * tan(x[0]),
            scale * cp.recip() / u.speed(),
        ])
    }
}

/// Integrates the nonlinear spatial model with the planned controls held
/// constant over each interval.
pub fn plan_open_loop_validation(
    report: &PlanReport,
    corridor: &RoadCorridor,
    p: &VehicleParams,
) -> Validation {
    validate_trajectory(&report.pass2, &report.corridor, corridor, p)
}

/// Same as [`plan_open_loop_validation`] for any trajectory.
pub fn validate_trajectory(
    tr: &SpatialTrajectory,
    rows: &[CorridorRow],
    corridor: &RoadCorridor,
    p: &VehicleParams,
) -> Validation {
    let c = &corridor.centerline;
    let tol = Tolerances::default();
    let st = &tr.stations;
    let mut x = [tr.e_psi[0], tr.e_y[0], tr.time[0]];
    let mut out = Validation {
        e_psi: vec![x[0]],
        e_y: vec![x[1]],
        time: vec![x[2]],
        max_e_y_deviation: 0.0,
        max_time_deviation: 0.0,
        corridor_violation: 0.0,
        max_step_defect: 0.0,
        failure: None,
    };
    for (j, u) in tr.controls().into_iter().enumerate() {
        let f = spatial_rhs(c, p, u);
        match integrate(&f, x, st[j], st[j + 1], tol) {
            Ok(next) => x = next,
            Err(e) => {
                out.failure = Some(alloc::format!("interval {j}: {e}"));
                return out;
            }
        }
        let start = [tr.e_psi[j], tr.e_y[j], tr.time[j]];
        if let Ok(one) = integrate(&f, start, st[j], st[j + 1], tol) {
            out.max_step_defect = out.max_step_defect.max(abs(one[1] - tr.e_y[j + 1]));
        }
        out.e_psi.push(x[0]);
        out.e_y.push(x[1]);
        out.time.push(x[2]);
        out.max_e_y_deviation = out.max_e_y_deviation.max(abs(x[1] - tr.e_y[j + 1]));
        out.max_time_deviation = out.max_time_deviation.max(abs(x[2] - tr.time[j + 1]));
    }
    for r in rows {
        if let Some(&ey) = out.e_y.get(r.station) {
            out.corridor_violation = out.corridor_violation.max(r.lower - ey).max(ey - r.upper);
        }
    }
    out
}
