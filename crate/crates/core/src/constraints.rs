//! Constraint rows for the planning LP: control rates, corridor with the
//! vehicle-dimension margin, waypoint times and friction speed caps.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::geometry::{SpatialGrid, StationBounds, STATION_MERGE_TOL};
use crate::math::{abs, asin, atan2, cos, hypot, sin, sqrt, tan};
use crate::model::VehicleParams;

/// Previously applied control `u_{-1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreviousControl {
    pub speed: f64,
    pub delta: f64,
}

/// Linearized velocity-rate row and exact steering-rate row between
/// stations `j` and `j + 1`.
///
/// Velocity: `c_min <= b_next q_{j+1} + b_cur q_j <= c_max`.
/// Steering: `steer_min <= delta_{j+1} - delta_j <= steer_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRow {
    pub station: usize,
    pub b_next: f64,
    pub b_cur: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub steer_min: f64,
    pub steer_max: f64,
    /// Rate transformation parameter `T~` (s).
    pub t_tilde: f64,
}

/// Rows tying `u_0` to the previously applied control.
///
/// Velocity: `c_min <= b_cur q_0 <= c_max`; steering:
/// `steer_min <= delta_0 <= steer_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialRateRow {
    pub b_cur: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub steer_min: f64,
    pub steer_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRows {
    pub initial: InitialRateRow,
    pub rows: Vec<RateRow>,
}

/// Channel-separated rate rows. `1/q_{j+1} - 1/q_j` is linearized about
/// `q_ref`, exact at the reference.
pub fn rate_rows(
    q_ref: &[f64],
    p: &VehicleParams,
    t_tilde: f64,
    prev: PreviousControl,
) -> Result<RateRows> {
    if q_ref.is_empty() {
        return Err(invalid("rate rows need at least one control"));
    }
    if q_ref.iter().any(|&q| !(q > 0.0)) {
        return Err(invalid("reference q must be positive"));
    }
    if !(t_tilde > 0.0) {
        return Err(invalid("rate transformation parameter must be positive"));
    }
    let (dv_min, dv_max) = (t_tilde * p.accel_min, t_tilde * p.accel_max);
    let (dd_min, dd_max) = (t_tilde * p.steer_rate_min, t_tilde * p.steer_rate_max);

    // 1/q ~ 2/r - q/r^2 about r
    let r0 = q_ref[0];
    let shift0 = 2.0 / r0 - prev.speed;
    let initial = InitialRateRow {
        b_cur: -1.0 / (r0 * r0),
        c_min: dv_min - shift0,
        c_max: dv_max - shift0,
        steer_min: prev.delta + dd_min,
        steer_max: prev.delta + dd_max,
    };
    let rows = q_ref
        .windows(2)
        .enumerate()
        .map(|(j, w)| {
            let (rc, rn) = (w[0], w[1]);
            let shift = 2.0 / rn - 2.0 / rc;
            RateRow {
                station: j,
                b_next: -1.0 / (rn * rn),
                b_cur: 1.0 / (rc * rc),
                c_min: dv_min - shift,
                c_max: dv_max - shift,
                steer_min: dd_min,
                steer_max: dd_max,
                t_tilde,
            }
        })
        .collect();
    Ok(RateRows { initial, rows })
}

/// How the heading angle behind the vehicle-dimension margin is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MarginVariant {
    /// No margin (point-mass planning).
    None,
    /// `e_psi_v = atan(l_f / w)`.
    MaxAngle,
    /// Heading at which the front corner reaches the boundary within the
    /// reaction time.
    #[default]
    ReactionTime,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginInput {
    /// Speed at planning time `v_tau` (m/s).
    pub speed: f64,
    /// Road speed limit `v_max` (m/s).
    pub speed_limit: f64,
    /// `|e_y|` at planning time.
    pub lateral_offset: f64,
    /// Distance to the nearest road boundary, `min_j min(e_y_max, |e_y_min|)`.
    pub boundary: f64,
    /// Reaction time `Gamma` (s).
    pub reaction_time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Margin {
    /// Lateral corridor shrink `Delta e_y` (m).
    pub delta_e_y: f64,
    /// Heading used for the margin, `(v / v_max) e_psi_v`.
    pub heading: f64,
    /// Heading chosen in step 1, in `[0, atan(l_f / w)]`.
    pub heading_bound: f64,
    /// The boundary is within a half-width of the vehicle position; the
    /// conservative margin was used.
    pub corridor_too_narrow: bool,
}

/// Lateral extent of the front corner beyond the reference point at
/// heading error `e_psi`: `l_f sin(e_psi) + w cos(e_psi)`.
pub fn corner_extent(p: &VehicleParams, e_psi: f64) -> f64 {
    p.front_overhang * sin(e_psi) + p.half_width * cos(e_psi)
}

/// Speed-dependent vehicle-dimension margin.
pub fn vehicle_margin(
    p: &VehicleParams,
    input: MarginInput,
    variant: MarginVariant,
) -> Result<Margin> {
    let MarginInput {
        speed,
        speed_limit,
        lateral_offset,
        boundary,
        reaction_time,
    } = input;
    if !(speed >= 0.0 && speed <= speed_limit + 1e-9) {
        return Err(invalid("margin speed must lie in [0, v_max]"));
    }
    if !(reaction_time > 0.0) {
        return Err(invalid("reaction time must be positive"));
    }
    if variant == MarginVariant::None {
        return Ok(Margin {
            delta_e_y: 0.0,
            heading: 0.0,
            heading_bound: 0.0,
            corridor_too_narrow: false,
        });
    }
    let max_angle = p.max_heading_error();
    let conservative = Margin {
        delta_e_y: corner_extent(p, max_angle),
        heading: max_angle,
        heading_bound: max_angle,
        corridor_too_narrow: true,
    };
    let heading_bound = match variant {
        MarginVariant::MaxAngle => max_angle,
        MarginVariant::ReactionTime => {
            let a = reaction_time * speed + p.front_overhang;
            let b = p.half_width;
            let c = boundary - lateral_offset;
            if c <= b {
                return Ok(conservative);
            }
            reaction_heading(a, b, c).clamp(0.0, max_angle)
        }
        MarginVariant::None => unreachable!(),
    };
    let heading = (speed / speed_limit).min(1.0) * heading_bound;
    Ok(Margin {
        delta_e_y: corner_extent(p, heading),
        heading,
        heading_bound,
        corridor_too_narrow: false,
    })
}

/// Smallest nonnegative root of `a sin(x) + b cos(x) = c`; `+inf` when
/// `c` exceeds the amplitude.
pub fn reaction_heading(a: f64, b: f64, c: f64) -> f64 {
    let r = hypot(a, b);
    if c >= r {
        return f64::INFINITY;
    }
    asin(c / r) - atan2(b, a)
}

/// Row `lower_j + Delta - sigma_3 <= e_y_j <= upper_j - Delta + sigma_3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorridorRow {
    pub station: usize,
    pub lower: f64,
    pub upper: f64,
    pub margin: f64,
    /// Margin exceeds half the free width; only the slack can satisfy the
    /// row.
    pub crossed: bool,
}

/// One corridor row per station `j = 1..N`.
pub fn corridor_rows(bounds: &StationBounds, margin: f64) -> Result<Vec<CorridorRow>> {
    if !(margin >= 0.0) {
        return Err(invalid("corridor margin must be nonnegative"));
    }
    Ok((1..bounds.lower.len())
        .map(|j| {
            let lower = bounds.lower[j] + margin;
            let upper = bounds.upper[j] - margin;
            CorridorRow {
                station: j,
                lower,
                upper,
                margin,
                crossed: lower > upper,
            }
        })
        .collect())
}

/// Station-wise speed caps from tire friction.
#[derive(Clone, Debug, PartialEq)]
pub struct FrictionProfile {
    /// `v_j^{max,fric}` per control interval (m/s).
    pub speed: Vec<f64>,
    /// Lateral-acceleration limit before the longitudinal passes.
    pub lateral_limit: Vec<f64>,
}

impl FrictionProfile {
    /// Lower bounds on `q_j`.
    pub fn q_lower(&self) -> Vec<f64> {
        self.speed.iter().map(|v| 1.0 / v).collect()
    }
}

/// Friction caps for a sequence of path curvatures over intervals of
/// length `steps[j]`: the lateral limit `sqrt(mu g / |kappa|)`, then a
/// backward (braking) and a forward (acceleration) pass, capped at
/// `v_max`.
pub fn friction_limits(
    curvature: &[f64],
    steps: &[f64],
    p: &VehicleParams,
    v_max: f64,
) -> FrictionProfile {
    let n = curvature.len();
    let lat = p.lateral_accel_limit();
    let lateral_limit: Vec<f64> = curvature
        .iter()
        .map(|&k| sqrt(lat / abs(k).max(1e-6)).min(v_max))
        .collect();
    let mut v = lateral_limit.clone();
    for j in (0..n.saturating_sub(1)).rev() {
        let cap = sqrt(v[j + 1] * v[j + 1] + 2.0 * abs(p.accel_min) * steps[j]);
        v[j] = v[j].min(cap);
    }
    for j in 0..n.saturating_sub(1) {
        let cap = sqrt(v[j] * v[j] + 2.0 * p.accel_max * steps[j]);
        v[j + 1] = v[j + 1].min(cap);
    }
    FrictionProfile {
        speed: v,
        lateral_limit,
    }
}

/// Friction caps along a planned trajectory, using the path curvature
/// `tan(delta_j) / l` of the kinematic model.
pub fn friction_profile(
    delta: &[f64],
    grid: &SpatialGrid,
    p: &VehicleParams,
    v_max: f64,
) -> Result<FrictionProfile> {
    if delta.len() != grid.intervals() {
        return Err(invalid("one steering angle per grid interval required"));
    }
    let curvature: Vec<f64> = delta.iter().map(|&d| tan(d) / p.wheelbase).collect();
    Ok(friction_limits(&curvature, &grid.steps(), p, v_max))
}

/// Axis-aligned box on `(e_psi, e_y)` at a waypoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateBox {
    pub e_psi: (f64, f64),
    pub e_y: (f64, f64),
}

impl StateBox {
    fn is_full_plane(&self) -> bool {
        self.e_psi.0 == f64::NEG_INFINITY
            && self.e_psi.1 == f64::INFINITY
            && self.e_y.0 == f64::NEG_INFINITY
            && self.e_y.1 == f64::INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaypointSpec {
    /// Station `s_WP` (m).
    pub s: f64,
    /// Scheduled passing time `t_WP` (s).
    pub time: f64,
    pub state_box: Option<StateBox>,
}

/// Waypoint time row `t_WP - sigma_4 <= t_j <= t_WP + sigma_4`, with an
/// optional hard state box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaypointRow {
    pub station: usize,
    pub time: f64,
    pub state_box: Option<StateBox>,
}

/// Maps waypoints to grid station indices. Each waypoint station must be a
/// grid station (pass it to the grid builder).
pub fn waypoint_rows(
    grid: &SpatialGrid,
    waypoints: &[WaypointSpec],
    tau: f64,
) -> Result<Vec<WaypointRow>> {
    waypoints
        .iter()
        .map(|w| {
            let station = grid.index_of(w.s).ok_or_else(|| {
                invalid(alloc::format!(
                    "waypoint station {} is not a grid station; insert it when building the grid",
                    w.s
                ))
            })?;
            if station == 0 {
                return Err(invalid("waypoint cannot sit at the initial station"));
            }
            if !(w.time > tau) {
                return Err(invalid("waypoint time must be after the planning time"));
            }
            let state_box = w.state_box.filter(|b| !b.is_full_plane());
            Ok(WaypointRow {
                station,
                time: w.time,
                state_box,
            })
        })
        .collect()
}

/// Time-domain rates implied by a spatial trajectory, checked against the
/// unsimplified rate constraints (acceleration and steering rate over each
/// interval duration).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RateDiagnostic {
    pub max_accel: f64,
    pub min_accel: f64,
    pub max_steer_rate: f64,
    /// Largest violation of the time-domain bounds (0 when satisfied).
    pub max_violation: f64,
}

/// `speed`, `delta` hold one value per interval; `times` one per station.
pub fn rate_diagnostic(
    speed: &[f64],
    delta: &[f64],
    times: &[f64],
    p: &VehicleParams,
) -> RateDiagnostic {
    let mut d = RateDiagnostic {
        max_accel: 0.0,
        min_accel: 0.0,
        ..Default::default()
    };
    for j in 0..speed.len().saturating_sub(1) {
        let dt = times[j + 1] - times[j];
        if dt <= 0.0 {
            continue;
        }
        let acc = (speed[j + 1] - speed[j]) / dt;
        let rate = (delta[j + 1] - delta[j]) / dt;
        d.max_accel = d.max_accel.max(acc);
        d.min_accel = d.min_accel.min(acc);
        d.max_steer_rate = d.max_steer_rate.max(abs(rate));
        let v = (acc - p.accel_max)
            .max(p.accel_min - acc)
            .max(rate - p.steer_rate_max)
            .max(p.steer_rate_min - rate);
        d.max_violation = d.max_violation.max(v);
    }
    d
}

/// Merges waypoint stations with other grid insertions.
pub fn waypoint_stations(waypoints: &[WaypointSpec]) -> Vec<f64> {
    let mut s: Vec<f64> = waypoints.iter().map(|w| w.s).collect();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s.dedup_by(|a, b| abs(*a - *b) <= STATION_MERGE_TOL);
    s
}
