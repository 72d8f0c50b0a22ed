//! Scenario files.
//!
//! Scenarios are TOML documents. Unknown keys are rejected, quantities may
//! carry units, and everything is converted to SI on load. See
//! `docs/scenario-format.md` for the full key reference.

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use toss_core::constraints::{MarginVariant, StateBox, WaypointSpec};
use toss_core::geometry::{
    BoundPiece, Centerline, Footprint, ObstacleBox, PassSide, Point2, RoadCorridor,
};
use toss_core::lp::LpOptions;
use toss_core::model::{SpatialState, VehicleParams};
use toss_core::planner::{InitialState, PlanRequest, PlannerConfig};

use crate::road::{RoadShape, Segment};
use crate::units::{Accel, Angle, AngleRate, Curvature, Duration, Length, Speed};

#[derive(Debug)]
pub enum ScenarioError {
    Io(String, std::io::Error),
    /// TOML syntax or schema error, with its location in the file.
    Parse {
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
    /// Values that parse but do not describe a usable scenario.
    Invalid(String),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Io(path, e) => write!(f, "{path}: {e}"),
            ScenarioError::Parse {
                line: Some(l),
                column: Some(c),
                message,
            } => write!(f, "line {l}, column {c}: {message}"),
            ScenarioError::Parse { message, .. } => write!(f, "{message}"),
            ScenarioError::Invalid(m) => write!(f, "invalid scenario: {m}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<toss_core::Error> for ScenarioError {
    fn from(e: toss_core::Error) -> Self {
        ScenarioError::Invalid(e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid(msg.into())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    description: Option<String>,
    road: RawRoad,
    corridor: RawCorridor,
    #[serde(default)]
    vehicle: RawVehicle,
    initial: RawInitial,
    #[serde(default)]
    planner: RawPlanner,
    #[serde(default)]
    obstacles: Vec<RawObstacle>,
    #[serde(default)]
    waypoints: Vec<RawWaypoint>,
    #[serde(default)]
    baseline: RawBaseline,
    #[serde(default)]
    expect: RawExpect,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawRoad {
    Straight(RawStraight),
    Circle(RawCircle),
    SCurve(RawSCurve),
    Segments(RawSegments),
    Polyline(RawPolyline),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStraight {
    length: Length,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircle {
    radius: Length,
    length: Length,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSCurve {
    lead_in: Length,
    radius: Length,
    arc_length: Length,
    lead_out: Length,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegments {
    segments: Vec<RawSegment>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    length: Length,
    radius: Option<Length>,
    curvature: Option<Curvature>,
    /// `[start, end]` for a clothoid piece.
    curvature_ramp: Option<[Curvature; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolyline {
    points: Vec<[f64; 2]>,
    resample_step: Option<Length>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorridor {
    e_y_min: Length,
    e_y_max: Length,
    #[serde(default)]
    pieces: Vec<RawPiece>,
    v_min: Option<Speed>,
    v_max: Speed,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    s_start: Length,
    e_y_min: Length,
    e_y_max: Length,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawVehicle {
    wheelbase: Option<Length>,
    front_overhang: Option<Length>,
    rear_overhang: Option<Length>,
    half_width: Option<Length>,
    steer_min: Option<Angle>,
    steer_max: Option<Angle>,
    accel_min: Option<Accel>,
    accel_max: Option<Accel>,
    steer_rate_min: Option<AngleRate>,
    steer_rate_max: Option<AngleRate>,
    friction: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    s: Option<Length>,
    e_y: Option<Length>,
    e_psi: Option<Angle>,
    speed: Speed,
    delta: Option<Angle>,
    time: Option<Duration>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawPlanner {
    horizon: Option<Length>,
    base_step: Option<Length>,
    t_tilde: Option<Duration>,
    reaction_time: Option<Duration>,
    margin: Option<String>,
    slack_weight: Option<f64>,
    time_weight: Option<f64>,
    steer_weight: Option<f64>,
    steer_rate_weight: Option<f64>,
    minmax: Option<bool>,
    steer_variation_weight: Option<f64>,
    third_pass: Option<bool>,
    terminal_e_psi: Option<Angle>,
    terminal_e_y: Option<Length>,
    nominal_speed: Option<Speed>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObstacle {
    s_min: Option<Length>,
    s_max: Option<Length>,
    e_y_min: Option<Length>,
    e_y_max: Option<Length>,
    x: Option<Length>,
    y: Option<Length>,
    heading: Option<Angle>,
    length: Option<Length>,
    width: Option<Length>,
    inflation: Option<Length>,
    velocity: Option<Speed>,
    side: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWaypoint {
    s: Length,
    time: Duration,
    e_y: Option<[Length; 2]>,
    e_psi: Option<[Angle; 2]>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawBaseline {
    ts: Option<Duration>,
    steps: Option<usize>,
    v_ref: Option<Speed>,
    friction_adapted: Option<bool>,
    lane_half_width: Option<Length>,
    /// Reference speeds for the departure sweep.
    ladder: Option<Vec<Speed>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawExpect {
    traversal_time: Option<Duration>,
    traversal_tolerance: Option<Duration>,
    waypoint_tolerance: Option<Duration>,
    ltv_departs: Option<bool>,
    toss_faster_than_ltv: Option<bool>,
    smoother_than_ltv: Option<bool>,
    schedule_end_at_ltv_time: Option<bool>,
    below_friction_fraction: Option<f64>,
}

/// Time-domain baseline settings.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineConfig {
    /// Sampling time `T_s` (s).
    pub ts: f64,
    /// Horizon `K`; `None` runs to the end of the road.
    pub steps: Option<usize>,
    pub v_ref: f64,
    pub friction_adapted: bool,
    pub lane_half_width: f64,
    pub ladder: Vec<f64>,
}

/// Property checks the `examples` driver evaluates for a scenario.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Expectations {
    pub traversal_time: Option<(f64, f64)>,
    pub waypoint_tolerance: Option<f64>,
    pub ltv_departs: Option<bool>,
    pub toss_faster_than_ltv: bool,
    pub smoother_than_ltv: bool,
    /// Add a waypoint at the end of the horizon scheduled at the baseline's
    /// traversal time before planning.
    pub schedule_end_at_ltv_time: bool,
    pub below_friction_fraction: Option<f64>,
}

impl Expectations {
    pub fn needs_baseline(&self) -> bool {
        self.ltv_departs.is_some()
            || self.toss_faster_than_ltv
            || self.smoother_than_ltv
            || self.schedule_end_at_ltv_time
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub road: RoadShape,
    pub corridor: RoadCorridor,
    pub vehicle: VehicleParams,
    pub obstacles: Vec<ObstacleBox>,
    pub waypoints: Vec<WaypointSpec>,
    pub initial: InitialState,
    pub planner: PlannerConfig,
    pub baseline: BaselineConfig,
    pub expect: Expectations,
}

impl Scenario {
    pub fn centerline(&self) -> &Centerline {
        &self.corridor.centerline
    }

    /// Last station of the planning horizon.
    pub fn s_end(&self) -> f64 {
        self.initial.s + self.planner.horizon
    }

    pub fn plan_request(&self) -> PlanRequest {
        PlanRequest {
            corridor: self.corridor.clone(),
            vehicle: self.vehicle,
            obstacles: self.obstacles.clone(),
            waypoints: self.waypoints.clone(),
            initial: self.initial,
            config: self.planner,
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Io(path.display().to_string(), e))?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_scenario(&text, &fallback)
}

/// Parses scenario text; `fallback_name` is used when the file has no
/// `name` key.
pub fn parse_scenario(text: &str, fallback_name: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| {
        let (line, column) = match e.span() {
            Some(span) => {
                let before = &text[..span.start.min(text.len())];
                let line = before.matches('\n').count() + 1;
                let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                (Some(line), Some(column))
            }
            None => (None, None),
        };
        ScenarioError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    convert(raw, fallback_name)
}

fn convert(raw: RawScenario, fallback_name: &str) -> Result<Scenario, ScenarioError> {
    let road = road_shape(raw.road)?;
    let centerline = road.centerline()?;

    let c = raw.corridor;
    let mut pieces = vec![BoundPiece {
        s_start: 0.0,
        e_y_min: c.e_y_min.si(),
        e_y_max: c.e_y_max.si(),
    }];
    pieces.extend(c.pieces.iter().map(|p| BoundPiece {
        s_start: p.s_start.si(),
        e_y_min: p.e_y_min.si(),
        e_y_max: p.e_y_max.si(),
    }));
    let v_min = c.v_min.map_or(1.0, Speed::si);
    let corridor = RoadCorridor::new(centerline, pieces, v_min, c.v_max.si())?;

    let vehicle = vehicle(raw.vehicle);
    vehicle.validate()?;

    let i = raw.initial;
    let initial = InitialState {
        s: i.s.map_or(0.0, Length::si),
        e_psi: i.e_psi.map_or(0.0, Angle::si),
        e_y: i.e_y.map_or(0.0, Length::si),
        speed: i.speed.si(),
        delta: i.delta.map_or(0.0, Angle::si),
        time: i.time.map_or(0.0, Duration::si),
    };
    let road_len = corridor.centerline.length();
    if !(0.0..road_len).contains(&initial.s) {
        return Err(invalid(format!(
            "initial.s = {} is outside the road [0, {road_len})",
            initial.s
        )));
    }
    if !(initial.speed > 0.0) {
        return Err(invalid("initial.speed must be positive"));
    }

    let planner = planner(raw.planner, road_len - initial.s)?;
    if initial.s + planner.horizon > road_len + 1e-9 {
        return Err(invalid(format!(
            "planner.horizon runs past the end of the road ({road_len} m)"
        )));
    }

    let obstacles = raw
        .obstacles
        .into_iter()
        .enumerate()
        .map(|(k, o)| obstacle(k, o))
        .collect::<Result<Vec<_>, _>>()?;
    let waypoints: Vec<WaypointSpec> = raw
        .waypoints
        .iter()
        .map(|w| WaypointSpec {
            s: w.s.si(),
            time: w.time.si(),
            state_box: if w.e_y.is_none() && w.e_psi.is_none() {
                None
            } else {
                let full = (f64::NEG_INFINITY, f64::INFINITY);
                Some(StateBox {
                    e_psi: w.e_psi.map_or(full, |[a, b]| (a.si(), b.si())),
                    e_y: w.e_y.map_or(full, |[a, b]| (a.si(), b.si())),
                })
            },
        })
        .collect();
    for w in &waypoints {
        if !(w.s > initial.s && w.s <= initial.s + planner.horizon + 1e-9) {
            return Err(invalid(format!(
                "waypoint station {} is outside the planning horizon",
                w.s
            )));
        }
    }

    let b = raw.baseline;
    let (lo, hi) = corridor.bounds_at(initial.s);
    let baseline = BaselineConfig {
        ts: b.ts.map_or(0.1, Duration::si),
        steps: b.steps,
        v_ref: b.v_ref.map_or(initial.speed, Speed::si),
        friction_adapted: b.friction_adapted.unwrap_or(false),
        lane_half_width: b.lane_half_width.map_or(0.5 * (hi - lo), Length::si),
        ladder: b
            .ladder
            .unwrap_or_default()
            .into_iter()
            .map(Speed::si)
            .collect(),
    };
    if !(baseline.ts > 0.0)
        || !(baseline.v_ref > 0.0)
        || !(baseline.lane_half_width > vehicle.half_width)
    {
        return Err(invalid(
            "baseline needs positive ts and v_ref and a lane wider than the vehicle",
        ));
    }

    let e = raw.expect;
    let expect = Expectations {
        traversal_time: e
            .traversal_time
            .map(|t| (t.si(), e.traversal_tolerance.map_or(1e-3, Duration::si))),
        waypoint_tolerance: e.waypoint_tolerance.map(Duration::si),
        ltv_departs: e.ltv_departs,
        toss_faster_than_ltv: e.toss_faster_than_ltv.unwrap_or(false),
        smoother_than_ltv: e.smoother_than_ltv.unwrap_or(false),
        schedule_end_at_ltv_time: e.schedule_end_at_ltv_time.unwrap_or(false),
        below_friction_fraction: e.below_friction_fraction,
    };

    Ok(Scenario {
        name: raw.name.unwrap_or_else(|| fallback_name.to_string()),
        description: raw.description.unwrap_or_default(),
        road,
        corridor,
        vehicle,
        obstacles,
        waypoints,
        initial,
        planner,
        baseline,
        expect,
    })
}

fn road_shape(r: RawRoad) -> Result<RoadShape, ScenarioError> {
    Ok(match r {
        RawRoad::Straight(s) => RoadShape::Straight { length: s.length.si() },
        RawRoad::Circle(c) => RoadShape::Circle { radius: c.radius.si(), length: c.length.si() },
        RawRoad::SCurve(s) => RoadShape::SCurve {
            lead_in: s.lead_in.si(),
            radius: s.radius.si(),
            arc_length: s.arc_length.si(),
            lead_out: s.lead_out.si(),
        },
        RawRoad::Segments(s) => RoadShape::Segments(
            s.segments
                .iter()
                .enumerate()
                .map(|(k, g)| {
                    let len = g.length.si();
                    match (g.radius, g.curvature, g.curvature_ramp) {
                        (None, None, None) => Ok(Segment::straight(len)),
                        (Some(r), None, None) => Ok(Segment::arc(len, r.si())),
                        (None, Some(c), None) => Ok(Segment::ramp(len, c.si(), c.si())),
                        (None, None, Some([a, b])) => Ok(Segment::ramp(len, a.si(), b.si())),
                        _ => Err(invalid(format!("road segment {k}: give at most one of radius, curvature, curvature_ramp"))),
                    }
                })
                .collect::<Result<_, _>>()?,
        ),
        RawRoad::Polyline(p) => RoadShape::Polyline {
            points: p.points.iter().map(|&[x, y]| Point2::new(x, y)).collect(),
            resample_step: p.resample_step.map_or(crate::road::VERTEX_SPACING, Length::si),
        },
    })
}

fn vehicle(v: RawVehicle) -> VehicleParams {
    let d = VehicleParams::default();
    VehicleParams {
        wheelbase: v.wheelbase.map_or(d.wheelbase, Length::si),
        front_overhang: v.front_overhang.map_or(d.front_overhang, Length::si),
        rear_overhang: v.rear_overhang.map_or(d.rear_overhang, Length::si),
        half_width: v.half_width.map_or(d.half_width, Length::si),
        steer_min: v.steer_min.map_or(d.steer_min, Angle::si),
        steer_max: v.steer_max.map_or(d.steer_max, Angle::si),
        accel_min: v.accel_min.map_or(d.accel_min, Accel::si),
        accel_max: v.accel_max.map_or(d.accel_max, Accel::si),
        steer_rate_min: v.steer_rate_min.map_or(d.steer_rate_min, AngleRate::si),
        steer_rate_max: v.steer_rate_max.map_or(d.steer_rate_max, AngleRate::si),
        friction: v.friction.unwrap_or(d.friction),
        gravity: d.gravity,
    }
}

fn planner(p: RawPlanner, default_horizon: f64) -> Result<PlannerConfig, ScenarioError> {
    let d = PlannerConfig::default();
    let margin = match p.margin.as_deref() {
        None | Some("reaction_time") => MarginVariant::ReactionTime,
        Some("max_angle") => MarginVariant::MaxAngle,
        Some("none") => MarginVariant::None,
        Some(other) => {
            return Err(invalid(format!(
                "planner.margin = {other:?}; expected reaction_time, max_angle or none"
            )))
        }
    };
    let lp = LpOptions {
        slack_weight: p.slack_weight.unwrap_or(d.lp.slack_weight),
        time_weight: p.time_weight.unwrap_or(d.lp.time_weight),
        steer_weight: p.steer_weight.unwrap_or(d.lp.steer_weight),
        steer_rate_weight: p.steer_rate_weight.unwrap_or(d.lp.steer_rate_weight),
        minmax: p.minmax.unwrap_or(d.lp.minmax),
        steer_variation_weight: p
            .steer_variation_weight
            .unwrap_or(d.lp.steer_variation_weight),
    };
    let cfg = PlannerConfig {
        horizon: p.horizon.map_or(default_horizon, Length::si),
        base_step: p.base_step.map_or(d.base_step, Length::si),
        t_tilde: p.t_tilde.map_or(d.t_tilde, Duration::si),
        reaction_time: p.reaction_time.map_or(d.reaction_time, Duration::si),
        margin,
        lp,
        simplex: d.simplex,
        terminal: SpatialState::new(
            p.terminal_e_psi.map_or(0.0, Angle::si),
            p.terminal_e_y.map_or(0.0, Length::si),
        ),
        nominal_speed: p.nominal_speed.map(Speed::si),
        third_pass: p.third_pass.unwrap_or(false),
    };
    if !(cfg.horizon > 0.0 && cfg.base_step > 0.0 && cfg.t_tilde > 0.0 && cfg.reaction_time >= 0.0)
    {
        return Err(invalid(
            "planner horizon, base_step and t_tilde must be positive",
        ));
    }
    Ok(cfg)
}

fn obstacle(k: usize, o: RawObstacle) -> Result<ObstacleBox, ScenarioError> {
    let frenet = [o.s_min, o.s_max, o.e_y_min, o.e_y_max];
    let global = [o.x, o.y, o.length, o.width];
    let footprint = if frenet.iter().all(Option::is_some)
        && global.iter().all(Option::is_none)
        && o.heading.is_none()
    {
        let [a, b, c, d] = frenet.map(|v| v.unwrap().si());
        Footprint::Frenet {
            s_min: a,
            s_max: b,
            e_y_min: c,
            e_y_max: d,
        }
    } else if global.iter().all(Option::is_some) && frenet.iter().all(Option::is_none) {
        let [x, y, length, width] = global.map(|v| v.unwrap().si());
        Footprint::Global {
            center: Point2::new(x, y),
            heading: o.heading.map_or(0.0, Angle::si),
            length,
            width,
        }
    } else {
        return Err(invalid(format!(
            "obstacle {k}: give either s_min, s_max, e_y_min, e_y_max or x, y, length, width (and heading)"
        )));
    };
    let side = match o.side.as_deref() {
        None | Some("auto") => PassSide::Auto,
        Some("left") => PassSide::Left,
        Some("right") => PassSide::Right,
        Some(other) => {
            return Err(invalid(format!(
                "obstacle {k}: side = {other:?}; expected left, right or auto"
            )))
        }
    };
    let ob = ObstacleBox {
        footprint,
        inflation: o.inflation.map_or(0.0, Length::si),
        velocity: o.velocity.map_or(0.0, Speed::si),
        side,
    };
    ob.validate()
        .map_err(|e| invalid(format!("obstacle {k}: {e}")))?;
    Ok(ob)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[road]
kind = "straight"
length = "100 m"

[corridor]
e_y_min = -3.5
e_y_max = 3.5
v_max = "120 km/h"

[initial]
speed = "120 km/h"
"#;

    #[test]
    fn minimal_scenario_gets_defaults() {
        let s = parse_scenario(MINIMAL, "straight").unwrap();
        assert_eq!(s.name, "straight");
        assert!((s.corridor.v_max - 33.333_333_333).abs() < 1e-8);
        assert_eq!(s.corridor.v_min, 1.0);
        assert_eq!(s.planner.reaction_time, 0.05);
        assert_eq!(s.vehicle.friction, 0.8);
        assert_eq!(s.planner.lp.slack_weight, 1e4);
        assert_eq!(s.baseline.ts, 0.1);
        assert!((s.planner.horizon - 100.0).abs() < 1e-9);
        assert_eq!(s.baseline.lane_half_width, 3.5);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("[initial]", "[initial]\nsped = 3");
        let e = parse_scenario(&text, "x").unwrap_err().to_string();
        assert!(e.contains("sped") && e.contains("line 12"), "{e}");
    }

    #[test]
    fn missing_key_is_reported() {
        let text = MINIMAL.replace("v_max = \"120 km/h\"", "");
        let e = parse_scenario(&text, "x").unwrap_err().to_string();
        assert!(e.contains("v_max"), "{e}");
    }

    #[test]
    fn syntax_error_has_line_number() {
        let text = MINIMAL.replace("e_y_max = 3.5", "e_y_max = = 3.5");
        match parse_scenario(&text, "x").unwrap_err() {
            ScenarioError::Parse { line, .. } => assert_eq!(line, Some(8)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn wrong_unit_has_line_number() {
        let text = MINIMAL.replace("length = \"100 m\"", "length = \"100 km/h\"");
        match parse_scenario(&text, "x").unwrap_err() {
            ScenarioError::Parse { line, message, .. } => {
                // the tagged road table reports its header line
                assert_eq!(line, Some(2));
                assert!(
                    message.contains("length") && message.contains("km/h"),
                    "{message}"
                );
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn obstacles_and_waypoints() {
        let text = format!(
            "{MINIMAL}\n[[obstacles]]\ns_min = 40\ns_max = 45\ne_y_min = -1\ne_y_max = 1\nside = \"left\"\n\n[[waypoints]]\ns = 50\ntime = \"2 s\"\ne_y = [-1, 1]\n"
        );
        let s = parse_scenario(&text, "x").unwrap();
        assert_eq!(s.obstacles.len(), 1);
        assert_eq!(s.obstacles[0].side, PassSide::Left);
        let b = s.waypoints[0].state_box.unwrap();
        assert_eq!(b.e_y, (-1.0, 1.0));
        assert_eq!(b.e_psi.0, f64::NEG_INFINITY);
    }

    #[test]
    fn waypoint_outside_horizon_is_rejected() {
        let text = format!("{MINIMAL}\n[[waypoints]]\ns = 150\ntime = 5\n");
        assert!(matches!(
            parse_scenario(&text, "x"),
            Err(ScenarioError::Invalid(_))
        ));
    }
}
