//! Time-domain LTV-MPC tracking baseline in the global frame.
//!
//! The kinematic bicycle model
//!
//! ```text
//! x' = v cos(psi),  y' = v sin(psi),  psi' = v tan(delta) / l
//! ```
//!
//! is linearized about a lane-centerline reference sampled every `T_s` and
//! discretized with forward Euler. The condensed tracking QP
//! `sum |xi - xi_ref|^2 + |u - u_ref|^2 + |u_k - u_{k-1}|^2` is solved once.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::constraints::friction_limits;
use crate::error::{invalid, Error, Result};
use crate::geometry::{Centerline, Point2};
use crate::math::{abs, cos, sin, tan};
use crate::model::VehicleParams;
use crate::qp::{solve_qp, QpOptions, QpRow, QpSolution, QpStatus, QuadraticProgram};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GlobalState {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
}

impl GlobalState {
    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.psi]
    }
}

/// Control `(v, delta)` of the global model.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GlobalControl {
    pub speed: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimedReference {
    /// `K + 1` reference poses.
    pub states: Vec<GlobalState>,
    /// Lane station of each reference pose.
    pub stations: Vec<f64>,
    /// `K` reference controls; steering references are zero.
    pub controls: Vec<GlobalControl>,
    /// Per-step friction speed caps when friction adaptation is on.
    pub caps: Option<Vec<f64>>,
    pub ts: f64,
}

impl TimedReference {
    pub fn steps(&self) -> usize {
        self.controls.len()
    }
}

/// Friction adaptation of the reference speed.
///
/// The reference speed is capped by the friction limit of the centerline
/// and ramps up from `start_speed` no faster than the vehicle accelerates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrictionAdaptation<'a> {
    pub vehicle: &'a VehicleParams,
    pub v_max: f64,
    pub start_speed: f64,
}

/// Speed caps along the lane centerline, one per vertex.
fn centerline_caps(c: &Centerline, f: FrictionAdaptation<'_>) -> Vec<f64> {
    let steps: Vec<f64> = c.arc_lengths().windows(2).map(|w| w[1] - w[0]).collect();
    friction_limits(c.vertex_curvatures(), &steps, f.vehicle, f.v_max).speed
}

fn interpolate(arc: &[f64], values: &[f64], s: f64) -> f64 {
    let i = arc.partition_point(|&a| a <= s).clamp(1, arc.len() - 1);
    let t = ((s - arc[i - 1]) / (arc[i] - arc[i - 1])).clamp(0.0, 1.0);
    values[i - 1] + t * (values[i] - values[i - 1])
}

/// Marches along the lane at the (possibly capped) reference speed and
/// returns stations, speeds and caps for as many steps as fit, up to
/// `max_steps`.
fn march(
    c: &Centerline,
    s_start: f64,
    v_ref: f64,
    ts: f64,
    max_steps: usize,
    adapt: Option<FrictionAdaptation<'_>>,
) -> (Vec<f64>, Vec<f64>, Option<Vec<f64>>) {
    let caps_v = adapt.map(|f| centerline_caps(c, f));
    let len = c.length();
    let mut s = s_start;
    let mut stations = vec![s];
    let mut speeds = Vec::new();
    let mut caps = Vec::new();
    let mut prev = adapt.map(|f| f.start_speed);
    while speeds.len() < max_steps {
        let cap = caps_v
            .as_ref()
            .map(|cv| interpolate(c.arc_lengths(), cv, s));
        let mut v = cap.map_or(v_ref, |cap| v_ref.min(cap));
        if let (Some(f), Some(p)) = (adapt, prev) {
            v = v.min(p + f.vehicle.accel_max * ts);
            prev = Some(v);
        }
        let next = s + v * ts;
        if next > len + 1e-9 {
            break;
        }
        speeds.push(v);
        if let Some(cap) = cap {
            caps.push(cap);
        }
        s = next.min(len);
        stations.push(s);
    }
    (stations, speeds, caps_v.map(|_| caps))
}

/// Largest horizon that fits on the lane.
pub fn max_reference_steps(
    c: &Centerline,
    s_start: f64,
    v_ref: f64,
    ts: f64,
    adapt: Option<FrictionAdaptation<'_>>,
) -> usize {
    march(c, s_start, v_ref, ts, usize::MAX, adapt).1.len()
}

/// Samples the lane centerline every `v_k T_s` of arc length.
pub fn generate_reference(
    c: &Centerline,
    s_start: f64,
    v_ref: f64,
    ts: f64,
    steps: usize,
    adapt: Option<FrictionAdaptation<'_>>,
) -> Result<TimedReference> {
    if !(v_ref > 0.0) || !(ts > 0.0) || steps == 0 {
        return Err(invalid(
            "reference speed, sampling time and horizon must be positive",
        ));
    }
    let (stations, speeds, caps) = march(c, s_start, v_ref, ts, steps, adapt);
    if speeds.len() < steps {
        return Err(Error::HorizonTooLong {
            requested: steps,
            max_feasible: speeds.len(),
        });
    }
    let caps = caps.map(|mut caps| {
        // decelerating between samples must be possible within one step
        if let Some(f) = adapt {
            for k in (0..caps.len().saturating_sub(1)).rev() {
                caps[k] = caps[k].min(caps[k + 1] + abs(f.vehicle.accel_min) * ts);
            }
        }
        caps
    });
    let controls = speeds
        .iter()
        .enumerate()
        .map(|(k, &v)| GlobalControl {
            speed: caps.as_ref().map_or(v, |cp| v.min(cp[k])),
            delta: 0.0,
        })
        .collect();
    let mut states = Vec::with_capacity(stations.len());
    for &s in &stations {
        let p = c.point_at(s)?;
        states.push(GlobalState {
            x: p.x,
            y: p.y,
            psi: c.heading_at(s),
        });
    }
    Ok(TimedReference {
        states,
        stations,
        controls,
        caps,
        ts,
    })
}

/// `xi' = f(xi, u)`.
pub fn global_dynamics(xi: GlobalState, u: GlobalControl, p: &VehicleParams) -> [f64; 3] {
    [
        u.speed * cos(xi.psi),
        u.speed * sin(xi.psi),
        u.speed * tan(u.delta) / p.wheelbase,
    ]
}

/// Continuous-time Jacobians `(df/dxi, df/du)` with `u = (v, delta)`.
pub fn global_jacobians(
    xi: GlobalState,
    u: GlobalControl,
    p: &VehicleParams,
) -> ([[f64; 3]; 3], [[f64; 2]; 3]) {
    let (s, c) = (sin(xi.psi), cos(xi.psi));
    let v = u.speed;
    let cd = cos(u.delta);
    let a = [[0.0, 0.0, -v * s], [0.0, 0.0, v * c], [0.0, 0.0, 0.0]];
    let b = [
        [c, 0.0],
        [s, 0.0],
        [tan(u.delta) / p.wheelbase, v / (p.wheelbase * cd * cd)],
    ];
    (a, b)
}

/// `xi_{k+1} = A xi_k + B u_k + g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlobalStage {
    pub a: [[f64; 3]; 3],
    pub b: [[f64; 2]; 3],
    pub g: [f64; 3],
}

impl GlobalStage {
    pub fn step(&self, xi: [f64; 3], u: GlobalControl) -> [f64; 3] {
        let mut out = self.g;
        for (r, o) in out.iter_mut().enumerate() {
            *o += self.a[r][0] * xi[0] + self.a[r][1] * xi[1] + self.a[r][2] * xi[2];
            *o += self.b[r][0] * u.speed + self.b[r][1] * u.delta;
        }
        out
    }
}

/// Forward-Euler discretization about each reference sample.
pub fn linearize_global(refs: &TimedReference, p: &VehicleParams) -> Result<Vec<GlobalStage>> {
    let ts = refs.ts;
    refs.controls
        .iter()
        .zip(&refs.states)
        .map(|(&u, &xi)| {
            if !(u.speed > 0.0) {
                return Err(invalid("reference speed must be positive"));
            }
            let f = global_dynamics(xi, u, p);
            let (ac, bc) = global_jacobians(xi, u, p);
            let x = xi.as_array();
            let mut a = [[0.0; 3]; 3];
            let mut b = [[0.0; 2]; 3];
            let mut g = [0.0; 3];
            for r in 0..3 {
                for c in 0..3 {
                    a[r][c] = if r == c { 1.0 } else { 0.0 } + ts * ac[r][c];
                }
                b[r] = [ts * bc[r][0], ts * bc[r][1]];
                let lin = (0..3).map(|c| ac[r][c] * x[c]).sum::<f64>()
                    + bc[r][0] * u.speed
                    + bc[r][1] * u.delta;
                g[r] = ts * (f[r] - lin);
            }
            Ok(GlobalStage { a, b, g })
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct LtvProblem<'a> {
    pub refs: &'a TimedReference,
    pub stages: &'a [GlobalStage],
    pub xi0: GlobalState,
    /// Previously applied control `u_{-1}`.
    pub u_prev: GlobalControl,
    pub vehicle: &'a VehicleParams,
    pub v_min: f64,
    pub v_max: f64,
    /// Apply the per-step friction caps of the reference as speed bounds.
    pub use_caps: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LtvPlan {
    pub controls: Vec<GlobalControl>,
    /// States predicted by the linear model, `K + 1` of them.
    pub predicted: Vec<GlobalState>,
    pub cost: f64,
    pub qp: QpSolution,
    /// Upper speed bound used at each step.
    pub speed_upper: Vec<f64>,
}

/// Builds and solves the condensed tracking QP.
pub fn solve_ltv(pb: &LtvProblem<'_>, opts: &QpOptions) -> Result<LtvPlan> {
    let (qp, upper) = build_ltv_qp(pb)?;
    let sol = solve_qp(&qp, opts)?;
    if sol.status != QpStatus::Optimal {
        return Err(Error::Qp(format!(
            "status {:?} after {} iterations (kkt residual {:.3e})",
            sol.status, sol.iterations, sol.kkt_residual
        )));
    }
    let k = pb.stages.len();
    let controls: Vec<GlobalControl> = (0..k)
        .map(|i| GlobalControl {
            speed: sol.x[2 * i],
            delta: sol.x[2 * i + 1],
        })
        .collect();
    let mut xi = start_state(pb).as_array();
    let mut predicted = vec![GlobalState {
        x: xi[0],
        y: xi[1],
        psi: xi[2],
    }];
    for (st, &u) in pb.stages.iter().zip(&controls) {
        xi = st.step(xi, u);
        predicted.push(GlobalState {
            x: xi[0],
            y: xi[1],
            psi: xi[2],
        });
    }
    Ok(LtvPlan {
        controls,
        predicted,
        cost: sol.objective,
        qp: sol,
        speed_upper: upper,
    })
}

/// Initial pose with its heading shifted by whole turns next to the first
/// reference heading.
fn start_state(pb: &LtvProblem<'_>) -> GlobalState {
    let tau = 2.0 * core::f64::consts::PI;
    let r = pb.refs.states[0].psi;
    let mut psi = pb.xi0.psi;
    psi -= tau * crate::math::floor((psi - r) / tau + 0.5);
    GlobalState { psi, ..pb.xi0 }
}

/// The tracking QP over `x = (v_0, delta_0, v_1, delta_1, ...)` and the
/// speed upper bound per step.
pub fn build_ltv_qp(pb: &LtvProblem<'_>) -> Result<(QuadraticProgram, Vec<f64>)> {
    let k = pb.stages.len();
    let refs = pb.refs;
    if k == 0 || refs.controls.len() != k || refs.states.len() != k + 1 {
        return Err(invalid("stages and references must share the horizon"));
    }
    let p = pb.vehicle;
    let ts = refs.ts;
    let n = 2 * k;

    // condensed states: xi_i = c_i + G_i x
    let mut cst = vec![start_state(pb).as_array()];
    let mut gm: Vec<[Vec<f64>; 3]> = vec![[vec![0.0; n], vec![0.0; n], vec![0.0; n]]];
    for (i, st) in pb.stages.iter().enumerate() {
        let (c0, g0) = (cst[i], &gm[i]);
        let mut c1 = st.g;
        let mut g1 = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for r in 0..3 {
            c1[r] += (0..3).map(|c| st.a[r][c] * c0[c]).sum::<f64>();
            for v in 0..2 * i {
                g1[r][v] = (0..3).map(|c| st.a[r][c] * g0[c][v]).sum();
            }
            g1[r][2 * i] = st.b[r][0];
            g1[r][2 * i + 1] = st.b[r][1];
        }
        cst.push(c1);
        gm.push(g1);
    }

    // least squares |M x - r|^2
    let mut m_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for i in 1..=k {
        let target = refs.states[i].as_array();
        for c in 0..3 {
            let row: Vec<(usize, f64)> = gm[i][c]
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0.0)
                .map(|(v, &a)| (v, a))
                .collect();
            m_rows.push((row, target[c] - cst[i][c]));
        }
    }
    for i in 0..k {
        let u = refs.controls[i];
        m_rows.push((vec![(2 * i, 1.0)], u.speed));
        m_rows.push((vec![(2 * i + 1, 1.0)], u.delta));
    }
    m_rows.push((vec![(0, 1.0)], pb.u_prev.speed));
    m_rows.push((vec![(1, 1.0)], pb.u_prev.delta));
    for i in 1..k {
        for c in 0..2 {
            m_rows.push((vec![(2 * i + c, 1.0), (2 * (i - 1) + c, -1.0)], 0.0));
        }
    }
    let mut hessian = vec![0.0; n * n];
    let mut linear = vec![0.0; n];
    let mut constant = 0.0;
    for (row, r) in &m_rows {
        for &(a, va) in row {
            for &(b, vb) in row {
                hessian[a * n + b] += 2.0 * va * vb;
            }
            linear[a] -= 2.0 * va * r;
        }
        constant += r * r;
    }

    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut speed_upper = Vec::with_capacity(k);
    for i in 0..k {
        let mut hi = pb.v_max;
        if pb.use_caps {
            if let Some(caps) = &refs.caps {
                // never below what braking from u_{-1} can reach
                let floor = (pb.u_prev.speed + (i + 1) as f64 * ts * p.accel_min).max(pb.v_min);
                hi = hi.min(caps[i].max(floor));
            }
        }
        lower[2 * i] = pb.v_min;
        upper[2 * i] = hi;
        lower[2 * i + 1] = p.steer_min;
        upper[2 * i + 1] = p.steer_max;
        speed_upper.push(hi);
    }
    let mut rows = vec![
        QpRow {
            coeffs: vec![(0, 1.0)],
            lower: pb.u_prev.speed + ts * p.accel_min,
            upper: pb.u_prev.speed + ts * p.accel_max,
        },
        QpRow {
            coeffs: vec![(1, 1.0)],
            lower: pb.u_prev.delta + ts * p.steer_rate_min,
            upper: pb.u_prev.delta + ts * p.steer_rate_max,
        },
    ];
    for i in 1..k {
        rows.push(QpRow {
            coeffs: vec![(2 * i, 1.0), (2 * (i - 1), -1.0)],
            lower: ts * p.accel_min,
            upper: ts * p.accel_max,
        });
        rows.push(QpRow {
            coeffs: vec![(2 * i + 1, 1.0), (2 * i - 1, -1.0)],
            lower: ts * p.steer_rate_min,
            upper: ts * p.steer_rate_max,
        });
    }
    Ok((
        QuadraticProgram {
            hessian,
            linear,
            constant,
            lower,
            upper,
            rows,
        },
        speed_upper,
    ))
}

/// Integrates the nonlinear model exactly with zero-order-hold controls
/// (constant speed and steering trace a circular arc).
pub fn rollout_nonlinear(
    controls: &[GlobalControl],
    xi0: GlobalState,
    p: &VehicleParams,
    ts: f64,
) -> Vec<GlobalState> {
    let mut xi = xi0;
    let mut out = vec![xi];
    for u in controls {
        let w = u.speed * tan(u.delta) / p.wheelbase;
        let psi1 = xi.psi + w * ts;
        if abs(w * ts) < 1e-9 {
            let mid = xi.psi + 0.5 * w * ts;
            xi.x += u.speed * ts * cos(mid);
            xi.y += u.speed * ts * sin(mid);
        } else {
            let r = u.speed / w;
            xi.x += r * (sin(psi1) - sin(xi.psi));
            xi.y -= r * (cos(psi1) - cos(xi.psi));
        }
        xi.psi = psi1;
        out.push(xi);
    }
    out
}

/// Lane keeping of a global-frame trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct LaneReport {
    pub stations: Vec<f64>,
    pub e_y: Vec<f64>,
    pub max_abs_e_y: f64,
    /// First step with `|e_y| > lane_half_width - w`.
    pub departure: Option<usize>,
}

/// Projects each pose onto the lane centerline. A pose that cannot be
/// projected counts as a departure.
pub fn lane_check(
    states: &[GlobalState],
    c: &Centerline,
    lane_half_width: f64,
    p: &VehicleParams,
) -> LaneReport {
    let limit = lane_half_width - p.half_width;
    let mut rep = LaneReport {
        stations: Vec::new(),
        e_y: Vec::new(),
        max_abs_e_y: 0.0,
        departure: None,
    };
    for (k, xi) in states.iter().enumerate() {
        match c.global_to_frenet(Point2::new(xi.x, xi.y), xi.psi) {
            Ok(f) => {
                rep.stations.push(f.s);
                rep.e_y.push(f.e_y);
                rep.max_abs_e_y = rep.max_abs_e_y.max(abs(f.e_y));
                if abs(f.e_y) > limit && rep.departure.is_none() {
                    rep.departure = Some(k);
                }
            }
            Err(_) => {
                rep.departure.get_or_insert(k);
                break;
            }
        }
    }
    rep
}

/// Time at which a sampled station sequence first reaches `s_end`,
/// interpolated between samples.
pub fn crossing_time(stations: &[f64], ts: f64, t0: f64, s_end: f64) -> Option<f64> {
    let k = stations.iter().position(|&s| s >= s_end)?;
    if k == 0 {
        return Some(t0);
    }
    let (a, b) = (stations[k - 1], stations[k]);
    let frac = if b > a { (s_end - a) / (b - a) } else { 1.0 };
    Some(t0 + ((k - 1) as f64 + frac) * ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn straight(len: f64) -> Centerline {
        Centerline::new(&[Point2::new(0.0, 0.0), Point2::new(len, 0.0)], 1.0).unwrap()
    }

    fn circle(r: f64) -> Centerline {
        let pts: Vec<Point2> = (0..=4000)
            .map(|k| {
                let a = k as f64 / 4000.0 * 3.0;
                Point2::new(r * a.sin(), r - r * a.cos())
            })
            .collect();
        Centerline::new(&pts, 1.0).unwrap()
    }

    #[test]
    fn straight_reference_spacing() {
        let c = straight(200.0);
        let r = generate_reference(&c, 0.0, 50.0 / 3.6, 0.1, 50, None).unwrap();
        for w in r.stations.windows(2) {
            assert!((w[1] - w[0] - 1.38889).abs() < 1e-5);
        }
        assert!(r
            .controls
            .iter()
            .all(|u| u.speed == 50.0 / 3.6 && u.delta == 0.0));
        assert!(r.caps.is_none());
    }

    #[test]
    fn friction_adapted_reference_on_a_circle() {
        let c = circle(50.0);
        let p = VehicleParams::default();
        let adapt = FrictionAdaptation {
            vehicle: &p,
            v_max: 40.0,
            start_speed: 30.0,
        };
        let r = generate_reference(&c, 20.0, 30.0, 0.1, 30, Some(adapt)).unwrap();
        let lim = (0.8f64 * 9.81 * 50.0).sqrt();
        for u in &r.controls {
            assert!((u.speed - lim).abs() < 0.05, "{}", u.speed);
        }
        let r = generate_reference(&c, 20.0, 10.0, 0.1, 30, Some(adapt)).unwrap();
        assert!(r.controls.iter().all(|u| (u.speed - 10.0).abs() < 1e-12));
    }

    #[test]
    fn adapted_reference_ramps_from_start_speed() {
        let c = straight(500.0);
        let p = VehicleParams::default();
        let adapt = FrictionAdaptation {
            vehicle: &p,
            v_max: 40.0,
            start_speed: 10.0,
        };
        let r = generate_reference(&c, 0.0, 20.0, 0.1, 60, Some(adapt)).unwrap();
        for (k, u) in r.controls.iter().enumerate() {
            let expect = (10.0 + p.accel_max * 0.1 * (k + 1) as f64).min(20.0);
            assert!((u.speed - expect).abs() < 1e-12, "{k}: {}", u.speed);
        }
    }

    #[test]
    fn lane_exhaustion_reports_max_steps() {
        let c = straight(100.0);
        match generate_reference(&c, 0.0, 10.0, 0.1, 200, None) {
            Err(Error::HorizonTooLong {
                requested: 200,
                max_feasible,
            }) => assert_eq!(max_feasible, 100),
            other => panic!("{other:?}"),
        }
        assert_eq!(max_reference_steps(&c, 0.0, 10.0, 0.1, None), 100);
    }

    #[test]
    fn stage_matrices_at_zero_heading() {
        let c = straight(100.0);
        let p = VehicleParams::default();
        let r = generate_reference(&c, 0.0, 10.0, 0.1, 5, None).unwrap();
        let st = linearize_global(&r, &p).unwrap();
        let a = st[0].a;
        assert_eq!(a, [[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]);
        assert!((st[0].b[2][1] - 0.1 * 10.0 / 2.7).abs() < 1e-12);
        assert_eq!(st[0].b[0][1], 0.0);
    }

    #[test]
    fn jacobians_match_central_differences() {
        let p = VehicleParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = 1e-6;
        for _ in 0..100 {
            let xi = GlobalState {
                x: rng.gen_range(-50.0..50.0),
                y: rng.gen_range(-50.0..50.0),
                psi: rng.gen_range(-3.0..3.0),
            };
            let u = GlobalControl {
                speed: rng.gen_range(1.0..40.0),
                delta: rng.gen_range(-0.5..0.5),
            };
            let (a, b) = global_jacobians(xi, u, &p);
            for c in 0..3 {
                let mut xp = xi.as_array();
                let mut xm = xp;
                xp[c] += h;
                xm[c] -= h;
                let fp = global_dynamics(
                    GlobalState {
                        x: xp[0],
                        y: xp[1],
                        psi: xp[2],
                    },
                    u,
                    &p,
                );
                let fm = global_dynamics(
                    GlobalState {
                        x: xm[0],
                        y: xm[1],
                        psi: xm[2],
                    },
                    u,
                    &p,
                );
                for r in 0..3 {
                    let fd = (fp[r] - fm[r]) / (2.0 * h);
                    assert!((fd - a[r][c]).abs() / (1.0 + a[r][c].abs()) < 1e-5);
                }
            }
            for c in 0..2 {
                let shift = |d: f64| {
                    let mut uu = u;
                    if c == 0 {
                        uu.speed += d;
                    } else {
                        uu.delta += d;
                    }
                    global_dynamics(xi, uu, &p)
                };
                let (fp, fm) = (shift(h), shift(-h));
                for r in 0..3 {
                    let fd = (fp[r] - fm[r]) / (2.0 * h);
                    assert!((fd - b[r][c]).abs() / (1.0 + b[r][c].abs()) < 1e-5);
                }
            }
        }
    }

    fn tracking_problem<'a>(
        r: &'a TimedReference,
        st: &'a [GlobalStage],
        p: &'a VehicleParams,
        v: f64,
    ) -> LtvProblem<'a> {
        LtvProblem {
            refs: r,
            stages: st,
            xi0: r.states[0],
            u_prev: GlobalControl {
                speed: v,
                delta: 0.0,
            },
            vehicle: p,
            v_min: 1.0,
            v_max: 40.0,
            use_caps: true,
        }
    }

    #[test]
    fn consistent_reference_is_tracked_exactly() {
        let c = straight(300.0);
        let p = VehicleParams::default();
        let v = 50.0 / 3.6;
        let r = generate_reference(&c, 0.0, v, 0.1, 40, None).unwrap();
        let st = linearize_global(&r, &p).unwrap();
        let plan = solve_ltv(&tracking_problem(&r, &st, &p, v), &QpOptions::default()).unwrap();
        assert!(plan.cost.abs() < 1e-6, "{}", plan.cost);
        for u in &plan.controls {
            assert!((u.speed - v).abs() < 1e-6 && u.delta.abs() < 1e-6);
        }
        assert!(plan.qp.kkt_residual < 1e-5);
    }

    #[test]
    fn speed_caps_are_respected() {
        let c = circle(50.0);
        let p = VehicleParams::default();
        let adapt = FrictionAdaptation {
            vehicle: &p,
            v_max: 40.0,
            start_speed: 19.0,
        };
        let r = generate_reference(&c, 0.0, 30.0, 0.1, 40, Some(adapt)).unwrap();
        let st = linearize_global(&r, &p).unwrap();
        let mut pb = tracking_problem(&r, &st, &p, 19.0);
        pb.xi0 = r.states[0];
        let plan = solve_ltv(&pb, &QpOptions::default()).unwrap();
        for (u, hi) in plan.controls.iter().zip(&plan.speed_upper) {
            assert!(u.speed <= hi + 1e-6);
        }
        for w in plan.controls.windows(2) {
            assert!((w[1].delta - w[0].delta).abs() <= 0.05 + 1e-6);
        }
        assert!(plan.qp.kkt_residual < 1e-5);
    }

    #[test]
    fn straight_rollout_stays_on_the_line() {
        let c = straight(100.0);
        let p = VehicleParams::default();
        let u = vec![
            GlobalControl {
                speed: 10.0,
                delta: 0.0
            };
            50
        ];
        let xs = rollout_nonlinear(&u, GlobalState::default(), &p, 0.1);
        let rep = lane_check(&xs, &c, 3.5, &p);
        assert!(rep.max_abs_e_y < 1e-12 && rep.departure.is_none());
        assert!((xs[50].x - 50.0).abs() < 1e-9);
        assert!((crossing_time(&rep.stations, 0.1, 0.0, 25.0).unwrap() - 2.5).abs() < 1e-9);
    }

    #[test]
    fn arc_rollout_matches_circle() {
        let p = VehicleParams::default();
        let r = 50.0;
        let delta = (p.wheelbase / r).atan();
        let u = vec![GlobalControl { speed: 10.0, delta }; 30];
        let xs = rollout_nonlinear(&u, GlobalState::default(), &p, 0.1);
        for xi in xs {
            let d = (xi.x * xi.x + (xi.y - r).powi(2)).sqrt();
            assert!((d - r).abs() < 1e-9);
        }
    }
}
