//! Kinematic bicycle model in the road-aligned frame with arc length as the
//! independent variable.
//!
//! With state `z = [e_psi, e_y]` and control `u = [q, delta]`, `q = 1/v`:
//!
//! ```text
//! e_psi' = (1 - kappa e_y) tan(delta) / (l cos(e_psi)) - psi_s'
//! e_y'   = (1 - kappa e_y) tan(e_psi)
//! t'     = (1 - kappa e_y) / (v cos(e_psi))
//! ```
//!
//! The state equations do not depend on the speed, so the `q` column of
//! every input matrix is zero and travel time enters only through `t'`.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Centerline, SpatialGrid};
use crate::math::{atan, cos, sin, tan};
use crate::GRAVITY;

/// Minimum admissible `cos(e_psi)` and `1 - kappa e_y` for references.
pub const POLE_GUARD: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VehicleParams {
    /// Wheelbase `l` (m).
    pub wheelbase: f64,
    /// Distance from the rear axle to the front bumper `l_f` (m).
    pub front_overhang: f64,
    /// Distance from the rear axle to the rear bumper `l_r` (m).
    pub rear_overhang: f64,
    /// Half of the vehicle width `w` (m).
    pub half_width: f64,
    pub steer_min: f64,
    pub steer_max: f64,
    /// Longitudinal acceleration bounds (m/s²).
    pub accel_min: f64,
    pub accel_max: f64,
    /// Steering rate bounds (rad/s).
    pub steer_rate_min: f64,
    pub steer_rate_max: f64,
    /// Tire-road friction coefficient `mu`.
    pub friction: f64,
    pub gravity: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            wheelbase: 2.7,
            front_overhang: 3.5,
            rear_overhang: 1.0,
            half_width: 0.9,
            steer_min: -0.5,
            steer_max: 0.5,
            accel_min: -5.0,
            accel_max: 3.0,
            steer_rate_min: -0.5,
            steer_rate_max: 0.5,
            friction: 0.8,
            gravity: GRAVITY,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.wheelbase > 0.0
            && self.front_overhang > self.half_width
            && self.half_width > 0.0
            && self.rear_overhang >= 0.0
            && self.steer_min < 0.0
            && 0.0 < self.steer_max
            && self.accel_min < 0.0
            && 0.0 < self.accel_max
            && self.steer_rate_min < 0.0
            && 0.0 < self.steer_rate_max
            && self.friction > 0.0
            && self.friction <= 1.2
            && self.gravity > 0.0;
        if ok {
            Ok(())
        } else {
            Err(invalid(
                "vehicle parameters violate their sign or range constraints",
            ))
        }
    }

    /// Heading error maximizing the lateral extent of the front corner,
    /// `atan(l_f / w)`.
    pub fn max_heading_error(&self) -> f64 {
        atan(self.front_overhang / self.half_width)
    }

    /// Maximum lateral acceleration permitted by friction (m/s²).
    pub fn lateral_accel_limit(&self) -> f64 {
        self.friction * self.gravity
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpatialState {
    pub e_psi: f64,
    pub e_y: f64,
}

impl SpatialState {
    pub const fn new(e_psi: f64, e_y: f64) -> Self {
        Self { e_psi, e_y }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.e_psi, self.e_y]
    }
}

/// Control in transformed form: `q = 1/v` (s/m) and steering angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlSample {
    pub q: f64,
    pub delta: f64,
}

impl ControlSample {
    pub fn from_speed(v: f64, delta: f64) -> Self {
        Self { q: 1.0 / v, delta }
    }

    pub fn speed(&self) -> f64 {
        1.0 / self.q
    }
}

/// Road geometry at one station.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RoadSample {
    pub kappa: f64,
    /// Derivative of the centerline heading with respect to `s`.
    pub dpsi: f64,
}

impl RoadSample {
    pub fn with_curvature(kappa: f64) -> Self {
        Self { kappa, dpsi: kappa }
    }
}

/// Road samples at each grid station.
pub fn road_samples(c: &Centerline, grid: &SpatialGrid) -> Vec<RoadSample> {
    grid.stations()
        .iter()
        .map(|&s| RoadSample::with_curvature(c.curvature_at(s)))
        .collect()
}

/// `z_{j+1} = A z_j + B u_j + g` and `t_{j+1} = t_j + time_coeff * q_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineStageModel {
    pub a: [[f64; 2]; 2],
    /// Columns are `(q, delta)`.
    pub b: [[f64; 2]; 2],
    pub g: [f64; 2],
    /// Meters; multiplied by `q` (s/m) gives the interval duration.
    pub time_coeff: f64,
}

impl AffineStageModel {
    pub fn step(&self, z: [f64; 2], u: ControlSample) -> [f64; 2] {
        let mut out = self.g;
        for (r, o) in out.iter_mut().enumerate() {
            *o += self.a[r][0] * z[0]
                + self.a[r][1] * z[1]
                + self.b[r][0] * u.q
                + self.b[r][1] * u.delta;
        }
        out
    }
}

fn check_pole(z: SpatialState, kappa: f64, station: usize, guard: f64) -> Result<()> {
    if !(cos(z.e_psi) >= guard) {
        return Err(Error::Pole {
            station,
            detail: "cos(e_psi) below guard",
        });
    }
    if !(1.0 - kappa * z.e_y >= guard) {
        return Err(Error::Pole {
            station,
            detail: "1 - kappa e_y below guard",
        });
    }
    Ok(())
}

/// Right-hand side of the spatial dynamics, `dz/ds`.
pub fn spatial_dynamics(
    z: SpatialState,
    u: ControlSample,
    road: RoadSample,
    p: &VehicleParams,
) -> Result<[f64; 2]> {
    check_pole(z, road.kappa, 0, 0.0).map_err(|_| Error::Pole {
        station: 0,
        detail: "spatial dynamics pole",
    })?;
    let scale = 1.0 - road.kappa * z.e_y;
    Ok([
        scale * tan(u.delta) / (p.wheelbase * cos(z.e_psi)) - road.dpsi,
        scale * tan(z.e_psi),
    ])
}

/// Analytic Jacobians of the spatial dynamics: `(df/dz, df/du)` with
/// `u = (q, delta)`.
pub fn spatial_jacobians(
    z: SpatialState,
    u: ControlSample,
    road: RoadSample,
    p: &VehicleParams,
) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    let k = road.kappa;
    let scale = 1.0 - k * z.e_y;
    let (c, s) = (cos(z.e_psi), sin(z.e_psi));
    let td = tan(u.delta);
    let cd = cos(u.delta);
    let l = p.wheelbase;
    let a = [
        [scale * td * s / (l * c * c), -k * td / (l * c)],
        [scale / (c * c), -k * tan(z.e_psi)],
    ];
    let b = [[0.0, scale / (l * c * cd * cd)], [0.0, 0.0]];
    (a, b)
}

/// Interval duration coefficient `D (1 - kappa e_y_ref) / cos(e_psi_ref)`.
pub fn time_coefficient(step: f64, kappa: f64, e_y_ref: f64, e_psi_ref: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(invalid("interval length must be positive"));
    }
    check_pole(SpatialState::new(e_psi_ref, e_y_ref), kappa, 0, POLE_GUARD)?;
    Ok(step * (1.0 - kappa * e_y_ref) / cos(e_psi_ref))
}

/// Time coefficient for dynamic-model planning. It multiplies
/// `q_vx = 1/v_x`; the lateral body velocity `v_y` is left out so that
/// time stays strictly increasing.
pub fn time_coeff_dynamic(step: f64, kappa: f64, e_y_ref: f64, e_psi_ref: f64) -> Result<f64> {
    time_coefficient(step, kappa, e_y_ref, e_psi_ref)
}

/// Body-frame velocities of a dynamic bicycle model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicStateSample {
    pub v_x: f64,
    pub v_y: f64,
}

impl DynamicStateSample {
    pub fn q_vx(&self) -> Result<f64> {
        if !(self.v_x > 0.0) {
            return Err(invalid("longitudinal velocity must be positive"));
        }
        Ok(1.0 / self.v_x)
    }
}

/// Reference trajectories for linearization: `N + 1` states, `N` controls.
#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    pub states: Vec<SpatialState>,
    pub controls: Vec<ControlSample>,
}

/// Forward-Euler discretization of the Jacobian linearization about the
/// references, one stage per grid interval.
pub fn linearize_discretize(
    grid: &SpatialGrid,
    refs: &Reference,
    road: &[RoadSample],
    p: &VehicleParams,
) -> Result<Vec<AffineStageModel>> {
    let n = grid.intervals();
    if refs.states.len() != n + 1 || refs.controls.len() != n || road.len() != n + 1 {
        return Err(invalid("references and road samples must match the grid"));
    }
    let mut stages = Vec::with_capacity(n);
    for j in 0..n {
        let z = refs.states[j];
        let u = refs.controls[j];
        let rs = road[j];
        check_pole(z, rs.kappa, j, POLE_GUARD)?;
        let d = grid.step(j);
        let f = spatial_dynamics(z, u, rs, p)?;
        let (fz, fu) = spatial_jacobians(z, u, rs, p);
        let zr = z.as_array();
        let ur = [u.q, u.delta];
        let mut a = [[0.0; 2]; 2];
        let mut b = [[0.0; 2]; 2];
        let mut g = [0.0; 2];
        for r in 0..2 {
            for c in 0..2 {
                a[r][c] = if r == c { 1.0 } else { 0.0 } + d * fz[r][c];
                b[r][c] = d * fu[r][c];
            }
            g[r] = d
                * (f[r]
                    - fz[r][0] * zr[0]
                    - fz[r][1] * zr[1]
                    - fu[r][0] * ur[0]
                    - fu[r][1] * ur[1]);
        }
        let time_coeff = time_coefficient(d, rs.kappa, z.e_y, z.e_psi).map_err(|e| match e {
            Error::Pole { detail, .. } => Error::Pole { station: j, detail },
            e => e,
        })?;
        stages.push(AffineStageModel {
            a,
            b,
            g,
            time_coeff,
        });
    }
    Ok(stages)
}

/// First-order expansion of `D t'` in `(e_psi, e_y, v)` about a reference.
///
/// Kept to demonstrate that linearizing time directly in `v` can yield a
/// negative interval duration (for `v > 2 v_ref` at matched states).
pub fn naive_time_linearization(
    z_ref: SpatialState,
    v_ref: f64,
    z: SpatialState,
    v: f64,
    step: f64,
    kappa: f64,
) -> f64 {
    let scale = 1.0 - kappa * z_ref.e_y;
    let (c, s) = (cos(z_ref.e_psi), sin(z_ref.e_psi));
    let f_ref = scale / (v_ref * c);
    let d_epsi = scale * s / (v_ref * c * c);
    let d_ey = -kappa / (v_ref * c);
    let d_v = -scale / (v_ref * v_ref * c);
    step * (f_ref
        + d_epsi * (z.e_psi - z_ref.e_psi)
        + d_ey * (z.e_y - z_ref.e_y)
        + d_v * (v - v_ref))
}

/// Steering angle that holds a vehicle on a road of curvature `kappa`.
pub fn curvature_steering(kappa: f64, p: &VehicleParams) -> f64 {
    atan(p.wheelbase * kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p() -> VehicleParams {
        VehicleParams::default()
    }

    fn relative_error(a: f64, b: f64) -> f64 {
        (a - b).abs() / (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn equilibrium_on_straight_road() {
        let f = spatial_dynamics(
            SpatialState::default(),
            ControlSample::from_speed(10.0, 0.0),
            RoadSample::default(),
            &p(),
        )
        .unwrap();
        assert_eq!(f, [0.0, 0.0]);
    }

    #[test]
    fn curvature_matched_steering_holds_centerline() {
        let road = RoadSample::with_curvature(0.02);
        let delta = curvature_steering(0.02, &p());
        let f = spatial_dynamics(
            SpatialState::default(),
            ControlSample::from_speed(10.0, delta),
            road,
            &p(),
        )
        .unwrap();
        assert!(f[0].abs() < 1e-15 && f[1] == 0.0);
    }

    #[test]
    fn dynamics_independent_of_speed() {
        let z = SpatialState::new(0.1, -0.4);
        let road = RoadSample::with_curvature(0.013);
        let a = spatial_dynamics(z, ControlSample::from_speed(5.0, 0.05), road, &p()).unwrap();
        let b = spatial_dynamics(z, ControlSample::from_speed(50.0, 0.05), road, &p()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pole_is_a_domain_error() {
        let z = SpatialState::new(1.6, 0.0);
        assert!(spatial_dynamics(
            z,
            ControlSample::from_speed(5.0, 0.0),
            RoadSample::default(),
            &p()
        )
        .is_err());
        let z = SpatialState::new(0.0, 60.0);
        assert!(spatial_dynamics(
            z,
            ControlSample::from_speed(5.0, 0.0),
            RoadSample::with_curvature(0.02),
            &p()
        )
        .is_err());
    }

    fn central_difference(
        z: SpatialState,
        u: ControlSample,
        road: RoadSample,
    ) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
        let h = 1e-6;
        let f = |z: SpatialState, u: ControlSample| spatial_dynamics(z, u, road, &p()).unwrap();
        let mut a = [[0.0; 2]; 2];
        let mut b = [[0.0; 2]; 2];
        for c in 0..2 {
            let mut zp = z;
            let mut zm = z;
            if c == 0 {
                zp.e_psi += h;
                zm.e_psi -= h;
            } else {
                zp.e_y += h;
                zm.e_y -= h;
            }
            let (fp, fm) = (f(zp, u), f(zm, u));
            for r in 0..2 {
                a[r][c] = (fp[r] - fm[r]) / (2.0 * h);
            }
            let mut up = u;
            let mut um = u;
            if c == 0 {
                up.q += h;
                um.q -= h;
            } else {
                up.delta += h;
                um.delta -= h;
            }
            let (fp, fm) = (f(z, up), f(z, um));
            for r in 0..2 {
                b[r][c] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        (a, b)
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let z = SpatialState::new(rng.gen_range(-0.6..0.6), rng.gen_range(-3.0..3.0));
            let u = ControlSample::from_speed(rng.gen_range(2.0..40.0), rng.gen_range(-0.45..0.45));
            let road = RoadSample::with_curvature(rng.gen_range(-0.05..0.05));
            let (a, b) = spatial_jacobians(z, u, road, &p());
            let (an, bn) = central_difference(z, u, road);
            for r in 0..2 {
                for c in 0..2 {
                    assert!(relative_error(a[r][c], an[r][c]) < 1e-5);
                    assert!(relative_error(b[r][c], bn[r][c]) < 1e-5);
                }
            }
        }
    }

    fn zero_refs(n: usize, q: f64) -> Reference {
        Reference {
            states: vec![SpatialState::default(); n + 1],
            controls: vec![ControlSample { q, delta: 0.0 }; n],
        }
    }

    #[test]
    fn straight_road_stage_matrices() {
        let grid = SpatialGrid::from_stations(vec![0.0, 5.0, 7.0]).unwrap();
        let road = vec![RoadSample::default(); 3];
        let stages = linearize_discretize(&grid, &zero_refs(2, 0.05), &road, &p()).unwrap();
        for (j, st) in stages.iter().enumerate() {
            let d = grid.step(j);
            assert_eq!(st.a, [[1.0, 0.0], [d, 1.0]]);
            assert_eq!(st.b[0][1], d / p().wheelbase);
            assert_eq!(st.b[0][0], 0.0);
            assert_eq!(st.b[1], [0.0, 0.0]);
            assert_eq!(st.g, [0.0, 0.0]);
            assert_eq!(st.time_coeff, d);
        }
        assert!((stages[0].time_coeff * 0.05 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn time_coefficient_values() {
        assert!((time_coefficient(5.0, 0.01, 1.0, 0.0).unwrap() - 4.95).abs() < 1e-12);
        assert_eq!(time_coeff_dynamic(2.0, 0.0, 0.0, 0.0).unwrap(), 2.0);
        let v = time_coeff_dynamic(1.0, 0.02, -2.0, 0.1).unwrap();
        assert!((v - 1.04 / 0.1f64.cos()).abs() < 1e-12);
        assert!((v - 1.04522).abs() < 1e-5);
        assert_eq!(
            time_coeff_dynamic(3.0, 0.01, 0.5, -0.2).unwrap(),
            time_coefficient(3.0, 0.01, 0.5, -0.2).unwrap()
        );
    }

    #[test]
    fn pole_guard_names_station() {
        let grid = SpatialGrid::from_stations(vec![0.0, 1.0, 2.0]).unwrap();
        let mut refs = zero_refs(2, 0.1);
        refs.states[1].e_psi = 1.55;
        let err =
            linearize_discretize(&grid, &refs, &[RoadSample::default(); 3], &p()).unwrap_err();
        assert_eq!(
            err,
            Error::Pole {
                station: 1,
                detail: "cos(e_psi) below guard"
            }
        );
    }

    #[test]
    fn naive_time_linearization_goes_negative() {
        let z = SpatialState::default();
        let v_ref = 10.0;
        assert!((naive_time_linearization(z, v_ref, z, v_ref, 5.0, 0.0) - 0.5).abs() < 1e-15);
        let dt = naive_time_linearization(z, v_ref, z, 2.5 * v_ref, 5.0, 0.0);
        assert!((dt - 0.5 * (2.0 - 2.5)).abs() < 1e-15);
        assert!(dt < 0.0);
        assert_eq!(
            naive_time_linearization(z, v_ref, z, 2.0 * v_ref, 5.0, 0.0),
            0.0
        );
        // the q-transformed coefficient stays positive for the same inputs
        assert!(time_coefficient(5.0, 0.0, 0.0, 0.0).unwrap() * (1.0 / (2.5 * v_ref)) > 0.0);
    }

    #[test]
    fn euler_single_step_defect_is_second_order() {
        // one step from the centerline on a constant-curvature road with a
        // mismatched steering angle, compared against a fine integration
        let road = RoadSample::with_curvature(0.02);
        let u = ControlSample::from_speed(10.0, 0.08);
        let pp = p();
        let exact = |d: f64| {
            let mut z = SpatialState::default();
            let n = 20_000;
            let h = d / n as f64;
            for _ in 0..n {
                let k1 = spatial_dynamics(z, u, road, &pp).unwrap();
                let zm = SpatialState::new(z.e_psi + 0.5 * h * k1[0], z.e_y + 0.5 * h * k1[1]);
                let k2 = spatial_dynamics(zm, u, road, &pp).unwrap();
                z = SpatialState::new(z.e_psi + h * k2[0], z.e_y + h * k2[1]);
            }
            z
        };
        let defect = |d: f64| {
            let grid = SpatialGrid::from_stations(vec![0.0, d]).unwrap();
            let refs = Reference {
                states: vec![SpatialState::default(); 2],
                controls: vec![u],
            };
            let st = linearize_discretize(&grid, &refs, &[road; 2], &pp).unwrap()[0];
            let z1 = st.step([0.0, 0.0], u);
            let e = exact(d);
            (z1[0] - e.e_psi).abs().max((z1[1] - e.e_y).abs())
        };
        for d in [4.0, 2.0, 1.0] {
            assert!(defect(d) / defect(d / 2.0) >= 3.5);
        }
    }
}
