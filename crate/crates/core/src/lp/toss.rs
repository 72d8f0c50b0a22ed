//! The planning LP in condensed control space.
//!
//! Variables are `q_0..q_{N-1}`, `delta_0..delta_{N-1}`, two epigraph
//! scalars bounding `max |delta|` and `max |delta_{j+1} - delta_j|`, and
//! four slacks (terminal heading, terminal offset, corridor, waypoint
//! times). States are eliminated through the stage recursion and the
//! final time `t_N = tau + sum c_j q_j` goes straight into the cost.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{LinearProgram, LpSolution, LpStatus};
use crate::constraints::{CorridorRow, RateRows, WaypointRow};
use crate::error::{invalid, Error, Result};
use crate::geometry::SpatialGrid;
use crate::math::{abs, cos};
use crate::model::{AffineStageModel, ControlSample, Reference, RoadSample, SpatialState};

const INF: f64 = f64::INFINITY;

/// Cost knobs. The defaults give every term of the objective unit weight
/// and the slacks weight `1e4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpOptions {
    pub slack_weight: f64,
    pub time_weight: f64,
    pub steer_weight: f64,
    pub steer_rate_weight: f64,
    /// Include the two minmax steering terms. Off gives a minimum-time
    /// plan.
    pub minmax: bool,
    /// Weight of the total steering variation `sum |delta_{j+1} - delta_j|`.
    /// Zero (the default) leaves the term and its variables out.
    pub steer_variation_weight: f64,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            slack_weight: 1e4,
            time_weight: 1.0,
            steer_weight: 1.0,
            steer_rate_weight: 1.0,
            minmax: true,
            steer_variation_weight: 0.0,
        }
    }
}

/// Variable indices for an `N`-interval plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarLayout {
    pub intervals: usize,
}

impl VarLayout {
    pub fn q(&self, j: usize) -> usize {
        j
    }
    pub fn delta(&self, j: usize) -> usize {
        self.intervals + j
    }
    pub fn gamma_steer(&self) -> usize {
        2 * self.intervals
    }
    pub fn gamma_rate(&self) -> usize {
        2 * self.intervals + 1
    }
    /// Slack `i` in `0..4`: terminal heading, terminal offset, corridor,
    /// waypoint times.
    pub fn sigma(&self, i: usize) -> usize {
        2 * self.intervals + 2 + i
    }
    pub fn len(&self) -> usize {
        2 * self.intervals + 6
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Epigraph variable of `|delta_{j+1} - delta_j|`, present only with a
    /// positive variation weight.
    pub fn variation(&self, j: usize) -> usize {
        self.len() + j
    }
}

/// Everything the planning LP is built from.
#[derive(Clone, Copy, Debug)]
pub struct TossProblem<'a> {
    pub grid: &'a SpatialGrid,
    pub stages: &'a [AffineStageModel],
    pub road: &'a [RoadSample],
    pub z0: SpatialState,
    /// Planning time `tau` (s).
    pub tau: f64,
    pub rates: &'a RateRows,
    pub corridor: &'a [CorridorRow],
    pub waypoints: &'a [WaypointRow],
    /// Target state at the end of the horizon.
    pub terminal: SpatialState,
    pub v_min: f64,
    pub v_max: f64,
    pub steer_min: f64,
    pub steer_max: f64,
    /// Extra lower bounds on `q_j` (friction speed caps).
    pub q_lower: Option<&'a [f64]>,
    /// Starting controls for the solver.
    pub start: Option<&'a [ControlSample]>,
    pub options: LpOptions,
}

/// States as affine functions of the controls:
/// `z_j[c] = constant[j][c] + sum_v coeff[j][c][v] x_v` over LP variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Condensed {
    pub constant: Vec<[f64; 2]>,
    pub coeff: Vec<[Vec<f64>; 2]>,
}

impl Condensed {
    pub fn eval(&self, j: usize, x: &[f64]) -> [f64; 2] {
        let mut out = self.constant[j];
        for (c, o) in out.iter_mut().enumerate() {
            *o += self.coeff[j][c]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum::<f64>();
        }
        out
    }

    fn row(&self, j: usize, c: usize) -> Vec<(usize, f64)> {
        self.coeff[j][c]
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0.0)
            .map(|(v, &a)| (v, a))
            .collect()
    }
}

/// Eliminates the states through `z_{j+1} = A_j z_j + B_j u_j + g_j`.
pub fn condense(stages: &[AffineStageModel], z0: SpatialState) -> Condensed {
    let n = stages.len();
    let layout = VarLayout { intervals: n };
    let nv = layout.len();
    let mut constant = vec![z0.as_array()];
    let mut coeff = vec![[vec![0.0; nv], vec![0.0; nv]]];
    for (j, st) in stages.iter().enumerate() {
        let (c0, k0) = (constant[j], &coeff[j]);
        let mut c1 = st.g;
        let mut k1 = [vec![0.0; nv], vec![0.0; nv]];
        for r in 0..2 {
            c1[r] += st.a[r][0] * c0[0] + st.a[r][1] * c0[1];
            for k in 0..j {
                for v in [layout.q(k), layout.delta(k)] {
                    k1[r][v] = st.a[r][0] * k0[0][v] + st.a[r][1] * k0[1][v];
                }
            }
            k1[r][layout.q(j)] = st.b[r][0];
            k1[r][layout.delta(j)] = st.b[r][1];
        }
        constant.push(c1);
        coeff.push(k1);
    }
    Condensed { constant, coeff }
}

fn with(mut coeffs: Vec<(usize, f64)>, var: usize, a: f64) -> Vec<(usize, f64)> {
    coeffs.push((var, a));
    coeffs
}

/// Builds the planning LP.
pub fn assemble(pb: &TossProblem<'_>) -> Result<(LinearProgram, VarLayout)> {
    let n = pb.grid.intervals();
    if n < 2 {
        return Err(invalid("the plan needs at least two intervals"));
    }
    if pb.stages.len() != n || pb.road.len() != n + 1 || pb.rates.rows.len() != n - 1 {
        return Err(invalid("stage, road and rate data must match the grid"));
    }
    if !(pb.v_min > 0.0) {
        return Err(invalid(
            "v_min must be positive for the q = 1/v substitution",
        ));
    }
    if !(pb.v_max > pb.v_min) {
        return Err(invalid("v_max must exceed v_min"));
    }
    if pb.q_lower.is_some_and(|q| q.len() != n) {
        return Err(invalid("one friction bound per interval required"));
    }
    let layout = VarLayout { intervals: n };
    let o = pb.options;
    let mut lp = LinearProgram::new();
    let (q_min, q_max) = (1.0 / pb.v_max, 1.0 / pb.v_min);
    for j in 0..n {
        let lo = pb.q_lower.map_or(q_min, |ql| ql[j].max(q_min)).min(q_max);
        lp.add_var(
            format!("q_{j}"),
            o.time_weight * pb.stages[j].time_coeff,
            lo,
            q_max,
        );
    }
    for j in 0..n {
        lp.add_var(format!("delta_{j}"), 0.0, pb.steer_min, pb.steer_max);
    }
    let g_hi = if o.minmax { INF } else { 0.0 };
    lp.add_var("gamma_steer", o.steer_weight, 0.0, g_hi);
    lp.add_var("gamma_rate", o.steer_rate_weight, 0.0, g_hi);
    for name in ["sigma_term_psi", "sigma_term_ey", "sigma_corridor"] {
        lp.add_var(name, o.slack_weight, 0.0, INF);
    }
    let wp_hi = if pb.waypoints.is_empty() { 0.0 } else { INF };
    lp.add_var("sigma_waypoint", o.slack_weight, 0.0, wp_hi);
    let variation = o.steer_variation_weight > 0.0;
    if variation {
        for j in 0..n - 1 {
            lp.add_var(format!("var_d_{j}"), o.steer_variation_weight, 0.0, INF);
        }
    }
    lp.offset = o.time_weight * pb.tau;

    let cz = condense(pb.stages, pb.z0);
    let (s1, s2, s3, s4) = (
        layout.sigma(0),
        layout.sigma(1),
        layout.sigma(2),
        layout.sigma(3),
    );

    // terminal state
    for (c, sig, target, tag) in [
        (0, s1, pb.terminal.e_psi, "psi"),
        (1, s2, pb.terminal.e_y, "ey"),
    ] {
        let k = cz.constant[n][c];
        let row = cz.row(n, c);
        lp.add_row(
            format!("term_{tag}_hi"),
            with(row.clone(), sig, -1.0),
            -INF,
            target - k,
        );
        lp.add_row(
            format!("term_{tag}_lo"),
            with(row, sig, 1.0),
            target - k,
            INF,
        );
    }
    // corridor
    for r in pb.corridor {
        let j = r.station;
        if j == 0 || j > n {
            return Err(invalid("corridor rows must refer to stations 1..N"));
        }
        let k = cz.constant[j][1];
        let row = cz.row(j, 1);
        lp.add_row(
            format!("corr_hi_{j}"),
            with(row.clone(), s3, -1.0),
            -INF,
            r.upper - k,
        );
        lp.add_row(format!("corr_lo_{j}"), with(row, s3, 1.0), r.lower - k, INF);
    }
    // waypoints
    for w in pb.waypoints {
        let j = w.station;
        if j == 0 || j > n {
            return Err(invalid("waypoint rows must refer to stations 1..N"));
        }
        let row: Vec<(usize, f64)> = (0..j)
            .map(|k| (layout.q(k), pb.stages[k].time_coeff))
            .collect();
        let dt = w.time - pb.tau;
        lp.add_row(format!("wp_hi_{j}"), with(row.clone(), s4, -1.0), -INF, dt);
        lp.add_row(format!("wp_lo_{j}"), with(row, s4, 1.0), dt, INF);
        if let Some(b) = w.state_box {
            for (c, (lo, hi), tag) in [(0, b.e_psi, "psi"), (1, b.e_y, "ey")] {
                if lo.is_finite() || hi.is_finite() {
                    let k = cz.constant[j][c];
                    lp.add_row(format!("wp_box_{tag}_{j}"), cz.row(j, c), lo - k, hi - k);
                }
            }
        }
    }
    // rates
    let ini = pb.rates.initial;
    lp.add_row(
        "rate_v_init",
        vec![(layout.q(0), ini.b_cur)],
        ini.c_min,
        ini.c_max,
    );
    lp.add_row(
        "rate_d_init",
        vec![(layout.delta(0), 1.0)],
        ini.steer_min,
        ini.steer_max,
    );
    for r in &pb.rates.rows {
        let j = r.station;
        lp.add_row(
            format!("rate_v_{j}"),
            vec![(layout.q(j + 1), r.b_next), (layout.q(j), r.b_cur)],
            r.c_min,
            r.c_max,
        );
        lp.add_row(
            format!("rate_d_{j}"),
            vec![(layout.delta(j + 1), 1.0), (layout.delta(j), -1.0)],
            r.steer_min,
            r.steer_max,
        );
    }
    // epigraphs
    if o.minmax {
        let (g1, g2) = (layout.gamma_steer(), layout.gamma_rate());
        for j in 0..n {
            let d = layout.delta(j);
            lp.add_row(
                format!("epi_d_hi_{j}"),
                vec![(d, 1.0), (g1, -1.0)],
                -INF,
                0.0,
            );
            lp.add_row(format!("epi_d_lo_{j}"), vec![(d, 1.0), (g1, 1.0)], 0.0, INF);
        }
        for j in 0..n - 1 {
            let (d0, d1) = (layout.delta(j), layout.delta(j + 1));
            lp.add_row(
                format!("epi_r_hi_{j}"),
                vec![(d1, 1.0), (d0, -1.0), (g2, -1.0)],
                -INF,
                0.0,
            );
            lp.add_row(
                format!("epi_r_lo_{j}"),
                vec![(d1, 1.0), (d0, -1.0), (g2, 1.0)],
                0.0,
                INF,
            );
        }
    }
    if variation {
        for j in 0..n - 1 {
            let (d0, d1, w) = (layout.delta(j), layout.delta(j + 1), layout.variation(j));
            lp.add_row(
                format!("var_hi_{j}"),
                vec![(d1, 1.0), (d0, -1.0), (w, -1.0)],
                -INF,
                0.0,
            );
            lp.add_row(
                format!("var_lo_{j}"),
                vec![(d1, 1.0), (d0, -1.0), (w, 1.0)],
                0.0,
                INF,
            );
        }
    }

    if let Some(u) = pb.start {
        if u.len() == n {
            lp.start = Some(start_point(&lp, &layout, &cz, pb, u));
        }
    }
    Ok((lp, layout))
}

/// Starting point built from reference controls: slacks and epigraph
/// variables large enough that only the rate rows can be violated.
fn start_point(
    lp: &LinearProgram,
    layout: &VarLayout,
    cz: &Condensed,
    pb: &TossProblem<'_>,
    u: &[ControlSample],
) -> Vec<f64> {
    let n = layout.intervals;
    let mut x = vec![0.0; lp.lower.len()];
    for j in 0..n {
        x[layout.q(j)] = u[j].q.max(lp.lower[layout.q(j)]).min(lp.upper[layout.q(j)]);
        x[layout.delta(j)] = u[j].delta.max(pb.steer_min).min(pb.steer_max);
    }
    if pb.options.minmax {
        x[layout.gamma_steer()] = (0..n).map(|j| abs(x[layout.delta(j)])).fold(0.0, f64::max);
        x[layout.gamma_rate()] = (0..n - 1)
            .map(|j| abs(x[layout.delta(j + 1)] - x[layout.delta(j)]))
            .fold(0.0, f64::max);
    }
    if pb.options.steer_variation_weight > 0.0 {
        for j in 0..n - 1 {
            x[layout.variation(j)] = abs(x[layout.delta(j + 1)] - x[layout.delta(j)]);
        }
    }
    let zn = cz.eval(n, &x);
    x[layout.sigma(0)] = abs(zn[0] - pb.terminal.e_psi);
    x[layout.sigma(1)] = abs(zn[1] - pb.terminal.e_y);
    x[layout.sigma(2)] = pb
        .corridor
        .iter()
        .map(|r| {
            let ey = cz.eval(r.station, &x)[1];
            (r.lower - ey).max(ey - r.upper)
        })
        .fold(0.0, f64::max);
    if !pb.waypoints.is_empty() {
        x[layout.sigma(3)] = pb
            .waypoints
            .iter()
            .map(|w| {
                let t = pb.tau
                    + (0..w.station)
                        .map(|k| pb.stages[k].time_coeff * x[layout.q(k)])
                        .sum::<f64>();
                abs(t - w.time)
            })
            .fold(0.0, f64::max);
    }
    x
}

/// Contributions to the optimal cost.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ObjectiveBreakdown {
    /// `t_N` as seen by the LP (includes `tau`).
    pub time: f64,
    pub steer: f64,
    pub steer_rate: f64,
    pub slack: f64,
    pub total: f64,
}

/// A planned trajectory on the spatial grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialTrajectory {
    pub stations: Vec<f64>,
    pub e_psi: Vec<f64>,
    pub e_y: Vec<f64>,
    /// One control per interval.
    pub q: Vec<f64>,
    pub delta: Vec<f64>,
    pub speed: Vec<f64>,
    pub time: Vec<f64>,
    /// Terminal heading, terminal offset, corridor and waypoint slacks.
    pub slacks: [f64; 4],
    /// Epigraph values for `max |delta|` and `max |delta_{j+1} - delta_j|`.
    pub gamma: [f64; 2],
    pub objective: ObjectiveBreakdown,
    /// Traveled path length `eta` (m).
    pub path_length: f64,
    pub lp_iterations: usize,
    pub max_violation: f64,
}

impl SpatialTrajectory {
    pub fn intervals(&self) -> usize {
        self.q.len()
    }

    pub fn traversal_time(&self) -> f64 {
        self.time[self.time.len() - 1] - self.time[0]
    }

    pub fn states(&self) -> Vec<SpatialState> {
        self.e_psi
            .iter()
            .zip(&self.e_y)
            .map(|(&p, &y)| SpatialState::new(p, y))
            .collect()
    }

    pub fn controls(&self) -> Vec<ControlSample> {
        self.q
            .iter()
            .zip(&self.delta)
            .map(|(&q, &delta)| ControlSample { q, delta })
            .collect()
    }

    pub fn as_reference(&self) -> Reference {
        Reference {
            states: self.states(),
            controls: self.controls(),
        }
    }

    pub fn max_slack(&self) -> f64 {
        self.slacks.iter().copied().fold(0.0, f64::max)
    }
}

/// Rebuilds states and times from an optimal LP solution.
pub fn extract_trajectory(
    pb: &TossProblem<'_>,
    layout: &VarLayout,
    sol: &LpSolution,
    pass: u8,
) -> Result<SpatialTrajectory> {
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp {
            pass,
            status: sol.status,
            row_hint: sol.row_hint,
            row: None,
        });
    }
    let n = layout.intervals;
    let x = &sol.x;
    let q: Vec<f64> = (0..n).map(|j| x[layout.q(j)]).collect();
    let delta: Vec<f64> = (0..n).map(|j| x[layout.delta(j)]).collect();
    let mut z = pb.z0.as_array();
    let mut t = pb.tau;
    let (mut e_psi, mut e_y, mut time) = (vec![z[0]], vec![z[1]], vec![t]);
    let mut eta = 0.0;
    for (j, st) in pb.stages.iter().enumerate() {
        eta += pb.grid.step(j) * (1.0 - pb.road[j].kappa * z[1]) / cos(z[0]);
        z = st.step(
            z,
            ControlSample {
                q: q[j],
                delta: delta[j],
            },
        );
        t += st.time_coeff * q[j];
        e_psi.push(z[0]);
        e_y.push(z[1]);
        time.push(t);
    }
    let slacks = [
        x[layout.sigma(0)],
        x[layout.sigma(1)],
        x[layout.sigma(2)],
        x[layout.sigma(3)],
    ];
    let gamma = [x[layout.gamma_steer()], x[layout.gamma_rate()]];
    let o = pb.options;
    let objective = ObjectiveBreakdown {
        time: t,
        steer: o.steer_weight * gamma[0],
        steer_rate: o.steer_rate_weight * gamma[1],
        slack: o.slack_weight * slacks.iter().sum::<f64>(),
        total: sol.objective,
    };
    Ok(SpatialTrajectory {
        stations: pb.grid.stations().to_vec(),
        e_psi,
        e_y,
        speed: q.iter().map(|q| 1.0 / q).collect(),
        q,
        delta,
        time,
        slacks,
        gamma,
        objective,
        path_length: eta,
        lp_iterations: sol.iterations,
        max_violation: sol.max_violation,
    })
}
