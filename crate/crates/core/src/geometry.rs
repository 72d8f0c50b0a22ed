//! Road centerline, road-aligned coordinates, spatial grid and obstacle
//! mapping.
//!
//! The centerline is a piecewise-affine polyline resampled at (nearly)
//! uniform arc length. Curvature is stored per vertex as `kappa` (left
//! turns positive) so that straight roads never need an infinite radius;
//! every `(rho - e_y) / rho` factor elsewhere is written `1 - kappa * e_y`.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math::{abs, atan2, ceil, cos, hypot, sin, sqrt, wrap_angle};

/// Tolerance for merging grid stations.
pub const STATION_MERGE_TOL: f64 = 1e-6;

const MIN_SEGMENT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    fn norm(self) -> f64 {
        hypot(self.x, self.y)
    }
}

/// Position in the road-aligned frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrenetPose {
    pub s: f64,
    pub e_y: f64,
    pub e_psi: f64,
}

/// Arc-length parameterized polyline with per-vertex heading and curvature.
#[derive(Clone, Debug)]
pub struct Centerline {
    vertices: Vec<Point2>,
    arc: Vec<f64>,
    /// Heading of the segment leaving each vertex (last vertex: incoming),
    /// unwrapped so consecutive values differ by less than pi.
    heading: Vec<f64>,
    curvature: Vec<f64>,
}

impl Centerline {
    /// Builds a centerline from ordered points, resampled at spacing no
    /// larger than `resample_step`.
    pub fn new(points: &[Point2], resample_step: f64) -> Result<Self> {
        if !(resample_step > 0.0) || !resample_step.is_finite() {
            return Err(invalid("resample step must be positive"));
        }
        let mut pts: Vec<Point2> = Vec::with_capacity(points.len());
        for &p in points {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(invalid("centerline points must be finite"));
            }
            match pts.last() {
                Some(&last) if p.sub(last).norm() <= MIN_SEGMENT => {}
                _ => pts.push(p),
            }
        }
        if pts.len() < 2 {
            return Err(invalid("centerline needs at least 2 distinct points"));
        }

        let mut cum = Vec::with_capacity(pts.len());
        cum.push(0.0);
        for w in pts.windows(2) {
            let last = *cum.last().unwrap();
            cum.push(last + w[1].sub(w[0]).norm());
        }
        let total = *cum.last().unwrap();
        let n = (ceil(total / resample_step - 1e-9) as usize).max(1);
        let spacing = total / n as f64;

        let mut vertices = Vec::with_capacity(n + 1);
        let mut seg = 0;
        for k in 0..=n {
            let s = if k == n { total } else { k as f64 * spacing };
            while seg + 2 < cum.len() && cum[seg + 1] < s {
                seg += 1;
            }
            let len = cum[seg + 1] - cum[seg];
            let t = ((s - cum[seg]) / len).clamp(0.0, 1.0);
            let a = pts[seg];
            let b = pts[seg + 1];
            vertices.push(Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
        Self::from_vertices(vertices)
    }

    /// Uses the vertices as given, without resampling.
    pub fn from_vertices(mut vertices: Vec<Point2>) -> Result<Self> {
        vertices.dedup_by(|b, a| b.sub(*a).norm() <= MIN_SEGMENT);
        if vertices.len() < 2 {
            return Err(invalid("centerline needs at least 2 distinct points"));
        }
        let n = vertices.len();
        let mut arc = Vec::with_capacity(n);
        arc.push(0.0);
        for w in vertices.windows(2) {
            let last = *arc.last().unwrap();
            arc.push(last + w[1].sub(w[0]).norm());
        }

        let mut heading = Vec::with_capacity(n);
        for i in 0..n - 1 {
            let d = vertices[i + 1].sub(vertices[i]);
            let raw = atan2(d.y, d.x);
            let h = match heading.last() {
                Some(&prev) => prev + wrap_angle(raw - prev),
                None => raw,
            };
            heading.push(h);
        }
        heading.push(heading[n - 2]);

        let mut curvature = alloc::vec![0.0; n];
        for i in 1..n - 1 {
            curvature[i] = three_point_curvature(vertices[i - 1], vertices[i], vertices[i + 1]);
        }
        if n > 2 {
            curvature[0] = curvature[1];
            curvature[n - 1] = curvature[n - 2];
        }
        Ok(Self {
            vertices,
            arc,
            heading,
            curvature,
        })
    }

    pub fn length(&self) -> f64 {
        *self.arc.last().unwrap()
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn arc_lengths(&self) -> &[f64] {
        &self.arc
    }

    pub fn vertex_headings(&self) -> &[f64] {
        &self.heading
    }

    pub fn vertex_curvatures(&self) -> &[f64] {
        &self.curvature
    }

    /// Index of the segment containing `s` (clamped to the valid range).
    fn segment_at(&self, s: f64) -> usize {
        let last = self.vertices.len() - 2;
        match self.arc.binary_search_by(|a| a.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(last),
            Err(i) => i.saturating_sub(1).min(last),
        }
    }

    fn check_station(&self, s: f64) -> Result<f64> {
        let tol = 1e-9 * (1.0 + self.length());
        if !s.is_finite() || s < -tol || s > self.length() + tol {
            return Err(Error::OutOfDomain {
                what: "station s",
                value: s,
            });
        }
        Ok(s.clamp(0.0, self.length()))
    }

    /// Curvature at `s`, linearly interpolated between vertices.
    pub fn curvature_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.length());
        let i = self.segment_at(s);
        let t = (s - self.arc[i]) / (self.arc[i + 1] - self.arc[i]);
        self.curvature[i] + t.clamp(0.0, 1.0) * (self.curvature[i + 1] - self.curvature[i])
    }

    /// Tangent heading of the segment containing `s`.
    pub fn heading_at(&self, s: f64) -> f64 {
        self.heading[self.segment_at(s.clamp(0.0, self.length()))]
    }

    /// Point on the centerline at arc length `s`.
    pub fn point_at(&self, s: f64) -> Result<Point2> {
        let s = self.check_station(s)?;
        let i = self.segment_at(s);
        let (a, b) = (self.vertices[i], self.vertices[i + 1]);
        let t = (s - self.arc[i]) / (self.arc[i + 1] - self.arc[i]);
        Ok(Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
    }

    /// Maps a road-aligned pose to a global position and heading.
    pub fn frenet_to_global(&self, s: f64, e_y: f64, e_psi: f64) -> Result<(Point2, f64)> {
        let p = self.point_at(s)?;
        let h = self.heading_at(s);
        let (sn, cs) = (sin(h), cos(h));
        Ok((Point2::new(p.x - e_y * sn, p.y + e_y * cs), h + e_psi))
    }

    /// Projects a global pose onto the centerline.
    ///
    /// The closest segment wins; ties go to the smallest `s`. Points beyond
    /// the ends are clamped to the end stations unless they lie farther
    /// away than the whole centerline length.
    pub fn global_to_frenet(&self, p: Point2, psi: f64) -> Result<FrenetPose> {
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(Error::OutOfDomain {
                what: "point",
                value: f64::NAN,
            });
        }
        let mut best: Option<(f64, usize, f64)> = None;
        for i in 0..self.vertices.len() - 1 {
            let a = self.vertices[i];
            let d = self.vertices[i + 1].sub(a);
            let len2 = d.dot(d);
            let t = (p.sub(a).dot(d) / len2).clamp(0.0, 1.0);
            let foot = Point2::new(a.x + t * d.x, a.y + t * d.y);
            let dist2 = p.sub(foot).dot(p.sub(foot));
            match best {
                Some((b, _, _)) if dist2 >= b - 1e-12 * (1.0 + b) => {}
                _ => best = Some((dist2, i, t)),
            }
        }
        let (dist2, i, t) = best.unwrap();
        if dist2 > self.length() * self.length() && (t <= 0.0 || t >= 1.0) {
            return Err(Error::OutOfDomain {
                what: "distance to centerline",
                value: sqrt(dist2),
            });
        }
        let a = self.vertices[i];
        let d = self.vertices[i + 1].sub(a);
        let len = d.norm();
        let s = self.arc[i] + t * len;
        let tangent = Point2::new(d.x / len, d.y / len);
        let foot = Point2::new(a.x + t * d.x, a.y + t * d.y);
        let e_y = tangent.cross(p.sub(foot));
        let e_psi = wrap_angle(psi - self.heading[i]);
        Ok(FrenetPose { s, e_y, e_psi })
    }
}

/// Signed curvature of the circle through three points, positive for a
/// left (counterclockwise) turn.
pub fn three_point_curvature(a: Point2, b: Point2, c: Point2) -> f64 {
    let ab = b.sub(a);
    let bc = c.sub(b);
    let ac = c.sub(a);
    let denom = ab.norm() * bc.norm() * ac.norm();
    if denom <= 0.0 {
        return 0.0;
    }
    2.0 * ab.cross(bc) / denom
}

/// Lateral bounds over a range of stations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundPiece {
    /// First station this piece applies to.
    pub s_start: f64,
    pub e_y_min: f64,
    pub e_y_max: f64,
}

/// Centerline plus lateral bounds and speed limits.
#[derive(Clone, Debug)]
pub struct RoadCorridor {
    pub centerline: Centerline,
    /// Sorted by `s_start`; the first piece covers everything before it.
    pieces: Vec<BoundPiece>,
    pub v_min: f64,
    pub v_max: f64,
}

impl RoadCorridor {
    pub fn new(
        centerline: Centerline,
        mut pieces: Vec<BoundPiece>,
        v_min: f64,
        v_max: f64,
    ) -> Result<Self> {
        if pieces.is_empty() {
            return Err(invalid("corridor needs at least one bound piece"));
        }
        pieces.sort_by(|a, b| a.s_start.partial_cmp(&b.s_start).unwrap());
        for p in &pieces {
            if !(p.e_y_min < p.e_y_max) {
                return Err(invalid("corridor bounds must satisfy e_y_min < e_y_max"));
            }
        }
        if !(v_min >= 0.0 && v_min < v_max) {
            return Err(invalid("speed limits must satisfy 0 <= v_min < v_max"));
        }
        Ok(Self {
            centerline,
            pieces,
            v_min,
            v_max,
        })
    }

    pub fn uniform(
        centerline: Centerline,
        e_y_min: f64,
        e_y_max: f64,
        v_min: f64,
        v_max: f64,
    ) -> Result<Self> {
        Self::new(
            centerline,
            alloc::vec![BoundPiece {
                s_start: 0.0,
                e_y_min,
                e_y_max
            }],
            v_min,
            v_max,
        )
    }

    /// `(e_y_min, e_y_max)` at station `s`.
    pub fn bounds_at(&self, s: f64) -> (f64, f64) {
        let mut cur = self.pieces[0];
        for p in &self.pieces[1..] {
            if p.s_start <= s + STATION_MERGE_TOL {
                cur = *p;
            } else {
                break;
            }
        }
        (cur.e_y_min, cur.e_y_max)
    }

    pub fn pieces(&self) -> &[BoundPiece] {
        &self.pieces
    }
}

/// Rectangle footprint of an obstacle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Footprint {
    /// Axis-aligned box in the road-aligned frame.
    Frenet {
        s_min: f64,
        s_max: f64,
        e_y_min: f64,
        e_y_max: f64,
    },
    /// Oriented box in the global frame.
    Global {
        center: Point2,
        heading: f64,
        length: f64,
        width: f64,
    },
}

/// Which side of an obstacle the ego vehicle passes on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PassSide {
    /// Pass with the obstacle on the right (tightens `e_y_min`).
    Left,
    /// Pass with the obstacle on the left (tightens `e_y_max`).
    Right,
    /// Side with the larger remaining free width.
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObstacleBox {
    pub footprint: Footprint,
    /// Safety inflation added on every side (m).
    pub inflation: f64,
    /// Speed along `s` for moving obstacles (m/s).
    pub velocity: f64,
    pub side: PassSide,
}

/// Inflated obstacle rectangle in the road-aligned frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrenetRect {
    pub s_min: f64,
    pub s_max: f64,
    pub e_y_min: f64,
    pub e_y_max: f64,
}

impl ObstacleBox {
    pub fn frenet(s_min: f64, s_max: f64, e_y_min: f64, e_y_max: f64) -> Self {
        Self {
            footprint: Footprint::Frenet {
                s_min,
                s_max,
                e_y_min,
                e_y_max,
            },
            inflation: 0.0,
            velocity: 0.0,
            side: PassSide::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inflation >= 0.0) {
            return Err(invalid("obstacle inflation must be nonnegative"));
        }
        let positive = match self.footprint {
            Footprint::Frenet {
                s_min,
                s_max,
                e_y_min,
                e_y_max,
            } => s_max > s_min && e_y_max > e_y_min,
            Footprint::Global { length, width, .. } => length > 0.0 && width > 0.0,
        };
        if !positive {
            return Err(invalid("obstacle rectangle must have positive area"));
        }
        Ok(())
    }

    /// Inflated footprint at planning time, as a road-aligned box.
    pub fn inflated(&self, c: &Centerline) -> Result<FrenetRect> {
        self.validate()?;
        let r = match self.footprint {
            Footprint::Frenet {
                s_min,
                s_max,
                e_y_min,
                e_y_max,
            } => FrenetRect {
                s_min,
                s_max,
                e_y_min,
                e_y_max,
            },
            Footprint::Global {
                center,
                heading,
                length,
                width,
            } => {
                let (sn, cs) = (sin(heading), cos(heading));
                let mut r = FrenetRect {
                    s_min: f64::INFINITY,
                    s_max: f64::NEG_INFINITY,
                    e_y_min: f64::INFINITY,
                    e_y_max: f64::NEG_INFINITY,
                };
                for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0)] {
                    let dx = 0.5 * a * length;
                    let dy = 0.5 * b * width;
                    let p = Point2::new(center.x + dx * cs - dy * sn, center.y + dx * sn + dy * cs);
                    let f = c.global_to_frenet(p, heading)?;
                    r.s_min = r.s_min.min(f.s);
                    r.s_max = r.s_max.max(f.s);
                    r.e_y_min = r.e_y_min.min(f.e_y);
                    r.e_y_max = r.e_y_max.max(f.e_y);
                }
                r
            }
        };
        let m = self.inflation;
        Ok(FrenetRect {
            s_min: r.s_min - m,
            s_max: r.s_max + m,
            e_y_min: r.e_y_min - m,
            e_y_max: r.e_y_max + m,
        })
    }

    /// Stations the obstacle occupies when the ego vehicle, driving at
    /// `nominal_speed` from `s_start`, arrives there. `None` if the ego
    /// vehicle never meets it.
    ///
    /// Station `s` is blocked when `s - v_o (s - s_start) / v_nom` lies in
    /// the inflated extent at planning time.
    pub fn effective_extent(
        &self,
        c: &Centerline,
        s_start: f64,
        nominal_speed: f64,
    ) -> Result<Option<FrenetRect>> {
        let r = self.inflated(c)?;
        if self.velocity == 0.0 {
            return Ok(Some(r));
        }
        if !(nominal_speed > 0.0) {
            return Err(invalid(
                "nominal ego speed must be positive for moving obstacles",
            ));
        }
        let ratio = self.velocity / nominal_speed;
        let k = 1.0 - ratio;
        if abs(k) < 1e-12 {
            // same speed: the gap to the ego vehicle never closes
            let inside = r.s_min <= s_start && s_start <= r.s_max;
            return Ok(if inside { Some(r) } else { None });
        }
        let a = (r.s_min - ratio * s_start) / k;
        let b = (r.s_max - ratio * s_start) / k;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if hi < s_start {
            return Ok(None);
        }
        Ok(Some(FrenetRect {
            s_min: lo.max(s_start),
            s_max: hi,
            ..r
        }))
    }
}

/// Stations `s_0 < s_1 < ... < s_N` of the spatial discretization.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialGrid {
    stations: Vec<f64>,
}

impl SpatialGrid {
    pub fn from_stations(stations: Vec<f64>) -> Result<Self> {
        if stations.len() < 2 {
            return Err(invalid("grid needs at least two stations"));
        }
        if stations.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("grid stations must be strictly increasing"));
        }
        Ok(Self { stations })
    }

    pub fn stations(&self) -> &[f64] {
        &self.stations
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.stations.len() - 1
    }

    /// Interval length `D_{s,j}`.
    pub fn step(&self, j: usize) -> f64 {
        self.stations[j + 1] - self.stations[j]
    }

    pub fn steps(&self) -> Vec<f64> {
        self.stations.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Horizon length `S = s_N - s_0`.
    pub fn horizon(&self) -> f64 {
        self.stations[self.stations.len() - 1] - self.stations[0]
    }

    /// Index of the station at `s`, if one lies within the merge tolerance.
    pub fn index_of(&self, s: f64) -> Option<usize> {
        let i = self
            .stations
            .partition_point(|&x| x < s - STATION_MERGE_TOL);
        (i < self.stations.len() && abs(self.stations[i] - s) <= STATION_MERGE_TOL).then_some(i)
    }
}

/// Uniform grid over `[s_start, s_start + horizon]` with spacing at most
/// `base_step`, plus the inflated obstacle corner stations and any `extra`
/// stations (waypoints) that fall inside.
pub fn build_grid(
    corridor: &RoadCorridor,
    s_start: f64,
    horizon: f64,
    base_step: f64,
    obstacle_extents: &[FrenetRect],
    extra: &[f64],
) -> Result<SpatialGrid> {
    if !(horizon > 0.0) || !(base_step > 0.0) {
        return Err(invalid("horizon and base step must be positive"));
    }
    let s_end = s_start + horizon;
    let len = corridor.centerline.length();
    if s_start < -STATION_MERGE_TOL || s_end > len + STATION_MERGE_TOL {
        return Err(invalid(
            "planning horizon extends past the end of the centerline",
        ));
    }
    let n = (ceil(horizon / base_step - 1e-9) as usize).max(1);
    let h = horizon / n as f64;
    let mut stations: Vec<f64> = (0..=n)
        .map(|k| {
            if k == n {
                s_end
            } else {
                s_start + k as f64 * h
            }
        })
        .collect();
    let inside = |s: f64| s > s_start && s < s_end;
    for r in obstacle_extents {
        for s in [r.s_min, r.s_max] {
            if inside(s) {
                stations.push(s);
            }
        }
    }
    for &s in extra {
        if inside(s) {
            stations.push(s);
        }
    }
    stations.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged: Vec<f64> = Vec::with_capacity(stations.len());
    for s in stations {
        match merged.last() {
            Some(&last) if s - last <= STATION_MERGE_TOL => {}
            _ => merged.push(s),
        }
    }
    // the end station is exact; drop an inserted neighbor that merged into it
    let last = merged.len() - 1;
    merged[last] = s_end;
    if merged.len() > 2 && merged[last] - merged[last - 1] <= STATION_MERGE_TOL {
        merged.remove(last - 1);
    }
    SpatialGrid::from_stations(merged)
}

/// Per-station lateral bounds after obstacle tightening.
#[derive(Clone, Debug, PartialEq)]
pub struct StationBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Tightens the corridor bounds at every station covered by an obstacle's
/// effective extent, on the side chosen per obstacle.
///
/// `extents[i]` belongs to `obstacles[i]`; `None` means the obstacle never
/// meets the ego vehicle.
pub fn map_obstacles(
    corridor: &RoadCorridor,
    grid: &SpatialGrid,
    obstacles: &[ObstacleBox],
    extents: &[Option<FrenetRect>],
) -> Result<StationBounds> {
    if obstacles.len() != extents.len() {
        return Err(invalid("one extent per obstacle required"));
    }
    let st = grid.stations();
    let mut lower: Vec<f64> = st.iter().map(|&s| corridor.bounds_at(s).0).collect();
    let mut upper: Vec<f64> = st.iter().map(|&s| corridor.bounds_at(s).1).collect();
    let within = |s: f64, r: &FrenetRect| {
        s >= r.s_min - STATION_MERGE_TOL && s <= r.s_max + STATION_MERGE_TOL
    };

    for (ob, ext) in obstacles.iter().zip(extents) {
        let Some(r) = ext else { continue };
        let covered: Vec<usize> = (0..st.len()).filter(|&j| within(st[j], r)).collect();
        if covered.is_empty() {
            continue;
        }
        let side = match ob.side {
            PassSide::Auto => {
                let free_above = covered
                    .iter()
                    .map(|&j| upper[j] - r.e_y_max)
                    .fold(f64::INFINITY, f64::min);
                let free_below = covered
                    .iter()
                    .map(|&j| r.e_y_min - lower[j])
                    .fold(f64::INFINITY, f64::min);
                if free_above >= free_below {
                    PassSide::Left
                } else {
                    PassSide::Right
                }
            }
            s => s,
        };
        for &j in &covered {
            if r.e_y_max <= lower[j] || r.e_y_min >= upper[j] {
                continue;
            }
            match side {
                PassSide::Left => lower[j] = lower[j].max(r.e_y_max),
                PassSide::Right => upper[j] = upper[j].min(r.e_y_min),
                PassSide::Auto => unreachable!(),
            }
        }
    }
    for j in 0..st.len() {
        if !(lower[j] < upper[j]) {
            let interval = j.min(st.len() - 2);
            return Err(Error::CorridorBlocked {
                interval,
                s_start: st[interval],
                s_end: st[interval + 1],
            });
        }
    }
    Ok(StationBounds { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn straight(len: f64) -> Centerline {
        Centerline::new(&[Point2::new(0.0, 0.0), Point2::new(len, 0.0)], 1.0).unwrap()
    }

    fn circle_points(r: f64, sweep: f64, n: usize) -> Vec<Point2> {
        (0..=n)
            .map(|k| {
                let a = -PI / 2.0 + sweep * k as f64 / n as f64;
                Point2::new(r * a.cos(), r + r * a.sin())
            })
            .collect()
    }

    #[test]
    fn collinear_points_have_zero_curvature() {
        let c = Centerline::new(
            &[
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(2.0, 2.0),
            ],
            0.5,
        )
        .unwrap();
        assert!(c.vertex_curvatures().iter().all(|&k| k == 0.0));
    }

    #[test]
    fn two_points_make_one_straight_segment() {
        let c = Centerline::new(&[Point2::new(0.0, 0.0), Point2::new(3.0, 4.0)], 10.0).unwrap();
        assert_eq!(c.vertices().len(), 2);
        assert_eq!(c.length(), 5.0);
        let h = c.vertex_headings();
        assert_eq!(h[0], h[1]);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(Centerline::new(&[Point2::new(1.0, 1.0)], 1.0).is_err());
        assert!(Centerline::new(&[Point2::new(1.0, 1.0), Point2::new(1.0, 1.0)], 1.0).is_err());
        assert!(Centerline::new(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)], 0.0).is_err());
    }

    #[test]
    fn circle_curvature_matches_inverse_radius() {
        let c = Centerline::new(&circle_points(50.0, PI, 20_000), 1.0).unwrap();
        for &k in c.vertex_curvatures() {
            assert!((k - 0.02).abs() < 1e-3, "kappa = {k}");
        }
        // clockwise circle is negative
        let mut pts = circle_points(50.0, PI, 20_000);
        pts.reverse();
        let c = Centerline::new(&pts, 1.0).unwrap();
        assert!(c
            .vertex_curvatures()
            .iter()
            .all(|&k| (k + 0.02).abs() < 1e-3));
    }

    #[test]
    fn circle_curvature_within_five_percent_for_coarse_steps() {
        for r in [20.0, 50.0, 200.0] {
            let c = Centerline::new(&circle_points(r, PI / 2.0, 50_000), r / 20.0).unwrap();
            for &k in c.vertex_curvatures() {
                assert!((k * r - 1.0).abs() < 0.05);
            }
        }
    }

    #[test]
    fn arc_lengths_increase_from_zero() {
        let c = Centerline::new(&circle_points(30.0, 2.0, 400), 0.7).unwrap();
        let a = c.arc_lengths();
        assert_eq!(a[0], 0.0);
        assert!(a.windows(2).all(|w| w[1] - w[0] > 1e-9));
        assert!(a.windows(2).all(|w| w[1] - w[0] <= 0.7 + 1e-9));
    }

    #[test]
    fn frenet_of_vertex_and_offset_point() {
        let c = straight(20.0);
        let v = c.vertices()[4];
        let f = c.global_to_frenet(v, 0.0).unwrap();
        assert!((f.s - c.arc_lengths()[4]).abs() < 1e-12);
        assert_eq!(f.e_y, 0.0);
        assert_eq!(f.e_psi, 0.0);

        let f = c.global_to_frenet(Point2::new(10.0, 2.0), 0.0).unwrap();
        assert!((f.s - 10.0).abs() < 1e-12 && (f.e_y - 2.0).abs() < 1e-12 && f.e_psi == 0.0);
    }

    #[test]
    fn global_of_frenet_points() {
        let c = straight(20.0);
        let (p, psi) = c.frenet_to_global(7.0, 0.0, 0.0).unwrap();
        assert_eq!((p.x, p.y, psi), (7.0, 0.0, 0.0));
        let (p, _) = c.frenet_to_global(5.0, -1.0, 0.0).unwrap();
        assert!((p.x - 5.0).abs() < 1e-12 && (p.y + 1.0).abs() < 1e-12);
        assert!(c.frenet_to_global(20.5, 0.0, 0.0).is_err());
        assert!(c.frenet_to_global(-0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn far_away_point_is_out_of_domain() {
        let c = straight(10.0);
        assert!(c.global_to_frenet(Point2::new(-50.0, 0.0), 0.0).is_err());
        let f = c.global_to_frenet(Point2::new(-2.0, 1.0), 0.0).unwrap();
        assert_eq!(f.s, 0.0);
    }

    #[test]
    fn frenet_round_trip_on_curved_road() {
        let c = Centerline::new(&circle_points(40.0, 2.5, 5000), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s = rng.gen_range(0.0..c.length());
            let e_y = rng.gen_range(-3.5..3.5);
            let e_psi = rng.gen_range(-0.5..0.5);
            let (p, psi) = c.frenet_to_global(s, e_y, e_psi).unwrap();
            let f = c.global_to_frenet(p, psi).unwrap();
            let (q, psi2) = c.frenet_to_global(f.s, f.e_y, f.e_psi).unwrap();
            assert!(hypot(p.x - q.x, p.y - q.y) < 1e-6);
            assert!(wrap_angle(psi2 - psi).abs() < 1e-8);
        }
    }

    fn corridor() -> RoadCorridor {
        RoadCorridor::uniform(straight(200.0), -3.5, 3.5, 1.0, 30.0).unwrap()
    }

    #[test]
    fn uniform_grid_without_obstacles() {
        let g = build_grid(&corridor(), 0.0, 100.0, 5.0, &[], &[]).unwrap();
        assert_eq!(g.stations().len(), 21);
        assert!(g.steps().iter().all(|&d| (d - 5.0).abs() < 1e-12));
    }

    #[test]
    fn grid_contains_obstacle_corners() {
        let r = FrenetRect {
            s_min: 12.3,
            s_max: 17.9,
            e_y_min: -0.5,
            e_y_max: 1.0,
        };
        let g = build_grid(&corridor(), 0.0, 100.0, 5.0, &[r], &[]).unwrap();
        assert!(g.index_of(12.3).is_some() && g.index_of(17.9).is_some());
        assert_eq!(g.stations().len(), 23);

        let r = FrenetRect {
            s_min: 15.0,
            s_max: 15.0 + 5e-7,
            e_y_min: -0.5,
            e_y_max: 1.0,
        };
        let g = build_grid(&corridor(), 0.0, 100.0, 5.0, &[r], &[]).unwrap();
        assert_eq!(g.stations().len(), 21);
    }

    #[test]
    fn grid_rejects_horizon_past_end() {
        assert!(build_grid(&corridor(), 150.0, 100.0, 5.0, &[], &[]).is_err());
    }

    #[test]
    fn auto_side_picks_wider_gap() {
        let c = corridor();
        let ob = ObstacleBox::frenet(20.0, 30.0, -0.5, 1.75);
        let ext = ob.effective_extent(&c.centerline, 0.0, 10.0).unwrap();
        let g = build_grid(&c, 0.0, 60.0, 5.0, &[ext.unwrap()], &[]).unwrap();
        let b = map_obstacles(&c, &g, &[ob], &[ext]).unwrap();
        for (j, &s) in g.stations().iter().enumerate() {
            if (20.0..=30.0).contains(&s) {
                assert_eq!((b.lower[j], b.upper[j]), (-3.5, -0.5));
            } else {
                assert_eq!((b.lower[j], b.upper[j]), (-3.5, 3.5));
            }
        }
    }

    #[test]
    fn explicit_side_and_blocked_corridor() {
        let c = corridor();
        let mut ob = ObstacleBox::frenet(20.0, 30.0, -0.5, 1.75);
        ob.side = PassSide::Left;
        let ext = [Some(ob.inflated(&c.centerline).unwrap())];
        let g = build_grid(&c, 0.0, 60.0, 5.0, &[ext[0].unwrap()], &[]).unwrap();
        let b = map_obstacles(&c, &g, &[ob], &ext).unwrap();
        let j = g.index_of(25.0).unwrap();
        assert_eq!(b.lower[j], 1.75);

        let wall = ObstacleBox::frenet(20.0, 30.0, -4.0, 4.0);
        let ext = [Some(wall.inflated(&c.centerline).unwrap())];
        let err = map_obstacles(&c, &g, &[wall], &ext).unwrap_err();
        assert!(matches!(err, Error::CorridorBlocked { .. }));
    }

    #[test]
    fn no_obstacles_leave_bounds_unchanged() {
        let c = corridor();
        let g = build_grid(&c, 0.0, 50.0, 5.0, &[], &[]).unwrap();
        let b = map_obstacles(&c, &g, &[], &[]).unwrap();
        assert!(b.lower.iter().all(|&l| l == -3.5) && b.upper.iter().all(|&u| u == 3.5));
    }

    #[test]
    fn obstacle_moving_at_ego_speed_is_never_met() {
        let c = corridor();
        let mut ob = ObstacleBox::frenet(40.0, 45.0, -1.0, 1.0);
        ob.velocity = 12.0;
        assert_eq!(ob.effective_extent(&c.centerline, 0.0, 12.0).unwrap(), None);
        // slower obstacle is met further down the road
        ob.velocity = 6.0;
        let r = ob
            .effective_extent(&c.centerline, 0.0, 12.0)
            .unwrap()
            .unwrap();
        assert!((r.s_min - 80.0).abs() < 1e-9 && (r.s_max - 90.0).abs() < 1e-9);
    }

    #[test]
    fn inflation_grows_global_footprint() {
        let c = corridor();
        let ob = ObstacleBox {
            footprint: Footprint::Global {
                center: Point2::new(50.0, 1.0),
                heading: 0.0,
                length: 4.0,
                width: 2.0,
            },
            inflation: 0.5,
            velocity: 0.0,
            side: PassSide::Auto,
        };
        let r = ob.inflated(&c.centerline).unwrap();
        assert!((r.s_min - 47.5).abs() < 1e-9 && (r.s_max - 52.5).abs() < 1e-9);
        assert!((r.e_y_min + 0.5).abs() < 1e-9 && (r.e_y_max - 2.5).abs() < 1e-9);
    }

    #[test]
    fn piecewise_bounds() {
        let c = RoadCorridor::new(
            straight(100.0),
            vec![
                BoundPiece {
                    s_start: 0.0,
                    e_y_min: -2.0,
                    e_y_max: 2.0,
                },
                BoundPiece {
                    s_start: 50.0,
                    e_y_min: -1.0,
                    e_y_max: 3.0,
                },
            ],
            1.0,
            20.0,
        )
        .unwrap();
        assert_eq!(c.bounds_at(10.0), (-2.0, 2.0));
        assert_eq!(c.bounds_at(50.0), (-1.0, 3.0));
        assert!(RoadCorridor::uniform(straight(10.0), 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(RoadCorridor::uniform(straight(10.0), -1.0, 1.0, 2.0, 1.0).is_err());
    }
}
