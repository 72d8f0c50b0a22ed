//! Parametric road generators.

use toss_core::geometry::{Centerline, Point2};

/// Spacing of the resampled centerline vertices (m).
pub const VERTEX_SPACING: f64 = 1.0;
const FINE_STEP: f64 = 0.05;

/// Piece of a road with curvature varying linearly from `curvature_start`
/// to `curvature_end` (a clothoid; equal ends give an arc or a straight).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub length: f64,
    pub curvature_start: f64,
    pub curvature_end: f64,
}

impl Segment {
    pub fn straight(length: f64) -> Self {
        Self {
            length,
            curvature_start: 0.0,
            curvature_end: 0.0,
        }
    }

    /// Arc with signed radius (positive turns left).
    pub fn arc(length: f64, radius: f64) -> Self {
        Self {
            length,
            curvature_start: 1.0 / radius,
            curvature_end: 1.0 / radius,
        }
    }

    pub fn ramp(length: f64, from: f64, to: f64) -> Self {
        Self {
            length,
            curvature_start: from,
            curvature_end: to,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RoadShape {
    Straight {
        length: f64,
    },
    Circle {
        radius: f64,
        length: f64,
    },
    /// Straight lead-in, left arc, right arc, straight lead-out.
    SCurve {
        lead_in: f64,
        radius: f64,
        arc_length: f64,
        lead_out: f64,
    },
    Segments(Vec<Segment>),
    Polyline {
        points: Vec<Point2>,
        resample_step: f64,
    },
}

impl RoadShape {
    pub fn segments(&self) -> Option<Vec<Segment>> {
        match self {
            RoadShape::Straight { length } => Some(vec![Segment::straight(*length)]),
            RoadShape::Circle { radius, length } => Some(vec![Segment::arc(*length, *radius)]),
            RoadShape::SCurve {
                lead_in,
                radius,
                arc_length,
                lead_out,
            } => Some(vec![
                Segment::straight(*lead_in),
                Segment::arc(*arc_length, *radius),
                Segment::arc(*arc_length, -*radius),
                Segment::straight(*lead_out),
            ]),
            RoadShape::Segments(s) => Some(s.clone()),
            RoadShape::Polyline { .. } => None,
        }
    }

    pub fn centerline(&self) -> toss_core::Result<Centerline> {
        match self {
            RoadShape::Polyline {
                points,
                resample_step,
            } => Centerline::new(points, *resample_step),
            _ => {
                let segs = self.segments().unwrap_or_default();
                Centerline::new(&trace(&segs)?, VERTEX_SPACING)
            }
        }
    }
}

/// Integrates heading and position along the segments from the origin,
/// heading east.
pub fn trace(segments: &[Segment]) -> toss_core::Result<Vec<Point2>> {
    if segments.is_empty() {
        return Err(toss_core::Error::InvalidInput(
            "road needs at least one segment".into(),
        ));
    }
    let mut p = Point2::new(0.0, 0.0);
    let mut psi = 0.0f64;
    let mut out = vec![p];
    for seg in segments {
        if !(seg.length > 0.0) || !seg.curvature_start.is_finite() || !seg.curvature_end.is_finite()
        {
            return Err(toss_core::Error::InvalidInput(format!(
                "bad road segment {seg:?}"
            )));
        }
        let n = (seg.length / FINE_STEP).ceil() as usize;
        let h = seg.length / n as f64;
        let slope = (seg.curvature_end - seg.curvature_start) / seg.length;
        let heading = |s: f64| psi + seg.curvature_start * s + 0.5 * slope * s * s;
        for i in 0..n {
            let s0 = i as f64 * h;
            // Simpson on cos/sin of the exact heading
            let (a, b, c) = (heading(s0), heading(s0 + 0.5 * h), heading(s0 + h));
            p = Point2::new(
                p.x + h / 6.0 * (a.cos() + 4.0 * b.cos() + c.cos()),
                p.y + h / 6.0 * (a.sin() + 4.0 * b.sin() + c.sin()),
            );
            out.push(p);
        }
        psi = heading(seg.length);
    }
    Ok(out)
}
