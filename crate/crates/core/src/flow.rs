//! Straight-line flow across polygon gluings.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{ccw_angle, Vec2};
use crate::surface::{ConePoint, Corners, EdgeRef, TranslationSurface};
use crate::tolerance;

/// A point given in the coordinates of one polygon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub polygon: usize,
    pub position: Vec2,
}

impl SurfacePoint {
    pub fn new(polygon: usize, position: Vec2) -> Self {
        SurfacePoint { polygon, position }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Terminal {
    HitConePoint { cone: usize },
    BudgetExhausted,
    ClosedUp,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub polygon: usize,
    pub entry: Vec2,
    pub exit: Vec2,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.entry.dist(self.exit)
    }
}

/// A cone point together with an angular position in `[0, 2 pi m)` measured
/// around it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeDirection {
    pub cone: usize,
    pub position: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub segments: Vec<Segment>,
    pub total_length: f64,
    pub terminal: Terminal,
    /// Set when the trajectory leaves a cone point.
    pub start: Option<ConeDirection>,
    /// Set on `HitConePoint`: where the reversed ray sits around the cone.
    pub arrival: Option<ConeDirection>,
}

impl Trajectory {
    pub fn end_point(&self) -> Option<SurfacePoint> {
        self.segments.last().map(|s| SurfacePoint::new(s.polygon, s.exit))
    }
}

/// Flow engine over a fixed surface; caches the corner structure.
pub struct Tracer<'a> {
    s: &'a TranslationSurface,
    corners: Corners,
    hit: f64,
    angle: f64,
}

impl<'a> Tracer<'a> {
    pub fn new(s: &'a TranslationSurface) -> Result<Self> {
        s.ensure_valid()?;
        Ok(Self::new_unchecked(s))
    }

    pub(crate) fn new_unchecked(s: &'a TranslationSurface) -> Self {
        Tracer {
            s,
            corners: s.corners(),
            hit: tolerance::hit() * s.length_scale(),
            angle: tolerance::angle(),
        }
    }

    pub fn surface(&self) -> &TranslationSurface {
        self.s
    }

    pub(crate) fn corners(&self) -> &Corners {
        &self.corners
    }

    pub fn cone_angle(&self, cone: usize) -> f64 {
        self.corners.classes[cone].total_angle
    }

    pub fn cone_multiple(&self, cone: usize) -> u32 {
        self.corners.classes[cone].multiple
    }

    /// Position of direction `d` in the corner wedge at `(p, k)`, or `None`
    /// if `d` is outside the half-open wedge `[edge k, -edge k-1)`.
    pub fn wedge_position(&self, p: usize, k: usize, d: Vec2) -> Option<f64> {
        let poly = self.s.polygon(p);
        let a = ccw_angle(poly.edge(k), d);
        let a = if a > 2.0 * PI - self.angle { 0.0 } else { a };
        (a < self.corners.angle[p][k] - self.angle).then_some(a)
    }

    /// Angular position of `d` around the cone at corner `(p, k)`, assuming
    /// `d` points into (or along the boundary of) that corner.
    fn position_at(&self, p: usize, k: usize, d: Vec2) -> ConeDirection {
        let cone = self.corners.class[p][k];
        let total = self.corners.classes[cone].total_angle;
        let a = ccw_angle(self.s.polygon(p).edge(k), d);
        let a = if a > 2.0 * PI - self.angle { 0.0 } else { a };
        let mut pos = (self.corners.offset[p][k] + a) % total;
        if total - pos <= self.angle {
            pos = 0.0;
        }
        ConeDirection { cone, position: pos }
    }

    /// Corner `(p, k)` of the cone `cone` whose wedge holds `position`, and
    /// the direction there.
    pub fn corner_at(&self, cone: usize, position: f64) -> (usize, usize, Vec2) {
        let class = &self.corners.classes[cone];
        let pos = position.rem_euclid(class.total_angle);
        let mut best = class.corners[0];
        for &(p, k) in &class.corners {
            let off = self.corners.offset[p][k];
            if off <= pos + self.angle {
                best = (p, k);
            } else {
                break;
            }
        }
        let (p, k) = best;
        let a = (pos - self.corners.offset[p][k]).max(0.0);
        let e = self.s.polygon(p).edge(k);
        let d = rotate(e.normalized(), a);
        (p, k, d)
    }

    /// Traces from an interior point.
    pub fn trace(&self, start: SurfacePoint, dir: Vec2, max_length: f64) -> Result<Trajectory> {
        if !dir.is_finite() || dir.norm() == 0.0 {
            return Err(Error::InvalidParameter(
                "direction must be finite and nonzero".into(),
            ));
        }
        if !max_length.is_finite() || max_length < 0.0 {
            return Err(Error::InvalidParameter(
                "length budget must be finite and >= 0".into(),
            ));
        }
        if start.polygon >= self.s.polygons().len()
            || !self.s.polygon(start.polygon).contains(start.position, self.hit)
        {
            return Err(Error::StartOutside {
                polygon: start.polygon,
            });
        }
        let poly = self.s.polygon(start.polygon);
        if poly.vertices().iter().any(|v| v.dist(start.position) <= self.hit) {
            return Err(Error::InvalidParameter("start point is a vertex".into()));
        }
        let d = dir.normalized();
        self.run(start.polygon, start.position, d, max_length, Some(start), None)
    }

    /// Traces the outgoing ray at corner `(p, k)` in direction `d`, which must
    /// lie in that corner's wedge.
    pub fn trace_from_corner(&self, p: usize, k: usize, d: Vec2, max_length: f64) -> Trajectory {
        let d = d.normalized();
        let poly = self.s.polygon(p);
        let start = self.position_at(p, k, d);
        let v = poly.vertex(k);
        let along = |e: Vec2| e.normalized().dist(d) <= self.angle.max(1e-12) * 4.0;
        // a ray along a side of the corner is that side
        let n = poly.len();
        for (edge, far) in [
            (poly.edge(k), (k + 1) % n),
            (-poly.edge(k + n - 1), (k + n - 1) % n),
        ] {
            if along(edge) {
                let len = edge.norm();
                if len > max_length {
                    return Trajectory {
                        segments: vec![Segment {
                            polygon: p,
                            entry: v,
                            exit: v + d * max_length,
                        }],
                        total_length: max_length,
                        terminal: Terminal::BudgetExhausted,
                        start: Some(start),
                        arrival: None,
                    };
                }
                let arrival = self.position_at(p, far, -d);
                return Trajectory {
                    segments: vec![Segment {
                        polygon: p,
                        entry: v,
                        exit: poly.vertex(far),
                    }],
                    total_length: len,
                    terminal: Terminal::HitConePoint { cone: arrival.cone },
                    start: Some(start),
                    arrival: Some(arrival),
                };
            }
        }
        self.run(p, v, d, max_length, None, Some(start))
            .expect("corner rays have no error paths")
    }

    fn run(
        &self,
        mut p: usize,
        mut x: Vec2,
        d: Vec2,
        budget: f64,
        closing: Option<SurfacePoint>,
        start: Option<ConeDirection>,
    ) -> Result<Trajectory> {
        let mut segments = Vec::new();
        let mut total = 0.0;
        let mut stall = 0usize;
        loop {
            let poly = self.s.polygon(p);
            let n = poly.len();
            // exit edge: smallest forward parameter among outward-facing edges
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                let e = poly.edge(j);
                let den = d.cross(e);
                if den <= 1e-14 * e.norm() {
                    continue;
                }
                let t = (poly.vertex(j) - x).cross(e) / den;
                if best.is_none_or(|(_, bt)| t < bt) {
                    best = Some((j, t));
                }
            }
            let Some((j, t)) = best else {
                return Err(Error::GrazingUnresolved { polygon: p });
            };
            let t = t.max(0.0);
            if t <= self.hit {
                stall += 1;
                if stall > 4 * n + 8 {
                    return Err(Error::GrazingUnresolved { polygon: p });
                }
            } else {
                stall = 0;
            }

            if let Some(c) = closing {
                if c.polygon == p {
                    let w = c.position - x;
                    let s = w.dot(d);
                    if s > self.hit
                        && s <= t + self.hit
                        && (w - d * s).norm() <= self.hit
                        && total + s <= budget
                    {
                        segments.push(Segment {
                            polygon: p,
                            entry: x,
                            exit: c.position,
                        });
                        return Ok(Trajectory {
                            segments,
                            total_length: total + s,
                            terminal: Terminal::ClosedUp,
                            start,
                            arrival: None,
                        });
                    }
                }
            }

            if total + t > budget {
                let rest = budget - total;
                segments.push(Segment {
                    polygon: p,
                    entry: x,
                    exit: x + d * rest,
                });
                return Ok(Trajectory {
                    segments,
                    total_length: budget,
                    terminal: Terminal::BudgetExhausted,
                    start,
                    arrival: None,
                });
            }

            let y = x + d * t;
            let (a, b) = (poly.vertex(j), poly.vertex(j + 1));
            let hit_vertex = if y.dist(a) <= self.hit {
                Some(j)
            } else if y.dist(b) <= self.hit {
                Some((j + 1) % n)
            } else {
                None
            };
            if let Some(k) = hit_vertex {
                let end = poly.vertex(k);
                let len = (end - x).dot(d).max(0.0);
                segments.push(Segment {
                    polygon: p,
                    entry: x,
                    exit: end,
                });
                let arrival = self.position_at(p, k, -d);
                return Ok(Trajectory {
                    segments,
                    total_length: total + len,
                    terminal: Terminal::HitConePoint { cone: arrival.cone },
                    start,
                    arrival: Some(arrival),
                });
            }
            segments.push(Segment {
                polygon: p,
                entry: x,
                exit: y,
            });
            total += t;
            let q = self.s.partner(EdgeRef::new(p, j));
            let qp = self.s.polygon(q.polygon);
            x = qp.vertex(q.edge + 1) + (y - a);
            p = q.polygon;
        }
    }

    /// All outgoing rays from `cone` in directions `dir` and `-dir`, one per
    /// sector, ordered by angular position.
    pub fn separatrices(&self, cone: usize, dir: Vec2, max_length: f64) -> Vec<Trajectory> {
        let mut out = Vec::new();
        for d in [dir.normalized(), -dir.normalized()] {
            for &(p, k) in &self.corners.classes[cone].corners {
                if self.wedge_position(p, k, d).is_some() {
                    out.push(self.trace_from_corner(p, k, d, max_length));
                }
            }
        }
        out.sort_by(|a, b| {
            let pa = a.start.map_or(0.0, |s| s.position);
            let pb = b.start.map_or(0.0, |s| s.position);
            pa.total_cmp(&pb)
        });
        out
    }
}

fn rotate(v: Vec2, a: f64) -> Vec2 {
    let (s, c) = a.sin_cos();
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

/// Traces a geodesic from an interior point; see [`Tracer::trace`].
pub fn trace(s: &TranslationSurface, start: SurfacePoint, dir: Vec2, max_length: f64) -> Result<Trajectory> {
    Tracer::new(s)?.trace(start, dir, max_length)
}

/// Outgoing rays from a cone point in directions `±dir`. Unmarked flat
/// points have no separatrices, so a surface without vertex classes of its
/// own gives an empty list.
pub fn separatrices(
    s: &TranslationSurface,
    cone: &ConePoint,
    dir: Vec2,
    max_length: f64,
) -> Result<Vec<Trajectory>> {
    if !dir.is_finite() || dir.norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "direction must be finite and nonzero".into(),
        ));
    }
    let tracer = Tracer::new(s)?;
    if cone.id >= tracer.corners.classes.len() {
        return Err(Error::InvalidParameter(format!("no cone point {}", cone.id)));
    }
    Ok(tracer.separatrices(cone.id, dir, max_length))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build, Family};
    use approx::assert_relative_eq;

    #[test]
    fn horizontal_circle_closes() {
        let t = build(Family::SquareTorus, 0).unwrap();
        let tr = trace(
            &t,
            SurfacePoint::new(0, Vec2::new(0.5, 0.5)),
            Vec2::new(1.0, 0.0),
            3.0,
        )
        .unwrap();
        assert_eq!(tr.terminal, Terminal::ClosedUp);
        assert_relative_eq!(tr.total_length, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn irrational_slope_runs_out() {
        let t = build(Family::SquareTorus, 0).unwrap();
        let tr = trace(
            &t,
            SurfacePoint::new(0, Vec2::new(0.5, 0.5)),
            Vec2::new(1.0, 2f64.sqrt()),
            10.0,
        )
        .unwrap();
        assert_eq!(tr.terminal, Terminal::BudgetExhausted);
        assert_relative_eq!(tr.total_length, 10.0);
        let sum: f64 = tr.segments.iter().map(Segment::length).sum();
        assert_relative_eq!(sum, 10.0, max_relative = 1e-10);
    }

    #[test]
    fn vertical_loop_in_the_short_cylinder() {
        let x5 = build(Family::Xn, 5).unwrap();
        let h1 = 4.0 * (PI / 5.0).sin() * (PI / 5.0).cos();
        let w1 = 2.0 * (PI / 5.0).sin().powi(2);
        // the leftmost vertex of the first pentagon bounds V_1
        let v = x5.polygon(0).vertex(3);
        let start = SurfacePoint::new(0, v + Vec2::new(w1 / 2.0, 0.0));
        let tr = trace(&x5, start, Vec2::new(0.0, 1.0), 2.0 * h1).unwrap();
        assert_eq!(tr.terminal, Terminal::ClosedUp);
        assert_relative_eq!(tr.total_length, h1, max_relative = 1e-9);
    }

    #[test]
    fn separatrix_counts() {
        let x5 = build(Family::Xn, 5).unwrap();
        let cones = x5.cone_points().unwrap();
        let rays = separatrices(&x5, &cones[0], Vec2::new(0.0, 1.0), 10.0).unwrap();
        assert_eq!(rays.len(), 6);
        assert!(rays
            .iter()
            .all(|r| matches!(r.terminal, Terminal::HitConePoint { .. })));
        let torus = build(Family::SquareTorus, 0).unwrap();
        let cones = torus.cone_points().unwrap();
        let rays = separatrices(&torus, &cones[0], Vec2::new(1.0, 0.0), 10.0).unwrap();
        assert_eq!(rays.len(), 2);
    }

    #[test]
    fn starting_outside_is_an_error() {
        let t = build(Family::SquareTorus, 0).unwrap();
        assert!(matches!(
            trace(
                &t,
                SurfacePoint::new(0, Vec2::new(2.0, 0.5)),
                Vec2::new(1.0, 0.0),
                1.0
            ),
            Err(Error::StartOutside { .. })
        ));
    }
}
