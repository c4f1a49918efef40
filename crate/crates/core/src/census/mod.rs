//! Saddle connections by planar development of triangle chains, and
//! cylinders found from their directions.

mod cylinders;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{ccw_angle, Vec2};
use crate::surface::{EdgeRef, TranslationSurface};
use crate::tolerance;

pub use cylinders::{
    candidate_directions, cylinders_up_to, cylinders_up_to_with, decompose, Cylinder, CylinderCensus,
    CylinderDecomposition, CylinderOptions, SkippedDirection, Weight, DEFAULT_BUDGET_FACTOR,
};

/// Cap on developed triangles per root before the search gives up.
pub const MAX_STEPS_PER_ROOT: usize = 200_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaddleConnection {
    pub holonomy: Vec2,
    pub start_cone: usize,
    pub end_cone: usize,
    /// Which `2 pi` sector of the start cone the connection leaves from.
    pub start_sector: u32,
    /// Angular position in `[0, 2 pi m)` of the outgoing direction.
    pub start_angle: f64,
    /// Angular position around the end cone of the reversed direction.
    pub end_angle: f64,
}

impl SaddleConnection {
    pub fn length(&self) -> f64 {
        self.holonomy.norm()
    }

    /// The same segment run backwards.
    pub fn reversed(&self) -> SaddleConnection {
        SaddleConnection {
            holonomy: -self.holonomy,
            start_cone: self.end_cone,
            end_cone: self.start_cone,
            start_sector: (self.end_angle / (2.0 * PI)).floor() as u32,
            start_angle: self.end_angle,
            end_angle: self.start_angle,
        }
    }
}

pub(crate) fn sort_key(h: Vec2) -> (f64, f64) {
    let a = h.y.atan2(h.x);
    (h.norm(), if a < 0.0 { a + 2.0 * PI } else { a })
}

struct Census<'a> {
    tri: TranslationSurface,
    origin: Vec<[(usize, usize); 3]>,
    base: &'a TranslationSurface,
    offset: Vec<Vec<f64>>,
    class: Vec<Vec<usize>>,
    total: Vec<f64>,
    wedge: f64,
    length: f64,
}

/// One edge of a developed triangle seen through the wedge `(r, l)` from the
/// origin. The edge runs `pa -> pb`.
#[derive(Clone, Copy)]
struct Item {
    t: usize,
    e: usize,
    pa: Vec2,
    pb: Vec2,
    r: Vec2,
    l: Vec2,
}

impl Census<'_> {
    /// Angular position of direction `d` at the original corner containing
    /// triangle corner `(t, i)`.
    fn position(&self, t: usize, i: usize, d: Vec2) -> (usize, f64) {
        let (p, k) = self.origin[t][i];
        let cone = self.class[p][k];
        let a = ccw_angle(self.base.polygon(p).edge(k), d);
        let a = if a > 2.0 * PI - tolerance::angle() { 0.0 } else { a };
        let total = self.total[cone];
        let mut pos = (self.offset[p][k] + a) % total;
        if total - pos <= tolerance::angle() {
            pos = 0.0;
        }
        (cone, pos)
    }

    fn connection(&self, root: (usize, usize), end: (usize, usize), h: Vec2) -> SaddleConnection {
        let (start_cone, start_angle) = self.position(root.0, root.1, h);
        let (end_cone, end_angle) = self.position(end.0, end.1, -h);
        SaddleConnection {
            holonomy: h,
            start_cone,
            end_cone,
            start_sector: (start_angle / (2.0 * PI)).floor() as u32,
            start_angle,
            end_angle,
        }
    }

    fn inside(&self, r: Vec2, l: Vec2, p: Vec2) -> (bool, bool) {
        let pn = p.norm();
        (
            r.cross(p) > self.wedge * r.norm() * pn,
            p.cross(l) > self.wedge * l.norm() * pn,
        )
    }

    /// Distance from the origin to the part of `pa -> pb` inside the wedge.
    fn visible_distance(it: &Item) -> f64 {
        let seg = it.pb - it.pa;
        let param = |ray: Vec2| {
            let den = ray.cross(seg);
            if den.abs() < 1e-300 {
                None
            } else {
                Some((it.pa.cross(ray) / den).clamp(0.0, 1.0))
            }
        };
        let s0 = param(it.r).unwrap_or(0.0);
        let s1 = param(it.l).unwrap_or(1.0);
        let (s0, s1) = if s0 <= s1 { (s0, s1) } else { (s1, s0) };
        // closest point of the clipped segment to the origin
        let len2 = seg.norm_sq();
        let s = if len2 > 0.0 {
            (-(it.pa.dot(seg)) / len2).clamp(s0, s1)
        } else {
            s0
        };
        (it.pa + seg * s).norm()
    }

    fn root(&self, t: usize, i: usize, out: &mut Vec<SaddleConnection>) -> Result<()> {
        let poly = self.tri.polygon(t);
        let v0 = poly.vertex(i);
        let r = poly.vertex(i + 1) - v0;
        let l = poly.vertex(i + 2) - v0;
        if r.norm() <= self.length {
            out.push(self.connection((t, i), (t, (i + 1) % 3), r));
        }
        let mut stack = vec![Item {
            t,
            e: (i + 1) % 3,
            pa: r,
            pb: l,
            r,
            l,
        }];
        let mut steps = 0usize;
        while let Some(it) = stack.pop() {
            steps += 1;
            if steps > MAX_STEPS_PER_ROOT {
                return Err(Error::CapExceeded(format!(
                    "saddle connection search from triangle corner ({t}, {i}) exceeded {MAX_STEPS_PER_ROOT} steps"
                )));
            }
            if it.r.cross(it.l) <= self.wedge * it.r.norm() * it.l.norm() {
                continue;
            }
            if Self::visible_distance(&it) > self.length {
                continue;
            }
            let q = self.tri.partner(EdgeRef::new(it.t, it.e));
            let w = self.tri.polygon(q.polygon);
            let p = it.pa + (w.vertex(q.edge + 2) - w.vertex(q.edge + 1));
            let (right_ok, left_ok) = self.inside(it.r, it.l, p);
            let t2 = q.polygon;
            let (e1, e2) = ((q.edge + 1) % 3, (q.edge + 2) % 3);
            if right_ok && left_ok {
                if p.norm() <= self.length {
                    out.push(self.connection((t, i), (t2, e2), p));
                }
                stack.push(Item {
                    t: t2,
                    e: e1,
                    pa: it.pa,
                    pb: p,
                    r: it.r,
                    l: p,
                });
                stack.push(Item {
                    t: t2,
                    e: e2,
                    pa: p,
                    pb: it.pb,
                    r: p,
                    l: it.l,
                });
            } else if !right_ok {
                stack.push(Item {
                    t: t2,
                    e: e2,
                    pa: p,
                    pb: it.pb,
                    r: it.r,
                    l: it.l,
                });
            } else {
                stack.push(Item {
                    t: t2,
                    e: e1,
                    pa: it.pa,
                    pb: p,
                    r: it.r,
                    l: it.l,
                });
            }
        }
        Ok(())
    }
}

/// Every saddle connection of length at most `length`, once per starting
/// cone point and outgoing direction. Vertex classes of angle `2 pi` count
/// as marked points. Output is sorted by length, then by holonomy angle.
pub fn saddle_connections(s: &TranslationSurface, length: f64) -> Result<Vec<SaddleConnection>> {
    if !length.is_finite() || length <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "length must be positive, got {length}"
        )));
    }
    s.ensure_valid()?;
    let (tri, origin) = s.triangulate_with_origin();
    let corners = s.corners();
    let census = Census {
        tri,
        origin,
        base: s,
        offset: corners.offset,
        class: corners.class,
        total: corners.classes.iter().map(|c| c.total_angle).collect(),
        wedge: tolerance::wedge(),
        length,
    };
    let roots: Vec<(usize, usize)> = (0..census.tri.polygons().len())
        .flat_map(|t| (0..3).map(move |i| (t, i)))
        .collect();
    let parts: Vec<Result<Vec<SaddleConnection>>> = roots
        .par_iter()
        .map(|&(t, i)| {
            let mut out = Vec::new();
            census.root(t, i, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for p in parts {
        all.extend(p?);
    }
    all.sort_by(|a, b| {
        let (la, aa) = sort_key(a.holonomy);
        let (lb, ab) = sort_key(b.holonomy);
        la.total_cmp(&lb)
            .then(aa.total_cmp(&ab))
            .then(a.start_cone.cmp(&b.start_cone))
            .then(a.start_angle.total_cmp(&b.start_angle))
    });
    Ok(all)
}

/// Length of the shortest saddle connection, by doubling the search radius
/// from a small fraction of the surface's scale.
pub fn shortest_sc(s: &TranslationSurface) -> Result<f64> {
    s.ensure_valid()?;
    let cap = s.min_edge_length();
    let mut l = (cap / 64.0).max(f64::MIN_POSITIVE);
    loop {
        let found = saddle_connections(s, l.min(cap))?;
        if let Some(min) = found.iter().map(SaddleConnection::length).reduce(f64::min) {
            return Ok(min);
        }
        l *= 2.0;
    }
}
