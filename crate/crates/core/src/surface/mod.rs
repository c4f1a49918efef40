//! Translation surfaces as convex polygons glued edge-to-edge by translations.

mod delaunay;
mod iso;
mod json;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{ccw_angle, Mat2, Vec2};
use crate::tolerance;

pub use delaunay::{delaunay, delaunay_cells, MAX_FLIPS};
pub use iso::is_isomorphic;
pub use json::SurfaceFile;

/// A convex polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

impl Polygon {
    /// Checked constructor: at least three finite vertices, counterclockwise,
    /// strictly convex.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        let p = Polygon { vertices };
        match p.defect() {
            None => Ok(p),
            Some(reason) => Err(Error::InvalidPolygon(reason)),
        }
    }

    /// Skips the convexity checks; [`TranslationSurface::validate`] reports
    /// any problem later.
    pub fn new_unchecked(vertices: Vec<Vec2>) -> Self {
        Polygon { vertices }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.vertices.len()]
    }

    /// Vector from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> Vec2 {
        let n = self.vertices.len();
        self.vertices[(i + 1) % n] - self.vertices[i % n]
    }

    /// Interior angle at vertex `i`.
    pub fn angle(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        let out = self.edge(i);
        let back = -self.edge((i + n - 1) % n);
        ccw_angle(out, back)
    }

    /// Signed shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len() as f64;
        let s = self.vertices.iter().fold(Vec2::ZERO, |acc, &v| acc + v);
        s * (1.0 / n)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    /// Closed containment with absolute slack `tol`.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        (0..self.len()).all(|i| {
            let e = self.edge(i);
            e.cross(p - self.vertex(i)) >= -tol * e.norm()
        })
    }

    pub fn transformed(&self, g: &Mat2) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&v| g.apply(v)).collect(),
        }
    }

    fn defect(&self) -> Option<String> {
        let n = self.vertices.len();
        if n < 3 {
            return Some(format!("{n} vertices, need at least 3"));
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Some("non-finite vertex".into());
        }
        if self.area() <= 0.0 {
            return Some("zero or negative (clockwise) area".into());
        }
        for i in 0..n {
            let a = self.edge(i);
            let b = self.edge(i + 1);
            if a.norm() == 0.0 {
                return Some(format!("repeated vertex {i}"));
            }
            if a.cross(b) <= tolerance::angle() * a.norm() * b.norm() {
                return Some(format!("not strictly convex at vertex {}", (i + 1) % n));
            }
        }
        // Turning number one rules out star-shaped self-overlaps.
        let turning: f64 = (0..n).map(|i| PI - self.angle(i)).sum();
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Some("polygon winds more than once".into());
        }
        None
    }
}

/// Edge `edge` of polygon `polygon`, running from vertex `edge` to `edge + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub polygon: usize,
    pub edge: usize,
}

impl EdgeRef {
    pub const fn new(polygon: usize, edge: usize) -> Self {
        EdgeRef { polygon, edge }
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.polygon, self.edge)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    BadPolygon {
        polygon: usize,
        reason: String,
    },
    EdgeOutOfRange {
        edge: EdgeRef,
    },
    UncoveredEdge {
        edge: EdgeRef,
    },
    SelfGlued {
        edge: EdgeRef,
    },
    NotInvolution {
        edge: EdgeRef,
        partner: EdgeRef,
    },
    LengthMismatch {
        edge: EdgeRef,
        partner: EdgeRef,
        difference: f64,
    },
    NotAntiparallel {
        edge: EdgeRef,
        partner: EdgeRef,
        mismatch: f64,
    },
    ConeAngle {
        class: usize,
        total_angle: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadPolygon { polygon, reason } => write!(f, "polygon {polygon}: {reason}"),
            Violation::EdgeOutOfRange { edge } => write!(f, "edge {edge} out of range"),
            Violation::UncoveredEdge { edge } => write!(f, "uncovered edge {edge}"),
            Violation::SelfGlued { edge } => write!(f, "edge {edge} glued to itself"),
            Violation::NotInvolution { edge, partner } => {
                write!(f, "gluing {edge} -> {partner} is not an involution")
            }
            Violation::LengthMismatch {
                edge,
                partner,
                difference,
            } => write!(f, "edges {edge} and {partner} differ in length by {difference:e}"),
            Violation::NotAntiparallel {
                edge,
                partner,
                mismatch,
            } => write!(f, "edges {edge} and {partner} are not opposite ({mismatch:e})"),
            Violation::ConeAngle { class, total_angle } => write!(
                f,
                "vertex class {class} has total angle {total_angle}, not a multiple of 2pi"
            ),
        }
    }
}

/// All invariant violations of a surface; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A vertex class of the surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub id: usize,
    /// Total angle is `2pi * angle_multiple`.
    pub angle_multiple: u32,
    /// Order of the zero of the holomorphic one-form, `angle_multiple - 1`.
    pub zero_order: u32,
    /// Polygon corners `(polygon, vertex)` in counterclockwise order.
    pub corners: Vec<(usize, usize)>,
}

impl ConePoint {
    pub fn is_regular(&self) -> bool {
        self.angle_multiple == 1
    }

    pub fn total_angle(&self) -> f64 {
        2.0 * PI * self.angle_multiple as f64
    }
}

/// Corner bookkeeping: vertex class, cumulative angular offset within the
/// class, and interior angle of every polygon corner.
#[derive(Clone, Debug)]
pub(crate) struct Corners {
    pub class: Vec<Vec<usize>>,
    pub offset: Vec<Vec<f64>>,
    pub angle: Vec<Vec<f64>>,
    pub classes: Vec<ClassInfo>,
}

#[derive(Clone, Debug)]
pub(crate) struct ClassInfo {
    pub corners: Vec<(usize, usize)>,
    pub total_angle: f64,
    pub multiple: u32,
}

/// Polygons plus an involutive edge gluing.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationSurface {
    name: String,
    polygons: Vec<Polygon>,
    gluing: Vec<Vec<Option<EdgeRef>>>,
}

impl TranslationSurface {
    /// Builds a surface from gluing pairs. Only index ranges and duplicate
    /// assignments are rejected here; geometric problems surface in
    /// [`validate`](Self::validate).
    pub fn new(
        name: impl Into<String>,
        polygons: Vec<Polygon>,
        pairs: &[(EdgeRef, EdgeRef)],
    ) -> Result<Self> {
        let mut gluing: Vec<Vec<Option<EdgeRef>>> = polygons.iter().map(|p| vec![None; p.len()]).collect();
        let in_range = |e: &EdgeRef| e.polygon < polygons.len() && e.edge < polygons[e.polygon].len();
        for (a, b) in pairs {
            for e in [a, b] {
                if !in_range(e) {
                    return Err(Error::InvalidParameter(format!("edge {e} out of range")));
                }
            }
            for (x, y) in [(a, b), (b, a)] {
                let slot = &mut gluing[x.polygon][x.edge];
                if slot.is_some_and(|old| old != *y) {
                    return Err(Error::InvalidParameter(format!("edge {x} glued twice")));
                }
                *slot = Some(*y);
            }
        }
        Ok(TranslationSurface {
            name: name.into(),
            polygons,
            gluing,
        })
    }

    pub(crate) fn from_parts(
        name: String,
        polygons: Vec<Polygon>,
        gluing: Vec<Vec<Option<EdgeRef>>>,
    ) -> Self {
        TranslationSurface {
            name,
            polygons,
            gluing,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn polygon(&self, i: usize) -> &Polygon {
        &self.polygons[i]
    }

    /// Partner of an edge. Panics on an uncovered edge; only call on valid
    /// surfaces.
    pub fn partner(&self, e: EdgeRef) -> EdgeRef {
        self.gluing[e.polygon][e.edge].expect("uncovered edge on a validated surface")
    }

    pub fn try_partner(&self, e: EdgeRef) -> Option<EdgeRef> {
        self.gluing
            .get(e.polygon)
            .and_then(|g| g.get(e.edge))
            .copied()
            .flatten()
    }

    /// Each glued pair once, smaller edge first.
    pub fn gluing_pairs(&self) -> Vec<(EdgeRef, EdgeRef)> {
        let mut out = Vec::new();
        for (p, row) in self.gluing.iter().enumerate() {
            for (e, partner) in row.iter().enumerate() {
                let here = EdgeRef::new(p, e);
                if let Some(q) = partner {
                    if here <= *q {
                        out.push((here, *q));
                    }
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.polygons.iter().map(|p| p.len()).sum()
    }

    /// Longest edge; the length scale for absolute tolerances.
    pub fn length_scale(&self) -> f64 {
        self.polygons
            .iter()
            .flat_map(|p| (0..p.len()).map(move |i| p.edge(i).norm()))
            .fold(0.0, f64::max)
    }

    pub fn min_edge_length(&self) -> f64 {
        self.polygons
            .iter()
            .flat_map(|p| (0..p.len()).map(move |i| p.edge(i).norm()))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (i, p) in self.polygons.iter().enumerate() {
            if let Some(reason) = p.defect() {
                violations.push(Violation::BadPolygon { polygon: i, reason });
            }
        }
        let scale = self.length_scale().max(f64::MIN_POSITIVE);
        let mut combinatorics_ok = true;
        for (p, row) in self.gluing.iter().enumerate() {
            for (e, partner) in row.iter().enumerate() {
                let here = EdgeRef::new(p, e);
                let Some(q) = *partner else {
                    violations.push(Violation::UncoveredEdge { edge: here });
                    combinatorics_ok = false;
                    continue;
                };
                if q == here {
                    violations.push(Violation::SelfGlued { edge: here });
                    combinatorics_ok = false;
                    continue;
                }
                if self.try_partner(q) != Some(here) {
                    violations.push(Violation::NotInvolution {
                        edge: here,
                        partner: q,
                    });
                    combinatorics_ok = false;
                    continue;
                }
                if here > q {
                    continue;
                }
                let a = self.polygons[p].edge(e);
                let b = self.polygons[q.polygon].edge(q.edge);
                let dl = (a.norm() - b.norm()).abs();
                if dl > tolerance::glue() * scale {
                    violations.push(Violation::LengthMismatch {
                        edge: here,
                        partner: q,
                        difference: dl,
                    });
                } else if (a + b).norm() > tolerance::glue() * scale {
                    violations.push(Violation::NotAntiparallel {
                        edge: here,
                        partner: q,
                        mismatch: (a + b).norm(),
                    });
                }
            }
        }
        if combinatorics_ok && violations.is_empty() {
            let corners = self.corners();
            for (id, c) in corners.classes.iter().enumerate() {
                let m = (c.total_angle / (2.0 * PI)).round();
                let slack = tolerance::angle() * (1.0 + c.corners.len() as f64);
                if m < 1.0 || (c.total_angle - 2.0 * PI * m).abs() > slack {
                    violations.push(Violation::ConeAngle {
                        class: id,
                        total_angle: c.total_angle,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidSurface(report))
        }
    }

    /// Walks every vertex class counterclockwise. Requires a complete,
    /// involutive gluing.
    pub(crate) fn corners(&self) -> Corners {
        let mut class: Vec<Vec<usize>> = self.polygons.iter().map(|p| vec![usize::MAX; p.len()]).collect();
        let mut offset: Vec<Vec<f64>> = self.polygons.iter().map(|p| vec![0.0; p.len()]).collect();
        let angle: Vec<Vec<f64>> = self
            .polygons
            .iter()
            .map(|p| (0..p.len()).map(|i| p.angle(i)).collect())
            .collect();
        let mut classes = Vec::new();
        for p0 in 0..self.polygons.len() {
            for v0 in 0..self.polygons[p0].len() {
                if class[p0][v0] != usize::MAX {
                    continue;
                }
                let id = classes.len();
                let mut members = Vec::new();
                let mut total = 0.0;
                let (mut p, mut v) = (p0, v0);
                loop {
                    class[p][v] = id;
                    offset[p][v] = total;
                    total += angle[p][v];
                    members.push((p, v));
                    // The edge entering vertex v is glued to an edge that
                    // leaves the same vertex class.
                    let n = self.polygons[p].len();
                    let prev = EdgeRef::new(p, (v + n - 1) % n);
                    let q = self.partner(prev);
                    (p, v) = (q.polygon, q.edge);
                    if (p, v) == (p0, v0) || class[p][v] != usize::MAX {
                        break;
                    }
                }
                let multiple = (total / (2.0 * PI)).round().max(1.0) as u32;
                classes.push(ClassInfo {
                    corners: members,
                    total_angle: total,
                    multiple,
                });
            }
        }
        Corners {
            class,
            offset,
            angle,
            classes,
        }
    }

    pub fn cone_points(&self) -> Result<Vec<ConePoint>> {
        self.ensure_valid()?;
        Ok(self.cone_points_unchecked())
    }

    pub(crate) fn cone_points_unchecked(&self) -> Vec<ConePoint> {
        self.corners()
            .classes
            .into_iter()
            .enumerate()
            .map(|(id, c)| ConePoint {
                id,
                angle_multiple: c.multiple,
                zero_order: c.multiple - 1,
                corners: c.corners,
            })
            .collect()
    }

    /// Genus from the Euler characteristic `V - E + F` of the polygon complex.
    pub fn genus(&self) -> Result<u32> {
        let cones = self.cone_points()?;
        let v = cones.len() as i64;
        let e = (self.edge_count() / 2) as i64;
        let f = self.polygons.len() as i64;
        let chi = v - e + f;
        Ok(((2 - chi) / 2) as u32)
    }

    /// Zero orders of the genuine singularities (cone angle above `2pi`),
    /// sorted decreasingly: the stratum `H(alpha)`.
    pub fn stratum(&self) -> Result<Vec<u32>> {
        let mut orders: Vec<u32> = self
            .cone_points()?
            .into_iter()
            .map(|c| c.zero_order)
            .filter(|&a| a > 0)
            .collect();
        orders.sort_unstable_by(|a, b| b.cmp(a));
        Ok(orders)
    }

    pub fn area(&self) -> f64 {
        self.polygons.iter().map(Polygon::area).sum()
    }

    /// Linear action: every polygon is mapped by `g`, gluings unchanged.
    pub fn apply_matrix(&self, g: &Mat2) -> Result<TranslationSurface> {
        if !g.is_finite() {
            return Err(Error::NonFinite("matrix entry"));
        }
        if !g.is_unimodular() {
            return Err(Error::NotUnimodular { det: g.det() });
        }
        self.ensure_valid()?;
        let out = TranslationSurface {
            name: self.name.clone(),
            polygons: self.polygons.iter().map(|p| p.transformed(g)).collect(),
            gluing: self.gluing.clone(),
        };
        out.ensure_valid()?;
        Ok(out)
    }

    /// Largest vertex displacement against a surface with identical
    /// combinatorics, or `None` if the combinatorics differ.
    pub fn max_vertex_difference(&self, other: &TranslationSurface) -> Option<f64> {
        if self.gluing != other.gluing {
            return None;
        }
        let mut d: f64 = 0.0;
        for (a, b) in self.polygons.iter().zip(&other.polygons) {
            if a.len() != b.len() {
                return None;
            }
            for (u, v) in a.vertices().iter().zip(b.vertices()) {
                d = d.max(u.dist(*v));
            }
        }
        Some(d)
    }

    /// Fan triangulation of every polygon from its vertex 0. Vertex class
    /// ids are unchanged since the corner scan meets the original vertices in
    /// the same order.
    pub fn triangulate(&self) -> TranslationSurface {
        self.triangulate_with_origin().0
    }

    /// Fan triangulation plus, for every triangle corner, the original
    /// `(polygon, vertex)` corner containing it.
    pub(crate) fn triangulate_with_origin(&self) -> (TranslationSurface, Vec<[(usize, usize); 3]>) {
        let mut polygons = Vec::new();
        let mut origin = Vec::new();
        // first triangle index of each polygon
        let mut base = Vec::with_capacity(self.polygons.len());
        for (pi, p) in self.polygons.iter().enumerate() {
            base.push(polygons.len());
            let v = p.vertices();
            for j in 1..v.len() - 1 {
                polygons.push(Polygon::new_unchecked(vec![v[0], v[j], v[j + 1]]));
                origin.push([(pi, 0), (pi, j), (pi, j + 1)]);
            }
        }
        // original edge -> triangle edge
        let locate = |e: EdgeRef| -> EdgeRef {
            let k = self.polygons[e.polygon].len();
            let b = base[e.polygon];
            if e.edge == 0 {
                EdgeRef::new(b, 0)
            } else if e.edge == k - 1 {
                EdgeRef::new(b + k - 3, 2)
            } else {
                EdgeRef::new(b + e.edge - 1, 1)
            }
        };
        let mut gluing: Vec<Vec<Option<EdgeRef>>> = vec![vec![None; 3]; polygons.len()];
        for (pi, p) in self.polygons.iter().enumerate() {
            let k = p.len();
            for j in 2..k - 1 {
                // diagonal v0 -> vj is edge 0 of fan triangle j and edge 2 of j - 1
                let t = base[pi] + j - 1;
                gluing[t][0] = Some(EdgeRef::new(t - 1, 2));
                gluing[t - 1][2] = Some(EdgeRef::new(t, 0));
            }
            for e in 0..k {
                let here = locate(EdgeRef::new(pi, e));
                let there = self.gluing[pi][e].map(locate);
                gluing[here.polygon][here.edge] = there;
            }
        }
        (
            TranslationSurface {
                name: self.name.clone(),
                polygons,
                gluing,
            },
            origin,
        )
    }
}
