//! Edge-flip Delaunay triangulation of a translation surface, and the
//! Delaunay decomposition obtained by merging cocircular triangles.

use std::collections::VecDeque;

use super::{EdgeRef, Polygon, TranslationSurface};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::tolerance;

/// Flip cap; exceeding it signals degenerate input.
pub const MAX_FLIPS: usize = 2_000_000;

struct Triangulation {
    tris: Vec<[Vec2; 3]>,
    glue: Vec<[(usize, usize); 3]>,
}

impl Triangulation {
    fn from_surface(s: &TranslationSurface) -> Self {
        let t = s.triangulate();
        let tris = t
            .polygons()
            .iter()
            .map(|p| [p.vertex(0), p.vertex(1), p.vertex(2)])
            .collect();
        let glue = (0..t.polygons().len())
            .map(|i| {
                let g = |e| {
                    let q = t.partner(EdgeRef::new(i, e));
                    (q.polygon, q.edge)
                };
                [g(0), g(1), g(2)]
            })
            .collect();
        Triangulation { tris, glue }
    }

    /// Triangle `t` plus the far vertex of its neighbour across edge `i`,
    /// translated into `t`'s frame: `(p0, p1, p2, d)` where the edge runs
    /// `p0 -> p1`.
    fn quad(&self, t: usize, i: usize) -> (Vec2, Vec2, Vec2, Vec2) {
        let v = &self.tris[t];
        let (p0, p1, p2) = (v[i], v[(i + 1) % 3], v[(i + 2) % 3]);
        let (t2, i2) = self.glue[t][i];
        let w = &self.tris[t2];
        let shift = p0 - w[(i2 + 1) % 3];
        (p0, p1, p2, w[(i2 + 2) % 3] + shift)
    }

    /// Scale-free incircle determinant; positive when the far vertex across
    /// edge `(t, i)` is strictly inside the circumcircle of `t`.
    fn incircle(&self, t: usize, i: usize) -> f64 {
        let (a, b, c, d) = self.quad(t, i);
        incircle(a, b, c, d)
    }

    fn flip(&mut self, t1: usize, i1: usize) {
        let (t2, i2) = self.glue[t1][i1];
        let (p0, p1, p2, d) = self.quad(t1, i1);
        let g1 = self.glue[t1];
        let g2 = self.glue[t2];
        // old edge -> new slot for the four outer edges
        let remap = |e: (usize, usize)| -> (usize, usize) {
            if e == (t1, (i1 + 1) % 3) {
                (t2, 1)
            } else if e == (t1, (i1 + 2) % 3) {
                (t1, 0)
            } else if e == (t2, (i2 + 1) % 3) {
                (t1, 1)
            } else if e == (t2, (i2 + 2) % 3) {
                (t2, 0)
            } else {
                e
            }
        };
        let outer = [
            ((t2, 1), g1[(i1 + 1) % 3]),
            ((t1, 0), g1[(i1 + 2) % 3]),
            ((t1, 1), g2[(i2 + 1) % 3]),
            ((t2, 0), g2[(i2 + 2) % 3]),
        ];
        self.tris[t1] = [p2, p0, d];
        self.tris[t2] = [d, p1, p2];
        self.glue[t1][2] = (t2, 2);
        self.glue[t2][2] = (t1, 2);
        for (slot, old_partner) in outer {
            let partner = remap(old_partner);
            self.glue[slot.0][slot.1] = partner;
            self.glue[partner.0][partner.1] = slot;
        }
    }

    fn make_delaunay(&mut self) -> Result<()> {
        let eps = tolerance::flip();
        let mut queue: VecDeque<(usize, usize)> = (0..self.tris.len())
            .flat_map(|t| (0..3).map(move |i| (t, i)))
            .collect();
        let mut flips = 0usize;
        while let Some((t, i)) = queue.pop_front() {
            if self.incircle(t, i) <= eps {
                continue;
            }
            let (p0, p1, p2, d) = self.quad(t, i);
            // the quadrilateral p0, d, p1, p2 must be strictly convex
            if (d - p0).cross(p2 - p0) <= 0.0 || (p2 - p1).cross(d - p1) <= 0.0 {
                continue;
            }
            let (t2, _) = self.glue[t][i];
            self.flip(t, i);
            flips += 1;
            if flips > MAX_FLIPS {
                return Err(Error::DelaunayNoConvergence { flips });
            }
            queue.extend([(t, 0), (t, 1), (t2, 0), (t2, 1)]);
        }
        Ok(())
    }

    fn into_surface(self, name: &str) -> TranslationSurface {
        let polygons = self
            .tris
            .iter()
            .map(|v| Polygon::new_unchecked(v.to_vec()))
            .collect();
        let gluing = self
            .glue
            .iter()
            .map(|g| g.iter().map(|&(t, e)| Some(EdgeRef::new(t, e))).collect())
            .collect();
        TranslationSurface::from_parts(name.to_string(), polygons, gluing)
    }
}

pub(crate) fn incircle(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> f64 {
    let (ad, bd, cd) = (a - d, b - d, c - d);
    let det = ad.norm_sq() * bd.cross(cd) - bd.norm_sq() * ad.cross(cd) + cd.norm_sq() * ad.cross(bd);
    let scale = ad.norm_sq().max(bd.norm_sq()).max(cd.norm_sq());
    det / (scale * scale)
}

/// Delaunay triangulation by Lawson flips. The edge queue starts in
/// lexicographic `(triangle, edge)` order and degenerate (cocircular) edges
/// are never flipped, so the result is a deterministic function of the input.
pub fn delaunay(s: &TranslationSurface) -> Result<TranslationSurface> {
    s.ensure_valid()?;
    let mut tri = Triangulation::from_surface(s);
    tri.make_delaunay()?;
    let out = tri.into_surface(s.name());
    debug_assert!(out.validate().is_valid(), "{}", out.validate());
    Ok(out)
}

/// Delaunay decomposition: triangles sharing a cocircular edge are merged
/// into convex inscribed cells. Unlike the triangulation, the decomposition
/// is canonical for the underlying surface.
pub fn delaunay_cells(s: &TranslationSurface) -> Result<TranslationSurface> {
    s.ensure_valid()?;
    let mut tri = Triangulation::from_surface(s);
    tri.make_delaunay()?;
    let n = tri.tris.len();
    let eps = tolerance::flip();
    let degenerate = |t: usize, i: usize| tri.incircle(t, i).abs() <= eps;

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for t in 0..n {
        for i in 0..3 {
            if degenerate(t, i) {
                let (u, _) = tri.glue[t][i];
                let (a, b) = (find(&mut parent, t), find(&mut parent, u));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }

    // develop each cell into the plane along its interior edges
    let mut offset = vec![Vec2::ZERO; n];
    let mut placed = vec![false; n];
    let mut cell_of = vec![usize::MAX; n];
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for root in 0..n {
        if placed[root] {
            continue;
        }
        let id = cells.len();
        let mut members = vec![root];
        placed[root] = true;
        cell_of[root] = id;
        let mut k = 0;
        while k < members.len() {
            let t = members[k];
            k += 1;
            for i in 0..3 {
                let (u, j) = tri.glue[t][i];
                if placed[u] || !degenerate(t, i) || find(&mut parent, u) != find(&mut parent, t) {
                    continue;
                }
                offset[u] = tri.tris[t][i] + offset[t] - tri.tris[u][(j + 1) % 3];
                placed[u] = true;
                cell_of[u] = id;
                members.push(u);
            }
        }
        cells.push(members);
    }

    let scale = s.length_scale();
    let tol = tolerance::iso() * scale;
    let interior = |t: usize, i: usize| -> bool {
        let (u, j) = tri.glue[t][i];
        cell_of[u] == cell_of[t]
            && degenerate(t, i)
            && (tri.tris[t][i] + offset[t]).dist(tri.tris[u][(j + 1) % 3] + offset[u]) <= tol
    };

    let mut polygons = Vec::with_capacity(cells.len());
    let mut slot: Vec<[Option<(usize, usize)>; 3]> = vec![[None; 3]; n];
    for (cid, members) in cells.iter().enumerate() {
        let mut boundary: Vec<(usize, usize)> = members
            .iter()
            .flat_map(|&t| (0..3).map(move |i| (t, i)))
            .filter(|&(t, i)| !interior(t, i))
            .collect();
        boundary.sort_unstable();
        let start_of = |(t, i): (usize, usize)| tri.tris[t][i] + offset[t];
        let end_of = |(t, i): (usize, usize)| tri.tris[t][(i + 1) % 3] + offset[t];
        let mut chain = vec![boundary[0]];
        let mut used = vec![false; boundary.len()];
        used[0] = true;
        while chain.len() < boundary.len() {
            let end = end_of(*chain.last().unwrap());
            let next = (0..boundary.len())
                .filter(|&k| !used[k])
                .min_by(|&a, &b| {
                    start_of(boundary[a])
                        .dist(end)
                        .total_cmp(&start_of(boundary[b]).dist(end))
                })
                .ok_or_else(|| Error::Assembly("delaunay cell boundary is not a cycle".into()))?;
            if start_of(boundary[next]).dist(end) > tol {
                return Err(Error::Assembly("delaunay cell boundary is not a cycle".into()));
            }
            used[next] = true;
            chain.push(boundary[next]);
        }
        for (k, &(t, i)) in chain.iter().enumerate() {
            slot[t][i] = Some((cid, k));
        }
        polygons.push(Polygon::new_unchecked(
            chain.iter().map(|&e| start_of(e)).collect(),
        ));
    }
    let mut gluing: Vec<Vec<Option<EdgeRef>>> = polygons.iter().map(|p| vec![None; p.len()]).collect();
    for t in 0..n {
        for i in 0..3 {
            if let Some((c, k)) = slot[t][i] {
                let (u, j) = tri.glue[t][i];
                let (c2, k2) = slot[u][j]
                    .ok_or_else(|| Error::Assembly("cell edge glued to an interior edge".into()))?;
                gluing[c][k] = Some(EdgeRef::new(c2, k2));
            }
        }
    }
    let out = TranslationSurface::from_parts(s.name().to_string(), polygons, gluing);
    out.ensure_valid()?;
    Ok(out)
}
