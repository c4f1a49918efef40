use std::f64::consts::PI;

use log::{debug, warn};
use rayon::prelude::*;
use serde::Serialize;

use super::{saddle_connections, sort_key, SaddleConnection};
use crate::error::{Error, Result};
use crate::flow::{Segment, SurfacePoint, Terminal, Tracer, Trajectory};
use crate::geom::Vec2;
use crate::surface::TranslationSurface;
use crate::tolerance;

/// Separatrix budget as a multiple of the census length.
pub const DEFAULT_BUDGET_FACTOR: f64 = 8.0;

/// Two angular positions on one cone are the same separatrix when closer
/// than this.
const POSITION_MATCH: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cylinder {
    /// Core curve holonomy; its length is the circumference.
    pub holonomy: Vec2,
    /// Unit vector along the core curve.
    pub direction: Vec2,
    pub circumference: f64,
    pub width: f64,
    pub area: f64,
    /// Boundary saddle connections: the component with the cylinder on its
    /// left, then the one with the cylinder on its right, both oriented
    /// along `direction`.
    pub boundary: [Vec<SaddleConnection>; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderDecomposition {
    pub direction: Vec2,
    pub cylinders: Vec<Cylinder>,
    /// Every saddle connection in `direction`.
    pub connections: Vec<SaddleConnection>,
}

impl CylinderDecomposition {
    pub fn total_area(&self) -> f64 {
        self.cylinders.iter().map(|c| c.area).sum()
    }
}

struct Conn {
    sc: SaddleConnection,
    length: f64,
    segments: Vec<Segment>,
}

fn circ_dist(a: f64, b: f64, total: f64) -> f64 {
    let d = (a - b).rem_euclid(total);
    d.min(total - d)
}

fn find_conn(conns: &[Conn], cone: usize, pos: f64, total: f64) -> Option<usize> {
    conns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.sc.start_cone == cone)
        .map(|(i, c)| (i, circ_dist(c.sc.start_angle, pos, total)))
        .filter(|&(_, d)| d < POSITION_MATCH)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

/// Cylinder decomposition in direction `dir`; every separatrix must reach a
/// cone point within `budget`. Vertex classes of angle `2 pi` are treated as
/// marked points: cylinders separated only by them are merged.
pub fn decompose(s: &TranslationSurface, dir: Vec2, budget: f64) -> Result<CylinderDecomposition> {
    if !dir.is_finite() || dir.norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "direction must be finite and nonzero".into(),
        ));
    }
    let tracer = Tracer::new(s)?;
    decompose_with(&tracer, dir, budget)
}

pub(crate) fn decompose_with(tracer: &Tracer<'_>, dir: Vec2, budget: f64) -> Result<CylinderDecomposition> {
    let u = dir.normalized();
    let s = tracer.surface();
    let corners = tracer.corners();
    let not_periodic = || Error::NotPeriodicWithinBudget {
        dir_x: u.x,
        dir_y: u.y,
        budget,
    };

    let mut conns: Vec<Conn> = Vec::new();
    for (cone, class) in corners.classes.iter().enumerate() {
        for &(p, k) in &class.corners {
            if tracer.wedge_position(p, k, u).is_none() {
                continue;
            }
            let tr: Trajectory = tracer.trace_from_corner(p, k, u, budget);
            let (Terminal::HitConePoint { cone: end }, Some(start), Some(arr)) =
                (tr.terminal, tr.start, tr.arrival)
            else {
                return Err(not_periodic());
            };
            debug_assert_eq!(start.cone, cone);
            conns.push(Conn {
                sc: SaddleConnection {
                    holonomy: u * tr.total_length,
                    start_cone: cone,
                    end_cone: end,
                    start_sector: (start.position / (2.0 * PI)).floor() as u32,
                    start_angle: start.position,
                    end_angle: arr.position,
                },
                length: tr.total_length,
                segments: tr.segments,
            });
        }
    }
    if conns.is_empty() {
        return Err(Error::Assembly(
            "surface has no vertices to start separatrices from".into(),
        ));
    }
    let total_of = |cone: usize| corners.classes[cone].total_angle;

    // Chains with the cylinder on their left: after arriving at angular
    // position q, continue along the separatrix leaving at q - pi.
    let mut next = vec![usize::MAX; conns.len()];
    for (i, c) in conns.iter().enumerate() {
        let total = total_of(c.sc.end_cone);
        let target = (c.sc.end_angle - PI).rem_euclid(total);
        next[i] = find_conn(&conns, c.sc.end_cone, target, total)
            .ok_or_else(|| Error::Assembly(format!("no continuation for boundary connection {i}")))?;
    }
    let mut chain_of = vec![usize::MAX; conns.len()];
    let mut chains: Vec<Vec<usize>> = Vec::new();
    for i in 0..conns.len() {
        if chain_of[i] != usize::MAX {
            continue;
        }
        let id = chains.len();
        let mut chain = Vec::new();
        let mut j = i;
        while chain_of[j] == usize::MAX {
            chain_of[j] = id;
            chain.push(j);
            j = next[j];
        }
        if chain_of[j] != id || j != i {
            return Err(Error::Assembly(
                "boundary successor map is not a permutation".into(),
            ));
        }
        chains.push(chain);
    }

    // Each chain bounds one cylinder from below; find the chain bounding it
    // from above by flowing perpendicular to `u` into the cylinder.
    let n = u.perp();
    let area = s.area();
    let mut pieces: Vec<Vec<(usize, Vec2, Vec2)>> = vec![Vec::new(); s.polygons().len()];
    for (i, c) in conns.iter().enumerate() {
        for seg in &c.segments {
            pieces[seg.polygon].push((i, seg.entry, seg.exit));
        }
    }
    let hit = tolerance::hit() * s.length_scale();
    let mut width = vec![0.0; chains.len()];
    let mut top = vec![usize::MAX; chains.len()];
    let mut circumference = vec![0.0; chains.len()];
    for (ci, chain) in chains.iter().enumerate() {
        circumference[ci] = chain.iter().map(|&i| conns[i].length).sum();
        let &longest = chain
            .iter()
            .max_by(|&&a, &&b| conns[a].length.total_cmp(&conns[b].length))
            .expect("chains are nonempty");
        let start = point_along(&conns[longest].segments, conns[longest].length / 2.0);
        let reach = area / circumference[ci] * (1.0 + 1e-6) + 4.0 * hit;
        let tr = tracer.trace(start, n, reach)?;
        let mut travelled = 0.0;
        let mut found: Option<(f64, usize)> = None;
        'segs: for seg in &tr.segments {
            let d = seg.exit - seg.entry;
            let len = d.norm();
            let mut best: Option<(f64, usize)> = None;
            for &(i, a, b) in &pieces[seg.polygon] {
                let den = n.cross(u);
                let s_par = (a - seg.entry).cross(u) / den;
                if travelled + s_par <= hit || s_par < -hit || s_par > len + hit {
                    continue;
                }
                let x = seg.entry + n * s_par;
                let lam = (x - a).dot(u);
                if lam < -hit || lam > (b - a).norm() + hit {
                    continue;
                }
                if best.is_none_or(|(bs, _)| s_par < bs) {
                    best = Some((s_par, i));
                }
            }
            if let Some((s_par, i)) = best {
                found = Some((travelled + s_par, i));
                break 'segs;
            }
            travelled += len;
        }
        match (found, tr.terminal, tr.arrival) {
            (Some((w, i)), _, _) => {
                width[ci] = w;
                top[ci] = chain_of[i];
            }
            (None, Terminal::HitConePoint { cone }, Some(arr)) => {
                width[ci] = tr.total_length;
                let total = total_of(cone);
                let j = find_conn(&conns, cone, (arr.position + PI / 2.0).rem_euclid(total), total)
                    .ok_or_else(|| Error::Assembly("perpendicular met an unmatched cone".into()))?;
                top[ci] = chain_of[j];
            }
            _ => {
                return Err(Error::Assembly(format!(
                    "no opposite boundary found for cylinder {ci}"
                )))
            }
        }
    }

    // merge across boundaries made only of marked points
    let regular = |chain: &Vec<usize>| {
        chain
            .iter()
            .all(|&i| corners.classes[conns[i].sc.start_cone].multiple == 1)
    };
    let mut parent: Vec<usize> = (0..chains.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for ci in 0..chains.len() {
        if regular(&chains[top[ci]]) {
            let (a, b) = (find(&mut parent, ci), find(&mut parent, top[ci]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = vec![usize::MAX; chains.len()];
    for ci in 0..chains.len() {
        let r = find(&mut parent, ci);
        if group_of[r] == usize::MAX {
            group_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of[r]].push(ci);
    }

    let scale = s.length_scale();
    let to_scs = |chain: &Vec<usize>| chain.iter().map(|&i| conns[i].sc).collect::<Vec<_>>();
    let mut cylinders = Vec::with_capacity(groups.len());
    for members in &groups {
        let c0 = circumference[members[0]];
        if members
            .iter()
            .any(|&m| (circumference[m] - c0).abs() > 1e-7 * c0.max(scale))
        {
            return Err(Error::Assembly(
                "merged cylinders disagree on circumference".into(),
            ));
        }
        let w: f64 = members.iter().map(|&m| width[m]).sum();
        let bottom = members
            .iter()
            .copied()
            .find(|&m| !regular(&chains[m]))
            .unwrap_or(members[0]);
        let upper = members
            .iter()
            .copied()
            .find(|&m| !regular(&chains[top[m]]))
            .unwrap_or(members[0]);
        cylinders.push(Cylinder {
            holonomy: u * c0,
            direction: u,
            circumference: c0,
            width: w,
            area: c0 * w,
            boundary: [to_scs(&chains[bottom]), to_scs(&chains[top[upper]])],
        });
    }
    cylinders.sort_by(|a, b| {
        a.circumference
            .total_cmp(&b.circumference)
            .then(a.width.total_cmp(&b.width))
    });
    let total: f64 = cylinders.iter().map(|c| c.area).sum();
    if (total - area).abs() > 1e-6 * area {
        return Err(Error::Assembly(format!(
            "cylinder areas sum to {total}, surface area is {area}"
        )));
    }
    Ok(CylinderDecomposition {
        direction: u,
        cylinders,
        connections: conns.into_iter().map(|c| c.sc).collect(),
    })
}

fn point_along(segments: &[Segment], at: f64) -> SurfacePoint {
    let mut acc = 0.0;
    for seg in segments {
        let len = seg.length();
        if acc + len >= at {
            let d = (seg.exit - seg.entry) * (1.0 / len);
            return SurfacePoint::new(seg.polygon, seg.entry + d * (at - acc));
        }
        acc += len;
    }
    let last = segments.last().expect("nonempty trajectory");
    SurfacePoint::new(last.polygon, last.exit)
}

/// How each cylinder contributes to a count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    #[default]
    Unit,
    InverseArea,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderOptions {
    pub budget_factor: f64,
}

impl Default for CylinderOptions {
    fn default() -> Self {
        CylinderOptions {
            budget_factor: DEFAULT_BUDGET_FACTOR,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedDirection {
    pub direction: Vec2,
    pub shortest_connection: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderCensus {
    pub length: f64,
    /// One entry per cylinder and sign of its holonomy, sorted by length then
    /// angle.
    pub cylinders: Vec<Cylinder>,
    pub skipped: Vec<SkippedDirection>,
}

impl CylinderCensus {
    pub fn count(&self, t: f64) -> usize {
        self.cylinders.partition_point(|c| c.circumference <= t)
    }

    pub fn weighted_count(&self, t: f64, weight: Weight) -> f64 {
        self.cylinders[..self.count(t)]
            .iter()
            .map(|c| match weight {
                Weight::Unit => 1.0,
                Weight::InverseArea => 1.0 / c.area,
            })
            .sum()
    }
}

/// Distinct directions of the given connections, sign-normalized to the
/// upper half plane (with `(1, 0)` standing for the horizontal), each with
/// the length of its shortest connection.
pub fn candidate_directions(scs: &[SaddleConnection]) -> Vec<(Vec2, f64)> {
    let tol = tolerance::direction();
    let mut dirs: Vec<(f64, Vec2, f64)> = scs
        .iter()
        .map(|c| {
            let len = c.length();
            let mut d = c.holonomy * (1.0 / len);
            let mut a = d.y.atan2(d.x);
            if a < 0.0 {
                a += PI;
                d = -d;
            }
            if a >= PI - tol {
                a -= PI;
                d = -d;
            }
            if a < tol {
                a = a.max(0.0);
            }
            (a, d, len)
        })
        .collect();
    dirs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.total_cmp(&b.2)));
    let mut out: Vec<(f64, Vec2, f64)> = Vec::new();
    for (a, d, len) in dirs {
        match out.last_mut() {
            Some(last) if a - last.0 <= tol => {
                if len < last.2 {
                    *last = (last.0, d, len);
                }
            }
            _ => out.push((a, d, len)),
        }
    }
    out.into_iter().map(|(_, d, len)| (d, len)).collect()
}

/// All cylinders of circumference at most `length`, each listed once for
/// each sign of its holonomy.
pub fn cylinders_up_to(s: &TranslationSurface, length: f64) -> Result<CylinderCensus> {
    cylinders_up_to_with(s, length, CylinderOptions::default())
}

pub fn cylinders_up_to_with(
    s: &TranslationSurface,
    length: f64,
    opts: CylinderOptions,
) -> Result<CylinderCensus> {
    let scs = saddle_connections(s, length)?;
    let dirs = candidate_directions(&scs);
    let tracer = Tracer::new(s)?;
    let budget = opts.budget_factor * length;
    let results: Vec<Result<std::result::Result<CylinderDecomposition, SkippedDirection>>> = dirs
        .par_iter()
        .map(|&(d, shortest)| match decompose_with(&tracer, d, budget) {
            Ok(dec) => Ok(Ok(dec)),
            Err(e @ Error::NotPeriodicWithinBudget { .. }) => Ok(Err(SkippedDirection {
                direction: d,
                shortest_connection: shortest,
                reason: e.to_string(),
            })),
            Err(e) => Err(e),
        })
        .collect();
    let mut cylinders = Vec::new();
    let mut skipped = Vec::new();
    let limit = length * (1.0 + 1e-12);
    for r in results {
        match r? {
            Ok(dec) => {
                for c in dec.cylinders {
                    if c.circumference <= limit {
                        let mut neg = c.clone();
                        neg.holonomy = -c.holonomy;
                        neg.direction = -c.direction;
                        cylinders.push(c);
                        cylinders.push(neg);
                    }
                }
            }
            Err(sk) => {
                debug!(
                    "direction ({:.6}, {:.6}) skipped: {}",
                    sk.direction.x, sk.direction.y, sk.reason
                );
                skipped.push(sk);
            }
        }
    }
    if !skipped.is_empty() {
        warn!(
            "{} of {} candidate directions did not close within budget {budget}",
            skipped.len(),
            dirs.len()
        );
    }
    cylinders.sort_by(|a, b| {
        let (la, aa) = sort_key(a.holonomy);
        let (lb, ab) = sort_key(b.holonomy);
        a.circumference
            .total_cmp(&b.circumference)
            .then(la.total_cmp(&lb))
            .then(aa.total_cmp(&ab))
            .then(a.width.total_cmp(&b.width))
    });
    Ok(CylinderCensus {
        length,
        cylinders,
        skipped,
    })
}
