//! Translation equivalence through Delaunay decompositions.

use std::collections::VecDeque;

use super::{delaunay_cells, EdgeRef, TranslationSurface};
use crate::error::Result;
use crate::tolerance;

/// True when some bijection between the Delaunay cells of `a` and `b`
/// respects the gluings and matches every edge vector within
/// `tolerance::iso()` (relative to the length scale).
///
/// Every cell of `b` and every rotation is tried as the image of one fixed
/// cell of `a`, so ties in the decomposition do not matter.
pub fn is_isomorphic(a: &TranslationSurface, b: &TranslationSurface) -> Result<bool> {
    a.ensure_valid()?;
    b.ensure_valid()?;
    let area = a.area();
    if (area - b.area()).abs() > 1e-9 * area.max(b.area()) {
        return Ok(false);
    }
    let mut ca: Vec<u32> = a
        .cone_points_unchecked()
        .iter()
        .map(|c| c.angle_multiple)
        .collect();
    let mut cb: Vec<u32> = b
        .cone_points_unchecked()
        .iter()
        .map(|c| c.angle_multiple)
        .collect();
    ca.sort_unstable();
    cb.sort_unstable();
    if ca != cb {
        return Ok(false);
    }
    let da = delaunay_cells(a)?;
    let db = delaunay_cells(b)?;
    if da.polygons().len() != db.polygons().len() {
        return Ok(false);
    }
    let mut sa: Vec<usize> = da.polygons().iter().map(|p| p.len()).collect();
    let mut sb: Vec<usize> = db.polygons().iter().map(|p| p.len()).collect();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Ok(false);
    }
    let tol = tolerance::iso() * da.length_scale().max(db.length_scale());
    // seed on the cell with the fewest candidate images
    let seed = (0..da.polygons().len())
        .min_by_key(|&i| {
            let k = da.polygon(i).len();
            sb.iter().filter(|&&m| m == k).count()
        })
        .unwrap_or(0);
    for target in 0..db.polygons().len() {
        if db.polygon(target).len() != da.polygon(seed).len() {
            continue;
        }
        for rot in 0..da.polygon(seed).len() {
            if extends(&da, &db, seed, target, rot, tol) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn cell_matches(
    a: &TranslationSurface,
    b: &TranslationSurface,
    i: usize,
    j: usize,
    rot: usize,
    tol: f64,
) -> bool {
    let (pa, pb) = (a.polygon(i), b.polygon(j));
    pa.len() == pb.len() && (0..pa.len()).all(|e| pa.edge(e).dist(pb.edge(e + rot)) <= tol)
}

fn extends(
    a: &TranslationSurface,
    b: &TranslationSurface,
    seed: usize,
    target: usize,
    rot: usize,
    tol: f64,
) -> bool {
    let n = a.polygons().len();
    let mut map: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut used = vec![false; b.polygons().len()];
    if !cell_matches(a, b, seed, target, rot, tol) {
        return false;
    }
    map[seed] = Some((target, rot));
    used[target] = true;
    let mut queue = VecDeque::from([seed]);
    while let Some(i) = queue.pop_front() {
        let (j, r) = map[i].expect("queued cells are mapped");
        let k = a.polygon(i).len();
        for e in 0..k {
            let pa = a.partner(EdgeRef::new(i, e));
            let pb = b.partner(EdgeRef::new(j, (e + r) % k));
            let kb = b.polygon(pb.polygon).len();
            if a.polygon(pa.polygon).len() != kb {
                return false;
            }
            let r2 = (pb.edge + kb - pa.edge) % kb;
            match map[pa.polygon] {
                Some(m) => {
                    if m != (pb.polygon, r2) {
                        return false;
                    }
                }
                None => {
                    if used[pb.polygon] || !cell_matches(a, b, pa.polygon, pb.polygon, r2, tol) {
                        return false;
                    }
                    map[pa.polygon] = Some((pb.polygon, r2));
                    used[pb.polygon] = true;
                    queue.push_back(pa.polygon);
                }
            }
        }
    }
    // connected surfaces map every cell
    map.iter().all(Option::is_some)
}
