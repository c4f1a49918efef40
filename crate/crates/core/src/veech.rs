//! Veech group elements and orbit counting for Fuchsian groups.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{veech_unipotent, Mat2, Vec2};
use crate::surface::{is_isomorphic, TranslationSurface};
use crate::tolerance;

/// Whether `g` maps `s` to a translation-equivalent surface.
pub fn stabilizes(g: &Mat2, s: &TranslationSurface) -> Result<bool> {
    let image = s.apply_matrix(g)?;
    is_isomorphic(&image, s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuchsianGroupSpec {
    pub name: String,
    pub generators: Vec<Mat2>,
    /// Hyperbolic area of the quotient, as declared for the group.
    pub covolume: f64,
}

impl FuchsianGroupSpec {
    pub fn new(name: impl Into<String>, generators: Vec<Mat2>, covolume: f64) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidParameter("a group needs generators".into()));
        }
        for g in &generators {
            if !g.is_finite() {
                return Err(Error::NonFinite("generator"));
            }
            if (g.det() - 1.0).abs() > 1e-10 {
                return Err(Error::NotUnimodular { det: g.det() });
            }
        }
        if !(covolume.is_finite() && covolume > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "covolume must be positive, got {covolume}"
            )));
        }
        Ok(FuchsianGroupSpec {
            name: name.into(),
            generators,
            covolume,
        })
    }
}

/// Veech group of the double n-gon: the unipotent `u_n` and the rotation by
/// `2 pi / n`, with covolume `(n - 2) pi / n`.
pub fn gamma_n(n: u32) -> Result<FuchsianGroupSpec> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "gamma_n needs an odd n >= 5, got {n}"
        )));
    }
    let nf = n as f64;
    FuchsianGroupSpec::new(
        format!("Gamma_{n}"),
        vec![veech_unipotent(n), Mat2::rotation(2.0 * PI / nf)],
        (nf - 2.0) * PI / nf,
    )
}

/// `SL(2, Z)` with generators `(1 1; 0 1)` and `(0 -1; 1 0)`; covolume `pi/3`.
pub fn sl2z() -> FuchsianGroupSpec {
    FuchsianGroupSpec::new(
        "SL(2,Z)",
        vec![Mat2::new(1.0, 1.0, 0.0, 1.0), Mat2::new(0.0, -1.0, 1.0, 0.0)],
        PI / 3.0,
    )
    .expect("static generators")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitCount {
    pub vector: Vec2,
    pub radius: f64,
    pub count: usize,
    /// Orbit vectors visited (all with norm at most `pruning_factor * radius`).
    pub explored: usize,
    pub pruning_factor: f64,
    /// Asymptotic prediction `covolume^-1 |<g v', v>| / (|v|^3 |v'|) T^2`
    /// for a parabolic `g` fixing `v`, when one was supplied.
    pub predicted: Option<f64>,
}

impl OrbitCount {
    pub fn ratio(&self) -> Option<f64> {
        self.predicted.map(|p| self.count as f64 / p)
    }
}

/// Cap on stored orbit vectors.
pub const MAX_ORBIT: usize = 20_000_000;

/// Hash set of planar points with tolerance `tol`.
struct PointSet {
    cell: f64,
    map: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Vec2>,
}

impl PointSet {
    fn new(tol: f64) -> Self {
        PointSet {
            cell: tol,
            map: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn key(&self, v: Vec2) -> (i64, i64) {
        ((v.x / self.cell).floor() as i64, (v.y / self.cell).floor() as i64)
    }

    /// Inserts `v` unless a point within the tolerance is present.
    fn insert(&mut self, v: Vec2) -> bool {
        let (kx, ky) = self.key(v);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.map.get(&(kx + dx, ky + dy)) {
                    if ids.iter().any(|&i| self.points[i].dist(v) <= self.cell) {
                        return false;
                    }
                }
            }
        }
        self.map.entry((kx, ky)).or_default().push(self.points.len());
        self.points.push(v);
        true
    }
}

/// Breadth-first enumeration of the orbit `grp . v`, expanding only vectors
/// of norm at most `k * t` and counting those of norm at most `t`.
/// `parabolic`, if given, must fix `v` and enables the prediction.
pub fn orbit_count(
    grp: &FuchsianGroupSpec,
    v: Vec2,
    t: f64,
    k: f64,
    parabolic: Option<&Mat2>,
) -> Result<OrbitCount> {
    if !v.is_finite() || v.norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "orbit vector must be finite and nonzero".into(),
        ));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {t}"
        )));
    }
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "pruning factor must be >= 1, got {k}"
        )));
    }
    let predicted = match parabolic {
        Some(g) => {
            if g.apply(v).dist(v) > 1e-8 * v.norm() {
                return Err(Error::InvalidParameter(
                    "parabolic does not fix the vector".into(),
                ));
            }
            Some(gutkin_judge(grp.covolume, g, v, t))
        }
        None => None,
    };
    let moves: Vec<Mat2> = grp.generators.iter().flat_map(|g| [*g, g.inverse()]).collect();
    let limit = k * t;
    let mut seen = PointSet::new(1e-8 * v.norm());
    seen.insert(v);
    let mut queue = VecDeque::from([v]);
    while let Some(w) = queue.pop_front() {
        for g in &moves {
            let x = g.apply(w);
            if x.norm() > limit * (1.0 + 1e-12) {
                continue;
            }
            if seen.insert(x) {
                if seen.points.len() > MAX_ORBIT {
                    return Err(Error::CapExceeded(format!(
                        "orbit enumeration stored more than {MAX_ORBIT} vectors"
                    )));
                }
                queue.push_back(x);
            }
        }
    }
    let count = seen
        .points
        .iter()
        .filter(|p| p.norm() <= t * (1.0 + 1e-12))
        .count();
    Ok(OrbitCount {
        vector: v,
        radius: t,
        count,
        explored: seen.points.len(),
        pruning_factor: k,
        predicted,
    })
}

/// `covolume^-1 |<g v', v>| / (|v|^3 |v'|) t^2` with `v'` perpendicular to `v`.
pub fn gutkin_judge(covolume: f64, g: &Mat2, v: Vec2, t: f64) -> f64 {
    let vp = v.perp();
    (g.apply(vp).dot(v)).abs() / (v.norm().powi(3) * vp.norm()) / covolume * t * t
}

/// Shortest word in the generators and their inverses (up to `max_len`
/// letters) that is parabolic and fixes `v`.
pub fn find_parabolic(grp: &FuchsianGroupSpec, v: Vec2, max_len: usize) -> Option<Mat2> {
    let tol = tolerance::det().max(1e-9);
    let moves: Vec<Mat2> = grp.generators.iter().flat_map(|g| [*g, g.inverse()]).collect();
    let mut layer = vec![Mat2::IDENTITY];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * moves.len());
        for w in &layer {
            for g in &moves {
                let m = *w * *g;
                let near_identity = m.max_diff(&Mat2::IDENTITY) <= tol;
                if !near_identity && (m.trace() - 2.0).abs() <= tol && m.apply(v).dist(v) <= tol * v.norm() {
                    return Some(m);
                }
                next.push(m);
            }
        }
        layer = next;
    }
    None
}

/// The lattice calibration: `SL(2, Z)` orbit of `(1, 0)` against the formula
/// evaluated with the parabolic `(1 1; 0 1)`.
pub fn sl2z_calibration(t: f64, k: f64) -> Result<OrbitCount> {
    let grp = sl2z();
    orbit_count(
        &grp,
        Vec2::new(1.0, 0.0),
        t,
        k,
        Some(&Mat2::new(1.0, 1.0, 0.0, 1.0)),
    )
}
