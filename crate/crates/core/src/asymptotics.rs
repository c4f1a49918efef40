//! Counting functions, closed-form quadratic constants, Siegel-Veech
//! transforms and circle averages.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builders::{build, triangle_p, Family};
use crate::census::{cylinders_up_to, saddle_connections, CylinderCensus};
use crate::error::{Error, Result};
use crate::geom::{Mat2, Vec2};
use crate::surface::{delaunay, TranslationSurface};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountKind {
    Cylinders,
    SaddleConnections,
}

/// How often a cylinder (or saddle connection) with holonomy `v` is counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signs {
    /// Once for `v` and once for `-v`, as with primitive lattice vectors.
    #[default]
    Both,
    /// Once per pair `{v, -v}`.
    Once,
}

impl std::str::FromStr for Signs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "both" => Ok(Signs::Both),
            "once" => Ok(Signs::Once),
            other => Err(Error::InvalidParameter(format!(
                "unknown sign convention '{other}'"
            ))),
        }
    }
}

impl Signs {
    /// Converts a count that lists both signs.
    pub fn from_signed(self, n: usize) -> usize {
        match self {
            Signs::Both => n,
            Signs::Once => n / 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountRow {
    pub t: f64,
    pub count: usize,
    pub count_over_t2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountSeries {
    pub surface_name: String,
    pub kind: CountKind,
    pub signs: Signs,
    pub rows: Vec<CountRow>,
    pub predicted_constant: Option<f64>,
}

impl CountSeries {
    pub fn with_prediction(mut self, c: f64) -> Self {
        self.predicted_constant = Some(c);
        self
    }

    /// `count_over_t2 / predicted` per row.
    pub fn ratios(&self) -> Option<Vec<f64>> {
        self.predicted_constant
            .map(|c| self.rows.iter().map(|r| r.count_over_t2 / c).collect())
    }
}

fn check_ts(ts: &[f64]) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::InvalidParameter("no radii given".into()));
    }
    if ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) || ts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "radii must be positive and increasing".into(),
        ));
    }
    Ok(())
}

/// Counts at each radius from one census at the largest radius.
pub fn count_series(
    s: &TranslationSurface,
    kind: CountKind,
    ts: &[f64],
    signs: Signs,
) -> Result<CountSeries> {
    check_ts(ts)?;
    let tmax = *ts.last().expect("nonempty");
    let lengths: Vec<f64> = match kind {
        CountKind::Cylinders => cylinders_up_to(s, tmax)?
            .cylinders
            .iter()
            .map(|c| c.circumference)
            .collect(),
        CountKind::SaddleConnections => saddle_connections(s, tmax)?.iter().map(|c| c.length()).collect(),
    };
    Ok(series_from_lengths(s.name(), kind, &lengths, ts, signs))
}

/// Series from sorted lengths listing both signs of every holonomy.
pub fn series_from_lengths(
    name: &str,
    kind: CountKind,
    sorted: &[f64],
    ts: &[f64],
    signs: Signs,
) -> CountSeries {
    let rows = ts
        .iter()
        .map(|&t| {
            let count = signs.from_signed(sorted.partition_point(|&l| l <= t * (1.0 + 1e-12)));
            CountRow {
                t,
                count,
                count_over_t2: count as f64 / (t * t),
            }
        })
        .collect();
    CountSeries {
        surface_name: name.to_string(),
        kind,
        signs,
        rows,
        predicted_constant: None,
    }
}

pub fn series_from_census(name: &str, census: &CylinderCensus, ts: &[f64], signs: Signs) -> CountSeries {
    let lengths: Vec<f64> = census.cylinders.iter().map(|c| c.circumference).collect();
    series_from_lengths(name, CountKind::Cylinders, &lengths, ts, signs)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Prediction {
    Xn {
        n: u32,
    },
    Sn {
        n: u32,
    },
    /// Same count as `Sn`, normalized by the area of the bare triangle.
    Pn {
        n: u32,
    },
    Torus {
        area: f64,
    },
}

impl std::str::FromStr for Prediction {
    type Err = Error;

    /// `xn:5`, `sn:7`, `pn:5`, `torus:4`.
    fn from_str(s: &str) -> Result<Self> {
        let (fam, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("expected family:n, got '{s}'")))?;
        let bad = || Error::InvalidParameter(format!("bad prediction argument '{arg}'"));
        match fam.to_ascii_lowercase().as_str() {
            "xn" => Ok(Prediction::Xn {
                n: arg.parse().map_err(|_| bad())?,
            }),
            "sn" => Ok(Prediction::Sn {
                n: arg.parse().map_err(|_| bad())?,
            }),
            "pn" => Ok(Prediction::Pn {
                n: arg.parse().map_err(|_| bad())?,
            }),
            "torus" | "square" => Ok(Prediction::Torus {
                area: arg.parse().map_err(|_| bad())?,
            }),
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }
}

fn odd_n(n: u32) -> Result<f64> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("needs an odd n >= 5, got {n}")));
    }
    Ok(n as f64)
}

/// Area of the double n-gon of circumradius 1.
pub fn area_xn(n: u32) -> f64 {
    let nf = n as f64;
    nf * (2.0 * PI / nf).sin()
}

/// `pi / zeta(2)`.
const PI_OVER_ZETA2: f64 = 6.0 / PI;

impl Prediction {
    /// The convention the closed form counts in. The lattice constant counts
    /// primitive vectors with both signs; the orbit-counting constants of the
    /// n-gon families come out of the Fuchsian lemma, which (as the `SL(2,Z)`
    /// calibration shows) counts orbit points up to `-I`.
    pub fn signs(&self) -> Signs {
        match self {
            Prediction::Torus { .. } => Signs::Both,
            _ => Signs::Once,
        }
    }
}

/// Limit of `N(S, T) / T^2` in the convention of [`Prediction::signs`].
pub fn predicted_constant(p: Prediction) -> Result<f64> {
    Ok(match p {
        Prediction::Xn { n } => {
            let nf = odd_n(n)?;
            nf * nf * (nf * nf - 1.0) / (24.0 * (nf - 2.0) * PI) / area_xn(n)
        }
        Prediction::Sn { n } => {
            let nf = odd_n(n)?;
            nf * (nf - 1.0) * (nf * nf + nf + 3.0) / (12.0 * (nf - 2.0) * PI) / area_xn(n)
        }
        Prediction::Pn { n } => {
            let nf = odd_n(n)?;
            let area_p = triangle_p(n)?.area();
            PI_OVER_ZETA2 * (nf - 1.0) * (nf * nf + nf + 3.0) / (144.0 * (nf - 2.0)) / area_p
        }
        Prediction::Torus { area } => {
            if !(area.is_finite() && area > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "area must be positive, got {area}"
                )));
            }
            PI_OVER_ZETA2 / area
        }
    })
}

/// The cover's constant as twice the base constant plus the branch-point
/// correction, both scaled by `area(X_n)`: returns `(lhs, rhs)`.
pub fn cover_constant_split(n: u32) -> Result<(f64, f64)> {
    let nf = odd_n(n)?;
    let a = area_xn(n);
    let lhs = predicted_constant(Prediction::Sn { n })? * a;
    let rhs = 2.0 * predicted_constant(Prediction::Xn { n })? * a + nf * (nf - 1.0) / (4.0 * (nf - 2.0) * PI);
    Ok((lhs, rhs))
}

/// `sum_{j=1}^{(n-1)/2} 1/sin^2(pi (2j-1)/n)` and `(n^2 - 1)/6`.
pub fn sum_identity_check(n: u32) -> Result<(f64, f64)> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("needs an odd n >= 3, got {n}")));
    }
    let nf = n as f64;
    let lhs = (1..=(n - 1) / 2)
        .map(|j| 1.0 / (PI * (2 * j - 1) as f64 / nf).sin().powi(2))
        .sum();
    Ok((lhs, (nf * nf - 1.0) / 6.0))
}

/// Cylinder heights and widths `(h_j, w_j)` of the vertical decomposition of
/// the double n-gon.
pub fn heights_widths(n: u32) -> Vec<(f64, f64)> {
    let nf = n as f64;
    (1..=(n - 1) / 2)
        .map(|j| {
            let s = (PI * (2 * j - 1) as f64 / nf).sin();
            (4.0 * s * (PI / nf).cos(), 2.0 * s * (PI / nf).sin())
        })
        .collect()
}

/// Test functions for Siegel-Veech transforms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum Region {
    Disc {
        radius: f64,
    },
    /// Vertices `(1,1), (0,1), (0,1/2), (1/2,1/2)`.
    Trapezoid,
}

impl Region {
    /// Closed region, with `1e-12` slack so lattice points on the boundary
    /// survive rounding.
    pub fn contains(&self, v: Vec2) -> bool {
        const SLACK: f64 = 1e-12;
        match *self {
            Region::Disc { radius } => v.norm() <= radius * (1.0 + SLACK),
            Region::Trapezoid => {
                v.y >= 0.5 - SLACK && v.y <= 1.0 + SLACK && v.x >= -SLACK && v.x <= v.y + SLACK
            }
        }
    }

    pub fn support_radius(&self) -> f64 {
        match *self {
            Region::Disc { radius } => radius,
            Region::Trapezoid => SQRT_2,
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Region::Disc { radius } => PI * radius * radius,
            Region::Trapezoid => 3.0 / 8.0,
        }
    }
}

/// `sum f(v)` over cylinder holonomies (both signs) or saddle connections.
pub fn sv_transform(s: &TranslationSurface, f: Region, kind: CountKind) -> Result<f64> {
    let r = f.support_radius() * (1.0 + 1e-9);
    let n = match kind {
        CountKind::Cylinders => cylinders_up_to(s, r)?
            .cylinders
            .iter()
            .filter(|c| f.contains(c.holonomy))
            .count(),
        CountKind::SaddleConnections => saddle_connections(s, r)?
            .iter()
            .filter(|c| f.contains(c.holonomy))
            .count(),
    };
    Ok(n as f64)
}

/// `a_t r_theta`.
pub fn circle_element(t: f64, theta: f64) -> Mat2 {
    Mat2::diag(t) * Mat2::rotation(theta)
}

/// Midpoint rule for `int_0^{2pi} h(a_t r_theta v) d theta` with `h` the
/// trapezoid indicator.
pub fn trapezoid_ellipse_integral(v: Vec2, t: f64, grid: usize) -> Result<f64> {
    if grid < 1000 {
        return Err(Error::InvalidParameter(format!(
            "grid must be at least 1000, got {grid}"
        )));
    }
    if !v.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite("integrand"));
    }
    let dtheta = 2.0 * PI / grid as f64;
    let hits = (0..grid)
        .filter(|&i| {
            let theta = (i as f64 + 0.5) * dtheta;
            Region::Trapezoid.contains(circle_element(t, theta).apply(v))
        })
        .count();
    Ok(hits as f64 * dtheta)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircleAverage {
    pub t: f64,
    pub grid: usize,
    /// `N(T) - N(T/2)`.
    pub lhs: f64,
    /// `T^2 sum_theta hhat(a_t r_theta S) dtheta`.
    pub rhs: f64,
    /// `lhs / rhs`, absent when the annulus is empty.
    pub ratio: Option<f64>,
}

/// Compares the annulus count with the circle average of the trapezoid
/// transform at `t = ln T`. Each grid angle is an independent census of the
/// Delaunay-renormalized surface `a_t r_theta S`.
pub fn circle_average_check(s: &TranslationSurface, big_t: f64, grid: usize) -> Result<CircleAverage> {
    if grid < 360 {
        return Err(Error::InvalidParameter(format!(
            "grid must be at least 360, got {grid}"
        )));
    }
    if !(big_t.is_finite() && big_t > 1.0) {
        return Err(Error::InvalidParameter(format!("T must exceed 1, got {big_t}")));
    }
    let census = cylinders_up_to(s, big_t)?;
    let lhs = (census.count(big_t) - census.count(big_t / 2.0)) as f64;
    let t = big_t.ln();
    let dtheta = 2.0 * PI / grid as f64;
    let values: Vec<Result<f64>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let theta = (i as f64 + 0.5) * dtheta;
            let moved = delaunay(&s.apply_matrix(&circle_element(t, theta))?)?;
            sv_transform(&moved, Region::Trapezoid, CountKind::Cylinders)
        })
        .collect();
    let mut total = 0.0;
    for v in values {
        total += v?;
    }
    let rhs = big_t * big_t * total * dtheta;
    Ok(CircleAverage {
        t: big_t,
        grid,
        lhs,
        rhs,
        ratio: (lhs > 0.0 && rhs > 0.0).then(|| lhs / rhs),
    })
}

/// `sum_{k < levels} [N(T/2^k) - N(T/2^{k+1})] + N(T/2^levels)`, which must
/// equal `N(T)`.
pub fn telescoped_count(census: &CylinderCensus, t: f64, levels: u32) -> usize {
    let mut sum = 0usize;
    let mut r = t;
    for _ in 0..levels {
        sum += census.count(r) - census.count(r / 2.0);
        r /= 2.0;
    }
    sum + census.count(r)
}

/// Number of cylinders with holonomy in the upper half plane, length at most
/// `eps` and area within `rel_tol` of `class_area`.
pub fn short_cylinders_in_class(
    s: &TranslationSurface,
    eps: f64,
    class_area: f64,
    rel_tol: f64,
) -> Result<usize> {
    let census = cylinders_up_to(s, eps)?;
    Ok(census
        .cylinders
        .iter()
        .filter(|c| c.holonomy.y > 0.0 || (c.holonomy.y == 0.0 && c.holonomy.x > 0.0))
        .filter(|c| (c.area - class_area).abs() <= rel_tol * class_area)
        .count())
}

/// `min` and `max` of `e^{2t} int h(a_t r_theta v) d theta` over `vs`.
pub fn ellipse_bracket(vs: &[Vec2], t: f64, grid: usize) -> Result<(f64, f64)> {
    if vs.is_empty() {
        return Err(Error::InvalidParameter("no sample vectors".into()));
    }
    let scale = (2.0 * t).exp();
    let values: Vec<Result<f64>> = vs
        .par_iter()
        .map(|&v| Ok(trapezoid_ellipse_integral(v, t, grid)? * scale))
        .collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        let v = v?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverPattern {
    /// Sorted circumferences of the vertical decomposition.
    pub lengths: Vec<f64>,
    /// The (1-based) index `k` whose class appears as `h_k, h_k, 2h_k, 2h_k`
    /// while every other `h_j` appears twice; absent if no index fits.
    pub k: Option<usize>,
}

/// Classifies the vertical decomposition of `g S_n` against the circumferences
/// `h_j` of the base double n-gon.
pub fn cover_pattern(n: u32, g: &Mat2, rel_tol: f64) -> Result<CoverPattern> {
    odd_n(n)?;
    let s = build(Family::Sn, n)?.apply_matrix(g)?;
    let hs: Vec<f64> = heights_widths(n).iter().map(|p| p.0).collect();
    let budget = 16.0 * hs.iter().cloned().fold(0.0, f64::max);
    let d = crate::census::decompose(&s, Vec2::new(0.0, 1.0), budget)?;
    let mut lengths: Vec<f64> = d.cylinders.iter().map(|c| c.circumference).collect();
    lengths.sort_by(f64::total_cmp);
    let k = (0..hs.len()).find(|&k| {
        let mut want: Vec<f64> = hs.iter().flat_map(|&h| [h, h]).collect();
        want.extend([2.0 * hs[k], 2.0 * hs[k]]);
        want.sort_by(f64::total_cmp);
        want.len() == lengths.len()
            && want
                .iter()
                .zip(&lengths)
                .all(|(a, b)| (a - b).abs() <= rel_tol * a)
    });
    Ok(CoverPattern {
        lengths,
        k: k.map(|k| k + 1),
    })
}

/// Convenience for the named families.
pub fn family_series(family: Family, n: u32, ts: &[f64], signs: Signs) -> Result<CountSeries> {
    let s = build(family, n)?;
    count_series(&s, CountKind::Cylinders, ts, signs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms() {
        assert_relative_eq!(
            predicted_constant(Prediction::Xn { n: 5 }).unwrap(),
            0.5578180348730638,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            predicted_constant(Prediction::Sn { n: 5 }).unwrap(),
            1.2271996767207403,
            max_relative = 1e-12
        );
        let p5 = triangle_p(5).unwrap().area();
        assert_relative_eq!(
            predicted_constant(Prediction::Pn { n: 5 }).unwrap() * p5,
            0.5835681246702829,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            predicted_constant(Prediction::Pn { n: 5 }).unwrap(),
            predicted_constant(Prediction::Sn { n: 5 }).unwrap(),
            max_relative = 1e-12
        );
        for n in [5, 7, 9, 11] {
            let (l, r) = cover_constant_split(n).unwrap();
            assert_relative_eq!(l, r, max_relative = 1e-12);
        }
        assert_relative_eq!(
            predicted_constant(Prediction::Torus { area: 4.0 }).unwrap(),
            6.0 / PI / 4.0
        );
        assert!(predicted_constant(Prediction::Xn { n: 4 }).is_err());
    }

    #[test]
    fn identity() {
        let (l, r) = sum_identity_check(3).unwrap();
        assert_relative_eq!(l, 4.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(r, 4.0 / 3.0);
        for n in [5u32, 7, 9, 11] {
            let (l, r) = sum_identity_check(n).unwrap();
            assert!((l - r).abs() <= 1e-9);
        }
    }

    #[test]
    fn moduli_are_constant() {
        for n in [5u32, 7, 9] {
            for (h, w) in heights_widths(n) {
                assert_relative_eq!(h / w, 2.0 / (PI / n as f64).tan(), max_relative = 1e-12);
            }
            let total: f64 = heights_widths(n).iter().map(|(h, w)| h * w).sum();
            assert_relative_eq!(total, area_xn(n), max_relative = 1e-12);
        }
    }

    #[test]
    fn ellipse_integral_support() {
        let t: f64 = 2.0;
        let small = Vec2::from_angle(0.3) * (t.exp() / 4.0);
        assert_eq!(trapezoid_ellipse_integral(small, t, 10_000).unwrap(), 0.0);
        let big = Vec2::from_angle(1.1) * (2.0 * SQRT_2 * t.exp());
        assert!(trapezoid_ellipse_integral(big, t, 10_000).unwrap() <= 1e-15);
    }

    #[test]
    fn trapezoid_region() {
        assert!(Region::Trapezoid.contains(Vec2::new(0.5, 0.75)));
        assert!(!Region::Trapezoid.contains(Vec2::new(0.8, 0.75)));
        assert!(!Region::Trapezoid.contains(Vec2::new(0.1, 0.4)));
    }
}
