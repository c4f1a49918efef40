//! Surfaces from rational billiard tables and the named families.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{AngleFrac, Mat2, Vec2};
use crate::surface::{EdgeRef, Polygon, TranslationSurface};
use crate::tolerance;

/// Default cap on the order of the reflection group.
pub const MAX_GROUP_ORDER: usize = 1024;

/// Largest angle denominator tried when angles are recovered from coordinates.
const MAX_ANGLE_DEN: i64 = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Unfolding of the isosceles triangle with apex angle `2pi/n`.
    Pn,
    /// Unfolding of the isosceles triangle with apex angle `(n-2)pi/n`.
    Qn,
    /// Two regular n-gons with opposite sides identified.
    Xn,
    /// Same surface as `Pn`: the degree two cover of `Xn`.
    Sn,
    SquareTorus,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pn" => Ok(Family::Pn),
            "qn" => Ok(Family::Qn),
            "xn" => Ok(Family::Xn),
            "sn" => Ok(Family::Sn),
            "square" | "square_torus" | "torus" => Ok(Family::SquareTorus),
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }
}

/// A billiard table. Angles are recovered from the coordinates when absent;
/// when given they must agree with the coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalPolygonSpec {
    pub vertices: Vec<Vec2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<AngleFrac>>,
}

impl RationalPolygonSpec {
    pub fn from_vertices(vertices: Vec<Vec2>) -> Self {
        RationalPolygonSpec {
            vertices,
            angles: None,
        }
    }

    pub fn unit_square() -> Self {
        Self::from_vertices(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ])
    }

    /// Interior angles as fractions of `pi`, one per vertex.
    pub fn resolved_angles(&self, polygon: &Polygon) -> Result<Vec<AngleFrac>> {
        let k = polygon.len();
        let measured: Vec<f64> = (0..k).map(|i| polygon.angle(i)).collect();
        let angles = match &self.angles {
            Some(a) => {
                if a.len() != k {
                    return Err(Error::InvalidPolygon(format!(
                        "{} angles given for {k} vertices",
                        a.len()
                    )));
                }
                for (i, (f, m)) in a.iter().zip(&measured).enumerate() {
                    if f.numerator() <= 0 {
                        return Err(Error::InvalidPolygon(format!("angle {i} is not positive")));
                    }
                    if (f.radians() - m).abs() > tolerance::glue().max(1e-9) * 10.0 {
                        return Err(Error::InvalidPolygon(format!(
                            "angle {i} is {f}pi but the vertices give {m}"
                        )));
                    }
                }
                a.clone()
            }
            None => measured
                .iter()
                .map(|&m| AngleFrac::from_radians(m, MAX_ANGLE_DEN).map_err(|_| Error::NonRationalAngle(m)))
                .collect::<Result<_>>()?,
        };
        let sum = angles.iter().fold(AngleFrac::new(0, 1)?, |acc, &a| acc + a);
        if sum != AngleFrac::new(k as i64 - 2, 1)? {
            return Err(Error::InvalidPolygon(format!(
                "angles sum to {sum}pi, expected {}pi",
                k - 2
            )));
        }
        Ok(angles)
    }
}

/// `R(phi0) R(2 pi k / N) F^s R(-phi0)`, with `F` the reflection in the
/// x-axis. Reflection in a line at angle `phi0 + pi m / N` is `(m, true)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Elem {
    k: i64,
    flip: bool,
}

impl Elem {
    fn compose(self, o: Elem, n: i64) -> Elem {
        let k = if self.flip { self.k - o.k } else { self.k + o.k };
        Elem {
            k: k.rem_euclid(n),
            flip: self.flip ^ o.flip,
        }
    }

    fn matrix(self, n: i64, phi0: f64) -> Mat2 {
        let flip = if self.flip {
            Mat2::new(1.0, 0.0, 0.0, -1.0)
        } else {
            Mat2::IDENTITY
        };
        Mat2::rotation(phi0)
            * Mat2::rotation(2.0 * PI * self.k as f64 / n as f64)
            * flip
            * Mat2::rotation(-phi0)
    }
}

/// Unfolds a rational polygon: one copy per element of the group generated by
/// reflections in its sides, each side glued to the same side of the mirror
/// copy.
pub fn unfold(spec: &RationalPolygonSpec) -> Result<TranslationSurface> {
    unfold_with_cap(spec, MAX_GROUP_ORDER)
}

pub fn unfold_with_cap(spec: &RationalPolygonSpec, cap: usize) -> Result<TranslationSurface> {
    if spec.vertices.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("polygon vertex"));
    }
    let polygon = Polygon::new(spec.vertices.clone())?;
    let angles = spec.resolved_angles(&polygon)?;
    let k = polygon.len();
    let n: i64 = angles.iter().fold(1, |l, a| l.lcm(&a.denominator()));
    let order = 2 * n as usize;
    if order > cap {
        return Err(Error::GroupTooLarge { order, cap });
    }
    // Edge i lies on a line at angle phi0 + pi * m[i] / n.
    let phi0 = polygon.edge(0).angle();
    let mut m = vec![0i64; k];
    for i in 1..k {
        let a = angles[i];
        m[i] = (m[i - 1] + n - a.numerator() * (n / a.denominator())).rem_euclid(n);
    }
    let refl: Vec<Elem> = m.iter().map(|&k| Elem { k, flip: true }).collect();

    let id = Elem { k: 0, flip: false };
    let mut elems = vec![id];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for r in &refl {
            let h = g.compose(*r, n);
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(h) {
                e.insert(elems.len());
                elems.push(h);
                queue.push_back(h);
            }
        }
    }
    if elems.len() > cap {
        return Err(Error::GroupTooLarge {
            order: elems.len(),
            cap,
        });
    }

    let verts = polygon.vertices();
    let mut polygons = Vec::with_capacity(elems.len());
    for g in &elems {
        let mat = g.matrix(n, phi0);
        let mut image: Vec<Vec2> = verts.iter().map(|&v| mat * v).collect();
        if g.flip {
            image.reverse();
        }
        polygons.push(Polygon::new_unchecked(image));
    }
    // Edge e of the original sits at local index e, or k-2-e on reversed copies.
    let local = |g: &Elem, e: usize| -> usize {
        if g.flip {
            (2 * k - 2 - e) % k
        } else {
            e
        }
    };
    let mut pairs = Vec::new();
    for (gi, g) in elems.iter().enumerate() {
        for (e, r) in refl.iter().enumerate() {
            let hi = index[&g.compose(*r, n)];
            if gi < hi {
                pairs.push((
                    EdgeRef::new(gi, local(g, e)),
                    EdgeRef::new(hi, local(&elems[hi], e)),
                ));
            }
        }
    }
    let s = TranslationSurface::new("unfolding", polygons, &pairs)?;
    s.ensure_valid()?;
    Ok(s)
}

fn check_odd(family: Family, n: u32) -> Result<()> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "{family:?} needs an odd n >= 5, got {n}"
        )));
    }
    Ok(())
}

/// Isosceles triangle with legs of length 1 and apex angle `2pi/n` at the origin.
pub fn triangle_p(n: u32) -> Result<Polygon> {
    check_odd(Family::Pn, n)?;
    let a = 2.0 * PI / n as f64;
    Polygon::new(vec![Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::from_angle(a)])
}

/// Isosceles triangle with legs of length 1 and apex angle `(n-2)pi/n`.
pub fn triangle_q(n: u32) -> Result<Polygon> {
    check_odd(Family::Qn, n)?;
    let a = (n as f64 - 2.0) * PI / n as f64;
    Polygon::new(vec![Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::from_angle(a)])
}

fn triangle_spec(poly: Polygon, apex: AngleFrac, base: AngleFrac) -> RationalPolygonSpec {
    RationalPolygonSpec {
        vertices: poly.vertices().to_vec(),
        angles: Some(vec![apex, base, base]),
    }
}

/// Two regular n-gons of circumradius 1 with side `k` of one glued to side
/// `k` of the other. Each polygon has a vertical side on its right.
pub fn double_ngon(n: u32) -> Result<TranslationSurface> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "double n-gon needs n >= 3, got {n}"
        )));
    }
    let nf = n as f64;
    let p: Vec<Vec2> = (0..n)
        .map(|k| Vec2::from_angle(-PI / nf + 2.0 * PI * k as f64 / nf))
        .collect();
    let q: Vec<Vec2> = p.iter().map(|&v| -v).collect();
    let pairs: Vec<_> = (0..n as usize)
        .map(|k| (EdgeRef::new(0, k), EdgeRef::new(1, k)))
        .collect();
    TranslationSurface::new(format!("X_{n}"), vec![Polygon::new(p)?, Polygon::new(q)?], &pairs)
}

pub fn square_torus() -> TranslationSurface {
    let sq = Polygon::new_unchecked(RationalPolygonSpec::unit_square().vertices);
    TranslationSurface::new(
        "square_torus",
        vec![sq],
        &[
            (EdgeRef::new(0, 0), EdgeRef::new(0, 2)),
            (EdgeRef::new(0, 1), EdgeRef::new(0, 3)),
        ],
    )
    .expect("static gluing")
}

/// Builds a named surface. `Pn` and `Sn` both give the unfolding of the
/// `P_n` triangle; `Qn` gives the unfolding of `Q_n`, which is `X_n` cut
/// into triangles. `n` is ignored for the square torus.
pub fn build(family: Family, n: u32) -> Result<TranslationSurface> {
    let s = match family {
        Family::SquareTorus => square_torus(),
        Family::Xn => {
            check_odd(family, n)?;
            double_ngon(n)?
        }
        Family::Pn | Family::Sn => {
            let spec = triangle_spec(
                triangle_p(n)?,
                AngleFrac::new(2, n as i64)?,
                AngleFrac::new(n as i64 - 2, 2 * n as i64)?,
            );
            unfold(&spec)?.with_name(format!("S_{n}"))
        }
        Family::Qn => {
            let spec = triangle_spec(
                triangle_q(n)?,
                AngleFrac::new(n as i64 - 2, n as i64)?,
                AngleFrac::new(1, n as i64)?,
            );
            unfold(&spec)?.with_name(format!("unfold(Q_{n})"))
        }
    };
    s.ensure_valid()?;
    Ok(s)
}
