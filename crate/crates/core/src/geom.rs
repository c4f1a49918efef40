//! Planar linear algebra.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at angle `theta` (radians, counterclockwise from +x).
    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3d cross product; positive when `o` is
    /// counterclockwise from `self`.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Vec2 {
        self * (1.0 / self.norm())
    }

    /// Rotation by +90 degrees.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Counterclockwise angle from `from` to `to`, in `[0, 2pi)`.
///
/// Results within `tolerance::angle()` below zero are snapped to zero, so a
/// vector compared with itself never lands at `2pi`.
pub fn ccw_angle(from: Vec2, to: Vec2) -> f64 {
    let a = from.cross(to).atan2(from.dot(to));
    if a >= 0.0 {
        a
    } else if a > -tolerance::angle() {
        0.0
    } else {
        a + 2.0 * PI
    }
}

/// A real 2x2 matrix `(a b; c d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    /// Inverse, assuming nonzero determinant.
    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn is_unimodular(&self) -> bool {
        (self.det() - 1.0).abs() <= tolerance::det()
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// Largest absolute entry difference.
    pub fn max_diff(&self, o: &Mat2) -> f64 {
        (self.a - o.a)
            .abs()
            .max((self.b - o.b).abs())
            .max((self.c - o.c).abs())
            .max((self.d - o.d).abs())
    }

    pub fn rotation(theta: f64) -> Mat2 {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn diag(t: f64) -> Mat2 {
        Mat2::new(t.exp(), 0.0, 0.0, (-t).exp())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        self.apply(v)
    }
}

/// Standard matrix-vector product.
pub fn apply(m: &Mat2, v: Vec2) -> Vec2 {
    m.apply(v)
}

/// Named one-parameter families in `SL(2,R)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sl2Kind {
    /// `a_t = diag(e^t, e^-t)`.
    DiagT,
    /// Counterclockwise rotation by `theta`.
    RotTheta,
    /// `u^s = (1 s; 0 1)`.
    UpperU,
    /// `(1 0; 2cot(pi/n) 1)` for an integer `n >= 3`.
    VeechUnipotent,
}

pub fn sl2_element(kind: Sl2Kind, param: f64) -> Result<Mat2> {
    if !param.is_finite() {
        return Err(Error::NonFinite("sl2 parameter"));
    }
    Ok(match kind {
        Sl2Kind::DiagT => Mat2::diag(param),
        Sl2Kind::RotTheta => Mat2::rotation(param),
        Sl2Kind::UpperU => Mat2::new(1.0, param, 0.0, 1.0),
        Sl2Kind::VeechUnipotent => {
            if param.fract() != 0.0 || param < 3.0 {
                return Err(Error::InvalidParameter(format!(
                    "veech unipotent needs an integer n >= 3, got {param}"
                )));
            }
            veech_unipotent(param as u32)
        }
    })
}

/// `(1 0; 2cot(pi/n) 1)`; caller guarantees `n >= 3`.
pub(crate) fn veech_unipotent(n: u32) -> Mat2 {
    let c = 2.0 / (PI / n as f64).tan();
    Mat2::new(1.0, 0.0, c, 1.0)
}

/// An angle `numerator/denominator * pi`, kept reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(i64, i64)", into = "(i64, i64)")]
pub struct AngleFrac {
    num: i64,
    den: i64,
}

impl AngleFrac {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("angle denominator is zero".into()));
        }
        let g = num.gcd(&den);
        let sign = if den < 0 { -1 } else { 1 };
        Ok(AngleFrac {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn radians(&self) -> f64 {
        self.num as f64 * PI / self.den as f64
    }

    /// Best rational approximation of `radians / pi` with denominator at most
    /// `max_den`, accepted only if it matches within `tolerance::angle()`.
    pub fn from_radians(radians: f64, max_den: i64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(Error::NonFinite("angle"));
        }
        let x = radians / PI;
        // Continued fraction convergents.
        let (mut h0, mut h1) = (0i64, 1i64);
        let (mut k0, mut k1) = (1i64, 0i64);
        let mut r = x;
        for _ in 0..64 {
            let a = r.floor();
            if a.abs() > 1e12 {
                break;
            }
            let ai = a as i64;
            let h2 = ai * h1 + h0;
            let k2 = ai * k1 + k0;
            if k2 > max_den {
                break;
            }
            (h0, h1, k0, k1) = (h1, h2, k1, k2);
            if ((h1 as f64 / k1 as f64) * PI - radians).abs() <= tolerance::angle() {
                return AngleFrac::new(h1, k1);
            }
            let frac = r - a;
            if frac.abs() < 1e-15 {
                break;
            }
            r = 1.0 / frac;
        }
        Err(Error::NonRationalAngle(radians))
    }
}

impl Add for AngleFrac {
    type Output = AngleFrac;
    fn add(self, o: AngleFrac) -> AngleFrac {
        AngleFrac::new(self.num * o.den + o.num * self.den, self.den * o.den).expect("nonzero denominators")
    }
}

impl Sub for AngleFrac {
    type Output = AngleFrac;
    fn sub(self, o: AngleFrac) -> AngleFrac {
        AngleFrac::new(self.num * o.den - o.num * self.den, self.den * o.den).expect("nonzero denominators")
    }
}

impl TryFrom<(i64, i64)> for AngleFrac {
    type Error = Error;
    fn try_from((n, d): (i64, i64)) -> Result<Self> {
        AngleFrac::new(n, d)
    }
}

impl From<AngleFrac> for (i64, i64) {
    fn from(a: AngleFrac) -> (i64, i64) {
        (a.num, a.den)
    }
}

impl fmt::Display for AngleFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}*pi", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn rotation_by_zero_is_identity() {
        let m = sl2_element(Sl2Kind::RotTheta, 0.0).unwrap();
        assert_eq!(m, Mat2::IDENTITY);
    }

    #[test]
    fn diag_inverse_pair() {
        let t = 0.731;
        let m = sl2_element(Sl2Kind::DiagT, t).unwrap() * sl2_element(Sl2Kind::DiagT, -t).unwrap();
        assert!(m.max_diff(&Mat2::IDENTITY) < 1e-15);
    }

    #[test]
    fn veech_unipotent_five() {
        let m = sl2_element(Sl2Kind::VeechUnipotent, 5.0).unwrap();
        assert_eq!((m.a, m.b, m.d), (1.0, 0.0, 1.0));
        assert_relative_eq!(m.c, 2.752763840942347, max_relative = 1e-12);
    }

    #[test]
    fn veech_unipotent_rejects_small_or_fractional() {
        assert!(sl2_element(Sl2Kind::VeechUnipotent, 2.0).is_err());
        assert!(sl2_element(Sl2Kind::VeechUnipotent, 5.5).is_err());
        assert!(matches!(
            sl2_element(Sl2Kind::DiagT, f64::NAN),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(&Mat2::IDENTITY, Vec2::new(3.0, 4.0)), Vec2::new(3.0, 4.0));
        let a = sl2_element(Sl2Kind::DiagT, 2f64.ln()).unwrap();
        let v = a.apply(Vec2::new(1.0, 1.0));
        assert_relative_eq!(v.x, 2.0, max_relative = 1e-15);
        assert_relative_eq!(v.y, 0.5, max_relative = 1e-15);

        // u_5 moves the horizontal width vector of the first vertical
        // cylinder to its core vector.
        let u = sl2_element(Sl2Kind::VeechUnipotent, 5.0).unwrap();
        let w1 = 2.0 * (PI / 5.0).sin().powi(2);
        let h1 = 2.0 * (2.0 * PI / 5.0).sin();
        let moved = u.apply(Vec2::new(w1, 0.0));
        assert_relative_eq!(moved.x, w1, max_relative = 1e-14);
        assert_relative_eq!(moved.y, h1, max_relative = 1e-14);
    }

    #[test]
    fn angle_frac_reduces_and_recovers() {
        let a = AngleFrac::new(6, -8).unwrap();
        assert_eq!((a.numerator(), a.denominator()), (-3, 4));
        let b = AngleFrac::from_radians(3.0 * PI / 10.0, 1000).unwrap();
        assert_eq!(b, AngleFrac::new(3, 10).unwrap());
        assert!(AngleFrac::from_radians(1.0, 1000).is_err());
        assert_eq!(
            AngleFrac::new(1, 3).unwrap() + AngleFrac::new(1, 6).unwrap(),
            AngleFrac::new(1, 2).unwrap()
        );
    }

    fn mat() -> impl Strategy<Value = Mat2> {
        (
            prop_oneof![
                Just(Sl2Kind::DiagT),
                Just(Sl2Kind::RotTheta),
                Just(Sl2Kind::UpperU)
            ],
            -2.0f64..2.0,
        )
            .prop_map(|(k, p)| sl2_element(k, p).unwrap())
    }

    proptest! {
        #[test]
        fn composition_matches_sequential_application(m1 in mat(), m2 in mat(), x in -5.0f64..5.0, y in -5.0f64..5.0) {
            let v = Vec2::new(x, y);
            let lhs = (m1 * m2).apply(v);
            let rhs = m1.apply(m2.apply(v));
            let scale = lhs.norm().max(rhs.norm()).max(1e-300);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * scale.max(1.0));
        }

        #[test]
        fn rotation_preserves_norm(theta in -10.0f64..10.0, x in -5.0f64..5.0, y in -5.0f64..5.0) {
            let v = Vec2::new(x, y);
            let r = sl2_element(Sl2Kind::RotTheta, theta).unwrap();
            prop_assert!((r.apply(v).norm() - v.norm()).abs() <= 1e-12 * v.norm().max(1e-300));
        }

        #[test]
        fn named_elements_have_unit_determinant(m in mat(), n in 3u32..40) {
            prop_assert!((m.det() - 1.0).abs() <= 1e-12);
            prop_assert!((veech_unipotent(n).det() - 1.0).abs() <= 1e-12);
        }
    }
}
