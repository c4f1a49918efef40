//! Numerical tolerances.
//!
//! All builders produce coordinates from closed-form trigonometry with
//! diameters of order one, so the tolerances sit a few orders of magnitude
//! above rounding error. Every value is multiplied by the factor read from
//! the `FLATSURF_EPS_SCALE` environment variable (default 1).

use std::sync::OnceLock;

/// Environment variable scaling every tolerance.
pub const EPS_SCALE_VAR: &str = "FLATSURF_EPS_SCALE";

fn scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| {
        std::env::var(EPS_SCALE_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(1.0)
    })
}

/// Edge matching tolerance, relative to the surface's longest edge.
pub fn glue() -> f64 {
    1e-9 * scale()
}

/// Cone angle tolerance in radians.
pub fn angle() -> f64 {
    1e-9 * scale()
}

/// Incircle determinant threshold (normalized) below which an edge is degenerate.
pub fn flip() -> f64 {
    1e-10 * scale()
}

/// Edge vector tolerance for translation equivalence.
pub fn iso() -> f64 {
    1e-8 * scale()
}

/// Distance below which a ray is declared to hit a vertex.
pub fn hit() -> f64 {
    1e-9 * scale()
}

/// Relative cross-product threshold for wedge membership during enumeration.
pub fn wedge() -> f64 {
    1e-11 * scale()
}

/// Unimodularity tolerance for group elements.
pub fn det() -> f64 {
    1e-9 * scale()
}

/// Two unit directions are the same when within this distance.
pub fn direction() -> f64 {
    1e-10 * scale()
}
