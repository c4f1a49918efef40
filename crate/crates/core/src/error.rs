use thiserror::Error;

use crate::surface::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite parameter: {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: f64 },

    #[error("invalid surface: {0}")]
    InvalidSurface(ValidationReport),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("angle {0} is not a rational multiple of pi")]
    NonRationalAngle(f64),

    #[error("reflection group has order {order}, above the cap {cap}")]
    GroupTooLarge { order: usize, cap: usize },

    #[error("delaunay flip sequence did not converge after {flips} flips")]
    DelaunayNoConvergence { flips: usize },

    #[error("start point lies outside polygon {polygon}")]
    StartOutside { polygon: usize },

    #[error("trajectory grazes an edge of polygon {polygon} and could not be resolved")]
    GrazingUnresolved { polygon: usize },

    #[error("search cap exceeded: {0}")]
    CapExceeded(String),

    #[error(
        "direction ({dir_x}, {dir_y}) is not periodic within budget {budget} \
         (a separatrix ran out of length)"
    )]
    NotPeriodicWithinBudget { dir_x: f64, dir_y: f64, budget: f64 },

    #[error("cylinder assembly failed: {0}")]
    Assembly(String),

    #[error("no parabolic element supplied for the predicted orbit count")]
    MissingParabolic,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFinite(_) => "non_finite",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NotUnimodular { .. } => "not_unimodular",
            Error::InvalidSurface(_) => "invalid_surface",
            Error::InvalidPolygon(_) => "invalid_polygon",
            Error::NonRationalAngle(_) => "non_rational_angle",
            Error::GroupTooLarge { .. } => "group_too_large",
            Error::DelaunayNoConvergence { .. } => "delaunay_no_convergence",
            Error::StartOutside { .. } => "start_outside",
            Error::GrazingUnresolved { .. } => "grazing_unresolved",
            Error::CapExceeded(_) => "cap_exceeded",
            Error::NotPeriodicWithinBudget { .. } => "not_periodic_within_budget",
            Error::Assembly(_) => "assembly",
            Error::MissingParabolic => "missing_parabolic",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
