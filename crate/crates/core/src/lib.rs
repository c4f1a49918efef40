//! Translation surfaces built from rational billiards.
//!
//! The crate covers the whole pipeline from a billiard table to counting
//! statistics:
//!
//! - [`geom`]: planar vectors, unimodular matrices and exact rational angles.
//! - [`surface`]: polygons glued by translations, validation, cone points,
//!   the `SL(2,R)` action, Delaunay renormalization and isomorphism testing.
//! - [`builders`]: unfolding of rational polygons and the named families
//!   (double n-gons, their degree-two covers, the square torus).
//! - [`flow`]: straight-line flow across gluings.
//! - [`census`]: saddle connections, cylinder decompositions and cylinder
//!   enumeration by length.
//! - [`veech`]: Veech group elements and Fuchsian orbit counting.
//! - [`asymptotics`]: counting series, closed-form quadratic constants,
//!   Siegel-Veech transforms and circle averages.
//! - [`report`]: CSV emitters shared by the command line tool.

pub mod asymptotics;
pub mod builders;
pub mod census;
pub mod error;
pub mod flow;
pub mod geom;
pub mod report;
pub mod surface;
pub mod tolerance;
pub mod veech;

pub use error::{Error, Result};
pub use geom::{AngleFrac, Mat2, Sl2Kind, Vec2};
pub use surface::{ConePoint, EdgeRef, Polygon, TranslationSurface, ValidationReport, Violation};

pub use builders::{build, unfold, Family, RationalPolygonSpec};
pub use census::{
    cylinders_up_to, decompose, saddle_connections, shortest_sc, Cylinder, CylinderCensus,
    CylinderDecomposition, SaddleConnection,
};
pub use flow::{separatrices, trace, SurfacePoint, Terminal, Trajectory};
