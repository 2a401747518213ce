//! Verification and construction toolkit for piecewise constant-curvature
//! simplicial complexes: model geometry, link and CAT(kappa) checks,
//! spherical-link vertex classification, geodesics with Gauss-Bonnet
//! audits, and crescent-move convexification of hyperbolic polygons.

pub mod catcheck;
pub mod complexcore;
pub mod crescent2d;
pub mod error;
pub mod fixtures;
pub mod geodesy;
pub mod hypgeom;
pub mod vertexclass;

pub use error::{Error, Result};
pub use hypgeom::{Curvature, GeodesicRay, GeodesicSegment, ModelPoint, TriangleSides};
