use thiserror::Error;

/// Errors shared across the geometry and verification modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("curvature mismatch: {0} vs {1}")]
    CurvatureMismatch(i32, i32),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid model point: {0}")]
    InvalidPoint(String),
    #[error("degenerate triangle: sides ({a}, {b}, {c}) are collinear")]
    DegenerateTriangle { a: f64, b: f64, c: f64 },
    #[error("invalid triangle sides: {0}")]
    InvalidTriangle(String),
    #[error("antipodal points on the sphere: geodesic is ambiguous")]
    AntipodalPoints,
    #[error("infeasible spherical triangle: perimeter {0} is not below 2*pi")]
    SphericalPerimeter(f64),
    #[error("unsupported curvature for this operation: kappa = {0}")]
    UnsupportedCurvature(i32),
    #[error("undefined angle: a side at the apex has zero length")]
    UndefinedAngle,
    #[error("rays have distinct ideal endpoints (gap {0:.3e})")]
    DivergentRays(f64),
    #[error("complex is invalid:\n{}", .0.join("\n"))]
    InvalidComplex(Vec<String>),
    #[error("vertex {0:?} not found in complex")]
    VertexNotFound(String),
    #[error("not a surface: {0}")]
    NotASurface(String),
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("orientation required to distinguish convex from concave")]
    OrientationMissing,
    #[error("malformed crossing certificate: {0}")]
    CertificateMalformed(String),
    #[error("not a non-strict s-vertex: {0}")]
    NotDeformable(String),
    #[error("endpoints are not connected in the complex")]
    Disconnected,
    #[error("straightening did not converge: residual angle deficit {0:.3e}")]
    NoConvergence(f64),
    #[error("marked geodesic {index} lies inside the interior of crescent {crescent}")]
    IncompressibilityViolation { index: usize, crescent: usize },
    #[error("crescent class is not closed under transversal overlap: pair ({0}, {1})")]
    ClassNotClosed(usize, usize),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
