//! Constant-curvature model geometry for kappa in {-1, 0, +1}.
//!
//! Points live in the quadric models: the hyperboloid sheet `<x,x> = -1`,
//! `x0 > 0` in Minkowski space for kappa = -1, the unit sphere for
//! kappa = +1, and the affine plane for kappa = 0. Distances, geodesic
//! interpolation, triangle solvers, and comparison constructions are all
//! closed-form in these coordinates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model-constraint tolerance: points must satisfy their quadric equation
/// to within this bound.
pub const MODEL_TOL: f64 = 1e-12;
/// Distance round-trip tolerance for compositions of transcendental maps.
pub const DIST_TOL: f64 = 1e-10;
/// Angle comparison tolerance.
pub const ANGLE_TOL: f64 = 1e-8;

/// Curvature tag for the three model geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Curvature {
    Hyperbolic,
    Euclidean,
    Spherical,
}

impl Curvature {
    pub fn kappa(self) -> i32 {
        match self {
            Curvature::Hyperbolic => -1,
            Curvature::Euclidean => 0,
            Curvature::Spherical => 1,
        }
    }

    pub fn from_kappa(kappa: i32) -> Result<Self> {
        match kappa {
            -1 => Ok(Curvature::Hyperbolic),
            0 => Ok(Curvature::Euclidean),
            1 => Ok(Curvature::Spherical),
            other => Err(Error::UnsupportedCurvature(other)),
        }
    }

    /// Diameter bound of the model space: pi for the sphere, infinite otherwise.
    pub fn diameter_bound(self) -> f64 {
        match self {
            Curvature::Spherical => PI,
            _ => f64::INFINITY,
        }
    }
}

/// Minkowski inner product with signature (-, +, +, ...).
pub fn minkowski_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = -a[0] * b[0];
    for i in 1..a.len() {
        s += a[i] * b[i];
    }
    s
}

pub fn euclidean_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    euclidean_dot(a, a).sqrt()
}

/// A point of one of the model spaces, in quadric coordinates.
///
/// For kappa = +/-1 the coordinate vector has length n+1 (ambient quadric
/// coordinates); for kappa = 0 it has length n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    curvature: Curvature,
    coords: Vec<f64>,
}

impl ModelPoint {
    /// A point on the hyperboloid sheet `-x0^2 + x1^2 + ... = -1`, `x0 > 0`.
    pub fn hyperboloid(coords: &[f64]) -> Result<Self> {
        if coords.len() != 3 && coords.len() != 4 {
            return Err(Error::InvalidPoint(format!(
                "hyperboloid point needs 3 or 4 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        let q = minkowski_dot(coords, coords);
        // relative tolerance: the quadratic form of a far point cannot be
        // evaluated to absolute 1e-12 in f64
        if (q + 1.0).abs() > MODEL_TOL * (1.0 + coords[0] * coords[0]) {
            return Err(Error::InvalidPoint(format!(
                "hyperboloid constraint violated: <x,x> = {q:.3e} + -1"
            )));
        }
        if coords[0] <= 0.0 {
            return Err(Error::InvalidPoint("x0 must be positive".into()));
        }
        Ok(ModelPoint { curvature: Curvature::Hyperbolic, coords: coords.to_vec() })
    }

    /// A unit vector on the sphere.
    pub fn sphere(coords: &[f64]) -> Result<Self> {
        if coords.len() != 3 && coords.len() != 4 {
            return Err(Error::InvalidPoint(format!(
                "sphere point needs 3 or 4 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        let n = norm(coords);
        if (n - 1.0).abs() > MODEL_TOL {
            return Err(Error::InvalidPoint(format!("sphere constraint violated: |x| = {n}")));
        }
        Ok(ModelPoint { curvature: Curvature::Spherical, coords: coords.to_vec() })
    }

    /// A point of the Euclidean model (plain affine coordinates).
    pub fn euclidean(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > 4 {
            return Err(Error::InvalidPoint(format!(
                "euclidean point needs 1..=4 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        Ok(ModelPoint { curvature: Curvature::Euclidean, coords: coords.to_vec() })
    }

    /// Hyperboloid point from Klein-disk coordinates (|k| < 1).
    pub fn from_klein(k: &[f64]) -> Result<Self> {
        let r2 = euclidean_dot(k, k);
        if r2 >= 1.0 {
            return Err(Error::InvalidPoint(format!("Klein point outside the disk: |k|^2 = {r2}")));
        }
        let s = 1.0 / (1.0 - r2).sqrt();
        let mut coords = Vec::with_capacity(k.len() + 1);
        coords.push(s);
        coords.extend(k.iter().map(|c| c * s));
        // renormalize against rounding
        let q = minkowski_dot(&coords, &coords);
        let f = (-q).sqrt();
        for c in &mut coords {
            *c /= f;
        }
        ModelPoint::hyperboloid(&coords)
    }

    /// Klein-chart coordinates of a hyperboloid point.
    pub fn to_klein(&self) -> Result<Vec<f64>> {
        if self.curvature != Curvature::Hyperbolic {
            return Err(Error::UnsupportedCurvature(self.curvature.kappa()));
        }
        Ok(self.coords[1..].iter().map(|c| c / self.coords[0]).collect())
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Intrinsic dimension of the model the point belongs to.
    pub fn dim(&self) -> usize {
        match self.curvature {
            Curvature::Euclidean => self.coords.len(),
            _ => self.coords.len() - 1,
        }
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.curvature != other.curvature {
            return Err(Error::CurvatureMismatch(self.curvature.kappa(), other.curvature.kappa()));
        }
        if self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch(self.coords.len(), other.coords.len()));
        }
        Ok(())
    }

    /// Project raw coordinates back onto the quadric. Internal use after
    /// linear combinations of model points.
    fn project(curvature: Curvature, mut coords: Vec<f64>) -> Result<Self> {
        match curvature {
            Curvature::Hyperbolic => {
                let q = minkowski_dot(&coords, &coords);
                if q >= 0.0 {
                    return Err(Error::InvalidPoint("not a timelike vector".into()));
                }
                let f = (-q).sqrt();
                for c in &mut coords {
                    *c /= f;
                }
                if coords[0] < 0.0 {
                    for c in &mut coords {
                        *c = -*c;
                    }
                }
                ModelPoint::hyperboloid(&coords)
            }
            Curvature::Spherical => {
                let f = norm(&coords);
                if f == 0.0 {
                    return Err(Error::InvalidPoint("zero vector".into()));
                }
                for c in &mut coords {
                    *c /= f;
                }
                ModelPoint::sphere(&coords)
            }
            Curvature::Euclidean => ModelPoint::euclidean(&coords),
        }
    }
}

/// Distance in the model metric. Symmetric, zero iff the points coincide.
/// For the sphere the result lies in [0, pi].
pub fn dist(p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
    p.same_space(q)?;
    match p.curvature {
        Curvature::Hyperbolic => {
            // chord form: <p-q, p-q> = 4 sinh^2(d/2), stable near d = 0
            // where acosh(-<p,q>) loses half the significant digits
            let diff: Vec<f64> = p.coords.iter().zip(&q.coords).map(|(a, b)| a - b).collect();
            let s = minkowski_dot(&diff, &diff).max(0.0);
            Ok(2.0 * (s.sqrt() / 2.0).asinh())
        }
        Curvature::Spherical => {
            let diff: Vec<f64> = p.coords.iter().zip(&q.coords).map(|(a, b)| a - b).collect();
            let half = (euclidean_dot(&diff, &diff).sqrt() / 2.0).min(1.0);
            Ok(2.0 * half.asin())
        }
        Curvature::Euclidean => {
            let s: f64 = p
                .coords
                .iter()
                .zip(&q.coords)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            Ok(s.sqrt())
        }
    }
}

/// The point at parameter `t` on the unit-speed geodesic from `p` to `q`,
/// with t in [0,1] reaching `q` at t = 1.
pub fn geodesic_point(p: &ModelPoint, q: &ModelPoint, t: f64) -> Result<ModelPoint> {
    p.same_space(q)?;
    let d = dist(p, q)?;
    if d <= 1e-15 {
        return Ok(p.clone());
    }
    match p.curvature {
        Curvature::Euclidean => {
            let coords: Vec<f64> =
                p.coords.iter().zip(&q.coords).map(|(a, b)| a + t * (b - a)).collect();
            ModelPoint::euclidean(&coords)
        }
        Curvature::Hyperbolic => {
            let sh = d.sinh();
            let wa = ((1.0 - t) * d).sinh() / sh;
            let wb = (t * d).sinh() / sh;
            let coords: Vec<f64> =
                p.coords.iter().zip(&q.coords).map(|(a, b)| wa * a + wb * b).collect();
            ModelPoint::project(Curvature::Hyperbolic, coords)
        }
        Curvature::Spherical => {
            if d >= PI - 1e-12 {
                return Err(Error::AntipodalPoints);
            }
            let s = d.sin();
            let wa = ((1.0 - t) * d).sin() / s;
            let wb = (t * d).sin() / s;
            let coords: Vec<f64> =
                p.coords.iter().zip(&q.coords).map(|(a, b)| wa * a + wb * b).collect();
            ModelPoint::project(Curvature::Spherical, coords)
        }
    }
}

/// Unit tangent vector at `p` pointing toward `q`, in ambient coordinates.
pub fn tangent_toward(p: &ModelPoint, q: &ModelPoint) -> Result<Vec<f64>> {
    p.same_space(q)?;
    match p.curvature {
        Curvature::Euclidean => {
            let mut v: Vec<f64> = p.coords.iter().zip(&q.coords).map(|(a, b)| b - a).collect();
            let n = norm(&v);
            if n == 0.0 {
                return Err(Error::UndefinedAngle);
            }
            for c in &mut v {
                *c /= n;
            }
            Ok(v)
        }
        Curvature::Hyperbolic => {
            let g = minkowski_dot(&p.coords, &q.coords);
            let mut v: Vec<f64> =
                q.coords.iter().zip(&p.coords).map(|(b, a)| b + g * a).collect();
            let n2 = minkowski_dot(&v, &v);
            if n2 <= 0.0 {
                return Err(Error::UndefinedAngle);
            }
            let n = n2.sqrt();
            for c in &mut v {
                *c /= n;
            }
            Ok(v)
        }
        Curvature::Spherical => {
            let g = euclidean_dot(&p.coords, &q.coords);
            let mut v: Vec<f64> =
                q.coords.iter().zip(&p.coords).map(|(b, a)| b - g * a).collect();
            let n = norm(&v);
            if n <= MODEL_TOL {
                return Err(Error::UndefinedAngle);
            }
            for c in &mut v {
                *c /= n;
            }
            Ok(v)
        }
    }
}

/// Angle at `p` between the geodesics toward `q` and toward `r`.
pub fn angle_at(p: &ModelPoint, q: &ModelPoint, r: &ModelPoint) -> Result<f64> {
    let u = tangent_toward(p, q)?;
    let v = tangent_toward(p, r)?;
    let c = match p.curvature {
        Curvature::Hyperbolic => minkowski_dot(&u, &v),
        _ => euclidean_dot(&u, &v),
    };
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// Three side lengths of a triangle in a model space, vertex order (p, q, r):
/// `a` is opposite p (= d(q,r)), `b` opposite q, `c` opposite r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleSides {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub curvature: Curvature,
}

impl TriangleSides {
    pub fn new(a: f64, b: f64, c: f64, curvature: Curvature) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidTriangle(format!("sides must be positive: ({a}, {b}, {c})")));
        }
        if a > b + c || b > a + c || c > a + b {
            return Err(Error::InvalidTriangle(format!(
                "triangle inequality violated: ({a}, {b}, {c})"
            )));
        }
        if curvature == Curvature::Spherical && a + b + c >= 2.0 * PI {
            return Err(Error::SphericalPerimeter(a + b + c));
        }
        Ok(TriangleSides { a, b, c, curvature })
    }

    pub fn perimeter(&self) -> f64 {
        self.a + self.b + self.c
    }
}

/// The cosine of the angle opposite side `a` for side lengths (a, b, c),
/// by the law of cosines of the given model. Not clamped.
fn law_of_cosines(a: f64, b: f64, c: f64, curvature: Curvature) -> f64 {
    match curvature {
        Curvature::Euclidean => (b * b + c * c - a * a) / (2.0 * b * c),
        Curvature::Hyperbolic => (b.cosh() * c.cosh() - a.cosh()) / (b.sinh() * c.sinh()),
        Curvature::Spherical => (a.cos() - b.cos() * c.cos()) / (b.sin() * c.sin()),
    }
}

/// Interior angles (alpha, beta, gamma) opposite sides (a, b, c).
///
/// Degenerate triangles (tight triangle inequality) are rejected; callers
/// wanting the collinear case should interpolate with `geodesic_point`.
pub fn triangle_angles_from_sides(sides: &TriangleSides) -> Result<(f64, f64, f64)> {
    let TriangleSides { a, b, c, curvature } = *sides;
    let slack = (b + c - a).min(a + c - b).min(a + b - c);
    if slack <= 1e-14 * sides.perimeter() {
        return Err(Error::DegenerateTriangle { a, b, c });
    }
    let alpha = law_of_cosines(a, b, c, curvature).clamp(-1.0, 1.0).acos();
    let beta = law_of_cosines(b, c, a, curvature).clamp(-1.0, 1.0).acos();
    let gamma = law_of_cosines(c, a, b, curvature).clamp(-1.0, 1.0).acos();
    Ok((alpha, beta, gamma))
}

/// Hyperbolic triangle area via the angle defect `pi - (alpha+beta+gamma)`.
pub fn triangle_area(sides: &TriangleSides) -> Result<f64> {
    if sides.curvature != Curvature::Hyperbolic {
        return Err(Error::UnsupportedCurvature(sides.curvature.kappa()));
    }
    let (alpha, beta, gamma) = triangle_angles_from_sides(sides)?;
    Ok((PI - alpha - beta - gamma).max(0.0))
}

/// Place a triangle with the given side lengths in the 2-dimensional model
/// of the target curvature. Vertex order (p, q, r) with sides
/// `d_pq = d(p,q)`, `d_qr = d(q,r)`, `d_rp = d(r,p)`. Canonical placement:
/// p at the basepoint, q on the first axis, r in the upper half.
///
/// Tight triangle inequalities are allowed here (collinear placement).
pub fn comparison_triangle(
    d_pq: f64,
    d_qr: f64,
    d_rp: f64,
    target: Curvature,
) -> Result<[ModelPoint; 3]> {
    if d_pq < 0.0 || d_qr < 0.0 || d_rp < 0.0 {
        return Err(Error::InvalidTriangle("negative side length".into()));
    }
    if d_pq > d_qr + d_rp + DIST_TOL
        || d_qr > d_pq + d_rp + DIST_TOL
        || d_rp > d_pq + d_qr + DIST_TOL
    {
        return Err(Error::InvalidTriangle(format!(
            "triangle inequality violated: ({d_pq}, {d_qr}, {d_rp})"
        )));
    }
    if target == Curvature::Spherical && d_pq + d_qr + d_rp >= 2.0 * PI {
        return Err(Error::SphericalPerimeter(d_pq + d_qr + d_rp));
    }
    // angle at p, between the directions toward q and r; side opposite is d_qr
    let theta = if d_pq <= 1e-15 || d_rp <= 1e-15 {
        0.0
    } else {
        law_of_cosines(d_qr, d_pq, d_rp, target).clamp(-1.0, 1.0).acos()
    };
    let (ct, st) = (theta.cos(), theta.sin());
    match target {
        Curvature::Euclidean => Ok([
            ModelPoint::euclidean(&[0.0, 0.0])?,
            ModelPoint::euclidean(&[d_pq, 0.0])?,
            ModelPoint::euclidean(&[d_rp * ct, d_rp * st])?,
        ]),
        Curvature::Hyperbolic => Ok([
            ModelPoint::hyperboloid(&[1.0, 0.0, 0.0])?,
            ModelPoint::project(
                Curvature::Hyperbolic,
                vec![d_pq.cosh(), d_pq.sinh(), 0.0],
            )?,
            ModelPoint::project(
                Curvature::Hyperbolic,
                vec![d_rp.cosh(), d_rp.sinh() * ct, d_rp.sinh() * st],
            )?,
        ]),
        Curvature::Spherical => Ok([
            ModelPoint::sphere(&[0.0, 0.0, 1.0])?,
            ModelPoint::project(Curvature::Spherical, vec![d_pq.sin(), 0.0, d_pq.cos()])?,
            ModelPoint::project(
                Curvature::Spherical,
                vec![d_rp.sin() * ct, d_rp.sin() * st, d_rp.cos()],
            )?,
        ]),
    }
}

/// Euclidean comparison angle at the vertex joining sides `d_pq` and `d_pr`,
/// the side opposite being `d_qr`.
pub fn comparison_angle(d_pq: f64, d_pr: f64, d_qr: f64) -> Result<f64> {
    if d_pq <= 0.0 || d_pr <= 0.0 {
        return Err(Error::UndefinedAngle);
    }
    let c = (d_pq * d_pq + d_pr * d_pr - d_qr * d_qr) / (2.0 * d_pq * d_pr);
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// A geodesic segment between two points of the same model, carrying its
/// arclength.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSegment {
    pub start: ModelPoint,
    pub end: ModelPoint,
    pub length: f64,
}

impl GeodesicSegment {
    pub fn new(start: ModelPoint, end: ModelPoint) -> Result<Self> {
        let length = dist(&start, &end)?;
        Ok(GeodesicSegment { start, end, length })
    }

    pub fn point_at_fraction(&self, t: f64) -> Result<ModelPoint> {
        geodesic_point(&self.start, &self.end, t)
    }
}

/// A unit-speed geodesic ray in the hyperbolic plane: basepoint on the
/// hyperboloid plus a unit spacelike tangent.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicRay {
    pub basepoint: ModelPoint,
    pub direction: [f64; 3],
}

impl GeodesicRay {
    pub fn new(basepoint: ModelPoint, direction: [f64; 3]) -> Result<Self> {
        if basepoint.curvature() != Curvature::Hyperbolic || basepoint.coords().len() != 3 {
            return Err(Error::InvalidPoint("ray basepoint must lie in H^2".into()));
        }
        let mut v = direction;
        // project onto the tangent space and normalize
        let g = minkowski_dot(basepoint.coords(), &v);
        for i in 0..3 {
            v[i] += g * basepoint.coords()[i];
        }
        let n2 = minkowski_dot(&v, &v);
        if n2 <= MODEL_TOL {
            return Err(Error::InvalidPoint("ray direction is degenerate".into()));
        }
        let n = n2.sqrt();
        for c in &mut v {
            *c /= n;
        }
        Ok(GeodesicRay { basepoint, direction: v })
    }

    /// Ray through `p` toward `q`.
    pub fn toward(p: &ModelPoint, q: &ModelPoint) -> Result<Self> {
        let t = tangent_toward(p, q)?;
        GeodesicRay::new(p.clone(), [t[0], t[1], t[2]])
    }

    /// Ray from `p` aimed at the ideal point with the given Klein-boundary
    /// coordinates (|k| = 1).
    pub fn toward_ideal(p: &ModelPoint, k: [f64; 2]) -> Result<Self> {
        let r = (k[0] * k[0] + k[1] * k[1]).sqrt();
        if (r - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPoint("ideal point must lie on the Klein boundary".into()));
        }
        // lightlike representative of the ideal point; GeodesicRay::new
        // projects it onto the tangent space at p
        GeodesicRay::new(p.clone(), [1.0, k[0] / r, k[1] / r])
    }

    pub fn point_at(&self, t: f64) -> ModelPoint {
        let (ch, sh) = (t.cosh(), t.sinh());
        let coords: Vec<f64> = self
            .basepoint
            .coords()
            .iter()
            .zip(&self.direction)
            .map(|(p, v)| ch * p + sh * v)
            .collect();
        // analytically on the sheet; for large t the quadratic form cannot
        // be evaluated accurately, so renormalize only when meaningful
        let q = minkowski_dot(&coords, &coords);
        if q < 0.0 {
            ModelPoint::project(Curvature::Hyperbolic, coords).expect("timelike ray point")
        } else {
            ModelPoint { curvature: Curvature::Hyperbolic, coords }
        }
    }

    /// Klein-boundary coordinates of the ideal endpoint.
    pub fn ideal_endpoint(&self) -> [f64; 2] {
        let w: Vec<f64> = self
            .basepoint
            .coords()
            .iter()
            .zip(&self.direction)
            .map(|(p, v)| p + v)
            .collect();
        [w[1] / w[0], w[2] / w[0]]
    }
}

/// Distance between two asymptotic rays at common parameter `t`.
///
/// The rays must share their ideal endpoint (within 1e-9 on the Klein
/// boundary); otherwise the rays diverge and an error is returned.
pub fn asymptotic_ray_gap(ray1: &GeodesicRay, ray2: &GeodesicRay, t: f64) -> Result<f64> {
    let e1 = ray1.ideal_endpoint();
    let e2 = ray2.ideal_endpoint();
    let gap = ((e1[0] - e2[0]).powi(2) + (e1[1] - e2[1]).powi(2)).sqrt();
    if gap > 1e-9 {
        return Err(Error::DivergentRays(gap));
    }
    dist(&ray1.point_at(t), &ray2.point_at(t))
}

/// Lorentzian cross product in R^{2,1}: the Minkowski-orthogonal complement
/// of span(a, b), satisfying `<cross(a,b), a> = <cross(a,b), b> = 0`.
pub fn lorentz_cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    let e = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    [-e[0], e[1], e[2]]
}

/// Distance from a point of H^2 to the complete geodesic through `a` and `b`.
pub fn dist_to_geodesic(p: &ModelPoint, a: &ModelPoint, b: &ModelPoint) -> Result<f64> {
    p.same_space(a)?;
    p.same_space(b)?;
    if p.curvature() != Curvature::Hyperbolic || p.coords().len() != 3 {
        return Err(Error::UnsupportedCurvature(p.curvature().kappa()));
    }
    let mut n = lorentz_cross(a.coords(), b.coords());
    let n2 = minkowski_dot(&n, &n);
    if n2 <= MODEL_TOL {
        return Err(Error::InvalidPoint("geodesic endpoints coincide".into()));
    }
    let f = n2.sqrt();
    for c in &mut n {
        *c /= f;
    }
    Ok(minkowski_dot(p.coords(), &n).abs().asinh())
}

/// Distance from a point of H^2 to the geodesic *segment* [a, b].
pub fn dist_to_segment(p: &ModelPoint, a: &ModelPoint, b: &ModelPoint) -> Result<f64> {
    let dab = dist(a, b)?;
    if dab <= 1e-14 {
        return dist(p, a);
    }
    // foot of the perpendicular: remove the normal component, renormalize
    let mut n = lorentz_cross(a.coords(), b.coords());
    let n2 = minkowski_dot(&n, &n);
    let f = n2.sqrt();
    for c in &mut n {
        *c /= f;
    }
    let h = minkowski_dot(p.coords(), &n);
    let foot: Vec<f64> = p.coords().iter().zip(&n).map(|(x, m)| x - h * m).collect();
    if minkowski_dot(&foot, &foot) < 0.0 {
        let foot = ModelPoint::project(Curvature::Hyperbolic, foot)?;
        let da = dist(a, &foot)?;
        let db = dist(b, &foot)?;
        if da + db <= dab + DIST_TOL {
            return Ok(h.abs().asinh());
        }
    }
    let da = dist(p, a)?;
    let db = dist(p, b)?;
    Ok(da.min(db))
}

/// Place the apex of a triangle in the 2-dimensional model: the point at
/// distance `da` from `a` and `db` from `b`, on the side of the oriented
/// geodesic a->b selected by `positive_side`. Used by corridor unfolding.
pub fn place_apex(
    a: &ModelPoint,
    b: &ModelPoint,
    da: f64,
    db: f64,
    positive_side: bool,
) -> Result<ModelPoint> {
    a.same_space(b)?;
    match a.curvature() {
        Curvature::Euclidean => {
            if a.coords().len() != 2 {
                return Err(Error::DimensionMismatch(a.coords().len(), 2));
            }
            let (ax, ay) = (a.coords()[0], a.coords()[1]);
            let (bx, by) = (b.coords()[0], b.coords()[1]);
            let dab = dist(a, b)?;
            if dab <= 1e-14 {
                return Err(Error::InvalidTriangle("base has zero length".into()));
            }
            let x = (da * da - db * db + dab * dab) / (2.0 * dab);
            let y2 = da * da - x * x;
            let y = y2.max(0.0).sqrt();
            let ux = (bx - ax) / dab;
            let uy = (by - ay) / dab;
            let s = if positive_side { 1.0 } else { -1.0 };
            ModelPoint::euclidean(&[ax + x * ux - s * y * uy, ay + x * uy + s * y * ux])
        }
        Curvature::Hyperbolic => {
            if a.coords().len() != 3 {
                return Err(Error::DimensionMismatch(a.coords().len(), 3));
            }
            let g = minkowski_dot(a.coords(), b.coords()); // = -cosh d(a,b)
            let mut n = lorentz_cross(a.coords(), b.coords());
            let n2 = minkowski_dot(&n, &n);
            if n2 <= MODEL_TOL {
                return Err(Error::InvalidTriangle("base has zero length".into()));
            }
            let f = n2.sqrt();
            for c in &mut n {
                *c /= f;
            }
            // x = alpha a + beta b + gamma n with <x,a> = -cosh da, <x,b> = -cosh db
            let (ca, cb) = (da.cosh(), db.cosh());
            let det = 1.0 - g * g;
            let alpha = (ca + g * cb) / det;
            let beta = (cb + g * ca) / det;
            // <y,y> for y = alpha a + beta b, with <a,a> = <b,b> = -1, <a,b> = g
            let yy = -alpha * alpha + 2.0 * alpha * beta * g - beta * beta;
            let g2 = -1.0 - yy;
            let gamma = g2.max(0.0).sqrt() * if positive_side { 1.0 } else { -1.0 };
            let coords: Vec<f64> = (0..3)
                .map(|i| alpha * a.coords()[i] + beta * b.coords()[i] + gamma * n[i])
                .collect();
            ModelPoint::project(Curvature::Hyperbolic, coords)
        }
        Curvature::Spherical => Err(Error::UnsupportedCurvature(1)),
    }
}

/// Side sign of `p` relative to the oriented geodesic a->b in the
/// 2-dimensional hyperbolic or Euclidean model.
pub fn side_of(a: &ModelPoint, b: &ModelPoint, p: &ModelPoint) -> Result<f64> {
    match a.curvature() {
        Curvature::Euclidean => {
            let (ax, ay) = (a.coords()[0], a.coords()[1]);
            let (bx, by) = (b.coords()[0], b.coords()[1]);
            let (px, py) = (p.coords()[0], p.coords()[1]);
            Ok((bx - ax) * (py - ay) - (by - ay) * (px - ax))
        }
        Curvature::Hyperbolic => {
            let n = lorentz_cross(a.coords(), b.coords());
            Ok(minkowski_dot(p.coords(), &n))
        }
        Curvature::Spherical => Err(Error::UnsupportedCurvature(1)),
    }
}
