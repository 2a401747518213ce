//! Ready-made complexes: cones, cylinders, tori, and a generic builder
//! that turns an abstract triangulation with shared vertex labels into a
//! glued complex.

use std::collections::BTreeMap;

use crate::complexcore::{FaceRef, Gluing, MetricSimplex, MkComplex};
use crate::error::{Error, Result};
use crate::hypgeom::Curvature;

/// Build a complex from an abstract triangulation: one simplex `T{i}` per
/// face, faces glued wherever two of them share an unordered vertex-label
/// pair. Edge lengths come from `length(a, b)`.
pub fn from_triangulation(
    curvature: Curvature,
    faces: &[[&str; 3]],
    length: impl Fn(&str, &str) -> f64,
) -> Result<MkComplex> {
    let mut simplices = Vec::with_capacity(faces.len());
    for (i, f) in faces.iter().enumerate() {
        simplices.push(MetricSimplex::new(
            format!("T{i}"),
            f.iter().map(|s| s.to_string()).collect(),
            &[
                (f[0].into(), f[1].into(), length(f[0], f[1])),
                (f[1].into(), f[2].into(), length(f[1], f[2])),
                (f[0].into(), f[2].into(), length(f[0], f[2])),
            ],
        )?);
    }
    // collect, per label pair, the faces containing it and the opposite
    // local vertex
    let mut incidence: BTreeMap<(String, String), Vec<(usize, usize)>> = BTreeMap::new();
    for (i, f) in faces.iter().enumerate() {
        for opp in 0..3 {
            let (a, b) = match opp {
                0 => (f[1], f[2]),
                1 => (f[0], f[2]),
                _ => (f[0], f[1]),
            };
            let key = (a.min(b).to_string(), a.max(b).to_string());
            incidence.entry(key).or_default().push((i, opp));
        }
    }
    let mut gluings = Vec::new();
    for ((a, b), inc) in incidence {
        match inc.len() {
            1 => {} // boundary edge
            2 => gluings.push(Gluing {
                side_a: FaceRef { simplex: format!("T{}", inc[0].0), face: inc[0].1 },
                side_b: FaceRef { simplex: format!("T{}", inc[1].0), face: inc[1].1 },
                vertex_map: vec![(a.clone(), a.clone()), (b.clone(), b.clone())],
            }),
            n => {
                return Err(Error::InvalidInput(format!(
                    "edge ({a}, {b}) lies in {n} faces"
                )))
            }
        }
    }
    MkComplex::build(curvature, simplices, gluings)
}

/// Hyperbolic cone: `k` equilateral triangles of side `side` sharing an
/// apex `c`, glued in a cycle. The apex cone angle is `k` times the
/// equilateral corner angle.
pub fn cone(k: usize, side: f64) -> Result<MkComplex> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("cone needs k >= 3 triangles, got {k}")));
    }
    let rims: Vec<String> = (0..k).map(|i| format!("r{i}")).collect();
    let faces: Vec<[&str; 3]> =
        (0..k).map(|i| ["c", rims[i].as_str(), rims[(i + 1) % k].as_str()]).collect();
    from_triangulation(Curvature::Hyperbolic, &faces, |_, _| side)
}

/// Flat cylinder of circumference `n * w`: an `n`-square strip of width
/// `w` and height `h`, wrapped around. Needs `n >= 3`.
pub fn cylinder(n: usize, w: f64, h: f64) -> Result<MkComplex> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("cylinder needs n >= 3 squares, got {n}")));
    }
    let bottom: Vec<String> = (0..n).map(|i| format!("b{i}")).collect();
    let top: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    let mut faces: Vec<[&str; 3]> = Vec::with_capacity(2 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        faces.push([bottom[i].as_str(), bottom[j].as_str(), top[i].as_str()]);
        faces.push([bottom[j].as_str(), top[j].as_str(), top[i].as_str()]);
    }
    let diag = (w * w + h * h).sqrt();
    from_triangulation(Curvature::Euclidean, &faces, |a, b| {
        match (a.starts_with('b'), b.starts_with('b')) {
            (true, true) | (false, false) => {
                if a[1..] == b[1..] {
                    unreachable!()
                } else {
                    w
                }
            }
            _ => {
                if a[1..] == b[1..] {
                    h
                } else {
                    diag
                }
            }
        }
    })
}

/// Boundary of a regular tetrahedron with hyperbolic equilateral faces:
/// a sphere, Euler characteristic 2.
pub fn tetrahedron_boundary(side: f64) -> Result<MkComplex> {
    let faces = [["a", "b", "c"], ["a", "b", "d"], ["a", "c", "d"], ["b", "c", "d"]];
    from_triangulation(Curvature::Hyperbolic, &faces, |_, _| side)
}

/// The 7-vertex triangulation of the torus (14 faces, 21 edges), realized
/// flat with all edges of length `side`. Every vertex has degree 6 and
/// cone angle exactly 2*pi.
pub fn torus7(side: f64) -> Result<MkComplex> {
    let labels: Vec<String> = (0..7).map(|i| i.to_string()).collect();
    let l = |i: usize| labels[i % 7].as_str();
    let mut faces: Vec<[&str; 3]> = Vec::with_capacity(14);
    for i in 0..7 {
        faces.push([l(i), l(i + 1), l(i + 3)]);
        faces.push([l(i + 1), l(i + 3), l(i + 4)]);
    }
    from_triangulation(Curvature::Euclidean, &faces, |_, _| side)
}

/// Metric tree with one central vertex and `lengths.len()` legs: a pure
/// 1-complex.
pub fn tripod(lengths: &[f64]) -> Result<MkComplex> {
    if lengths.len() < 2 {
        return Err(Error::InvalidInput("tripod needs at least 2 legs".into()));
    }
    let mut simplices = Vec::new();
    let mut gluings = Vec::new();
    for (i, &len) in lengths.iter().enumerate() {
        simplices.push(MetricSimplex::new(
            format!("L{i}"),
            vec!["c".into(), format!("e{i}")],
            &[("c".into(), format!("e{i}"), len)],
        )?);
        if i > 0 {
            // face 1 of a segment [c, e] is the vertex set {c}
            gluings.push(Gluing {
                side_a: FaceRef { simplex: "L0".into(), face: 1 },
                side_b: FaceRef { simplex: format!("L{i}"), face: 1 },
                vertex_map: vec![("c".into(), "c".into())],
            });
        }
    }
    MkComplex::build(Curvature::Hyperbolic, simplices, gluings)
}

/// Two copies of a hyperbolic equilateral triangle glued along all three
/// edges: a sphere with three cone points, Euler characteristic 2.
pub fn doubled_triangle(side: f64) -> Result<MkComplex> {
    let faces = [["a", "b", "c"], ["a", "b", "c"]];
    from_triangulation(Curvature::Hyperbolic, &faces, |_, _| side)
}

/// Regular hyperbolic n-gon of circumradius `r`, triangulated as a closed
/// fan around the center: the center has cone angle exactly 2*pi.
pub fn regular_ngon(n: usize, r: f64) -> Result<MkComplex> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("n-gon needs n >= 3, got {n}")));
    }
    let apex_angle = 2.0 * std::f64::consts::PI / n as f64;
    // hyperbolic law of cosines for the rim edge subtending apex_angle
    let ch = r.cosh() * r.cosh() - r.sinh() * r.sinh() * apex_angle.cos();
    let rim = ch.acosh();
    let rims: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
    let faces: Vec<[&str; 3]> =
        (0..n).map(|i| ["c", rims[i].as_str(), rims[(i + 1) % n].as_str()]).collect();
    from_triangulation(Curvature::Hyperbolic, &faces, |a, b| {
        if a == "c" || b == "c" {
            r
        } else {
            rim
        }
    })
}

/// Strip of `n` hyperbolic triangles glued edge-to-edge in a row, with
/// pseudorandom edge lengths in [0.7, 1.3] (always realizable: the
/// triangle inequality holds since 1.3 < 0.7 + 0.7).
pub fn strip(n: usize, seed: u64) -> Result<MkComplex> {
    use rand::Rng;
    use rand::SeedableRng;
    if n == 0 {
        return Err(Error::InvalidInput("strip needs at least one triangle".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    // zigzag labels u0, v0, u1, v1, ...
    let m = n + 2;
    let us: Vec<String> = (0..m).map(|i| format!("u{i}")).collect();
    let vs: Vec<String> = (0..m).map(|i| format!("v{i}")).collect();
    let mut faces: Vec<[&str; 3]> = Vec::with_capacity(n);
    for t in 0..n {
        let i = t / 2;
        if t % 2 == 0 {
            faces.push([us[i].as_str(), vs[i].as_str(), us[i + 1].as_str()]);
        } else {
            faces.push([vs[i].as_str(), us[i + 1].as_str(), vs[i + 1].as_str()]);
        }
    }
    let mut lengths: std::collections::BTreeMap<(String, String), f64> =
        std::collections::BTreeMap::new();
    for f in &faces {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[0], f[2])] {
            let key = (a.min(b).to_string(), a.max(b).to_string());
            lengths.entry(key).or_insert_with(|| rng.gen_range(0.7..1.3));
        }
    }
    from_triangulation(Curvature::Hyperbolic, &faces, |a, b| {
        lengths[&(a.min(b).to_string(), a.max(b).to_string())]
    })
}
