//! Curvature verification passes: the link condition (exact, on the
//! metric link graph), and seeded sampling checks for the CAT comparison
//! inequality, distance convexity, triangle slimness, and quasi-geodesic
//! certification.
//!
//! Sampling passes derive one RNG per sample from a counter, so results
//! are deterministic for a given seed and safe to partition.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complexcore::MkComplex;
use crate::error::{Error, Result};
use crate::geodesy::{point_distance, ComplexPath, Waypoint};
use crate::hypgeom;
#[cfg(test)]
use crate::hypgeom::Curvature;

/// Slack below 2*pi tolerated before a link loop counts as a violation,
/// so exact-equality cone points (angle sum exactly 2*pi) pass.
pub const LINK_TOL: f64 = 1e-9;

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

fn sample_rng(seed: u64, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(SEED_STRIDE))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    LinkSystole,
    CatComparison,
    Convexity,
    Slimness,
    QuasiGeodesic,
}

/// A failed check together with a re-checkable witness configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub kind: ViolationKind,
    pub witness: String,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiParams {
    pub lambda: f64,
    pub eps: f64,
}

impl QuasiParams {
    pub fn new(lambda: f64, eps: f64) -> Result<Self> {
        if !(lambda >= 1.0) || !(eps >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "quasi-geodesic parameters need lambda >= 1 and eps >= 0, got ({lambda}, {eps})"
            )));
        }
        Ok(QuasiParams { lambda, eps })
    }
}

// ---------------------------------------------------------------------------
// link condition

/// Shortest injective loop in a metric multigraph, as (length, edge list).
/// Self-loops and parallel edge pairs count as loops.
fn shortest_graph_cycle(
    node_count: usize,
    edges: &[(usize, usize, f64)],
) -> Option<(f64, Vec<usize>)> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut consider = |len: f64, cycle: Vec<usize>| {
        if best.as_ref().map_or(true, |(bl, _)| len < *bl - 1e-15) {
            best = Some((len, cycle));
        }
    };
    for (i, &(a, b, len)) in edges.iter().enumerate() {
        if a == b {
            consider(len, vec![i]);
            continue;
        }
        // Dijkstra a -> b avoiding edge i; the result is node-simple, so
        // closing it with edge i gives an injective loop
        let mut dist = vec![f64::INFINITY; node_count];
        let mut parent: Vec<Option<usize>> = vec![None; node_count]; // edge used to arrive
        let mut done = vec![false; node_count];
        dist[a] = 0.0;
        loop {
            let mut u = None;
            let mut du = f64::INFINITY;
            for v in 0..node_count {
                if !done[v] && dist[v] < du {
                    du = dist[v];
                    u = Some(v);
                }
            }
            let Some(u) = u else { break };
            done[u] = true;
            for (j, &(p, q, l)) in edges.iter().enumerate() {
                if j == i || p == q {
                    continue;
                }
                let other = if p == u {
                    q
                } else if q == u {
                    p
                } else {
                    continue;
                };
                if du + l < dist[other] {
                    dist[other] = du + l;
                    parent[other] = Some(j);
                }
            }
        }
        if dist[b].is_finite() {
            let mut cycle = vec![i];
            let mut v = b;
            while v != a {
                let j = parent[v].unwrap();
                cycle.push(j);
                let (p, q, _) = edges[j];
                v = if p == v { q } else { p };
            }
            consider(dist[b] + len, cycle);
        }
    }
    best
}

/// Exact link-condition check: every injective loop in every vertex link
/// must have length at least 2*pi. `Ok(None)` means pass; a violation
/// carries the globally shortest offending loop as witness.
pub fn link_condition(complex: &MkComplex) -> Result<Option<ViolationReport>> {
    if complex.simplices().iter().any(|s| s.dim() == 3) {
        return Err(Error::Unsupported(
            "link condition is only decided for 2-complexes".into(),
        ));
    }
    if !complex.is_pure(2) {
        return Err(Error::NotASurface("link condition needs a pure 2-complex".into()));
    }
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for v in 0..complex.vertex_class_count() {
        let link = complex.vertex_link(v)?;
        let edges: Vec<(usize, usize, f64)> =
            link.edges.iter().map(|e| (e.a, e.b, e.length)).collect();
        if let Some((len, cycle)) = shortest_graph_cycle(link.node_count, &edges) {
            if best.as_ref().map_or(true, |(bl, _, _)| len < *bl - 1e-15) {
                best = Some((len, v, cycle));
            }
        }
    }
    match best {
        Some((len, v, mut cycle)) if len < 2.0 * PI - LINK_TOL => {
            cycle.sort_unstable();
            let edge_list: Vec<String> = cycle.iter().map(|e| e.to_string()).collect();
            Ok(Some(ViolationReport {
                kind: ViolationKind::LinkSystole,
                witness: format!(
                    "vertex={};edges={};length={:?}",
                    complex.vertex_class_name(v),
                    edge_list.join(","),
                    len
                ),
                magnitude: 2.0 * PI - len,
            }))
        }
        _ => Ok(None),
    }
}

/// Re-evaluate a link-systole witness: recompute the loop length from the
/// named vertex link and return the violation magnitude.
pub fn recheck_link(complex: &MkComplex, report: &ViolationReport) -> Result<f64> {
    if report.kind != ViolationKind::LinkSystole {
        return Err(Error::CertificateMalformed("not a link-systole report".into()));
    }
    let mut vertex = None;
    let mut edges: Vec<usize> = Vec::new();
    for field in report.witness.split(';') {
        let Some((k, val)) = field.split_once('=') else {
            return Err(Error::CertificateMalformed(format!("bad witness field {field:?}")));
        };
        match k {
            "vertex" => vertex = Some(val.to_string()),
            "edges" => {
                for e in val.split(',') {
                    edges.push(
                        e.parse()
                            .map_err(|_| Error::CertificateMalformed(format!("bad edge {e:?}")))?,
                    );
                }
            }
            "length" => {}
            _ => return Err(Error::CertificateMalformed(format!("unknown field {k:?}"))),
        }
    }
    let name = vertex.ok_or_else(|| Error::CertificateMalformed("missing vertex".into()))?;
    let v = complex.vertex_class_by_name(&name)?;
    let link = complex.vertex_link(v)?;
    let mut total = 0.0;
    for e in edges {
        let edge = link
            .edges
            .get(e)
            .ok_or_else(|| Error::CertificateMalformed(format!("edge {e} out of range")))?;
        total += edge.length;
    }
    Ok(2.0 * PI - total)
}

// ---------------------------------------------------------------------------
// CAT comparison sampling

/// Max violation of the CAT comparison inequality d(x, y) <= d(xbar, ybar)
/// over `n_samples` seeded point pairs on the sides of a geodesic
/// triangle. The three sides must close up within 1e-9.
pub fn cat_inequality_sample(
    complex: &MkComplex,
    sides: &[ComplexPath; 3],
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    for k in 0..3 {
        let gap = point_distance(complex, sides[k].end(), sides[(k + 1) % 3].start())?;
        if gap > 1e-9 {
            return Err(Error::InvalidTriangle(format!(
                "side {k} ends {gap} away from the start of side {}",
                (k + 1) % 3
            )));
        }
    }
    let lengths = [
        sides[0].length(complex)?,
        sides[1].length(complex)?,
        sides[2].length(complex)?,
    ];
    let model = hypgeom::comparison_triangle(
        lengths[0],
        lengths[1],
        lengths[2],
        complex.curvature(),
    )?;
    // model vertex pairs per side, in sync with side parameterization
    let side_ends = [(0usize, 1usize), (1, 2), (2, 0)];
    let mut worst = 0.0f64;
    for i in 0..n_samples {
        let mut rng = sample_rng(seed, i as u64);
        let si = rng.gen_range(0usize..3);
        let t: f64 = rng.gen_range(0.0..1.0);
        let sj = rng.gen_range(0usize..3);
        let u: f64 = rng.gen_range(0.0..1.0);
        let x = sides[si].point_at(complex, t)?;
        let y = sides[sj].point_at(complex, u)?;
        let d = point_distance(complex, &x, &y)?;
        let (a, b) = side_ends[si];
        let xbar = hypgeom::geodesic_point(&model[a], &model[b], t)?;
        let (a, b) = side_ends[sj];
        let ybar = hypgeom::geodesic_point(&model[a], &model[b], u)?;
        let dbar = hypgeom::dist(&xbar, &ybar)?;
        worst = worst.max(d - dbar);
    }
    Ok(worst.max(0.0))
}

// ---------------------------------------------------------------------------
// convexity

/// Max violation of geodesic convexity of the distance function:
/// d(c(t), c'(t)) must stay under the linear interpolation of the
/// endpoint distances. Evaluated on a uniform parameter grid.
pub fn convexity_check(
    complex: &MkComplex,
    c: &ComplexPath,
    c2: &ComplexPath,
    n_samples: usize,
) -> Result<f64> {
    let n = n_samples.max(2);
    let d0 = point_distance(complex, c.start(), c2.start())?;
    let d1 = point_distance(complex, c.end(), c2.end())?;
    let mut worst = 0.0f64;
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let x = c.point_at(complex, t)?;
        let y = c2.point_at(complex, t)?;
        let d = point_distance(complex, &x, &y)?;
        worst = worst.max(d - ((1.0 - t) * d0 + t * d1));
    }
    Ok(worst.max(0.0))
}

// ---------------------------------------------------------------------------
// slimness

fn random_waypoint(complex: &MkComplex, rng: &mut ChaCha8Rng) -> Waypoint {
    let s = rng.gen_range(0..complex.simplices().len());
    let n = complex.simplices()[s].dim() + 1;
    let mut bary: Vec<f64> = (0..n)
        .map(|_| -(rng.gen_range(1e-12..1.0f64)).ln())
        .collect();
    let sum: f64 = bary.iter().sum();
    for b in &mut bary {
        *b /= sum;
    }
    Waypoint::new(s, bary)
}

/// Distance from a point to a path: coarse scan plus ternary refinement
/// around the best sample.
fn dist_to_path(complex: &MkComplex, x: &Waypoint, side: &ComplexPath) -> Result<f64> {
    const M: usize = 8;
    let mut best = (f64::INFINITY, 0.0);
    for j in 0..M {
        let t = j as f64 / (M - 1) as f64;
        let d = point_distance(complex, x, &side.point_at(complex, t)?)?;
        if d < best.0 {
            best = (d, t);
        }
    }
    let h = 1.0 / (M - 1) as f64;
    let mut lo = (best.1 - h).max(0.0);
    let mut hi = (best.1 + h).min(1.0);
    for _ in 0..48 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        let d1 = point_distance(complex, x, &side.point_at(complex, m1)?)?;
        let d2 = point_distance(complex, x, &side.point_at(complex, m2)?)?;
        if d1 <= d2 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let refined = point_distance(complex, x, &side.point_at(complex, (lo + hi) / 2.0)?)?;
    Ok(best.0.min(refined))
}

/// Sampled lower bound on the triangle slimness constant: max over seeded
/// triples of the one-sided gap from side pq to the union of the other
/// two sides.
pub fn slimness_estimate(complex: &MkComplex, n_triples: usize, seed: u64) -> Result<f64> {
    const M: usize = 8;
    let mut delta = 0.0f64;
    for i in 0..n_triples {
        let mut rng = sample_rng(seed, i as u64);
        let p = random_waypoint(complex, &mut rng);
        let q = random_waypoint(complex, &mut rng);
        let r = random_waypoint(complex, &mut rng);
        let pq = crate::geodesy::shortest_geodesic(complex, &p, &q)?;
        let qr = crate::geodesy::shortest_geodesic(complex, &q, &r)?;
        let rp = crate::geodesy::shortest_geodesic(complex, &r, &p)?;
        for j in 0..M {
            let t = j as f64 / (M - 1) as f64;
            let x = pq.point_at(complex, t)?;
            let gap = dist_to_path(complex, &x, &qr)?.min(dist_to_path(complex, &x, &rp)?);
            delta = delta.max(gap);
        }
    }
    Ok(delta)
}

// ---------------------------------------------------------------------------
// quasi-geodesics

/// Check both quasi-geodesic inequalities on a grid of parameter pairs.
/// `Ok(None)` means pass; the worst violating pair is reported otherwise.
pub fn is_quasi_geodesic(
    complex: &MkComplex,
    path: &ComplexPath,
    qp: &QuasiParams,
    n_samples: usize,
) -> Result<Option<ViolationReport>> {
    let total = path.length(complex)?;
    let k = ((2 * n_samples.max(1)) as f64).sqrt().ceil() as usize + 1;
    let k = k.max(2);
    let mut points = Vec::with_capacity(k);
    for i in 0..k {
        let t = i as f64 / (k - 1) as f64;
        points.push((t * total, path.point_at(complex, t)?));
    }
    let mut worst: Option<ViolationReport> = None;
    for i in 0..k {
        for j in i + 1..k {
            let (s, ref x) = points[i];
            let (t, ref y) = points[j];
            let d = point_distance(complex, x, y)?;
            let gap = t - s;
            let lower = gap / qp.lambda - qp.eps;
            let upper = qp.lambda * gap + qp.eps;
            let magnitude = (lower - d).max(d - upper);
            if magnitude > 1e-9
                && worst.as_ref().map_or(true, |w| magnitude > w.magnitude)
            {
                let bound = if lower - d > d - upper { "lower" } else { "upper" };
                worst = Some(ViolationReport {
                    kind: ViolationKind::QuasiGeodesic,
                    witness: format!("s={s:?};t={t:?};d={d:?};bound={bound}"),
                    magnitude,
                });
            }
        }
    }
    Ok(worst)
}

/// Re-evaluate a quasi-geodesic witness pair against the path.
pub fn recheck_quasi(
    complex: &MkComplex,
    path: &ComplexPath,
    qp: &QuasiParams,
    report: &ViolationReport,
) -> Result<f64> {
    if report.kind != ViolationKind::QuasiGeodesic {
        return Err(Error::CertificateMalformed("not a quasi-geodesic report".into()));
    }
    let mut s = None;
    let mut t = None;
    for field in report.witness.split(';') {
        let Some((k, val)) = field.split_once('=') else {
            return Err(Error::CertificateMalformed(format!("bad witness field {field:?}")));
        };
        match k {
            "s" => s = val.parse().ok(),
            "t" => t = val.parse().ok(),
            "d" | "bound" => {}
            _ => return Err(Error::CertificateMalformed(format!("unknown field {k:?}"))),
        }
    }
    let (s, t): (f64, f64) = match (s, t) {
        (Some(s), Some(t)) => (s, t),
        _ => return Err(Error::CertificateMalformed("missing parameter pair".into())),
    };
    let total = path.length(complex)?;
    if total <= 0.0 {
        return Err(Error::CertificateMalformed("zero-length path".into()));
    }
    let x = path.point_at(complex, s / total)?;
    let y = path.point_at(complex, t / total)?;
    let d = point_distance(complex, &x, &y)?;
    let gap = (t - s).abs();
    Ok((gap / qp.lambda - qp.eps - d).max(d - (qp.lambda * gap + qp.eps)))
}
