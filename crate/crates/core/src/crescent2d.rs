//! Crescents for hyperbolic polygons: pocket detection through the Klein
//! chart (where hyperbolic convexity is Euclidean convexity), folding
//! numbers by generic-ray sampling, crescent moves, and the iterated
//! 2-convex hull with marked-geodesic avoidance.
//!
//! All convexity predicates run on Klein coordinates; all distances are
//! evaluated in the hyperbolic metric on the hyperboloid.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hypgeom::{self, ModelPoint};

/// Default half-width of the closed neighborhood in which marked
/// geodesics must stay.
pub const EPS_DEFAULT: f64 = 1e-6;

const COLLINEAR_TOL: f64 = 1e-14;

type K = [f64; 2];

fn sub(a: K, b: K) -> K {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: K, b: K) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Positive when `c` is left of a -> b.
fn orient(a: K, b: K, c: K) -> f64 {
    cross(sub(b, a), sub(c, a))
}

fn seg_cross(p: K, q: K, a: K, b: K) -> bool {
    let d1 = orient(p, q, a);
    let d2 = orient(p, q, b);
    let d3 = orient(a, b, p);
    let d4 = orient(a, b, q);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0)
}

fn seg_intersection(p: K, q: K, a: K, b: K) -> Option<K> {
    let d = sub(q, p);
    let e = sub(b, a);
    let det = cross(d, e);
    if det.abs() < 1e-18 {
        return None;
    }
    let w = sub(a, p);
    let s = cross(w, e) / det;
    let t = cross(w, d) / det;
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return None;
    }
    Some([p[0] + s * d[0], p[1] + s * d[1]])
}

fn point_in_polygon(pt: K, verts: &[K]) -> bool {
    let mut inside = false;
    let n = verts.len();
    for i in 0..n {
        let (a, b) = (verts[i], verts[(i + 1) % n]);
        if (a[1] > pt[1]) != (b[1] > pt[1]) {
            let x = a[0] + (pt[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if pt[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn dist_point_seg_k(p: K, a: K, b: K) -> f64 {
    let e = sub(b, a);
    let n2 = e[0] * e[0] + e[1] * e[1];
    let t = if n2 <= 1e-300 {
        0.0
    } else {
        (((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / n2).clamp(0.0, 1.0)
    };
    let c = [a[0] + t * e[0], a[1] + t * e[1]];
    ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt()
}

/// Convex hull (Andrew monotone chain), counterclockwise, strict turns
/// only (collinear points dropped). Returns indices into `pts`.
fn hull_indices(pts: &[K]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        pts[a]
            .partial_cmp(&pts[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    idx.dedup_by(|&mut a, &mut b| pts[a] == pts[b]);
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && orient(pts[lower[lower.len() - 2]], pts[lower[lower.len() - 1]], pts[i])
                <= COLLINEAR_TOL
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && orient(pts[upper[upper.len() - 2]], pts[upper[upper.len() - 1]], pts[i])
                <= COLLINEAR_TOL
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn signed_area(verts: &[K]) -> f64 {
    let n = verts.len();
    let mut a = 0.0;
    for i in 0..n {
        let (p, q) = (verts[i], verts[(i + 1) % n]);
        a += cross(p, q);
    }
    a / 2.0
}

// ---------------------------------------------------------------------------
// polygon

/// A polygon in the hyperbolic plane with geodesic edges, stored on the
/// hyperboloid and normalized counterclockwise in the Klein chart.
#[derive(Debug, Clone)]
pub struct HPolygon {
    verts: Vec<ModelPoint>,
    klein: Vec<K>,
}

impl HPolygon {
    pub fn from_klein(points: &[K]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::DegeneratePolygon(format!(
                "a polygon needs at least 3 vertices, got {}",
                points.len()
            )));
        }
        let mut klein = points.to_vec();
        for (i, p) in klein.iter().enumerate() {
            if p[0] * p[0] + p[1] * p[1] >= 1.0 {
                return Err(Error::InvalidPoint(format!(
                    "vertex {i} = {p:?} is outside the Klein disk"
                )));
            }
            let q = klein[(i + 1) % klein.len()];
            if (p[0] - q[0]).abs() < 1e-15 && (p[1] - q[1]).abs() < 1e-15 {
                return Err(Error::DegeneratePolygon(format!(
                    "consecutive vertices {i} coincide"
                )));
            }
        }
        if signed_area(&klein) < 0.0 {
            klein.reverse();
        }
        let verts = klein
            .iter()
            .map(|k| ModelPoint::from_klein(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(HPolygon { verts, klein })
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertices(&self) -> &[ModelPoint] {
        &self.verts
    }

    pub fn klein_coords(&self) -> &[K] {
        &self.klein
    }

    /// Every interior angle turns left (counterclockwise) in the chart.
    pub fn is_convex(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            orient(self.klein[i], self.klein[(i + 1) % n], self.klein[(i + 2) % n]) >= -1e-12
        })
    }

    pub fn contains_klein(&self, pt: K) -> bool {
        point_in_polygon(pt, &self.klein)
    }

    /// Inside the region, or within hyperbolic distance `eps` of its
    /// boundary.
    pub fn contains_within(&self, pt: &ModelPoint, eps: f64) -> Result<bool> {
        let k = pt.to_klein()?;
        if point_in_polygon([k[0], k[1]], &self.klein) {
            return Ok(true);
        }
        let n = self.len();
        for i in 0..n {
            let d = hypgeom::dist_to_segment(pt, &self.verts[i], &self.verts[(i + 1) % n])?;
            if d <= eps {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Geodesic chords (a point is a degenerate chord) that the 2-convex
/// hull must keep inside its closed epsilon-neighborhood.
#[derive(Debug, Clone, Default)]
pub struct MarkedGeodesics {
    pub chords: Vec<(ModelPoint, ModelPoint)>,
}

impl MarkedGeodesics {
    pub fn new(chords: Vec<(ModelPoint, ModelPoint)>) -> Self {
        MarkedGeodesics { chords }
    }
}

// ---------------------------------------------------------------------------
// crescents

/// A pocket of the polygon: the chord (I-part) between two boundary
/// vertices and the boundary arc (alpha-part) it cuts off.
#[derive(Debug, Clone, PartialEq)]
pub struct Crescent2D {
    /// vertex indices of the chord endpoints
    pub chord: (usize, usize),
    /// arc vertex indices from chord.0 to chord.1, endpoints included
    pub alpha: Vec<usize>,
    /// nesting depth in the pocket decomposition (0 = hull pocket)
    pub level: usize,
    pub folding_number: usize,
    pub size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    Disjoint,
    Nested,
    Transversal,
}

/// Pockets of an open chain (the chord closing it is chain[0] ->
/// chain[last]); emits (level, local arc ranges) recursively.
fn chain_pockets(
    pts: &[K],
    chain: &[usize],
    level: usize,
    out: &mut Vec<(usize, Vec<usize>)>,
) {
    if chain.len() < 3 {
        return;
    }
    let local: Vec<K> = chain.iter().map(|&i| pts[i]).collect();
    let hull = hull_indices(&local);
    // walk the hull in chain order; the chord edge (first, last) is
    // skipped because consecutive-on-hull first/last are chain-adjacent
    // only when nothing dips inside
    let mut on_hull = vec![false; chain.len()];
    for &h in &hull {
        on_hull[h] = true;
    }
    on_hull[0] = true;
    *on_hull.last_mut().unwrap() = true;
    let mut i = 0;
    while i < chain.len() - 1 {
        let mut j = i + 1;
        while j < chain.len() && !on_hull[j] {
            j += 1;
        }
        if j >= chain.len() {
            break;
        }
        if j > i + 1 {
            // pocket between chain[i] and chain[j]
            let sub: Vec<usize> = chain[i..=j].to_vec();
            out.push((level, sub.clone()));
            chain_pockets(pts, &sub, level + 1, out);
        }
        i = j;
    }
}

/// All crescents of the polygon, nested pockets included, sorted by
/// folding number then arc start index.
pub fn find_crescents(poly: &HPolygon) -> Result<Vec<Crescent2D>> {
    let pts = poly.klein_coords();
    let n = pts.len();
    let hull = hull_indices(pts);
    if hull.len() < 3 {
        return Err(Error::DegeneratePolygon("all vertices are collinear".into()));
    }
    // hull vertices in polygon cyclic order
    let mut hull_sorted = hull.clone();
    hull_sorted.sort_unstable();
    let mut raw: Vec<(usize, Vec<usize>)> = Vec::new();
    for w in 0..hull_sorted.len() {
        let a = hull_sorted[w];
        let b = hull_sorted[(w + 1) % hull_sorted.len()];
        let gap = (b + n - a) % n;
        if gap <= 1 {
            continue;
        }
        let chain: Vec<usize> = (0..=gap).map(|k| (a + k) % n).collect();
        raw.push((0, chain.clone()));
        chain_pockets(pts, &chain, 1, &mut raw);
    }
    let mut crescents = Vec::with_capacity(raw.len());
    for (level, alpha) in raw {
        let chord = (alpha[0], *alpha.last().unwrap());
        let folding = folding_estimate(poly, &alpha, 1000)?;
        let size = size_estimate(poly, &alpha, 256)?;
        crescents.push(Crescent2D { chord, alpha, level, folding_number: folding, size });
    }
    crescents.sort_by(|a, b| {
        (a.folding_number, a.alpha[0], a.level).cmp(&(b.folding_number, b.alpha[0], b.level))
    });
    Ok(crescents)
}

fn crossings(pts: &[K], p: K, q: K) -> usize {
    let n = pts.len();
    (0..n)
        .filter(|&i| seg_cross(p, q, pts[i], pts[(i + 1) % n]))
        .count()
}

fn pocket_klein(poly: &HPolygon, alpha: &[usize]) -> Vec<K> {
    alpha.iter().map(|&i| poly.klein_coords()[i]).collect()
}

/// Generic-ray folding estimate: rays start just off the chord inside
/// the pocket, targets are sampled in the convex span of the pocket, and
/// the wall-crossing count per target is minimized over rays before
/// maximizing over targets.
fn folding_estimate(poly: &HPolygon, alpha: &[usize], n_rays: usize) -> Result<usize> {
    let pts = poly.klein_coords();
    let pocket = pocket_klein(poly, alpha);
    if pocket.len() < 3 {
        return Ok(0);
    }
    let a = pocket[0];
    let b = *pocket.last().unwrap();
    // the chord is a hull edge of the pocket: the whole convex span lies
    // on the arc side
    let hull_ids = hull_indices(&pocket);
    if hull_ids.len() < 3 {
        return Ok(0);
    }
    let hull_poly: Vec<K> = hull_ids.iter().map(|&i| pocket[i]).collect();
    let (mut lo, mut hi) = (pocket[0], pocket[0]);
    for p in &pocket {
        lo = [lo[0].min(p[0]), lo[1].min(p[1])];
        hi = [hi[0].max(p[0]), hi[1].max(p[1])];
    }
    let scale = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    // unit normal of the chord pointing to the arc side
    let side = pocket
        .iter()
        .map(|p| orient(a, b, *p))
        .max_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap())
        .unwrap_or(1.0)
        .signum();
    let perp = [-(b[1] - a[1]), b[0] - a[0]];
    let pn = (perp[0] * perp[0] + perp[1] * perp[1]).sqrt().max(1e-300);
    let dir = [side * perp[0] / pn, side * perp[1] / pn];
    let mut rng = ChaCha8Rng::seed_from_u64(0x2D5C ^ alpha[0] as u64);
    let n_starts = (n_rays / 16).clamp(8, 64);
    let starts: Vec<K> = (0..n_starts)
        .map(|i| {
            let t = (i as f64 + rng.gen_range(0.25..0.75)) / n_starts as f64;
            [
                a[0] + t * (b[0] - a[0]) + 1e-6 * scale * dir[0],
                a[1] + t * (b[1] - a[1]) + 1e-6 * scale * dir[1],
            ]
        })
        .collect();
    // targets: rejection-sampled in the convex span, kept off the walls
    let n_targets = 48usize;
    let mut targets: Vec<K> = Vec::new();
    let mut attempts = 0;
    while targets.len() < n_targets && attempts < 60 * n_targets {
        attempts += 1;
        let c = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
        if !point_in_polygon(c, &hull_poly) {
            continue;
        }
        let npts = pts.len();
        let near = (0..npts)
            .any(|i| dist_point_seg_k(c, pts[i], pts[(i + 1) % npts]) < 2e-3 * scale);
        if !near && dist_point_seg_k(c, a, b) > 2e-3 * scale {
            targets.push(c);
        }
    }
    let mut folding = 0usize;
    for t in &targets {
        let mut best = usize::MAX;
        for s in &starts {
            best = best.min(crossings(pts, *s, *t));
        }
        if best != usize::MAX {
            folding = folding.max(best);
        }
    }
    Ok(folding)
}

/// Recompute the folding number of a crescent by generic-ray sampling.
pub fn folding_number(poly: &HPolygon, crescent: &Crescent2D, n_rays: usize) -> Result<usize> {
    folding_estimate(poly, &crescent.alpha, n_rays)
}

fn size_estimate(poly: &HPolygon, alpha: &[usize], n_samples: usize) -> Result<f64> {
    let a = &poly.vertices()[alpha[0]];
    let b = &poly.vertices()[*alpha.last().unwrap()];
    let mut worst = 0.0f64;
    for i in 0..n_samples {
        let t = i as f64 / (n_samples - 1) as f64;
        let x = hypgeom::geodesic_point(a, b, t)?;
        let mut best = f64::INFINITY;
        for w in alpha.windows(2) {
            let d = hypgeom::dist_to_segment(
                &x,
                &poly.vertices()[w[0]],
                &poly.vertices()[w[1]],
            )?;
            best = best.min(d);
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Supremum (sampled) of hyperbolic distances from chord points to the
/// alpha-part.
pub fn crescent_size(poly: &HPolygon, crescent: &Crescent2D, n_samples: usize) -> Result<f64> {
    size_estimate(poly, &crescent.alpha, n_samples.max(2))
}

/// Cyclic arc-range comparison of two crescents from one polygon.
pub fn classify_pair(poly: &HPolygon, a: &Crescent2D, b: &Crescent2D) -> Result<PairClass> {
    let n = poly.len();
    let span = |c: &Crescent2D| -> (usize, usize) {
        let s = c.alpha[0];
        let len = (c.chord.1 + n - s) % n;
        (s, len)
    };
    let (s1, l1) = span(a);
    let (s2, l2) = span(b);
    let inside = |s_out: usize, l_out: usize, s_in: usize, l_in: usize| -> bool {
        let off = (s_in + n - s_out) % n;
        off + l_in <= l_out
    };
    if inside(s1, l1, s2, l2) || inside(s2, l2, s1, l1) {
        return Ok(PairClass::Nested);
    }
    // cyclic overlap length of the closed arc ranges: a shared endpoint
    // alone is still disjoint, a shared sub-arc is transversal
    let o = (s2 + n - s1) % n;
    let mut overlap = 0i64;
    for shift in [o as i64, o as i64 - n as i64] {
        let lo = shift.max(0);
        let hi = (shift + l2 as i64).min(l1 as i64);
        overlap = overlap.max(hi - lo);
    }
    if overlap >= 1 {
        Ok(PairClass::Transversal)
    } else {
        Ok(PairClass::Disjoint)
    }
}

// ---------------------------------------------------------------------------
// moves

/// Replace the alpha-parts of an overlap class of crescents by the convex
/// boundary of their union. A singleton class replaces its arc by the
/// chord; a transversal chain is replaced by the envelope of its chords.
pub fn crescent_move(poly: &HPolygon, class: &[Crescent2D]) -> Result<HPolygon> {
    if class.is_empty() {
        return Err(Error::InvalidInput("empty crescent class".into()));
    }
    let n = poly.len();
    let pts = poly.klein_coords();
    let mut sorted: Vec<&Crescent2D> = class.iter().collect();
    sorted.sort_by_key(|c| c.alpha[0]);
    for w in sorted.windows(2) {
        if classify_pair(poly, w[0], w[1])? != PairClass::Transversal {
            return Err(Error::NotDeformable(format!(
                "crescents with arcs starting at {} and {} do not overlap transversally",
                w[0].alpha[0], w[1].alpha[0]
            )));
        }
    }
    // envelope chain: chord endpoints joined through consecutive chord
    // intersection points
    let first = sorted[0];
    let last = sorted[sorted.len() - 1];
    let mut chain: Vec<K> = vec![pts[first.chord.0]];
    for w in sorted.windows(2) {
        let (a, b) = (w[0], w[1]);
        let x = seg_intersection(
            pts[a.chord.0],
            pts[a.chord.1],
            pts[b.chord.0],
            pts[b.chord.1],
        )
        .ok_or_else(|| {
            Error::NotDeformable("transversal crescents whose chords do not cross".into())
        })?;
        chain.push(x);
    }
    chain.push(pts[last.chord.1]);
    // splice: keep everything outside the combined arc range
    let start = first.chord.0;
    let end = last.chord.1;
    let gap = (end + n - start) % n;
    let mut new_pts: Vec<K> = Vec::with_capacity(n);
    new_pts.extend_from_slice(&chain);
    let mut i = end;
    loop {
        i = (i + 1) % n;
        if i == start {
            break;
        }
        new_pts.push(pts[i]);
    }
    let _ = gap;
    HPolygon::from_klein(&new_pts)
}

// ---------------------------------------------------------------------------
// the 2-convex hull iteration

/// Outcome of the crescent-move iteration: the convex result, the
/// per-iteration maximum folding number, and the move count.
#[derive(Debug, Clone)]
pub struct HullTrace {
    pub polygon: HPolygon,
    pub folding_trace: Vec<usize>,
    pub moves: usize,
}

fn check_marks(
    poly: &HPolygon,
    crescents: &[Crescent2D],
    marked: &MarkedGeodesics,
) -> Result<()> {
    let pts = poly.klein_coords();
    for (ci, c) in crescents.iter().enumerate() {
        let pocket = pocket_klein(poly, c.alpha.as_slice());
        if pocket.len() < 3 {
            continue;
        }
        let chord_a = pts[c.chord.0];
        let chord_b = pts[c.chord.1];
        for (mi, (p, q)) in marked.chords.iter().enumerate() {
            for k in 0..17 {
                let t = k as f64 / 16.0;
                let x = hypgeom::geodesic_point(p, q, t)?;
                let xk3 = x.to_klein()?;
                let xk = [xk3[0], xk3[1]];
                if !point_in_polygon(xk, &pocket) {
                    continue;
                }
                // exactly on the I-part chord counts as inside the
                // closed neighborhood, not as a violation
                if dist_point_seg_k(xk, chord_a, chord_b) <= 1e-9 {
                    continue;
                }
                let npk = pocket.len();
                let near_arc = (0..npk - 1)
                    .any(|e| dist_point_seg_k(xk, pocket[e], pocket[e + 1]) <= 1e-9);
                if near_arc {
                    continue;
                }
                return Err(Error::IncompressibilityViolation { index: mi, crescent: ci });
            }
        }
    }
    Ok(())
}

fn prune_collinear(poly: &HPolygon) -> Result<HPolygon> {
    let pts = poly.klein_coords();
    let n = pts.len();
    let keep: Vec<K> = (0..n)
        .filter(|&i| {
            orient(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]).abs() > 1e-13
        })
        .map(|i| pts[i])
        .collect();
    if keep.len() < 3 {
        return Ok(poly.clone());
    }
    HPolygon::from_klein(&keep)
}

/// Iterate crescent moves, deepest pockets first, until no crescents
/// remain. Each recorded iteration strictly decreases the maximum
/// folding number; marked geodesics must avoid every crescent interior
/// and end up inside the closed eps-neighborhood of the result.
pub fn two_convex_hull(
    poly: &HPolygon,
    marked: &MarkedGeodesics,
    eps: f64,
) -> Result<HullTrace> {
    if eps <= 0.0 {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {eps}")));
    }
    let mut current = poly.clone();
    let mut trace: Vec<usize> = Vec::new();
    let mut moves = 0usize;
    for _ in 0..64 {
        let crescents = find_crescents(&current)?;
        if crescents.is_empty() {
            break;
        }
        check_marks(&current, &crescents, marked)?;
        let level_max = crescents.iter().map(|c| c.folding_number).max().unwrap();
        trace.push(level_max);
        // move zero-folded pockets (deepest first) until the maximum
        // folding number drops
        let mut inner_guard = 0;
        loop {
            inner_guard += 1;
            if inner_guard > 256 {
                return Err(Error::NoConvergence(level_max as f64));
            }
            let cs = find_crescents(&current)?;
            let now_max = cs.iter().map(|c| c.folding_number).max();
            match now_max {
                None => break,
                Some(m) if m < level_max => break,
                _ => {}
            }
            let target = cs
                .iter()
                .filter(|c| c.folding_number == 0)
                .max_by_key(|c| c.level)
                .ok_or(Error::NoConvergence(level_max as f64))?;
            current = crescent_move(&current, std::slice::from_ref(target))?;
            moves += 1;
            // every marked geodesic stays inside the closed
            // eps-neighborhood after each single move
            for (p, q) in &marked.chords {
                for k in 0..9 {
                    let t = k as f64 / 8.0;
                    let x = hypgeom::geodesic_point(p, q, t)?;
                    if !current.contains_within(&x, eps)? {
                        return Err(Error::NoConvergence(f64::NAN));
                    }
                }
            }
        }
    }
    let polygon = prune_collinear(&current)?;
    if !polygon.is_convex() {
        return Err(Error::NoConvergence(f64::NAN));
    }
    Ok(HullTrace { polygon, folding_trace: trace, moves })
}
