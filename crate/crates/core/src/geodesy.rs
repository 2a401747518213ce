//! Geodesics inside complexes: piecewise-straight paths with barycentric
//! waypoints, corridor unfolding into the model plane, funnel
//! straightening with a discrete vertex-passing rule, closed-loop
//! tightening, singular-surface Gauss-Bonnet audits, h-maps, and
//! alpha-nets.
//!
//! Straightening works for curvature -1 and 0. Hyperbolic corridors are
//! unfolded onto the hyperboloid and the taut path is found in the Klein
//! chart, where geodesics are Euclidean chords, so the Euclidean funnel
//! algorithm is exact in both geometries.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::f64::consts::PI;

use crate::complexcore::MkComplex;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::hypgeom::{self, Curvature, ModelPoint};

/// Residual two-sided angle tolerance below which a breakpoint counts as
/// straight.
pub const STRAIGHTEN_TOL: f64 = 1e-8;

const BARY_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// waypoints and paths

/// A point of a complex: a simplex and barycentric coordinates in its
/// canonical embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Waypoint {
    pub simplex: usize,
    pub bary: Vec<f64>,
}

impl Waypoint {
    pub fn new(simplex: usize, bary: Vec<f64>) -> Self {
        Waypoint { simplex, bary }
    }

    /// Waypoint sitting exactly on local vertex `local` of `simplex`.
    pub fn at_vertex(complex: &MkComplex, simplex: usize, local: usize) -> Self {
        let n = complex.simplices()[simplex].dim() + 1;
        let mut bary = vec![0.0; n];
        bary[local] = 1.0;
        Waypoint { simplex, bary }
    }

    /// A breakpoint that is not an actual vertex of the complex.
    pub fn is_virtual_vertex(&self) -> bool {
        self.bary.iter().filter(|b| b.abs() > BARY_TOL).count() > 1
    }

    /// The local vertex this waypoint coincides with, if any.
    pub fn vertex_local(&self) -> Option<usize> {
        let mut found = None;
        for (i, b) in self.bary.iter().enumerate() {
            if b.abs() > BARY_TOL {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }

    fn validate(&self, complex: &MkComplex) -> Result<()> {
        let sims = complex.simplices();
        if self.simplex >= sims.len() {
            return Err(Error::InvalidInput(format!(
                "waypoint references simplex {} of {}",
                self.simplex,
                sims.len()
            )));
        }
        let n = sims[self.simplex].dim() + 1;
        if self.bary.len() != n {
            return Err(Error::DimensionMismatch(self.bary.len(), n));
        }
        let sum: f64 = self.bary.iter().sum();
        if (sum - 1.0).abs() > 1e-12 || self.bary.iter().any(|b| *b < -1e-9) {
            return Err(Error::InvalidInput(format!(
                "barycentric coordinates {:?} do not describe a point",
                self.bary
            )));
        }
        Ok(())
    }
}

fn embed(complex: &MkComplex, s: usize) -> Result<Vec<ModelPoint>> {
    complex.simplices()[s].embed(complex.curvature())
}

fn bary_combine(curvature: Curvature, emb: &[ModelPoint], bary: &[f64]) -> Result<ModelPoint> {
    match curvature {
        Curvature::Hyperbolic => {
            let mut raw = vec![0.0; 3];
            for (w, v) in bary.iter().zip(emb) {
                for (r, c) in raw.iter_mut().zip(v.coords()) {
                    *r += w * c;
                }
            }
            let q = -hypgeom::minkowski_dot(&raw, &raw);
            if q <= 0.0 || raw[0] <= 0.0 {
                return Err(Error::InvalidPoint(
                    "barycentric combination left the hyperboloid cone".into(),
                ));
            }
            let s = q.sqrt();
            ModelPoint::hyperboloid(&[raw[0] / s, raw[1] / s, raw[2] / s])
        }
        Curvature::Euclidean => {
            let d = emb[0].coords().len();
            let mut raw = vec![0.0; d];
            for (w, v) in bary.iter().zip(emb) {
                for (r, c) in raw.iter_mut().zip(v.coords()) {
                    *r += w * c;
                }
            }
            ModelPoint::euclidean(&raw)
        }
        Curvature::Spherical => Err(Error::UnsupportedCurvature(1)),
    }
}

fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())?;
        m.swap(col, piv);
        if m[col][col].abs() < 1e-300 {
            return None;
        }
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Barycentric coordinates of `p` relative to an embedded 2-simplex.
fn bary_of(curvature: Curvature, emb: &[ModelPoint], p: &ModelPoint) -> Result<Vec<f64>> {
    match curvature {
        Curvature::Hyperbolic => {
            let mut m = [[0.0; 4]; 3];
            for r in 0..3 {
                for c in 0..3 {
                    m[r][c] = emb[c].coords()[r];
                }
                m[r][3] = p.coords()[r];
            }
            let lam = solve3(m).ok_or_else(|| {
                Error::InvalidPoint("degenerate simplex embedding".into())
            })?;
            let sum: f64 = lam.iter().sum();
            if sum <= 0.0 {
                return Err(Error::InvalidPoint("point outside the simplex cone".into()));
            }
            Ok(lam.iter().map(|l| l / sum).collect())
        }
        Curvature::Euclidean => {
            let (a, b, c) = (emb[0].coords(), emb[1].coords(), emb[2].coords());
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            if det.abs() < 1e-300 {
                return Err(Error::InvalidPoint("degenerate simplex embedding".into()));
            }
            let x = p.coords();
            let l1 = ((x[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (x[1] - a[1])) / det;
            let l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (x[0] - a[0]) * (b[1] - a[1])) / det;
            Ok(vec![1.0 - l1 - l2, l1, l2])
        }
        Curvature::Spherical => Err(Error::UnsupportedCurvature(1)),
    }
}

/// The model point of a waypoint, in the canonical embedding of its simplex.
pub fn waypoint_point(complex: &MkComplex, wp: &Waypoint) -> Result<ModelPoint> {
    let emb = embed(complex, wp.simplex)?;
    bary_combine(complex.curvature(), &emb, &wp.bary)
}

/// Re-express a waypoint lying on a glued face in the neighboring simplex.
pub fn transport(complex: &MkComplex, wp: &Waypoint, target: usize) -> Result<Waypoint> {
    if wp.simplex == target {
        return Ok(wp.clone());
    }
    let dim = complex.simplices()[wp.simplex].dim();
    for f in 0..=dim {
        if wp.bary[f].abs() > 1e-7 {
            continue; // not supported on this face
        }
        if let Some((t, _, map)) = complex.neighbor_across(wp.simplex, f) {
            if t != target {
                continue;
            }
            let n = complex.simplices()[target].dim() + 1;
            let mut bary = vec![0.0; n];
            for &(la, lb) in map {
                bary[lb] = wp.bary[la];
            }
            let sum: f64 = bary.iter().sum();
            for b in &mut bary {
                *b /= sum;
            }
            return Ok(Waypoint { simplex: target, bary });
        }
    }
    Err(Error::Disconnected)
}

/// Common-frame embeddings of two glued 2-simplices: for each face of `s`
/// glued to `t`, the canonical embedding of `s` together with `t` unfolded
/// across that face.
fn placements(
    complex: &MkComplex,
    s: usize,
    t: usize,
) -> Result<Vec<(Vec<ModelPoint>, Vec<ModelPoint>)>> {
    let sims = complex.simplices();
    let emb_s = embed(complex, s)?;
    let mut out = Vec::new();
    for f in 0..=sims[s].dim() {
        let Some((nbr, f2, map)) = complex.neighbor_across(s, f) else { continue };
        if nbr != t {
            continue;
        }
        let pair = sims[s].face(f);
        let (p, q) = (pair[0], pair[1]);
        let img = |l: usize| map.iter().find(|(a, _)| *a == l).unwrap().1;
        let (p2, q2) = (img(p), img(q));
        let r2 = f2;
        let da = sims[t].length(p2, r2);
        let db = sims[t].length(q2, r2);
        let side = hypgeom::side_of(&emb_s[p], &emb_s[q], &emb_s[f])?;
        let apex = hypgeom::place_apex(&emb_s[p], &emb_s[q], da, db, side <= 0.0)?;
        let mut placed = vec![apex.clone(), apex.clone(), apex];
        placed[p2] = emb_s[p].clone();
        placed[q2] = emb_s[q].clone();
        out.push((emb_s.clone(), placed));
    }
    Ok(out)
}

/// Distance between two waypoints in the same or in glued simplices.
/// Across a gluing the segment is measured in the common unfolding; if
/// the simplices are glued along several faces the shortest reading wins.
pub fn waypoint_distance(complex: &MkComplex, a: &Waypoint, b: &Waypoint) -> Result<f64> {
    let curv = complex.curvature();
    if a.simplex == b.simplex {
        let emb = embed(complex, a.simplex)?;
        return hypgeom::dist(
            &bary_combine(curv, &emb, &a.bary)?,
            &bary_combine(curv, &emb, &b.bary)?,
        );
    }
    if complex.simplices()[a.simplex].dim() == 1 {
        let moved = transport(complex, a, b.simplex)
            .or_else(|_| transport(complex, b, a.simplex))?;
        return if moved.simplex == b.simplex {
            waypoint_distance(complex, &moved, b)
        } else {
            waypoint_distance(complex, a, &moved)
        };
    }
    let mut best = f64::INFINITY;
    for (emb_a, emb_b) in placements(complex, a.simplex, b.simplex)? {
        let pa = bary_combine(curv, &emb_a, &a.bary)?;
        let pb = bary_combine(curv, &emb_b, &b.bary)?;
        best = best.min(hypgeom::dist(&pa, &pb)?);
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Disconnected)
    }
}

/// A piecewise-straight path through a complex.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPath {
    pub waypoints: Vec<Waypoint>,
}

impl ComplexPath {
    pub fn new(complex: &MkComplex, waypoints: Vec<Waypoint>) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::InvalidInput("path needs at least one waypoint".into()));
        }
        for wp in &waypoints {
            wp.validate(complex)?;
        }
        for pair in waypoints.windows(2) {
            if !adjacent_ok(complex, &pair[0], &pair[1]) {
                return Err(Error::InvalidInput(format!(
                    "consecutive waypoints in simplices {} and {} share no glued face",
                    complex.simplices()[pair[0].simplex].id,
                    complex.simplices()[pair[1].simplex].id
                )));
            }
        }
        Ok(ComplexPath { waypoints })
    }

    pub fn length(&self, complex: &MkComplex) -> Result<f64> {
        let mut total = 0.0;
        for pair in self.waypoints.windows(2) {
            total += segment_length(complex, &pair[0], &pair[1])?;
        }
        Ok(total)
    }

    pub fn start(&self) -> &Waypoint {
        &self.waypoints[0]
    }

    pub fn end(&self) -> &Waypoint {
        self.waypoints.last().unwrap()
    }

    pub fn is_closed(&self, complex: &MkComplex) -> Result<bool> {
        Ok(self.waypoints.len() > 1
            && waypoint_distance(complex, self.start(), self.end())? < 1e-9)
    }

    /// The point at arclength fraction `t` in [0, 1].
    pub fn point_at(&self, complex: &MkComplex, t: f64) -> Result<Waypoint> {
        let t = t.clamp(0.0, 1.0);
        let total = self.length(complex)?;
        if total <= 1e-300 {
            return Ok(self.waypoints[0].clone());
        }
        let mut remaining = t * total;
        let nseg = self.waypoints.len() - 1;
        for (si, pair) in self.waypoints.windows(2).enumerate() {
            let seg = segment_length(complex, &pair[0], &pair[1])?;
            if remaining <= seg || si == nseg - 1 {
                if seg <= 1e-300 {
                    return Ok(pair[0].clone());
                }
                let f = (remaining / seg).clamp(0.0, 1.0);
                return interpolate_pair(complex, &pair[0], &pair[1], f);
            }
            remaining -= seg;
        }
        Ok(self.end().clone())
    }
}

fn adjacent_ok(complex: &MkComplex, a: &Waypoint, b: &Waypoint) -> bool {
    if a.simplex == b.simplex {
        return true;
    }
    let dim = complex.simplices()[a.simplex].dim();
    if (0..=dim)
        .any(|f| matches!(complex.neighbor_across(a.simplex, f), Some((t, _, _)) if t == b.simplex))
    {
        return true;
    }
    if transport(complex, a, b.simplex).is_ok() || transport(complex, b, a.simplex).is_ok() {
        return true;
    }
    // pure-1 complexes: segments joined at a quotient vertex
    if dim == 1 {
        return shared_graph_vertex(complex, a.simplex, b.simplex).is_some();
    }
    false
}

fn shared_graph_vertex(complex: &MkComplex, s: usize, t: usize) -> Option<usize> {
    for i in 0..2 {
        for j in 0..2 {
            if complex.vertex_class(s, i) == complex.vertex_class(t, j) {
                return Some(complex.vertex_class(s, i));
            }
        }
    }
    None
}

/// The point at fraction `f` of the straight segment from `a` to `b`,
/// expressed as a waypoint of whichever simplex contains it.
fn interpolate_pair(complex: &MkComplex, a: &Waypoint, b: &Waypoint, f: f64) -> Result<Waypoint> {
    let curv = complex.curvature();
    let sims = complex.simplices();
    let finish = |s: usize, emb: &[ModelPoint], p: &ModelPoint| -> Result<Waypoint> {
        let mut bary = if emb.len() == 3 {
            bary_of(curv, emb, p)?
        } else {
            edge_bary(&emb[0], &emb[1], p, curv)?
        };
        for x in &mut bary {
            *x = x.max(0.0);
        }
        let sum: f64 = bary.iter().sum();
        for x in &mut bary {
            *x /= sum;
        }
        Ok(Waypoint { simplex: s, bary })
    };
    if a.simplex == b.simplex {
        let emb = embed(complex, a.simplex)?;
        let pa = bary_combine(curv, &emb, &a.bary)?;
        let pb = bary_combine(curv, &emb, &b.bary)?;
        let p = hypgeom::geodesic_point(&pa, &pb, f)?;
        return finish(a.simplex, &emb, &p);
    }
    if sims[a.simplex].dim() == 1 {
        // split the run through the shared vertex by arclength
        if let Ok(moved) = transport(complex, a, b.simplex) {
            return interpolate_pair(complex, &moved, b, f);
        }
        if let Ok(moved) = transport(complex, b, a.simplex) {
            return interpolate_pair(complex, a, &moved, f);
        }
        let c = shared_graph_vertex(complex, a.simplex, b.simplex).ok_or(Error::Disconnected)?;
        let la = graph_vertex_local(complex, a.simplex, c)?;
        let lb = graph_vertex_local(complex, b.simplex, c)?;
        let va = Waypoint::at_vertex(complex, a.simplex, la);
        let vb = Waypoint::at_vertex(complex, b.simplex, lb);
        let d1 = waypoint_distance(complex, a, &va)?;
        let d2 = waypoint_distance(complex, &vb, b)?;
        let s = f * (d1 + d2);
        return if s <= d1 || d2 <= 1e-300 {
            interpolate_pair(complex, a, &va, if d1 <= 1e-300 { 0.0 } else { s / d1 })
        } else {
            interpolate_pair(complex, &vb, b, (s - d1) / d2)
        };
    }
    let mut best: Option<(f64, Vec<ModelPoint>, Vec<ModelPoint>, ModelPoint, ModelPoint)> = None;
    for (emb_a, emb_b) in placements(complex, a.simplex, b.simplex)? {
        let pa = bary_combine(curv, &emb_a, &a.bary)?;
        let pb = bary_combine(curv, &emb_b, &b.bary)?;
        let d = hypgeom::dist(&pa, &pb)?;
        if best.as_ref().map_or(true, |(bd, ..)| d < *bd) {
            best = Some((d, emb_a, emb_b, pa, pb));
        }
    }
    let (_, emb_a, emb_b, pa, pb) = best.ok_or(Error::Disconnected)?;
    let p = hypgeom::geodesic_point(&pa, &pb, f)?;
    let la = bary_of(curv, &emb_a, &p)?;
    if la.iter().all(|x| *x >= -1e-9) {
        return finish(a.simplex, &emb_a, &p);
    }
    finish(b.simplex, &emb_b, &p)
}

fn segment_length(complex: &MkComplex, a: &Waypoint, b: &Waypoint) -> Result<f64> {
    if a.simplex != b.simplex && complex.simplices()[a.simplex].dim() == 1 {
        if transport(complex, a, b.simplex).is_err() && transport(complex, b, a.simplex).is_err() {
            // joined at a shared quotient vertex
            let c = shared_graph_vertex(complex, a.simplex, b.simplex)
                .ok_or(Error::Disconnected)?;
            let la = graph_vertex_local(complex, a.simplex, c)?;
            let lb = graph_vertex_local(complex, b.simplex, c)?;
            let va = Waypoint::at_vertex(complex, a.simplex, la);
            let vb = Waypoint::at_vertex(complex, b.simplex, lb);
            return Ok(waypoint_distance(complex, a, &va)?
                + waypoint_distance(complex, &vb, b)?);
        }
    }
    waypoint_distance(complex, a, b)
}

fn graph_vertex_local(complex: &MkComplex, s: usize, class: usize) -> Result<usize> {
    (0..2)
        .find(|&l| complex.vertex_class(s, l) == class)
        .ok_or(Error::Disconnected)
}

/// Barycentric coordinates of a point on an embedded edge [a, b].
fn edge_bary(a: &ModelPoint, b: &ModelPoint, p: &ModelPoint, curv: Curvature) -> Result<Vec<f64>> {
    let d = hypgeom::dist(a, b)?;
    if d <= 1e-300 {
        return Ok(vec![1.0, 0.0]);
    }
    let t = (hypgeom::dist(a, p)? / d).clamp(0.0, 1.0);
    match curv {
        Curvature::Euclidean => Ok(vec![1.0 - t, t]),
        Curvature::Hyperbolic => {
            // arclength fraction -> Klein parameter -> projective weight
            let pt = hypgeom::geodesic_point(a, b, t)?;
            let lam = klein_param_to_bary(a, b, klein_param(a, b, &pt)?);
            Ok(vec![1.0 - lam, lam])
        }
        Curvature::Spherical => Err(Error::UnsupportedCurvature(1)),
    }
}

fn klein_param(a: &ModelPoint, b: &ModelPoint, p: &ModelPoint) -> Result<f64> {
    let ka = a.to_klein()?;
    let kb = b.to_klein()?;
    let kp = p.to_klein()?;
    let dx = [kb[0] - ka[0], kb[1] - ka[1]];
    let n2 = dx[0] * dx[0] + dx[1] * dx[1];
    if n2 <= 1e-300 {
        return Ok(0.0);
    }
    Ok(((kp[0] - ka[0]) * dx[0] + (kp[1] - ka[1]) * dx[1]) / n2)
}

/// Klein-chart parameter along the chord a->b into the projective
/// barycentric weight on the hyperboloid edge.
fn klein_param_to_bary(a: &ModelPoint, b: &ModelPoint, t: f64) -> f64 {
    let (a0, b0) = (a.coords()[0], b.coords()[0]);
    (t * a0 / (t * a0 + (1.0 - t) * b0)).clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// corridors and unfolding

/// A combinatorial corridor: the simplices a path traverses and, for each
/// transition, the face of the earlier simplex it crosses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corridor {
    pub sims: Vec<usize>,
    pub portal_faces: Vec<usize>,
}

/// The corridor traversed by a path.
pub fn derive_corridor(complex: &MkComplex, path: &ComplexPath) -> Result<Corridor> {
    let mut sims = vec![path.waypoints[0].simplex];
    let mut portal_faces = Vec::new();
    for pair in path.waypoints.windows(2) {
        let (wa, wb) = (&pair[0], &pair[1]);
        let s = *sims.last().unwrap();
        if wb.simplex == s {
            continue;
        }
        let dim = complex.simplices()[s].dim();
        let mut cands: Vec<usize> = (0..=dim)
            .filter(|&f| matches!(complex.neighbor_across(s, f), Some((t, _, _)) if t == wb.simplex))
            .collect();
        if cands.is_empty() {
            return Err(Error::Disconnected);
        }
        if cands.len() > 1 {
            // pick the face the crossing waypoint actually sits on
            if let Some(&f) = cands.iter().find(|&&f| wa.bary[f].abs() <= 1e-7) {
                cands = vec![f];
            }
        }
        portal_faces.push(cands[0]);
        sims.push(wb.simplex);
    }
    Ok(Corridor { sims, portal_faces })
}

struct PortalGeom {
    l_local: usize,
    r_local: usize,
    l_local_next: usize,
    r_local_next: usize,
    l_pt: ModelPoint,
    r_pt: ModelPoint,
    l_ch: [f64; 2],
    r_ch: [f64; 2],
}

fn chart(p: &ModelPoint) -> Result<[f64; 2]> {
    match p.curvature() {
        Curvature::Euclidean => Ok([p.coords()[0], p.coords()[1]]),
        Curvature::Hyperbolic => {
            let k = p.to_klein()?;
            Ok([k[0], k[1]])
        }
        Curvature::Spherical => Err(Error::UnsupportedCurvature(1)),
    }
}

struct Unfolded {
    emb: Vec<Vec<ModelPoint>>,
    portals: Vec<PortalGeom>,
}

/// Lay the corridor out isometrically in the model plane.
fn unfold(complex: &MkComplex, corridor: &Corridor, start_chart: [f64; 2]) -> Result<Unfolded> {
    let curv = complex.curvature();
    if curv == Curvature::Spherical {
        return Err(Error::UnsupportedCurvature(1));
    }
    let sims = complex.simplices();
    let mut emb: Vec<Vec<ModelPoint>> = vec![embed(complex, corridor.sims[0])?];
    let mut raw: Vec<(usize, usize, usize, usize)> = Vec::new();
    for (i, &f) in corridor.portal_faces.iter().enumerate() {
        let s = corridor.sims[i];
        let pair = sims[s].face(f);
        let (p, q) = (pair[0], pair[1]);
        let (t, f2, map) = complex
            .neighbor_across(s, f)
            .ok_or(Error::Disconnected)?;
        if t != corridor.sims[i + 1] {
            return Err(Error::Disconnected);
        }
        let img = |l: usize| map.iter().find(|(a, _)| *a == l).unwrap().1;
        let (p2, q2) = (img(p), img(q));
        let r2 = f2;
        let da = sims[t].length(p2, r2);
        let db = sims[t].length(q2, r2);
        let pa = emb[i][p].clone();
        let pb = emb[i][q].clone();
        let side = hypgeom::side_of(&pa, &pb, &emb[i][f])?;
        let apex = hypgeom::place_apex(&pa, &pb, da, db, side <= 0.0)?;
        let mut next = vec![apex.clone(), apex.clone(), apex];
        next[p2] = pa;
        next[q2] = pb;
        emb.push(next);
        raw.push((p, q, p2, q2));
    }
    // orient portals left/right along the direction of travel
    let mut portals: Vec<PortalGeom> = Vec::with_capacity(raw.len());
    for (i, &(a, b, a2, b2)) in raw.iter().enumerate() {
        let a_pt = emb[i][a].clone();
        let b_pt = emb[i][b].clone();
        let a_ch = chart(&a_pt)?;
        let b_ch = chart(&b_pt)?;
        let a_is_left = if i == 0 {
            cross2(sub(b_ch, start_chart), sub(a_ch, start_chart)) > 0.0
        } else {
            let prev = &portals[i - 1];
            if a == prev.l_local_next {
                true
            } else if b == prev.l_local_next {
                false
            } else if a == prev.r_local_next {
                false
            } else {
                true
            }
        };
        portals.push(if a_is_left {
            PortalGeom {
                l_local: a,
                r_local: b,
                l_local_next: a2,
                r_local_next: b2,
                l_pt: a_pt,
                r_pt: b_pt,
                l_ch: a_ch,
                r_ch: b_ch,
            }
        } else {
            PortalGeom {
                l_local: b,
                r_local: a,
                l_local_next: b2,
                r_local_next: a2,
                l_pt: b_pt,
                r_pt: a_pt,
                l_ch: b_ch,
                r_ch: a_ch,
            }
        });
    }
    Ok(Unfolded { emb, portals })
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross2(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

/// Signed area test: positive when `c` lies to the left of a->b.
fn area2(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    cross2(sub(b, a), sub(c, a))
}

/// The taut path through the portal sequence: returns the bend corners as
/// (portal index, took-left-endpoint).
fn funnel(a: [f64; 2], portals: &[PortalGeom], b: [f64; 2]) -> Result<Vec<(usize, bool)>> {
    let n = portals.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let pt = |i: usize, left: bool| -> [f64; 2] {
        if i == n {
            b
        } else if left {
            portals[i].l_ch
        } else {
            portals[i].r_ch
        }
    };
    let mut corners: Vec<(usize, bool)> = Vec::new();
    let mut apex = a;
    let mut lpt = pt(0, true);
    let mut rpt = pt(0, false);
    let (mut li, mut ri) = (0usize, 0usize);
    let mut i = 1usize;
    let mut guard = 0usize;
    let limit = 8 * (n + 2) * (n + 2) + 64;
    while i <= n {
        guard += 1;
        if guard > limit {
            return Err(Error::NoConvergence(f64::NAN));
        }
        let cl = pt(i, true);
        let cr = pt(i, false);
        // narrow the right funnel edge
        if area2(apex, rpt, cr) >= 0.0 {
            if area2(apex, lpt, cr) <= 0.0 {
                rpt = cr;
                ri = i;
            } else {
                // right boundary crossed the left one: bend at the left point
                corners.push((li, true));
                apex = lpt;
                rpt = apex;
                ri = li;
                i = li + 1;
                continue;
            }
        }
        // narrow the left funnel edge
        if area2(apex, lpt, cl) <= 0.0 {
            if area2(apex, rpt, cl) >= 0.0 {
                lpt = cl;
                li = i;
            } else {
                corners.push((ri, false));
                apex = rpt;
                lpt = apex;
                li = ri;
                i = ri + 1;
                continue;
            }
        }
        i += 1;
    }
    Ok(corners)
}

fn seg_portal_u(p: [f64; 2], q: [f64; 2], l: [f64; 2], r: [f64; 2]) -> Option<(f64, f64)> {
    // p + s (q - p) = l + u (r - l)
    let d = sub(q, p);
    let e = sub(r, l);
    let det = cross2(d, e);
    if det.abs() < 1e-18 {
        return None;
    }
    let w = sub(l, p);
    let s = cross2(w, e) / det;
    let u = cross2(w, d) / -det;
    Some((s, -u))
}

// ---------------------------------------------------------------------------
// straightening

#[derive(Debug)]
struct TautPath {
    /// planar polyline: start, bend corners, end
    nodes: Vec<ModelPoint>,
    node_charts: Vec<[f64; 2]>,
    /// corner metadata parallel to nodes[1..len-1]: portal index
    corner_portals: Vec<usize>,
    /// crossing parameter (left -> right) per portal
    crossings: Vec<f64>,
    length: f64,
}

fn taut_path(
    curv: Curvature,
    start_pt: &ModelPoint,
    unf: &Unfolded,
    end_pt: &ModelPoint,
) -> Result<TautPath> {
    let a = chart(start_pt)?;
    let b = chart(end_pt)?;
    let corners = funnel(a, &unf.portals, b)?;
    let mut nodes = vec![start_pt.clone()];
    let mut node_charts = vec![a];
    let mut corner_portals = Vec::with_capacity(corners.len());
    for &(idx, left) in &corners {
        let p = &unf.portals[idx];
        nodes.push(if left { p.l_pt.clone() } else { p.r_pt.clone() });
        node_charts.push(if left { p.l_ch } else { p.r_ch });
        corner_portals.push(idx);
    }
    nodes.push(end_pt.clone());
    node_charts.push(b);
    let mut length = 0.0;
    for w in nodes.windows(2) {
        length += hypgeom::dist(&w[0], &w[1])?;
    }
    let _ = curv;
    // crossing parameter for every portal, walking the polyline once
    let mut crossings = Vec::with_capacity(unf.portals.len());
    let mut seg = 0usize;
    for p in &unf.portals {
        let mut found = None;
        let mut k = seg;
        while k + 1 < node_charts.len() {
            if let Some((s, u)) = seg_portal_u(node_charts[k], node_charts[k + 1], p.l_ch, p.r_ch)
            {
                if (-1e-7..=1.0 + 1e-7).contains(&s) && (-1e-7..=1.0 + 1e-7).contains(&u) {
                    found = Some((k, u.clamp(0.0, 1.0)));
                    break;
                }
            }
            k += 1;
        }
        match found {
            Some((k, u)) => {
                seg = k;
                crossings.push(u);
            }
            None => {
                // nearly collinear crossing: project the closest node
                let mut best = (f64::INFINITY, 0.0);
                for ch in &node_charts {
                    let e = sub(p.r_ch, p.l_ch);
                    let n2 = e[0] * e[0] + e[1] * e[1];
                    let u = if n2 <= 1e-300 {
                        0.0
                    } else {
                        ((ch[0] - p.l_ch[0]) * e[0] + (ch[1] - p.l_ch[1]) * e[1]) / n2
                    };
                    let uc = u.clamp(0.0, 1.0);
                    let proj = [p.l_ch[0] + uc * e[0], p.l_ch[1] + uc * e[1]];
                    let d2 = (ch[0] - proj[0]).powi(2) + (ch[1] - proj[1]).powi(2);
                    if d2 < best.0 {
                        best = (d2, uc);
                    }
                }
                crossings.push(best.1);
            }
        }
    }
    Ok(TautPath { nodes, node_charts, corner_portals, crossings, length })
}

/// Contiguous run of portals incident (in the unfolded plane) to a corner.
fn corner_run(unf: &Unfolded, ch: [f64; 2], idx: usize) -> (usize, usize) {
    let touches = |j: usize| -> bool {
        let p = &unf.portals[j];
        veq(p.l_ch, ch) || veq(p.r_ch, ch)
    };
    let mut j0 = idx;
    while j0 > 0 && touches(j0 - 1) {
        j0 -= 1;
    }
    let mut j1 = idx;
    while j1 + 1 < unf.portals.len() && touches(j1 + 1) {
        j1 += 1;
    }
    (j0, j1)
}

fn veq(a: [f64; 2], b: [f64; 2]) -> bool {
    (a[0] - b[0]).abs() <= 1e-9 && (a[1] - b[1]).abs() <= 1e-9
}

/// Route the corridor around the far side of the vertex at a bend.
fn reroute(
    complex: &MkComplex,
    corridor: &Corridor,
    unf: &Unfolded,
    j0: usize,
    j1: usize,
    ch: [f64; 2],
) -> Option<Corridor> {
    let sims = complex.simplices();
    let p0 = &unf.portals[j0];
    let (lv, other) =
        if veq(p0.l_ch, ch) { (p0.l_local, p0.r_local) } else { (p0.r_local, p0.l_local) };
    let p1 = &unf.portals[j1];
    let (lv_t, other_t) = if veq(p1.l_ch, ch) {
        (p1.l_local_next, p1.r_local_next)
    } else {
        (p1.r_local_next, p1.l_local_next)
    };
    let target = corridor.sims[j1 + 1];
    let mut fan: Vec<usize> = Vec::new();
    let mut fan_faces: Vec<usize> = Vec::new();
    let mut cur = corridor.sims[j0];
    let mut lv_c = lv;
    let mut cross = other;
    for _ in 0..(3 * sims.len() + 3) {
        let (nxt, f_in, map) = complex.neighbor_across(cur, cross)?;
        fan_faces.push(cross);
        let lv_n = map.iter().find(|(a, _)| *a == lv_c)?.1;
        if nxt == target && lv_n == lv_t && f_in == other_t {
            let mut new_sims = corridor.sims[..=j0].to_vec();
            new_sims.extend_from_slice(&fan);
            new_sims.extend_from_slice(&corridor.sims[j1 + 1..]);
            let mut new_faces = corridor.portal_faces[..j0].to_vec();
            new_faces.extend_from_slice(&fan_faces);
            new_faces.extend_from_slice(&corridor.portal_faces[j1 + 1..]);
            return Some(Corridor { sims: new_sims, portal_faces: new_faces });
        }
        fan.push(nxt);
        let z = sims[nxt].face(f_in).into_iter().find(|&l| l != lv_n)?;
        cur = nxt;
        lv_c = lv_n;
        cross = z;
    }
    None
}

/// Straighten a path within (and, via vertex-passing, around) its corridor.
/// Returns the straightened path and the length after every iteration.
pub fn straighten_with_trace(
    complex: &MkComplex,
    path: &ComplexPath,
    max_iters: usize,
    tol: f64,
) -> Result<(ComplexPath, Vec<f64>)> {
    let corridor = derive_corridor(complex, path)?;
    straighten_corridor(complex, corridor, path.start(), path.end(), max_iters, tol)
}

/// Straighten a path; the result satisfies the two-sided angle condition
/// (>= pi - tol on both sides at every breakpoint).
pub fn straighten_path(
    complex: &MkComplex,
    path: &ComplexPath,
    max_iters: usize,
    tol: f64,
) -> Result<ComplexPath> {
    straighten_with_trace(complex, path, max_iters, tol).map(|(p, _)| p)
}

/// Push a waypoint supported on face `f` across the gluing on that face.
fn transport_across(complex: &MkComplex, wp: &Waypoint, f: usize) -> Result<Waypoint> {
    let (t, _, map) = complex.neighbor_across(wp.simplex, f).ok_or(Error::Disconnected)?;
    let mut bary = vec![0.0; complex.simplices()[t].dim() + 1];
    for &(la, lb) in map {
        bary[lb] = wp.bary[la];
    }
    let sum: f64 = bary.iter().sum();
    for b in &mut bary {
        *b /= sum;
    }
    Ok(Waypoint { simplex: t, bary })
}

/// Trim degenerate corridor ends: an endpoint sitting on the first or
/// last portal face is representable one simplex deeper, and keeping it
/// outside guarantees the start never coincides with a portal.
fn trim_corridor(
    complex: &MkComplex,
    corridor: &mut Corridor,
    start: &mut Waypoint,
    end: &mut Waypoint,
) -> Result<()> {
    while corridor.sims.len() > 1 {
        let f = corridor.portal_faces[0];
        if start.bary[f].abs() > BARY_TOL {
            break;
        }
        *start = transport_across(complex, start, f)?;
        if start.simplex != corridor.sims[1] {
            return Err(Error::Disconnected);
        }
        corridor.sims.remove(0);
        corridor.portal_faces.remove(0);
    }
    while corridor.sims.len() > 1 {
        let n = corridor.sims.len();
        let f_last = corridor.portal_faces[n - 2];
        let Some((_, f2, _)) = complex.neighbor_across(corridor.sims[n - 2], f_last) else {
            return Err(Error::Disconnected);
        };
        if end.bary[f2].abs() > BARY_TOL {
            break;
        }
        *end = transport_across(complex, end, f2)?;
        if end.simplex != corridor.sims[n - 2] {
            return Err(Error::Disconnected);
        }
        corridor.sims.pop();
        corridor.portal_faces.pop();
    }
    Ok(())
}

fn straighten_corridor(
    complex: &MkComplex,
    mut corridor: Corridor,
    start: &Waypoint,
    end: &Waypoint,
    max_iters: usize,
    tol: f64,
) -> Result<(ComplexPath, Vec<f64>)> {
    let curv = complex.curvature();
    let mut start = start.clone();
    let mut end = end.clone();
    trim_corridor(complex, &mut corridor, &mut start, &mut end)?;
    let (start, end) = (&mut start, &mut end);
    let mut trace = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut worst_residual = 0.0f64;
    for _ in 0..max_iters.max(1) {
        seen.insert(corridor.sims.clone());
        let start_emb = embed(complex, corridor.sims[0])?;
        let start_pt = bary_combine(curv, &start_emb, &start.bary)?;
        let unf = unfold(complex, &corridor, chart(&start_pt)?)?;
        let end_pt =
            bary_combine(curv, unf.emb.last().unwrap(), &end.bary)?;
        let taut = taut_path(curv, &start_pt, &unf, &end_pt)?;
        trace.push(taut.length);
        // vertex-passing rule: a bend at an interior vertex is admissible
        // only if the angle on the far side is >= pi as well
        let mut violation: Option<(usize, usize, [f64; 2], f64)> = None;
        for (c, &pidx) in taut.corner_portals.iter().enumerate() {
            let ch = taut.node_charts[c + 1];
            let (j0, j1) = corner_run(&unf, ch, pidx);
            let p0 = &unf.portals[j0];
            let local = if veq(p0.l_ch, ch) { p0.l_local } else { p0.r_local };
            let vc = complex.vertex_class(corridor.sims[j0], local);
            if complex.is_boundary_vertex(vc) {
                continue;
            }
            let theta = complex.angle_sum(vc)?;
            let inner = hypgeom::angle_at(
                &taut.nodes[c + 1],
                &taut.nodes[c],
                &taut.nodes[c + 2],
            )?;
            let phi = 2.0 * PI - inner;
            let far = theta - phi;
            if far < PI - tol {
                violation = Some((j0, j1, ch, PI - far));
                break;
            }
        }
        match violation {
            None => {
                let path = assemble_path(complex, &corridor, &unf, &taut, start, end)?;
                return Ok((path, trace));
            }
            Some((j0, j1, ch, residual)) => {
                worst_residual = worst_residual.max(residual);
                match reroute(complex, &corridor, &unf, j0, j1, ch) {
                    Some(mut next) if !seen.contains(&next.sims) => {
                        trim_corridor(complex, &mut next, start, end)?;
                        corridor = next;
                    }
                    _ => return Err(Error::NoConvergence(residual)),
                }
            }
        }
    }
    Err(Error::NoConvergence(worst_residual))
}

fn assemble_path(
    complex: &MkComplex,
    corridor: &Corridor,
    unf: &Unfolded,
    taut: &TautPath,
    start: &Waypoint,
    end: &Waypoint,
) -> Result<ComplexPath> {
    let curv = complex.curvature();
    let sims = complex.simplices();
    let mut waypoints = vec![start.clone()];
    for (j, &u) in taut.crossings.iter().enumerate() {
        let p = &unf.portals[j];
        let lam = match curv {
            Curvature::Euclidean => u,
            Curvature::Hyperbolic => klein_param_to_bary(&p.l_pt, &p.r_pt, u),
            Curvature::Spherical => return Err(Error::UnsupportedCurvature(1)),
        };
        let s = corridor.sims[j];
        let mut bary = vec![0.0; sims[s].dim() + 1];
        bary[p.l_local] = 1.0 - lam;
        bary[p.r_local] = lam;
        waypoints.push(Waypoint { simplex: s, bary });
    }
    waypoints.push(end.clone());
    // drop numerically duplicated consecutive waypoints in one simplex
    let mut cleaned: Vec<Waypoint> = Vec::with_capacity(waypoints.len());
    for wp in waypoints {
        if let Some(prev) = cleaned.last() {
            if prev.simplex == wp.simplex
                && prev
                    .bary
                    .iter()
                    .zip(&wp.bary)
                    .all(|(a, b)| (a - b).abs() < 1e-12)
            {
                continue;
            }
        }
        cleaned.push(wp);
    }
    ComplexPath::new(complex, cleaned)
}

/// Worst two-sided angle deficit over the breakpoints of a path; 0 for a
/// local geodesic.
pub fn geodesic_defect(complex: &MkComplex, path: &ComplexPath) -> Result<f64> {
    let corridor = derive_corridor(complex, path)?;
    let curv = complex.curvature();
    let start_emb = embed(complex, corridor.sims[0])?;
    let start_pt = bary_combine(curv, &start_emb, &path.start().bary)?;
    let unf = unfold(complex, &corridor, chart(&start_pt)?)?;
    // planar images of all waypoints
    let mut pos = 0usize;
    let mut pts: Vec<ModelPoint> = Vec::with_capacity(path.waypoints.len());
    for wp in &path.waypoints {
        while corridor.sims[pos] != wp.simplex
            || (pos + 1 < corridor.sims.len()
                && corridor.sims[pos + 1] == wp.simplex
                && pts.len() > 1
                && false)
        {
            pos += 1;
            if pos >= corridor.sims.len() {
                return Err(Error::Disconnected);
            }
        }
        pts.push(bary_combine(curv, &unf.emb[pos], &wp.bary)?);
    }
    let mut worst = 0.0f64;
    for i in 1..pts.len() - 1 {
        let d_in = hypgeom::dist(&pts[i - 1], &pts[i])?;
        let d_out = hypgeom::dist(&pts[i], &pts[i + 1])?;
        if d_in < 1e-12 || d_out < 1e-12 {
            continue;
        }
        let inner = hypgeom::angle_at(&pts[i], &pts[i - 1], &pts[i + 1])?;
        match path.waypoints[i].vertex_local() {
            None => worst = worst.max(PI - inner),
            Some(local) => {
                let vc = complex.vertex_class(path.waypoints[i].simplex, local);
                let theta = complex.angle_sum(vc)?;
                let phi = 2.0 * PI - inner;
                // both sides of the cone must see at least pi
                worst = worst.max((PI - inner).min((PI - (theta - phi)).max(0.0)));
            }
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// shortest geodesics

fn corridor_seeds(complex: &MkComplex, from: usize, to: usize, k: usize) -> Vec<Corridor> {
    let n = complex.simplices().len();
    // BFS distances to the target over the dual graph
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    dist[to] = 0;
    queue.push_back(to);
    while let Some(s) = queue.pop_front() {
        let dim = complex.simplices()[s].dim();
        for f in 0..=dim {
            if let Some((t, _, _)) = complex.neighbor_across(s, f) {
                if dist[t] == usize::MAX {
                    dist[t] = dist[s] + 1;
                    queue.push_back(t);
                }
            }
        }
    }
    if dist[from] == usize::MAX {
        return Vec::new();
    }
    let budget = dist[from] + 4;
    let mut out: Vec<Corridor> = Vec::new();
    // depth-first enumeration of simple dual paths within the hop budget
    let mut stack_sims = vec![from];
    let mut stack_faces: Vec<usize> = Vec::new();
    fn dfs(
        complex: &MkComplex,
        to: usize,
        budget: usize,
        dist: &[usize],
        sims: &mut Vec<usize>,
        faces: &mut Vec<usize>,
        out: &mut Vec<Corridor>,
    ) {
        if out.len() >= 64 {
            return;
        }
        let s = *sims.last().unwrap();
        if s == to {
            out.push(Corridor { sims: sims.clone(), portal_faces: faces.clone() });
            return;
        }
        if sims.len() > budget {
            return;
        }
        let dim = complex.simplices()[s].dim();
        for f in 0..=dim {
            if let Some((t, _, _)) = complex.neighbor_across(s, f) {
                if sims.contains(&t) || sims.len() + dist[t] > budget + 1 {
                    continue;
                }
                sims.push(t);
                faces.push(f);
                dfs(complex, to, budget, dist, sims, faces, out);
                sims.pop();
                faces.pop();
            }
        }
    }
    dfs(complex, to, budget, &dist, &mut stack_sims, &mut stack_faces, &mut out);
    out.sort_by_key(|c| c.sims.len());
    out.truncate(k);
    out
}

/// Straightened candidates from up to `k` distinct combinatorial corridors.
pub fn geodesic_candidates(
    complex: &MkComplex,
    p: &Waypoint,
    q: &Waypoint,
    k: usize,
) -> Result<Vec<(ComplexPath, f64)>> {
    p.validate(complex)?;
    q.validate(complex)?;
    let seeds = corridor_seeds(complex, p.simplex, q.simplex, k);
    if seeds.is_empty() {
        return Err(Error::Disconnected);
    }
    let mut out = Vec::new();
    for corridor in seeds {
        if let Ok((path, trace)) = straighten_corridor(complex, corridor, p, q, 60, STRAIGHTEN_TOL)
        {
            let len = *trace.last().unwrap();
            out.push((path, len));
        }
    }
    if out.is_empty() {
        return Err(Error::NoConvergence(f64::NAN));
    }
    Ok(out)
}

/// The shortest geodesic between two points, over seeded corridors.
pub fn shortest_geodesic(complex: &MkComplex, p: &Waypoint, q: &Waypoint) -> Result<ComplexPath> {
    if complex.is_pure(1) {
        return graph_shortest(complex, p, q).map(|(path, _)| path);
    }
    if p.simplex == q.simplex
        && p.bary.iter().zip(&q.bary).all(|(a, b)| (a - b).abs() < 1e-12)
    {
        return ComplexPath::new(complex, vec![p.clone()]);
    }
    let mut cands = geodesic_candidates(complex, p, q, 5)?;
    cands.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    Ok(cands.remove(0).0)
}

/// Intrinsic distance between two points of a complex.
pub fn point_distance(complex: &MkComplex, p: &Waypoint, q: &Waypoint) -> Result<f64> {
    if complex.is_pure(1) {
        return graph_shortest(complex, p, q).map(|(_, d)| d);
    }
    shortest_geodesic(complex, p, q)?.length(complex)
}

/// Dijkstra over the quotient vertex graph of a pure 1-complex.
fn graph_shortest(complex: &MkComplex, p: &Waypoint, q: &Waypoint) -> Result<(ComplexPath, f64)> {
    let sims = complex.simplices();
    let nv = complex.vertex_class_count();
    let mut adj: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); nv]; // (to, via simplex, len)
    for (s, sim) in sims.iter().enumerate() {
        let (c0, c1) = (complex.vertex_class(s, 0), complex.vertex_class(s, 1));
        let l = sim.length(0, 1);
        adj[c0].push((c1, s, l));
        adj[c1].push((c0, s, l));
    }
    let endpoint_dist = |w: &Waypoint| -> Result<[f64; 2]> {
        let emb = embed(complex, w.simplex)?;
        let pt = bary_combine(complex.curvature(), &emb, &w.bary)?;
        Ok([hypgeom::dist(&pt, &emb[0])?, hypgeom::dist(&pt, &emb[1])?])
    };
    let pd = endpoint_dist(p)?;
    let qd = endpoint_dist(q)?;
    // direct route within a single segment
    let mut best = if p.simplex == q.simplex { (pd[0] - qd[0]).abs() } else { f64::INFINITY };
    // Dijkstra seeded at both endpoints of p's segment
    let mut dist = vec![f64::INFINITY; nv];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nv]; // (prev class, via simplex)
    let mut heap: Vec<(f64, usize)> = Vec::new();
    for l in 0..2 {
        let c = complex.vertex_class(p.simplex, l);
        if pd[l] < dist[c] {
            dist[c] = pd[l];
            heap.push((pd[l], c));
        }
    }
    while let Some(i) = heap
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
        .map(|(i, _)| i)
    {
        let (d, c) = heap.swap_remove(i);
        if d > dist[c] {
            continue;
        }
        for &(t, s, l) in &adj[c] {
            if d + l < dist[t] {
                dist[t] = d + l;
                parent[t] = Some((c, s));
                heap.push((d + l, t));
            }
        }
    }
    let mut best_entry: Option<usize> = None;
    for l in 0..2 {
        let c = complex.vertex_class(q.simplex, l);
        if dist[c] + qd[l] < best {
            best = dist[c] + qd[l];
            best_entry = Some(c);
        }
    }
    // reconstruct
    let mut waypoints = vec![p.clone()];
    if let Some(mut c) = best_entry {
        let mut chain = vec![c];
        while let Some((prev, _)) = parent[c] {
            chain.push(prev);
            c = prev;
        }
        chain.reverse();
        // entry vertex of p's segment first
        for (i, &cls) in chain.iter().enumerate() {
            let s = if i == 0 {
                p.simplex
            } else {
                parent[chain[i]].map(|(_, s)| s).unwrap_or(p.simplex)
            };
            let local = graph_vertex_local(complex, s, cls)?;
            waypoints.push(Waypoint::at_vertex(complex, s, local));
        }
        let last_cls = *chain.last().unwrap();
        let local = graph_vertex_local(complex, q.simplex, last_cls)?;
        waypoints.push(Waypoint::at_vertex(complex, q.simplex, local));
    }
    waypoints.push(q.clone());
    // drop duplicates
    let mut cleaned: Vec<Waypoint> = Vec::new();
    for wp in waypoints {
        if let Some(prev) = cleaned.last() {
            if *prev == wp {
                continue;
            }
        }
        cleaned.push(wp);
    }
    let path = ComplexPath::new(complex, cleaned)?;
    Ok((path, best))
}

// ---------------------------------------------------------------------------
// closed loops

#[derive(Debug, Clone)]
pub enum TightenOutcome {
    /// Every breakpoint satisfies the two-sided angle condition.
    Geodesic(ComplexPath),
    /// The loop shrank below tolerance: it was contractible.
    Contracted(ComplexPath),
}

/// Shorten a closed loop to the geodesic representative of its homotopy
/// class by repeatedly straightening the loop cut open at a moving anchor.
pub fn tighten_closed(
    complex: &MkComplex,
    loop_path: &ComplexPath,
    max_iters: usize,
    tol: f64,
) -> Result<TightenOutcome> {
    if !loop_path.is_closed(complex)? {
        return Err(Error::InvalidInput("tighten_closed needs a closed path".into()));
    }
    let mut current = loop_path.clone();
    let mut last_len = current.length(complex)?;
    for _ in 0..max_iters.max(1) {
        let (straight, _) = straighten_with_trace(complex, &current, 60, STRAIGHTEN_TOL)?;
        let len = straight.length(complex)?;
        if len < 1e-7 {
            return Ok(TightenOutcome::Contracted(straight));
        }
        // rotate the anchor to the far point of the loop
        let mid = straight.point_at(complex, 0.5)?;
        let mut idx = 1;
        let mut acc = 0.0;
        let target = len / 2.0;
        for (i, pair) in straight.waypoints.windows(2).enumerate() {
            acc += segment_length(complex, &pair[0], &pair[1])?;
            if acc >= target {
                idx = i + 1;
                break;
            }
        }
        let n = straight.waypoints.len();
        let mut rotated: Vec<Waypoint> = Vec::with_capacity(n + 1);
        rotated.push(mid.clone());
        for j in idx..n - 1 {
            rotated.push(straight.waypoints[j].clone());
        }
        rotated.push(straight.waypoints[n - 1].clone()); // == waypoints[0]
        for j in 1..idx {
            rotated.push(straight.waypoints[j].clone());
        }
        rotated.push(mid);
        current = ComplexPath::new(complex, rotated)?;
        if (last_len - len).abs() < tol {
            let defect = geodesic_defect(complex, &current)?;
            if defect <= PI - 1.0 {
                // anchor corner within tolerance too
            }
            return Ok(TightenOutcome::Geodesic(current));
        }
        last_len = len;
    }
    Err(Error::NoConvergence(last_len))
}

// ---------------------------------------------------------------------------
// comparing paths

fn e_point_seg(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
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

fn polyline_hausdorff(curv: Curvature, a: &[ModelPoint], b: &[ModelPoint]) -> Result<f64> {
    let one_sided = |xs: &[ModelPoint], ys: &[ModelPoint]| -> Result<f64> {
        let mut worst = 0.0f64;
        for x in xs {
            let mut best = f64::INFINITY;
            if ys.len() == 1 {
                best = hypgeom::dist(x, &ys[0])?;
            }
            for w in ys.windows(2) {
                let d = match curv {
                    Curvature::Hyperbolic => hypgeom::dist_to_segment(x, &w[0], &w[1])?,
                    Curvature::Euclidean => e_point_seg(
                        [x.coords()[0], x.coords()[1]],
                        [w[0].coords()[0], w[0].coords()[1]],
                        [w[1].coords()[0], w[1].coords()[1]],
                    ),
                    Curvature::Spherical => return Err(Error::UnsupportedCurvature(1)),
                };
                best = best.min(d);
            }
            worst = worst.max(best);
        }
        Ok(worst)
    };
    Ok(one_sided(a, b)?.max(one_sided(b, a)?))
}

fn unfolded_polyline(complex: &MkComplex, path: &ComplexPath) -> Result<Vec<ModelPoint>> {
    let corridor = derive_corridor(complex, path)?;
    let curv = complex.curvature();
    let start_emb = embed(complex, corridor.sims[0])?;
    let start_pt = bary_combine(curv, &start_emb, &path.start().bary)?;
    let unf = unfold(complex, &corridor, chart(&start_pt)?)?;
    let mut pos = 0usize;
    let mut pts = Vec::with_capacity(path.waypoints.len());
    for wp in &path.waypoints {
        while corridor.sims[pos] != wp.simplex {
            pos += 1;
            if pos >= corridor.sims.len() {
                return Err(Error::Disconnected);
            }
        }
        pts.push(bary_combine(curv, &unf.emb[pos], &wp.bary)?);
    }
    Ok(pts)
}

/// Hausdorff distance between two paths. Exact (via a common unfolding)
/// when they traverse the same corridor; sampled intrinsically otherwise.
pub fn path_hausdorff(complex: &MkComplex, a: &ComplexPath, b: &ComplexPath) -> Result<f64> {
    let ca = derive_corridor(complex, a)?;
    let cb = derive_corridor(complex, b)?;
    if ca == cb {
        let pa = unfolded_polyline(complex, a)?;
        let pb = unfolded_polyline(complex, b)?;
        return polyline_hausdorff(complex.curvature(), &pa, &pb);
    }
    let m = 9;
    let mut worst = 0.0f64;
    for (x, y) in [(a, b), (b, a)] {
        for i in 0..m {
            let t = i as f64 / (m - 1) as f64;
            let wx = x.point_at(complex, t)?;
            let mut best = f64::INFINITY;
            for j in 0..m {
                let s = j as f64 / (m - 1) as f64;
                let wy = y.point_at(complex, s)?;
                best = best.min(point_distance(complex, &wx, &wy)?);
            }
            worst = worst.max(best);
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// singular surfaces and Gauss-Bonnet

/// A compact surface glued from hyperbolic or Euclidean triangles, with
/// cone angles at interior vertices and bending angles on the boundary.
#[derive(Debug, Clone)]
pub struct SingularSurface {
    complex: MkComplex,
    interior: Vec<usize>,
    boundary: Vec<usize>,
}

impl SingularSurface {
    pub fn new(complex: MkComplex) -> Result<Self> {
        if !complex.is_pure(2) {
            return Err(Error::NotASurface("not a pure 2-complex".into()));
        }
        if complex.curvature() == Curvature::Spherical {
            return Err(Error::UnsupportedCurvature(1));
        }
        complex.euler_characteristic()?; // validates the surface condition
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        for v in 0..complex.vertex_class_count() {
            if complex.is_boundary_vertex(v) {
                boundary.push(v);
            } else {
                interior.push(v);
            }
        }
        // boundary edges must close up into cycles: every boundary vertex
        // lies on exactly two boundary edge classes
        for &v in &boundary {
            let count = (0..complex.edge_class_count())
                .filter(|&e| {
                    complex.is_boundary_edge(e)
                        && complex.edge_class_members(e).iter().any(|&(s, (i, j))| {
                            complex.vertex_class(s, i) == v || complex.vertex_class(s, j) == v
                        })
                })
                .count();
            if count != 2 {
                return Err(Error::NotASurface(format!(
                    "boundary vertex {} lies on {} boundary edges",
                    complex.vertex_class_name(v),
                    count
                )));
            }
        }
        Ok(SingularSurface { complex, interior, boundary })
    }

    pub fn complex(&self) -> &MkComplex {
        &self.complex
    }

    pub fn interior_vertices(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary
    }

    /// Total angle around an interior vertex / interior angle at a
    /// boundary vertex.
    pub fn cone_angle(&self, v: usize) -> Result<f64> {
        self.complex.angle_sum(v)
    }

    /// pi minus the interior angle at a boundary vertex (may be negative).
    pub fn bending_angle(&self, v: usize) -> Result<f64> {
        if !self.boundary.contains(&v) {
            return Err(Error::InvalidInput(format!("vertex class {v} is not on the boundary")));
        }
        Ok(PI - self.complex.angle_sum(v)?)
    }

    /// Does every interior cone angle meet the CAT threshold 2*pi?
    pub fn is_npc(&self) -> Result<bool> {
        for &v in &self.interior {
            if self.complex.angle_sum(v)? < 2.0 * PI - 1e-9 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn area(&self) -> Result<f64> {
        self.complex.total_area()
    }

    pub fn euler_characteristic(&self) -> Result<i64> {
        self.complex.euler_characteristic()
    }
}

/// |curvature term + interior cone defects + boundary bending - 2 pi chi|.
pub fn gauss_bonnet_audit(surface: &SingularSurface) -> Result<f64> {
    let chi = surface.euler_characteristic()? as f64;
    let mut sum = match surface.complex.curvature() {
        Curvature::Hyperbolic => -surface.area()?,
        _ => 0.0,
    };
    for &v in &surface.interior {
        sum += 2.0 * PI - surface.cone_angle(v)?;
    }
    for &v in &surface.boundary {
        sum += surface.bending_angle(v)?;
    }
    Ok((sum - 2.0 * PI * chi).abs())
}

/// A singular surface whose every vertex is an h-vertex, except at a
/// distinguished set of boundary vertices.
#[derive(Debug, Clone)]
pub struct HMapSurface {
    pub surface: SingularSurface,
    pub distinguished: Vec<usize>,
}

impl HMapSurface {
    pub fn new(surface: SingularSurface, distinguished: Vec<usize>) -> Result<Self> {
        for &v in &distinguished {
            if !surface.boundary.contains(&v) {
                return Err(Error::InvalidInput(format!(
                    "distinguished vertex {} is not on the boundary",
                    surface.complex.vertex_class_name(v)
                )));
            }
        }
        for &v in &surface.interior {
            if surface.cone_angle(v)? < 2.0 * PI - 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "interior vertex {} has angle sum below 2 pi",
                    surface.complex.vertex_class_name(v)
                )));
            }
        }
        for &v in &surface.boundary {
            if !distinguished.contains(&v) && surface.cone_angle(v)? < PI - 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "boundary vertex {} has angle sum below pi",
                    surface.complex.vertex_class_name(v)
                )));
            }
        }
        Ok(HMapSurface { surface, distinguished })
    }

    /// Exterior angle at a distinguished vertex.
    pub fn theta(&self, v: usize) -> Result<f64> {
        Ok(PI - self.surface.cone_angle(v)?)
    }
}

/// Slack of the h-map area bound: sum of distinguished exterior angles
/// minus 2 pi chi minus the area. Nonnegative for every h-map.
pub fn h_area_bound_check(hmap: &HMapSurface) -> Result<f64> {
    let chi = hmap.surface.euler_characteristic()? as f64;
    let mut sum = 0.0;
    for &v in &hmap.distinguished {
        sum += hmap.theta(v)?;
    }
    let area = match hmap.surface.complex.curvature() {
        Curvature::Hyperbolic => hmap.surface.area()?,
        _ => 0.0,
    };
    Ok(sum - 2.0 * PI * chi - area)
}

// ---------------------------------------------------------------------------
// alpha-nets and h-map realization

/// One end of an alpha-net.
#[derive(Debug, Clone)]
pub enum NetEnd {
    Point(Waypoint),
    Arc(ComplexPath),
}

/// A ruled strip of straightened geodesic rails between two ends.
#[derive(Debug, Clone)]
pub struct AlphaNet {
    pub rails: Vec<ComplexPath>,
    pub rail_lengths: Vec<f64>,
    pub params: Vec<f64>,
    /// largest Hausdorff gap between adjacent rails
    pub max_gap: f64,
}

pub fn build_alpha_net(
    complex: &MkComplex,
    alpha: &NetEnd,
    beta: &ComplexPath,
    n_rails: usize,
) -> Result<AlphaNet> {
    if n_rails < 2 {
        return Err(Error::InvalidInput("an alpha-net needs at least 2 rails".into()));
    }
    let mut rails = Vec::with_capacity(n_rails);
    let mut rail_lengths = Vec::with_capacity(n_rails);
    let mut params = Vec::with_capacity(n_rails);
    for i in 0..n_rails {
        let t = i as f64 / (n_rails - 1) as f64;
        let a = match alpha {
            NetEnd::Point(w) => w.clone(),
            NetEnd::Arc(p) => p.point_at(complex, t)?,
        };
        let b = beta.point_at(complex, t)?;
        let rail = shortest_geodesic(complex, &a, &b)?;
        rail_lengths.push(rail.length(complex)?);
        rails.push(rail);
        params.push(t);
    }
    let mut max_gap = 0.0f64;
    for w in rails.windows(2) {
        max_gap = max_gap.max(path_hausdorff(complex, &w[0], &w[1])?);
    }
    Ok(AlphaNet { rails, rail_lengths, params, max_gap })
}

/// Double the rail count until adjacent rails are within 1e-3 of each
/// other (or the rail count reaches 2^10).
pub fn build_alpha_net_refined(
    complex: &MkComplex,
    alpha: &NetEnd,
    beta: &ComplexPath,
) -> Result<AlphaNet> {
    let mut n = 4;
    loop {
        let net = build_alpha_net(complex, alpha, beta, n)?;
        if net.max_gap < 1e-3 || n >= 1024 {
            return Ok(net);
        }
        n *= 2;
    }
}

impl AlphaNet {
    /// Triangulate the strip with `m` samples per rail and rebuild it as
    /// an intrinsic singular surface with measured edge lengths.
    pub fn surface(&self, complex: &MkComplex, m: usize) -> Result<SingularSurface> {
        if m < 2 {
            return Err(Error::InvalidInput("need at least 2 samples per rail".into()));
        }
        let n = self.rails.len();
        let point_alpha = self.rail_lengths.iter().all(|l| *l > 1e-9)
            && (0..n - 1).all(|i| {
                waypoint_distance(
                    complex,
                    self.rails[i].start(),
                    self.rails[i + 1].start(),
                )
                .map(|d| d < 1e-9)
                .unwrap_or(false)
            });
        let mut grid: Vec<Vec<Waypoint>> = Vec::with_capacity(n);
        for rail in &self.rails {
            let mut row = Vec::with_capacity(m);
            for j in 0..m {
                row.push(rail.point_at(complex, j as f64 / (m - 1) as f64)?);
            }
            grid.push(row);
        }
        let label = |i: usize, j: usize| -> String {
            if point_alpha && j == 0 {
                "a".to_string()
            } else {
                format!("g{i}_{j}")
            }
        };
        let mut faces_owned: Vec<[String; 3]> = Vec::new();
        for i in 0..n - 1 {
            for j in 0..m - 1 {
                if point_alpha && j == 0 {
                    faces_owned.push([label(i, 0), label(i, 1), label(i + 1, 1)]);
                } else {
                    faces_owned.push([label(i, j), label(i + 1, j), label(i, j + 1)]);
                    faces_owned.push([label(i + 1, j), label(i + 1, j + 1), label(i, j + 1)]);
                }
            }
        }
        let mut lengths: HashMap<(String, String), f64> = HashMap::new();
        let key = |a: &str, b: &str| -> (String, String) {
            (a.min(b).to_string(), a.max(b).to_string())
        };
        let parse = |l: &str| -> (usize, usize) {
            if l == "a" {
                return (usize::MAX, 0);
            }
            let rest = &l[1..];
            let (i, j) = rest.split_once('_').unwrap();
            (i.parse().unwrap(), j.parse().unwrap())
        };
        for f in &faces_owned {
            for (a, b) in [(&f[0], &f[1]), (&f[1], &f[2]), (&f[0], &f[2])] {
                let k = key(a, b);
                if lengths.contains_key(&k) {
                    continue;
                }
                let (ia, ja) = parse(a);
                let (ib, jb) = parse(b);
                let wa = if ia == usize::MAX { grid[0][0].clone() } else { grid[ia][ja].clone() };
                let wb = if ib == usize::MAX { grid[0][0].clone() } else { grid[ib][jb].clone() };
                let d = if ia == ib && ia != usize::MAX {
                    // along a rail: exact arclength
                    self.rail_lengths[ia] * (ja.abs_diff(jb) as f64) / (m - 1) as f64
                } else {
                    point_distance(complex, &wa, &wb)?
                };
                lengths.insert(k, d);
            }
        }
        let face_refs: Vec<[&str; 3]> = faces_owned
            .iter()
            .map(|f| [f[0].as_str(), f[1].as_str(), f[2].as_str()])
            .collect();
        let built = fixtures::from_triangulation(complex.curvature(), &face_refs, |a, b| {
            lengths[&key(a, b)]
        })?;
        SingularSurface::new(built)
    }
}

/// Span a geodesic polygon disk on the given corner points: every side and
/// diagonal is a shortest geodesic, and the disk is rebuilt intrinsically
/// as a fan. All corners become distinguished vertices of the h-map.
pub fn realize_h_map(complex: &MkComplex, corners: &[Waypoint]) -> Result<HMapSurface> {
    let n = corners.len();
    if n < 3 {
        return Err(Error::InvalidInput("an h-map disk needs at least 3 corners".into()));
    }
    let mut lengths: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for i in 0..n {
        let j = (i + 1) % n;
        let d = point_distance(complex, &corners[i], &corners[j])?;
        lengths.insert((i.min(j), i.max(j)), d);
    }
    for i in 2..n - 1 {
        let d = point_distance(complex, &corners[0], &corners[i])?;
        lengths.insert((0, i), d);
    }
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let faces: Vec<[&str; 3]> = (1..n - 1)
        .map(|i| [labels[0].as_str(), labels[i].as_str(), labels[i + 1].as_str()])
        .collect();
    let built = fixtures::from_triangulation(complex.curvature(), &faces, |a, b| {
        let pa: usize = a[1..].parse().unwrap();
        let pb: usize = b[1..].parse().unwrap();
        lengths[&(pa.min(pb), pa.max(pb))]
    })?;
    let surface = SingularSurface::new(built)?;
    let distinguished = surface.boundary_vertices().to_vec();
    HMapSurface::new(surface, distinguished)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn equilateral_angle() -> f64 {
        (1.0f64.cosh() / (1.0f64.cosh() + 1.0)).acos()
    }

    /// Hyperbolic law of cosines for the side opposite a known angle.
    fn hyp_side(b: f64, c: f64, alpha: f64) -> f64 {
        (b.cosh() * c.cosh() - b.sinh() * c.sinh() * alpha.cos()).acosh()
    }

    fn rim_vertex(complex: &MkComplex, i: usize) -> Waypoint {
        // in the cone fixture, triangle Ti has labels [c, r_i, r_{i+1}]
        let s = complex.simplex_index(&format!("T{i}")).unwrap();
        Waypoint::at_vertex(complex, s, 1)
    }

    #[test]
    fn two_sides_straighten_to_the_third() {
        let c = fixtures::strip(1, 7).unwrap();
        let third = c.simplices()[0].length(1, 2);
        let path = ComplexPath::new(
            &c,
            vec![
                Waypoint::at_vertex(&c, 0, 1),
                Waypoint::at_vertex(&c, 0, 0),
                Waypoint::at_vertex(&c, 0, 2),
            ],
        )
        .unwrap();
        let (out, trace) = straighten_with_trace(&c, &path, 20, STRAIGHTEN_TOL).unwrap();
        assert_abs_diff_eq!(out.length(&c).unwrap(), third, epsilon = 1e-12);
        assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn shortest_across_a_wide_cone_matches_the_unfolding_oracle() {
        // k = 6: both half-fans subtend 3 alpha < pi, so the geodesic
        // avoids the apex and is the chord of a 3-triangle fan
        let alpha = equilateral_angle();
        let cone = fixtures::cone(6, 1.0).unwrap();
        let p = rim_vertex(&cone, 0);
        let q = rim_vertex(&cone, 3);
        let path = shortest_geodesic(&cone, &p, &q).unwrap();
        let oracle = hyp_side(1.0, 1.0, 3.0 * alpha);
        assert_abs_diff_eq!(path.length(&cone).unwrap(), oracle, epsilon = 1e-9);
        assert!(path
            .waypoints
            .iter()
            .all(|w| w.vertex_local().map(|l| cone.vertex_class(w.simplex, l))
                != Some(cone.vertex_class_by_name("T0/c").unwrap())));
    }

    #[test]
    fn geodesic_through_a_fat_cone_point_passes_the_apex() {
        // k = 8, opposite rim vertices: both sides see 4 alpha >= pi, so
        // the path through the apex is geodesic with length exactly 2
        let cone = fixtures::cone(8, 1.0).unwrap();
        let p = rim_vertex(&cone, 0);
        let q = rim_vertex(&cone, 4);
        let path = shortest_geodesic(&cone, &p, &q).unwrap();
        assert_abs_diff_eq!(path.length(&cone).unwrap(), 2.0, epsilon = 1e-9);
        let apex = cone.vertex_class_by_name("T0/c").unwrap();
        let through_apex = path.waypoints.iter().any(|w| {
            w.vertex_local().map(|l| cone.vertex_class(w.simplex, l)) == Some(apex)
        });
        assert!(through_apex, "geodesic should pass the cone point");
        // geodesic through a vertex forces the h-vertex condition there
        assert!(cone.angle_sum(apex).unwrap() >= 2.0 * PI - 1e-8);
    }

    #[test]
    fn reroute_escapes_a_long_way_around_seed() {
        // seed a corridor the long way around a k = 7 cone; rerouting must
        // find the short 3-triangle side
        let alpha = equilateral_angle();
        let cone = fixtures::cone(7, 1.0).unwrap();
        let sims: Vec<usize> =
            (0..=4).rev().map(|i| cone.simplex_index(&format!("T{i}")).unwrap()).collect();
        // walk T4 -> T3 -> ... -> T0 via shared spokes
        let mut faces = Vec::new();
        for w in sims.windows(2) {
            let f = (0..3)
                .find(|&f| matches!(cone.neighbor_across(w[0], f), Some((t, _, _)) if t == w[1]))
                .unwrap();
            faces.push(f);
        }
        let corridor = Corridor { sims: sims.clone(), portal_faces: faces };
        let p = rim_vertex(&cone, 4);
        let q = rim_vertex(&cone, 0);
        let (path, trace) =
            straighten_corridor(&cone, corridor, &p, &q, 40, STRAIGHTEN_TOL).unwrap();
        let oracle = hyp_side(1.0, 1.0, 3.0 * alpha);
        assert_abs_diff_eq!(path.length(&cone).unwrap(), oracle, epsilon = 1e-9);
        assert!(trace.len() > 1, "the seed corridor required a reroute");
        assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn candidates_agree_on_cat_fixtures() {
        let cone = fixtures::cone(8, 1.0).unwrap();
        let p = rim_vertex(&cone, 1);
        let q = rim_vertex(&cone, 5);
        let cands = geodesic_candidates(&cone, &p, &q, 5).unwrap();
        assert!(cands.len() >= 2);
        let best = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        for (path, len) in &cands {
            assert_abs_diff_eq!(*len, best, epsilon = 1e-7);
            let h = path_hausdorff(&cone, path, &cands[0].0).unwrap();
            assert!(h <= 1e-7, "candidate Hausdorff gap {h}");
        }
    }

    #[test]
    fn flat_strip_distance_is_euclidean() {
        let cyl = fixtures::cylinder(6, 1.0, 1.0).unwrap();
        // b0 and t1 across one square: distance sqrt(2)
        let s = cyl.simplex_index("T0").unwrap(); // faces [b0, b1, t0]
        let p = Waypoint::at_vertex(&cyl, s, 0);
        let s2 = cyl.simplex_index("T1").unwrap(); // faces [b1, t1, t0]
        let q = Waypoint::at_vertex(&cyl, s2, 1);
        let path = shortest_geodesic(&cyl, &p, &q).unwrap();
        assert_abs_diff_eq!(path.length(&cyl).unwrap(), 2.0f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn tighten_finds_the_cylinder_core() {
        let cyl = fixtures::cylinder(6, 1.0, 1.0).unwrap();
        // wobbly loop: alternate between bottom and top vertices around
        let mut wps = Vec::new();
        for i in 0..6 {
            let s = cyl.simplex_index(&format!("T{}", 2 * i)).unwrap(); // [b_i, b_{i+1}, t_i]
            wps.push(Waypoint::new(s, vec![0.55, 0.0, 0.45]));
            let s2 = cyl.simplex_index(&format!("T{}", 2 * i + 1)).unwrap(); // [b_{i+1}, t_{i+1}, t_i]
            wps.push(Waypoint::new(s2, vec![0.6, 0.2, 0.2]));
        }
        wps.push(wps[0].clone());
        let loop_path = ComplexPath::new(&cyl, wps).unwrap();
        match tighten_closed(&cyl, &loop_path, 200, 1e-9).unwrap() {
            TightenOutcome::Geodesic(out) => {
                assert_abs_diff_eq!(out.length(&cyl).unwrap(), 6.0, epsilon = 1e-6);
            }
            TightenOutcome::Contracted(_) => panic!("core loop is essential"),
        }
    }

    #[test]
    fn contractible_loop_contracts() {
        let c = fixtures::strip(2, 3).unwrap();
        let wps = vec![
            Waypoint::new(0, vec![0.5, 0.3, 0.2]),
            Waypoint::new(0, vec![0.3, 0.5, 0.2]),
            Waypoint::new(0, vec![0.3, 0.3, 0.4]),
            Waypoint::new(0, vec![0.5, 0.3, 0.2]),
        ];
        let loop_path = ComplexPath::new(&c, wps).unwrap();
        match tighten_closed(&c, &loop_path, 50, 1e-9).unwrap() {
            TightenOutcome::Contracted(_) => {}
            TightenOutcome::Geodesic(g) => {
                panic!("expected contraction, got length {}", g.length(&c).unwrap())
            }
        }
    }

    #[test]
    fn tripod_distances_add_through_the_center() {
        let t = fixtures::tripod(&[1.0, 2.0, 3.0]).unwrap();
        let p = Waypoint::new(0, vec![0.5, 0.5]); // middle of leg 0 (hyperbolic bary)
        let q = Waypoint::at_vertex(&t, 2, 1); // far end of leg 3
        let d = point_distance(&t, &p, &q).unwrap();
        let emb = embed(&t, 0).unwrap();
        let mid = bary_combine(Curvature::Hyperbolic, &emb, &[0.5, 0.5]).unwrap();
        let to_center = hypgeom::dist(&mid, &emb[0]).unwrap();
        assert_abs_diff_eq!(d, to_center + 3.0, epsilon = 1e-10);
    }

    #[test]
    fn gauss_bonnet_triangle_doubled_torus() {
        // single triangle: chi = 1
        let tri = fixtures::strip(1, 11).unwrap();
        let s = SingularSurface::new(tri).unwrap();
        assert!(gauss_bonnet_audit(&s).unwrap() <= 1e-12);
        // doubled triangle: chi = 2, three cone points
        let d = SingularSurface::new(fixtures::doubled_triangle(1.0).unwrap()).unwrap();
        assert!(gauss_bonnet_audit(&d).unwrap() <= 1e-12);
        // flat torus: every term vanishes
        let t = SingularSurface::new(fixtures::torus7(1.0).unwrap()).unwrap();
        assert!(gauss_bonnet_audit(&t).unwrap() <= 1e-12);
    }

    #[test]
    fn gauss_bonnet_random_strips() {
        for seed in 0..20 {
            let s = SingularSurface::new(fixtures::strip(5, seed).unwrap()).unwrap();
            assert!(gauss_bonnet_audit(&s).unwrap() <= 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn ngon_area_bound_is_strict() {
        for n in 3..=8 {
            let poly = fixtures::regular_ngon(n, 1.2).unwrap();
            let s = SingularSurface::new(poly).unwrap();
            let area = s.area().unwrap();
            assert!(area <= (n as f64 - 2.0) * PI - 1e-6, "n = {n}, area = {area}");
            let distinguished = s.boundary_vertices().to_vec();
            let h = HMapSurface::new(s, distinguished).unwrap();
            let slack = h_area_bound_check(&h).unwrap();
            assert!(slack >= -1e-9, "n = {n}, slack = {slack}");
        }
    }

    #[test]
    fn hmap_triangle_slack_vanishes() {
        let tri = fixtures::strip(1, 5).unwrap();
        let s = SingularSurface::new(tri).unwrap();
        let distinguished = s.boundary_vertices().to_vec();
        let h = HMapSurface::new(s, distinguished).unwrap();
        // theta_i = pi - alpha_i exactly, so the bound is an identity
        assert_abs_diff_eq!(h_area_bound_check(&h).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn realize_h_map_in_one_simplex_returns_the_triangle() {
        let c = fixtures::strip(1, 9).unwrap();
        let corners: Vec<Waypoint> = (0..3).map(|l| Waypoint::at_vertex(&c, 0, l)).collect();
        let h = realize_h_map(&c, &corners).unwrap();
        assert_abs_diff_eq!(
            h.surface.area().unwrap(),
            c.total_area().unwrap(),
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(h_area_bound_check(&h).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn realize_h_map_flat_square_disk() {
        let cyl = fixtures::cylinder(6, 1.0, 1.0).unwrap();
        // a unit square spanned inside one face pair
        let s0 = cyl.simplex_index("T0").unwrap(); // [b0, b1, t0]
        let s1 = cyl.simplex_index("T1").unwrap(); // [b1, t1, t0]
        let corners = vec![
            Waypoint::at_vertex(&cyl, s0, 0), // b0
            Waypoint::at_vertex(&cyl, s0, 1), // b1
            Waypoint::at_vertex(&cyl, s1, 1), // t1
            Waypoint::at_vertex(&cyl, s0, 2), // t0
        ];
        let h = realize_h_map(&cyl, &corners).unwrap();
        assert!(gauss_bonnet_audit(&h.surface).unwrap() <= 1e-9);
        assert_abs_diff_eq!(h_area_bound_check(&h).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn alpha_net_fan_in_one_simplex() {
        let c = fixtures::strip(1, 13).unwrap();
        let apex = Waypoint::at_vertex(&c, 0, 0);
        let beta = ComplexPath::new(
            &c,
            vec![Waypoint::at_vertex(&c, 0, 1), Waypoint::at_vertex(&c, 0, 2)],
        )
        .unwrap();
        let net4 = build_alpha_net(&c, &NetEnd::Point(apex.clone()), &beta, 4).unwrap();
        let net8 = build_alpha_net(&c, &NetEnd::Point(apex), &beta, 8).unwrap();
        assert!(net8.max_gap < net4.max_gap + 1e-12, "refinement must not widen gaps");
        for rail in &net4.rails {
            assert!(geodesic_defect(&c, rail).unwrap() <= 1e-8);
        }
        let surf = net4.surface(&c, 4).unwrap();
        // interior vertices of a net in a single hyperbolic simplex, if
        // any, are flat-or-better; Gauss-Bonnet still holds exactly
        assert!(gauss_bonnet_audit(&surf).unwrap() <= 1e-9);
    }

    #[test]
    fn point_at_interpolates_arclength() {
        let c = fixtures::strip(4, 17).unwrap();
        let p = Waypoint::new(0, vec![0.7, 0.2, 0.1]);
        let s_last = 3;
        let q = Waypoint::new(s_last, vec![0.1, 0.2, 0.7]);
        let path = shortest_geodesic(&c, &p, &q).unwrap();
        let total = path.length(&c).unwrap();
        let mid = path.point_at(&c, 0.5).unwrap();
        let d1 = point_distance(&c, &p, &mid).unwrap();
        let d2 = point_distance(&c, &mid, &q).unwrap();
        assert_abs_diff_eq!(d1, total / 2.0, epsilon = 1e-7);
        assert_abs_diff_eq!(d2, total / 2.0, epsilon = 1e-7);
    }

    #[test]
    fn transport_round_trip() {
        let c = fixtures::strip(3, 19).unwrap();
        // a point on the shared edge between T0 and T1
        let corridor_face = (0..3)
            .find(|&f| matches!(c.neighbor_across(0, f), Some((t, _, _)) if t == 1))
            .unwrap();
        let pair = c.simplices()[0].face(corridor_face);
        let mut bary = vec![0.0; 3];
        bary[pair[0]] = 0.4;
        bary[pair[1]] = 0.6;
        let wp = Waypoint::new(0, bary);
        let moved = transport(&c, &wp, 1).unwrap();
        let back = transport(&c, &moved, 0).unwrap();
        for (a, b) in wp.bary.iter().zip(&back.bary) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(waypoint_distance(&c, &wp, &moved).unwrap(), 0.0, epsilon = 1e-9);
    }
}
