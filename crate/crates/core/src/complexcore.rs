//! M_kappa-simplicial complexes: simplices described intrinsically by edge
//! lengths, face gluings by isometries, quotient vertex/edge classes, and
//! vertex-link extraction.
//!
//! Simplices are never stored with embedded coordinates; a placement in the
//! model space is materialized per simplex on demand.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hypgeom::{self, Curvature, ModelPoint, TriangleSides};

/// Gluings must match edge lengths to within this bound to count as
/// isometries.
pub const GLUE_TOL: f64 = 1e-10;

/// A geodesic simplex of dimension 1..=3 given by its edge lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSimplex {
    pub id: String,
    pub vertices: Vec<String>,
    /// lengths keyed by local vertex index pairs (i < j)
    lengths: BTreeMap<(usize, usize), f64>,
}

impl MetricSimplex {
    pub fn new(
        id: impl Into<String>,
        vertices: Vec<String>,
        edge_lengths: &[(String, String, f64)],
    ) -> Result<Self> {
        let id = id.into();
        let dim = vertices.len().wrapping_sub(1);
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidInput(format!(
                "simplex {id}: dimension must be 1..=3, got {} vertices",
                vertices.len()
            )));
        }
        let set: BTreeSet<&String> = vertices.iter().collect();
        if set.len() != vertices.len() {
            return Err(Error::InvalidInput(format!("simplex {id}: repeated vertex label")));
        }
        let local = |label: &str| vertices.iter().position(|v| v == label);
        let mut lengths = BTreeMap::new();
        for (a, b, len) in edge_lengths {
            let (Some(i), Some(j)) = (local(a), local(b)) else {
                return Err(Error::InvalidInput(format!(
                    "simplex {id}: edge ({a}, {b}) references an unknown vertex"
                )));
            };
            if i == j {
                return Err(Error::InvalidInput(format!("simplex {id}: degenerate edge ({a}, {a})")));
            }
            if !(*len > 0.0 && len.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "simplex {id}: edge ({a}, {b}) has non-positive length {len}"
                )));
            }
            let key = (i.min(j), i.max(j));
            if lengths.insert(key, *len).is_some() {
                return Err(Error::InvalidInput(format!(
                    "simplex {id}: duplicate length for edge ({a}, {b})"
                )));
            }
        }
        let expected = (dim + 1) * dim / 2;
        if lengths.len() != expected {
            return Err(Error::InvalidInput(format!(
                "simplex {id}: expected {expected} edge lengths, got {}",
                lengths.len()
            )));
        }
        Ok(MetricSimplex { id, vertices, lengths })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn length(&self, i: usize, j: usize) -> f64 {
        self.lengths[&(i.min(j), i.max(j))]
    }

    pub fn edge_lengths(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.lengths.iter().map(|(k, v)| (*k, *v))
    }

    /// Local vertex indices of face `f` (the face opposite vertex `f`).
    pub fn face(&self, f: usize) -> Vec<usize> {
        (0..=self.dim()).filter(|&i| i != f).collect()
    }

    /// Interior angle at local vertex `v` of a 2-simplex.
    pub fn corner_angle(&self, v: usize, curvature: Curvature) -> Result<f64> {
        if self.dim() != 2 {
            return Err(Error::Unsupported("corner_angle needs a 2-simplex".into()));
        }
        let others: Vec<usize> = (0..3).filter(|&i| i != v).collect();
        let opposite = self.length(others[0], others[1]);
        let s1 = self.length(v, others[0]);
        let s2 = self.length(v, others[1]);
        let sides = TriangleSides::new(opposite, s1, s2, curvature)?;
        let (alpha, _, _) = hypgeom::triangle_angles_from_sides(&sides)?;
        Ok(alpha)
    }

    /// Canonical placement of a 2-simplex in the 2-dimensional model.
    pub fn embed(&self, curvature: Curvature) -> Result<Vec<ModelPoint>> {
        match self.dim() {
            1 => {
                let d = self.length(0, 1);
                match curvature {
                    Curvature::Euclidean => Ok(vec![
                        ModelPoint::euclidean(&[0.0, 0.0])?,
                        ModelPoint::euclidean(&[d, 0.0])?,
                    ]),
                    Curvature::Hyperbolic => Ok(vec![
                        ModelPoint::hyperboloid(&[1.0, 0.0, 0.0])?,
                        ModelPoint::from_klein(&[d.tanh(), 0.0])?,
                    ]),
                    Curvature::Spherical => Err(Error::Unsupported(
                        "spherical 1-simplex embedding not needed".into(),
                    )),
                }
            }
            2 => {
                let pts = hypgeom::comparison_triangle(
                    self.length(0, 1),
                    self.length(1, 2),
                    self.length(2, 0),
                    curvature,
                )?;
                Ok(pts.to_vec())
            }
            _ => Err(Error::Unsupported("embedding only for dim <= 2".into())),
        }
    }
}

/// One side of a gluing: a simplex and the index of the face opposite that
/// vertex index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceRef {
    pub simplex: String,
    pub face: usize,
}

/// An isometric identification of two faces, by a bijection of their
/// vertex labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Gluing {
    pub side_a: FaceRef,
    pub side_b: FaceRef,
    /// pairs (label in side_a's simplex, label in side_b's simplex)
    pub vertex_map: Vec<(String, String)>,
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
fn sym_eigenvalues(mut m: Vec<Vec<f64>>) -> Vec<f64> {
    let n = m.len();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// Can the edge-length pattern be realized as a nondegenerate geodesic
/// simplex in the model of the given curvature?
fn realizability_violation(s: &MetricSimplex, curvature: Curvature) -> Option<String> {
    let n = s.dim() + 1;
    if curvature == Curvature::Spherical {
        for ((i, j), len) in s.edge_lengths() {
            if len >= PI {
                return Some(format!(
                    "simplex {}: spherical edge ({}, {}) has length {} >= pi",
                    s.id, s.vertices[i], s.vertices[j], len
                ));
            }
        }
    }
    match curvature {
        Curvature::Hyperbolic => {
            // Gram matrix of hyperboloid vectors: signature (1 negative,
            // dim positive) for a nondegenerate simplex
            let mut g = vec![vec![0.0; n]; n];
            for i in 0..n {
                g[i][i] = -1.0;
            }
            for ((i, j), len) in s.edge_lengths() {
                g[i][j] = -len.cosh();
                g[j][i] = -len.cosh();
            }
            let mut eig = sym_eigenvalues(g);
            eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let scale = eig.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            let neg = eig.iter().filter(|e| **e < -1e-10 * scale).count();
            let pos = eig.iter().filter(|e| **e > 1e-10 * scale).count();
            if neg != 1 || pos != n - 1 {
                return Some(format!(
                    "simplex {}: edge lengths not realizable as a nondegenerate hyperbolic simplex",
                    s.id
                ));
            }
            None
        }
        Curvature::Spherical => {
            // Gram matrix of unit vectors must be positive definite
            let mut g = vec![vec![0.0; n]; n];
            for i in 0..n {
                g[i][i] = 1.0;
            }
            for ((i, j), len) in s.edge_lengths() {
                g[i][j] = len.cos();
                g[j][i] = len.cos();
            }
            let eig = sym_eigenvalues(g);
            let scale = eig.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            if eig.iter().any(|e| *e < 1e-10 * scale) {
                return Some(format!(
                    "simplex {}: edge lengths not realizable as a nondegenerate spherical simplex",
                    s.id
                ));
            }
            None
        }
        Curvature::Euclidean => {
            // inner-product Gram from squared distances, anchored at vertex 0
            let d = |i: usize, j: usize| if i == j { 0.0 } else { s.length(i, j) };
            let m = n - 1;
            let mut b = vec![vec![0.0; m]; m];
            for i in 0..m {
                for j in 0..m {
                    b[i][j] = 0.5
                        * (d(0, i + 1).powi(2) + d(0, j + 1).powi(2) - d(i + 1, j + 1).powi(2));
                }
            }
            let eig = sym_eigenvalues(b);
            let scale = eig.iter().fold(1e-30f64, |mx, e| mx.max(e.abs()));
            if eig.iter().any(|e| *e < 1e-10 * scale) {
                return Some(format!(
                    "simplex {}: edge lengths not realizable as a nondegenerate Euclidean simplex",
                    s.id
                ));
            }
            None
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, for reproducible class representatives
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// A built and validated M_kappa-simplicial complex.
#[derive(Debug, Clone)]
pub struct MkComplex {
    curvature: Curvature,
    simplices: Vec<MetricSimplex>,
    gluings: Vec<Gluing>,
    index: HashMap<String, usize>,
    /// quotient class id per (simplex, local vertex)
    vertex_class: HashMap<(usize, usize), usize>,
    vertex_members: Vec<Vec<(usize, usize)>>,
    /// quotient class id per (simplex, local edge (i<j))
    edge_class: HashMap<(usize, (usize, usize)), usize>,
    edge_members: Vec<Vec<(usize, (usize, usize))>>,
    /// for 2-complexes: neighbor across face f of simplex s, with the
    /// induced local-vertex map
    face_neighbor: HashMap<(usize, usize), (usize, usize, Vec<(usize, usize)>)>,
}

impl MkComplex {
    /// Validate and build. Every violation found is reported, not just the
    /// first.
    pub fn build(
        curvature: Curvature,
        simplices: Vec<MetricSimplex>,
        gluings: Vec<Gluing>,
    ) -> Result<Self> {
        let mut violations: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for (i, s) in simplices.iter().enumerate() {
            if index.insert(s.id.clone(), i).is_some() {
                violations.push(format!("duplicate simplex id {}", s.id));
            }
        }
        for s in &simplices {
            if let Some(v) = realizability_violation(s, curvature) {
                violations.push(v);
            }
        }
        let mut used_faces: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (gi, g) in gluings.iter().enumerate() {
            let (sa, sb) = match (index.get(&g.side_a.simplex), index.get(&g.side_b.simplex)) {
                (Some(&a), Some(&b)) => (a, b),
                _ => {
                    violations.push(format!("gluing {gi}: unknown simplex reference"));
                    continue;
                }
            };
            let (da, db) = (simplices[sa].dim(), simplices[sb].dim());
            if da != db {
                violations.push(format!("gluing {gi}: dimension mismatch ({da} vs {db})"));
                continue;
            }
            if g.side_a.face > da || g.side_b.face > db {
                violations.push(format!("gluing {gi}: face index out of range"));
                continue;
            }
            if sa == sb && g.side_a.face == g.side_b.face {
                violations.push(format!("gluing {gi}: a face cannot be glued to itself"));
                continue;
            }
            // codimension-1 faces of 2- and 3-simplices may be glued only
            // once; vertices of 1-simplices may have any valence (graphs)
            if da >= 2 {
                for side in [(sa, g.side_a.face), (sb, g.side_b.face)] {
                    if let Some(prev) = used_faces.insert(side, gi) {
                        violations.push(format!(
                            "face {} of simplex {} appears in gluings {prev} and {gi}",
                            side.1, simplices[side.0].id
                        ));
                    }
                }
            }
            // the vertex map must be a bijection between the exact face sets
            let face_a: BTreeSet<&String> = simplices[sa]
                .face(g.side_a.face)
                .into_iter()
                .map(|i| &simplices[sa].vertices[i])
                .collect();
            let face_b: BTreeSet<&String> = simplices[sb]
                .face(g.side_b.face)
                .into_iter()
                .map(|i| &simplices[sb].vertices[i])
                .collect();
            let from: BTreeSet<&String> = g.vertex_map.iter().map(|(a, _)| a).collect();
            let to: BTreeSet<&String> = g.vertex_map.iter().map(|(_, b)| b).collect();
            if from != face_a || to != face_b || g.vertex_map.len() != face_a.len() {
                violations.push(format!(
                    "gluing {gi}: vertex map is not a bijection between the two faces"
                ));
                continue;
            }
            // isometry: corresponding edge lengths must agree
            let la = |label: &str| simplices[sa].vertices.iter().position(|v| v == label).unwrap();
            let lb = |label: &str| simplices[sb].vertices.iter().position(|v| v == label).unwrap();
            for (p, (a1, b1)) in g.vertex_map.iter().enumerate() {
                for (a2, b2) in g.vertex_map.iter().skip(p + 1) {
                    let len_a = simplices[sa].length(la(a1), la(a2));
                    let len_b = simplices[sb].length(lb(b1), lb(b2));
                    if (len_a - len_b).abs() > GLUE_TOL {
                        violations.push(format!(
                            "gluing {gi}: edge ({a1}, {a2}) has length {len_a} but its image ({b1}, {b2}) has length {len_b}"
                        ));
                    }
                }
            }
        }
        if !violations.is_empty() {
            return Err(Error::InvalidComplex(violations));
        }

        // quotient vertex classes
        let mut offsets = Vec::with_capacity(simplices.len());
        let mut total = 0usize;
        for s in &simplices {
            offsets.push(total);
            total += s.dim() + 1;
        }
        let vid = |s: usize, v: usize| offsets[s] + v;
        let mut uf = UnionFind::new(total);
        for g in &gluings {
            let sa = index[&g.side_a.simplex];
            let sb = index[&g.side_b.simplex];
            for (a, b) in &g.vertex_map {
                let ia = simplices[sa].vertices.iter().position(|v| v == a).unwrap();
                let ib = simplices[sb].vertices.iter().position(|v| v == b).unwrap();
                uf.union(vid(sa, ia), vid(sb, ib));
            }
        }
        let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut vertex_class = HashMap::new();
        let mut vertex_members: Vec<Vec<(usize, usize)>> = Vec::new();
        for (s, simplex) in simplices.iter().enumerate() {
            for v in 0..=simplex.dim() {
                let root = uf.find(vid(s, v));
                let next_id = class_of_root.len();
                let c = *class_of_root.entry(root).or_insert(next_id);
                if c == vertex_members.len() {
                    vertex_members.push(Vec::new());
                }
                vertex_members[c].push((s, v));
                vertex_class.insert((s, v), c);
            }
        }

        // quotient edge classes, with orientation-consistency bookkeeping:
        // each edge instance carries two endpoint slots; a closed chain of
        // gluings around an edge must not map the edge to itself reversed
        let mut edge_instances: Vec<(usize, (usize, usize))> = Vec::new();
        let mut edge_idx: HashMap<(usize, (usize, usize)), usize> = HashMap::new();
        for (s, simplex) in simplices.iter().enumerate() {
            for ((i, j), _) in simplex.edge_lengths() {
                edge_idx.insert((s, (i, j)), edge_instances.len());
                edge_instances.push((s, (i, j)));
            }
        }
        let mut euf = UnionFind::new(edge_instances.len());
        // slot union-find: 2 slots per instance
        let mut suf = UnionFind::new(2 * edge_instances.len());
        let mut violations = Vec::new();
        for g in &gluings {
            let sa = index[&g.side_a.simplex];
            let sb = index[&g.side_b.simplex];
            let la = |label: &String| simplices[sa].vertices.iter().position(|v| v == label).unwrap();
            let lb = |label: &String| simplices[sb].vertices.iter().position(|v| v == label).unwrap();
            for (p, (a1, b1)) in g.vertex_map.iter().enumerate() {
                for (a2, b2) in g.vertex_map.iter().skip(p + 1) {
                    let (ia1, ia2) = (la(a1), la(a2));
                    let (ib1, ib2) = (lb(b1), lb(b2));
                    let ka = (ia1.min(ia2), ia1.max(ia2));
                    let kb = (ib1.min(ib2), ib1.max(ib2));
                    let ea = edge_idx[&(sa, ka)];
                    let eb = edge_idx[&(sb, kb)];
                    euf.union(ea, eb);
                    // slot 0 = smaller local index endpoint
                    let fa = if ia1 < ia2 { (0, 1) } else { (1, 0) };
                    let fb = if ib1 < ib2 { (0, 1) } else { (1, 0) };
                    suf.union(2 * ea + fa.0, 2 * eb + fb.0);
                    suf.union(2 * ea + fa.1, 2 * eb + fb.1);
                }
            }
        }
        for (e, inst) in edge_instances.iter().enumerate() {
            if suf.find(2 * e) == suf.find(2 * e + 1) {
                let (s, (i, j)) = *inst;
                violations.push(format!(
                    "edge ({}, {}) of simplex {} is identified with itself reversed by a chain of gluings",
                    simplices[s].vertices[i], simplices[s].vertices[j], simplices[s].id
                ));
            }
        }
        if !violations.is_empty() {
            return Err(Error::InvalidComplex(violations));
        }
        let mut eclass_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut edge_class = HashMap::new();
        let mut edge_members: Vec<Vec<(usize, (usize, usize))>> = Vec::new();
        for (e, inst) in edge_instances.iter().enumerate() {
            let root = euf.find(e);
            let next_id = eclass_of_root.len();
            let c = *eclass_of_root.entry(root).or_insert(next_id);
            if c == edge_members.len() {
                edge_members.push(Vec::new());
            }
            edge_members[c].push(*inst);
            edge_class.insert(*inst, c);
        }

        // face adjacency for 2-complexes
        let mut face_neighbor = HashMap::new();
        for g in &gluings {
            let sa = index[&g.side_a.simplex];
            let sb = index[&g.side_b.simplex];
            if simplices[sa].dim() != 2 {
                continue;
            }
            let la = |label: &String| simplices[sa].vertices.iter().position(|v| v == label).unwrap();
            let lb = |label: &String| simplices[sb].vertices.iter().position(|v| v == label).unwrap();
            let map_ab: Vec<(usize, usize)> =
                g.vertex_map.iter().map(|(a, b)| (la(a), lb(b))).collect();
            let map_ba: Vec<(usize, usize)> = map_ab.iter().map(|&(a, b)| (b, a)).collect();
            face_neighbor.insert((sa, g.side_a.face), (sb, g.side_b.face, map_ab));
            face_neighbor.insert((sb, g.side_b.face), (sa, g.side_a.face, map_ba));
        }

        Ok(MkComplex {
            curvature,
            simplices,
            gluings,
            index,
            vertex_class,
            vertex_members,
            edge_class,
            edge_members,
            face_neighbor,
        })
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn simplices(&self) -> &[MetricSimplex] {
        &self.simplices
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn simplex_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn vertex_class_count(&self) -> usize {
        self.vertex_members.len()
    }

    pub fn vertex_class(&self, simplex: usize, local: usize) -> usize {
        self.vertex_class[&(simplex, local)]
    }

    pub fn vertex_class_members(&self, class: usize) -> &[(usize, usize)] {
        &self.vertex_members[class]
    }

    /// Canonical printable name: lexicographically smallest simplex/label
    /// pair in the class.
    pub fn vertex_class_name(&self, class: usize) -> String {
        self.vertex_members[class]
            .iter()
            .map(|&(s, v)| format!("{}/{}", self.simplices[s].id, self.simplices[s].vertices[v]))
            .min()
            .unwrap()
    }

    pub fn vertex_class_by_name(&self, name: &str) -> Result<usize> {
        let (sid, label) = name
            .split_once('/')
            .ok_or_else(|| Error::VertexNotFound(name.to_string()))?;
        let s = self
            .simplex_index(sid)
            .ok_or_else(|| Error::VertexNotFound(name.to_string()))?;
        let v = self.simplices[s]
            .vertices
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::VertexNotFound(name.to_string()))?;
        Ok(self.vertex_class(s, v))
    }

    pub fn edge_class_count(&self) -> usize {
        self.edge_members.len()
    }

    pub fn edge_class(&self, simplex: usize, edge: (usize, usize)) -> usize {
        self.edge_class[&(simplex, (edge.0.min(edge.1), edge.0.max(edge.1)))]
    }

    pub fn edge_class_members(&self, class: usize) -> &[(usize, (usize, usize))] {
        &self.edge_members[class]
    }

    pub fn is_pure(&self, dim: usize) -> bool {
        self.simplices.iter().all(|s| s.dim() == dim)
    }

    /// Neighbor across face `f` of 2-simplex `s`, with the induced local
    /// vertex map, if that face is glued.
    pub fn neighbor_across(&self, s: usize, f: usize) -> Option<(usize, usize, &[(usize, usize)])> {
        self.face_neighbor.get(&(s, f)).map(|(t, g, m)| (*t, *g, m.as_slice()))
    }

    /// Number of 2-simplices containing each edge class (2-complexes).
    fn edge_triangle_count(&self, class: usize) -> usize {
        self.edge_members[class]
            .iter()
            .filter(|(s, _)| self.simplices[*s].dim() == 2)
            .count()
    }

    /// Is this edge class on the boundary of a pure 2-complex?
    pub fn is_boundary_edge(&self, class: usize) -> bool {
        self.edge_triangle_count(class) == 1
    }

    pub fn is_boundary_vertex(&self, class: usize) -> bool {
        (0..self.edge_class_count()).any(|e| {
            self.is_boundary_edge(e)
                && self.edge_members[e].iter().any(|&(s, (i, j))| {
                    self.vertex_class(s, i) == class || self.vertex_class(s, j) == class
                })
        })
    }

    /// Interior angle at the corner of 2-simplex `s` at local vertex `v`.
    pub fn corner_angle(&self, s: usize, v: usize) -> Result<f64> {
        self.simplices[s].corner_angle(v, self.curvature)
    }

    /// Total angle around a quotient vertex, over all incident 2-simplex
    /// corners.
    pub fn angle_sum(&self, class: usize) -> Result<f64> {
        let mut sum = 0.0;
        for &(s, v) in &self.vertex_members[class] {
            if self.simplices[s].dim() == 2 {
                sum += self.corner_angle(s, v)?;
            }
        }
        Ok(sum)
    }

    /// The link of a quotient vertex.
    pub fn vertex_link(&self, class: usize) -> Result<LinkComplex> {
        if class >= self.vertex_members.len() {
            return Err(Error::VertexNotFound(format!("class {class}")));
        }
        let members = &self.vertex_members[class];
        let max_dim = members.iter().map(|&(s, _)| self.simplices[s].dim()).max().unwrap_or(0);
        // link nodes: direction instances (simplex, v_local, other_local)
        // identified when the containing edge instances are identified AND
        // the edge is shared by two glued 2-faces meeting at v. For 2- and
        // 3-complexes alike, two corner directions along the same quotient
        // edge at v coincide exactly when a gluing chain identifies the
        // edge instances; the edge-class quotient captures that.
        let mut node_ids: BTreeMap<usize, usize> = BTreeMap::new(); // edge class -> node
        let mut node_names: Vec<String> = Vec::new();
        let mut edges: Vec<LinkEdge> = Vec::new();
        let mut spherical_triangles: Vec<[f64; 3]> = Vec::new();
        for &(s, v) in members {
            let simplex = &self.simplices[s];
            match simplex.dim() {
                1 => {}
                2 => {
                    let others: Vec<usize> = (0..3).filter(|&i| i != v).collect();
                    let mut ends = [0usize; 2];
                    for (slot, &w) in others.iter().enumerate() {
                        let ec = self.edge_class(s, (v, w));
                        let next_id = node_ids.len();
                        let id = *node_ids.entry(ec).or_insert(next_id);
                        if id == node_names.len() {
                            node_names.push(format!(
                                "{}:{}-{}",
                                simplex.id, simplex.vertices[v], simplex.vertices[w]
                            ));
                        }
                        ends[slot] = id;
                    }
                    let angle = self.corner_angle(s, v)?;
                    edges.push(LinkEdge {
                        a: ends[0],
                        b: ends[1],
                        length: angle,
                        source: (s, v),
                    });
                }
                3 => {
                    // spherical link triangle: side lengths are the face
                    // angles at v of the three incident 2-faces
                    let others: Vec<usize> = (0..4).filter(|&i| i != v).collect();
                    let mut sides = [0.0; 3];
                    // side k is the face angle in the 2-face skipping others[k]
                    for k in 0..3 {
                        let (w1, w2) = match k {
                            0 => (others[1], others[2]),
                            1 => (others[0], others[2]),
                            _ => (others[0], others[1]),
                        };
                        let tri = TriangleSides::new(
                            simplex.length(w1, w2),
                            simplex.length(v, w1),
                            simplex.length(v, w2),
                            self.curvature,
                        )?;
                        let (alpha, _, _) = hypgeom::triangle_angles_from_sides(&tri)?;
                        sides[k] = alpha;
                    }
                    spherical_triangles.push(sides);
                    // 1-skeleton of the spherical link: nodes are the edge
                    // directions at v, connected pairwise through faces
                    let mut dir = [0usize; 3];
                    for (slot, &w) in others.iter().enumerate() {
                        let ec = self.edge_class(s, (v, w));
                        let next_id = node_ids.len();
                        let id = *node_ids.entry(ec).or_insert(next_id);
                        if id == node_names.len() {
                            node_names.push(format!(
                                "{}:{}-{}",
                                simplex.id, simplex.vertices[v], simplex.vertices[w]
                            ));
                        }
                        dir[slot] = id;
                    }
                    for k in 0..3 {
                        let (a, b) = match k {
                            0 => (dir[1], dir[2]),
                            1 => (dir[0], dir[2]),
                            _ => (dir[0], dir[1]),
                        };
                        edges.push(LinkEdge { a, b, length: sides[k], source: (s, v) });
                    }
                }
                _ => unreachable!(),
            }
        }
        Ok(LinkComplex {
            base_vertex: class,
            node_count: node_names.len(),
            node_names,
            edges,
            spherical_triangles: if max_dim == 3 { Some(spherical_triangles) } else { None },
        })
    }

    /// Euler characteristic of a pure 2-complex whose quotient is a
    /// compact surface (every edge class in at most two triangles).
    pub fn euler_characteristic(&self) -> Result<i64> {
        if !self.is_pure(2) {
            return Err(Error::NotASurface("complex is not a pure 2-complex".into()));
        }
        for e in 0..self.edge_class_count() {
            let k = self.edge_triangle_count(e);
            if k > 2 {
                return Err(Error::NotASurface(format!(
                    "edge class {e} lies in {k} triangles"
                )));
            }
        }
        let v = self.vertex_class_count() as i64;
        let e = self.edge_class_count() as i64;
        let f = self.simplices.len() as i64;
        Ok(v - e + f)
    }

    /// Total hyperbolic area of a pure 2-complex (sum of angle defects).
    pub fn total_area(&self) -> Result<f64> {
        if self.simplices.is_empty() {
            return Ok(0.0);
        }
        if !self.is_pure(2) {
            return Err(Error::NotASurface("complex is not a pure 2-complex".into()));
        }
        if self.curvature == Curvature::Euclidean {
            return Ok(0.0);
        }
        if self.curvature != Curvature::Hyperbolic {
            return Err(Error::UnsupportedCurvature(self.curvature.kappa()));
        }
        let mut total = 0.0;
        for s in &self.simplices {
            let sides = TriangleSides::new(
                s.length(1, 2),
                s.length(0, 2),
                s.length(0, 1),
                self.curvature,
            )?;
            total += hypgeom::triangle_area(&sides)?;
        }
        Ok(total)
    }
}

/// One metric edge of a vertex link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkEdge {
    pub a: usize,
    pub b: usize,
    /// interior angle contributed by the source corner, in (0, pi)
    pub length: f64,
    /// (simplex index, local vertex) corner this edge came from
    pub source: (usize, usize),
}

/// The link of a vertex: a metric graph (2-complexes), plus the spherical
/// triangles when the vertex lies in 3-simplices (only the 1-skeleton of
/// that spherical complex is exposed).
#[derive(Debug, Clone, PartialEq)]
pub struct LinkComplex {
    pub base_vertex: usize,
    pub node_count: usize,
    pub node_names: Vec<String>,
    pub edges: Vec<LinkEdge>,
    pub spherical_triangles: Option<Vec<[f64; 3]>>,
}

impl LinkComplex {
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Degree of each node in the link graph.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.node_count];
        for e in &self.edges {
            d[e.a] += 1;
            d[e.b] += 1;
        }
        d
    }

    /// Is the whole link one closed cycle?
    pub fn is_single_cycle(&self) -> bool {
        self.node_count > 0
            && self.edges.len() == self.node_count
            && self.degrees().iter().all(|&d| d == 2)
            && self.is_connected()
    }

    /// Is the whole link one open path?
    pub fn is_single_path(&self) -> bool {
        if self.node_count == 0 || self.edges.len() + 1 != self.node_count {
            return false;
        }
        let deg = self.degrees();
        let ones = deg.iter().filter(|&&d| d == 1).count();
        ones == 2 && deg.iter().all(|&d| d <= 2) && self.is_connected()
    }

    fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}
