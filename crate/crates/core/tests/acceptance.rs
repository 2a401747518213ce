//! Acceptance suite: one test per criterion, each printing a single
//! PASS line. Oracles here are independent of the production code paths
//! (Fibonacci hemisphere grid, law-of-cosines angle, gift-wrapping hull).

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use mkcat_core::catcheck::{cat_inequality_sample, link_condition};
use mkcat_core::crescent2d::{
    find_crescents, two_convex_hull, HPolygon, MarkedGeodesics,
};
use mkcat_core::fixtures;
use mkcat_core::geodesy::{
    gauss_bonnet_audit, h_area_bound_check, path_hausdorff, shortest_geodesic,
    straighten_path, ComplexPath, HMapSurface, SingularSurface, Waypoint,
    STRAIGHTEN_TOL,
};
use mkcat_core::hypgeom::{triangle_area, TriangleSides};
use mkcat_core::vertexclass::{
    classify_vertex, crossing_certificate_check, hemisphere_fit,
    hemisphere_grid_opt, perturb_to_strict, two_convexity_decision,
    HemisphereMode, SphericalPolygon, VertexKind, Witness,
};
use mkcat_core::{Curvature, ModelPoint};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// shared helpers

fn random_frame(rng: &mut ChaCha8Rng) -> ([f64; 3], [f64; 3], [f64; 3]) {
    loop {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(0.1..=1.0).contains(&norm) {
            continue;
        }
        let n = [v[0] / norm, v[1] / norm, v[2] / norm];
        // any direction not parallel to n seeds the tangent frame
        let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let d = seed[0] * n[0] + seed[1] * n[1] + seed[2] * n[2];
        let e1 = [seed[0] - d * n[0], seed[1] - d * n[1], seed[2] - d * n[2]];
        let l = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
        let e1 = [e1[0] / l, e1[1] / l, e1[2] / l];
        let e2 = [
            n[1] * e1[2] - n[2] * e1[1],
            n[2] * e1[0] - n[0] * e1[2],
            n[0] * e1[1] - n[1] * e1[0],
        ];
        return (e1, e2, n);
    }
}

/// Distinct sorted angles with a minimum cyclic gap.
fn spaced_angles(rng: &mut ChaCha8Rng, m: usize, min_gap: f64) -> Option<Vec<f64>> {
    let mut angles: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..TAU)).collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in angles.windows(2) {
        if w[1] - w[0] < min_gap {
            return None;
        }
    }
    if TAU - (angles[angles.len() - 1] - angles[0]) < min_gap {
        return None;
    }
    Some(angles)
}

/// Polygon inscribed in the circle of angular radius `cap` about `n`.
fn cap_polygon(
    frame: &([f64; 3], [f64; 3], [f64; 3]),
    angles: &[f64],
    cap: f64,
) -> SphericalPolygon {
    let (e1, e2, n) = frame;
    let verts: Vec<[f64; 3]> = angles
        .iter()
        .map(|t| {
            let (c, s) = (cap.cos(), cap.sin());
            [
                c * n[0] + s * (t.cos() * e1[0] + t.sin() * e2[0]),
                c * n[1] + s * (t.cos() * e1[1] + t.sin() * e2[1]),
                c * n[2] + s * (t.cos() * e1[2] + t.sin() * e2[2]),
            ]
        })
        .collect();
    SphericalPolygon::from_directions(&verts).expect("cap polygon is valid")
}

// ---------------------------------------------------------------------------
// 1. hemisphere lemma

#[test]
fn acceptance_1_hemisphere_lemma() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0001);

    // short loops: total length < 2*pi always fits an open hemisphere
    let mut short_checked = 0usize;
    while short_checked < 1000 {
        let frame = random_frame(&mut rng);
        let m = rng.gen_range(3..=8);
        let Some(angles) = spaced_angles(&mut rng, m, 0.15) else { continue };
        let cap = rng.gen_range(0.05..1.2);
        let poly = cap_polygon(&frame, &angles, cap);
        let total = poly.total_length();
        if !(total > 0.0 && total < TAU - 0.01) {
            continue;
        }
        let center = hemisphere_fit(&poly, HemisphereMode::Open);
        assert!(
            center.is_some(),
            "open-hemisphere fit failed for a loop of length {total}"
        );
        // the solver never does worse than the brute-force grid
        let (grid_val, _) = hemisphere_grid_opt(&poly, 10_000);
        let n = center.unwrap();
        let solver_val = poly
            .vertices()
            .iter()
            .map(|v| n[0] * v[0] + n[1] * v[1] + n[2] * v[2])
            .fold(f64::INFINITY, f64::min);
        assert!(
            grid_val <= solver_val + 1e-9,
            "grid beat the exact solver: {grid_val} > {solver_val}"
        );
        short_checked += 1;
    }

    // long loops built around an antipodally-balanced triple: three
    // vertices at mutual angle 2*pi/3 on a great circle sum to zero, so
    // min_i <n, v_i> <= 0 for every direction n — no open hemisphere.
    let mut long_checked = 0usize;
    while long_checked < 1000 {
        let frame = random_frame(&mut rng);
        let extras = rng.gen_range(0..=4);
        let mut angles = vec![0.0, TAU / 3.0, 2.0 * TAU / 3.0];
        for _ in 0..extras {
            angles.push(rng.gen_range(0.0..TAU));
        }
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        angles.dedup_by(|a, b| (*a - *b).abs() < 0.1);
        if angles.len() < 3 {
            continue;
        }
        let poly = cap_polygon(&frame, &angles, PI / 2.0);
        assert!(
            poly.total_length() >= TAU - 1e-9,
            "great-circle loop shorter than 2*pi"
        );
        assert!(
            hemisphere_fit(&poly, HemisphereMode::Open).is_none(),
            "solver claimed an open hemisphere around a balanced triple"
        );
        let (grid_val, _) = hemisphere_grid_opt(&poly, 10_000);
        assert!(
            grid_val <= 1e-6,
            "grid found an open hemisphere the solver rejected: {grid_val}"
        );
        long_checked += 1;
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 1 hemisphere lemma: PASS ({short_checked} short + {long_checked} long loops, {elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// 2. link / CAT consistency on cone fixtures

#[test]
fn acceptance_2_link_cat_consistency() {
    let started = Instant::now();
    // law-of-cosines oracle for the corner angle of the unit equilateral
    // hyperbolic triangle
    let ch = 1.0f64.cosh();
    let alpha = ((ch * ch - ch) / (1.0f64.sinh() * 1.0f64.sinh())).acos();

    for k in 5..=9usize {
        let complex = fixtures::cone(k, 1.0).unwrap();
        let report = link_condition(&complex).unwrap();
        let oracle_pass = k as f64 * alpha >= TAU;
        assert_eq!(
            report.is_none(),
            oracle_pass,
            "link condition disagrees with the angle oracle at k = {k}"
        );
        assert_eq!(oracle_pass, k >= 7, "boundary between 6 and 7 moved");

        // geodesic triangle hugging the apex (local vertex 0 of each face)
        let corners: Vec<Waypoint> = [0, k / 3, 2 * k / 3]
            .iter()
            .map(|&t| Waypoint::new(t, vec![0.8, 0.1, 0.1]))
            .collect();
        let sides = [
            shortest_geodesic(&complex, &corners[0], &corners[1]).unwrap(),
            shortest_geodesic(&complex, &corners[1], &corners[2]).unwrap(),
            shortest_geodesic(&complex, &corners[2], &corners[0]).unwrap(),
        ];
        let worst = cat_inequality_sample(&complex, &sides, 10_000, 0xCA7 + k as u64).unwrap();
        if oracle_pass {
            assert!(
                worst <= 1e-7,
                "CAT violation {worst} on the passing cone k = {k}"
            );
        } else {
            assert!(
                worst > 1e-4,
                "no CAT violation near the witness vertex on cone k = {k}: {worst}"
            );
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}");
    println!("ACCEPTANCE 2 link/CAT consistency: PASS (cones k = 5..9, {elapsed:?})");
}

// ---------------------------------------------------------------------------
// 3. Gauss-Bonnet exactness

#[test]
fn acceptance_3_gauss_bonnet_exactness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0003);
    let mut audited = 0usize;

    // the three hand-checked Euler characteristics
    for (complex, chi) in [
        (fixtures::cone(7, 0.9).unwrap(), 1i64),
        (fixtures::doubled_triangle(0.8).unwrap(), 2),
        (fixtures::torus7(1.0).unwrap(), 0),
        (fixtures::tetrahedron_boundary(0.7).unwrap(), 2),
    ] {
        let surface = SingularSurface::new(complex).unwrap();
        assert_eq!(surface.euler_characteristic().unwrap(), chi);
        let residual = gauss_bonnet_audit(&surface).unwrap();
        assert!(residual <= 1e-9, "residual {residual} at chi = {chi}");
        audited += 1;
    }

    // randomized compact fixtures
    while audited < 100 {
        let surface = match rng.gen_range(0..3u32) {
            0 => {
                let n = rng.gen_range(1..=9);
                SingularSurface::new(fixtures::strip(n, rng.gen()).unwrap()).unwrap()
            }
            1 => {
                let n = rng.gen_range(3..=9);
                let r = rng.gen_range(0.3..1.5);
                SingularSurface::new(fixtures::regular_ngon(n, r).unwrap()).unwrap()
            }
            _ => {
                let k = rng.gen_range(3..=9);
                let side = rng.gen_range(0.3..1.4);
                SingularSurface::new(fixtures::cone(k, side).unwrap()).unwrap()
            }
        };
        let residual = gauss_bonnet_audit(&surface).unwrap();
        assert!(residual <= 1e-9, "residual {residual} on fixture {audited}");
        audited += 1;
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    println!("ACCEPTANCE 3 Gauss-Bonnet exactness: PASS ({audited} fixtures, {elapsed:?})");
}

// ---------------------------------------------------------------------------
// 4. h-map area bound and strict n-gon bound

#[test]
fn acceptance_4_h_map_area_bound() {
    let started = Instant::now();
    let mut realized = 0usize;

    // h-map fixtures: fans whose interior vertices carry angle >= 2*pi,
    // with every boundary vertex distinguished
    let mut fans: Vec<mkcat_core::complexcore::MkComplex> = Vec::new();
    for n in 3..=8 {
        for r in [0.4, 0.9, 1.5] {
            fans.push(fixtures::regular_ngon(n, r).unwrap());
        }
    }
    // sides small enough that k corner angles still reach 2*pi
    for k in 7..=9 {
        for side in [0.6, 0.8, 1.0] {
            fans.push(fixtures::cone(k, side).unwrap());
        }
    }
    for complex in fans {
        let surface = SingularSurface::new(complex).unwrap();
        let distinguished = surface.boundary_vertices().to_vec();
        let hmap = HMapSurface::new(surface, distinguished).unwrap();
        let slack = h_area_bound_check(&hmap).unwrap();
        assert!(slack >= -1e-9, "negative h-map slack {slack}");
        realized += 1;
    }

    // strict polygon area bound, with the law-of-cosines triangle oracle
    for n in 3..=8usize {
        for r in [0.5, 1.0, 2.0] {
            let complex = fixtures::regular_ngon(n, r).unwrap();
            let surface = SingularSurface::new(complex).unwrap();
            let area = surface.area().unwrap();
            let bound = (n as f64 - 2.0) * PI;
            assert!(
                area <= bound - 1e-6,
                "{n}-gon area {area} not strictly below {bound}"
            );
            // independent per-triangle oracle
            let apex = TAU / n as f64;
            let ch = r.cosh() * r.cosh() - r.sinh() * r.sinh() * apex.cos();
            let rim = ch.acosh();
            let tri = TriangleSides::new(r, r, rim, Curvature::Hyperbolic).unwrap();
            let oracle = n as f64 * triangle_area(&tri).unwrap();
            assert!(
                (area - oracle).abs() <= 1e-9,
                "area {area} disagrees with the fan oracle {oracle}"
            );
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 4 h-map area bound: PASS ({realized} h-maps, n-gons 3..8, {elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// 5. geodesic uniqueness

#[test]
fn acceptance_5_geodesic_uniqueness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0005);

    let mut complexes = Vec::new();
    for k in 7..=9 {
        complexes.push(fixtures::cone(k, 1.0).unwrap());
    }
    for n in 5..=7 {
        complexes.push(fixtures::regular_ngon(n, 0.8).unwrap());
    }
    for seed in 0..14u64 {
        let n = 3 + (seed as usize % 6);
        complexes.push(fixtures::strip(n, seed).unwrap());
    }
    assert_eq!(complexes.len(), 20);

    for (ci, complex) in complexes.iter().enumerate() {
        assert!(
            link_condition(complex).unwrap().is_none(),
            "fixture {ci} fails the link condition"
        );
        let n_simplices = complex.simplices().len();
        for _ in 0..10 {
            let random_wp = |rng: &mut ChaCha8Rng| {
                let s = rng.gen_range(0..n_simplices);
                let mut bary: Vec<f64> = (0..3).map(|_| rng.gen_range(0.1..1.0)).collect();
                let total: f64 = bary.iter().sum();
                bary.iter_mut().for_each(|b| *b /= total);
                Waypoint::new(s, bary)
            };
            let p = random_wp(&mut rng);
            let q = random_wp(&mut rng);
            let reference = shortest_geodesic(complex, &p, &q).unwrap();
            // restart the straightening from five jittered copies: a
            // uniquely geodesic fixture pulls each back to the same path
            for seed in 0..5u64 {
                let mut jrng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
                let mut wps = reference.waypoints.clone();
                let last = wps.len() - 1;
                for wp in wps.iter_mut().take(last).skip(1) {
                    for b in wp.bary.iter_mut() {
                        *b = (*b + jrng.gen_range(0.0..0.08)).max(0.02);
                    }
                    let total: f64 = wp.bary.iter().sum();
                    wp.bary.iter_mut().for_each(|b| *b /= total);
                }
                let jittered = ComplexPath::new(complex, wps).unwrap();
                let back = straighten_path(complex, &jittered, 200, STRAIGHTEN_TOL).unwrap();
                let gap = path_hausdorff(complex, &reference, &back).unwrap();
                assert!(
                    gap <= 1e-7,
                    "fixture {ci}: restart {seed} settled {gap} away from the geodesic"
                );
            }
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 5 geodesic uniqueness: PASS (20 fixtures x 10 pairs x 5 restarts, {elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// 6. crescent hull
//
// Independent pocket oracle: gift-wrapping hull plus the same recursion
// over non-hull chains, sharing no code with the production monotone chain.

type K = [f64; 2];

fn orient2(a: K, b: K, c: K) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn jarvis_hull(pts: &[K]) -> Vec<usize> {
    let n = pts.len();
    let start = (0..n).min_by(|&a, &b| pts[a].partial_cmp(&pts[b]).unwrap()).unwrap();
    let mut hull = vec![start];
    let mut cur = start;
    loop {
        let mut next = usize::MAX;
        for cand in 0..n {
            if cand == cur || pts[cand] == pts[cur] {
                continue;
            }
            if next == usize::MAX {
                next = cand;
                continue;
            }
            let o = orient2(pts[cur], pts[next], pts[cand]);
            let d_next =
                (pts[next][0] - pts[cur][0]).powi(2) + (pts[next][1] - pts[cur][1]).powi(2);
            let d_cand =
                (pts[cand][0] - pts[cur][0]).powi(2) + (pts[cand][1] - pts[cur][1]).powi(2);
            if o < -1e-15 || (o.abs() <= 1e-15 && d_cand > d_next) {
                next = cand;
            }
        }
        if next == usize::MAX || next == start {
            break;
        }
        hull.push(next);
        cur = next;
    }
    hull
}

fn oracle_chain(pts: &[K], chain: &[usize], level: usize, out: &mut Vec<(usize, Vec<usize>)>) {
    if chain.len() < 3 {
        return;
    }
    let local: Vec<K> = chain.iter().map(|&i| pts[i]).collect();
    let mut on_hull = vec![false; chain.len()];
    for h in jarvis_hull(&local) {
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
            let sub: Vec<usize> = chain[i..=j].to_vec();
            out.push((level, sub.clone()));
            oracle_chain(pts, &sub, level + 1, out);
        }
        i = j;
    }
}

fn oracle_pockets(pts: &[K]) -> Vec<(usize, Vec<usize>)> {
    let n = pts.len();
    let mut hull = jarvis_hull(pts);
    hull.sort_unstable();
    let mut out = Vec::new();
    for w in 0..hull.len() {
        let a = hull[w];
        let b = hull[(w + 1) % hull.len()];
        let gap = (b + n - a) % n;
        if gap <= 1 {
            continue;
        }
        let chain: Vec<usize> = (0..=gap).map(|k| (a + k) % n).collect();
        out.push((0, chain.clone()));
        oracle_chain(pts, &chain, 1, &mut out);
    }
    out
}

/// Rejects self-intersecting polygons: denting a vertex of a thin
/// polygon can drag it across the far side.
fn is_simple(pts: &[K]) -> bool {
    let n = pts.len();
    let crosses = |a: K, b: K, c: K, d: K| -> bool {
        let d1 = orient2(c, d, a);
        let d2 = orient2(c, d, b);
        let d3 = orient2(a, b, c);
        let d4 = orient2(a, b, d);
        d1 * d2 < 0.0 && d3 * d4 < 0.0
    };
    for i in 0..n {
        for j in (i + 1)..n {
            // skip adjacent edges (shared endpoint)
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if crosses(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Safe marked geodesic: a polygon edge with both endpoints on the hull
/// belongs to every intermediate region, so it survives all moves. When
/// no such edge exists, fall back to a degenerate chord at a hull vertex
/// (hull vertices are never removed by a move).
fn hull_edge_mark(pts: &[K]) -> MarkedGeodesics {
    let hull = jarvis_hull(pts);
    let on_hull = |i: usize| hull.contains(&i);
    let n = pts.len();
    let (a, b) = (0..n)
        .find(|&i| on_hull(i) && on_hull((i + 1) % n))
        .map(|i| (pts[i], pts[(i + 1) % n]))
        .unwrap_or((pts[hull[0]], pts[hull[0]]));
    MarkedGeodesics::new(vec![(
        ModelPoint::from_klein(&a).unwrap(),
        ModelPoint::from_klein(&b).unwrap(),
    )])
}

fn exercise_hull(pts: &[K], label: &str) {
    let poly = HPolygon::from_klein(pts).unwrap();

    // pocket finder vs the gift-wrapping oracle, exact structural match
    let found = find_crescents(&poly).unwrap();
    let mut mine: Vec<(usize, Vec<usize>)> =
        found.iter().map(|c| (c.level, c.alpha.clone())).collect();
    let mut oracle = oracle_pockets(poly.klein_coords());
    mine.sort();
    oracle.sort();
    assert_eq!(mine, oracle, "{label}: pocket oracle mismatch");

    let marks = hull_edge_mark(pts);
    let trace = two_convex_hull(&poly, &marks, 1e-6)
        .unwrap_or_else(|e| panic!("{label}: hull failed on {pts:?}: {e:?}"));
    assert!(trace.polygon.is_convex(), "{label}: output not convex");
    assert!(
        find_crescents(&trace.polygon).unwrap().is_empty(),
        "{label}: output still has crescents"
    );
    for w in trace.folding_trace.windows(2) {
        assert!(
            w[1] < w[0],
            "{label}: folding trace {:?} not strictly decreasing",
            trace.folding_trace
        );
    }
    // marked geodesics end up inside the output region
    for (a, b) in &marks.chords {
        for t in 0..=8 {
            let s = t as f64 / 8.0;
            let pt = mkcat_core::hypgeom::geodesic_point(a, b, s).unwrap();
            assert!(
                trace.polygon.contains_within(&pt, 1e-6).unwrap(),
                "{label}: marked geodesic escaped the hull"
            );
        }
    }
    // idempotence
    let again = two_convex_hull(&trace.polygon, &marks, 1e-6).unwrap();
    assert_eq!(again.moves, 0, "{label}: hull of a hull moved again");
    assert_eq!(
        again.polygon.len(),
        trace.polygon.len(),
        "{label}: hull of a hull changed shape"
    );
    for (p, q) in again
        .polygon
        .klein_coords()
        .iter()
        .zip(trace.polygon.klein_coords())
    {
        assert!((p[0] - q[0]).abs() <= 1e-9 && (p[1] - q[1]).abs() <= 1e-9);
    }
}

#[test]
fn acceptance_6_crescent_hull() {
    let started = Instant::now();
    const S: f64 = 0.03;
    let scale = |pts: &[[f64; 2]]| -> Vec<K> {
        pts.iter().map(|p| [p[0] * S, p[1] * S]).collect()
    };

    let notched = scale(&[[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [5.0, 6.0], [0.0, 10.0]]);
    exercise_hull(&notched, "notched square");

    let spiral = scale(&[
        [0.0, 0.0],
        [20.0, 0.0],
        [20.0, 16.0],
        [12.0, 16.0],
        [12.0, 4.0],
        [10.0, 4.0],
        [10.0, 12.0],
        [8.0, 12.0],
        [8.0, 4.0],
        [5.0, 4.0],
        [5.0, 16.0],
        [0.0, 16.0],
    ]);
    exercise_hull(&spiral, "spiral");

    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0006);
    let mut random_checked = 0usize;
    while random_checked < 100 {
        let n = rng.gen_range(5..=12);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        angles.dedup_by(|a, b| (*a - *b).abs() < 0.05);
        if angles.len() < 5 {
            continue;
        }
        let mut pts: Vec<K> =
            angles.iter().map(|t| [0.5 * t.cos(), 0.5 * t.sin()]).collect();
        for _ in 0..rng.gen_range(1..=2usize) {
            let i = rng.gen_range(0..pts.len());
            let f = rng.gen_range(0.2..0.7);
            pts[i] = [pts[i][0] * f, pts[i][1] * f];
        }
        if !is_simple(&pts) || HPolygon::from_klein(&pts).is_err() {
            continue;
        }
        exercise_hull(&pts, "random polygon");
        random_checked += 1;
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 6 crescent hull: PASS (2 fixtures + {random_checked} random polygons, {elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// 7. vertex classification soundness

#[test]
fn acceptance_7_vertex_classification() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007);

    let mut classified = 0usize;
    let mut strict_seen = 0usize;
    while classified < 1000 {
        let frame = random_frame(&mut rng);
        let (_, _, n) = frame;
        let kind_pick = classified % 4;
        // great-circle loops anchor a balanced triple (vectors summing to
        // zero), so no open hemisphere can hold them
        let balanced = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let mut angles = vec![0.0, TAU / 3.0, 2.0 * TAU / 3.0];
            for _ in 0..rng.gen_range(0..=3usize) {
                let t = rng.gen_range(0.0..TAU);
                if angles.iter().all(|a| {
                    let gap = (t - a).abs();
                    gap.min(TAU - gap) >= 0.25
                }) {
                    angles.push(t);
                }
            }
            angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
            angles
        };
        let (poly, orientation, expected) = match kind_pick {
            0 | 1 => {
                let m = rng.gen_range(3..=6);
                let Some(angles) = spaced_angles(&mut rng, m, 0.25) else { continue };
                let cap = rng.gen_range(0.2..1.2);
                if kind_pick == 0 {
                    (cap_polygon(&frame, &angles, cap), n, VertexKind::Convex)
                } else {
                    let away = [-n[0], -n[1], -n[2]];
                    (cap_polygon(&frame, &angles, cap), away, VertexKind::Concave)
                }
            }
            2 => {
                let angles = balanced(&mut rng);
                (cap_polygon(&frame, &angles, PI / 2.0), n, VertexKind::SVertex)
            }
            _ => {
                let angles = balanced(&mut rng);
                let flat = cap_polygon(&frame, &angles, PI / 2.0);
                let Ok(strict) = perturb_to_strict(&flat, 0.05) else { continue };
                (strict, n, VertexKind::StrictSVertex)
            }
        };
        let class = classify_vertex(&poly, Some(orientation)).unwrap();
        assert_eq!(class.kind, expected, "link {classified} misclassified");

        // brute-force hemisphere grid agreement
        let (grid_val, _) = hemisphere_grid_opt(&poly, 10_000);
        match class.kind {
            VertexKind::Convex | VertexKind::Concave => {
                // an open hemisphere exists; the grid must not disagree by
                // claiming deep infeasibility
                assert!(grid_val > -1e-6, "grid contradicts an open hemisphere");
            }
            VertexKind::SVertex | VertexKind::StrictSVertex => {
                assert!(
                    grid_val <= 1e-6,
                    "grid found an open hemisphere for an s-vertex: {grid_val}"
                );
            }
        }

        if let Witness::Crossing(cert) = &class.witness {
            assert_eq!(class.kind, VertexKind::StrictSVertex);
            assert_eq!(
                crossing_certificate_check(&poly, cert).unwrap(),
                true,
                "emitted certificate failed validation"
            );
            strict_seen += 1;
        } else {
            assert_ne!(class.kind, VertexKind::StrictSVertex);
        }
        classified += 1;
    }
    assert!(strict_seen >= 200, "only {strict_seen} strict s-vertices exercised");

    // 2-convexity rejects exactly the planted concave corners
    let mut planted_cases = 0usize;
    while planted_cases < 50 {
        let count = rng.gen_range(3..=8usize);
        let plant = if planted_cases % 2 == 0 {
            Some(rng.gen_range(0..count))
        } else {
            None
        };
        let mut links = Vec::new();
        let mut ok = true;
        for i in 0..count {
            let frame = random_frame(&mut rng);
            let (_, _, n) = frame;
            let m = rng.gen_range(3..=6);
            let Some(angles) = spaced_angles(&mut rng, m, 0.25) else {
                ok = false;
                break;
            };
            let cap = rng.gen_range(0.2..1.2);
            let orientation = if plant == Some(i) { [-n[0], -n[1], -n[2]] } else { n };
            links.push((cap_polygon(&frame, &angles, cap), Some(orientation)));
        }
        if !ok {
            continue;
        }
        let verdict = two_convexity_decision(&links).unwrap();
        match plant {
            Some(i) => assert_eq!(verdict, Err(i), "planted corner not found"),
            None => assert_eq!(verdict, Ok(()), "clean fixture rejected"),
        }
        planted_cases += 1;
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 7 vertex classification: PASS ({classified} links, {planted_cases} 2-convexity fixtures, {elapsed:?})"
    );
}
