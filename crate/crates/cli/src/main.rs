//! mkcat: batch front end for the complex/polygon toolkit.
//!
//! Exit codes: 0 success, 1 a validation or check failed, 2 usage,
//! parse, or I/O errors.

mod format;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mkcat_core::complexcore::MkComplex;
use mkcat_core::crescent2d;
use mkcat_core::geodesy::{self, ComplexPath, SingularSurface, TightenOutcome, Waypoint};
use mkcat_core::vertexclass::{
    classify_vertex, two_convexity_decision, SphericalPolygon, VertexKind,
};
use mkcat_core::{catcheck, fixtures, hypgeom, Curvature, Error};

use format::ComplexFile;
use report::{Format, Report};

const CAT_PASS: f64 = 1e-7;
const GB_PASS: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "mkcat", version, about = "Constant-curvature complex toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Fmt::Human)]
    format: Fmt,
    /// Write the report (or generated file) here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fmt {
    Human,
    Machine,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a file and validate its complex and polygon sections
    Validate { file: PathBuf },
    /// Run curvature and convexity checks
    Check {
        file: PathBuf,
        /// Comma-separated subset of link,cat,convexity,slim,classify,two-convex
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Shortest geodesic between two points, or a tightened closed loop
    Geodesic {
        file: PathBuf,
        /// Endpoint as <simplex-id>:<b0>,<b1>,...
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        /// Closed loop as a semicolon-separated waypoint list
        #[arg(long = "loop")]
        loop_spec: Option<String>,
    },
    /// Gauss-Bonnet residual of a singular surface
    GbAudit { file: PathBuf },
    /// Iterated crescent moves to the 2-convex hull of the polygon section
    CrescentHull {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
    },
    /// Emit a corpus fixture file
    Gen {
        /// cone | cylinder | torus | notched-polygon | spiral-polygon
        kind: String,
        #[arg(long, default_value_t = 7)]
        triangles: usize,
        #[arg(long, default_value_t = 1.0)]
        side: f64,
        #[arg(long, default_value_t = 6)]
        segments: usize,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, default_value_t = 2.0)]
        height: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Path) -> Result<(Vec<u8>, ComplexFile), String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| format!("{}: not valid UTF-8", path.display()))?;
    let doc = format::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((bytes, doc))
}

fn write_out(cli: &Cli, content: &str) -> Result<(), String> {
    match &cli.output {
        Some(path) => {
            std::fs::write(path, content).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn finish(cli: &Cli, mut rep: Report, started: std::time::Instant) -> Result<u8, String> {
    rep.elapsed_ms = started.elapsed().as_millis();
    let fmt = match cli.format {
        Fmt::Human => Format::Human,
        Fmt::Machine => Format::Machine,
    };
    let failed = rep.failed;
    write_out(cli, &rep.render(fmt))?;
    Ok(if failed { 1 } else { 0 })
}

fn run(cli: &Cli) -> Result<u8, String> {
    let started = std::time::Instant::now();
    match &cli.cmd {
        Cmd::Validate { file } => {
            let (bytes, doc) = read_input(file)?;
            let mut rep = Report::new("validate", &bytes);
            match doc.to_complex() {
                Ok(Some(complex)) => {
                    rep.push(format!("simplices {}", complex.simplices().len()));
                    rep.push(format!("gluings {}", complex.gluings().len()));
                    rep.push(format!("vertex-classes {}", complex.vertex_class_count()));
                }
                Ok(None) => {}
                Err(Error::InvalidComplex(violations)) => {
                    for v in violations {
                        rep.fail(format!("invalid {v}"));
                    }
                }
                Err(e) => rep.fail(format!("invalid {e}")),
            }
            match doc.to_polygon() {
                Ok(Some(poly)) => rep.push(format!("polygon-vertices {}", poly.len())),
                Ok(None) => {}
                Err(e) => rep.fail(format!("invalid polygon: {e}")),
            }
            if let Err(e) = doc.to_marks() {
                rep.fail(format!("invalid mark: {e}"));
            }
            if doc.simplices.is_empty() && doc.polygon.is_none() {
                rep.fail("invalid file carries neither a complex nor a polygon");
            }
            finish(cli, rep, started)
        }
        Cmd::Check { file, checks, samples, seed } => {
            let (bytes, doc) = read_input(file)?;
            let mut rep = Report::new("check", &bytes);
            rep.seed = Some(*seed);
            let complex = doc
                .to_complex()
                .map_err(|e| e.to_string())?
                .ok_or("check needs a complex section")?;
            let selected: Vec<&str> = if checks.is_empty() {
                vec!["link"]
            } else {
                checks.iter().map(|s| s.as_str()).collect()
            };
            for name in &selected {
                if !["link", "cat", "convexity", "slim", "classify", "two-convex"]
                    .contains(name)
                {
                    return Err(format!("unknown check name {name:?}"));
                }
            }
            for name in selected {
                run_check(&mut rep, &complex, name, *samples, *seed)
                    .map_err(|e| e.to_string())?;
            }
            finish(cli, rep, started)
        }
        Cmd::Geodesic { file, from, to, loop_spec } => {
            let (bytes, doc) = read_input(file)?;
            let mut rep = Report::new("geodesic", &bytes);
            let complex = doc
                .to_complex()
                .map_err(|e| e.to_string())?
                .ok_or("geodesic needs a complex section")?;
            match (from, to, loop_spec) {
                (Some(f), Some(t), None) => {
                    let a = parse_waypoint(&complex, f)?;
                    let b = parse_waypoint(&complex, t)?;
                    let path =
                        geodesy::shortest_geodesic(&complex, &a, &b).map_err(|e| e.to_string())?;
                    emit_path(&mut rep, &complex, &path)?;
                }
                (None, None, Some(spec)) => {
                    let mut wps = Vec::new();
                    for part in spec.split(';') {
                        wps.push(parse_waypoint(&complex, part)?);
                    }
                    let loop_path =
                        ComplexPath::new(&complex, wps).map_err(|e| e.to_string())?;
                    match geodesy::tighten_closed(&complex, &loop_path, 200, 1e-10)
                        .map_err(|e| e.to_string())?
                    {
                        TightenOutcome::Geodesic(p) => {
                            rep.push("outcome geodesic");
                            emit_path(&mut rep, &complex, &p)?;
                        }
                        TightenOutcome::Contracted(_) => rep.push("outcome contracted"),
                    }
                }
                _ => return Err("use either --from/--to or --loop".into()),
            }
            finish(cli, rep, started)
        }
        Cmd::GbAudit { file } => {
            let (bytes, doc) = read_input(file)?;
            let mut rep = Report::new("gb-audit", &bytes);
            let complex = doc
                .to_complex()
                .map_err(|e| e.to_string())?
                .ok_or("gb-audit needs a complex section")?;
            let surface = SingularSurface::new(complex).map_err(|e| e.to_string())?;
            let residual = geodesy::gauss_bonnet_audit(&surface).map_err(|e| e.to_string())?;
            rep.push(format!("area {:?}", surface.area().map_err(|e| e.to_string())?));
            rep.push(format!(
                "euler-characteristic {}",
                surface.euler_characteristic().map_err(|e| e.to_string())?
            ));
            if residual.abs() <= GB_PASS {
                rep.push(format!("residual {residual:?}"));
            } else {
                rep.fail(format!("residual {residual:?} exceeds {GB_PASS:?}"));
            }
            finish(cli, rep, started)
        }
        Cmd::CrescentHull { file, epsilon } => {
            let (bytes, doc) = read_input(file)?;
            let mut rep = Report::new("crescent-hull", &bytes);
            let poly = doc
                .to_polygon()
                .map_err(|e| e.to_string())?
                .ok_or("crescent-hull needs a polygon section")?;
            let marks = doc.to_marks().map_err(|e| e.to_string())?;
            let crescents = crescent2d::find_crescents(&poly).map_err(|e| e.to_string())?;
            rep.push(format!("crescents {}", crescents.len()));
            for c in &crescents {
                rep.push(format!(
                    "crescent chord {} {} level {} folding {} size {:?}",
                    c.chord.0, c.chord.1, c.level, c.folding_number, c.size
                ));
            }
            match crescent2d::two_convex_hull(&poly, &marks, *epsilon) {
                Ok(trace) => {
                    for (i, f) in trace.folding_trace.iter().enumerate() {
                        rep.push(format!("iteration {i} max-folding {f}"));
                    }
                    rep.push(format!("moves {}", trace.moves));
                    rep.push(format!("hull-vertices {}", trace.polygon.len()));
                    let coords: Vec<String> = trace
                        .polygon
                        .klein_coords()
                        .iter()
                        .flat_map(|p| [format!("{:?}", p[0]), format!("{:?}", p[1])])
                        .collect();
                    rep.push(format!("hull {}", coords.join(" ")));
                }
                Err(Error::IncompressibilityViolation { index, crescent }) => {
                    rep.fail(format!(
                        "incompressibility-violation mark {index} crescent {crescent}"
                    ));
                }
                Err(e) => return Err(e.to_string()),
            }
            finish(cli, rep, started)
        }
        Cmd::Gen { kind, triangles, side, segments, width, height } => {
            let doc = generate(kind, *triangles, *side, *segments, *width, *height)?;
            write_out(cli, &format::emit(&doc))?;
            Ok(0)
        }
    }
}

fn parse_waypoint(complex: &MkComplex, spec: &str) -> Result<Waypoint, String> {
    let (id, coords) = spec
        .split_once(':')
        .ok_or_else(|| format!("waypoint {spec:?}: expected <simplex-id>:<b0>,<b1>,..."))?;
    let s = complex
        .simplex_index(id)
        .ok_or_else(|| format!("waypoint {spec:?}: unknown simplex {id:?}"))?;
    let bary: Result<Vec<f64>, _> = coords.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let mut bary = bary.map_err(|_| format!("waypoint {spec:?}: bad coordinates"))?;
    let sum: f64 = bary.iter().sum();
    if sum <= 0.0 {
        return Err(format!("waypoint {spec:?}: coordinates sum to {sum}"));
    }
    for b in &mut bary {
        *b /= sum;
    }
    Ok(Waypoint::new(s, bary))
}

fn emit_path(rep: &mut Report, complex: &MkComplex, path: &ComplexPath) -> Result<(), String> {
    let len = path.length(complex).map_err(|e| e.to_string())?;
    rep.push(format!("length {len:?}"));
    for wp in &path.waypoints {
        let coords: Vec<String> = wp.bary.iter().map(|b| format!("{b:?}")).collect();
        rep.push(format!(
            "waypoint {}:{}",
            complex.simplices()[wp.simplex].id,
            coords.join(",")
        ));
    }
    Ok(())
}

fn random_waypoint(complex: &MkComplex, rng: &mut ChaCha8Rng) -> Waypoint {
    let s = rng.gen_range(0..complex.simplices().len());
    let n = complex.simplices()[s].dim() + 1;
    let mut bary: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = bary.iter().sum();
    for b in &mut bary {
        *b /= sum;
    }
    Waypoint::new(s, bary)
}

fn geodesy_ready(complex: &MkComplex) -> Option<&'static str> {
    if !complex.is_pure(2) {
        return Some("needs a pure 2-complex");
    }
    if complex.curvature() == Curvature::Spherical {
        return Some("needs nonpositive curvature");
    }
    None
}

fn run_check(
    rep: &mut Report,
    complex: &MkComplex,
    name: &str,
    samples: usize,
    seed: u64,
) -> mkcat_core::Result<()> {
    match name {
        "link" => match catcheck::link_condition(complex)? {
            None => rep.push("check link pass"),
            Some(v) => rep.fail(format!(
                "check link fail witness {} magnitude {:?}",
                v.witness, v.magnitude
            )),
        },
        "cat" => {
            if let Some(reason) = geodesy_ready(complex) {
                rep.push(format!("check cat skip {reason}"));
                return Ok(());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = 0.0f64;
            for tri in 0..3 {
                let a = random_waypoint(complex, &mut rng);
                let b = random_waypoint(complex, &mut rng);
                let c = random_waypoint(complex, &mut rng);
                let sides = [
                    geodesy::shortest_geodesic(complex, &a, &b)?,
                    geodesy::shortest_geodesic(complex, &b, &c)?,
                    geodesy::shortest_geodesic(complex, &c, &a)?,
                ];
                let v = catcheck::cat_inequality_sample(
                    complex,
                    &sides,
                    samples,
                    seed.wrapping_add(tri),
                )?;
                worst = worst.max(v);
            }
            if worst <= CAT_PASS {
                rep.push(format!("check cat pass max {worst:?}"));
            } else {
                rep.fail(format!("check cat fail max {worst:?}"));
            }
        }
        "convexity" => {
            if let Some(reason) = geodesy_ready(complex) {
                rep.push(format!("check convexity skip {reason}"));
                return Ok(());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0);
            let a = random_waypoint(complex, &mut rng);
            let b = random_waypoint(complex, &mut rng);
            let c = random_waypoint(complex, &mut rng);
            let d = random_waypoint(complex, &mut rng);
            let g1 = geodesy::shortest_geodesic(complex, &a, &b)?;
            let g2 = geodesy::shortest_geodesic(complex, &c, &d)?;
            let v = catcheck::convexity_check(complex, &g1, &g2, samples.clamp(2, 512))?;
            if v <= CAT_PASS {
                rep.push(format!("check convexity pass max {v:?}"));
            } else {
                rep.fail(format!("check convexity fail max {v:?}"));
            }
        }
        "slim" => {
            if let Some(reason) = geodesy_ready(complex) {
                rep.push(format!("check slim skip {reason}"));
                return Ok(());
            }
            let delta = catcheck::slimness_estimate(complex, samples.clamp(1, 24), seed ^ 0x51)?;
            rep.push(format!("check slim pass delta {delta:?}"));
        }
        "classify" | "two-convex" => {
            let links = corner_links(complex)?;
            if links.is_empty() {
                rep.push(format!("check {name} skip no single-simplex 3-corner links"));
                return Ok(());
            }
            if name == "classify" {
                let mut concave = 0usize;
                for (v, (poly, orientation)) in &links {
                    let class = classify_vertex(poly, *orientation)?;
                    let kind = match class.kind {
                        VertexKind::Convex => "convex",
                        VertexKind::Concave => "concave",
                        VertexKind::SVertex => "s-vertex",
                        VertexKind::StrictSVertex => "strict-s-vertex",
                    };
                    rep.push(format!(
                        "vertex {} {kind} h-vertex {}",
                        complex.vertex_class_name(*v),
                        class.h_vertex
                    ));
                    if class.kind == VertexKind::Concave {
                        concave += 1;
                    }
                }
                if concave == 0 {
                    rep.push("check classify pass");
                } else {
                    rep.fail(format!("check classify fail concave {concave}"));
                }
            } else {
                let pairs: Vec<_> = links.iter().map(|(_, l)| l.clone()).collect();
                match two_convexity_decision(&pairs)? {
                    Ok(()) => rep.push("check two-convex pass"),
                    Err(i) => rep.fail(format!(
                        "check two-convex fail vertex {}",
                        complex.vertex_class_name(links[i].0)
                    )),
                }
            }
        }
        _ => unreachable!("check names validated by the caller"),
    }
    Ok(())
}

/// Corner links of vertex classes supported by a single 3-simplex: the
/// three unit tangents toward the opposite vertices, expressed in an
/// orthonormal frame of the corner's tangent space. Orientation is the
/// mean link direction (the material side).
#[allow(clippy::type_complexity)]
fn corner_links(
    complex: &MkComplex,
) -> mkcat_core::Result<Vec<(usize, (SphericalPolygon, Option<[f64; 3]>))>> {
    let mut out = Vec::new();
    for v in 0..complex.vertex_class_count() {
        let members = complex.vertex_class_members(v);
        if members.len() != 1 {
            continue;
        }
        let (s, local) = members[0];
        let simplex = &complex.simplices()[s];
        if simplex.dim() != 3 {
            continue;
        }
        // the three unit tangents at the corner, pairwise separated by the
        // face angles at the corner; realized directly on S^2
        let others: Vec<usize> = (0..4).filter(|&u| u != local).collect();
        let angle = |u: usize, w: usize| -> mkcat_core::Result<f64> {
            let sides = hypgeom::TriangleSides::new(
                simplex.length(u, w),
                simplex.length(local, u),
                simplex.length(local, w),
                complex.curvature(),
            )?;
            Ok(hypgeom::triangle_angles_from_sides(&sides)?.0)
        };
        let g_ab = angle(others[0], others[1])?;
        let g_ac = angle(others[0], others[2])?;
        let g_bc = angle(others[1], others[2])?;
        let d_a = [0.0, 0.0, 1.0];
        let d_b = [g_ab.sin(), 0.0, g_ab.cos()];
        // d_c from its angular distances to d_a and d_b
        let z = g_ac.cos();
        let x = if g_ab.sin().abs() < 1e-12 {
            continue;
        } else {
            (g_bc.cos() - g_ab.cos() * z) / g_ab.sin()
        };
        let y2 = 1.0 - z * z - x * x;
        if y2 <= 1e-14 {
            continue; // flat or unrealizable corner; validation flags it
        }
        let d_c = [x, y2.sqrt(), z];
        let poly = SphericalPolygon::from_directions(&[d_a, d_b, d_c])?;
        let mut mean = [0.0f64; 3];
        for d in poly.vertices() {
            for (m, c) in mean.iter_mut().zip(d) {
                *m += c;
            }
        }
        out.push((v, (poly, Some(mean))));
    }
    Ok(out)
}

fn generate(
    kind: &str,
    triangles: usize,
    side: f64,
    segments: usize,
    width: f64,
    height: f64,
) -> Result<ComplexFile, String> {
    let scale = 0.03;
    match kind {
        "cone" => {
            let c = fixtures::cone(triangles, side).map_err(|e| e.to_string())?;
            Ok(ComplexFile::from_complex(&c))
        }
        "cylinder" => {
            let c = fixtures::cylinder(segments, width, height).map_err(|e| e.to_string())?;
            Ok(ComplexFile::from_complex(&c))
        }
        "torus" => {
            let c = fixtures::torus7(side).map_err(|e| e.to_string())?;
            Ok(ComplexFile::from_complex(&c))
        }
        "notched-polygon" => Ok(ComplexFile {
            polygon: Some(
                [[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [5.0, 6.0], [0.0, 10.0]]
                    .iter()
                    .map(|p| [p[0] * scale, p[1] * scale])
                    .collect(),
            ),
            ..ComplexFile::default()
        }),
        "spiral-polygon" => Ok(ComplexFile {
            polygon: Some(
                [
                    [0.0, 0.0],
                    [20.0, 0.0],
                    [20.0, 16.0],
                    [13.0, 16.0],
                    [13.0, 4.0],
                    [10.0, 4.0],
                    [10.0, 12.0],
                    [8.0, 12.0],
                    [8.0, 4.0],
                    [5.0, 4.0],
                    [5.0, 16.0],
                    [0.0, 16.0],
                ]
                .iter()
                .map(|p| [p[0] * scale, p[1] * scale])
                .collect(),
            ),
            ..ComplexFile::default()
        }),
        other => Err(format!(
            "unknown kind {other:?}: expected cone, cylinder, torus, notched-polygon, or spiral-polygon"
        )),
    }
}
