//! The line-oriented complex file format.
//!
//! A file carries an M_kappa complex (simplex, edge, and gluing records),
//! an optional hyperbolic polygon in Klein coordinates, and optional
//! marked geodesic chords. The format is diffable text with an explicit
//! version header; every diagnostic is anchored to its input line.

use std::fmt::Write as _;

use mkcat_core::complexcore::{FaceRef, Gluing, MetricSimplex, MkComplex};
use mkcat_core::crescent2d::{HPolygon, MarkedGeodesics};
use mkcat_core::{Curvature, ModelPoint};

pub const HEADER: &str = "mkcat-complex v1";

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexRec {
    pub id: String,
    pub verts: Vec<String>,
    pub edges: Vec<(String, String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlueRec {
    pub a_id: String,
    pub a_face: usize,
    pub b_id: String,
    pub b_face: usize,
    pub map: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexFile {
    pub curvature: Option<i32>,
    pub simplices: Vec<SimplexRec>,
    pub gluings: Vec<GlueRec>,
    pub polygon: Option<Vec<[f64; 2]>>,
    pub marks: Vec<[f64; 4]>,
}

#[derive(Debug, Clone)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, ParseError> {
    tok.parse::<f64>()
        .map_err(|_| err(line, format!("expected a number, got {tok:?}")))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| err(line, format!("expected an index, got {tok:?}")))
}

pub fn parse(text: &str) -> Result<ComplexFile, ParseError> {
    let mut doc = ComplexFile::default();
    let mut saw_header = false;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != HEADER {
                return Err(err(ln, format!("expected header {HEADER:?}, got {line:?}")));
            }
            saw_header = true;
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "curvature" => {
                if toks.len() != 2 {
                    return Err(err(ln, "usage: curvature <-1|0|1>"));
                }
                let k: i32 = toks[1]
                    .parse()
                    .map_err(|_| err(ln, format!("bad curvature {:?}", toks[1])))?;
                if doc.curvature.replace(k).is_some() {
                    return Err(err(ln, "duplicate curvature line"));
                }
            }
            "simplex" => {
                if !(4..=6).contains(&toks.len()) {
                    return Err(err(ln, "usage: simplex <id> <v1> <v2> [v3] [v4]"));
                }
                doc.simplices.push(SimplexRec {
                    id: toks[1].to_string(),
                    verts: toks[2..].iter().map(|s| s.to_string()).collect(),
                    edges: Vec::new(),
                });
            }
            "edge" => {
                if toks.len() != 5 {
                    return Err(err(ln, "usage: edge <simplex-id> <va> <vb> <length>"));
                }
                let len = parse_f64(toks[4], ln)?;
                let rec = doc
                    .simplices
                    .iter_mut()
                    .find(|s| s.id == toks[1])
                    .ok_or_else(|| err(ln, format!("edge references unknown simplex {:?}", toks[1])))?;
                rec.edges.push((toks[2].to_string(), toks[3].to_string(), len));
            }
            "glue" => {
                if toks.len() < 6 {
                    return Err(err(
                        ln,
                        "usage: glue <idA> <faceA> <idB> <faceB> <va>=<vb> ...",
                    ));
                }
                let mut map = Vec::new();
                for pair in &toks[5..] {
                    let (a, b) = pair
                        .split_once('=')
                        .ok_or_else(|| err(ln, format!("bad vertex pair {pair:?}")))?;
                    map.push((a.to_string(), b.to_string()));
                }
                doc.gluings.push(GlueRec {
                    a_id: toks[1].to_string(),
                    a_face: parse_usize(toks[2], ln)?,
                    b_id: toks[3].to_string(),
                    b_face: parse_usize(toks[4], ln)?,
                    map,
                });
            }
            "polygon" => {
                if toks.len() < 7 || toks.len() % 2 == 0 {
                    return Err(err(ln, "usage: polygon <x1> <y1> <x2> <y2> <x3> <y3> ..."));
                }
                let mut pts = Vec::new();
                for pair in toks[1..].chunks(2) {
                    pts.push([parse_f64(pair[0], ln)?, parse_f64(pair[1], ln)?]);
                }
                if doc.polygon.replace(pts).is_some() {
                    return Err(err(ln, "duplicate polygon line"));
                }
            }
            "mark" => {
                if toks.len() != 5 {
                    return Err(err(ln, "usage: mark <x1> <y1> <x2> <y2>"));
                }
                doc.marks.push([
                    parse_f64(toks[1], ln)?,
                    parse_f64(toks[2], ln)?,
                    parse_f64(toks[3], ln)?,
                    parse_f64(toks[4], ln)?,
                ]);
            }
            other => return Err(err(ln, format!("unknown record {other:?}"))),
        }
    }
    if !saw_header {
        return Err(err(1, format!("missing header {HEADER:?}")));
    }
    if !doc.simplices.is_empty() && doc.curvature.is_none() {
        return Err(err(1, "complex records require a curvature line"));
    }
    Ok(doc)
}

pub fn emit(doc: &ComplexFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    if let Some(k) = doc.curvature {
        let _ = writeln!(out, "curvature {k}");
    }
    for s in &doc.simplices {
        let _ = writeln!(out, "simplex {} {}", s.id, s.verts.join(" "));
        for (a, b, len) in &s.edges {
            let _ = writeln!(out, "edge {} {} {} {:?}", s.id, a, b, len);
        }
    }
    for g in &doc.gluings {
        let pairs: Vec<String> = g.map.iter().map(|(a, b)| format!("{a}={b}")).collect();
        let _ = writeln!(
            out,
            "glue {} {} {} {} {}",
            g.a_id,
            g.a_face,
            g.b_id,
            g.b_face,
            pairs.join(" ")
        );
    }
    if let Some(poly) = &doc.polygon {
        let coords: Vec<String> = poly
            .iter()
            .flat_map(|p| [format!("{:?}", p[0]), format!("{:?}", p[1])])
            .collect();
        let _ = writeln!(out, "polygon {}", coords.join(" "));
    }
    for m in &doc.marks {
        let _ = writeln!(out, "mark {:?} {:?} {:?} {:?}", m[0], m[1], m[2], m[3]);
    }
    out
}

impl ComplexFile {
    /// Build the metric complex, if the file carries one.
    pub fn to_complex(&self) -> mkcat_core::Result<Option<MkComplex>> {
        if self.simplices.is_empty() {
            return Ok(None);
        }
        let curvature = Curvature::from_kappa(self.curvature.unwrap_or(-1))?;
        let mut simplices = Vec::with_capacity(self.simplices.len());
        for rec in &self.simplices {
            simplices.push(MetricSimplex::new(
                rec.id.clone(),
                rec.verts.clone(),
                &rec.edges,
            )?);
        }
        let gluings = self
            .gluings
            .iter()
            .map(|g| Gluing {
                side_a: FaceRef { simplex: g.a_id.clone(), face: g.a_face },
                side_b: FaceRef { simplex: g.b_id.clone(), face: g.b_face },
                vertex_map: g.map.clone(),
            })
            .collect();
        Ok(Some(MkComplex::build(curvature, simplices, gluings)?))
    }

    pub fn to_polygon(&self) -> mkcat_core::Result<Option<HPolygon>> {
        match &self.polygon {
            None => Ok(None),
            Some(pts) => Ok(Some(HPolygon::from_klein(pts)?)),
        }
    }

    pub fn to_marks(&self) -> mkcat_core::Result<MarkedGeodesics> {
        let mut chords = Vec::new();
        for m in &self.marks {
            chords.push((
                ModelPoint::from_klein(&[m[0], m[1]])?,
                ModelPoint::from_klein(&[m[2], m[3]])?,
            ));
        }
        Ok(MarkedGeodesics::new(chords))
    }

    /// Serialize a built complex back into a document.
    pub fn from_complex(complex: &MkComplex) -> Self {
        let simplices = complex
            .simplices()
            .iter()
            .map(|s| SimplexRec {
                id: s.id.clone(),
                verts: s.vertices.clone(),
                edges: s
                    .edge_lengths()
                    .map(|((i, j), len)| (s.vertices[i].clone(), s.vertices[j].clone(), len))
                    .collect(),
            })
            .collect();
        let gluings = complex
            .gluings()
            .iter()
            .map(|g| GlueRec {
                a_id: g.side_a.simplex.clone(),
                a_face: g.side_a.face,
                b_id: g.side_b.simplex.clone(),
                b_face: g.side_b.face,
                map: g.vertex_map.clone(),
            })
            .collect();
        ComplexFile {
            curvature: Some(complex.curvature().kappa()),
            simplices,
            gluings,
            polygon: None,
            marks: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mkcat_core::fixtures;

    #[test]
    fn round_trip_is_identity_on_emitted_files() {
        let complex = fixtures::cone(7, 1.0).unwrap();
        let mut doc = ComplexFile::from_complex(&complex);
        doc.polygon = Some(vec![[0.0, 0.0], [0.3, 0.0], [0.3, 0.3], [0.15, 0.18], [0.0, 0.3]]);
        doc.marks.push([0.0, 0.1, 0.2, 0.1]);
        let text = emit(&doc);
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(emit(&parsed), text);
    }

    #[test]
    fn diagnostics_are_line_anchored() {
        let text = format!("{HEADER}\ncurvature -1\nsimplex T a b c\nedge U a b 1.0\n");
        let e = parse(&text).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("unknown simplex"));
    }

    #[test]
    fn header_is_mandatory() {
        assert!(parse("curvature -1\n").is_err());
        assert!(parse("").is_err());
    }
}
