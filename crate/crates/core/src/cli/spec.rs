//! Instance spec files: JSON with every scalar written as text in the
//! `rat [± rat*sqrt(d)]` grammar, so no value ever passes through a float.
//!
//! ```json
//! {
//!   "field_d": 5,
//!   "map": {"pieces": [{"lo": "0", "hi": "3/2-1/2*sqrt(5)", "slope": 1, "intercept": "-1/2+1/2*sqrt(5)"}, ...]},
//!   "subdivision": {"classes": {"A": [{"lo": "0", "hi": "1", "lo_in": true, "hi_in": false}]}},
//!   "x0": "0",
//!   "length": 10000
//! }
//! ```
//!
//! A map may instead be given as an exchange:
//! `{"lengths": ["1/4", "3/4"], "permutation": [1, 0]}`.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::boundary::Span;
use crate::exactnum::{ExactScalar, ScalarError};
use crate::intervalmap::{AffinePiece, HalfOpenInterval, Iet, PiecewiseMap, Slope};
use crate::subdivision::{GluingMap, Letter, Subdivision};

use super::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    field_d: u32,
    map: RawMap,
    subdivision: RawSubdivision,
    #[serde(default)]
    x0: Option<String>,
    #[serde(default)]
    length: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawMap {
    Pieces { pieces: Vec<RawPiece> },
    Iet { lengths: Vec<String>, permutation: Vec<usize> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    lo: String,
    hi: String,
    slope: i64,
    intercept: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubdivision {
    classes: Map<String, Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpan {
    lo: String,
    hi: String,
    #[serde(default = "yes")]
    lo_in: bool,
    #[serde(default)]
    hi_in: bool,
}

fn yes() -> bool {
    true
}

/// A fully parsed and validated instance.
#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub field_d: u32,
    pub map: PiecewiseMap,
    /// Present when the spec gave the map as an exchange.
    pub iet: Option<Iet>,
    pub subdivision: Subdivision,
    pub x0: ExactScalar,
    pub length: Option<usize>,
}

fn at(path: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Parse { path: path.to_string(), message: err.to_string() }
}

/// Parses scalar text in field context `d`.
pub fn parse_scalar(text: &str, d: u32) -> Result<ExactScalar, ScalarError> {
    ExactScalar::parse(text, d)
}

fn scalar(text: &str, d: u32, path: &str) -> Result<ExactScalar, CliError> {
    parse_scalar(text, d).map_err(|e| at(path, e))
}

/// Escapes a key for use in a JSON pointer.
fn key(k: &str) -> String {
    k.replace('~', "~0").replace('/', "~1")
}

fn pointer(base: &str, path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = base.to_string();
    for segment in path.iter() {
        match segment {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key: k } => out.push_str(&format!("/{}", key(k))),
            Segment::Enum { variant } => out.push_str(&format!("/{}", key(variant))),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

pub fn parse_spec(document: &str) -> Result<InstanceSpec, CliError> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let raw: RawSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = pointer("", e.path());
        at(&path, e.into_inner())
    })?;

    let d = raw.field_d;
    if !crate::exactnum::is_squarefree(d) {
        return Err(at("/field_d", ScalarError::NonSquarefreeRadicand(d)));
    }

    let (map, iet) = match raw.map {
        RawMap::Pieces { pieces } => {
            let mut out = Vec::with_capacity(pieces.len());
            for (i, p) in pieces.iter().enumerate() {
                let base = format!("/map/pieces/{i}");
                let lo = scalar(&p.lo, d, &format!("{base}/lo"))?;
                let hi = scalar(&p.hi, d, &format!("{base}/hi"))?;
                let intercept = scalar(&p.intercept, d, &format!("{base}/intercept"))?;
                let slope = Slope::from_int(p.slope)
                    .ok_or_else(|| at(&format!("{base}/slope"), format!("slope must be 1 or -1, got {}", p.slope)))?;
                let domain = HalfOpenInterval::new(lo, hi).map_err(|e| at(&base, e))?;
                out.push(AffinePiece::new(domain, slope, intercept).map_err(|e| at(&base, e))?);
            }
            (PiecewiseMap::validated(out).map_err(|e| at("/map", e))?, None)
        }
        RawMap::Iet { lengths, permutation } => {
            let lengths = lengths
                .iter()
                .enumerate()
                .map(|(i, t)| scalar(t, d, &format!("/map/lengths/{i}")))
                .collect::<Result<Vec<_>, _>>()?;
            let iet = Iet::new(lengths, permutation).map_err(|e| at("/map", e))?;
            (iet.to_map(), Some(iet))
        }
    };

    let mut classes = Vec::with_capacity(raw.subdivision.classes.len());
    for (name, spans) in &raw.subdivision.classes {
        let base = format!("/subdivision/classes/{}", key(name));
        let letter = Letter::new(name).map_err(|e| at(&base, e))?;
        let spans: Vec<RawSpan> = serde_path_to_error::deserialize(spans.clone()).map_err(|e| {
            let path = pointer(&base, e.path());
            at(&path, e.into_inner())
        })?;
        let mut parsed = Vec::with_capacity(spans.len());
        for (i, s) in spans.iter().enumerate() {
            let path = format!("{base}/{i}");
            let lo = scalar(&s.lo, d, &format!("{path}/lo"))?;
            let hi = scalar(&s.hi, d, &format!("{path}/hi"))?;
            parsed.push(Span::new(lo, s.lo_in, hi, s.hi_in).map_err(|e| at(&path, e))?);
        }
        classes.push((letter, parsed));
    }
    let subdivision = Subdivision::canonicalize(classes).map_err(|e| at("/subdivision", e))?;

    let x0 = match &raw.x0 {
        Some(t) => scalar(t, d, "/x0")?,
        None => ExactScalar::zero(d).map_err(|e| at("/field_d", e))?,
    };
    map.locate(&x0).map_err(|e| at("/x0", e))?;

    Ok(InstanceSpec { field_d: d, map, iet, subdivision, x0, length: raw.length })
}

pub fn subdivision_json(sub: &Subdivision) -> Value {
    let classes: Map<String, Value> = sub
        .classes()
        .map(|(letter, set)| {
            let spans: Vec<Value> = set
                .components()
                .iter()
                .map(|s| {
                    json!({
                        "lo": s.lo.to_string(),
                        "hi": s.hi.to_string(),
                        "lo_in": s.lo_in,
                        "hi_in": s.hi_in,
                    })
                })
                .collect();
            (letter.to_string(), Value::Array(spans))
        })
        .collect();
    json!({ "classes": classes })
}

pub fn gluing_json(gluing: &GluingMap) -> Value {
    Value::Object(
        gluing
            .pairs()
            .iter()
            .map(|(from, to)| (from.to_string(), Value::String(to.to_string())))
            .collect(),
    )
}

pub fn iet_json(iet: &Iet) -> Value {
    let lengths: Vec<String> = iet.lengths().iter().map(ToString::to_string).collect();
    json!({ "lengths": lengths, "permutation": iet.permutation() })
}

pub fn map_json(map: &PiecewiseMap) -> Value {
    let pieces: Vec<Value> = map
        .pieces()
        .iter()
        .map(|p| {
            json!({
                "lo": p.domain.lo().to_string(),
                "hi": p.domain.hi().to_string(),
                "slope": p.slope.as_int(),
                "intercept": p.intercept.to_string(),
            })
        })
        .collect();
    json!({ "pieces": pieces })
}
