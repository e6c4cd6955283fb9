//! Problem files.
//!
//! A problem file is a JSON object:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "name": "switching",
//!   "problem": { "class": "mpsc", "n": 2, "f": "x1^2 + x2^2", "G": ["x1"], "H": ["x2"] },
//!   "points": { "origin": ["0", "0"] }
//! }
//! ```
//!
//! `class` is one of `nlp`, `mpcc`, `mpvc`, `ccmp`, `mpsc` (with `g`, `h`,
//! `G`, `H`, `kappa`) or `mpdc` for a raw problem given by `F` and a list of
//! `branches`, each with matrices `A`, `C` and right-hand sides `b`, `d`.
//! Numbers are integers or strings such as `"-3/4"`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use discone_core::analysis::MpdcProblem;
use discone_core::disjunctive::DisjunctiveSet;
use discone_core::exactla::{fmt_rat, parse_rat, Rat, RatMat};
use discone_core::expr::{parse, Expr};
use discone_core::frontends::{branch_labels, encode, ClassProblem, ProblemClass};
use discone_core::polycone::Polyhedron;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// An exact rational read from an integer or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatLit(pub Rat);

impl Serialize for RatLit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(&self.0))
    }
}

struct RatVisitor;

impl Visitor<'_> for RatVisitor {
    type Value = RatLit;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a rational string like \"-3/4\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<RatLit, E> {
        Ok(RatLit(Rat::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<RatLit, E> {
        Ok(RatLit(Rat::from_integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<RatLit, E> {
        Err(E::custom(format!(
            "floating-point literal {v} is not allowed; write it as a string like \"3/2\""
        )))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<RatLit, E> {
        parse_rat(v)
            .map(RatLit)
            .ok_or_else(|| E::custom(format!("\"{v}\" is not a rational number")))
    }
}

impl<'de> Deserialize<'de> for RatLit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(RatVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<RatLit>>,
    #[serde(default)]
    pub b: Vec<RatLit>,
    #[serde(rename = "C", default)]
    pub c: Vec<Vec<RatLit>>,
    #[serde(default)]
    pub d: Vec<RatLit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub class: String,
    pub n: usize,
    pub f: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub g: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub h: Vec<String>,
    #[serde(rename = "G", default, skip_serializing_if = "Vec::is_empty")]
    pub big_g: Vec<String>,
    #[serde(rename = "H", default, skip_serializing_if = "Vec::is_empty")]
    pub big_h: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(rename = "F", default, skip_serializing_if = "Vec::is_empty")]
    pub map: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<BranchSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub format_version: u32,
    #[serde(default)]
    pub name: String,
    pub problem: ProblemSection,
    #[serde(default)]
    pub points: BTreeMap<String, Vec<RatLit>>,
}

impl ProblemDocument {
    /// Compact JSON with every rational in canonical form.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("documents always serialize")
    }

    /// SHA-256 of [`Self::canonical_json`], hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

/// A validated document together with the problem it describes.
#[derive(Clone, Debug)]
pub struct LoadedProblem {
    pub document: ProblemDocument,
    pub class: Option<ClassProblem>,
    pub problem: MpdcProblem,
    pub branch_labels: Vec<String>,
    pub component_names: Vec<String>,
}

impl LoadedProblem {
    pub fn point(&self, name: &str) -> Result<Vec<Rat>, CliError> {
        self.document
            .points
            .get(name)
            .map(|v| v.iter().map(|r| r.0.clone()).collect())
            .ok_or_else(|| CliError::UnknownPoint {
                name: name.to_string(),
                available: self.document.points.keys().cloned().collect(),
            })
    }
}

/// 1-based line and column of byte offset `at`.
fn line_col(src: &str, at: usize) -> (usize, usize) {
    let before = &src[..at.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

/// Position of the first `needle` after the first `anchor`.
fn locate_after(src: &str, anchor: &str, needle: &str) -> (usize, usize) {
    let start = src.find(anchor).unwrap_or(0);
    let at = src[start..].find(needle).map_or(start, |i| start + i);
    line_col(src, at)
}

fn locate(src: &str, needle: &str) -> (usize, usize) {
    locate_after(src, "\"problem\"", needle)
}

fn schema_at((line, column): (usize, usize), message: impl Into<String>) -> CliError {
    CliError::Schema {
        line,
        column,
        message: message.into(),
    }
}

fn schema(src: &str, needle: &str, message: impl Into<String>) -> CliError {
    schema_at(locate(src, needle), message)
}

fn expression(src: &str, field: &str, text: &str, n: usize) -> Result<Expr, CliError> {
    parse(text, n).map_err(|e| {
        let literal = serde_json::to_string(text).expect("strings serialize");
        let (line, column) = locate(src, &literal);
        match e {
            discone_core::Error::Syntax { column: c, message } => CliError::Schema {
                line,
                // one for the opening quote
                column: column + c,
                message: format!("in {field}: {message}"),
            },
            other => CliError::Schema {
                line,
                column,
                message: format!("in {field}: {other}"),
            },
        }
    })
}

fn expressions(src: &str, field: &str, texts: &[String], n: usize) -> Result<Vec<Expr>, CliError> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| expression(src, &format!("{field}[{}]", i + 1), t, n))
        .collect()
}

fn rats(v: &[RatLit]) -> Vec<Rat> {
    v.iter().map(|r| r.0.clone()).collect()
}

fn matrix(src: &str, what: &str, rows: &[Vec<RatLit>], cols: usize) -> Result<RatMat, CliError> {
    let rows: Vec<Vec<Rat>> = rows.iter().map(|r| rats(r)).collect();
    RatMat::try_from_rows(cols, &rows).map_err(|e| schema(src, what, e.to_string()))
}

fn raw_problem(src: &str, p: &ProblemSection, f: Expr) -> Result<(MpdcProblem, Vec<String>), CliError> {
    let n = p.n;
    let map = expressions(src, "F", &p.map, n)?;
    let m = map.len();
    if let Some(declared) = p.m {
        if declared != m {
            return Err(schema(src, "\"m\"", format!("m = {declared} but F has {m} components")));
        }
    }
    if p.branches.is_empty() {
        return Err(schema(src, "\"branches\"", "an mpdc problem needs at least one branch"));
    }
    let mut branches = Vec::new();
    for (i, b) in p.branches.iter().enumerate() {
        let ctx = |s: &str| format!("branch {}: {s}", i + 1);
        let a = matrix(src, "\"A\"", &b.a, m).map_err(|e| relabel(e, &ctx("A")))?;
        let c = matrix(src, "\"C\"", &b.c, m).map_err(|e| relabel(e, &ctx("C")))?;
        let poly = Polyhedron::new(m, a, rats(&b.b), c, rats(&b.d))
            .map_err(|e| schema(src, "\"branches\"", ctx(&e.to_string())))?;
        branches.push(poly);
    }
    let labels = (1..=branches.len()).map(|i| format!("branch {i}")).collect();
    let set = DisjunctiveSet::new(m, branches).map_err(|e| schema(src, "\"branches\"", e.to_string()))?;
    let problem = MpdcProblem::new(n, f, map, set).map_err(|e| schema(src, "\"F\"", e.to_string()))?;
    Ok((problem, labels))
}

fn relabel(e: CliError, prefix: &str) -> CliError {
    match e {
        CliError::Schema { line, column, message } => CliError::Schema {
            line,
            column,
            message: format!("{prefix}: {message}"),
        },
        other => other,
    }
}

fn class_problem(src: &str, class: ProblemClass, p: &ProblemSection, f: Expr) -> Result<ClassProblem, CliError> {
    if !p.map.is_empty() || !p.branches.is_empty() || p.m.is_some() {
        return Err(schema(
            src,
            "\"class\"",
            format!("{} problems take no F, m or branches", class.tag()),
        ));
    }
    let n = p.n;
    let g = expressions(src, "g", &p.g, n)?;
    let h = expressions(src, "h", &p.h, n)?;
    let big_g = expressions(src, "G", &p.big_g, n)?;
    let big_h = expressions(src, "H", &p.big_h, n)?;
    ClassProblem::new(class, n, f, g, h, big_g, big_h, p.kappa).map_err(|e| {
        let needle = if p.kappa.is_some() && class == ProblemClass::Ccmp {
            "\"kappa\""
        } else {
            "\"class\""
        };
        schema(src, needle, e.to_string())
    })
}

/// Parses and validates a problem document held in memory.
pub fn load_problem_str(src: &str) -> Result<LoadedProblem, CliError> {
    let document: ProblemDocument = serde_json::from_str(src).map_err(|e| CliError::Schema {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
    })?;
    if document.format_version != FORMAT_VERSION {
        return Err(schema_at(
            locate_after(src, "", "\"format_version\""),
            format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                document.format_version
            ),
        ));
    }
    let p = &document.problem;
    if p.n == 0 {
        return Err(schema(src, "\"n\"", "n must be at least 1"));
    }
    let f = expression(src, "f", &p.f, p.n)?;
    let (class, problem, branch_labels, component_names) = if p.class == "mpdc" {
        let (problem, labels) = raw_problem(src, p, f)?;
        let names = (1..=problem.m()).map(|k| format!("F{k}")).collect();
        (None, problem, labels, names)
    } else {
        let tag = ProblemClass::from_tag(&p.class).ok_or_else(|| {
            schema(
                src,
                "\"class\"",
                format!(
                    "unknown class \"{}\" (expected nlp, mpcc, mpvc, ccmp, mpsc or mpdc)",
                    p.class
                ),
            )
        })?;
        let cp = class_problem(src, tag, p, f)?;
        let problem = encode(&cp).map_err(|e| schema(src, "\"class\"", e.to_string()))?;
        let labels = branch_labels(&cp);
        let names = cp.component_names();
        (Some(cp), problem, labels, names)
    };
    for (name, x) in &document.points {
        if x.len() != p.n {
            return Err(schema_at(
                locate_after(src, "\"points\"", &format!("\"{name}\"")),
                format!("point \"{name}\" has {} coordinates, expected {}", x.len(), p.n),
            ));
        }
    }
    Ok(LoadedProblem {
        document,
        class,
        problem,
        branch_labels,
        component_names,
    })
}

/// Reads and validates a problem file.
pub fn load_problem(path: &Path) -> Result<LoadedProblem, CliError> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_problem_str(&src).map_err(|e| e.in_file(path))
}
