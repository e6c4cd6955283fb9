//! Report structure and its text rendering.
//!
//! Exact values are stored as strings in canonical rational form, so the JSON
//! mirror is lossless. Reports carry no timings, host data or thread counts.

use std::fmt::Write as _;

use discone_core::exactla::{fmt_rat, Rat};
use serde::{Deserialize, Serialize};

use crate::document::ProblemDocument;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

impl Status {
    pub fn word(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Inconclusive => "inconclusive",
        }
    }
}

pub fn rat(r: &Rat) -> String {
    fmt_rat(r)
}

pub fn rats(v: &[Rat]) -> Vec<String> {
    v.iter().map(fmt_rat).collect()
}

pub fn rat_rows(v: &[Vec<Rat>]) -> Vec<Vec<String>> {
    v.iter().map(|r| rats(r)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    pub mode: String,
    pub grid_radius: String,
    pub grid_points: usize,
    pub max_generators: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRef {
    pub index: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub objective: String,
    pub map_value: Vec<String>,
    pub active_branches: Vec<BranchRef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedSet {
    pub name: String,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecializedLicq {
    pub condition: String,
    pub holds: bool,
    pub family: Vec<String>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicqSection {
    pub holds: bool,
    pub span_sum_dim: usize,
    pub dual_rank: usize,
    pub primal_rank: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specialized: Option<SpecializedLicq>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NnamcqSection {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolatedRow {
    /// `inequality` (row · λ ≤ 0) or `equation` (row · λ = 0).
    pub kind: String,
    pub row: Vec<String>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Violation {
    /// `∇F(x)^T λ = −∇f(x)` has no solution.
    Inconsistent,
    /// The canonical solution of the equations leaves the normal cone.
    Sign {
        multiplier: Vec<String>,
        rows: Vec<ViolatedRow>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecializedStationarity {
    pub condition: String,
    pub solvable: bool,
    pub unique: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StationaritySection {
    pub solvable: bool,
    pub unique: bool,
    pub components: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<Vec<String>>,
    pub vertices: Vec<Vec<String>>,
    pub rays: Vec<Vec<String>>,
    pub lines: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specialized: Option<SpecializedStationarity>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceSection {
    pub rays: Vec<Vec<String>>,
    pub lines: Vec<Vec<String>>,
    /// `positive`, `nonnegative` or `negative` on the nonzero piece points.
    pub sign: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSection {
    pub direction: Vec<String>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondOrderSection {
    pub condition: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<Vec<String>>,
    pub candidates_tested: usize,
    pub pieces: Vec<PieceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleSection {
    pub point: Vec<String>,
    pub evidence: String,
    pub values: Vec<(String, Vec<String>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSection {
    pub check: String,
    pub passed: bool,
    pub samples_examined: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_constant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleSection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSection {
    pub name: String,
    pub expression: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedBranch {
    pub label: String,
    #[serde(rename = "A")]
    pub a: Vec<Vec<String>>,
    pub b: Vec<String>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<String>>,
    pub d: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingSection {
    pub n: usize,
    pub m: usize,
    pub objective: String,
    pub components: Vec<ComponentSection>,
    pub branches: Vec<EncodedBranch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictLine {
    pub condition: String,
    pub status: Status,
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointReport {
    pub name: String,
    pub x: Vec<String>,
    pub feasibility: Feasibility,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_sets: Option<Vec<NamedSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub licq: Option<LicqSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nnamcq: Option<NnamcqSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationarity: Option<StationaritySection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub second_order: Vec<SecondOrderSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub oracles: Vec<OracleSection>,
    pub verdicts: Vec<VerdictLine>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub command: String,
    pub problem_digest: String,
    pub settings: Settings,
    pub inputs: ProblemDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoding: Option<EncodingSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointReport>,
}

impl Report {
    pub fn verdicts(&self) -> impl Iterator<Item = &VerdictLine> {
        self.points.iter().flat_map(|p| p.verdicts.iter())
    }

    /// 1 if any verdict fails, else 2 if any is inconclusive, else 0.
    pub fn exit_code(&self) -> i32 {
        let statuses: Vec<Status> = self.verdicts().map(|v| v.status).collect();
        if statuses.contains(&Status::Fails) {
            1
        } else if statuses.contains(&Status::Inconclusive) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let name = if self.inputs.name.is_empty() {
            "(unnamed)"
        } else {
            &self.inputs.name
        };
        let _ = writeln!(w, "discone {}", self.command);
        let _ = writeln!(w, "problem: {name} [{}]", self.inputs.problem.class);
        let _ = writeln!(w, "sha256: {}", self.problem_digest);
        if let Some(e) = &self.encoding {
            encoding_text(w, e);
        }
        for p in &self.points {
            let _ = writeln!(w);
            point_text(w, p);
        }
        out
    }
}

fn encoding_text(w: &mut String, e: &EncodingSection) {
    let _ = writeln!(w, "encoding: n = {}, m = {}, {} branch(es)", e.n, e.m, e.branches.len());
    let _ = writeln!(w, "  f = {}", e.objective);
    for c in &e.components {
        let _ = writeln!(w, "  {} = {}", c.name, c.expression);
    }
    for b in &e.branches {
        let _ = writeln!(w, "  {}:", b.label);
        if b.a.is_empty() && b.c.is_empty() {
            let _ = writeln!(w, "    (no constraints)");
        }
        for (row, rhs) in b.a.iter().zip(&b.b) {
            let _ = writeln!(w, "    ({}) . z <= {rhs}", row.join(", "));
        }
        for (row, rhs) in b.c.iter().zip(&b.d) {
            let _ = writeln!(w, "    ({}) . z = {rhs}", row.join(", "));
        }
    }
}

fn tuple(v: &[String]) -> String {
    format!("({})", v.join(", "))
}

fn point_text(w: &mut String, p: &PointReport) {
    let _ = writeln!(w, "point {} = {}", p.name, tuple(&p.x));
    let f = &p.feasibility;
    let _ = writeln!(w, "  f(x) = {}, F(x) = {}", f.objective, tuple(&f.map_value));
    if f.feasible {
        let act: Vec<String> = f
            .active_branches
            .iter()
            .map(|b| format!("{} ({})", b.index, b.label))
            .collect();
        let _ = writeln!(w, "  active branches: {}", act.join(", "));
    } else {
        let _ = writeln!(w, "  infeasible");
    }
    if let Some(sets) = &p.index_sets {
        let parts: Vec<String> = sets
            .iter()
            .map(|s| {
                let m: Vec<String> = s.members.iter().map(usize::to_string).collect();
                format!("{} = {{{}}}", s.name, m.join(", "))
            })
            .collect();
        let _ = writeln!(w, "  index sets: {}", parts.join(", "));
    }
    if let Some(l) = &p.licq {
        let _ = writeln!(
            w,
            "  LICQ: dual rank {} of {}, primal rank {} of {}",
            l.dual_rank, l.span_sum_dim, l.primal_rank, l.m
        );
        if let Some(s) = &l.specialized {
            let _ = writeln!(
                w,
                "  {}: rank {} of family [{}]",
                s.condition,
                s.rank,
                s.family.join(", ")
            );
        }
        if let Some(x) = &l.witness {
            let _ = writeln!(w, "  dependence witness {}", tuple(x));
        }
    }
    if let Some(n) = &p.nnamcq {
        if let (Some(b), Some(x)) = (n.branch, &n.witness) {
            let _ = writeln!(w, "  abnormal multiplier {} in the normal cone of branch {b}", tuple(x));
        }
    }
    if let Some(s) = &p.stationarity {
        let _ = writeln!(w, "  multipliers ordered as {}", tuple(&s.components));
        if let Some(m) = &s.multiplier {
            let _ = writeln!(w, "  multiplier {}", tuple(m));
        } else if s.solvable {
            let _ = writeln!(
                w,
                "  multiplier set: {} vertex(es), {} ray(s), {} line(s)",
                s.vertices.len(),
                s.rays.len(),
                s.lines.len()
            );
            for v in &s.vertices {
                let _ = writeln!(w, "    vertex {}", tuple(v));
            }
            for v in &s.rays {
                let _ = writeln!(w, "    ray {}", tuple(v));
            }
            for v in &s.lines {
                let _ = writeln!(w, "    line {}", tuple(v));
            }
        }
        match &s.violation {
            Some(Violation::Inconsistent) => {
                let _ = writeln!(w, "  grad f(x) + grad F(x)^T lambda = 0 has no solution");
            }
            Some(Violation::Sign { multiplier, rows }) => {
                let _ = writeln!(w, "  canonical solution {} leaves the normal cone:", tuple(multiplier));
                for r in rows {
                    let rel = if r.kind == "inequality" { "<=" } else { "=" };
                    let _ = writeln!(w, "    {} . lambda {rel} 0 violated (value {})", tuple(&r.row), r.value);
                }
            }
            None => {}
        }
    }
    for so in &p.second_order {
        let _ = writeln!(w, "  {}: {} critical-cone piece(s)", so.condition, so.pieces.len());
        for (i, piece) in so.pieces.iter().enumerate() {
            let gens = piece.rays.len() + piece.lines.len();
            let _ = writeln!(
                w,
                "    piece {}: {} generator(s), Hessian form {}",
                i + 1,
                gens,
                piece.sign
            );
        }
        if let Some(x) = &so.witness {
            let _ = writeln!(w, "    witness d = {}, d^T H d = {}", tuple(&x.direction), x.value);
        }
    }
    for o in &p.oracles {
        let outcome = if o.passed {
            "no counterexample"
        } else {
            "counterexample"
        };
        let _ = write!(w, "  {}: {outcome} after {} sample(s)", o.check, o.samples_examined);
        if let Some(c) = &o.growth_constant {
            let _ = write!(w, ", C = {c}");
        }
        let _ = writeln!(w);
        if let Some(c) = &o.counterexample {
            let vals: Vec<String> = c
                .values
                .iter()
                .map(|(k, v)| format!("{k} = {}", v.join(", ")))
                .collect();
            let _ = writeln!(w, "    at {}: {} ({})", tuple(&c.point), c.evidence, vals.join("; "));
        }
    }
    let _ = writeln!(w, "  verdicts:");
    for v in &p.verdicts {
        let _ = writeln!(w, "    [{}] {}", v.status.word(), v.summary);
    }
}
