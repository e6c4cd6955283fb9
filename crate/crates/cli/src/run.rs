//! Command execution.

use std::fmt;
use std::str::FromStr;

use discone_core::analysis::{
    check_licq, check_nnamcq, check_sonc_auto, check_sosc, normal_cone_at, solve_s_stationarity, CopositivityClass,
    Limits, NnamcqVerdict, SecondOrderMode, SecondOrderReport, StationarityCertificate, StationarityViolation, Verdict,
};
use discone_core::disjunctive::active_branches;
use discone_core::exactla::{dot, frac, Rat};
use discone_core::frontends::{
    index_sets, specialized_licq, specialized_s_stationarity, ClassProblem, ProblemClass,
    SpecializedStationarity as ClassStationarity,
};
use discone_core::oracle::{
    grid_local_min, isolatedness_check, quadratic_growth_check, Evidence, GridSpec, OracleKind, OracleVerdict,
};
use discone_core::Error;

use crate::document::{LoadedProblem, FORMAT_VERSION};
use crate::error::CliError;
use crate::report::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    CheckLicq,
    Stationarity,
    SecondOrder,
    Oracle,
    FullReport,
    EncodeDump,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::CheckLicq,
        Command::Stationarity,
        Command::SecondOrder,
        Command::Oracle,
        Command::FullReport,
        Command::EncodeDump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CheckLicq => "check-licq",
            Command::Stationarity => "stationarity",
            Command::SecondOrder => "second-order",
            Command::Oracle => "oracle",
            Command::FullReport => "full-report",
            Command::EncodeDump => "encode-dump",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown command \"{s}\"")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Necessary,
    Sufficient,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Necessary => "necessary",
            Mode::Sufficient => "sufficient",
        }
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "necessary" => Ok(Mode::Necessary),
            "sufficient" => Ok(Mode::Sufficient),
            _ => Err(CliError::Usage(format!(
                "unknown mode \"{s}\" (expected necessary or sufficient)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub mode: Mode,
    pub grid_radius: Rat,
    pub grid_points: usize,
    pub limits: Limits,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            mode: Mode::Necessary,
            grid_radius: frac(1, 2),
            grid_points: 5,
            limits: Limits::default(),
        }
    }
}

/// Growth constants tried by the oracle, largest first.
pub fn growth_constants() -> Vec<Rat> {
    (0..=6).map(|k| frac(1, 1 << k)).collect()
}

/// Runs `command` on the named point, or on every point of the document
/// when `point` is `None`.
pub fn run(command: Command, doc: &LoadedProblem, point: Option<&str>, opts: &Options) -> Result<Report, CliError> {
    let mut report = Report {
        format_version: FORMAT_VERSION,
        command: command.name().to_string(),
        problem_digest: doc.document.digest(),
        settings: Settings {
            mode: opts.mode.name().to_string(),
            grid_radius: rat(&opts.grid_radius),
            grid_points: opts.grid_points,
            max_generators: opts.limits.max_generators,
        },
        inputs: doc.document.clone(),
        encoding: None,
        points: Vec::new(),
    };
    if command == Command::EncodeDump {
        report.encoding = Some(encoding(doc));
        return Ok(report);
    }
    let names: Vec<String> = match point {
        Some(name) => {
            doc.point(name)?;
            vec![name.to_string()]
        }
        None if doc.document.points.is_empty() => {
            return Err(CliError::Usage(format!(
                "{command} needs an evaluation point and the problem file defines none"
            )))
        }
        None => doc.document.points.keys().cloned().collect(),
    };
    for name in names {
        let x = doc.point(&name)?;
        report.points.push(run_point(command, doc, &name, &x, opts)?);
    }
    Ok(report)
}

fn encoding(doc: &LoadedProblem) -> EncodingSection {
    let p = &doc.problem;
    EncodingSection {
        n: p.n(),
        m: p.m(),
        objective: p.objective().to_string(),
        components: doc
            .component_names
            .iter()
            .zip(p.map())
            .map(|(name, e)| ComponentSection {
                name: name.clone(),
                expression: e.to_string(),
            })
            .collect(),
        branches: doc
            .branch_labels
            .iter()
            .zip(p.set().branches())
            .map(|(label, b)| EncodedBranch {
                label: label.clone(),
                a: rat_rows(&b.a().row_vecs()),
                b: rats(b.b()),
                c: rat_rows(&b.c().row_vecs()),
                d: rats(b.d()),
            })
            .collect(),
    }
}

fn verdict(condition: &str, status: Status, summary: String) -> VerdictLine {
    VerdictLine {
        condition: condition.to_string(),
        status,
        summary,
    }
}

fn holds_or_fails(b: bool) -> Status {
    if b {
        Status::Holds
    } else {
        Status::Fails
    }
}

fn mismatch(what: &str) -> CliError {
    CliError::Core(Error::Invariant(format!(
        "{what}: class-specific and generic computations disagree"
    )))
}

fn run_point(
    command: Command,
    doc: &LoadedProblem,
    name: &str,
    x: &[Rat],
    opts: &Options,
) -> Result<PointReport, CliError> {
    let p = &doc.problem;
    let z = p.map_value(x)?;
    let feasible = p.set().contains(&z);
    let active = if feasible {
        active_branches(p.set(), &z)?
    } else {
        Vec::new()
    };
    let mut out = PointReport {
        name: name.to_string(),
        x: rats(x),
        feasibility: Feasibility {
            feasible,
            objective: rat(&p.objective_value(x)?),
            map_value: rats(&z),
            active_branches: active
                .iter()
                .map(|&i| BranchRef {
                    index: i + 1,
                    label: doc.branch_labels[i].clone(),
                })
                .collect(),
        },
        index_sets: None,
        licq: None,
        nnamcq: None,
        stationarity: None,
        second_order: Vec::new(),
        oracles: Vec::new(),
        verdicts: Vec::new(),
    };
    if !feasible {
        out.verdicts.push(verdict(
            "feasibility",
            Status::Fails,
            format!("point {name} is infeasible: F(x) lies in no branch of D"),
        ));
        return Ok(out);
    }
    if let Some(cp) = &doc.class {
        let sets = index_sets(cp, x)?;
        out.index_sets = Some(
            sets.named()
                .into_iter()
                .map(|(n, members)| NamedSet {
                    name: n.to_string(),
                    members,
                })
                .collect(),
        );
    }

    let wants_cq = matches!(command, Command::CheckLicq | Command::FullReport);
    let wants_st = matches!(
        command,
        Command::Stationarity | Command::SecondOrder | Command::FullReport
    );
    if wants_cq {
        licq_section(doc, x, &mut out)?;
        nnamcq_section(doc, x, &mut out)?;
    }
    let mut stationary = false;
    if wants_st {
        stationary = stationarity_section(doc, x, &mut out)?;
    }
    if stationary {
        let modes: &[Mode] = match command {
            Command::SecondOrder => std::slice::from_ref(&opts.mode),
            Command::FullReport => &[Mode::Necessary, Mode::Sufficient],
            _ => &[],
        };
        for &mode in modes {
            let so = match mode {
                Mode::Necessary => check_sonc_auto(p, x, &opts.limits)?,
                Mode::Sufficient => check_sosc(p, x, &opts.limits)?,
            };
            let (section, line) = second_order_section(&so);
            out.second_order.push(section);
            out.verdicts.push(line);
        }
    } else if command == Command::SecondOrder {
        out.verdicts.push(verdict(
            "second-order",
            Status::Fails,
            "no second-order check: S-stationarity fails, so there is no multiplier".to_string(),
        ));
    }
    if matches!(command, Command::Oracle | Command::FullReport) {
        oracle_sections(doc, x, opts, &mut out)?;
    }
    Ok(out)
}

fn equivalent(class: Option<ProblemClass>, name: &str) -> String {
    match class {
        Some(c) => format!(" (\u{2261} {name} for {})", c),
        None => String::new(),
    }
}

fn licq_section(doc: &LoadedProblem, x: &[Rat], out: &mut PointReport) -> Result<(), CliError> {
    let l = check_licq(&doc.problem, x)?;
    if (l.dual_rank == l.span_sum_dim) != (l.primal_rank == l.m) {
        return Err(CliError::Core(Error::Invariant(
            "dual and primal LICQ forms disagree".into(),
        )));
    }
    let specialized = match &doc.class {
        Some(cp) => {
            let s = specialized_licq(cp, x)?;
            if s.holds != l.holds {
                return Err(mismatch("LICQ"));
            }
            Some(SpecializedLicq {
                condition: cp.class().licq_name().to_string(),
                holds: s.holds,
                family: s.family.iter().map(ToString::to_string).collect(),
                rank: s.rank,
            })
        }
        None => None,
    };
    let suffix = match &specialized {
        Some(s) => format!(" (\u{2261} {})", s.condition),
        None => String::new(),
    };
    let summary = if l.holds {
        format!("MPDC-LICQ holds{suffix}")
    } else {
        format!("MPDC-LICQ fails{suffix}: a nonzero multiplier in the span of the normal cones annihilates grad F(x)")
    };
    out.verdicts
        .push(verdict("MPDC-LICQ", holds_or_fails(l.holds), summary));
    out.licq = Some(LicqSection {
        holds: l.holds,
        span_sum_dim: l.span_sum_dim,
        dual_rank: l.dual_rank,
        primal_rank: l.primal_rank,
        m: l.m,
        witness: l.witness.as_deref().map(rats),
        specialized,
    });
    Ok(())
}

/// Exact failure when an abnormal multiplier lies in the regular normal
/// cone; inconclusive when only the branchwise estimate admits one.
fn nnamcq_section(doc: &LoadedProblem, x: &[Rat], out: &mut PointReport) -> Result<(), CliError> {
    let p = &doc.problem;
    let section = match check_nnamcq(p, x)? {
        NnamcqVerdict::Holds => {
            out.verdicts
                .push(verdict("NNAMCQ", Status::Holds, "NNAMCQ holds".to_string()));
            NnamcqSection {
                status: Status::Holds,
                branch: None,
                witness: None,
            }
        }
        NnamcqVerdict::Fails { branch, witness } => {
            let jac = p.bundle(x)?.map_jac.transpose();
            let mut abnormal = normal_cone_at(p, x)?;
            for k in 0..jac.rows() {
                abnormal = abnormal.with_equation(jac.row(k))?;
            }
            let v = abnormal.to_v();
            match v.rays().first().or(v.lines().first()) {
                Some(w) => {
                    out.verdicts.push(verdict(
                        "NNAMCQ",
                        Status::Fails,
                        format!(
                            "NNAMCQ fails: the regular normal cone contains the abnormal multiplier ({})",
                            rats(w).join(", ")
                        ),
                    ));
                    NnamcqSection {
                        status: Status::Fails,
                        branch: None,
                        witness: Some(rats(w)),
                    }
                }
                None => {
                    out.verdicts.push(verdict(
                        "NNAMCQ",
                        Status::Inconclusive,
                        format!(
                            "NNAMCQ inconclusive: the normal cone of branch {} admits an abnormal multiplier",
                            branch + 1
                        ),
                    ));
                    NnamcqSection {
                        status: Status::Inconclusive,
                        branch: Some(branch + 1),
                        witness: Some(rats(&witness)),
                    }
                }
            }
        }
    };
    out.nnamcq = Some(section);
    Ok(())
}

fn stationarity_name(class: ProblemClass) -> &'static str {
    match class {
        ProblemClass::Nlp => "the KKT conditions",
        _ => "strong stationarity",
    }
}

fn check_specialized(
    cp: &ClassProblem,
    x: &[Rat],
    cert: &StationarityCertificate,
) -> Result<ClassStationarity, CliError> {
    let s = specialized_s_stationarity(cp, x)?;
    let agrees = match &s {
        ClassStationarity::NotStationary => !cert.solvable,
        ClassStationarity::Stationary {
            unique, multipliers, ..
        } => cert.solvable && *unique == cert.unique && (!unique || cert.unique_multiplier() == Some(&multipliers[..])),
    };
    if !agrees {
        return Err(mismatch("S-stationarity"));
    }
    Ok(s)
}

fn stationarity_section(doc: &LoadedProblem, x: &[Rat], out: &mut PointReport) -> Result<bool, CliError> {
    let p = &doc.problem;
    let cert = solve_s_stationarity(p, x)?;
    let specialized = match &doc.class {
        Some(cp) => {
            let s = check_specialized(cp, x, &cert)?;
            let (solvable, unique, multiplier) = match s {
                ClassStationarity::NotStationary => (false, false, None),
                ClassStationarity::Stationary {
                    multipliers, unique, ..
                } => (true, unique, unique.then(|| rats(&multipliers))),
            };
            Some(SpecializedStationarity {
                condition: format!("{} {}", cp.class(), stationarity_name(cp.class())),
                solvable,
                unique,
                multiplier,
            })
        }
        None => None,
    };
    let class = doc.class.as_ref().map(|c| c.class());
    let eq = class.map_or(String::new(), |c| equivalent(Some(c), stationarity_name(c)));
    let violation = match &cert.violation {
        None => None,
        Some(StationarityViolation::Inconsistent) => Some(Violation::Inconsistent),
        Some(StationarityViolation::SignRows { multiplier, rows }) => {
            let normal = normal_cone_at(p, x)?;
            let k = normal.a().rows();
            let rows = rows
                .iter()
                .map(|&i| {
                    let (kind, row) = if i < k {
                        ("inequality", normal.a().row(i))
                    } else {
                        ("equation", normal.c().row(i - k))
                    };
                    ViolatedRow {
                        kind: kind.to_string(),
                        row: rats(row),
                        value: rat(&dot(row, multiplier)),
                    }
                })
                .collect();
            Some(Violation::Sign {
                multiplier: rats(multiplier),
                rows,
            })
        }
    };
    let summary = match (&violation, cert.solvable, cert.unique) {
        (_, true, true) => format!("S-stationarity holds with a unique multiplier{eq}"),
        (_, true, false) => format!("S-stationarity holds with a non-unique multiplier set{eq}"),
        (Some(Violation::Inconsistent), ..) => {
            format!("S-stationarity fails{eq}: grad f(x) is not in the range of grad F(x)^T")
        }
        _ => format!("S-stationarity fails{eq}: sign violation at the canonical multiplier"),
    };
    out.verdicts
        .push(verdict("S-stationarity", holds_or_fails(cert.solvable), summary));
    let ms = cert.multipliers.as_ref();
    out.stationarity = Some(StationaritySection {
        solvable: cert.solvable,
        unique: cert.unique,
        components: doc.component_names.clone(),
        multiplier: cert.unique_multiplier().map(rats),
        vertices: ms.map_or_else(Vec::new, |m| rat_rows(&m.vertices)),
        rays: ms.map_or_else(Vec::new, |m| rat_rows(&m.rays)),
        lines: ms.map_or_else(Vec::new, |m| rat_rows(&m.lines)),
        violation,
        specialized,
    });
    Ok(cert.solvable)
}

fn status_of(v: Verdict) -> Status {
    match v {
        Verdict::Holds => Status::Holds,
        Verdict::Fails => Status::Fails,
        Verdict::Inconclusive => Status::Inconclusive,
    }
}

fn second_order_section(so: &SecondOrderReport) -> (SecondOrderSection, VerdictLine) {
    let condition = match so.mode {
        SecondOrderMode::Necessary => "MPDC-SONC",
        SecondOrderMode::Sufficient => "MPDC-SOSC",
    };
    let status = status_of(so.verdict);
    let pieces = so
        .per_piece
        .iter()
        .map(|pv| {
            let (sign, direction) = match &pv.class {
                CopositivityClass::StrictlyPositive => ("positive", None),
                CopositivityClass::NonnegativeWithNullWitness(d) => ("nonnegative", Some(rats(d))),
                CopositivityClass::NegativeWitness(d) => ("negative", Some(rats(d))),
            };
            PieceSection {
                rays: rat_rows(pv.piece.rays()),
                lines: rat_rows(pv.piece.lines()),
                sign: sign.to_string(),
                direction,
            }
        })
        .collect();
    let summary = match (so.mode, so.verdict) {
        (_, Verdict::Holds) => format!("{condition} holds"),
        (SecondOrderMode::Necessary, Verdict::Fails) => {
            format!("{condition} fails: the Lagrangian Hessian is negative on a critical direction")
        }
        (SecondOrderMode::Sufficient, Verdict::Fails) => {
            format!("{condition} fails: the Lagrangian Hessian is not positive on a nonzero critical direction")
        }
        (SecondOrderMode::Necessary, Verdict::Inconclusive) => format!(
            "{condition} inconclusive: the multiplier is not unique ({} vertex candidates)",
            so.candidates_tested
        ),
        (SecondOrderMode::Sufficient, Verdict::Inconclusive) => format!(
            "{condition} inconclusive: none of the {} vertex multipliers is positive on every critical piece",
            so.candidates_tested
        ),
    };
    let section = SecondOrderSection {
        condition: condition.to_string(),
        status,
        multiplier: so.multiplier.as_deref().map(rats),
        candidates_tested: so.candidates_tested,
        pieces,
        witness: so.witness.as_ref().map(|w| WitnessSection {
            direction: rats(&w.direction),
            value: rat(&w.value),
        }),
    };
    (section, verdict(condition, status, summary))
}

fn oracle_section(check: &str, v: &OracleVerdict) -> OracleSection {
    let growth_constant = match &v.kind {
        OracleKind::QuadraticGrowth { c } => Some(rat(c)),
        _ => None,
    };
    let counterexample = v.counterexample.as_ref().map(|c| {
        let (evidence, values) = match &c.evidence {
            Evidence::Decrease { value, reference } => (
                "smaller objective value",
                vec![
                    ("f(y)".to_string(), vec![rat(value)]),
                    ("f(x)".to_string(), vec![rat(reference)]),
                ],
            ),
            Evidence::GrowthViolation { value, bound } => (
                "growth bound violated",
                vec![
                    ("f(y)".to_string(), vec![rat(value)]),
                    ("f(x) + C|y - x|^2".to_string(), vec![rat(bound)]),
                ],
            ),
            Evidence::StationaryPoint { multiplier } => (
                "another S-stationary point",
                vec![("multiplier".to_string(), rats(multiplier))],
            ),
            Evidence::NotTangent => ("direction is not tangent", Vec::new()),
            Evidence::StepInfeasible { t } => ("step leaves the set", vec![("t".to_string(), vec![rat(t)])]),
        };
        CounterexampleSection {
            point: rats(&c.point),
            evidence: evidence.to_string(),
            values,
        }
    });
    OracleSection {
        check: check.to_string(),
        passed: v.passed,
        samples_examined: v.samples_examined,
        growth_constant,
        counterexample,
    }
}

fn oracle_sections(doc: &LoadedProblem, x: &[Rat], opts: &Options, out: &mut PointReport) -> Result<(), CliError> {
    let p = &doc.problem;
    let spec = GridSpec::new(x.to_vec(), opts.grid_radius.clone(), opts.grid_points)?;
    let grid = format!(
        "{}^{} grid of radius {}",
        opts.grid_points,
        p.n(),
        rat(&opts.grid_radius)
    );

    let local = grid_local_min(p, x, &spec)?;
    out.verdicts.push(verdict(
        "grid local minimality",
        holds_or_fails(local.passed),
        if local.passed {
            format!("no feasible point with a smaller objective on the {grid}")
        } else {
            format!("a feasible point on the {grid} has a smaller objective")
        },
    ));
    out.oracles.push(oracle_section("grid local minimality", &local));

    let mut growth = None;
    for c in growth_constants() {
        let v = quadratic_growth_check(p, x, &c, &spec)?;
        let passed = v.passed;
        growth = Some(v);
        if passed {
            break;
        }
    }
    let growth = growth.expect("at least one growth constant");
    let c = match &growth.kind {
        OracleKind::QuadraticGrowth { c } => rat(c),
        _ => unreachable!("growth oracle verdict"),
    };
    out.verdicts.push(verdict(
        "grid quadratic growth",
        holds_or_fails(growth.passed),
        if growth.passed {
            format!("f(y) >= f(x) + C|y - x|^2 with C = {c} on the {grid}")
        } else {
            format!("quadratic growth fails on the {grid} for every C down to {c}")
        },
    ));
    out.oracles.push(oracle_section("grid quadratic growth", &growth));

    let iso = isolatedness_check(p, x, &spec)?;
    out.verdicts.push(verdict(
        "grid isolatedness",
        holds_or_fails(iso.passed),
        if iso.passed {
            format!("no other S-stationary point on the {grid}")
        } else {
            format!("another S-stationary point lies on the {grid}")
        },
    ));
    out.oracles.push(oracle_section("grid isolatedness", &iso));
    Ok(())
}
