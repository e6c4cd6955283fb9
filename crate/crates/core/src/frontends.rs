//! Encoders for the classical disjunctive problem classes.
//!
//! The constraint map is stacked as `(g, h, G₁, H₁, …, G_l, H_l)` and, for
//! cardinality constraints, as `(g, h, x)`. Multipliers reported by this
//! module and by [`crate::analysis`] use the same order.
//!
//! Branch families:
//!
//! | class | pair sets `S₁`, `S₂` (coordinates `(G_j, H_j)`) |
//! |-------|-------------------------------------------------|
//! | MPCC  | `ℝ₊×{0}`, `{0}×ℝ₊`                              |
//! | MPVC  | `ℝ₊×{0}`, `ℝ₋×ℝ₊`                               |
//! | MPSC  | `ℝ×{0}`, `{0}×ℝ`                                |
//!
//! Every branch carries `ℝᵖ₋ × {0^q}` on the `(g, h)` block. The branches
//! are `α ∈ {1,2}^l` in lexicographic order. A cardinality constraint
//! `‖x‖₀ ≤ κ` becomes one branch per support of size `κ`, in lexicographic
//! order of the supports.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::analysis::{is_feasible, MpdcProblem};
use crate::disjunctive::DisjunctiveSet;
use crate::error::{Error, Result};
use crate::exactla::{neg, Rat, RatMat};
use crate::expr::{CompiledMap, Expr};
use crate::polycone::Polyhedron;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemClass {
    Nlp,
    Mpcc,
    Mpvc,
    Ccmp,
    Mpsc,
}

impl ProblemClass {
    pub const ALL: [ProblemClass; 5] = [
        ProblemClass::Nlp,
        ProblemClass::Mpcc,
        ProblemClass::Mpvc,
        ProblemClass::Ccmp,
        ProblemClass::Mpsc,
    ];

    /// Short tag used in problem files.
    pub fn tag(self) -> &'static str {
        match self {
            ProblemClass::Nlp => "nlp",
            ProblemClass::Mpcc => "mpcc",
            ProblemClass::Mpvc => "mpvc",
            ProblemClass::Ccmp => "ccmp",
            ProblemClass::Mpsc => "mpsc",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.tag() == tag)
    }

    /// Name of the class-tailored LICQ.
    pub fn licq_name(self) -> &'static str {
        match self {
            ProblemClass::Nlp => "LICQ",
            ProblemClass::Mpcc => "MPCC-LICQ",
            ProblemClass::Mpvc => "MPVC-LICQ",
            ProblemClass::Ccmp => "CC-LICQ",
            ProblemClass::Mpsc => "MPSC-LICQ",
        }
    }

    fn has_pairs(self) -> bool {
        matches!(self, ProblemClass::Mpcc | ProblemClass::Mpvc | ProblemClass::Mpsc)
    }
}

impl fmt::Display for ProblemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag().to_uppercase())
    }
}

/// A problem stated in the terms of one of the classical classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassProblem {
    class: ProblemClass,
    n: usize,
    f: Expr,
    g: Vec<Expr>,
    h: Vec<Expr>,
    big_g: Vec<Expr>,
    big_h: Vec<Expr>,
    kappa: Option<usize>,
}

impl ClassProblem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        class: ProblemClass,
        n: usize,
        f: Expr,
        g: Vec<Expr>,
        h: Vec<Expr>,
        big_g: Vec<Expr>,
        big_h: Vec<Expr>,
        kappa: Option<usize>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidProblem(msg));
        if class.has_pairs() {
            if big_g.len() != big_h.len() {
                return invalid(format!(
                    "{class} needs as many G as H functions ({} vs {})",
                    big_g.len(),
                    big_h.len()
                ));
            }
        } else if !big_g.is_empty() || !big_h.is_empty() {
            return invalid(format!("{class} takes no G or H functions"));
        }
        match (class, kappa) {
            (ProblemClass::Ccmp, Some(k)) if k >= 1 && k < n => {}
            (ProblemClass::Ccmp, Some(k)) => {
                return invalid(format!("kappa = {k} must lie in 1..={}", n.saturating_sub(1)))
            }
            (ProblemClass::Ccmp, None) => return invalid("CCMP needs kappa".into()),
            (_, Some(_)) => return invalid(format!("{class} takes no kappa")),
            (_, None) => {}
        }
        for e in std::iter::once(&f).chain(&g).chain(&h).chain(&big_g).chain(&big_h) {
            if let Some(i) = e.max_var() {
                if i >= n {
                    return Err(Error::VariableOutOfRange { index: i + 1, n });
                }
            }
        }
        Ok(Self {
            class,
            n,
            f,
            g,
            h,
            big_g,
            big_h,
            kappa,
        })
    }

    pub fn class(&self) -> ProblemClass {
        self.class
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn objective(&self) -> &Expr {
        &self.f
    }

    pub fn g(&self) -> &[Expr] {
        &self.g
    }

    pub fn h(&self) -> &[Expr] {
        &self.h
    }

    pub fn big_g(&self) -> &[Expr] {
        &self.big_g
    }

    pub fn big_h(&self) -> &[Expr] {
        &self.big_h
    }

    pub fn kappa(&self) -> Option<usize> {
        self.kappa
    }

    /// Number of switching/complementarity pairs.
    pub fn l(&self) -> usize {
        self.big_g.len()
    }

    /// Components of the stacked constraint map.
    pub fn stacked_map(&self) -> Vec<Expr> {
        let mut out: Vec<Expr> = self.g.iter().chain(&self.h).cloned().collect();
        if self.class == ProblemClass::Ccmp {
            out.extend((0..self.n).map(Expr::Var));
        } else {
            for (a, b) in self.big_g.iter().zip(&self.big_h) {
                out.push(a.clone());
                out.push(b.clone());
            }
        }
        out
    }

    /// Human-readable names of the stacked components (1-based).
    pub fn component_names(&self) -> Vec<String> {
        let mut out: Vec<String> = (1..=self.g.len()).map(|j| format!("g{j}")).collect();
        out.extend((1..=self.h.len()).map(|j| format!("h{j}")));
        if self.class == ProblemClass::Ccmp {
            out.extend((1..=self.n).map(|i| format!("x{i}")));
        } else {
            for j in 1..=self.l() {
                out.push(format!("G{j}"));
                out.push(format!("H{j}"));
            }
        }
        out
    }
}

fn unit_row(m: usize, i: usize, v: i64) -> Vec<Rat> {
    let mut r = vec![Rat::zero(); m];
    r[i] = Rat::from_integer(v.into());
    r
}

/// Branch labels: `α ∈ {1,2}^l` for pair classes, the support (1-based) for
/// cardinality constraints.
pub fn branch_labels(cp: &ClassProblem) -> Vec<String> {
    match cp.class {
        ProblemClass::Nlp => vec!["single".into()],
        ProblemClass::Ccmp => supports(cp.n, cp.kappa.unwrap_or(0))
            .iter()
            .map(|s| {
                let idx: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
                format!("support {{{}}}", idx.join(","))
            })
            .collect(),
        _ => alphas(cp.l())
            .iter()
            .map(|a| {
                let s: String = a.iter().map(|v| char::from(b'0' + v)).collect();
                format!("alpha {s}")
            })
            .collect(),
    }
}

/// `{1,2}^l` in lexicographic order.
fn alphas(l: usize) -> Vec<Vec<u8>> {
    (0..1usize << l)
        .map(|idx| (0..l).map(|j| 1 + ((idx >> (l - 1 - j)) & 1) as u8).collect())
        .collect()
}

/// Subsets of `0..n` of size `k` in lexicographic order.
fn supports(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Translates a class problem into `min f s.t. F(x) ∈ D`.
pub fn encode(cp: &ClassProblem) -> Result<MpdcProblem> {
    let (p, q) = (cp.g.len(), cp.h.len());
    let map = cp.stacked_map();
    let m = map.len();
    let mut base_ineq: Vec<Vec<Rat>> = (0..p).map(|j| unit_row(m, j, 1)).collect();
    let mut base_eq: Vec<Vec<Rat>> = (0..q).map(|j| unit_row(m, p + j, 1)).collect();
    let mut branches = Vec::new();
    let mut push = |ineq: Vec<Vec<Rat>>, eq: Vec<Vec<Rat>>| -> Result<()> {
        let zeros = |n: usize| vec![Rat::zero(); n];
        branches.push(Polyhedron::new(
            m,
            RatMat::from_rows(m, &ineq),
            zeros(ineq.len()),
            RatMat::from_rows(m, &eq),
            zeros(eq.len()),
        )?);
        Ok(())
    };
    match cp.class {
        ProblemClass::Nlp => push(std::mem::take(&mut base_ineq), std::mem::take(&mut base_eq))?,
        ProblemClass::Ccmp => {
            for s in supports(cp.n, cp.kappa.expect("validated")) {
                let mut eq = base_eq.clone();
                eq.extend((0..cp.n).filter(|i| !s.contains(i)).map(|i| unit_row(m, p + q + i, 1)));
                push(base_ineq.clone(), eq)?;
            }
        }
        class => {
            for alpha in alphas(cp.l()) {
                let mut ineq = base_ineq.clone();
                let mut eq = base_eq.clone();
                for (j, &a) in alpha.iter().enumerate() {
                    let (gi, hi) = (p + q + 2 * j, p + q + 2 * j + 1);
                    match (class, a) {
                        (ProblemClass::Mpcc, 1) | (ProblemClass::Mpvc, 1) => {
                            ineq.push(unit_row(m, gi, -1));
                            eq.push(unit_row(m, hi, 1));
                        }
                        (ProblemClass::Mpcc, _) => {
                            eq.push(unit_row(m, gi, 1));
                            ineq.push(unit_row(m, hi, -1));
                        }
                        (ProblemClass::Mpvc, _) => {
                            ineq.push(unit_row(m, gi, 1));
                            ineq.push(unit_row(m, hi, -1));
                        }
                        (_, 1) => eq.push(unit_row(m, hi, 1)),
                        _ => eq.push(unit_row(m, gi, 1)),
                    }
                }
                push(ineq, eq)?;
            }
        }
    }
    MpdcProblem::new(cp.n, cp.f.clone(), map, DisjunctiveSet::new(m, branches)?)
}

/// Class-specific index sets (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassIndexSets {
    Nlp,
    Mpcc {
        plus_zero: Vec<usize>,
        zero_plus: Vec<usize>,
        zero_zero: Vec<usize>,
    },
    /// Subscripts refer to `(H_j, G_j)` in that order.
    Mpvc {
        plus_zero: Vec<usize>,
        plus_minus: Vec<usize>,
        zero_plus: Vec<usize>,
        zero_minus: Vec<usize>,
        zero_zero: Vec<usize>,
    },
    Ccmp {
        nonzero: Vec<usize>,
        zero: Vec<usize>,
    },
    Mpsc {
        g_only: Vec<usize>,
        h_only: Vec<usize>,
        both: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSets {
    /// Active inequalities `g_j(x) = 0`.
    pub active_g: Vec<usize>,
    pub sets: ClassIndexSets,
}

impl IndexSets {
    /// Named sets with 1-based members, for reporting.
    pub fn named(&self) -> Vec<(&'static str, Vec<usize>)> {
        let one = |v: &Vec<usize>| v.iter().map(|i| i + 1).collect::<Vec<_>>();
        let mut out = vec![("I^g", one(&self.active_g))];
        match &self.sets {
            ClassIndexSets::Nlp => {}
            ClassIndexSets::Mpcc {
                plus_zero,
                zero_plus,
                zero_zero,
            } => {
                out.push(("I^{+0}", one(plus_zero)));
                out.push(("I^{0+}", one(zero_plus)));
                out.push(("I^{00}", one(zero_zero)));
            }
            ClassIndexSets::Mpvc {
                plus_zero,
                plus_minus,
                zero_plus,
                zero_minus,
                zero_zero,
            } => {
                out.push(("I_{+0}", one(plus_zero)));
                out.push(("I_{+-}", one(plus_minus)));
                out.push(("I_{0+}", one(zero_plus)));
                out.push(("I_{0-}", one(zero_minus)));
                out.push(("I_{00}", one(zero_zero)));
            }
            ClassIndexSets::Ccmp { nonzero, zero } => {
                out.push(("I_±", one(nonzero)));
                out.push(("I_0", one(zero)));
            }
            ClassIndexSets::Mpsc { g_only, h_only, both } => {
                out.push(("I^G", one(g_only)));
                out.push(("I^H", one(h_only)));
                out.push(("I^{GH}", one(both)));
            }
        }
        out
    }
}

fn check_feasible(cp: &ClassProblem, x: &[Rat]) -> Result<MpdcProblem> {
    let p = encode(cp)?;
    if !is_feasible(&p, x)? {
        return Err(Error::Infeasible);
    }
    Ok(p)
}

/// Index sets at a feasible point.
pub fn index_sets(cp: &ClassProblem, x: &[Rat]) -> Result<IndexSets> {
    check_feasible(cp, x)?;
    let active_g = (0..cp.g.len()).filter(|&j| cp.g[j].eval(x).is_zero()).collect();
    let pairs: Vec<(Rat, Rat)> = cp
        .big_g
        .iter()
        .zip(&cp.big_h)
        .map(|(a, b)| (a.eval(x), b.eval(x)))
        .collect();
    let pick = |pred: &dyn Fn(&Rat, &Rat) -> bool| -> Vec<usize> {
        (0..pairs.len()).filter(|&j| pred(&pairs[j].0, &pairs[j].1)).collect()
    };
    let sets = match cp.class {
        ProblemClass::Nlp => ClassIndexSets::Nlp,
        ProblemClass::Mpcc => ClassIndexSets::Mpcc {
            plus_zero: pick(&|g, h| g.is_positive() && h.is_zero()),
            zero_plus: pick(&|g, h| g.is_zero() && h.is_positive()),
            zero_zero: pick(&|g, h| g.is_zero() && h.is_zero()),
        },
        ProblemClass::Mpvc => ClassIndexSets::Mpvc {
            plus_zero: pick(&|g, h| h.is_positive() && g.is_zero()),
            plus_minus: pick(&|g, h| h.is_positive() && g.is_negative()),
            zero_plus: pick(&|g, h| h.is_zero() && g.is_positive()),
            zero_minus: pick(&|g, h| h.is_zero() && g.is_negative()),
            zero_zero: pick(&|g, h| h.is_zero() && g.is_zero()),
        },
        ProblemClass::Ccmp => ClassIndexSets::Ccmp {
            nonzero: (0..cp.n).filter(|&i| !x[i].is_zero()).collect(),
            zero: (0..cp.n).filter(|&i| x[i].is_zero()).collect(),
        },
        ProblemClass::Mpsc => ClassIndexSets::Mpsc {
            g_only: pick(&|g, h| g.is_zero() && !h.is_zero()),
            h_only: pick(&|g, h| !g.is_zero() && h.is_zero()),
            both: pick(&|g, h| g.is_zero() && h.is_zero()),
        },
    };
    Ok(IndexSets { active_g, sets })
}

/// One gradient in a class-tailored LICQ family (0-based indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GradientRef {
    Ineq(usize),
    Eq(usize),
    BigG(usize),
    BigH(usize),
    Unit(usize),
}

impl fmt::Display for GradientRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradientRef::Ineq(j) => write!(f, "grad g{}", j + 1),
            GradientRef::Eq(j) => write!(f, "grad h{}", j + 1),
            GradientRef::BigG(j) => write!(f, "grad G{}", j + 1),
            GradientRef::BigH(j) => write!(f, "grad H{}", j + 1),
            GradientRef::Unit(i) => write!(f, "e{}", i + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializedLicq {
    pub holds: bool,
    pub family: Vec<GradientRef>,
    pub rank: usize,
}

/// Linear independence of the class-tailored gradient family.
pub fn specialized_licq(cp: &ClassProblem, x: &[Rat]) -> Result<SpecializedLicq> {
    let sets = index_sets(cp, x)?;
    let compiled = CompiledMap::new(&cp.f, &cp.stacked_map(), cp.n)?;
    let jac = compiled.map_jacobian(x)?;
    let (p, q) = (cp.g.len(), cp.h.len());
    let mut family: Vec<GradientRef> = sets.active_g.iter().map(|&j| GradientRef::Ineq(j)).collect();
    family.extend((0..q).map(GradientRef::Eq));
    let union = |a: &[usize], b: &[usize], c: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
        v.sort_unstable();
        v
    };
    match &sets.sets {
        ClassIndexSets::Nlp => {}
        ClassIndexSets::Mpcc {
            plus_zero,
            zero_plus,
            zero_zero,
        } => {
            family.extend(union(zero_plus, zero_zero, &[]).into_iter().map(GradientRef::BigG));
            family.extend(union(plus_zero, zero_zero, &[]).into_iter().map(GradientRef::BigH));
        }
        ClassIndexSets::Mpvc {
            plus_zero,
            zero_plus,
            zero_minus,
            zero_zero,
            ..
        } => {
            family.extend(union(plus_zero, zero_zero, &[]).into_iter().map(GradientRef::BigG));
            family.extend(
                union(zero_plus, zero_minus, zero_zero)
                    .into_iter()
                    .map(GradientRef::BigH),
            );
        }
        ClassIndexSets::Ccmp { zero, .. } => family.extend(zero.iter().map(|&i| GradientRef::Unit(i))),
        ClassIndexSets::Mpsc { g_only, h_only, both } => {
            family.extend(union(g_only, both, &[]).into_iter().map(GradientRef::BigG));
            family.extend(union(h_only, both, &[]).into_iter().map(GradientRef::BigH));
        }
    }
    let rows: Vec<Vec<Rat>> = family
        .iter()
        .map(|g| match *g {
            GradientRef::Ineq(j) => jac.row(j).to_vec(),
            GradientRef::Eq(j) => jac.row(p + j).to_vec(),
            GradientRef::BigG(j) => jac.row(p + q + 2 * j).to_vec(),
            GradientRef::BigH(j) => jac.row(p + q + 2 * j + 1).to_vec(),
            GradientRef::Unit(i) => unit_row(cp.n, i, 1),
        })
        .collect();
    let rank = RatMat::from_rows(cp.n, &rows).rank();
    Ok(SpecializedLicq {
        holds: rank == family.len(),
        family,
        rank,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecializedStationarity {
    NotStationary,
    /// Multipliers in stacked order; `vertices`, `rays` and `lines`
    /// describe the full solution set.
    Stationary {
        multipliers: Vec<Rat>,
        unique: bool,
        vertices: Vec<Vec<Rat>>,
        rays: Vec<Vec<Rat>>,
        lines: Vec<Vec<Rat>>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sign {
    Free,
    Zero,
    Nonneg,
    Nonpos,
}

/// Solves the class-tailored strong stationarity system, built directly
/// from the index sets and sign rules of the class.
pub fn specialized_s_stationarity(cp: &ClassProblem, x: &[Rat]) -> Result<SpecializedStationarity> {
    let sets = index_sets(cp, x)?;
    let compiled = CompiledMap::new(&cp.f, &cp.stacked_map(), cp.n)?;
    let bundle = compiled.bundle(x)?;
    let m = compiled.ncomponents();
    let (p, q) = (cp.g.len(), cp.h.len());

    let mut sign = vec![Sign::Free; m];
    for (j, s) in sign.iter_mut().enumerate().take(p) {
        *s = if sets.active_g.contains(&j) {
            Sign::Nonneg
        } else {
            Sign::Zero
        };
    }
    let (mu, nu) = (|j: usize| p + q + 2 * j, |j: usize| p + q + 2 * j + 1);
    match &sets.sets {
        ClassIndexSets::Nlp => {}
        ClassIndexSets::Mpcc {
            plus_zero,
            zero_plus,
            zero_zero,
        } => {
            for &j in plus_zero {
                sign[mu(j)] = Sign::Zero;
            }
            for &j in zero_plus {
                sign[nu(j)] = Sign::Zero;
            }
            for &j in zero_zero {
                sign[mu(j)] = Sign::Nonpos;
                sign[nu(j)] = Sign::Nonpos;
            }
        }
        ClassIndexSets::Mpvc {
            plus_zero,
            plus_minus,
            zero_plus,
            zero_minus,
            zero_zero,
        } => {
            for &j in plus_zero {
                sign[mu(j)] = Sign::Nonneg;
            }
            for &j in plus_minus.iter().chain(zero_plus).chain(zero_minus).chain(zero_zero) {
                sign[mu(j)] = Sign::Zero;
            }
            for &j in plus_zero.iter().chain(plus_minus) {
                sign[nu(j)] = Sign::Zero;
            }
            for &j in zero_minus.iter().chain(zero_zero) {
                sign[nu(j)] = Sign::Nonpos;
            }
        }
        ClassIndexSets::Ccmp { nonzero, .. } => {
            let at_bound = Some(nonzero.len()) == cp.kappa;
            for i in 0..cp.n {
                if !at_bound || nonzero.contains(&i) {
                    sign[p + q + i] = Sign::Zero;
                }
            }
        }
        ClassIndexSets::Mpsc { g_only, h_only, both } => {
            for &j in h_only.iter().chain(both) {
                sign[mu(j)] = Sign::Zero;
            }
            for &j in g_only.iter().chain(both) {
                sign[nu(j)] = Sign::Zero;
            }
        }
    }

    // ∇F^T y = −∇f together with the sign rules
    let jt = bundle.map_jac.transpose();
    let mut eq_rows = jt.row_vecs();
    let mut eq_rhs = neg(&bundle.f_grad);
    let mut ineq_rows = Vec::new();
    for (k, s) in sign.iter().enumerate() {
        match s {
            Sign::Free => {}
            Sign::Zero => {
                eq_rows.push(unit_row(m, k, 1));
                eq_rhs.push(Rat::zero());
            }
            Sign::Nonneg => ineq_rows.push(unit_row(m, k, -1)),
            Sign::Nonpos => ineq_rows.push(unit_row(m, k, 1)),
        }
    }
    let zeros = vec![Rat::zero(); ineq_rows.len()];
    let system = Polyhedron::new(
        m,
        RatMat::from_rows(m, &ineq_rows),
        zeros,
        RatMat::from_rows(m, &eq_rows),
        eq_rhs,
    )?;
    Ok(match system.minkowski_weyl() {
        None => SpecializedStationarity::NotStationary,
        Some(v) => SpecializedStationarity::Stationary {
            multipliers: v.points[0].clone(),
            unique: v.points.len() == 1 && v.rays.is_empty() && v.lines.is_empty(),
            vertices: v.points,
            rays: v.rays,
            lines: v.lines,
        },
    })
}

/// Number of branches the encoding produces.
pub fn branch_count(cp: &ClassProblem) -> usize {
    match cp.class {
        ProblemClass::Nlp => 1,
        ProblemClass::Ccmp => supports(cp.n, cp.kappa.unwrap_or(0)).len(),
        _ => 1 << cp.l(),
    }
}

/// `n choose k`, used to cross-check branch counts.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = Rat::one();
    for i in 0..k {
        acc = acc * Rat::from_integer((n - i).into()) / Rat::from_integer((i + 1).into());
    }
    acc.to_integer().try_into().expect("binomial fits in usize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{check_licq, solve_s_stationarity};
    use crate::disjunctive::active_branches;
    use crate::exactla::rat_vec;
    use crate::expr::parse;
    use crate::polycone::{cone_relation, tangent_cone_poly, ConeH, ConeRelation};

    fn exprs(n: usize, src: &[&str]) -> Vec<Expr> {
        src.iter().map(|s| parse(s, n).unwrap()).collect()
    }

    fn pair_problem(
        class: ProblemClass,
        f: &str,
        g: &[&str],
        big_g: &[&str],
        big_h: &[&str],
        n: usize,
    ) -> ClassProblem {
        ClassProblem::new(
            class,
            n,
            parse(f, n).unwrap(),
            exprs(n, g),
            vec![],
            exprs(n, big_g),
            exprs(n, big_h),
            None,
        )
        .unwrap()
    }

    fn ccmp(n: usize, kappa: usize, f: &str) -> ClassProblem {
        ClassProblem::new(
            ProblemClass::Ccmp,
            n,
            parse(f, n).unwrap(),
            vec![],
            vec![],
            vec![],
            vec![],
            Some(kappa),
        )
        .unwrap()
    }

    fn same(a: &ConeH, b: &ConeH) -> bool {
        cone_relation(a, b, ConeRelation::Equal).unwrap()
    }

    fn h2(ineq: &[&[i64]], eq: &[&[i64]]) -> ConeH {
        let rows = |r: &[&[i64]]| r.iter().map(|x| rat_vec(x)).collect::<Vec<_>>();
        ConeH::from_rows(2, &rows(ineq), &rows(eq)).unwrap()
    }

    fn tangent_at_origin(p: &MpdcProblem, i: usize) -> ConeH {
        tangent_cone_poly(&p.set().branches()[i], &rat_vec(&[0, 0])).unwrap()
    }

    #[test]
    fn mpcc_encoding() {
        let cp = pair_problem(ProblemClass::Mpcc, "0", &[], &["x1"], &["x2"], 2);
        let p = encode(&cp).unwrap();
        assert_eq!(p.set().branches().len(), 2);
        assert!(same(&tangent_at_origin(&p, 0), &h2(&[&[-1, 0]], &[&[0, 1]])));
        assert!(same(&tangent_at_origin(&p, 1), &h2(&[&[0, -1]], &[&[1, 0]])));
    }

    #[test]
    fn mpsc_encoding() {
        let cp = pair_problem(ProblemClass::Mpsc, "0", &[], &["x1"], &["x2"], 2);
        let p = encode(&cp).unwrap();
        assert!(same(&tangent_at_origin(&p, 0), &h2(&[], &[&[0, 1]])));
        assert!(same(&tangent_at_origin(&p, 1), &h2(&[], &[&[1, 0]])));
    }

    #[test]
    fn ccmp_encoding_gives_axes() {
        let cp = ccmp(3, 1, "0");
        let p = encode(&cp).unwrap();
        assert_eq!(p.set().branches().len(), 3);
        assert_eq!(branch_count(&cp), binomial(3, 1));
        for i in 0..3 {
            let mut e = vec![0; 3];
            e[i] = 5;
            assert_eq!(active_branches(p.set(), &rat_vec(&e)).unwrap(), vec![i]);
        }
        assert_eq!(branch_labels(&cp)[0], "support {1}");
    }

    #[test]
    fn ccmp_rejects_bad_kappa() {
        for k in [0, 3] {
            let r = ClassProblem::new(
                ProblemClass::Ccmp,
                3,
                Expr::zero(),
                vec![],
                vec![],
                vec![],
                vec![],
                Some(k),
            );
            assert!(matches!(r, Err(Error::InvalidProblem(_))));
        }
    }

    #[test]
    fn index_set_examples() {
        let cp = pair_problem(ProblemClass::Mpcc, "0", &[], &["x1"], &["x2"], 2);
        assert_eq!(
            index_sets(&cp, &rat_vec(&[0, 0])).unwrap().sets,
            ClassIndexSets::Mpcc {
                plus_zero: vec![],
                zero_plus: vec![],
                zero_zero: vec![0]
            }
        );
        let cp = pair_problem(ProblemClass::Mpvc, "0", &[], &["x1"], &["x2"], 2);
        assert_eq!(
            index_sets(&cp, &rat_vec(&[-1, 0])).unwrap().sets,
            ClassIndexSets::Mpvc {
                plus_zero: vec![],
                plus_minus: vec![],
                zero_plus: vec![],
                zero_minus: vec![0],
                zero_zero: vec![]
            }
        );
        let cp = ccmp(3, 1, "0");
        assert_eq!(
            index_sets(&cp, &rat_vec(&[2, 0, 0])).unwrap().sets,
            ClassIndexSets::Ccmp {
                nonzero: vec![0],
                zero: vec![1, 2]
            }
        );
        assert_eq!(index_sets(&cp, &rat_vec(&[2, 1, 0])), Err(Error::Infeasible));
    }

    #[test]
    fn specialized_licq_examples() {
        let cp = pair_problem(ProblemClass::Mpsc, "0", &[], &["x1"], &["x2"], 2);
        assert!(specialized_licq(&cp, &rat_vec(&[0, 0])).unwrap().holds);
        let cp = pair_problem(ProblemClass::Mpcc, "0", &[], &["x1"], &["x1"], 1);
        let r = specialized_licq(&cp, &rat_vec(&[0])).unwrap();
        assert!(!r.holds);
        assert_eq!(r.rank, 1);
        assert_eq!(r.family, vec![GradientRef::BigG(0), GradientRef::BigH(0)]);
        let cp = pair_problem(ProblemClass::Nlp, "0", &["x1 - 1"], &[], &[], 1);
        let r = specialized_licq(&cp, &rat_vec(&[0])).unwrap();
        assert!(r.holds && r.family.is_empty());
    }

    fn multipliers(s: SpecializedStationarity) -> Vec<Rat> {
        match s {
            SpecializedStationarity::Stationary { multipliers, .. } => multipliers,
            SpecializedStationarity::NotStationary => panic!("expected a stationary point"),
        }
    }

    #[test]
    fn specialized_stationarity_examples() {
        let cp = pair_problem(ProblemClass::Mpcc, "x1 + x2", &[], &["x1"], &["x2"], 2);
        assert_eq!(
            multipliers(specialized_s_stationarity(&cp, &rat_vec(&[0, 0])).unwrap()),
            rat_vec(&[-1, -1])
        );
        let cp = pair_problem(ProblemClass::Mpcc, "x1 - x2", &[], &["x1"], &["x2"], 2);
        assert_eq!(
            specialized_s_stationarity(&cp, &rat_vec(&[0, 0])).unwrap(),
            SpecializedStationarity::NotStationary
        );
        let cp = pair_problem(ProblemClass::Mpvc, "x2", &[], &["x1"], &["x2"], 2);
        assert_eq!(
            multipliers(specialized_s_stationarity(&cp, &rat_vec(&[0, 0])).unwrap()),
            rat_vec(&[0, -1])
        );
        let cp = ccmp(2, 1, "(x2 - 1)^2 + x1");
        assert_eq!(
            multipliers(specialized_s_stationarity(&cp, &rat_vec(&[0, 1])).unwrap()),
            rat_vec(&[-1, 0])
        );
        let cp = ccmp(2, 1, "-x2");
        assert_eq!(
            specialized_s_stationarity(&cp, &rat_vec(&[0, 1])).unwrap(),
            SpecializedStationarity::NotStationary
        );
        let cp = ccmp(3, 2, "x1 + x2 + x3");
        assert_eq!(
            specialized_s_stationarity(&cp, &rat_vec(&[0, 0, 0])).unwrap(),
            SpecializedStationarity::NotStationary
        );
    }

    #[test]
    fn generic_and_specialized_agree_on_examples() {
        let cp = pair_problem(ProblemClass::Mpcc, "x1 + x2", &[], &["x1"], &["x2"], 2);
        let p = encode(&cp).unwrap();
        let x = rat_vec(&[0, 0]);
        assert_eq!(
            check_licq(&p, &x).unwrap().holds,
            specialized_licq(&cp, &x).unwrap().holds
        );
        let generic = solve_s_stationarity(&p, &x).unwrap();
        assert_eq!(
            generic.unique_multiplier().unwrap(),
            &multipliers(specialized_s_stationarity(&cp, &x).unwrap())[..]
        );
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(2, 3), 0);
    }
}
