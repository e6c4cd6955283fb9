//! Constraint qualifications, strong stationarity and second-order
//! conditions for `min f(x) s.t. F(x) ∈ D`.
//!
//! Second-order verdicts rest on an exact copositivity engine: a quadratic
//! form is minimized over the convex hull of a cone's generators by
//! enumerating every generator subset and solving the stationarity system of
//! the form on that face.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::disjunctive::{
    active_branches, frechet_normal_disjunctive, intersect_linealities, limiting_normal_upper, sum_of_spans,
    tangent_union, ConeUnion, DisjunctiveSet,
};
use crate::error::{Error, Result};
use crate::exactla::{
    dot, is_zero_vec, neg, normalize_leading, rank_nullspace, solve_affine, AffineSolution, Rat, RatMat, Subspace,
};
use crate::expr::{CompiledMap, EvalBundle, Expr};
use crate::polycone::{ConeH, ConeV, Polyhedron};

/// Default cap on the number of generators fed to the copositivity engine.
pub const DEFAULT_MAX_GENERATORS: usize = 12;

/// Resource limits for the exponential parts of the analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_generators: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_generators: DEFAULT_MAX_GENERATORS,
        }
    }
}

/// `min f(x) s.t. F(x) ∈ D` with polynomial data.
#[derive(Clone, Debug)]
pub struct MpdcProblem {
    n: usize,
    f: Expr,
    map: Vec<Expr>,
    set: DisjunctiveSet,
    compiled: CompiledMap,
}

impl MpdcProblem {
    pub fn new(n: usize, f: Expr, map: Vec<Expr>, set: DisjunctiveSet) -> Result<Self> {
        if set.dim() != map.len() {
            return Err(Error::Dimension(format!(
                "constraint map has {} components but the set lives in dimension {}",
                map.len(),
                set.dim()
            )));
        }
        let compiled = CompiledMap::new(&f, &map, n)?;
        Ok(Self {
            n,
            f,
            map,
            set,
            compiled,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.map.len()
    }

    pub fn objective(&self) -> &Expr {
        &self.f
    }

    pub fn map(&self) -> &[Expr] {
        &self.map
    }

    pub fn set(&self) -> &DisjunctiveSet {
        &self.set
    }

    pub fn objective_value(&self, x: &[Rat]) -> Result<Rat> {
        self.compiled.f_value(x)
    }

    pub fn map_value(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        self.compiled.map_value(x)
    }

    pub fn bundle(&self, x: &[Rat]) -> Result<EvalBundle> {
        self.compiled.bundle(x)
    }
}

/// `F(x) ∈ D`, decided exactly.
pub fn is_feasible(p: &MpdcProblem, x: &[Rat]) -> Result<bool> {
    Ok(p.set.contains(&p.map_value(x)?))
}

/// Bundle at a feasible point, or [`Error::Infeasible`].
fn feasible_bundle(p: &MpdcProblem, x: &[Rat]) -> Result<EvalBundle> {
    let b = p.bundle(x)?;
    if !p.set.contains(&b.map_val) {
        return Err(Error::Infeasible);
    }
    Ok(b)
}

/// `{d | ∇F(x) d ∈ T_{D_i}(F(x))}` for every active branch `i`.
pub fn linearization_cone(p: &MpdcProblem, x: &[Rat]) -> Result<ConeUnion> {
    let b = feasible_bundle(p, x)?;
    tangent_union(&p.set, &b.map_val)?.preimage(&b.map_jac)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LicqReport {
    pub holds: bool,
    /// Dimension of `Σ span N̂_{D_i}(F(x))`.
    pub span_sum_dim: usize,
    /// Rank of `∇F(x)^T` restricted to that sum.
    pub dual_rank: usize,
    /// Rank of `[∇F(x) | basis of ∩ lineality(T_{D_i}(F(x)))]`.
    pub primal_rank: usize,
    pub m: usize,
    /// Nonzero `λ` in the span sum with `∇F(x)^T λ = 0` when the condition fails.
    pub witness: Option<Vec<Rat>>,
}

/// MPDC-LICQ in both its dual (span sum) and primal (lineality
/// intersection) forms. Disagreement between the forms is reported as
/// [`Error::Invariant`].
pub fn check_licq(p: &MpdcProblem, x: &[Rat]) -> Result<LicqReport> {
    let b = feasible_bundle(p, x)?;
    let z = &b.map_val;
    let jt = b.map_jac.transpose();

    let spans = sum_of_spans(&p.set, z)?;
    let s = spans.basis_columns();
    let jts = jt.mul(&s);
    let (dual_rank, kernel) = rank_nullspace(&jts);
    let witness = kernel.basis().first().map(|y| s.mul_vec(y));

    let lin = intersect_linealities(&p.set, z)?;
    let primal_rank = b.map_jac.hstack(&lin.basis_columns()).rank();

    let dual_holds = dual_rank == spans.dim();
    let primal_holds = primal_rank == p.m();
    if dual_holds != primal_holds {
        return Err(Error::Invariant(format!(
            "dual LICQ form says {dual_holds}, primal form says {primal_holds}"
        )));
    }
    Ok(LicqReport {
        holds: dual_holds,
        span_sum_dim: spans.dim(),
        dual_rank,
        primal_rank,
        m: p.m(),
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NnamcqVerdict {
    Holds,
    /// Nonzero `λ ∈ N̂_{D_branch}(F(x))` with `∇F(x)^T λ = 0`.
    Fails {
        branch: usize,
        witness: Vec<Rat>,
    },
}

/// NNAMCQ checked through the branchwise upper estimate of the limiting
/// normal cone. `Holds` is sound for NNAMCQ; `Fails` only says the
/// estimate admits a nonzero abnormal multiplier.
pub fn check_nnamcq(p: &MpdcProblem, x: &[Rat]) -> Result<NnamcqVerdict> {
    let b = feasible_bundle(p, x)?;
    let z = &b.map_val;
    let branches = active_branches(&p.set, z)?;
    let normals = limiting_normal_upper(&p.set, z)?;
    let jt = b.map_jac.transpose();
    for (&branch, normal) in branches.iter().zip(&normals) {
        let mut abnormal = normal.to_h();
        for k in 0..jt.rows() {
            abnormal = abnormal.with_equation(jt.row(k))?;
        }
        let v = abnormal.to_v();
        if let Some(w) = v.rays().first().or(v.lines().first()) {
            return Ok(NnamcqVerdict::Fails {
                branch,
                witness: w.clone(),
            });
        }
    }
    Ok(NnamcqVerdict::Holds)
}

/// Solution set of the strong stationarity system
/// `∇f(x) + ∇F(x)^T λ = 0, λ ∈ N̂_D(F(x))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplierSet {
    /// First vertex candidate.
    pub particular: Vec<Rat>,
    /// Solutions of the homogeneous equation `∇F(x)^T λ = 0`.
    pub directions: Subspace,
    /// `N̂_D(F(x))` in H-form.
    pub normal_cone: ConeH,
    /// Minimal-face representatives of the multiplier polyhedron.
    pub vertices: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Rat>>,
    pub lines: Vec<Vec<Rat>>,
}

/// Why the stationarity system has no solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StationarityViolation {
    /// `∇F(x)^T λ = −∇f(x)` has no solution at all.
    Inconsistent,
    /// The canonical solution of the equations violates these rows of the
    /// normal cone (inequality rows first, then equation rows offset by the
    /// inequality count).
    SignRows { multiplier: Vec<Rat>, rows: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationarityCertificate {
    pub solvable: bool,
    pub unique: bool,
    pub multipliers: Option<MultiplierSet>,
    pub violation: Option<StationarityViolation>,
    /// Every vertex candidate was substituted back into the system.
    pub residual_checked: bool,
}

impl StationarityCertificate {
    /// The multiplier when it is unique.
    pub fn unique_multiplier(&self) -> Option<&[Rat]> {
        match (&self.multipliers, self.unique) {
            (Some(ms), true) => Some(&ms.particular),
            _ => None,
        }
    }
}

/// Whether `λ` solves the strong stationarity system at `x`.
pub fn is_s_multiplier(p: &MpdcProblem, x: &[Rat], lambda: &[Rat]) -> Result<bool> {
    let b = feasible_bundle(p, x)?;
    if lambda.len() != p.m() {
        return Ok(false);
    }
    let normal = frechet_normal_disjunctive(&p.set, &b.map_val)?;
    Ok(stationarity_residual_is_zero(&b, lambda) && normal.contains(lambda))
}

fn stationarity_residual_is_zero(b: &EvalBundle, lambda: &[Rat]) -> bool {
    let r = b.map_jac.transpose().mul_vec(lambda);
    r.iter().zip(&b.f_grad).all(|(a, g)| (a + g).is_zero())
}

/// Decides solvability and uniqueness of the strong stationarity system.
pub fn solve_s_stationarity(p: &MpdcProblem, x: &[Rat]) -> Result<StationarityCertificate> {
    let b = feasible_bundle(p, x)?;
    let m = p.m();
    let normal = frechet_normal_disjunctive(&p.set, &b.map_val)?;
    let jt = b.map_jac.transpose();
    let rhs = neg(&b.f_grad);

    let poly = Polyhedron::new(
        m,
        normal.a().clone(),
        vec![Rat::zero(); normal.a().rows()],
        jt.vstack(normal.c()),
        rhs.iter()
            .cloned()
            .chain((0..normal.c().rows()).map(|_| Rat::zero()))
            .collect(),
    )?;

    let Some(v) = poly.minkowski_weyl() else {
        let violation = match solve_affine(&jt, &rhs)? {
            AffineSolution::Inconsistent => StationarityViolation::Inconsistent,
            AffineSolution::Solution { point, .. } => {
                let mut rows: Vec<usize> = (0..normal.a().rows())
                    .filter(|&i| dot(normal.a().row(i), &point).is_positive())
                    .collect();
                rows.extend(
                    (0..normal.c().rows())
                        .filter(|&i| !dot(normal.c().row(i), &point).is_zero())
                        .map(|i| normal.a().rows() + i),
                );
                StationarityViolation::SignRows {
                    multiplier: point,
                    rows,
                }
            }
        };
        return Ok(StationarityCertificate {
            solvable: false,
            unique: false,
            multipliers: None,
            violation: Some(violation),
            residual_checked: false,
        });
    };

    for lambda in &v.points {
        if !(stationarity_residual_is_zero(&b, lambda) && normal.contains(lambda)) {
            return Err(Error::Invariant(
                "multiplier candidate does not solve the stationarity system".into(),
            ));
        }
    }
    let unique = v.points.len() == 1 && v.rays.is_empty() && v.lines.is_empty();
    Ok(StationarityCertificate {
        solvable: true,
        unique,
        multipliers: Some(MultiplierSet {
            particular: v.points[0].clone(),
            directions: rank_nullspace(&jt).1,
            normal_cone: normal,
            vertices: v.points,
            rays: v.rays,
            lines: v.lines,
        }),
        violation: None,
        residual_checked: true,
    })
}

/// `{d | ∇F(x) d ∈ T_{D_i}(F(x)), λ · ∇F(x) d = 0}` per active branch.
pub fn critical_cone(p: &MpdcProblem, x: &[Rat], lambda: &[Rat]) -> Result<ConeUnion> {
    if lambda.len() != p.m() {
        return Err(Error::Dimension(format!(
            "multiplier has length {}, expected {}",
            lambda.len(),
            p.m()
        )));
    }
    let b = feasible_bundle(p, x)?;
    let row = b.map_jac.transpose().mul_vec(lambda);
    let lin = tangent_union(&p.set, &b.map_val)?.preimage(&b.map_jac)?;
    let pieces = lin
        .pieces()
        .iter()
        .map(|c| c.with_equation(&row))
        .collect::<Result<_>>()?;
    ConeUnion::new(p.n(), pieces)
}

/// `∇²f(x) + Σ λ_k ∇²F_k(x)`.
pub fn lagrangian_hessian(b: &EvalBundle, lambda: &[Rat]) -> RatMat {
    let mut h = b.f_hess.clone();
    for (l, hk) in lambda.iter().zip(&b.map_hess) {
        if !l.is_zero() {
            h = h.add(&hk.scaled(l));
        }
    }
    h
}

/// One family of minimizers found on the face spanned by `support`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgminFace {
    /// Indices of the vertices spanning the face.
    pub support: Vec<usize>,
    /// Vertices of the (convex) set of minimizers on that face.
    pub points: Vec<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticMinimum {
    pub value: Rat,
    pub argmin: Vec<ArgminFace>,
}

/// Stationary points of `μ ↦ μ^T Q μ` on the simplex face `support`.
fn face_candidates(h: &RatMat, vertices: &[Vec<Rat>], support: &[usize]) -> Result<Option<(Rat, Vec<Vec<Rat>>)>> {
    let s = support.len();
    let dim = vertices[0].len();
    let vs = RatMat::from_columns(dim, &support.iter().map(|&i| vertices[i].clone()).collect::<Vec<_>>());
    let q = vs.transpose().mul(h).mul(&vs);
    // [2Q 1; 1^T 0] (μ, ν) = (0, 1)
    let mut kkt = RatMat::zeros(s + 1, s + 1);
    for i in 0..s {
        for j in 0..s {
            kkt.set(i, j, q.get(i, j) * Rat::from_integer(2.into()));
        }
        kkt.set(i, s, Rat::from_integer(1.into()));
        kkt.set(s, i, Rat::from_integer(1.into()));
    }
    let mut rhs = vec![Rat::zero(); s + 1];
    rhs[s] = Rat::from_integer(1.into());
    let AffineSolution::Solution { point, directions } = solve_affine(&kkt, &rhs)? else {
        return Ok(None);
    };
    // q = μ^T Q μ = −ν/2 on the whole solution set
    let value = -&point[s] / Rat::from_integer(2.into());
    let mus: Vec<Vec<Rat>> = if directions.is_trivial() {
        if point[..s].iter().any(Signed::is_negative) {
            return Ok(None);
        }
        vec![point[..s].to_vec()]
    } else {
        // μ = p + D t ≥ 0  ⇔  −D t ≤ p
        let dmat = directions.basis_columns();
        let k = directions.dim();
        let rows: Vec<Vec<Rat>> = (0..s).map(|i| neg(dmat.row(i))).collect();
        let region = Polyhedron::new(
            k,
            RatMat::from_rows(k, &rows),
            point[..s].to_vec(),
            RatMat::zeros(0, k),
            vec![],
        )?;
        let Some(v) = region.minkowski_weyl() else {
            return Ok(None);
        };
        v.points
            .iter()
            .map(|t| {
                let full = dmat.mul_vec(t);
                (0..s).map(|i| &point[i] + &full[i]).collect()
            })
            .collect()
    };
    let mut zs: Vec<Vec<Rat>> = mus.iter().map(|mu| vs.mul_vec(mu)).collect();
    zs.sort();
    zs.dedup();
    Ok(Some((value, zs)))
}

/// Exact minimum of `z^T H z` over `conv(vertices)`.
pub fn min_quadratic_over_polytope(h: &RatMat, vertices: &[Vec<Rat>], limits: &Limits) -> Result<QuadraticMinimum> {
    if vertices.is_empty() {
        return Err(Error::Precondition("the polytope needs at least one vertex".into()));
    }
    let dim = vertices[0].len();
    if h.rows() != dim || h.cols() != dim || vertices.iter().any(|v| v.len() != dim) {
        return Err(Error::Dimension(
            "quadratic form and vertices disagree in dimension".into(),
        ));
    }
    if !h.is_symmetric() {
        return Err(Error::Precondition("quadratic form must be symmetric".into()));
    }
    let k = vertices.len();
    if k > limits.max_generators {
        return Err(Error::ResourceCap {
            what: "generator count",
            requested: k as u64,
            cap: limits.max_generators as u64,
        });
    }
    let masks: Vec<u64> = (1..(1u64 << k)).collect();
    type Face = (Vec<usize>, Rat, Vec<Vec<Rat>>);
    let faces: Vec<Option<Face>> = masks
        .par_iter()
        .map(|&mask| {
            let support: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            face_candidates(h, vertices, &support).map(|c| c.map(|(v, zs)| (support, v, zs)))
        })
        .collect::<Result<_>>()?;
    let faces: Vec<Face> = faces.into_iter().flatten().collect();
    let value = faces
        .iter()
        .map(|(_, v, _)| v)
        .min()
        .cloned()
        .expect("single-vertex faces always yield a candidate");
    let argmin = faces
        .into_iter()
        .filter(|(_, v, _)| *v == value)
        .map(|(support, _, points)| ArgminFace { support, points })
        .collect();
    Ok(QuadraticMinimum { value, argmin })
}

/// Sign of a quadratic form on the nonzero points of a cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CopositivityClass {
    StrictlyPositive,
    NonnegativeWithNullWitness(Vec<Rat>),
    NegativeWitness(Vec<Rat>),
}

/// Classifies `d^T H d` over `c \ {0}` via the polytope spanned by the
/// generators (lines enter as `±` rays). Every nonzero cone point is a
/// positive multiple of a nonzero polytope point.
pub fn cone_quadratic_sign(h: &RatMat, c: &ConeV, limits: &Limits) -> Result<CopositivityClass> {
    let gens = c.generators();
    if gens.is_empty() {
        return Ok(CopositivityClass::StrictlyPositive);
    }
    let min = min_quadratic_over_polytope(h, &gens, limits)?;
    let nonzero = min
        .argmin
        .iter()
        .flat_map(|f| f.points.iter())
        .find(|z| !is_zero_vec(z))
        .map(|z| normalize_leading(z));
    Ok(if min.value.is_negative() {
        CopositivityClass::NegativeWitness(nonzero.expect("negative value at a nonzero point"))
    } else if min.value.is_zero() {
        match nonzero {
            Some(d) => CopositivityClass::NonnegativeWithNullWitness(d),
            None => CopositivityClass::StrictlyPositive,
        }
    } else {
        CopositivityClass::StrictlyPositive
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SecondOrderMode {
    Necessary,
    Sufficient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceVerdict {
    pub piece: ConeV,
    pub class: CopositivityClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub direction: Vec<Rat>,
    /// `d^T ∇²L d`
    pub value: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondOrderReport {
    pub mode: SecondOrderMode,
    pub verdict: Verdict,
    /// Multiplier the per-piece data refers to.
    pub multiplier: Option<Vec<Rat>>,
    /// Number of multiplier candidates examined.
    pub candidates_tested: usize,
    pub per_piece: Vec<PieceVerdict>,
    pub witness: Option<Witness>,
}

fn classify_pieces(h: &RatMat, critical: &ConeUnion, limits: &Limits) -> Result<Vec<PieceVerdict>> {
    critical
        .v_pieces()
        .into_iter()
        .map(|piece| {
            let class = cone_quadratic_sign(h, &piece, limits)?;
            Ok(PieceVerdict { piece, class })
        })
        .collect()
}

/// Re-checks a witness by substitution: nonzero, critical, and with the
/// claimed value.
fn verified_witness(h: &RatMat, critical: &ConeUnion, d: &[Rat]) -> Result<Witness> {
    let value = h.quadratic_form(d);
    if is_zero_vec(d) || !critical.contains(d) {
        return Err(Error::Invariant(
            "second-order witness is not a nonzero critical direction".into(),
        ));
    }
    Ok(Witness {
        direction: d.to_vec(),
        value,
    })
}

/// Second-order necessary condition for a given multiplier:
/// `d^T ∇²L d ≥ 0` on every critical-cone piece.
pub fn check_sonc(p: &MpdcProblem, x: &[Rat], lambda: &[Rat], limits: &Limits) -> Result<SecondOrderReport> {
    if !is_s_multiplier(p, x, lambda)? {
        return Err(Error::Precondition(
            "multiplier does not solve the stationarity system".into(),
        ));
    }
    let b = feasible_bundle(p, x)?;
    let h = lagrangian_hessian(&b, lambda);
    let critical = critical_cone(p, x, lambda)?;
    let per_piece = classify_pieces(&h, &critical, limits)?;
    let mut witness = None;
    for pv in &per_piece {
        if let CopositivityClass::NegativeWitness(d) = &pv.class {
            let w = verified_witness(&h, &critical, d)?;
            if !w.value.is_negative() {
                return Err(Error::Invariant("negative witness has nonnegative value".into()));
            }
            witness = Some(w);
            break;
        }
    }
    Ok(SecondOrderReport {
        mode: SecondOrderMode::Necessary,
        verdict: if witness.is_some() {
            Verdict::Fails
        } else {
            Verdict::Holds
        },
        multiplier: Some(lambda.to_vec()),
        candidates_tested: 1,
        per_piece,
        witness,
    })
}

/// Second-order sufficient condition.
///
/// With a unique multiplier the verdict is exact. Otherwise each vertex
/// candidate is tried on its own: one candidate that is strictly positive
/// on every piece proves the condition, and anything else is inconclusive.
pub fn check_sosc(p: &MpdcProblem, x: &[Rat], limits: &Limits) -> Result<SecondOrderReport> {
    let cert = solve_s_stationarity(p, x)?;
    let Some(ms) = cert.multipliers.as_ref().filter(|_| cert.solvable) else {
        return Err(Error::Precondition(
            "the strong stationarity system has no solution".into(),
        ));
    };
    let b = feasible_bundle(p, x)?;
    let candidates: &[Vec<Rat>] = if cert.unique {
        std::slice::from_ref(&ms.particular)
    } else {
        &ms.vertices
    };
    let mut first: Option<(Vec<Rat>, Vec<PieceVerdict>, Option<Witness>)> = None;
    for lambda in candidates {
        let h = lagrangian_hessian(&b, lambda);
        let critical = critical_cone(p, x, lambda)?;
        let per_piece = classify_pieces(&h, &critical, limits)?;
        let failing = per_piece.iter().find_map(|pv| match &pv.class {
            CopositivityClass::StrictlyPositive => None,
            CopositivityClass::NonnegativeWithNullWitness(d) | CopositivityClass::NegativeWitness(d) => Some(d.clone()),
        });
        match failing {
            None => {
                return Ok(SecondOrderReport {
                    mode: SecondOrderMode::Sufficient,
                    verdict: Verdict::Holds,
                    multiplier: Some(lambda.clone()),
                    candidates_tested: candidates.len(),
                    per_piece,
                    witness: None,
                })
            }
            Some(d) => {
                let w = verified_witness(&h, &critical, &d)?;
                if w.value.is_positive() {
                    return Err(Error::Invariant("sufficiency witness has positive value".into()));
                }
                if first.is_none() {
                    first = Some((lambda.clone(), per_piece, Some(w)));
                }
            }
        }
    }
    let (lambda, per_piece, witness) = first.expect("at least one candidate");
    Ok(SecondOrderReport {
        mode: SecondOrderMode::Sufficient,
        verdict: if cert.unique {
            Verdict::Fails
        } else {
            Verdict::Inconclusive
        },
        multiplier: Some(lambda),
        candidates_tested: candidates.len(),
        per_piece,
        witness,
    })
}

/// Necessary condition with the multiplier taken from the stationarity
/// certificate. A non-unique multiplier set makes the verdict inconclusive;
/// the per-piece data then refers to the first candidate.
pub fn check_sonc_auto(p: &MpdcProblem, x: &[Rat], limits: &Limits) -> Result<SecondOrderReport> {
    let cert = solve_s_stationarity(p, x)?;
    let Some(ms) = cert.multipliers.as_ref().filter(|_| cert.solvable) else {
        return Err(Error::Precondition(
            "the strong stationarity system has no solution".into(),
        ));
    };
    let mut report = check_sonc(p, x, &ms.particular, limits)?;
    if !cert.unique {
        report.verdict = Verdict::Inconclusive;
        report.candidates_tested = ms.vertices.len();
    }
    Ok(report)
}

/// `N̂_D(F(x))` in H-form.
pub fn normal_cone_at(p: &MpdcProblem, x: &[Rat]) -> Result<ConeH> {
    let b = feasible_bundle(p, x)?;
    frechet_normal_disjunctive(&p.set, &b.map_val)
}

/// V-forms of the branchwise normal cones at `F(x)`.
pub fn branch_normal_cones(p: &MpdcProblem, x: &[Rat]) -> Result<Vec<ConeV>> {
    let b = feasible_bundle(p, x)?;
    limiting_normal_upper(&p.set, &b.map_val)
}
