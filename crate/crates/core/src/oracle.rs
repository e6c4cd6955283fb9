//! Brute-force evidence generators.
//!
//! Grids use rational coordinates, so membership in the feasible set and
//! every comparison are exact. A passing grid check is evidence, not a proof:
//! it only says nothing went wrong at the sampled points. Counterexamples, on
//! the other hand, are genuine and can be rechecked with
//! [`OracleVerdict::recheck`].

use num_traits::Signed;
use rayon::prelude::*;

use crate::analysis::{is_feasible, solve_s_stationarity, MpdcProblem};
use crate::disjunctive::{tangent_union, DisjunctiveSet};
use crate::error::{Error, Result};
use crate::exactla::{add, norm2_sq, scale, sub, Rat};

/// Largest grid the oracles will walk.
pub const MAX_GRID_POINTS: u64 = 10_000_000;

/// A uniform grid `center + radius·(2k/(K−1) − 1)` per axis, `k = 0..K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    center: Vec<Rat>,
    radius: Rat,
    points_per_axis: usize,
    total: u64,
}

impl GridSpec {
    pub fn new(center: Vec<Rat>, radius: Rat, points_per_axis: usize) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::Precondition("grid radius must be positive".into()));
        }
        if points_per_axis < 3 || points_per_axis.is_multiple_of(2) {
            return Err(Error::Precondition(format!(
                "points per axis must be odd and at least 3, got {points_per_axis}"
            )));
        }
        let total = (points_per_axis as u64)
            .checked_pow(center.len() as u32)
            .filter(|&t| t <= MAX_GRID_POINTS)
            .ok_or(Error::ResourceCap {
                what: "grid points",
                requested: (points_per_axis as f64).powi(center.len() as i32).min(u64::MAX as f64) as u64,
                cap: MAX_GRID_POINTS,
            })?;
        Ok(Self {
            center,
            radius,
            points_per_axis,
            total,
        })
    }

    pub fn center(&self) -> &[Rat] {
        &self.center
    }

    pub fn radius(&self) -> &Rat {
        &self.radius
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// The `idx`-th grid point; the last coordinate varies fastest.
    pub fn point(&self, mut idx: u64) -> Vec<Rat> {
        let k = self.points_per_axis as u64;
        let denom = Rat::from_integer(((k - 1) as i64).into());
        let mut out = self.center.clone();
        for c in out.iter_mut().rev() {
            let step = (idx % k) as i64;
            idx /= k;
            let offset = Rat::from_integer((2 * step - (k as i64 - 1)).into()) / &denom;
            *c += &self.radius * offset;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleKind {
    LocalMin,
    QuadraticGrowth { c: Rat },
    Isolatedness,
    TangentRealization { steps: usize },
}

/// Exact data explaining a counterexample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// Feasible `y` with `f(y) < f(x̄)`.
    Decrease { value: Rat, reference: Rat },
    /// Feasible `y` with `f(y) < f(x̄) + C‖y − x̄‖²`.
    GrowthViolation { value: Rat, bound: Rat },
    /// Feasible `y ≠ x̄` that is S-stationary.
    StationaryPoint { multiplier: Vec<Rat> },
    /// The direction is not tangent at the base point.
    NotTangent,
    /// `z + t·w` left the set.
    StepInfeasible { t: Rat },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub point: Vec<Rat>,
    pub evidence: Evidence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub kind: OracleKind,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
    pub samples_examined: u64,
}

impl OracleVerdict {
    fn from_search(kind: OracleKind, total: u64, hit: Option<(u64, Counterexample)>) -> Self {
        match hit {
            None => Self {
                kind,
                passed: true,
                counterexample: None,
                samples_examined: total,
            },
            Some((idx, ce)) => Self {
                kind,
                passed: false,
                counterexample: Some(ce),
                samples_examined: idx + 1,
            },
        }
    }

    /// Re-derives a grid counterexample from scratch. Returns `true` when
    /// there is nothing to check.
    pub fn recheck(&self, p: &MpdcProblem, xbar: &[Rat]) -> Result<bool> {
        let Some(ce) = &self.counterexample else {
            return Ok(true);
        };
        let y = &ce.point;
        if !is_feasible(p, y)? {
            return Ok(false);
        }
        let fy = p.objective_value(y)?;
        let fx = p.objective_value(xbar)?;
        Ok(match (&self.kind, &ce.evidence) {
            (OracleKind::LocalMin, Evidence::Decrease { value, reference }) => {
                fy == *value && fx == *reference && fy < fx
            }
            (OracleKind::QuadraticGrowth { c }, Evidence::GrowthViolation { value, bound }) => {
                let b = fx + c * norm2_sq(&sub(y, xbar));
                fy == *value && b == *bound && fy < b
            }
            (OracleKind::Isolatedness, Evidence::StationaryPoint { .. }) => {
                y != xbar && solve_s_stationarity(p, y)?.solvable
            }
            _ => false,
        })
    }

    /// Rechecks a tangent-realization counterexample.
    pub fn recheck_in(&self, d: &DisjunctiveSet, z: &[Rat], w: &[Rat]) -> Result<bool> {
        Ok(match self.counterexample.as_ref().map(|c| &c.evidence) {
            None => true,
            Some(Evidence::NotTangent) => !tangent_union(d, z)?.contains(w),
            Some(Evidence::StepInfeasible { t }) => {
                let ce = self.counterexample.as_ref().expect("matched above");
                ce.point == add(z, &scale(w, t)) && !d.contains(&ce.point)
            }
            Some(_) => false,
        })
    }
}

fn require_feasible(p: &MpdcProblem, xbar: &[Rat], spec: &GridSpec) -> Result<()> {
    if xbar.len() != p.n() || spec.center.len() != p.n() {
        return Err(Error::Dimension(format!(
            "point and grid must have {} coordinates",
            p.n()
        )));
    }
    if !is_feasible(p, xbar)? {
        return Err(Error::Infeasible);
    }
    Ok(())
}

/// First grid index (in enumeration order) where `test` reports a problem.
fn search<F>(spec: &GridSpec, test: F) -> Result<Option<(u64, Counterexample)>>
where
    F: Fn(Vec<Rat>) -> Result<Option<Counterexample>> + Sync,
{
    let hit = (0..spec.total)
        .into_par_iter()
        .map(|i| test(spec.point(i)).map(|r| r.map(|c| (i, c))))
        .find_first(|r| !matches!(r, Ok(None)));
    hit.transpose().map(Option::flatten)
}

/// Looks for a feasible grid point with a strictly smaller objective value.
pub fn grid_local_min(p: &MpdcProblem, xbar: &[Rat], spec: &GridSpec) -> Result<OracleVerdict> {
    require_feasible(p, xbar, spec)?;
    let reference = p.objective_value(xbar)?;
    let hit = search(spec, |y| {
        if !is_feasible(p, &y)? {
            return Ok(None);
        }
        let value = p.objective_value(&y)?;
        Ok((value < reference).then(|| Counterexample {
            point: y,
            evidence: Evidence::Decrease {
                value,
                reference: reference.clone(),
            },
        }))
    })?;
    Ok(OracleVerdict::from_search(OracleKind::LocalMin, spec.total, hit))
}

/// Checks `f(y) ≥ f(x̄) + C‖y − x̄‖²` on every feasible grid point.
pub fn quadratic_growth_check(p: &MpdcProblem, xbar: &[Rat], c: &Rat, spec: &GridSpec) -> Result<OracleVerdict> {
    if !c.is_positive() {
        return Err(Error::Precondition("growth constant must be positive".into()));
    }
    require_feasible(p, xbar, spec)?;
    let fx = p.objective_value(xbar)?;
    let hit = search(spec, |y| {
        if !is_feasible(p, &y)? {
            return Ok(None);
        }
        let value = p.objective_value(&y)?;
        let bound = &fx + c * norm2_sq(&sub(&y, xbar));
        Ok((value < bound).then_some(Counterexample {
            point: y,
            evidence: Evidence::GrowthViolation { value, bound },
        }))
    })?;
    Ok(OracleVerdict::from_search(
        OracleKind::QuadraticGrowth { c: c.clone() },
        spec.total,
        hit,
    ))
}

/// Looks for another S-stationary point on the grid.
pub fn isolatedness_check(p: &MpdcProblem, xbar: &[Rat], spec: &GridSpec) -> Result<OracleVerdict> {
    require_feasible(p, xbar, spec)?;
    let hit = search(spec, |y| {
        if y == xbar || !is_feasible(p, &y)? {
            return Ok(None);
        }
        let cert = solve_s_stationarity(p, &y)?;
        if !cert.solvable {
            return Ok(None);
        }
        let multiplier = cert.multipliers.map(|m| m.particular).unwrap_or_default();
        Ok(Some(Counterexample {
            point: y,
            evidence: Evidence::StationaryPoint { multiplier },
        }))
    })?;
    Ok(OracleVerdict::from_search(OracleKind::Isolatedness, spec.total, hit))
}

/// Walks `z + t·w` for `t = 1/2, 1/4, …, 1/2^steps` and checks membership.
///
/// Directions outside `T_D(z)` are rejected before stepping. For a tangent
/// `w` the straight line stays in `D` once `t` is small enough, so a failure
/// on a short prefix of the steps only means `w` was taken too long.
pub fn tangent_realization_check(d: &DisjunctiveSet, z: &[Rat], w: &[Rat], steps: usize) -> Result<OracleVerdict> {
    if w.len() != d.dim() {
        return Err(Error::Dimension(format!("direction must have {} coordinates", d.dim())));
    }
    let kind = OracleKind::TangentRealization { steps };
    if !tangent_union(d, z)?.contains(w) {
        return Ok(OracleVerdict {
            kind,
            passed: false,
            counterexample: Some(Counterexample {
                point: w.to_vec(),
                evidence: Evidence::NotTangent,
            }),
            samples_examined: 0,
        });
    }
    let mut t = Rat::new(1.into(), 2.into());
    for k in 0..steps {
        let y = add(z, &scale(w, &t));
        if !d.contains(&y) {
            return Ok(OracleVerdict {
                kind,
                passed: false,
                counterexample: Some(Counterexample {
                    point: y,
                    evidence: Evidence::StepInfeasible { t },
                }),
                samples_examined: k as u64 + 1,
            });
        }
        t /= Rat::from_integer(2.into());
    }
    Ok(OracleVerdict {
        kind,
        passed: true,
        counterexample: None,
        samples_examined: steps as u64,
    })
}

/// `true` when `x` lies on the grid.
pub fn on_grid(spec: &GridSpec, x: &[Rat]) -> bool {
    let k = Rat::from_integer(((spec.points_per_axis - 1) as i64).into());
    x.len() == spec.center.len()
        && x.iter().zip(&spec.center).all(|(xi, ci)| {
            let s = (xi - ci) / &spec.radius;
            let pos = (s + Rat::from_integer(1.into())) * &k / Rat::from_integer(2.into());
            pos.is_integer() && !pos.is_negative() && pos <= k
        })
}
