//! Finite unions of polyhedra and their variational geometry.
//!
//! A union is never convexified: tangent sets are kept as explicit piece
//! lists ([`ConeUnion`]) and every verdict quantifies over the pieces.
//! Branch indices are 0-based.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactla::{add, neg, subspace_combine, CombineKind, Rat, RatMat, Subspace};
use crate::polycone::{
    active_set, cone_tangent_at_direction, frechet_normal_cone_poly, lineality_space, polar, span_of_cone,
    tangent_cone_poly, Activity, ConeH, ConeV, Polyhedron,
};

/// `D₁ ∪ … ∪ D_r` with every `D_i` a polyhedron in the same space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DisjunctiveSet {
    dim: usize,
    branches: Vec<Polyhedron>,
}

impl DisjunctiveSet {
    pub fn new(dim: usize, branches: Vec<Polyhedron>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidProblem(
                "a disjunctive set needs at least one branch".into(),
            ));
        }
        if let Some((i, b)) = branches.iter().enumerate().find(|(_, b)| b.dim() != dim) {
            return Err(Error::Dimension(format!(
                "branch {i} lives in dimension {}, expected {dim}",
                b.dim()
            )));
        }
        Ok(Self { dim, branches })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branches(&self) -> &[Polyhedron] {
        &self.branches
    }

    pub fn contains(&self, z: &[Rat]) -> bool {
        self.branches.iter().any(|b| b.contains(z))
    }
}

/// Union of polyhedral cones, kept piece by piece.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeUnion {
    dim: usize,
    pieces: Vec<ConeH>,
}

impl ConeUnion {
    pub fn new(dim: usize, pieces: Vec<ConeH>) -> Result<Self> {
        if let Some(p) = pieces.iter().find(|p| p.dim() != dim) {
            return Err(Error::Dimension(format!(
                "piece lives in dimension {}, expected {dim}",
                p.dim()
            )));
        }
        Ok(Self { dim, pieces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[ConeH] {
        &self.pieces
    }

    /// True for the empty union (not the zero cone).
    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, z: &[Rat]) -> bool {
        self.pieces.iter().any(|p| p.contains(z))
    }

    /// `{d | J d ∈ self}`, piece by piece.
    pub fn preimage(&self, j: &RatMat) -> Result<ConeUnion> {
        Ok(ConeUnion {
            dim: j.cols(),
            pieces: self.pieces.iter().map(|p| p.preimage(j)).collect::<Result<_>>()?,
        })
    }

    /// V-forms of all pieces, computed in parallel.
    pub fn v_pieces(&self) -> Vec<ConeV> {
        self.pieces.par_iter().map(ConeH::to_v).collect()
    }
}

fn check_point(d: &DisjunctiveSet, z: &[Rat]) -> Result<()> {
    if z.len() != d.dim {
        return Err(Error::Dimension(format!(
            "point has length {}, expected {}",
            z.len(),
            d.dim
        )));
    }
    Ok(())
}

/// Indices of the branches containing `z`; empty iff `z ∉ D`.
pub fn active_branches(d: &DisjunctiveSet, z: &[Rat]) -> Result<Vec<usize>> {
    check_point(d, z)?;
    let mut out = Vec::new();
    for (i, b) in d.branches.iter().enumerate() {
        if let Activity::Active(_) = active_set(b, z)? {
            out.push(i);
        }
    }
    Ok(out)
}

fn active_nonempty(d: &DisjunctiveSet, z: &[Rat]) -> Result<Vec<usize>> {
    let act = active_branches(d, z)?;
    if act.is_empty() {
        return Err(Error::NotInSet);
    }
    Ok(act)
}

/// `T_D(z) = ∪ T_{D_i}(z)` over the active branches.
pub fn tangent_union(d: &DisjunctiveSet, z: &[Rat]) -> Result<ConeUnion> {
    let pieces = active_nonempty(d, z)?
        .into_iter()
        .map(|i| tangent_cone_poly(&d.branches[i], z))
        .collect::<Result<_>>()?;
    Ok(ConeUnion { dim: d.dim, pieces })
}

/// `N̂_D(z) = ∩ N̂_{D_i}(z)` in H-form, each `N̂_{D_i}` obtained by polarizing
/// the V-form of `T_{D_i}(z)`.
pub fn frechet_normal_disjunctive(d: &DisjunctiveSet, z: &[Rat]) -> Result<ConeH> {
    let tangents = tangent_union(d, z)?;
    let polars: Vec<ConeH> = tangents.v_pieces().iter().map(polar).collect();
    let mut out = ConeH::full(d.dim);
    for p in &polars {
        out = out.intersect(p)?;
    }
    Ok(out)
}

/// Branchwise Fréchet normal cones. Their union is an upper estimate of the
/// limiting normal cone to `D` at `z`, exact when `D` has a single convex
/// branch.
pub fn limiting_normal_upper(d: &DisjunctiveSet, z: &[Rat]) -> Result<Vec<ConeV>> {
    active_nonempty(d, z)?
        .into_iter()
        .map(|i| frechet_normal_cone_poly(&d.branches[i], z))
        .collect()
}

/// `T²_D(z; w)` as the union of `T_{T_{D_i}(z)}(w)` over the active branches
/// whose tangent cone contains `w`. Empty iff `w ∉ T_D(z)`.
pub fn second_order_tangent_union(d: &DisjunctiveSet, z: &[Rat], w: &[Rat]) -> Result<ConeUnion> {
    check_point(d, w)?;
    let tangents = tangent_union(d, z)?;
    let mut pieces = Vec::new();
    for t in &tangents.pieces {
        if let Some(p) = cone_tangent_at_direction(t, w)? {
            pieces.push(p);
        }
    }
    Ok(ConeUnion { dim: d.dim, pieces })
}

/// `Σ span N̂_{D_i}(z)` over the active branches.
pub fn sum_of_spans(d: &DisjunctiveSet, z: &[Rat]) -> Result<Subspace> {
    let spans: Vec<Subspace> = limiting_normal_upper(d, z)?.iter().map(span_of_cone).collect();
    subspace_combine(CombineKind::Sum, d.dim, &spans)
}

fn linealities(d: &DisjunctiveSet, z: &[Rat]) -> Result<Vec<Subspace>> {
    Ok(tangent_union(d, z)?.pieces.iter().map(lineality_space).collect())
}

/// `∩ lineality(T_{D_i}(z))` over the active branches.
pub fn intersect_linealities(d: &DisjunctiveSet, z: &[Rat]) -> Result<Subspace> {
    subspace_combine(CombineKind::Intersection, d.dim, &linealities(d, z)?)
}

/// `Σ lineality(T_{D_i}(z))` over the active branches.
pub fn sum_of_linealities(d: &DisjunctiveSet, z: &[Rat]) -> Result<Subspace> {
    subspace_combine(CombineKind::Sum, d.dim, &linealities(d, z)?)
}

/// Outcome of testing `K + L ⊆ K` for a cone union `K` and subspace `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Invariance {
    /// `L` lies in the lineality space of every piece.
    Holds,
    /// `generator + direction` is outside every piece.
    Violated {
        generator: Vec<Rat>,
        direction: Vec<Rat>,
        vector: Vec<Rat>,
    },
    /// Neither certificate was found.
    Undecided,
}

/// Tests `K + L ⊆ K`. A proof is attempted first (`L` inside every
/// piece's lineality space); otherwise every piece generator, and the
/// origin, is shifted by `±` each basis vector of `L` looking for a point
/// outside the union.
pub fn subspace_invariance(k: &ConeUnion, l: &Subspace) -> Result<Invariance> {
    if l.ambient_dim() != k.dim {
        return Err(Error::Dimension(format!(
            "subspace lives in dimension {}, union in {}",
            l.ambient_dim(),
            k.dim
        )));
    }
    if k.pieces.iter().all(|p| l.is_subspace_of(&lineality_space(p))) {
        return Ok(Invariance::Holds);
    }
    let mut starts = vec![vec![Rat::from_integer(0.into()); k.dim]];
    for v in k.v_pieces() {
        starts.extend(v.generators());
    }
    for g in &starts {
        if !k.contains(g) {
            continue;
        }
        for b in l.basis() {
            for dir in [b.clone(), neg(b)] {
                let v = add(g, &dir);
                if !k.contains(&v) {
                    return Ok(Invariance::Violated {
                        generator: g.clone(),
                        direction: dir,
                        vector: v,
                    });
                }
            }
        }
    }
    Ok(Invariance::Undecided)
}
