//! Exact rational linear algebra.
//!
//! Everything downstream (cone conversions, constraint qualification
//! verdicts, multiplier sets) reduces to rank, nullspace and affine
//! solves carried out here. Elimination always pivots on the first nonzero
//! column and the first nonzero row below the current pivot row, so every
//! basis produced by this module is reproducible.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type Rat = BigRational;

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// `p/q` as a rational. Panics when `q == 0`.
pub fn frac(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_vec(values: &[i64]) -> Vec<Rat> {
    values.iter().map(|&v| int(v)).collect()
}

/// Parses `"p"`, `"-p"` or `"p/q"` (surrounding whitespace allowed).
pub fn parse_rat(text: &str) -> Option<Rat> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rat::new(num, den))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn fmt_vec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_rat).collect();
    format!("({})", parts.join(", "))
}

pub fn to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn zeros(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vec<Rat> {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(v: &[Rat], s: &Rat) -> Vec<Rat> {
    v.iter().map(|x| x * s).collect()
}

pub fn neg(v: &[Rat]) -> Vec<Rat> {
    v.iter().map(|x| -x).collect()
}

/// `a + s * b`
pub fn axpy(a: &[Rat], s: &Rat, b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn norm2_sq(v: &[Rat]) -> Rat {
    dot(v, v)
}

/// Scales `v` so that its first nonzero coordinate is `±1`.
pub fn normalize_leading(v: &[Rat]) -> Vec<Rat> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(lead) => {
            let s = lead.abs().recip();
            scale(v, &s)
        }
        None => v.to_vec(),
    }
}

/// Flips the sign of `v` so that its first nonzero coordinate is positive.
fn orient_leading_positive(mut v: Vec<Rat>) -> Vec<Rat> {
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in &mut v {
            *x = -&*x;
        }
    }
    v
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rat::one();
        }
        m
    }

    /// Builds a matrix from row vectors. `cols` fixes the width when there
    /// are no rows.
    pub fn try_from_rows(cols: usize, rows: &[Vec<Rat>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row.iter().cloned());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Like [`RatMat::try_from_rows`] but panics on ragged input; meant for
    /// rows produced internally.
    pub fn from_rows(cols: usize, rows: &[Vec<Rat>]) -> Self {
        Self::try_from_rows(cols, rows).expect("ragged matrix rows")
    }

    pub fn from_int_rows(cols: usize, rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Rat>> = rows.iter().map(|r| rat_vec(r)).collect();
        Self::from_rows(cols, &rows)
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Rat>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column {j} has wrong length");
            for (i, v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scaled(&self, s: &Rat) -> RatMat {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// `v^T M v`
    pub fn quadratic_form(&self, v: &[Rat]) -> Rat {
        dot(v, &self.mul_vec(v))
    }

    /// `v^T M w`
    pub fn bilinear_form(&self, v: &[Rat], w: &[Rat]) -> Rat {
        dot(v, &self.mul_vec(w))
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RatMat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let cols = self.cols + other.cols;
        let mut m = Self::zeros(self.rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[i * cols + j] = self.get(i, j).clone();
            }
            for j in 0..other.cols {
                m.data[i * cols + self.cols + j] = other.get(i, j).clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> RatMat {
        let rows: Vec<Vec<Rat>> = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        RatMat::from_rows(self.cols, &rows)
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (RatMat, Vec<usize>) {
        let mut a = self.clone();
        let (m, n) = (a.rows, a.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r >= m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..n {
                    a.data.swap(p * n + j, r * n + j);
                }
            }
            let inv = a.get(r, c).recip();
            for j in c..n {
                let v = &a.data[r * n + j] * &inv;
                a.data[r * n + j] = v;
            }
            for i in 0..m {
                if i == r || a.get(i, c).is_zero() {
                    continue;
                }
                let factor = a.get(i, c).clone();
                for j in c..n {
                    let v = &a.data[i * n + j] - &factor * &a.data[r * n + j];
                    a.data[i * n + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

impl fmt::Display for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(fmt_rat).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Linear subspace of `Q^ambient_dim` given by an independent basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rat>>,
}

impl Subspace {
    /// The trivial subspace `{0}`.
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    /// The whole space with its standard basis.
    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: (0..ambient_dim).map(|i| unit(ambient_dim, i)).collect(),
        }
    }

    /// Span of arbitrary vectors; the basis is the nonzero rows of the
    /// reduced echelon form of the stacked vectors.
    pub fn span(ambient_dim: usize, vectors: &[Vec<Rat>]) -> Result<Self> {
        let m = RatMat::try_from_rows(ambient_dim, vectors)?;
        let (r, pivots) = m.rref();
        Ok(Self {
            ambient_dim,
            basis: (0..pivots.len()).map(|i| r.row(i).to_vec()).collect(),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// Basis vectors as the rows of a matrix.
    pub fn basis_rows(&self) -> RatMat {
        RatMat::from_rows(self.ambient_dim, &self.basis)
    }

    /// Basis vectors as the columns of a matrix.
    pub fn basis_columns(&self) -> RatMat {
        RatMat::from_columns(self.ambient_dim, &self.basis)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        if is_zero_vec(v) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        RatMat::from_rows(self.ambient_dim, &rows).rank() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis.iter().all(|b| other.contains(b))
    }

    /// Set equality (bases may differ).
    pub fn same_as(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other)
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        rank_nullspace(&self.basis_rows()).1
    }
}

/// Rank and nullspace of `m`.
///
/// Each nullspace basis vector sets one free variable to one and the other
/// free variables to zero, then is oriented so its first nonzero entry is
/// positive.
pub fn rank_nullspace(m: &RatMat) -> (usize, Subspace) {
    let n = m.cols();
    let (r, pivots) = m.rref();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let basis = (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = zeros(n);
            v[free] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, free).clone();
            }
            orient_leading_positive(v)
        })
        .collect();
    (pivots.len(), Subspace { ambient_dim: n, basis })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineKind {
    Sum,
    Intersection,
}

/// Sum or intersection of subspaces of `Q^ambient_dim`.
///
/// The empty sum is `{0}` and the empty intersection is the whole space.
pub fn subspace_combine(kind: CombineKind, ambient_dim: usize, parts: &[Subspace]) -> Result<Subspace> {
    if let Some(bad) = parts.iter().find(|p| p.ambient_dim != ambient_dim) {
        return Err(Error::Dimension(format!(
            "subspace of ambient dimension {} combined in dimension {ambient_dim}",
            bad.ambient_dim
        )));
    }
    match kind {
        CombineKind::Sum => {
            let vectors: Vec<Vec<Rat>> = parts.iter().flat_map(|p| p.basis.iter().cloned()).collect();
            Subspace::span(ambient_dim, &vectors)
        }
        CombineKind::Intersection => {
            // (A ∩ B) = (A^⊥ + B^⊥)^⊥
            let normals: Vec<Vec<Rat>> = parts.iter().flat_map(|p| p.orthogonal_complement().basis).collect();
            Ok(rank_nullspace(&RatMat::from_rows(ambient_dim, &normals)).1)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    Inconsistent,
    /// Solution set `point + directions`.
    Solution {
        point: Vec<Rat>,
        directions: Subspace,
    },
}

impl AffineSolution {
    pub fn is_consistent(&self) -> bool {
        matches!(self, AffineSolution::Solution { .. })
    }
}

/// Solves `m x = b`. The particular point sets all free variables to zero.
pub fn solve_affine(m: &RatMat, b: &[Rat]) -> Result<AffineSolution> {
    if b.len() != m.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            m.rows()
        )));
    }
    let n = m.cols();
    let rhs = RatMat::from_columns(m.rows(), &[b.to_vec()]);
    let (r, pivots) = m.hstack(&rhs).rref();
    if pivots.last() == Some(&n) {
        return Ok(AffineSolution::Inconsistent);
    }
    let mut point = zeros(n);
    for (row, &pc) in pivots.iter().enumerate() {
        point[pc] = r.get(row, n).clone();
    }
    Ok(AffineSolution::Solution {
        point,
        directions: rank_nullspace(m).1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_trivial_nullspace() {
        let (rank, ns) = rank_nullspace(&RatMat::identity(2));
        assert_eq!(rank, 2);
        assert!(ns.is_trivial());
    }

    #[test]
    fn rank_one_nullspace() {
        let m = RatMat::from_int_rows(2, &[&[1, 1], &[1, 1]]);
        let (rank, ns) = rank_nullspace(&m);
        assert_eq!(rank, 1);
        assert_eq!(ns.basis(), &[rat_vec(&[1, -1])]);
    }

    #[test]
    fn empty_system_nullspace_is_everything() {
        let m = RatMat::zeros(0, 3);
        let (rank, ns) = rank_nullspace(&m);
        assert_eq!(rank, 0);
        assert_eq!(ns, Subspace::full(3));
    }

    #[test]
    fn sum_of_axes_is_plane() {
        let a = Subspace::span(2, &[unit(2, 0)]).unwrap();
        let b = Subspace::span(2, &[unit(2, 1)]).unwrap();
        let s = subspace_combine(CombineKind::Sum, 2, &[a, b]).unwrap();
        assert!(s.same_as(&Subspace::full(2)));
    }

    #[test]
    fn intersection_of_coordinate_planes() {
        let a = Subspace::span(3, &[unit(3, 0), unit(3, 1)]).unwrap();
        let b = Subspace::span(3, &[unit(3, 1), unit(3, 2)]).unwrap();
        let s = subspace_combine(CombineKind::Intersection, 3, &[a, b]).unwrap();
        assert_eq!(s.basis(), &[unit(3, 1)]);
    }

    #[test]
    fn empty_intersection_is_ambient_space() {
        let s = subspace_combine(CombineKind::Intersection, 3, &[]).unwrap();
        assert!(s.same_as(&Subspace::full(3)));
        let s = subspace_combine(CombineKind::Sum, 3, &[]).unwrap();
        assert!(s.is_trivial());
    }

    #[test]
    fn combine_rejects_mixed_dimensions() {
        let err = subspace_combine(CombineKind::Sum, 2, &[Subspace::full(3)]);
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn solve_identity() {
        let sol = solve_affine(&RatMat::identity(2), &rat_vec(&[3, 5])).unwrap();
        assert_eq!(
            sol,
            AffineSolution::Solution {
                point: rat_vec(&[3, 5]),
                directions: Subspace::zero(2)
            }
        );
    }

    #[test]
    fn solve_underdetermined() {
        let m = RatMat::from_int_rows(2, &[&[1, 1]]);
        let AffineSolution::Solution { point, directions } = solve_affine(&m, &rat_vec(&[2])).unwrap() else {
            panic!("expected a solution");
        };
        assert_eq!(point, rat_vec(&[2, 0]));
        assert_eq!(directions.basis(), &[rat_vec(&[1, -1])]);
    }

    #[test]
    fn solve_contradiction() {
        let m = RatMat::from_int_rows(1, &[&[1], &[1]]);
        assert_eq!(
            solve_affine(&m, &rat_vec(&[0, 1])).unwrap(),
            AffineSolution::Inconsistent
        );
    }

    #[test]
    fn solve_rejects_bad_rhs() {
        assert!(solve_affine(&RatMat::identity(2), &rat_vec(&[1])).is_err());
    }

    #[test]
    fn parse_and_format_rationals() {
        assert_eq!(parse_rat("3/6"), Some(frac(1, 2)));
        assert_eq!(parse_rat(" -4 "), Some(int(-4)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("x"), None);
        assert_eq!(fmt_rat(&frac(-6, 4)), "-3/2");
        assert_eq!(fmt_rat(&int(7)), "7");
    }

    #[test]
    fn rationals_are_reduced() {
        let r = frac(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(frac(0, 5).denom(), &BigInt::from(1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_mat(max_r: usize, max_c: usize) -> impl Strategy<Value = RatMat> {
            (1..=max_r, 1..=max_c).prop_flat_map(|(r, c)| {
                prop::collection::vec((-4i64..=4, 1i64..=3), r * c).prop_map(move |vals| {
                    let rows: Vec<Vec<Rat>> = vals
                        .chunks(c)
                        .map(|ch| ch.iter().map(|&(p, q)| frac(p, q)).collect())
                        .collect();
                    RatMat::from_rows(c, &rows)
                })
            })
        }

        fn subspace_in(n: usize) -> impl Strategy<Value = Subspace> {
            prop::collection::vec(prop::collection::vec(-3i64..=3, n), 0..=n).prop_map(move |vs| {
                let vs: Vec<Vec<Rat>> = vs.iter().map(|v| rat_vec(v)).collect();
                Subspace::span(n, &vs).unwrap()
            })
        }

        proptest! {
            #[test]
            fn rank_equals_transpose_rank(m in small_mat(5, 5)) {
                prop_assert_eq!(m.rank(), m.transpose().rank());
            }

            #[test]
            fn rank_nullity(m in small_mat(5, 5)) {
                let (rank, ns) = rank_nullspace(&m);
                prop_assert_eq!(rank + ns.dim(), m.cols());
                for v in ns.basis() {
                    prop_assert!(is_zero_vec(&m.mul_vec(v)));
                }
            }

            #[test]
            fn dimension_formula((a, b) in (subspace_in(4), subspace_in(4))) {
                let parts = [a.clone(), b.clone()];
                let cap = subspace_combine(CombineKind::Intersection, 4, &parts).unwrap();
                let sum = subspace_combine(CombineKind::Sum, 4, &parts).unwrap();
                prop_assert_eq!(cap.dim() + sum.dim(), a.dim() + b.dim());
                prop_assert!(cap.is_subspace_of(&a) && cap.is_subspace_of(&b));
                prop_assert!(a.is_subspace_of(&sum) && b.is_subspace_of(&sum));
            }

            #[test]
            fn affine_solutions_substitute(
                m in small_mat(4, 4),
                rhs in prop::collection::vec(-5i64..=5, 4),
            ) {
                let b = rat_vec(&rhs[..m.rows()]);
                if let AffineSolution::Solution { point, directions } = solve_affine(&m, &b).unwrap() {
                    prop_assert_eq!(m.mul_vec(&point), b.clone());
                    for d in directions.basis() {
                        prop_assert!(is_zero_vec(&m.mul_vec(d)));
                        prop_assert_eq!(m.mul_vec(&add(&point, d)), b.clone());
                    }
                } else {
                    // inconsistency certificate: b is outside the column space
                    let cols: Vec<Vec<Rat>> = (0..m.cols()).map(|j| m.col(j)).collect();
                    let range = Subspace::span(m.rows(), &cols).unwrap();
                    prop_assert!(!range.contains(&b));
                }
            }
        }
    }
}
