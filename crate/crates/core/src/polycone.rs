//! Polyhedra and polyhedral cones.
//!
//! A cone is held either as `{z | A z ≤ 0, C z = 0}` ([`ConeH`]) or as the
//! conic hull of rays plus the span of lines ([`ConeV`]). The two forms are
//! interconverted by an incremental double description: inequalities are
//! inserted one at a time and adjacent ray pairs straddling the new
//! hyperplane are combined. Adjacency uses the combinatorial test on tight
//! sets, which is exact because the ray list is kept minimal.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactla::{
    axpy, dot, fmt_vec, is_zero_vec, neg, normalize_leading, rank_nullspace, scale, solve_affine, sub, AffineSolution,
    Rat, RatMat, Subspace,
};

fn check_len(what: &str, v: &[Rat], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::Dimension(format!(
            "{what} has length {}, expected {dim}",
            v.len()
        )));
    }
    Ok(())
}

fn check_cols(what: &str, m: &RatMat, dim: usize) -> Result<()> {
    if m.cols() != dim {
        return Err(Error::Dimension(format!(
            "{what} has {} columns, expected {dim}",
            m.cols()
        )));
    }
    Ok(())
}

/// `{z | A z ≤ b, C z = d}`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polyhedron {
    dim: usize,
    a: RatMat,
    b: Vec<Rat>,
    c: RatMat,
    d: Vec<Rat>,
}

/// Result of locating a point relative to a polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Activity {
    NotMember,
    /// Indices of inequality rows holding with equality.
    Active(Vec<usize>),
}

/// Inhomogeneous Minkowski-Weyl decomposition:
/// `conv(points) + cone(rays) + span(lines)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyhedronV {
    pub points: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Rat>>,
    pub lines: Vec<Vec<Rat>>,
}

impl Polyhedron {
    pub fn new(dim: usize, a: RatMat, b: Vec<Rat>, c: RatMat, d: Vec<Rat>) -> Result<Self> {
        check_cols("inequality matrix", &a, dim)?;
        check_cols("equation matrix", &c, dim)?;
        if a.rows() != b.len() {
            return Err(Error::Dimension(format!(
                "inequality matrix has {} rows but right-hand side has {} entries",
                a.rows(),
                b.len()
            )));
        }
        if c.rows() != d.len() {
            return Err(Error::Dimension(format!(
                "equation matrix has {} rows but right-hand side has {} entries",
                c.rows(),
                d.len()
            )));
        }
        Ok(Self { dim, a, b, c, d })
    }

    /// Convenience constructor from row lists.
    pub fn from_rows(dim: usize, ineq: &[(Vec<Rat>, Rat)], eq: &[(Vec<Rat>, Rat)]) -> Result<Self> {
        let a_rows: Vec<Vec<Rat>> = ineq.iter().map(|(r, _)| r.clone()).collect();
        let c_rows: Vec<Vec<Rat>> = eq.iter().map(|(r, _)| r.clone()).collect();
        Self::new(
            dim,
            RatMat::try_from_rows(dim, &a_rows)?,
            ineq.iter().map(|(_, v)| v.clone()).collect(),
            RatMat::try_from_rows(dim, &c_rows)?,
            eq.iter().map(|(_, v)| v.clone()).collect(),
        )
    }

    pub fn whole_space(dim: usize) -> Self {
        Self {
            dim,
            a: RatMat::zeros(0, dim),
            b: Vec::new(),
            c: RatMat::zeros(0, dim),
            d: Vec::new(),
        }
    }

    /// The polyhedral cone `{z | A z ≤ 0, C z = 0}` viewed as a polyhedron.
    pub fn from_cone(cone: &ConeH) -> Self {
        Self {
            dim: cone.dim,
            b: vec![Rat::zero(); cone.a.rows()],
            d: vec![Rat::zero(); cone.c.rows()],
            a: cone.a.clone(),
            c: cone.c.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> &RatMat {
        &self.a
    }

    pub fn b(&self) -> &[Rat] {
        &self.b
    }

    pub fn c(&self) -> &RatMat {
        &self.c
    }

    pub fn d(&self) -> &[Rat] {
        &self.d
    }

    pub fn contains(&self, z: &[Rat]) -> bool {
        matches!(active_set(self, z), Ok(Activity::Active(_)))
    }

    /// Decomposition into points, rays and lines; `None` when empty.
    pub fn minkowski_weyl(&self) -> Option<PolyhedronV> {
        let m = self.dim;
        // homogenize: A z - b t ≤ 0, C z - d t = 0, -t ≤ 0
        let lift = |mat: &RatMat, rhs: &[Rat]| -> Vec<Vec<Rat>> {
            (0..mat.rows())
                .map(|i| {
                    let mut r = mat.row(i).to_vec();
                    r.push(-rhs[i].clone());
                    r
                })
                .collect()
        };
        let mut a_rows = lift(&self.a, &self.b);
        let mut t_row = vec![Rat::zero(); m + 1];
        t_row[m] = Rat::from_integer((-1).into());
        a_rows.push(t_row);
        let c_rows = lift(&self.c, &self.d);
        let cone = ConeH::new(
            m + 1,
            RatMat::from_rows(m + 1, &a_rows),
            RatMat::from_rows(m + 1, &c_rows),
        )
        .expect("lifted dimensions agree");
        let v = cone.to_v();
        let mut points = Vec::new();
        let mut rays = Vec::new();
        for r in v.rays() {
            let t = &r[m];
            if t.is_positive() {
                points.push(scale(&r[..m], &t.recip()));
            } else {
                rays.push(r[..m].to_vec());
            }
        }
        if points.is_empty() {
            return None;
        }
        points.sort();
        points.dedup();
        Some(PolyhedronV {
            points,
            rays,
            lines: v.lines().iter().map(|l| l[..m].to_vec()).collect(),
        })
    }
}

/// Active inequality rows of `q` at `z`, or [`Activity::NotMember`].
pub fn active_set(q: &Polyhedron, z: &[Rat]) -> Result<Activity> {
    check_len("point", z, q.dim)?;
    for i in 0..q.c.rows() {
        if dot(q.c.row(i), z) != q.d[i] {
            return Ok(Activity::NotMember);
        }
    }
    let mut active = Vec::new();
    for i in 0..q.a.rows() {
        let v = dot(q.a.row(i), z);
        if v > q.b[i] {
            return Ok(Activity::NotMember);
        }
        if v == q.b[i] {
            active.push(i);
        }
    }
    Ok(Activity::Active(active))
}

fn active_rows(q: &Polyhedron, z: &[Rat]) -> Result<Vec<usize>> {
    match active_set(q, z)? {
        Activity::NotMember => Err(Error::NotInSet),
        Activity::Active(rows) => Ok(rows),
    }
}

/// `T_Q(z)`: the active inequality rows and all equation rows.
pub fn tangent_cone_poly(q: &Polyhedron, z: &[Rat]) -> Result<ConeH> {
    let rows = active_rows(q, z)?;
    Ok(ConeH {
        dim: q.dim,
        a: q.a.select_rows(&rows),
        c: q.c.clone(),
    })
}

/// `N̂_Q(z)`: rays are the active inequality rows, lines the equation rows.
pub fn frechet_normal_cone_poly(q: &Polyhedron, z: &[Rat]) -> Result<ConeV> {
    let rows = active_rows(q, z)?;
    ConeV::new(
        q.dim,
        rows.iter().map(|&i| q.a.row(i).to_vec()).collect(),
        q.c.row_vecs(),
    )
}

/// `{z | A z ≤ 0, C z = 0}`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeH {
    dim: usize,
    a: RatMat,
    c: RatMat,
}

impl ConeH {
    pub fn new(dim: usize, a: RatMat, c: RatMat) -> Result<Self> {
        check_cols("inequality matrix", &a, dim)?;
        check_cols("equation matrix", &c, dim)?;
        Ok(Self { dim, a, c })
    }

    pub fn from_rows(dim: usize, ineq: &[Vec<Rat>], eq: &[Vec<Rat>]) -> Result<Self> {
        Self::new(dim, RatMat::try_from_rows(dim, ineq)?, RatMat::try_from_rows(dim, eq)?)
    }

    pub fn full(dim: usize) -> Self {
        Self {
            dim,
            a: RatMat::zeros(0, dim),
            c: RatMat::zeros(0, dim),
        }
    }

    /// The cone `{0}`.
    pub fn origin(dim: usize) -> Self {
        Self {
            dim,
            a: RatMat::zeros(0, dim),
            c: RatMat::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> &RatMat {
        &self.a
    }

    pub fn c(&self) -> &RatMat {
        &self.c
    }

    pub fn contains(&self, z: &[Rat]) -> bool {
        z.len() == self.dim
            && (0..self.c.rows()).all(|i| dot(self.c.row(i), z).is_zero())
            && (0..self.a.rows()).all(|i| !dot(self.a.row(i), z).is_positive())
    }

    /// Whether the whole line through `z` lies in the cone.
    pub fn contains_line(&self, z: &[Rat]) -> bool {
        self.contains(z) && self.contains(&neg(z))
    }

    /// Intersection, by stacking rows.
    pub fn intersect(&self, other: &ConeH) -> Result<ConeH> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "cannot intersect cones in dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(ConeH {
            dim: self.dim,
            a: self.a.vstack(&other.a),
            c: self.c.vstack(&other.c),
        })
    }

    /// Adds the equation `row · z = 0`.
    pub fn with_equation(&self, row: &[Rat]) -> Result<ConeH> {
        check_len("equation row", row, self.dim)?;
        Ok(ConeH {
            dim: self.dim,
            a: self.a.clone(),
            c: self.c.vstack(&RatMat::from_rows(self.dim, &[row.to_vec()])),
        })
    }

    /// `{d | J d ∈ self}` for a matrix `J` with `self.dim()` rows.
    pub fn preimage(&self, j: &RatMat) -> Result<ConeH> {
        if j.rows() != self.dim {
            return Err(Error::Dimension(format!(
                "map has {} rows, cone lives in dimension {}",
                j.rows(),
                self.dim
            )));
        }
        Ok(ConeH {
            dim: j.cols(),
            a: self.a.mul(j),
            c: self.c.mul(j),
        })
    }

    /// Polar cone, generated by the inequality rows (rays) and equation rows
    /// (lines).
    pub fn polar_v(&self) -> ConeV {
        ConeV::new(self.dim, self.a.row_vecs(), self.c.row_vecs()).expect("rows have cone dimension")
    }

    pub fn to_v(&self) -> ConeV {
        double_description(self)
    }
}

/// `cone(rays) + span(lines)`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeV {
    dim: usize,
    rays: Vec<Vec<Rat>>,
    lines: Vec<Vec<Rat>>,
}

impl ConeV {
    /// Zero rays are dropped, rays are scaled to a leading `±1` and
    /// deduplicated, and lines are reduced to an echelon basis.
    pub fn new(dim: usize, rays: Vec<Vec<Rat>>, lines: Vec<Vec<Rat>>) -> Result<Self> {
        for r in rays.iter().chain(&lines) {
            check_len("generator", r, dim)?;
        }
        let mut rays: Vec<Vec<Rat>> = rays
            .iter()
            .filter(|r| !is_zero_vec(r))
            .map(|r| normalize_leading(r))
            .collect();
        rays.sort();
        rays.dedup();
        let lines = Subspace::span(dim, &lines)?.basis().to_vec();
        Ok(Self { dim, rays, lines })
    }

    /// The cone `{0}`.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            rays: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn full(dim: usize) -> Self {
        Self {
            dim,
            rays: Vec::new(),
            lines: Subspace::full(dim).basis().to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<Rat>] {
        &self.rays
    }

    pub fn lines(&self) -> &[Vec<Rat>] {
        &self.lines
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty() && self.lines.is_empty()
    }

    /// Rays followed by lines and their negatives.
    pub fn generators(&self) -> Vec<Vec<Rat>> {
        let mut out = self.rays.clone();
        for l in &self.lines {
            out.push(l.clone());
            out.push(neg(l));
        }
        out
    }

    /// Minkowski sum.
    pub fn sum(&self, other: &ConeV) -> Result<ConeV> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "cannot add cones in dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        let mut rays = self.rays.clone();
        rays.extend(other.rays.iter().cloned());
        let mut lines = self.lines.clone();
        lines.extend(other.lines.iter().cloned());
        ConeV::new(self.dim, rays, lines)
    }

    /// Membership, decided through the H-form.
    pub fn contains(&self, z: &[Rat]) -> bool {
        self.to_h().contains(z)
    }

    /// Image under a linear map with `self.dim()` columns.
    pub fn image(&self, j: &RatMat) -> Result<ConeV> {
        if j.cols() != self.dim {
            return Err(Error::Dimension(format!(
                "map has {} columns, cone lives in dimension {}",
                j.cols(),
                self.dim
            )));
        }
        ConeV::new(
            j.rows(),
            self.rays.iter().map(|r| j.mul_vec(r)).collect(),
            self.lines.iter().map(|l| j.mul_vec(l)).collect(),
        )
    }

    pub fn to_h(&self) -> ConeH {
        // K = (K°)°, and K° is given in H-form by the generators.
        let polar_v = double_description(&polar(self));
        ConeH {
            dim: self.dim,
            a: RatMat::from_rows(self.dim, &polar_v.rays),
            c: RatMat::from_rows(self.dim, &polar_v.lines),
        }
    }

    /// Canonical form: rays orthogonal to the lines, normalized, sorted.
    fn canonical(dim: usize, rays: Vec<Vec<Rat>>, lines: Vec<Vec<Rat>>) -> ConeV {
        let lines = Subspace::span(dim, &lines).expect("line dimensions agree");
        let rays: Vec<Vec<Rat>> = rays.iter().map(|r| project_out(r, &lines)).collect();
        ConeV::new(dim, rays, lines.basis().to_vec()).expect("generator dimensions agree")
    }
}

impl std::fmt::Display for ConeV {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rays: Vec<String> = self.rays.iter().map(|r| fmt_vec(r)).collect();
        let lines: Vec<String> = self.lines.iter().map(|l| fmt_vec(l)).collect();
        write!(f, "rays {{{}}} lines {{{}}}", rays.join(", "), lines.join(", "))
    }
}

/// Component of `v` orthogonal to `s`.
fn project_out(v: &[Rat], s: &Subspace) -> Vec<Rat> {
    if s.is_trivial() {
        return v.to_vec();
    }
    let basis = s.basis_rows();
    let gram = basis.mul(&basis.transpose());
    let rhs = basis.mul_vec(v);
    match solve_affine(&gram, &rhs).expect("gram system is square") {
        AffineSolution::Solution { point, .. } => {
            let mut out = v.to_vec();
            for (coef, b) in point.iter().zip(s.basis()) {
                out = axpy(&out, &-coef, b);
            }
            out
        }
        AffineSolution::Inconsistent => unreachable!("gram matrix of a basis is invertible"),
    }
}

/// Polar cone of a finitely generated cone.
pub fn polar(c: &ConeV) -> ConeH {
    ConeH {
        dim: c.dim,
        a: RatMat::from_rows(c.dim, &c.rays),
        c: RatMat::from_rows(c.dim, &c.lines),
    }
}

/// Lineality space `K ∩ (−K)`, the nullspace of the stacked rows.
pub fn lineality_space(c: &ConeH) -> Subspace {
    rank_nullspace(&c.a.vstack(&c.c)).1
}

/// `span K = K − K`.
pub fn span_of_cone(c: &ConeV) -> Subspace {
    let mut vs = c.rays.clone();
    vs.extend(c.lines.iter().cloned());
    Subspace::span(c.dim, &vs).expect("generator dimensions agree")
}

/// Tangent cone to the cone `c` at `w`, or `None` when `w ∉ c`.
///
/// For a polyhedral set this is also its second-order tangent set
/// `T²_K(0; w)` in direction `w`.
pub fn cone_tangent_at_direction(c: &ConeH, w: &[Rat]) -> Result<Option<ConeH>> {
    check_len("direction", w, c.dim)?;
    if !c.contains(w) {
        return Ok(None);
    }
    let rows: Vec<usize> = (0..c.a.rows()).filter(|&i| dot(c.a.row(i), w).is_zero()).collect();
    Ok(Some(ConeH {
        dim: c.dim,
        a: c.a.select_rows(&rows),
        c: c.c.clone(),
    }))
}

/// Either representation of a polyhedral cone.
pub trait PolyCone {
    fn ambient_dim(&self) -> usize;
    fn v_form(&self) -> ConeV;
    fn h_form(&self) -> ConeH;
}

impl PolyCone for ConeH {
    fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn v_form(&self) -> ConeV {
        self.to_v()
    }

    fn h_form(&self) -> ConeH {
        self.clone()
    }
}

impl PolyCone for ConeV {
    fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn v_form(&self) -> ConeV {
        self.clone()
    }

    fn h_form(&self) -> ConeH {
        self.to_h()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeRelation {
    Subset,
    Equal,
}

fn v_inside_h(v: &ConeV, h: &ConeH) -> bool {
    v.rays.iter().all(|r| h.contains(r)) && v.lines.iter().all(|l| h.contains_line(l))
}

/// Decides `a ⊆ b` or `a = b` exactly.
pub fn cone_relation(a: &dyn PolyCone, b: &dyn PolyCone, rel: ConeRelation) -> Result<bool> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::Dimension(format!(
            "cones live in dimensions {} and {}",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    let sub = v_inside_h(&a.v_form(), &b.h_form());
    Ok(match rel {
        ConeRelation::Subset => sub,
        ConeRelation::Equal => sub && v_inside_h(&b.v_form(), &a.h_form()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    fn upto(n: usize, k: usize) -> Self {
        let mut b = Bits::empty(n);
        for i in 0..k {
            b.insert(i);
        }
        b
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn is_superset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

/// V-form of `{z | A z ≤ 0, C z = 0}` by incremental double description.
pub fn double_description(cone: &ConeH) -> ConeV {
    let dim = cone.dim;
    let nineq = cone.a.rows();
    let mut lines: Vec<Vec<Rat>> = rank_nullspace(&cone.c).1.basis().to_vec();
    let mut rays: Vec<(Vec<Rat>, Bits)> = Vec::new();

    for k in 0..nineq {
        let a = cone.a.row(k);
        if let Some(pos) = lines.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l0 = lines.remove(pos);
            let mut al0 = dot(a, &l0);
            if al0.is_positive() {
                l0 = neg(&l0);
                al0 = -al0;
            }
            for l in &mut lines {
                let s = dot(a, l) / &al0;
                if !s.is_zero() {
                    *l = axpy(l, &-s, &l0);
                }
            }
            for (r, tight) in &mut rays {
                let s = dot(a, r) / &al0;
                if !s.is_zero() {
                    *r = axpy(r, &-s, &l0);
                }
                tight.insert(k);
            }
            rays.push((l0, Bits::upto(nineq, k)));
            continue;
        }

        let vals: Vec<Rat> = rays.iter().map(|(r, _)| dot(a, r)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut next: Vec<(Vec<Rat>, Bits)> = Vec::new();
        for (i, (r, tight)) in rays.iter().enumerate() {
            if vals[i].is_zero() {
                let mut t = tight.clone();
                t.insert(k);
                next.push((r.clone(), t));
            } else if vals[i].is_negative() {
                next.push((r.clone(), tight.clone()));
            }
        }
        for &p in &plus {
            for &n in &minus {
                let common = rays[p].1.and(&rays[n].1);
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(i, (_, t))| i == p || i == n || !t.is_superset_of(&common));
                if !adjacent {
                    continue;
                }
                let combo = sub(&scale(&rays[n].0, &vals[p]), &scale(&rays[p].0, &vals[n]));
                let mut t = common;
                t.insert(k);
                next.push((normalize_leading(&combo), t));
            }
        }
        rays = next;
    }

    ConeV::canonical(dim, rays.into_iter().map(|(r, _)| r).collect(), lines)
}
