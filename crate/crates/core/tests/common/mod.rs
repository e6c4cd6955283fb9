//! Independent oracles and random instance generators shared by the
//! integration tests.
//!
//! Nothing here calls the double-description code: extreme rays are found
//! by enumerating row subsets, and cone membership by Carathéodory subsets.

#![allow(dead_code)]

use discone_core::disjunctive::DisjunctiveSet;
use discone_core::exactla::{dot, is_zero_vec, rank_nullspace, solve_affine, AffineSolution, Rat, RatMat, Subspace};
use discone_core::expr::parse;
use discone_core::frontends::{ClassProblem, ProblemClass};
use discone_core::polycone::{ConeH, ConeV, Polyhedron};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational with numerator in `-max..=max` and denominator in `1..=max`.
pub fn rand_rat(rng: &mut impl Rng, max: i64) -> Rat {
    Rat::new(rng.gen_range(-max..=max).into(), rng.gen_range(1..=max).into())
}

pub fn rand_vec(rng: &mut impl Rng, dim: usize, max: i64) -> Vec<Rat> {
    (0..dim).map(|_| rand_rat(rng, max)).collect()
}

pub fn rand_int_vec(rng: &mut impl Rng, dim: usize, max: i64) -> Vec<Rat> {
    (0..dim)
        .map(|_| Rat::from_integer(rng.gen_range(-max..=max).into()))
        .collect()
}

/// Random H-cone with at most `max_rows` rows, about one in six an equation.
pub fn random_cone_h(rng: &mut impl Rng, dim: usize, max_rows: usize) -> ConeH {
    let rows = rng.gen_range(0..=max_rows);
    let (mut ineq, mut eq) = (Vec::new(), Vec::new());
    for _ in 0..rows {
        let r = rand_vec(rng, dim, 9);
        if rng.gen_ratio(1, 6) {
            eq.push(r);
        } else {
            ineq.push(r);
        }
    }
    ConeH::from_rows(dim, &ineq, &eq).unwrap()
}

pub fn random_cone_v(rng: &mut impl Rng, dim: usize, max_gens: usize) -> ConeV {
    let k = rng.gen_range(0..=max_gens);
    let (mut rays, mut lines) = (Vec::new(), Vec::new());
    for _ in 0..k {
        let r = rand_vec(rng, dim, 9);
        if rng.gen_ratio(1, 6) {
            lines.push(r);
        } else {
            rays.push(r);
        }
    }
    ConeV::new(dim, rays, lines).unwrap()
}

/// Scales to a leading entry of absolute value one.
pub fn normalize(v: &[Rat]) -> Vec<Rat> {
    match v.iter().find(|x| !x.is_zero()) {
        None => v.to_vec(),
        Some(lead) => {
            let s = lead.abs();
            v.iter().map(|x| x / &s).collect()
        }
    }
}

fn canonical_rays(rays: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut out: Vec<Vec<Rat>> = rays.iter().filter(|r| !is_zero_vec(r)).map(|r| normalize(r)).collect();
    out.sort();
    out.dedup();
    out
}

/// Extreme rays of `K ∩ L^⊥` and the lineality space `L` of an H-cone.
#[derive(Clone, Debug)]
pub struct Canon {
    pub rays: Vec<Vec<Rat>>,
    pub lines: Subspace,
}

impl Canon {
    pub fn same(&self, other: &Canon) -> bool {
        self.rays == other.rays && self.lines.same_as(&other.lines)
    }

    pub fn generators(&self) -> Vec<Vec<Rat>> {
        let mut g = self.rays.clone();
        for l in self.lines.basis() {
            g.push(l.clone());
            g.push(l.iter().map(|x| -x).collect());
        }
        g
    }
}

/// Brute-force extreme rays: every row subset whose tight system has a
/// one-dimensional solution space inside `L^⊥`.
pub fn brute_canon(h: &ConeH) -> Canon {
    let dim = h.dim();
    let a = h.a().row_vecs();
    let mut all = a.clone();
    all.extend(h.c().row_vecs());
    let lines = rank_nullspace(&RatMat::from_rows(dim, &all)).1;
    let mut base = h.c().row_vecs();
    base.extend(lines.basis().iter().cloned());
    let mut rays = Vec::new();
    for mask in 0u32..(1 << a.len()) {
        let mut rows = base.clone();
        rows.extend((0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| a[i].clone()));
        let (_, null) = rank_nullspace(&RatMat::from_rows(dim, &rows));
        if null.dim() != 1 {
            continue;
        }
        let v = null.basis()[0].clone();
        let w: Vec<Rat> = v.iter().map(|x| -x).collect();
        for cand in [v, w] {
            if a.iter().all(|r| !dot(r, &cand).is_positive()) {
                rays.push(cand);
            }
        }
    }
    Canon {
        rays: canonical_rays(&rays),
        lines,
    }
}

pub fn h_equal(a: &ConeH, b: &ConeH) -> bool {
    brute_canon(a).same(&brute_canon(b))
}

/// `z ∈ cone(gens)` by searching linearly independent subsets.
pub fn in_hull(gens: &[Vec<Rat>], z: &[Rat]) -> bool {
    if is_zero_vec(z) {
        return true;
    }
    let dim = z.len();
    let gens: Vec<&Vec<Rat>> = gens.iter().filter(|g| !is_zero_vec(g)).collect();
    let k = gens.len();
    for mask in 1u64..(1 << k) {
        let size = mask.count_ones() as usize;
        if size > dim {
            continue;
        }
        let cols: Vec<Vec<Rat>> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| gens[i].clone()).collect();
        let m = RatMat::from_columns(dim, &cols);
        if m.rank() != size {
            continue;
        }
        if let AffineSolution::Solution { point, .. } = solve_affine(&m, z).unwrap() {
            if point.iter().all(|x| !x.is_negative()) {
                return true;
            }
        }
    }
    false
}

pub fn v_generators(v: &ConeV) -> Vec<Vec<Rat>> {
    let mut g = v.rays().to_vec();
    for l in v.lines() {
        g.push(l.clone());
        g.push(l.iter().map(|x| -x).collect());
    }
    g
}

/// `cone(v) = h` by mutual membership.
pub fn v_equals_h(v: &ConeV, h: &ConeH) -> bool {
    let gens = v_generators(v);
    gens.iter().all(|g| h.contains(g)) && brute_canon(h).generators().iter().all(|g| in_hull(&gens, g))
}

/// Random point with entries in `{-1, -1/2, 0, 1/2, 1}`.
pub fn rand_half_point(rng: &mut impl Rng, n: usize) -> Vec<Rat> {
    (0..n)
        .map(|_| Rat::new(rng.gen_range(-2..=2).into(), 2.into()))
        .collect()
}

/// Random polyhedron containing `z`; with `slack` some rows are inactive.
pub fn random_polyhedron_through(rng: &mut impl Rng, z: &[Rat], rows: usize, eqs: usize, max_slack: i64) -> Polyhedron {
    let dim = z.len();
    let ineq: Vec<(Vec<Rat>, Rat)> = (0..rows)
        .map(|_| {
            let a = rand_int_vec(rng, dim, 3);
            let s = if rng.gen_bool(0.6) {
                0
            } else {
                rng.gen_range(0..=max_slack)
            };
            let b = dot(&a, z) + Rat::from_integer(s.into());
            (a, b)
        })
        .collect();
    let eq: Vec<(Vec<Rat>, Rat)> = (0..eqs)
        .map(|_| {
            let c = rand_int_vec(rng, dim, 2);
            let d = dot(&c, z);
            (c, d)
        })
        .collect();
    Polyhedron::from_rows(dim, &ineq, &eq).unwrap()
}

/// Random union of up to `max_branches` polyhedra; the first contains `z`,
/// later ones may miss it.
pub fn random_union_through(rng: &mut impl Rng, z: &[Rat], max_branches: usize) -> DisjunctiveSet {
    let dim = z.len();
    let k = rng.gen_range(1..=max_branches);
    let branches = (0..k)
        .map(|i| {
            let rows = rng.gen_range(1..=4);
            let eqs = usize::from(rng.gen_ratio(1, 5));
            let p = random_polyhedron_through(rng, z, rows, eqs, 2);
            if i > 0 && rng.gen_ratio(1, 4) {
                let a = rand_int_vec(rng, dim, 2);
                if !is_zero_vec(&a) {
                    let b = dot(&a, z) - Rat::from_integer(1.into());
                    let mut ineq: Vec<(Vec<Rat>, Rat)> = (0..p.a().rows())
                        .map(|r| (p.a().row(r).to_vec(), p.b()[r].clone()))
                        .collect();
                    ineq.push((a, b));
                    let eq: Vec<(Vec<Rat>, Rat)> = (0..p.c().rows())
                        .map(|r| (p.c().row(r).to_vec(), p.d()[r].clone()))
                        .collect();
                    return Polyhedron::from_rows(dim, &ineq, &eq).unwrap();
                }
            }
            p
        })
        .collect();
    DisjunctiveSet::new(dim, branches).unwrap()
}

/// Tangent cone of a polyhedron at `z`, built directly from the active rows.
pub fn tangent_rows(q: &Polyhedron, z: &[Rat]) -> ConeH {
    let ineq: Vec<Vec<Rat>> = (0..q.a().rows())
        .filter(|&i| dot(q.a().row(i), z) == q.b()[i])
        .map(|i| q.a().row(i).to_vec())
        .collect();
    ConeH::from_rows(q.dim(), &ineq, &q.c().row_vecs()).unwrap()
}

/// Nonnegative integer combination of the cone's canonical generators.
pub fn random_member(rng: &mut impl Rng, c: &Canon, dim: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); dim];
    for g in c.generators() {
        let t = Rat::from_integer(rng.gen_range(0..=2).into());
        for (o, x) in out.iter_mut().zip(&g) {
            *o += &t * x;
        }
    }
    out
}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `(x_i - c)` written so that the parser sees only nonnegative literals.
fn shifted(i: usize, c: &Rat) -> String {
    if c.is_zero() {
        format!("x{}", i + 1)
    } else if c.is_positive() {
        format!("(x{} - {})", i + 1, fmt_rat(c))
    } else {
        format!("(x{} + {})", i + 1, fmt_rat(&-c))
    }
}

/// Random polynomial taking the value `value` at `xbar`: an affine part plus
/// occasional quadratic and cross terms around `xbar`.
pub fn rand_fn(rng: &mut impl Rng, xbar: &[Rat], value: i64) -> String {
    let n = xbar.len();
    let mut terms = vec![value.to_string()];
    for (i, c) in xbar.iter().enumerate() {
        let a = rng.gen_range(-2i64..=2);
        if a != 0 {
            terms.push(format!("{a}*{}", shifted(i, c)));
        }
    }
    if rng.gen_ratio(1, 3) {
        let i = rng.gen_range(0..n);
        let c = rng.gen_range(-2i64..=2);
        terms.push(format!("{c}*{}^2", shifted(i, &xbar[i])));
    }
    if n > 1 && rng.gen_ratio(1, 4) {
        let i = rng.gen_range(0..n);
        let j = (i + 1) % n;
        terms.push(format!("{}*{}", shifted(i, &xbar[i]), shifted(j, &xbar[j])));
    }
    terms.join(" + ").replace("+ -", "- ")
}

/// A random feasible instance of `class` together with its feasible point.
pub fn random_class_instance(rng: &mut impl Rng, class: ProblemClass) -> (ClassProblem, Vec<Rat>) {
    let n = match class {
        ProblemClass::Ccmp => rng.gen_range(2..=4),
        _ => rng.gen_range(1..=3),
    };
    let mut xbar = rand_half_point(rng, n);
    let kappa = (class == ProblemClass::Ccmp).then(|| rng.gen_range(1..n));
    if let Some(k) = kappa {
        let support = rng.gen_range(0..=k);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        for &i in &idx[support..] {
            xbar[i] = Rat::zero();
        }
    }
    let p = rng.gen_range(0..=2);
    let q = if n > 1 { rng.gen_range(0..=1) } else { 0 };
    let g: Vec<String> = (0..p)
        .map(|_| {
            let v = if rng.gen_bool(0.6) { 0 } else { -1 };
            rand_fn(rng, &xbar, v)
        })
        .collect();
    let h: Vec<String> = (0..q).map(|_| rand_fn(rng, &xbar, 0)).collect();
    let patterns: &[(i64, i64)] = match class {
        ProblemClass::Mpcc => &[(0, 0), (1, 0), (0, 1)],
        ProblemClass::Mpvc => &[(0, 1), (-1, 1), (1, 0), (-1, 0), (0, 0)],
        ProblemClass::Mpsc => &[(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)],
        _ => &[],
    };
    let l = if patterns.is_empty() { 0 } else { rng.gen_range(1..=2) };
    let (mut big_g, mut big_h) = (Vec::new(), Vec::new());
    for _ in 0..l {
        let &(gv, hv) = patterns.choose(rng).unwrap();
        big_g.push(rand_fn(rng, &xbar, gv));
        big_h.push(rand_fn(rng, &xbar, hv));
    }
    let mut f_terms = vec![rand_fn(rng, &xbar, 0)];
    for c in g.iter().chain(&h).chain(&big_g).chain(&big_h) {
        let k = rng.gen_range(-1i64..=1);
        if k != 0 {
            f_terms.push(format!("{k}*({c})"));
        }
    }
    if class == ProblemClass::Ccmp {
        for i in 0..n {
            let k = rng.gen_range(-1i64..=1);
            if k != 0 {
                f_terms.push(format!("{k}*x{}", i + 1));
            }
        }
    }
    let f = f_terms.join(" + ").replace("+ -", "- ");
    let ex = |s: &String| parse(s, n).unwrap();
    let cp = ClassProblem::new(
        class,
        n,
        ex(&f),
        g.iter().map(ex).collect(),
        h.iter().map(ex).collect(),
        big_g.iter().map(ex).collect(),
        big_h.iter().map(ex).collect(),
        kappa,
    )
    .unwrap();
    (cp, xbar)
}

/// Symmetric matrix with small rational entries.
pub fn random_symmetric(rng: &mut impl Rng, dim: usize) -> RatMat {
    let mut m = RatMat::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = rand_rat(rng, 5);
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    m
}
