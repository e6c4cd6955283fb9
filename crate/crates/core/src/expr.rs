//! Polynomial expressions with rational coefficients.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' nonneg-int)?
//! atom   := rational | 'x' int | '(' expr ')'
//! ```
//!
//! Rationals are integer literals or `p/q` written without spaces. Variables
//! are 1-based in text (`x1`, `x2`, ...) and 0-based in [`Expr::Var`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Pow as _, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactla::{fmt_rat, int, Rat, RatMat};

/// Largest exponent accepted by the parser.
pub const MAX_EXPONENT: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rat),
    /// 0-based variable index.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn constant(v: Rat) -> Self {
        Expr::Const(v)
    }

    pub fn zero() -> Self {
        Expr::Const(Rat::zero())
    }

    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.max_var().max(b.max_var()),
            Expr::Neg(a) | Expr::Pow(a, _) => a.max_var(),
        }
    }

    /// Exact value at `x`. Panics if a variable index is out of range.
    pub fn eval(&self, x: &[Rat]) -> Rat {
        match self {
            Expr::Const(c) => c.clone(),
            Expr::Var(i) => x[*i].clone(),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Neg(a) => -a.eval(x),
            Expr::Pow(a, k) => a.eval(x).pow(*k as i32),
        }
    }

    /// Floating-point value, used only by the sampling oracles.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => c.to_f64().unwrap_or(f64::NAN),
            Expr::Var(i) => x[*i],
            Expr::Add(a, b) => a.eval_f64(x) + b.eval_f64(x),
            Expr::Sub(a, b) => a.eval_f64(x) - b.eval_f64(x),
            Expr::Mul(a, b) => a.eval_f64(x) * b.eval_f64(x),
            Expr::Neg(a) => -a.eval_f64(x),
            Expr::Pow(a, k) => a.eval_f64(x).powi(*k as i32),
        }
    }

    /// Fully expanded normal form in `n` variables.
    pub fn to_poly(&self, n: usize) -> Result<Poly> {
        if let Some(i) = self.max_var() {
            if i >= n {
                return Err(Error::VariableOutOfRange { index: i + 1, n });
            }
        }
        Ok(self.to_poly_unchecked(n))
    }

    fn to_poly_unchecked(&self, n: usize) -> Poly {
        match self {
            Expr::Const(c) => Poly::constant(n, c.clone()),
            Expr::Var(i) => Poly::var(n, *i),
            Expr::Add(a, b) => a.to_poly_unchecked(n).add(&b.to_poly_unchecked(n)),
            Expr::Sub(a, b) => a.to_poly_unchecked(n).sub(&b.to_poly_unchecked(n)),
            Expr::Mul(a, b) => a.to_poly_unchecked(n).mul(&b.to_poly_unchecked(n)),
            Expr::Neg(a) => a.to_poly_unchecked(n).neg(),
            Expr::Pow(a, k) => a.to_poly_unchecked(n).pow(*k),
        }
    }

    /// Equality of the expanded normal forms.
    pub fn equivalent(&self, other: &Expr, n: usize) -> Result<bool> {
        Ok(self.to_poly(n)? == other.to_poly(n)?)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if c.is_negative() => 3,
            Expr::Const(_) | Expr::Var(_) => 5,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.write_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Const(c) => write!(f, "{}", fmt_rat(c)),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Add(a, b) => {
                a.write_prec(f, 1)?;
                write!(f, " + ")?;
                b.write_prec(f, 2)
            }
            Expr::Sub(a, b) => {
                a.write_prec(f, 1)?;
                write!(f, " - ")?;
                b.write_prec(f, 2)
            }
            Expr::Mul(a, b) => {
                a.write_prec(f, 2)?;
                write!(f, "*")?;
                b.write_prec(f, 3)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write_prec(f, 3)
            }
            Expr::Pow(a, k) => {
                match a.as_ref() {
                    Expr::Const(c) if !c.is_integer() => write!(f, "({})", fmt_rat(c))?,
                    base => base.write_prec(f, 5)?,
                }
                write!(f, "^{k}")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer {
    chars: Vec<(usize, char)>,
    pos: usize,
    n: usize,
}

fn syntax(column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        column,
        message: message.into(),
    }
}

impl Lexer {
    fn new(src: &str, n: usize) -> Self {
        Self {
            chars: src.chars().enumerate().map(|(i, c)| (i + 1, c)).collect(),
            pos: 0,
            n,
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.chars.get(self.pos).map_or(self.chars.len() + 1, |&(col, _)| col)
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek_char().filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    /// Next token with its 1-based starting column.
    fn next(&mut self) -> Result<(Tok, usize)> {
        while self.peek_char().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
        let col = self.column();
        let Some(c) = self.peek_char() else {
            return Ok((Tok::End, col));
        };
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok((t, col));
        }
        if c.is_ascii_digit() {
            let num = self.digits();
            let den = if self.peek_char() == Some('/') {
                self.pos += 1;
                let d = self.digits();
                if d.is_empty() {
                    return Err(syntax(self.column(), "expected denominator after '/'"));
                }
                d
            } else {
                "1".to_string()
            };
            let num: num_bigint::BigInt = num.parse().expect("digit string");
            let den: num_bigint::BigInt = den.parse().expect("digit string");
            if den.is_zero() {
                return Err(syntax(col, "zero denominator"));
            }
            return Ok((Tok::Num(Rat::new(num, den)), col));
        }
        if c == 'x' {
            self.pos += 1;
            let idx = self.digits();
            if idx.is_empty() {
                return Err(syntax(self.column(), "expected variable index after 'x'"));
            }
            let index: usize = idx.parse().map_err(|_| Error::VariableOutOfRange {
                index: usize::MAX,
                n: self.n,
            })?;
            if index == 0 || index > self.n {
                return Err(Error::VariableOutOfRange { index, n: self.n });
            }
            return Ok((Tok::Var(index - 1), col));
        }
        Err(syntax(col, format!("unexpected character '{c}'")))
    }
}

struct Parser {
    lexer: Lexer,
    tok: Tok,
    col: usize,
}

impl Parser {
    fn bump(&mut self) -> Result<()> {
        let (t, c) = self.lexer.next()?;
        self.tok = t;
        self.col = c;
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while self.tok == Tok::Star {
            self.bump()?;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.tok != Tok::Caret {
            return Ok(base);
        }
        self.bump()?;
        let col = self.col;
        match &self.tok {
            Tok::Num(r) if r.is_integer() => {
                let k = r
                    .to_integer()
                    .to_u32()
                    .filter(|&k| k <= MAX_EXPONENT)
                    .ok_or_else(|| syntax(col, format!("exponent exceeds {MAX_EXPONENT}")))?;
                self.bump()?;
                Ok(Expr::Pow(Box::new(base), k))
            }
            _ => Err(syntax(col, "expected a nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col;
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Num(r) => {
                self.bump()?;
                Ok(Expr::Const(r))
            }
            Tok::Var(i) => {
                self.bump()?;
                Ok(Expr::Var(i))
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr()?;
                if self.tok != Tok::RParen {
                    return Err(syntax(self.col, "expected ')'"));
                }
                self.bump()?;
                Ok(e)
            }
            Tok::End => Err(syntax(col, "unexpected end of input")),
            other => {
                self.tok = other;
                Err(syntax(col, "expected a number, variable or '('"))
            }
        }
    }
}

/// Parses `text` as a polynomial in the variables `x1..xn`.
pub fn parse(text: &str, n: usize) -> Result<Expr> {
    let mut p = Parser {
        lexer: Lexer::new(text, n),
        tok: Tok::End,
        col: 1,
    };
    p.bump()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(syntax(p.col, "unexpected trailing input"));
    }
    Ok(e)
}

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Expanded polynomial: monomial → nonzero coefficient, in graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial(vec![0; n]), c);
        p
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        let mut p = Self::zero(n);
        p.add_term(Monomial(e), Rat::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = Monomial(ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect());
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::constant(self.n, Rat::one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Partial derivative with respect to variable `i` (0-based).
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut d = m.0.clone();
            d[i] -= 1;
            out.add_term(Monomial(d), c * int(i64::from(e)));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.n).map(|i| self.derivative(i)).collect()
    }

    pub fn hessian(&self) -> Vec<Vec<Poly>> {
        self.gradient()
            .iter()
            .map(|g| (0..self.n).map(|j| g.derivative(j)).collect())
            .collect()
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.n, "point dimension mismatch");
        let mut total = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &e) in x.iter().zip(&m.0) {
                if e > 0 {
                    t *= xi.clone().pow(e as i32);
                }
            }
            total += t;
        }
        total
    }

    /// Rebuilds an expression tree, highest-order terms first. Negative
    /// coefficients become subtraction (or negation for the first term), so
    /// every constant in the result is nonnegative.
    pub fn to_expr(&self) -> Expr {
        let mut acc: Option<Expr> = None;
        for (m, c) in self.terms.iter().rev() {
            let mut factors: Vec<Expr> = Vec::new();
            let mag = c.abs();
            let is_const = m.degree() == 0;
            if !mag.is_one() || is_const {
                factors.push(Expr::Const(mag));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(Expr::Var(i)),
                    _ => factors.push(Expr::Pow(Box::new(Expr::Var(i)), e)),
                }
            }
            let term = factors
                .into_iter()
                .reduce(|a, b| Expr::Mul(Box::new(a), Box::new(b)))
                .expect("term has at least one factor");
            acc = Some(match (acc, c.is_negative()) {
                (None, false) => term,
                (None, true) => Expr::Neg(Box::new(term)),
                (Some(a), false) => Expr::Add(Box::new(a), Box::new(term)),
                (Some(a), true) => Expr::Sub(Box::new(a), Box::new(term)),
            });
        }
        acc.unwrap_or_else(Expr::zero)
    }
}

/// Symbolic gradient and Hessian of `e` in `n` variables.
pub fn differentiate(e: &Expr, n: usize) -> Result<(Vec<Expr>, Vec<Vec<Expr>>)> {
    let p = e.to_poly(n)?;
    let grad = p.gradient();
    let hess = grad
        .iter()
        .map(|g| (0..n).map(|j| g.derivative(j).to_expr()).collect())
        .collect();
    Ok((grad.iter().map(Poly::to_expr).collect(), hess))
}

/// Exact values and derivatives of `f` and `F` at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalBundle {
    pub point: Vec<Rat>,
    pub f_val: Rat,
    pub f_grad: Vec<Rat>,
    pub f_hess: RatMat,
    pub map_val: Vec<Rat>,
    pub map_jac: RatMat,
    pub map_hess: Vec<RatMat>,
}

/// Pre-expanded objective and constraint map with their derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledMap {
    n: usize,
    f: PolyDerivs,
    map: Vec<PolyDerivs>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct PolyDerivs {
    value: Poly,
    grad: Vec<Poly>,
    hess: Vec<Vec<Poly>>,
}

impl PolyDerivs {
    fn new(p: Poly) -> Self {
        Self {
            grad: p.gradient(),
            hess: p.hessian(),
            value: p,
        }
    }

    fn grad_at(&self, x: &[Rat]) -> Vec<Rat> {
        self.grad.iter().map(|g| g.eval(x)).collect()
    }

    fn hess_at(&self, n: usize, x: &[Rat]) -> RatMat {
        let mut h = RatMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.hess[i][j].eval(x);
                h.set(j, i, v.clone());
                h.set(i, j, v);
            }
        }
        h
    }
}

impl CompiledMap {
    pub fn new(f: &Expr, map: &[Expr], n: usize) -> Result<Self> {
        Ok(Self {
            n,
            f: PolyDerivs::new(f.to_poly(n)?),
            map: map
                .iter()
                .map(|e| e.to_poly(n).map(PolyDerivs::new))
                .collect::<Result<_>>()?,
        })
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn ncomponents(&self) -> usize {
        self.map.len()
    }

    fn check(&self, x: &[Rat]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn f_value(&self, x: &[Rat]) -> Result<Rat> {
        self.check(x)?;
        Ok(self.f.value.eval(x))
    }

    pub fn map_value(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        self.check(x)?;
        Ok(self.map.iter().map(|p| p.value.eval(x)).collect())
    }

    pub fn map_jacobian(&self, x: &[Rat]) -> Result<RatMat> {
        self.check(x)?;
        let rows: Vec<Vec<Rat>> = self.map.iter().map(|p| p.grad_at(x)).collect();
        Ok(RatMat::from_rows(self.n, &rows))
    }

    pub fn bundle(&self, x: &[Rat]) -> Result<EvalBundle> {
        self.check(x)?;
        Ok(EvalBundle {
            point: x.to_vec(),
            f_val: self.f.value.eval(x),
            f_grad: self.f.grad_at(x),
            f_hess: self.f.hess_at(self.n, x),
            map_val: self.map.iter().map(|p| p.value.eval(x)).collect(),
            map_jac: self.map_jacobian(x)?,
            map_hess: self.map.iter().map(|p| p.hess_at(self.n, x)).collect(),
        })
    }
}

/// Values, gradients and Hessians of `f` and `F` at `x`; the number of
/// variables is `x.len()`.
pub fn evaluate_bundle(f: &Expr, map: &[Expr], x: &[Rat]) -> Result<EvalBundle> {
    CompiledMap::new(f, map, x.len())?.bundle(x)
}
