//! Normal-ordered arithmetic in the Weyl algebra `ℚ[x1..xn]<d1..dn>`.
//!
//! Every operator is stored as a sum of `c * x^a d^b` with all `x`'s to the
//! left of all `d`'s, which is a basis of the algebra over ℚ. Products are
//! renormalized with the Leibniz rule
//! `d^b x^c = Σ_k C(b,k) c!/(c-k)! x^(c-k) d^(b-k)` applied per variable.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::gmodule::{GradingSpec, Label};
use crate::linalg::{format_rational, parse_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("operators have different variable counts ({0} vs {1})")]
    VariableCountMismatch(usize, usize),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Exponent pair `(a, b)` of the normal-ordered monomial `x^a d^b`.
/// Ordered lexicographically on `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: Vec<u32>,
    pub d: Vec<u32>,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial {
            x: vec![0; n],
            d: vec![0; n],
        }
    }

    pub fn order(&self) -> u32 {
        self.d.iter().sum()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeylOp {
    n: usize,
    terms: BTreeMap<Monomial, Rational>,
}

/// Result of [`WeylOp::op_degree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpDegree {
    Homogeneous(Label),
    Inhomogeneous,
    /// The zero operator is homogeneous of every degree.
    Zero,
}

impl WeylOp {
    pub fn zero(n: usize) -> Self {
        WeylOp {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::monomial(n, Monomial::one(n), c)
    }

    pub fn monomial(n: usize, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.x.len(), n, "monomial has wrong variable count");
        assert_eq!(m.d.len(), n, "monomial has wrong variable count");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        WeylOp { n, terms }
    }

    /// The variable `x_{i+1}` (0-based index).
    pub fn x(n: usize, i: usize) -> Self {
        let mut m = Monomial::one(n);
        m.x[i] = 1;
        Self::monomial(n, m, Rational::one())
    }

    /// The derivation `d_{i+1}` (0-based index).
    pub fn d(n: usize, i: usize) -> Self {
        let mut m = Monomial::one(n);
        m.d[i] = 1;
        Self::monomial(n, m, Rational::one())
    }

    /// The Euler operator `Σ x_i d_i`.
    pub fn euler(n: usize) -> Self {
        assert!(n >= 1, "Euler operator needs at least one variable");
        let mut terms = BTreeMap::new();
        for i in 0..n {
            let mut m = Monomial::one(n);
            m.x[i] = 1;
            m.d[i] = 1;
            terms.insert(m, Rational::one());
        }
        WeylOp { n, terms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn check(&self, other: &Self) -> Result<(), WeylError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(WeylError::VariableCountMismatch(self.n, other.n))
        }
    }

    fn accumulate(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, WeylError> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::accumulate(&mut terms, m.clone(), c.clone());
        }
        Ok(WeylOp { n: self.n, terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, WeylError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        WeylOp {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Normal form of `self * other`.
    pub fn multiply(&self, other: &Self) -> Result<Self, WeylError> {
        self.check(other)?;
        let mut terms = BTreeMap::new();
        for (left, lc) in &self.terms {
            for (right, rc) in &other.terms {
                for (m, c) in reorder(left, right) {
                    Self::accumulate(&mut terms, m, c * lc * rc);
                }
            }
        }
        Ok(WeylOp { n: self.n, terms })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.n);
        for _ in 0..k {
            out = out.multiply(self).expect("same variable count");
        }
        out
    }

    /// The standard transposition: `x^a d^b ↦ (-1)^|b| d^b x^a`, renormalized.
    /// An anti-automorphism and an involution.
    pub fn transpose(&self) -> Self {
        let mut terms = BTreeMap::new();
        let zero = vec![0; self.n];
        for (m, c) in &self.terms {
            let sign = if m.order() % 2 == 0 {
                c.clone()
            } else {
                -c.clone()
            };
            let d_part = Monomial {
                x: zero.clone(),
                d: m.d.clone(),
            };
            let x_part = Monomial {
                x: m.x.clone(),
                d: zero.clone(),
            };
            for (mm, cc) in reorder(&d_part, &x_part) {
                Self::accumulate(&mut terms, mm, cc * &sign);
            }
        }
        WeylOp { n: self.n, terms }
    }

    /// `x^a d^b` has degree `Σ a_i deg(x_i) - Σ b_i deg(x_i)`.
    pub fn op_degree(&self, spec: &GradingSpec) -> OpDegree {
        assert_eq!(spec.n(), self.n, "grading spec has wrong variable count");
        let mut common: Option<Label> = None;
        for m in self.terms.keys() {
            let mut deg = spec.zero_label();
            for i in 0..self.n {
                let shift = i64::from(m.x[i]) - i64::from(m.d[i]);
                deg = deg.add_scaled(&spec.var_degree(i), shift);
            }
            match &common {
                None => common = Some(deg),
                Some(c) if *c == deg => {}
                Some(_) => return OpDegree::Inhomogeneous,
            }
        }
        common.map_or(OpDegree::Zero, OpDegree::Homogeneous)
    }

    /// Parses the textual form, e.g. `"x1*d1 + 3*d2^2"`, with `n` variables.
    /// Products are normal-ordered as they are read, so `"d1*x1"` is `x1*d1 + 1`.
    pub fn parse(s: &str, n: usize) -> Result<Self, WeylError> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
            n,
        };
        let op = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(op)
    }

    /// Like [`WeylOp::parse`] but takes `n` from the largest variable index.
    pub fn parse_infer(s: &str) -> Result<Self, WeylError> {
        let mut n = 1;
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] == b'x' || bytes[i] == b'd' {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if let Ok(k) = s[start..j].parse::<usize>() {
                    n = n.max(k);
                }
                i = j;
            } else {
                i += 1;
            }
        }
        Self::parse(s, n)
    }
}

/// Normal form of `(x^a d^b)(x^c d^e)` as a list of terms.
fn reorder(left: &Monomial, right: &Monomial) -> Vec<(Monomial, Rational)> {
    let n = left.x.len();
    // Expand d^b x^c one variable at a time.
    let mut partial: Vec<(Vec<u32>, Vec<u32>, BigInt)> =
        vec![(left.x.clone(), vec![0; n], BigInt::one())];
    for i in 0..n {
        let b = left.d[i];
        let c = right.x[i];
        let mut next = Vec::new();
        for (xs, ds, coef) in &partial {
            // C(b,k) * c!/(c-k)!
            let mut weight = BigInt::one();
            for k in 0..=b.min(c) {
                if k > 0 {
                    weight = weight * BigInt::from(b - k + 1) * BigInt::from(c - k + 1)
                        / BigInt::from(k);
                }
                let mut xs = xs.clone();
                let mut ds = ds.clone();
                xs[i] += c - k;
                ds[i] = b - k;
                next.push((xs, ds, coef * &weight));
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|(xs, mut ds, coef)| {
            for (d, r) in ds.iter_mut().zip(&right.d) {
                *d += r;
            }
            (Monomial { x: xs, d: ds }, Rational::from_integer(coef))
        })
        .collect()
}

impl fmt::Debug for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylOp[n={}]({})", self.n, self)
    }
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = *c < Rational::zero();
            let abs = if negative { -c.clone() } else { c.clone() };
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            for (i, &e) in m.x.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{}", i + 1)),
                    _ => factors.push(format!("x{}^{}", i + 1, e)),
                }
            }
            for (i, &e) in m.d.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("d{}", i + 1)),
                    _ => factors.push(format!("d{}^{}", i + 1, e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&abs), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> WeylError {
        WeylError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<WeylOp, WeylError> {
        let mut acc = WeylOp::zero(self.n);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            let t = if sign < 0 { t.neg() } else { t };
            acc = acc.add(&t)?;
            match self.peek() {
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<WeylOp, WeylError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.multiply(&f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<WeylOp, WeylError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.uint()?;
            let k = u32::try_from(k).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<usize, WeylError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| self.err("number too large"))
    }

    fn atom(&mut self) -> Result<WeylOp, WeylError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c @ (b'x' | b'd')) => {
                self.pos += 1;
                let idx = self.uint()?;
                if idx == 0 || idx > self.n {
                    return Err(self.err(&format!(
                        "variable index {idx} outside 1..={}",
                        self.n
                    )));
                }
                Ok(if c == b'x' {
                    WeylOp::x(self.n, idx - 1)
                } else {
                    WeylOp::d(self.n, idx - 1)
                })
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                self.uint()?;
                let save = self.pos;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                        self.uint()?;
                    } else {
                        return Err(self.err("expected denominator"));
                    }
                } else {
                    self.pos = save;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
                let q = parse_rational(&text).map_err(|_| self.err("bad rational literal"))?;
                Ok(WeylOp::constant(self.n, q))
            }
            _ => Err(self.err("expected a number, x<i>, d<i> or '('")),
        }
    }
}
