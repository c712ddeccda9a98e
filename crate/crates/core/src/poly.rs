//! Sparse multivariate polynomials over a [`Field`].
//!
//! Variables live in one fixed universe: matrix entries `x_ij(r)` first,
//! ordered by `(r, i, j)`, then the named parameters used by the nullcone
//! scripts. Terms are kept in a `BTreeMap` under graded-lex order, so printing
//! and hashing are deterministic.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::Field;

/// Largest matrix index `r` and size `n` encodable in a [`Var`].
pub const MAX_TUPLE: usize = 16;
pub const MAX_SIZE: usize = 4;

const PARAM_BASE: u16 = 1000;

/// A variable of the universe. Matrix entries sort before parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u16);

/// Named parameters; the discriminant fixes their order after the matrix
/// entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Param {
    Alpha(u8),
    Beta(u8),
    Gamma,
    T(u8),
    B(u8),
    C(u8),
}

impl Var {
    /// Entry `(i, j)` of the `r`-th generic matrix, all 1-based.
    pub fn entry(r: usize, i: usize, j: usize) -> Var {
        assert!(
            (1..=MAX_TUPLE).contains(&r) && (1..=MAX_SIZE).contains(&i) && (1..=MAX_SIZE).contains(&j),
            "matrix variable out of range"
        );
        Var((((r - 1) * MAX_SIZE + (i - 1)) * MAX_SIZE + (j - 1)) as u16)
    }

    pub fn param(p: Param) -> Var {
        let code = match p {
            Param::Alpha(k) => 10 + k as u16,
            Param::Beta(k) => 20 + k as u16,
            Param::Gamma => 30,
            Param::T(k) => 40 + k as u16,
            Param::B(k) => 50 + k as u16,
            Param::C(k) => 60 + k as u16,
        };
        Var(PARAM_BASE + code)
    }

    /// `(r, i, j)` for matrix entries.
    pub fn as_entry(self) -> Option<(usize, usize, usize)> {
        if self.0 >= PARAM_BASE {
            return None;
        }
        let c = self.0 as usize;
        Some((c / (MAX_SIZE * MAX_SIZE) + 1, (c / MAX_SIZE) % MAX_SIZE + 1, c % MAX_SIZE + 1))
    }

    pub fn as_param(self) -> Option<Param> {
        if self.0 < PARAM_BASE {
            return None;
        }
        let c = self.0 - PARAM_BASE;
        let k = (c % 10) as u8;
        Some(match c / 10 {
            1 => Param::Alpha(k),
            2 => Param::Beta(k),
            3 => Param::Gamma,
            4 => Param::T(k),
            5 => Param::B(k),
            _ => Param::C(k),
        })
    }

    /// Parses the printed names of parameters (`alpha1`, `beta2`, `gamma`,
    /// `t3`, `b4`, `c5`).
    pub fn parse_param(name: &str) -> Option<Var> {
        let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
        let (head, tail) = name.split_at(split);
        let idx = if tail.is_empty() { None } else { tail.parse::<u8>().ok().filter(|&k| (1..=9).contains(&k)) };
        let p = match (head, idx) {
            ("gamma", None) => Param::Gamma,
            ("alpha", Some(k)) => Param::Alpha(k),
            ("beta", Some(k)) => Param::Beta(k),
            ("t", Some(k)) => Param::T(k),
            ("b", Some(k)) => Param::B(k),
            ("c", Some(k)) => Param::C(k),
            _ => return None,
        };
        Some(Var::param(p))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((r, i, j)) = self.as_entry() {
            return write!(f, "x{i}{j}({r})");
        }
        match self.as_param().expect("parameter") {
            Param::Alpha(k) => write!(f, "alpha{k}"),
            Param::Beta(k) => write!(f, "beta{k}"),
            Param::Gamma => write!(f, "gamma"),
            Param::T(k) => write!(f, "t{k}"),
            Param::B(k) => write!(f, "b{k}"),
            Param::C(k) => write!(f, "c{k}"),
        }
    }
}

/// Sparse exponent vector: `(var, exponent)` pairs sorted by variable,
/// exponents positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by_key(|&(v, _)| v);
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => continue,
                    Ordering::Greater => out.push((v, e - f)),
                }
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Total degree per generic matrix (index `r - 1`), over `d` matrices.
    pub fn matrix_multidegree(&self, d: usize) -> Vec<u32> {
        let mut m = vec![0; d];
        for &(v, e) in &self.0 {
            if let Some((r, _, _)) = v.as_entry() {
                if r <= d {
                    m[r - 1] += e;
                }
            }
        }
        m
    }
}

impl Ord for Monomial {
    /// Graded lexicographic, with lower variable codes weighing more.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a.0 != b.0 {
                return if a.0 < b.0 { Ordering::Greater } else { Ordering::Less };
            }
            if a.1 != b.1 {
                return a.1.cmp(&b.1);
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(v, e)| if e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial with coefficients in `F`. No stored coefficient is zero.
#[derive(Clone, Debug)]
pub struct MultiPoly<F: Field> {
    field: F,
    terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> PartialEq for MultiPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<F: Field> Eq for MultiPoly<F> {}

impl<F: Field> Hash for MultiPoly<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(field: &F) -> Self {
        MultiPoly { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(field: &F, c: F::Elem) -> Self {
        let mut p = Self::zero(field);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one(field: &F) -> Self {
        Self::constant(field, field.one())
    }

    pub fn from_i64(field: &F, c: i64) -> Self {
        Self::constant(field, field.from_i64(c))
    }

    pub fn var(field: &F, v: Var) -> Self {
        let mut p = Self::zero(field);
        p.add_term(Monomial::var(v), field.one());
        p
    }

    pub fn from_terms(field: &F, terms: impl IntoIterator<Item = (Monomial, F::Elem)>) -> Self {
        let mut p = Self::zero(field);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F::Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> F::Elem {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Adds `c * m`, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: F::Elem) {
        if self.field.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = self.field.add(old, &c);
                if self.field.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &F::Elem)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        MultiPoly {
            field: f.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), f.mul(a, c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &F::Elem) -> Self {
        let f = &self.field;
        if f.is_zero(c) {
            return Self::zero(f);
        }
        MultiPoly { field: f.clone(), terms: self.terms.iter().map(|(k, a)| (k.mul(m), f.mul(a, c))).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.pairs().iter().map(|&(v, _)| v)).collect()
    }

    /// Matrix multidegree when every term agrees on it.
    pub fn homogeneous_multidegree(&self, d: usize) -> Option<Vec<u32>> {
        let mut it = self.terms.keys().map(|m| m.matrix_multidegree(d));
        let first = it.next()?;
        it.all(|m| m == first).then_some(first)
    }

    /// Evaluates at a point; every variable of the polynomial must be assigned.
    pub fn eval(&self, point: &dyn Fn(Var) -> Option<F::Elem>) -> Result<F::Elem> {
        let f = &self.field;
        let mut cache: HashMap<Var, F::Elem> = HashMap::new();
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                let x = match cache.get(&v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = point(v).ok_or_else(|| Error::Usage(format!("variable {v} is not assigned")))?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                t = f.mul(&t, &f.pow(&x, e as u64));
            }
            acc = f.add(&acc, &t);
        }
        Ok(acc)
    }

    pub fn eval_map(&self, point: &HashMap<Var, F::Elem>) -> Result<F::Elem> {
        self.eval(&|v| point.get(&v).cloned())
    }

    /// Replaces `v` by `value` everywhere.
    pub fn substitute(&self, v: Var, value: &MultiPoly<F>) -> Self {
        self.substitute_fraction(v, value, &Self::one(&self.field))
    }

    /// Replaces `v` by `num / den` and multiplies through by `den^k`, where
    /// `k` is the degree of `self` in `v`, so the result stays polynomial.
    pub fn substitute_fraction(&self, v: Var, num: &MultiPoly<F>, den: &MultiPoly<F>) -> Self {
        let k = self.degree_in(v);
        let mut by_power: BTreeMap<u32, MultiPoly<F>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            let rest = Monomial::from_pairs(m.pairs().iter().filter(|&&(w, _)| w != v).copied().collect());
            by_power.entry(e).or_insert_with(|| Self::zero(&self.field)).add_term(rest, c.clone());
        }
        let mut out = Self::zero(&self.field);
        for (e, coeff) in by_power {
            let piece = &(&coeff * &num.pow(e)) * &den.pow(k - e);
            out = &out + &piece;
        }
        out
    }

    /// Formal partial derivative; exponents are reduced in the field, so
    /// `d(x^p)/dx = 0` in characteristic `p`.
    pub fn partial_derivative(&self, v: Var) -> Self {
        let f = &self.field;
        let mut out = Self::zero(f);
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            if e == 0 {
                continue;
            }
            let reduced = Monomial::from_pairs(
                m.pairs().iter().map(|&(w, x)| if w == v { (w, x - 1) } else { (w, x) }).collect(),
            );
            out.add_term(reduced, f.mul(c, &f.from_i64(e as i64)));
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder.
    pub fn exact_div(&self, divisor: &MultiPoly<F>) -> Option<Self> {
        let f = &self.field;
        let (lm, lc) = divisor.leading_term()?;
        let lc_inv = f.inv(lc)?;
        let mut rem = self.clone();
        let mut quot = Self::zero(f);
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(lm)?;
            let qc = f.mul(c, &lc_inv);
            rem = &rem - &divisor.mul_monomial(&qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Greatest monomial dividing every term (`1` for zero).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Monomial::one() };
        let mut pairs: Vec<(Var, u32)> = first.pairs().to_vec();
        for m in it {
            pairs = pairs
                .into_iter()
                .filter_map(|(v, e)| {
                    let k = m.degree_in(v).min(e);
                    (k > 0).then_some((v, k))
                })
                .collect();
        }
        Monomial::from_pairs(pairs)
    }

    /// Scaled so the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            Some((_, c)) => self.scale(&self.field.inv(c).expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }

    /// Divides by `factor` as many times as it goes exactly.
    pub fn strip_factor(&self, factor: &MultiPoly<F>) -> (Self, u32) {
        if factor.is_constant() {
            return (self.clone(), 0);
        }
        let mut cur = self.clone();
        let mut count = 0;
        while !cur.is_zero() {
            match cur.exact_div(factor) {
                Some(q) => {
                    cur = q;
                    count += 1;
                }
                None => break,
            }
        }
        (cur, count)
    }
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mut coeff = self.field.format(c);
            let negative = coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            let body = match (m.is_one(), coeff.as_str()) {
                (true, _) => coeff.clone(),
                (false, "1") => m.to_string(),
                (false, _) => format!("{coeff}*{m}"),
            };
            match (first, negative) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl<F: Field> Add for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn add(self, rhs: &MultiPoly<F>) -> MultiPoly<F> {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<F: Field> Sub for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn sub(self, rhs: &MultiPoly<F>) -> MultiPoly<F> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), self.field.neg(c));
        }
        out
    }
}

impl<F: Field> Neg for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn neg(self) -> MultiPoly<F> {
        let f = &self.field;
        MultiPoly { field: f.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), f.neg(c))).collect() }
    }
}

impl<F: Field> Mul for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn mul(self, rhs: &MultiPoly<F>) -> MultiPoly<F> {
        let f = &self.field;
        let mut acc: HashMap<Monomial, F::Elem> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let c = f.mul(ca, cb);
                match acc.get_mut(&m) {
                    Some(old) => *old = f.add(old, &c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        MultiPoly { field: f.clone(), terms: acc.into_iter().filter(|(_, c)| !f.is_zero(c)).collect() }
    }
}

/// Parses a polynomial in parameter names and integers: `+ - * ^ ( )`.
/// Used by the case-script format.
pub fn parse_poly<F: Field>(field: &F, text: &str) -> Result<MultiPoly<F>> {
    let mut p = PolyParser { s: text.as_bytes(), pos: 0, field };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(Error::Parse { pos: p.pos, msg: "trailing input".into() });
    }
    Ok(out)
}

struct PolyParser<'a, F: Field> {
    s: &'a [u8],
    pos: usize,
    field: &'a F,
}

impl<F: Field> PolyParser<'_, F> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn expr(&mut self) -> Result<MultiPoly<F>> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly<F>> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<MultiPoly<F>> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.number()?;
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<i64> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or(Error::Parse { pos: start, msg: "number out of range".into() })
    }

    fn atom(&mut self) -> Result<MultiPoly<F>> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                Ok(MultiPoly::from_i64(self.field, n))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
                match Var::parse_param(name) {
                    Some(v) => Ok(MultiPoly::var(self.field, v)),
                    None => Err(Error::Parse { pos: start, msg: format!("unknown variable '{name}'") }),
                }
            }
            _ => self.err("expected a term"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Ring;
    use crate::field::{PrimeField, Rationals};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn x(r: usize, i: usize, j: usize) -> MultiPoly<PrimeField> {
        MultiPoly::var(&PrimeField::surrogate(), Var::entry(r, i, j))
    }

    #[test]
    fn variable_order_and_names() {
        assert!(Var::entry(1, 3, 3) < Var::entry(2, 1, 1));
        assert!(Var::entry(1, 1, 2) < Var::entry(1, 2, 1));
        assert!(Var::entry(16, 4, 4) < Var::param(Param::Alpha(1)));
        assert_eq!(Var::entry(2, 1, 3).to_string(), "x13(2)");
        assert_eq!(Var::entry(2, 1, 3).as_entry(), Some((2, 1, 3)));
        for name in ["alpha1", "beta2", "gamma", "t5", "b1", "c4"] {
            assert_eq!(Var::parse_param(name).unwrap().to_string(), name);
        }
        assert!(Var::parse_param("delta1").is_none());
    }

    #[test]
    fn square_of_a_variable() {
        let a = x(1, 1, 1);
        let sq = &a * &a;
        assert_eq!(sq.to_string(), "x11(1)^2");
        let z = MultiPoly::zero(a.field());
        assert!((&a * &z).is_zero());
    }

    #[test]
    fn char_two_binomial() {
        let f = PrimeField::new(2).unwrap();
        let xp = &MultiPoly::var(&f, Var::entry(1, 1, 1)) + &MultiPoly::one(&f);
        assert_eq!((&xp * &xp).to_string(), "x11(1)^2 + 1");
    }

    #[test]
    fn derivative_examples() {
        let q = Rationals;
        let v = Var::entry(1, 1, 1);
        let sq = MultiPoly::var(&q, v).pow(2);
        assert_eq!(sq.partial_derivative(v), &MultiPoly::from_i64(&q, 2) * &MultiPoly::var(&q, v));
        let f2 = PrimeField::new(2).unwrap();
        assert!(MultiPoly::var(&f2, v).pow(2).partial_derivative(v).is_zero());
        let w = Var::entry(2, 2, 2);
        let prod = &MultiPoly::var(&q, v) * &MultiPoly::var(&q, w);
        assert_eq!(prod.partial_derivative(v), MultiPoly::var(&q, w));
    }

    #[test]
    fn evaluation_examples() {
        let f = PrimeField::surrogate();
        let p = &x(1, 1, 1) + &x(1, 2, 2);
        let ident = |v: Var| v.as_entry().map(|(_, i, j)| if i == j { 1 } else { 0 });
        assert_eq!(p.eval(&ident).unwrap(), 2);
        let with_const = &p + &MultiPoly::from_i64(&f, 5);
        assert_eq!(with_const.eval(&|_| Some(0)).unwrap(), 5);
        assert!(p.eval(&|_| None).is_err());
    }

    #[test]
    fn exact_division_and_fraction_substitution() {
        let q = Rationals;
        let p = parse_poly(&q, "(b1 - b2*c3)^2*(alpha1 + beta1 + alpha2*beta2)").unwrap();
        let fac = parse_poly(&q, "alpha1 + beta1 + alpha2*beta2").unwrap();
        let (rest, k) = p.strip_factor(&fac);
        assert_eq!(k, 1);
        assert_eq!(rest, parse_poly(&q, "(b1 - b2*c3)^2").unwrap());
        assert!(parse_poly(&q, "b1 + 1").unwrap().exact_div(&parse_poly(&q, "b1").unwrap()).is_none());
        // b1 = c1/beta2 in b1*beta2 - c1 gives zero after clearing
        let e = parse_poly(&q, "b1*beta2 - c1").unwrap();
        let s = e.substitute_fraction(
            Var::parse_param("b1").unwrap(),
            &parse_poly(&q, "c1").unwrap(),
            &parse_poly(&q, "beta2").unwrap(),
        );
        assert!(s.is_zero());
        assert!(parse_poly(&q, "b1 +").is_err());
        assert!(parse_poly(&q, "zz").is_err());
    }

    fn random_poly(rng: &mut ChaCha8Rng, f: &PrimeField) -> MultiPoly<PrimeField> {
        let mut p = MultiPoly::zero(f);
        for _ in 0..rng.gen_range(0..6) {
            let pairs = (0..rng.gen_range(0..3))
                .map(|_| (Var::entry(1, rng.gen_range(1..=2), rng.gen_range(1..=2)), rng.gen_range(1..3)))
                .collect();
            p.add_term(Monomial::from_pairs(pairs), f.random(rng));
        }
        p
    }

    proptest! {
        #[test]
        fn eval_is_a_ring_homomorphism_and_leibniz_holds(seed in any::<u64>()) {
            let f = PrimeField::surrogate();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_poly(&mut rng, &f);
            let b = random_poly(&mut rng, &f);
            let pt: Vec<u64> = (0..4).map(|_| f.random(&mut rng)).collect();
            let at = |v: Var| v.as_entry().map(|(_, i, j)| pt[(i - 1) * 2 + (j - 1)]);
            let (ea, eb) = (a.eval(&at).unwrap(), b.eval(&at).unwrap());
            prop_assert_eq!((&a * &b).eval(&at).unwrap(), f.mul(&ea, &eb));
            prop_assert_eq!((&a + &b).eval(&at).unwrap(), f.add(&ea, &eb));
            let v = Var::entry(1, 1, 2);
            let lhs = (&a * &b).partial_derivative(v);
            let rhs = &(&a.partial_derivative(v) * &b) + &(&a * &b.partial_derivative(v));
            prop_assert_eq!(lhs, rhs);
            let prod = &a * &b;
            if !b.is_zero() {
                prop_assert_eq!(prod.exact_div(&b), Some(a.clone()));
            }
        }
    }
}
