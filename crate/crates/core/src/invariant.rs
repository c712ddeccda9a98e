//! Formal invariants: `sigma_k` of words, polynomials in them, and the
//! generator sets and parameter systems for 3x3 (and 4x4) matrices.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::field::Field;
use crate::matrix::{generic, word_product, MatrixPoly, NumericMatrix, PolyRing};
use crate::poly::MultiPoly;
use crate::rewrite::NilCombination;
use crate::word::{enumerate_canonical, Word};

/// `sigma_k(word)`, the word kept as its least cyclic rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceMonomial {
    k: u8,
    word: Word,
}

impl TraceMonomial {
    pub fn new(k: u8, word: &Word) -> Self {
        TraceMonomial { k, word: word.min_rotation() }
    }

    pub fn tr(word: &Word) -> Self {
        Self::new(1, word)
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn degree(&self) -> usize {
        self.k as usize * self.word.deg()
    }

    pub fn mdeg(&self, d: usize) -> Vec<usize> {
        self.word.mdeg(d).into_iter().map(|x| x * self.k as usize).collect()
    }

    pub fn evaluate<F: Field>(&self, field: &F, tuple: &[NumericMatrix<F>]) -> Result<F::Elem> {
        let m = word_product(field, self.word.letters(), tuple)?;
        if self.k as usize > m.size() {
            return Ok(field.zero());
        }
        m.sigma(field, self.k as usize)
    }

    /// Expansion in the entries of generic matrices.
    pub fn to_poly<F: Field>(&self, generics: &[MatrixPoly<F>], ring: &PolyRing<F>) -> Result<MultiPoly<F>> {
        let m = word_product(ring, self.word.letters(), generics)?;
        m.sigma(ring, self.k as usize)
    }
}

impl fmt::Display for TraceMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.word.to_string().replace('x', "X");
        match self.k {
            1 => write!(f, "tr({w})"),
            k => write!(f, "sigma{k}({w})"),
        }
    }
}

/// Polynomial in trace monomials: each key is a sorted list of factors.
#[derive(Clone, Debug)]
pub struct InvariantExpr<F: Field> {
    field: F,
    terms: BTreeMap<Vec<TraceMonomial>, F::Elem>,
}

impl<F: Field> PartialEq for InvariantExpr<F> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<F: Field> InvariantExpr<F> {
    pub fn zero(field: &F) -> Self {
        InvariantExpr { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(field: &F, factors: Vec<TraceMonomial>) -> Self {
        let mut e = Self::zero(field);
        e.add_term(factors, field.one());
        e
    }

    pub fn tm(field: &F, t: TraceMonomial) -> Self {
        Self::monomial(field, vec![t])
    }

    pub fn tr(field: &F, w: &Word) -> Self {
        Self::tm(field, TraceMonomial::tr(w))
    }

    pub fn sigma(field: &F, k: u8, w: &Word) -> Self {
        Self::tm(field, TraceMonomial::new(k, w))
    }

    /// `tr(w)` for `w` given as text, e.g. `"x1^2 x2"`.
    pub fn tr_text(field: &F, text: &str) -> Result<Self> {
        Ok(Self::tr(field, &Word::parse(text)?))
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn add_term(&mut self, mut factors: Vec<TraceMonomial>, c: F::Elem) {
        if self.field.is_zero(&c) {
            return;
        }
        factors.sort();
        let f = &self.field;
        match self.terms.get_mut(&factors) {
            Some(old) => {
                let s = f.add(old, &c);
                if f.is_zero(&s) {
                    self.terms.remove(&factors);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(factors, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<TraceMonomial>, &F::Elem)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let mut out = Self::zero(&self.field);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), self.field.mul(a, c));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&self.field.neg(&self.field.one())))
    }

    /// `self + c * other` with an integer `c`.
    pub fn plus(&self, c: i64, other: &Self) -> Self {
        self.add(&other.scale(&self.field.from_i64(c)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.field);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                m.extend(mb.iter().cloned());
                out.add_term(m, self.field.mul(ca, cb));
            }
        }
        out
    }

    pub fn trace_monomials(&self) -> Vec<&TraceMonomial> {
        let mut v: Vec<&TraceMonomial> = self.terms.keys().flatten().collect();
        v.sort();
        v.dedup();
        v
    }

    /// Multidegree over `d` letters when every term shares it.
    pub fn mdeg(&self, d: usize) -> Option<Vec<usize>> {
        let mut it = self.terms.keys().map(|m| {
            m.iter().fold(vec![0; d], |mut acc, t| {
                for (a, x) in acc.iter_mut().zip(t.mdeg(d)) {
                    *a += x;
                }
                acc
            })
        });
        let first = it.next()?;
        it.all(|m| m == first).then_some(first)
    }

    /// Total degree when every term shares it.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.iter().map(TraceMonomial::degree).sum::<usize>());
        let first = it.next()?;
        it.all(|x| x == first).then_some(first)
    }

    /// Largest letter index used.
    pub fn letters(&self) -> usize {
        self.terms.keys().flatten().map(|t| t.word.max_letter() as usize).max().unwrap_or(0)
    }

    /// Value at a tuple of matrices.
    pub fn evaluate(&self, tuple: &[NumericMatrix<F>]) -> Result<F::Elem> {
        let f = &self.field;
        let mut cache: BTreeMap<&TraceMonomial, F::Elem> = BTreeMap::new();
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for tm in m {
                let v = match cache.get(tm) {
                    Some(v) => v.clone(),
                    None => {
                        let v = tm.evaluate(f, tuple)?;
                        cache.insert(tm, v.clone());
                        v
                    }
                };
                t = f.mul(&t, &v);
            }
            acc = f.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Expansion as a polynomial in the entries of `d` generic `n x n`
    /// matrices.
    pub fn to_poly(&self, n: usize, d: usize) -> Result<MultiPoly<F>> {
        let generics = (1..=d).map(|r| generic(&self.field, r, n, d)).collect::<Result<Vec<_>>>()?;
        let ring = PolyRing(self.field.clone());
        let mut cache: BTreeMap<&TraceMonomial, MultiPoly<F>> = BTreeMap::new();
        let mut acc = MultiPoly::zero(&self.field);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(&self.field, c.clone());
            for tm in m {
                if !cache.contains_key(tm) {
                    cache.insert(tm, tm.to_poly(&generics, &ring)?);
                }
                t = &t * &cache[tm];
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// `sum_v a_v tr(v x_letter)` for a combination `sum_v a_v v`.
    pub fn trace_times_letter(c: &NilCombination<F>, letter: u8) -> Result<Self> {
        let f = c.field();
        let mut out = Self::zero(f);
        let x = Word::new(vec![letter])?;
        for (w, a) in c.terms() {
            out.add_term(vec![TraceMonomial::tr(&w.concat(&x))], a.clone());
        }
        Ok(out)
    }
}

impl<F: Field> fmt::Display for InvariantExpr<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let mut coeff = self.field.format(c);
            let negative = coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            let body: Vec<String> = m.iter().map(|t| t.to_string()).collect();
            let body = body.join("*");
            let body = if coeff == "1" { body } else { format!("{coeff}*{body}") };
            match (idx == 0, negative) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// Coefficients of the parameter systems. The first five enter `P`; the
/// `lemma_*` tuples enter the auxiliary sets `Q4` and `Q5`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSet {
    pub alpha1: i64,
    pub alpha2: i64,
    pub beta1: i64,
    pub beta2: i64,
    pub gamma: i64,
    pub lemma_pair: (i64, i64),
    pub lemma_triple: (i64, i64, i64),
}

impl ParamSet {
    pub fn new(alpha1: i64, alpha2: i64, beta1: i64, beta2: i64, gamma: i64) -> Self {
        ParamSet { alpha1, alpha2, beta1, beta2, gamma, lemma_pair: (1, 1), lemma_triple: (1, 1, 1) }
    }

    /// All ones, except `beta2 = 2` in characteristic 3 so that
    /// `alpha1 + beta1 + alpha2 beta2` stays nonzero.
    pub fn default_for(characteristic: u64) -> Self {
        if characteristic == 3 {
            Self::new(1, 1, 1, 2, 1)
        } else {
            Self::new(1, 1, 1, 1, 1)
        }
    }

    /// Parses `a1,a2,b1,b2,g`.
    pub fn parse(text: &str) -> Result<Self> {
        let v: Vec<i64> = text
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Usage(format!("bad parameter '{t}'"))))
            .collect::<Result<_>>()?;
        match v.as_slice() {
            &[a1, a2, b1, b2, g] => Ok(Self::new(a1, a2, b1, b2, g)),
            _ => usage("expected five comma-separated integers a1,a2,b1,b2,g"),
        }
    }

    /// `alpha1 + beta1 + alpha2 beta2` in the field.
    pub fn key_sum<F: Field>(&self, f: &F) -> F::Elem {
        let ab = f.mul(&f.from_i64(self.alpha2), &f.from_i64(self.beta2));
        f.add(&f.add(&f.from_i64(self.alpha1), &f.from_i64(self.beta1)), &ab)
    }

    /// Nonzero coefficients and a nonzero key sum.
    pub fn validate<F: Field>(&self, f: &F) -> Result<()> {
        let named = [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("gamma", self.gamma),
        ];
        for (name, v) in named {
            if f.is_zero(&f.from_i64(v)) {
                return Err(Error::Param(format!("{name} = {v} vanishes in {}", f.spec())));
            }
        }
        if f.is_zero(&self.key_sum(f)) {
            return Err(Error::Param(format!("alpha1 + beta1 + alpha2*beta2 vanishes in {}", f.spec())));
        }
        Ok(())
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{}", self.alpha1, self.alpha2, self.beta1, self.beta2, self.gamma)
    }
}

/// Named list of invariants of `d` matrices of size `n`.
#[derive(Clone, Debug)]
pub struct GeneratorSet<F: Field> {
    pub label: String,
    pub n: usize,
    pub d: usize,
    pub elements: Vec<InvariantExpr<F>>,
}

impl<F: Field> GeneratorSet<F> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn union(&self, other: &Self, label: &str) -> Self {
        let mut elements = self.elements.clone();
        elements.extend(other.elements.iter().cloned());
        GeneratorSet { label: label.to_string(), n: self.n, d: self.d, elements }
    }

    /// Elements whose letters all lie in `letters`.
    pub fn restricted_to(&self, letters: &[u8]) -> Vec<&InvariantExpr<F>> {
        self.elements
            .iter()
            .filter(|e| e.terms().all(|(m, _)| m.iter().all(|t| t.word().letters().iter().all(|l| letters.contains(l)))))
            .collect()
    }
}

fn w(letters: &[u8]) -> Word {
    Word::from_letters(letters)
}

/// Ordered triples `(i, j, k)` of distinct letters.
fn triples() -> Vec<(u8, u8, u8)> {
    let mut v = Vec::new();
    for i in 1..=3 {
        for j in 1..=3 {
            for k in 1..=3 {
                if i != j && j != k && i != k {
                    v.push((i, j, k));
                }
            }
        }
    }
    v
}

fn pairs_ordered() -> Vec<(u8, u8)> {
    triples().into_iter().map(|(i, j, _)| (i, j)).collect()
}

fn pairs_increasing() -> Vec<(u8, u8)> {
    vec![(1, 2), (1, 3), (2, 3)]
}

fn named<F: Field>(label: &str, n: usize, d: usize, elements: Vec<InvariantExpr<F>>) -> GeneratorSet<F> {
    GeneratorSet { label: label.to_string(), n, d, elements }
}

/// The 38 invariants common to both characteristics.
pub fn g1<F: Field>(f: &F) -> GeneratorSet<F> {
    let tr = |l: &[u8]| InvariantExpr::tr(f, &w(l));
    let mut e = Vec::new();
    for i in 1..=3 {
        e.push(tr(&[i]));
    }
    for (i, j) in pairs_increasing() {
        e.push(tr(&[i, j]));
    }
    for i in 1..=3 {
        e.push(InvariantExpr::sigma(f, 2, &w(&[i])));
    }
    e.push(tr(&[1, 2, 3]));
    e.push(tr(&[1, 3, 2]));
    for (i, j) in pairs_ordered() {
        e.push(tr(&[i, i, j]));
    }
    for i in 1..=3 {
        e.push(InvariantExpr::sigma(f, 3, &w(&[i])));
    }
    for (i, j) in pairs_increasing() {
        e.push(tr(&[i, i, j, j]));
    }
    for (i, j, k) in triples() {
        e.push(tr(&[i, i, j, k]));
    }
    for (i, j, k) in triples() {
        e.push(tr(&[i, i, j, j, k]));
    }
    for (i, j, k) in triples() {
        if j < k {
            e.push(tr(&[i, i, j, i, k]));
        }
    }
    named("G1", 3, 3, e)
}

fn common_degree_six<F: Field>(f: &F) -> Vec<InvariantExpr<F>> {
    let tr = |l: &[u8]| InvariantExpr::tr(f, &w(l));
    let mut e = Vec::new();
    for (i, j) in pairs_increasing() {
        e.push(tr(&[i, i, j, j, i, j]));
    }
    for (i, j, k) in triples() {
        e.push(tr(&[i, i, j, j, i, k]));
    }
    e.push(tr(&[1, 1, 2, 2, 3, 3]));
    e
}

/// The 10 extra generators when the characteristic is not 3.
pub fn g2<F: Field>(f: &F) -> GeneratorSet<F> {
    named("G2", 3, 3, common_degree_six(f))
}

/// The 20 extra generators in characteristic 3.
pub fn g3<F: Field>(f: &F) -> GeneratorSet<F> {
    let tr = |l: &[u8]| InvariantExpr::tr(f, &w(l));
    let mut e = common_degree_six(f);
    e.push(tr(&[1, 1, 3, 3, 2, 2]));
    for (i, j, k) in triples() {
        if j < k {
            e.push(tr(&[i, j, j, k, k, j, k]));
        }
    }
    for (i, j, k) in triples() {
        if j < k {
            e.push(tr(&[i, i, j, j, i, k, k]));
        }
    }
    for (i, j, k) in triples() {
        if j < k {
            e.push(tr(&[i, i, j, j, k, k, j, k]));
        }
    }
    named("G3", 3, 3, e)
}

/// Minimal generating set of the invariants of three 3x3 matrices:
/// `G1 + G2` unless the characteristic is 3, then `G1 + G3`.
pub fn build_generators<F: Field>(f: &F) -> GeneratorSet<F> {
    if f.characteristic() == 3 {
        g1(f).union(&g3(f), "Gii")
    } else {
        g1(f).union(&g2(f), "Gi")
    }
}

/// Which parameter system to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HsopTarget {
    /// Three 3x3 matrices.
    R33,
    /// Two 3x3 matrices.
    R32,
    /// Two 4x4 matrices.
    R42,
}

impl HsopTarget {
    pub fn shape(self) -> (usize, usize) {
        match self {
            HsopTarget::R33 => (3, 3),
            HsopTarget::R32 => (3, 2),
            HsopTarget::R42 => (4, 2),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            HsopTarget::R33 => "P",
            HsopTarget::R32 => "P32",
            HsopTarget::R42 => "P42",
        }
    }
}

/// Transcendence degree `(d - 1) n^2 + 1` of the invariants of `d >= 2`
/// matrices of size `n`.
pub fn transcendence_degree(n: usize, d: usize) -> usize {
    (d - 1) * n * n + 1
}

fn sigmas<F: Field>(f: &F, n: usize, d: usize) -> Vec<InvariantExpr<F>> {
    let mut e = Vec::new();
    for i in 1..=d as u8 {
        for k in 1..=n as u8 {
            e.push(InvariantExpr::sigma(f, k, &w(&[i])));
        }
    }
    e
}

/// Homogeneous system of parameters. Only `R33` uses `params`, and rejects
/// them unless all are nonzero and `alpha1 + beta1 + alpha2 beta2 != 0`.
pub fn build_hsop<F: Field>(target: HsopTarget, params: &ParamSet, f: &F) -> Result<GeneratorSet<F>> {
    if target == HsopTarget::R33 {
        params.validate(f)?;
    }
    Ok(build_hsop_unchecked(target, params, f))
}

/// [`build_hsop`] without the parameter check; for negative controls.
pub fn build_hsop_unchecked<F: Field>(target: HsopTarget, params: &ParamSet, f: &F) -> GeneratorSet<F> {
    let tr = |l: &[u8]| InvariantExpr::tr(f, &w(l));
    let (n, d) = target.shape();
    let mut e = sigmas(f, n, d);
    match target {
        HsopTarget::R33 => {
            for (i, j) in pairs_increasing() {
                e.push(tr(&[i, j]));
            }
            e.push(tr(&[1, 1, 2]).plus(params.alpha1, &tr(&[2, 2, 3])).plus(params.alpha2, &tr(&[3, 3, 1])));
            e.push(tr(&[1, 1, 3]).plus(-params.beta1, &tr(&[3, 3, 2])));
            e.push(tr(&[1, 1, 3]).plus(-params.beta2, &tr(&[2, 2, 1])));
            e.push(tr(&[1, 2, 3]).plus(params.gamma, &tr(&[1, 3, 2])));
            for (i, j) in pairs_increasing() {
                e.push(tr(&[i, i, j, j]));
            }
        }
        HsopTarget::R32 => {
            for l in [&[1, 2][..], &[1, 1, 2], &[1, 2, 2], &[1, 1, 2, 2]] {
                e.push(tr(l));
            }
        }
        HsopTarget::R42 => {
            for l in [&[1, 2][..], &[1, 1, 2], &[1, 2, 2], &[1, 1, 1, 2], &[1, 2, 2, 2], &[1, 1, 2, 2]] {
                e.push(tr(l));
            }
            for l in [&[1, 2][..], &[1, 2, 2], &[1, 1, 2]] {
                e.push(InvariantExpr::sigma(f, 2, &w(l)));
            }
        }
    }
    named(target.label(), n, d, e)
}

/// Auxiliary sets whose common zeros already lie in the nullcone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaSet {
    /// `sigma_k(X_i)`, `tr(X_i^2 X_j)`, `tr(X_i^2 X_j^2)` and traces of all
    /// words in distinct letters.
    Q3,
    /// Adds `tr(X_i X_j)` and one combination of the two cubic traces.
    Q4,
    /// Uses one combination of `tr(X_i^2 X_j)` around the cycle.
    Q5,
}

pub fn build_lemma_set<F: Field>(which: LemmaSet, params: &ParamSet, f: &F) -> Result<GeneratorSet<F>> {
    let tr = |l: &[u8]| InvariantExpr::tr(f, &w(l));
    let mut e = sigmas(f, 3, 3);
    let nonzero = |vals: &[i64]| {
        if vals.iter().any(|&v| f.is_zero(&f.from_i64(v))) {
            Err(Error::Param(format!("lemma coefficients must be nonzero in {}", f.spec())))
        } else {
            Ok(())
        }
    };
    let label = match which {
        LemmaSet::Q3 => {
            for (i, j) in pairs_ordered() {
                e.push(tr(&[i, i, j]));
            }
            for (i, j) in pairs_increasing() {
                e.push(tr(&[i, i, j, j]));
            }
            for (i, j) in pairs_ordered() {
                e.push(tr(&[i, j]));
            }
            for (i, j, k) in triples() {
                e.push(tr(&[i, j, k]));
            }
            "Q3"
        }
        LemmaSet::Q4 => {
            let (a, b) = params.lemma_pair;
            nonzero(&[a, b])?;
            for (i, j) in pairs_increasing() {
                e.push(tr(&[i, j]));
            }
            for (i, j) in pairs_ordered() {
                e.push(tr(&[i, i, j]));
            }
            for (i, j) in pairs_increasing() {
                e.push(tr(&[i, i, j, j]));
            }
            e.push(tr(&[1, 2, 3]).scale(&f.from_i64(a)).plus(b, &tr(&[1, 3, 2])));
            "Q4"
        }
        LemmaSet::Q5 => {
            let (a1, a2, a3) = params.lemma_triple;
            let (b1, b2) = params.lemma_pair;
            nonzero(&[a1, a2, a3, b1, b2])?;
            for (i, j) in pairs_increasing() {
                e.push(tr(&[i, j]));
            }
            for (i, j) in pairs_increasing() {
                e.push(tr(&[i, i, j, j]));
            }
            e.push(tr(&[1, 1, 3]));
            e.push(tr(&[3, 3, 2]));
            e.push(tr(&[2, 2, 1]));
            e.push(tr(&[1, 1, 2]).scale(&f.from_i64(a1)).plus(a2, &tr(&[2, 2, 3])).plus(a3, &tr(&[3, 3, 1])));
            e.push(tr(&[1, 2, 3]).scale(&f.from_i64(b1)).plus(b2, &tr(&[1, 3, 2])));
            "Q5"
        }
    };
    Ok(named(label, 3, 3, e))
}

/// Number of elements in a minimal generating set of the invariants of `d`
/// generic 3x3 matrices in characteristic zero:
/// `3d + 5 C(d,2) + 24 C(d,3) + 51 C(d,4) + 47 C(d,5) + 15 C(d,6)`.
pub fn count_msog(d: u64) -> Result<u128> {
    if d == 0 {
        return usage("d must be at least 1");
    }
    const COEFFS: [u128; 6] = [3, 5, 24, 51, 47, 15];
    let mut total: u128 = 0;
    for (i, &c) in COEFFS.iter().enumerate() {
        let b = binomial(d as u128, i as u128 + 1).ok_or_else(|| Error::Usage("count overflows".into()))?;
        total = total
            .checked_add(c.checked_mul(b).ok_or_else(|| Error::Usage("count overflows".into()))?)
            .ok_or_else(|| Error::Usage("count overflows".into()))?;
    }
    Ok(total)
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul(n - i)? / (i + 1);
    }
    Some(r)
}

/// Where the products of `graded_family` come from.
#[derive(Clone, Debug)]
pub enum FamilySource<'a, F: Field> {
    /// `sigma_k` of canonical cyclic words.
    Full,
    /// Elements of a generating set.
    GeneratedBy(&'a GeneratorSet<F>),
}

/// Largest degree `graded_family` will enumerate.
pub const FAMILY_BOUND: usize = 8;

/// All products of atoms with total multidegree `m`, `|m| <= bound <= 8`.
pub fn graded_family<F: Field>(
    f: &F,
    m: &[usize],
    source: FamilySource<'_, F>,
    bound: usize,
) -> Result<Vec<InvariantExpr<F>>> {
    if bound > FAMILY_BOUND {
        return usage(format!("degree bound {bound} exceeds {FAMILY_BOUND}"));
    }
    let total: usize = m.iter().sum();
    if total > bound {
        return usage("multidegree exceeds the degree bound");
    }
    let d = m.len();
    let atoms: Vec<(Vec<usize>, InvariantExpr<F>)> = match source {
        FamilySource::Full => {
            let mut v = Vec::new();
            for word in enumerate_canonical(d, total.max(1), None, true)? {
                for k in 1..=3u8 {
                    let t = TraceMonomial::new(k, &word);
                    if t.degree() <= total {
                        v.push((t.mdeg(d), InvariantExpr::tm(f, t)));
                    }
                }
            }
            v
        }
        FamilySource::GeneratedBy(set) => set
            .elements
            .iter()
            .filter_map(|e| e.mdeg(d).map(|md| (md, e.clone())))
            .collect(),
    };
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    combine(&atoms, 0, m.to_vec(), &mut chosen, &mut out, f);
    Ok(out)
}

fn combine<F: Field>(
    atoms: &[(Vec<usize>, InvariantExpr<F>)],
    start: usize,
    rest: Vec<usize>,
    chosen: &mut Vec<usize>,
    out: &mut Vec<InvariantExpr<F>>,
    f: &F,
) {
    if rest.iter().all(|&x| x == 0) {
        if !chosen.is_empty() {
            let mut e = InvariantExpr::monomial(f, vec![]);
            for &i in chosen.iter() {
                e = e.mul(&atoms[i].1);
            }
            out.push(e);
        }
        return;
    }
    for i in start..atoms.len() {
        let md = &atoms[i].0;
        if md.iter().all(|&x| x == 0) || md.iter().zip(&rest).any(|(a, b)| a > b) {
            continue;
        }
        let next: Vec<usize> = rest.iter().zip(md).map(|(a, b)| a - b).collect();
        chosen.push(i);
        combine(atoms, i, next, chosen, out, f);
        chosen.pop();
    }
}

/// Rows are samples, columns are expressions.
pub fn evaluation_matrix<F: Field>(
    exprs: &[InvariantExpr<F>],
    samples: &[Vec<NumericMatrix<F>>],
) -> Result<Vec<Vec<F::Elem>>> {
    samples.iter().map(|s| exprs.iter().map(|e| e.evaluate(s)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Ring;
    use crate::field::{PrimeField, Rationals};
    use crate::linalg::exact_rank;
    use crate::matrix::{conjugate, j1, j2, random_invertible, random_matrix, random_strict_upper, Matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cardinalities() {
        let f = PrimeField::surrogate();
        assert_eq!(g1(&f).len(), 38);
        assert_eq!(g2(&f).len(), 10);
        assert_eq!(g3(&f).len(), 20);
        assert_eq!(build_generators(&f).len(), 48);
        assert_eq!(build_generators(&PrimeField::new(3).unwrap()).len(), 58);
        let p = ParamSet::default_for(0);
        for (t, size) in [(HsopTarget::R33, 19), (HsopTarget::R32, 10), (HsopTarget::R42, 17)] {
            let s = build_hsop(t, &p, &f).unwrap();
            assert_eq!(s.len(), size);
            assert_eq!(s.len(), transcendence_degree(s.n, s.d));
        }
    }

    #[test]
    fn generators_are_distinct_and_homogeneous() {
        for f in [PrimeField::surrogate(), PrimeField::new(3).unwrap()] {
            let g = build_generators(&f);
            let mut seen = std::collections::BTreeSet::new();
            for e in &g.elements {
                assert!(e.mdeg(3).is_some());
                assert!(seen.insert(e.to_string()), "duplicate {e}");
            }
        }
    }

    #[test]
    fn hsop_parameter_checks() {
        let f3 = PrimeField::new(3).unwrap();
        let ones = ParamSet::new(1, 1, 1, 1, 1);
        assert!(matches!(build_hsop(HsopTarget::R33, &ones, &f3), Err(Error::Param(_))));
        assert!(build_hsop(HsopTarget::R33, &ParamSet::default_for(3), &f3).is_ok());
        let zero_gamma = ParamSet::new(1, 1, 1, 1, 0);
        assert!(build_hsop(HsopTarget::R33, &zero_gamma, &Rationals).is_err());
        assert_eq!(ParamSet::parse("1, 2,3,4,5").unwrap(), ParamSet::new(1, 2, 3, 4, 5));
        assert!(ParamSet::parse("1,2").is_err());
    }

    #[test]
    fn single_letter_restriction_and_letter_groups() {
        let f = PrimeField::surrogate();
        let g = build_generators(&f);
        let only1: Vec<String> = g.restricted_to(&[1]).iter().map(|e| e.to_string()).collect();
        assert_eq!(only1, vec!["tr(X1)", "sigma2(X1)", "sigma3(X1)"]);
        let mut by_letters = [0usize; 4];
        for e in &g.elements {
            let used: std::collections::BTreeSet<u8> =
                e.trace_monomials().iter().flat_map(|t| t.word().letters().to_vec()).collect();
            by_letters[used.len()] += 1;
        }
        assert_eq!(by_letters[1..], [3 * 3, 5 * 3, 24]);
    }

    #[test]
    fn msog_table() {
        let table: Vec<u128> = (1..=6).map(|d| count_msog(d).unwrap()).collect();
        assert_eq!(table, vec![3, 11, 48, 189, 607, 1635]);
        assert!(count_msog(0).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let q = Rationals;
        let e = InvariantExpr::tr_text(&q, "x1 x2").unwrap();
        assert_eq!(e.evaluate(&[j1(&q), j1(&q).transpose()]).unwrap(), q.from_i64(1));
        assert!(q.is_zero(&InvariantExpr::sigma(&q, 2, &w(&[1])).evaluate(&[j2(&q)]).unwrap()));
        let id = Matrix::identity(&q, 3);
        let rows = evaluation_matrix(&[InvariantExpr::tr(&q, &w(&[1]))], &[vec![id.clone(), id.clone(), id]]).unwrap();
        assert_eq!(rows, vec![vec![q.from_i64(3)]]);
        let zero = Matrix::zero(&q, 3);
        let g = build_generators(&q);
        let row = evaluation_matrix(&g.elements, &[vec![zero.clone(), zero.clone(), zero]]).unwrap();
        assert!(row[0].iter().all(|x| q.is_zero(x)));
    }

    #[test]
    fn generators_vanish_on_strict_upper_and_are_conjugation_invariant() {
        let f = PrimeField::surrogate();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = build_generators(&f);
        let p = build_hsop(HsopTarget::R33, &ParamSet::default_for(0), &f).unwrap();
        for _ in 0..5 {
            let upper: Vec<_> = (0..3).map(|_| random_strict_upper(&f, 3, &mut rng)).collect();
            for e in g.elements.iter().chain(&p.elements) {
                assert_eq!(e.evaluate(&upper).unwrap(), 0);
            }
            let tuple: Vec<_> = (0..3).map(|_| random_matrix(&f, 3, &mut rng)).collect();
            let h = random_invertible(&f, 3, &mut rng);
            let conj: Vec<_> = tuple.iter().map(|a| conjugate(&f, &h, a).unwrap()).collect();
            for e in &g.elements {
                assert_eq!(e.evaluate(&tuple).unwrap(), e.evaluate(&conj).unwrap());
            }
        }
    }

    #[test]
    fn graded_family_examples() {
        let f = PrimeField::surrogate();
        let show = |v: Vec<InvariantExpr<PrimeField>>| {
            let mut s: Vec<String> = v.iter().map(|e| e.to_string()).collect();
            s.sort();
            s
        };
        assert_eq!(show(graded_family(&f, &[1, 0, 0], FamilySource::Full, 6).unwrap()), vec!["tr(X1)"]);
        assert_eq!(
            show(graded_family(&f, &[2, 0, 0], FamilySource::Full, 6).unwrap()),
            vec!["sigma2(X1)", "tr(X1)*tr(X1)", "tr(X1^2)"]
        );
        let g = build_generators(&f);
        let fam = show(graded_family(&f, &[1, 1, 1], FamilySource::GeneratedBy(&g), 6).unwrap());
        for want in ["tr(X1)*tr(X2)*tr(X3)", "tr(X1 X2)*tr(X3)", "tr(X1 X2 X3)", "tr(X1 X3 X2)"] {
            assert!(fam.contains(&want.to_string()), "{want}");
        }
        assert!(graded_family(&f, &[3, 3, 3], FamilySource::Full, 9).is_err());
        // two cubic traces are independent as functions
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pair = [InvariantExpr::tr_text(&f, "x1 x2 x3").unwrap(), InvariantExpr::tr_text(&f, "x1 x3 x2").unwrap()];
        let samples: Vec<Vec<_>> = (0..4).map(|_| (0..3).map(|_| random_matrix(&f, 3, &mut rng)).collect()).collect();
        assert_eq!(exact_rank(&f, &evaluation_matrix(&pair, &samples).unwrap()), 2);
    }
}
