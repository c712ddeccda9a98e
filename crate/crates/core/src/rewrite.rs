//! Normal forms in the free nonunital algebra modulo cubes, `N_3`.
//!
//! Rules, tried in this order on each word:
//!
//! * a cube `x x x` is zero;
//! * two squares separated by a nonempty gap, `x^2 u x^2`, are zero (this
//!   follows from the second linearization rule below). When the
//!   characteristic is not 3, `x^2 u y^2 = 0` for any letters;
//! * the letter whose first occurrence is leftmost among the non-canonical
//!   letters is repaired: `x u x^2 -> -x^2 u x`, otherwise
//!   `x u x -> -x^2 u - u x^2` on its first two occurrences; a word that
//!   starts its `x`-pattern with `x^2` and has four or more `x` is zero;
//! * canonical words `y^2 x^2 y x` with `y > x` become `-x^2 y^2 x y`.
//!
//! Every linearization step either creates an adjacent equal pair (the
//! count of such pairs never drops) or, for the `x u x^2` rule, moves the
//! square of `x` strictly left while keeping the pair count. Words are
//! bounded, so chains are finite; the step budget turns a violation of this
//! argument into an internal error instead of a hang.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::error::{usage, Error, Result};
use crate::field::Field;
use crate::word::{LetterShape, Word};

/// Default cap on rule applications per `canonicalize` call.
pub const STEP_BUDGET: usize = 2_000_000;

/// Linear combination of words with coefficients in `F`.
#[derive(Clone, Debug)]
pub struct NilCombination<F: Field> {
    field: F,
    terms: BTreeMap<Word, F::Elem>,
}

impl<F: Field> PartialEq for NilCombination<F> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<F: Field> NilCombination<F> {
    pub fn zero(field: &F) -> Self {
        NilCombination { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn word(field: &F, w: Word) -> Self {
        let mut c = Self::zero(field);
        c.add_term(w, field.one());
        c
    }

    pub fn from_terms(field: &F, terms: impl IntoIterator<Item = (Word, F::Elem)>) -> Self {
        let mut c = Self::zero(field);
        for (w, a) in terms {
            c.add_term(w, a);
        }
        c
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &F::Elem)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> F::Elem {
        self.terms.get(w).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add_term(&mut self, w: Word, a: F::Elem) {
        if self.field.is_zero(&a) {
            return;
        }
        let f = &self.field;
        match self.terms.get_mut(&w) {
            Some(old) => {
                let s = f.add(old, &a);
                if f.is_zero(&s) {
                    self.terms.remove(&w);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(w, a);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, a) in &other.terms {
            out.add_term(w.clone(), a.clone());
        }
        out
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        Self::from_terms(&self.field, self.terms.iter().map(|(w, a)| (w.clone(), self.field.mul(a, c))))
    }

    /// Deletes every occurrence of letter `k`. Each word must contain `k`
    /// once or twice and keep at least one other letter.
    pub fn specialize_to_one(&self, k: u8) -> Result<Self> {
        let mut out = Self::zero(&self.field);
        for (w, a) in &self.terms {
            let deg = w.deg_in(k);
            if !(1..=2).contains(&deg) {
                return usage(format!("word {w} has degree {deg} in x{k}; expected 1 or 2"));
            }
            let rest: Vec<u8> = w.letters().iter().copied().filter(|&l| l != k).collect();
            out.add_term(Word::new(rest)?, a.clone());
        }
        Ok(out)
    }
}

impl<F: Field> fmt::Display for NilCombination<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (w, a)) in self.terms.iter().enumerate() {
            let mut c = self.field.format(a);
            let negative = c.starts_with('-');
            if negative {
                c.remove(0);
            }
            let body = if c == "1" { w.to_string() } else { format!("{c} {w}") };
            match (idx == 0, negative) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "- {body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// One rewriting step applied to a single word.
#[derive(Debug, PartialEq, Eq)]
enum Step {
    Zero,
    Keep,
    Replace(Vec<(Vec<u8>, i64)>),
}

fn step(w: &[u8], item2: bool) -> Step {
    let n = w.len();
    if w.windows(3).any(|t| t[0] == t[1] && t[1] == t[2]) {
        return Step::Zero;
    }
    let squares: Vec<usize> = (0..n.saturating_sub(1)).filter(|&i| w[i] == w[i + 1]).collect();
    for (a, &i) in squares.iter().enumerate() {
        for &j in &squares[a + 1..] {
            if j >= i + 3 && (item2 || w[i] == w[j]) {
                return Step::Zero;
            }
        }
    }
    let word = Word::from_letters(w);
    let bad = word
        .shapes()
        .into_iter()
        .filter(|(_, s)| *s == LetterShape::NonCanonical)
        .map(|(l, _)| (w.iter().position(|&c| c == l).expect("present"), l))
        .min();
    if let Some((p1, x)) = bad {
        let pos: Vec<usize> = (0..n).filter(|&i| w[i] == x).collect();
        let p2 = pos[1];
        if p2 == p1 + 1 {
            // x^2 u x v x ... : linearizing the later pair gives x^2 u x^2 terms
            return Step::Zero;
        }
        let (head, u) = (&w[..p1], &w[p1 + 1..p2]);
        if pos.get(2) == Some(&(p2 + 1)) {
            let tail = &w[p2 + 2..];
            let t = [head, &[x, x], u, &[x], tail].concat();
            return Step::Replace(vec![(t, -1)]);
        }
        let tail = &w[p2 + 1..];
        let t1 = [head, &[x, x], u, tail].concat();
        let t2 = [head, u, &[x, x], tail].concat();
        return Step::Replace(vec![(t1, -1), (t2, -1)]);
    }
    for i in 0..n.saturating_sub(5) {
        let (y, x) = (w[i], w[i + 2]);
        if y > x && w[i + 1] == y && w[i + 3] == x && w[i + 4] == y && w[i + 5] == x {
            let mut t = w.to_vec();
            t[i..i + 6].copy_from_slice(&[x, x, y, y, x, y]);
            return Step::Replace(vec![(t, -1)]);
        }
    }
    Step::Keep
}

/// Memoizing rewriter. Normal forms of single words have integer
/// coefficients and depend on the field only through whether its
/// characteristic is 3.
#[derive(Debug)]
pub struct Rewriter {
    item2: bool,
    memo: HashMap<Vec<u8>, BTreeMap<Vec<u8>, i64>>,
    steps: usize,
    budget: usize,
}

impl Rewriter {
    pub fn new(characteristic: u64) -> Self {
        Self::with_budget(characteristic, STEP_BUDGET)
    }

    pub fn with_budget(characteristic: u64, budget: usize) -> Self {
        Rewriter { item2: characteristic != 3, memo: HashMap::new(), steps: 0, budget }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn normal_form(&mut self, w: &[u8], active: &mut HashSet<Vec<u8>>) -> Result<BTreeMap<Vec<u8>, i64>> {
        if let Some(nf) = self.memo.get(w) {
            return Ok(nf.clone());
        }
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::Internal(format!("rewrite step budget {} exhausted", self.budget)));
        }
        if !active.insert(w.to_vec()) {
            return Err(Error::Internal(format!("rewrite cycle through {}", Word::from_letters(w))));
        }
        let mut out: BTreeMap<Vec<u8>, i64> = BTreeMap::new();
        match step(w, self.item2) {
            Step::Zero => {}
            Step::Keep => {
                out.insert(w.to_vec(), 1);
            }
            Step::Replace(terms) => {
                for (t, c) in terms {
                    for (v, d) in self.normal_form(&t, active)? {
                        let e = out.entry(v).or_insert(0);
                        *e = c
                            .checked_mul(d)
                            .and_then(|p| e.checked_add(p))
                            .ok_or_else(|| Error::Internal("rewrite coefficient overflow".into()))?;
                    }
                }
                out.retain(|_, c| *c != 0);
            }
        }
        active.remove(w);
        self.memo.insert(w.to_vec(), out.clone());
        Ok(out)
    }

    /// Rewrites every word of `c` into canonical words.
    pub fn canonicalize<F: Field>(&mut self, c: &NilCombination<F>) -> Result<NilCombination<F>> {
        let f = c.field();
        let mut out = NilCombination::zero(f);
        for (w, a) in c.terms() {
            let mut active = HashSet::new();
            for (v, k) in self.normal_form(w.letters(), &mut active)? {
                out.add_term(Word::from_letters(&v), f.mul(a, &f.from_i64(k)));
            }
        }
        Ok(out)
    }
}

/// Canonical form of `c` with a fresh rewriter and the default budget.
pub fn canonicalize<F: Field>(c: &NilCombination<F>) -> Result<NilCombination<F>> {
    Rewriter::new(c.field().characteristic()).canonicalize(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Ring;
    use crate::field::{PrimeField, Rationals};
    use crate::word::enumerate_canonical;

    fn w(text: &str) -> Word {
        Word::parse(text).unwrap()
    }

    fn canon<F: Field>(f: &F, text: &str) -> NilCombination<F> {
        canonicalize(&NilCombination::word(f, w(text))).unwrap()
    }

    #[test]
    fn linearization_rules() {
        let q = Rationals;
        assert_eq!(canon(&q, "x1 x2 x1").to_string(), "- x1^2 x2 - x2 x1^2");
        assert_eq!(canon(&q, "x1 x2 x1^2").to_string(), "- x1^2 x2 x1");
        assert_eq!(canon(&q, "x1^3").to_string(), "0");
        assert_eq!(canon(&q, "x1^2 x2 x3^2").to_string(), "0");
        assert_eq!(canon(&PrimeField::new(3).unwrap(), "x1^2 x2 x3^2").to_string(), "x1^2 x2 x3^2");
        assert_eq!(canon(&PrimeField::new(3).unwrap(), "x1^2 x2 x1^2").to_string(), "0");
    }

    #[test]
    fn item_three_and_survivor() {
        for f in [PrimeField::surrogate(), PrimeField::new(3).unwrap(), PrimeField::new(2).unwrap()] {
            let c = NilCombination::from_terms(&f, [(w("x2^2 x1^2 x2 x1"), 1), (w("x1^2 x2^2 x1 x2"), 1)]);
            assert!(canonicalize(&c).unwrap().is_empty());
            assert_eq!(canon(&f, "x1^2 x2^2 x1").to_string(), "x1^2 x2^2 x1");
        }
    }

    #[test]
    fn specialization() {
        let q = Rationals;
        let c = NilCombination::from_terms(&q, [(w("x3 x1^2 x2^2"), q.one()), (w("x1^2 x2^2 x3"), q.one())]);
        let s = c.specialize_to_one(3).unwrap();
        assert_eq!(s.to_string(), "2 x1^2 x2^2");
        assert_eq!(NilCombination::word(&q, w("x1 x2 x1")).specialize_to_one(2).unwrap().to_string(), "x1^2");
        assert_eq!(NilCombination::word(&q, w("x1^2 x2^2")).specialize_to_one(1).unwrap().to_string(), "x2^2");
        assert!(NilCombination::word(&q, w("x1^2 x2 x1")).specialize_to_one(1).is_err());
        assert!(NilCombination::word(&q, w("x2")).specialize_to_one(1).is_err());
    }

    #[test]
    fn every_short_word_terminates_canonically() {
        for p in [0u64, 3] {
            let mut r = Rewriter::new(p);
            let f = PrimeField::surrogate();
            for deg in 1..=7 {
                let total = 3usize.pow(deg);
                for code in 0..total {
                    let mut c = code;
                    let letters: Vec<u8> = (0..deg)
                        .map(|_| {
                            let l = (c % 3) as u8 + 1;
                            c /= 3;
                            l
                        })
                        .collect();
                    let word = Word::from_letters(&letters);
                    let out = r.canonicalize(&NilCombination::word(&f, word.clone())).unwrap();
                    for (v, _) in out.terms() {
                        assert!(v.is_canonical(), "{word} -> {v}");
                        assert_eq!(v.mdeg(3), word.mdeg(3));
                    }
                }
            }
        }
        // canonical words are fixed points apart from the sign normalization
        let f = PrimeField::surrogate();
        for v in enumerate_canonical(2, 4, None, false).unwrap() {
            assert_eq!(canonicalize(&NilCombination::word(&f, v.clone())).unwrap(), NilCombination::word(&f, v));
        }
    }
}
