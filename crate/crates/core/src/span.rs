//! Graded spans of invariants, compared through their values at random
//! tuples of matrices.
//!
//! For each multidegree `m` the engine keeps a basis of the sampled space
//! `R_m` and of its decomposable part `D_m = sum R_a R_b` (`a + b = m`, both
//! nonzero). Writing `H_a` for atoms independent modulo `D_a`, every product
//! of two or more atoms lies in the span of `h * b` with `h` in `H_a` and `b`
//! a basis element of `R_{m-a}`, so only those products are formed.
//!
//! Sampled ranks never exceed the true dimensions; a nonzero polynomial of
//! degree `D` vanishes at a random point of a field with `q` elements with
//! probability at most `D / q`. A rank within `SAMPLE_MARGIN` of the sample
//! count is treated as saturated and the caller retries with more samples.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{usage, Error, Result};
use crate::field::Field;
use crate::invariant::{InvariantExpr, TraceMonomial};
use crate::linalg::Echelon;
use crate::matrix::{random_matrix, NumericMatrix};
use crate::word::Word;

/// Minimum gap between a sampled rank and the number of samples.
pub const SAMPLE_MARGIN: usize = 16;
/// Sample counts are doubled up to this limit.
pub const MAX_SAMPLES: usize = 4096;

/// Random tuples of `d` matrices of size `n` with cached values of trace
/// monomials.
pub struct SampleBank<F: Field> {
    field: F,
    n: usize,
    d: usize,
    samples: Vec<Vec<NumericMatrix<F>>>,
    cache: HashMap<TraceMonomial, Vec<F::Elem>>,
}

impl<F: Field> SampleBank<F> {
    pub fn new(field: &F, n: usize, d: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..count).map(|_| (0..d).map(|_| random_matrix(field, n, &mut rng)).collect()).collect();
        SampleBank { field: field.clone(), n, d, samples, cache: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vec<NumericMatrix<F>>] {
        &self.samples
    }

    pub fn matrix_size(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> usize {
        self.d
    }

    pub fn tm_values(&mut self, tm: &TraceMonomial) -> Result<&[F::Elem]> {
        if !self.cache.contains_key(tm) {
            let v = self.samples.iter().map(|s| tm.evaluate(&self.field, s)).collect::<Result<Vec<_>>>()?;
            self.cache.insert(tm.clone(), v);
        }
        Ok(&self.cache[tm])
    }

    pub fn expr_values(&mut self, e: &InvariantExpr<F>) -> Result<Vec<F::Elem>> {
        if e.letters() > self.d {
            return usage(format!("expression uses letter {} but samples have {}", e.letters(), self.d));
        }
        let f = self.field.clone();
        let mut acc = vec![f.zero(); self.len()];
        for (m, c) in e.terms() {
            let mut t = vec![c.clone(); self.len()];
            for tm in m {
                let v = self.tm_values(tm)?;
                for (a, b) in t.iter_mut().zip(v) {
                    *a = f.mul(a, b);
                }
            }
            for (a, b) in acc.iter_mut().zip(&t) {
                *a = f.add(a, b);
            }
        }
        Ok(acc)
    }
}

/// Atoms generating the graded algebra.
#[derive(Clone, Debug)]
pub enum Atoms<F: Field> {
    /// `sigma_k(w)` for every word `w` and `1 <= k <= n`.
    Full,
    /// Multihomogeneous elements with their multidegrees.
    Set(Vec<(Vec<usize>, InvariantExpr<F>)>),
}

impl<F: Field> Atoms<F> {
    pub fn from_elements(elements: &[InvariantExpr<F>], d: usize) -> Result<Self> {
        let mut v = Vec::new();
        for e in elements {
            match e.mdeg(d) {
                Some(m) => v.push((m, e.clone())),
                None if e.is_zero() => {}
                None => return usage(format!("{e} is not multihomogeneous")),
            }
        }
        Ok(Atoms::Set(v))
    }
}

struct Level<F: Field> {
    basis: Vec<Vec<F::Elem>>,
    indecomposable: Vec<Vec<F::Elem>>,
    decomposable: Option<Echelon<F>>,
}

/// Memoized sampled spans `R_m` for one family of atoms.
pub struct GradedSpan<F: Field> {
    field: F,
    atoms: Atoms<F>,
    levels: HashMap<Vec<usize>, Level<F>>,
    targets: HashMap<Vec<usize>, usize>,
    keep_decomposable: bool,
}

impl<F: Field> GradedSpan<F> {
    pub fn new(field: &F, atoms: Atoms<F>) -> Self {
        GradedSpan {
            field: field.clone(),
            atoms,
            levels: HashMap::new(),
            targets: HashMap::new(),
            keep_decomposable: true,
        }
    }

    /// Stops growing `R_m` once its rank reaches `targets[m]`. Decomposable
    /// parts are then incomplete, so they are not kept.
    pub fn with_targets(mut self, targets: HashMap<Vec<usize>, usize>) -> Self {
        self.targets = targets;
        self.keep_decomposable = false;
        self
    }

    /// Skips storing decomposable parts (they are only needed by
    /// `decomposable_span`).
    pub fn without_decomposable(mut self) -> Self {
        self.keep_decomposable = false;
        self
    }

    pub fn rank(&mut self, bank: &mut SampleBank<F>, m: &[usize]) -> Result<usize> {
        self.ensure(bank, m)?;
        Ok(self.levels[m].basis.len())
    }

    /// Sampled `D_m`.
    pub fn decomposable_span(&mut self, bank: &mut SampleBank<F>, m: &[usize]) -> Result<&Echelon<F>> {
        if !self.keep_decomposable {
            return usage("decomposable parts were not kept");
        }
        self.ensure(bank, m)?;
        Ok(self.levels[m].decomposable.as_ref().expect("kept"))
    }

    /// Number of atoms of degree `m` independent modulo `D_m`.
    pub fn indecomposable_count(&mut self, bank: &mut SampleBank<F>, m: &[usize]) -> Result<usize> {
        self.ensure(bank, m)?;
        Ok(self.levels[m].indecomposable.len())
    }

    fn ensure(&mut self, bank: &mut SampleBank<F>, m: &[usize]) -> Result<()> {
        if m.len() != bank.letters() {
            return usage("multidegree length differs from the number of matrices");
        }
        if m.iter().all(|&x| x == 0) {
            return usage("zero multidegree");
        }
        for sub in below(m) {
            if !self.levels.contains_key(&sub) {
                self.compute(bank, &sub)?;
            }
        }
        Ok(())
    }

    fn candidates(&self, bank: &mut SampleBank<F>, m: &[usize]) -> Result<Vec<Vec<F::Elem>>> {
        match &self.atoms {
            Atoms::Full => {
                let mut out = Vec::new();
                for k in 1..=bank.matrix_size() {
                    if m.iter().any(|x| x % k != 0) {
                        continue;
                    }
                    let part: Vec<usize> = m.iter().map(|x| x / k).collect();
                    for w in necklaces(&part) {
                        out.push(bank.tm_values(&TraceMonomial::new(k as u8, &w))?.to_vec());
                    }
                }
                Ok(out)
            }
            Atoms::Set(v) => v.iter().filter(|(md, _)| md.as_slice() == m).map(|(_, e)| bank.expr_values(e)).collect(),
        }
    }

    fn compute(&mut self, bank: &mut SampleBank<F>, m: &[usize]) -> Result<()> {
        let f = self.field.clone();
        let target = self.targets.get(m).copied();
        let reached = |e: &Echelon<F>| target.is_some_and(|t| e.rank() >= t);
        let mut span = Echelon::new(&f);
        let mut basis = Vec::new();
        'outer: for a in below(m) {
            if a.as_slice() == m {
                continue;
            }
            let b: Vec<usize> = m.iter().zip(&a).map(|(x, y)| x - y).collect();
            let (la, lb) = (&self.levels[&a], &self.levels[&b]);
            for h in &la.indecomposable {
                for v in &lb.basis {
                    let p: Vec<F::Elem> = h.iter().zip(v).map(|(x, y)| f.mul(x, y)).collect();
                    if span.insert(p.clone()) {
                        basis.push(p);
                        if reached(&span) {
                            break 'outer;
                        }
                    }
                }
            }
        }
        let decomposable = self.keep_decomposable.then(|| span.clone());
        let mut indecomposable = Vec::new();
        if !reached(&span) {
            for c in self.candidates(bank, m)? {
                if span.insert(c.clone()) {
                    indecomposable.push(c.clone());
                    basis.push(c);
                    if reached(&span) {
                        break;
                    }
                }
            }
        }
        if basis.len() + SAMPLE_MARGIN > bank.len() {
            return Err(Error::Saturated { samples: bank.len() });
        }
        self.levels.insert(m.to_vec(), Level { basis, indecomposable, decomposable });
        Ok(())
    }
}

/// Nonzero multidegrees `a <= m` componentwise, by total degree then
/// lexicographically; `m` itself comes last.
fn below(m: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &x in m {
        out = out.into_iter().flat_map(|p: Vec<usize>| (0..=x).map(move |i| [p.clone(), vec![i]].concat())).collect();
    }
    out.retain(|a| a.iter().any(|&x| x > 0));
    out.sort_by_key(|a| (a.iter().sum::<usize>(), a.clone()));
    out
}

/// All nonzero multidegrees of total degree at most `bound`.
pub fn multidegrees(d: usize, bound: usize) -> Vec<Vec<usize>> {
    below(&vec![bound; d]).into_iter().filter(|a| a.iter().sum::<usize>() <= bound).collect()
}

/// One word per rotation class, over all words of multidegree `m`.
fn necklaces(m: &[usize]) -> Vec<Word> {
    fn rec(rest: &mut [usize], cur: &mut Vec<u8>, out: &mut BTreeSet<Word>) {
        if rest.iter().all(|&x| x == 0) {
            out.insert(Word::from_letters(cur).min_rotation());
            return;
        }
        for l in 0..rest.len() {
            if rest[l] > 0 {
                rest[l] -= 1;
                cur.push(l as u8 + 1);
                rec(rest, cur, out);
                cur.pop();
                rest[l] += 1;
            }
        }
    }
    let mut out = BTreeSet::new();
    rec(&mut m.to_vec(), &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

/// Runs `job` on a fresh sample bank, doubling the sample count while it
/// reports saturation.
pub fn with_adaptive_samples<F: Field, T>(
    field: &F,
    n: usize,
    d: usize,
    seed: u64,
    start: usize,
    mut job: impl FnMut(&mut SampleBank<F>) -> Result<T>,
) -> Result<(T, usize)> {
    let mut count = start.max(2 * SAMPLE_MARGIN);
    loop {
        let mut bank = SampleBank::new(field, n, d, count, seed);
        match job(&mut bank) {
            Err(Error::Saturated { .. }) if count < MAX_SAMPLES => count = (2 * count).min(MAX_SAMPLES),
            other => return other.map(|t| (t, count)),
        }
    }
}

/// Full and generated ranks at one multidegree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankRow {
    pub m: Vec<usize>,
    pub full: usize,
    pub generated: usize,
}

/// Ranks of `R_m` and of the subalgebra generated by `elements`, for every
/// multidegree up to `bound`, from one seed.
pub fn generation_ranks<F: Field>(
    field: &F,
    n: usize,
    d: usize,
    elements: &[InvariantExpr<F>],
    bound: usize,
    seed: u64,
    start_samples: usize,
) -> Result<(Vec<RankRow>, usize)> {
    let atoms = Atoms::from_elements(elements, d)?;
    let degrees = multidegrees(d, bound);
    with_adaptive_samples(field, n, d, seed, start_samples, |bank| {
        let mut full = GradedSpan::new(field, Atoms::Full).without_decomposable();
        let mut targets = HashMap::new();
        for m in &degrees {
            targets.insert(m.clone(), full.rank(bank, m)?);
        }
        let mut gen = GradedSpan::new(field, atoms.clone()).with_targets(targets.clone());
        degrees
            .iter()
            .map(|m| Ok(RankRow { m: m.clone(), full: targets[m], generated: gen.rank(bank, m)? }))
            .collect()
    })
}

/// Generation check repeated over several seeds.
#[derive(Clone, Debug)]
pub struct GenerationOutcome {
    pub rows: Vec<RankRow>,
    pub samples: Vec<usize>,
    pub seeds: Vec<u64>,
    /// All seeds produced identical rank tables.
    pub consistent: bool,
}

impl GenerationOutcome {
    pub fn failing(&self) -> Vec<&RankRow> {
        self.rows.iter().filter(|r| r.generated < r.full).collect()
    }

    pub fn passed(&self) -> bool {
        self.consistent && self.failing().is_empty()
    }
}

pub fn verify_generation<F: Field>(
    field: &F,
    n: usize,
    d: usize,
    elements: &[InvariantExpr<F>],
    bound: usize,
    seeds: &[u64],
    start_samples: usize,
) -> Result<GenerationOutcome> {
    if seeds.is_empty() {
        return usage("at least one seed is required");
    }
    let mut tables = Vec::new();
    let mut samples = Vec::new();
    for &s in seeds {
        let (rows, count) = generation_ranks(field, n, d, elements, bound, s, start_samples)?;
        tables.push(rows);
        samples.push(count);
    }
    let consistent = tables.windows(2).all(|w| w[0] == w[1]);
    Ok(GenerationOutcome { rows: tables.swap_remove(0), samples, seeds: seeds.to_vec(), consistent })
}

/// Minimality data at one multidegree: the set's elements there are
/// independent modulo decomposables iff `combined == decomposable + count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalityRow {
    pub m: Vec<usize>,
    pub count: usize,
    pub decomposable: usize,
    pub combined: usize,
}

impl MinimalityRow {
    pub fn independent(&self) -> bool {
        self.combined == self.decomposable + self.count
    }
}

pub fn verify_minimality<F: Field>(
    field: &F,
    n: usize,
    d: usize,
    elements: &[InvariantExpr<F>],
    seed: u64,
    start_samples: usize,
) -> Result<Vec<MinimalityRow>> {
    let Atoms::Set(atoms) = Atoms::from_elements(elements, d)? else { unreachable!() };
    let mut by_degree: BTreeMap<(usize, Vec<usize>), Vec<&InvariantExpr<F>>> = BTreeMap::new();
    for (m, e) in &atoms {
        by_degree.entry((m.iter().sum(), m.clone())).or_default().push(e);
    }
    let (rows, _) = with_adaptive_samples(field, n, d, seed, start_samples, |bank| {
        let mut full = GradedSpan::new(field, Atoms::Full);
        let mut rows = Vec::new();
        for ((_, m), es) in &by_degree {
            let mut span = full.decomposable_span(bank, m)?.clone();
            let decomposable = span.rank();
            for e in es {
                span.insert(bank.expr_values(e)?);
            }
            if span.rank() + SAMPLE_MARGIN > bank.len() {
                return Err(Error::Saturated { samples: bank.len() });
            }
            rows.push(MinimalityRow { m: m.clone(), count: es.len(), decomposable, combined: span.rank() });
        }
        Ok(rows)
    })?;
    Ok(rows)
}

/// Whether `e` lies in the square of the augmentation ideal, checked on each
/// multihomogeneous component.
pub fn is_decomposable<F: Field>(field: &F, n: usize, d: usize, e: &InvariantExpr<F>, seed: u64, start_samples: usize) -> Result<bool> {
    let mut parts: BTreeMap<Vec<usize>, InvariantExpr<F>> = BTreeMap::new();
    for (m, c) in e.terms() {
        let part = InvariantExpr::monomial(field, m.clone()).scale(c);
        let md = part.mdeg(d).expect("single term");
        let slot = parts.entry(md).or_insert_with(|| InvariantExpr::zero(field));
        *slot = slot.add(&part);
    }
    if parts.keys().any(|m| m.iter().all(|&x| x == 0)) {
        return usage("expression has a constant term");
    }
    let (ok, _) = with_adaptive_samples(field, n, d, seed, start_samples, |bank| {
        let mut full = GradedSpan::new(field, Atoms::Full);
        for (m, part) in &parts {
            let v = bank.expr_values(part)?;
            if !full.decomposable_span(bank, m)?.contains(&v) {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(ok)
}

/// `sigma_2(UV) - tr(U^2 V^2)` is decomposable.
pub fn check_sigma2_identity<F: Field>(field: &F, u: &Word, v: &Word, seed: u64) -> Result<bool> {
    let d = u.max_letter().max(v.max_letter()) as usize;
    let lhs = InvariantExpr::sigma(field, 2, &u.concat(v));
    let rhs = InvariantExpr::tr(field, &u.concat(u).concat(v).concat(v));
    is_decomposable(field, 3, d, &lhs.sub(&rhs), seed, 64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ExtField, PrimeField};
    use crate::invariant::{build_generators, g1, g2};

    fn tr(f: &PrimeField, s: &str) -> InvariantExpr<PrimeField> {
        InvariantExpr::tr_text(f, s).unwrap()
    }

    #[test]
    fn helpers() {
        assert_eq!(below(&[1, 1]), vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(multidegrees(3, 2).len(), 9);
        assert_eq!(necklaces(&[2, 2]).len(), 2);
        assert_eq!(necklaces(&[1, 1, 1]).len(), 2);
    }

    #[test]
    fn one_matrix_invariants_are_polynomial_in_sigmas() {
        // R for one 3x3 matrix is free on sigma_1..sigma_3: dims 1,1,2,2,3,...
        let f = PrimeField::surrogate();
        let mut bank = SampleBank::new(&f, 3, 1, 64, 1);
        let mut full = GradedSpan::new(&f, Atoms::Full);
        let dims: Vec<usize> = (1..=6).map(|k| full.rank(&mut bank, &[k]).unwrap()).collect();
        assert_eq!(dims, vec![1, 2, 3, 4, 5, 7]);
        assert_eq!(full.indecomposable_count(&mut bank, &[3]).unwrap(), 1);
        assert_eq!(full.indecomposable_count(&mut bank, &[4]).unwrap(), 0);
    }

    #[test]
    fn sigma2_identity_and_control() {
        let f = PrimeField::surrogate();
        let u = Word::parse("x1").unwrap();
        let v = Word::parse("x2").unwrap();
        assert!(check_sigma2_identity(&f, &u, &v, 5).unwrap());
        let e = InvariantExpr::sigma(&f, 2, &u.concat(&v)).plus(-2, &tr(&f, "x1^2 x2^2"));
        assert!(!is_decomposable(&f, 3, 2, &e, 5, 64).unwrap());
        assert!(check_sigma2_identity(&f, &Word::parse("x1 x2").unwrap(), &Word::parse("x3").unwrap(), 6).unwrap());
    }

    #[test]
    fn decomposability_examples() {
        let f = PrimeField::surrogate();
        let prod = tr(&f, "x1").mul(&tr(&f, "x2"));
        assert!(is_decomposable(&f, 3, 2, &prod, 1, 64).unwrap());
        assert!(!is_decomposable(&f, 3, 3, &tr(&f, "x1^2 x2^2 x1 x3"), 1, 64).unwrap());
        assert!(is_decomposable(&f, 3, 1, &tr(&f, "x1^4"), 1, 64).unwrap());
        assert!(!is_decomposable(&f, 3, 1, &tr(&f, "x1^3"), 1, 64).unwrap());
    }

    #[test]
    fn two_matrices_generated_by_eleven() {
        // the d = 2 part of the generating set, up to degree 6
        let f = PrimeField::surrogate();
        let g = build_generators(&f);
        let two: Vec<_> = g.restricted_to(&[1, 2]).into_iter().cloned().collect();
        assert_eq!(two.len(), 11);
        let out = verify_generation(&f, 3, 2, &two, 6, &[1, 2], 64).unwrap();
        assert!(out.passed(), "{:?}", out.failing());
        let rows = verify_minimality(&f, 3, 2, &two, 3, 64).unwrap();
        assert!(rows.iter().all(MinimalityRow::independent));
        // dropping tr(X1^2 X2^2 X1 X2) breaks generation in degree (3,3)
        let fewer: Vec<_> = two.iter().filter(|e| e.degree() != Some(6)).cloned().collect();
        let out = verify_generation(&f, 3, 2, &fewer, 6, &[1], 64).unwrap();
        assert_eq!(out.failing().iter().map(|r| r.m.clone()).collect::<Vec<_>>(), vec![vec![3, 3]]);
    }

    #[test]
    fn three_letter_degree_six_generators_needed() {
        let f = ExtField::new(2, 16).unwrap();
        let g1 = g1(&f);
        let out = verify_generation(&f, 3, 3, &g1.elements, 6, &[9], 64).unwrap();
        assert!(out.failing().iter().any(|r| r.m == vec![2, 2, 2]));
        let all = g1.union(&g2(&f), "Gi");
        assert!(verify_generation(&f, 3, 3, &all.elements, 6, &[9], 64).unwrap().passed());
    }
}
