//! Square matrices over a field or over polynomials, generic matrices and
//! characteristic-polynomial coefficients.
//!
//! `sigma` sums principal minors. Power-sum (Newton) formulas divide by `k`
//! and are wrong in characteristics 2 and 3, so they are never used.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{usage, Error, Result};
use crate::field::{Field, Ring};
use crate::poly::{MultiPoly, Var};

/// Polynomial ring over `F` in the shared variable universe.
#[derive(Clone, Debug)]
pub struct PolyRing<F: Field>(pub F);

impl<F: Field> Ring for PolyRing<F> {
    type Elem = MultiPoly<F>;
    fn zero(&self) -> MultiPoly<F> {
        MultiPoly::zero(&self.0)
    }
    fn one(&self) -> MultiPoly<F> {
        MultiPoly::one(&self.0)
    }
    fn from_i64(&self, v: i64) -> MultiPoly<F> {
        MultiPoly::from_i64(&self.0, v)
    }
    fn add(&self, a: &MultiPoly<F>, b: &MultiPoly<F>) -> MultiPoly<F> {
        a + b
    }
    fn sub(&self, a: &MultiPoly<F>, b: &MultiPoly<F>) -> MultiPoly<F> {
        a - b
    }
    fn neg(&self, a: &MultiPoly<F>) -> MultiPoly<F> {
        -a
    }
    fn mul(&self, a: &MultiPoly<F>, b: &MultiPoly<F>) -> MultiPoly<F> {
        a * b
    }
    fn is_zero(&self, a: &MultiPoly<F>) -> bool {
        a.is_zero()
    }
}

/// Row-major `n x n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

pub type NumericMatrix<F> = Matrix<<F as Ring>::Elem>;
pub type MatrixPoly<F> = Matrix<MultiPoly<F>>;

impl<T: Clone> Matrix<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return usage("matrix rows must form a square");
        }
        Ok(Matrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// 0-based entry access.
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { n: self.n, data: self.data.iter().map(f).collect() }
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }
}

impl<T: Clone> Matrix<T> {
    pub fn zero<R: Ring<Elem = T>>(ring: &R, n: usize) -> Self {
        Self::from_fn(n, |_, _| ring.zero())
    }

    pub fn identity<R: Ring<Elem = T>>(ring: &R, n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    /// Matrix with integer entries.
    pub fn from_ints<R: Ring<Elem = T>>(ring: &R, rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| ring.from_i64(x)).collect()).collect())
    }

    pub fn is_zero<R: Ring<Elem = T>>(&self, ring: &R) -> bool {
        self.data.iter().all(|x| ring.is_zero(x))
    }

    pub fn add<R: Ring<Elem = T>>(&self, ring: &R, other: &Self) -> Self {
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| ring.add(a, b)).collect() }
    }

    pub fn sub<R: Ring<Elem = T>>(&self, ring: &R, other: &Self) -> Self {
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| ring.sub(a, b)).collect() }
    }

    pub fn scale<R: Ring<Elem = T>>(&self, ring: &R, c: &T) -> Self {
        self.map(|x| ring.mul(c, x))
    }

    pub fn mul<R: Ring<Elem = T>>(&self, ring: &R, other: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| {
            let mut acc = ring.zero();
            for k in 0..n {
                let (a, b) = (self.get(i, k), other.get(k, j));
                if ring.is_zero(a) || ring.is_zero(b) {
                    continue;
                }
                acc = ring.add(&acc, &ring.mul(a, b));
            }
            acc
        })
    }

    pub fn pow<R: Ring<Elem = T>>(&self, ring: &R, e: u32) -> Self {
        let mut acc = Self::identity(ring, self.n);
        for _ in 0..e {
            acc = acc.mul(ring, self);
        }
        acc
    }

    pub fn trace<R: Ring<Elem = T>>(&self, ring: &R) -> T {
        (0..self.n).fold(ring.zero(), |acc, i| ring.add(&acc, self.get(i, i)))
    }

    /// Determinant by cofactor expansion along the first row; division free.
    pub fn det<R: Ring<Elem = T>>(&self, ring: &R) -> T {
        match self.n {
            0 => ring.one(),
            1 => self.get(0, 0).clone(),
            2 => ring.sub(&ring.mul(self.get(0, 0), self.get(1, 1)), &ring.mul(self.get(0, 1), self.get(1, 0))),
            n => {
                let mut acc = ring.zero();
                for j in 0..n {
                    let a = self.get(0, j);
                    if ring.is_zero(a) {
                        continue;
                    }
                    let minor = self.minor(0, j).det(ring);
                    let term = ring.mul(a, &minor);
                    acc = if j % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
                }
                acc
            }
        }
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let rows: Vec<usize> = (0..self.n).filter(|&i| i != row).collect();
        let cols: Vec<usize> = (0..self.n).filter(|&j| j != col).collect();
        self.submatrix(&rows, &cols)
    }

    /// Classical adjoint, so that `M * adj(M) = det(M) E`.
    pub fn adjugate<R: Ring<Elem = T>>(&self, ring: &R) -> Self {
        let n = self.n;
        if n == 1 {
            return Self::identity(ring, 1);
        }
        Self::from_fn(n, |i, j| {
            let c = self.minor(j, i).det(ring);
            if (i + j) % 2 == 0 {
                c
            } else {
                ring.neg(&c)
            }
        })
    }

    /// `k`-th characteristic coefficient: the sum of all `k x k` principal
    /// minors.
    pub fn sigma<R: Ring<Elem = T>>(&self, ring: &R, k: usize) -> Result<T> {
        if k == 0 || k > self.n {
            return usage(format!("sigma index {k} outside 1..={}", self.n));
        }
        let mut acc = ring.zero();
        for subset in index_subsets(self.n, k) {
            let m = self.submatrix(&subset, &subset);
            acc = ring.add(&acc, &m.det(ring));
        }
        Ok(acc)
    }

    /// `M^n - s1 M^(n-1) + s2 M^(n-2) - ... + (-1)^n s_n E`.
    pub fn cayley_hamilton_residual<R: Ring<Elem = T>>(&self, ring: &R) -> Result<Self> {
        let n = self.n;
        let mut acc = self.pow(ring, n as u32);
        let mut power = Self::identity(ring, n);
        let mut powers = vec![power.clone()];
        for _ in 1..n {
            power = power.mul(ring, self);
            powers.push(power.clone());
        }
        for k in 1..=n {
            let s = self.sigma(ring, k)?;
            let term = powers[n - k].scale(ring, &s);
            acc = if k % 2 == 1 { acc.sub(ring, &term) } else { acc.add(ring, &term) };
        }
        Ok(acc)
    }
}

fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Generic matrix `X_r`: entry `(i, j)` is the variable `x_ij(r)`.
pub fn generic<F: Field>(field: &F, r: usize, n: usize, d: usize) -> Result<MatrixPoly<F>> {
    if r == 0 || r > d || d > crate::poly::MAX_TUPLE {
        return usage(format!("generic matrix index {r} outside 1..={d}"));
    }
    if !(3..=4).contains(&n) {
        return usage(format!("matrix size {n} not supported (3 or 4)"));
    }
    Ok(Matrix::from_fn(n, |i, j| MultiPoly::var(field, Var::entry(r, i + 1, j + 1))))
}

/// Ordered product of the matrices assigned to the letters of `letters`
/// (1-based letter indices into `assignment`).
pub fn word_product<R: Ring>(ring: &R, letters: &[u8], assignment: &[Matrix<R::Elem>]) -> Result<Matrix<R::Elem>> {
    let first = letters.first().ok_or_else(|| Error::Usage("empty word".into()))?;
    let pick = |l: u8| {
        assignment
            .get((l as usize).wrapping_sub(1))
            .ok_or_else(|| Error::Usage(format!("letter x{l} has no assigned matrix")))
    };
    let mut acc = pick(*first)?.clone();
    for &l in &letters[1..] {
        let m = pick(l)?;
        if m.size() != acc.size() {
            return usage("matrix sizes differ");
        }
        acc = acc.mul(ring, m);
    }
    Ok(acc)
}

/// Jordan blocks `J1 = e12` and `J2 = e12 + e23`.
pub fn j1<R: Ring>(ring: &R) -> Matrix<R::Elem> {
    Matrix::from_fn(3, |i, j| if (i, j) == (0, 1) { ring.one() } else { ring.zero() })
}

pub fn j2<R: Ring>(ring: &R) -> Matrix<R::Elem> {
    Matrix::from_fn(3, |i, j| if j == i + 1 { ring.one() } else { ring.zero() })
}

/// Inverse over a field via adjugate and determinant.
pub fn inverse<F: Field>(field: &F, g: &NumericMatrix<F>) -> Result<NumericMatrix<F>> {
    let d = g.det(field);
    let inv = field.inv(&d).ok_or(Error::Singular)?;
    Ok(g.adjugate(field).scale(field, &inv))
}

/// `g M g^-1`.
pub fn conjugate<F: Field>(field: &F, g: &NumericMatrix<F>, m: &NumericMatrix<F>) -> Result<NumericMatrix<F>> {
    Ok(g.mul(field, m).mul(field, &inverse(field, g)?))
}

pub fn random_matrix<F: Field, G: Rng + ?Sized>(field: &F, n: usize, rng: &mut G) -> NumericMatrix<F> {
    Matrix::from_fn(n, |_, _| field.random(rng))
}

/// Uniform invertible matrix, by rejection.
pub fn random_invertible<F: Field, G: Rng + ?Sized>(field: &F, n: usize, rng: &mut G) -> NumericMatrix<F> {
    loop {
        let g = random_matrix(field, n, rng);
        if !Ring::is_zero(field, &g.det(field)) {
            return g;
        }
    }
}

/// Random strictly upper triangular matrix.
pub fn random_strict_upper<F: Field, G: Rng + ?Sized>(field: &F, n: usize, rng: &mut G) -> NumericMatrix<F> {
    Matrix::from_fn(n, |i, j| if j > i { field.random(rng) } else { Ring::zero(field) })
}

/// Evaluates a polynomial matrix at a point.
pub fn eval_matrix<F: Field>(m: &MatrixPoly<F>, point: &HashMap<Var, F::Elem>) -> Result<NumericMatrix<F>> {
    let data = m.entries().iter().map(|p| p.eval_map(point)).collect::<Result<Vec<_>>>()?;
    Ok(Matrix { n: m.size(), data })
}

impl<F: Field> Matrix<MultiPoly<F>> {
    /// Multiplies every entry by `c` without going through a ring value.
    pub fn scale_poly(&self, c: &MultiPoly<F>) -> Self {
        self.map(|x| x * c)
    }
}
