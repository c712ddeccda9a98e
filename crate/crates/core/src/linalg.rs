//! Exact linear algebra: rank and an incremental row-echelon basis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::field::Field;

/// Rank of a row-major matrix over `field`. Dispatches to the field's
/// preferred elimination (fraction-free over the rationals).
pub fn exact_rank<F: Field>(field: &F, rows: &[Vec<F::Elem>]) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    field.rank(rows.to_vec())
}

pub fn transpose<T: Clone>(rows: &[Vec<T>]) -> Vec<Vec<T>> {
    if rows.is_empty() {
        return Vec::new();
    }
    (0..rows[0].len()).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Ordinary Gaussian elimination.
pub fn gauss_rank<F: Field>(field: &F, mut rows: Vec<Vec<F::Elem>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !field.is_zero(&rows[r][col])) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = field.inv(&rows[rank][col]).expect("nonzero pivot");
        let pivot: Vec<F::Elem> = rows[rank].iter().map(|x| field.mul(x, &inv)).collect();
        for r in rank + 1..rows.len() {
            if field.is_zero(&rows[r][col]) {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in col..ncols {
                let t = field.mul(&factor, &pivot[c]);
                rows[r][c] = field.sub(&rows[r][c], &t);
            }
        }
        rows[rank] = pivot;
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Fraction-free (Bareiss) elimination over the integers after clearing the
/// denominators of each row.
pub fn bareiss_rank(rows: Vec<Vec<BigRational>>) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            for c in col + 1..ncols {
                let v = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                m[r][c] = v / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Row-echelon basis grown one vector at a time. Stored rows are normalized
/// so their pivot entry is one.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    rows: Vec<(usize, Vec<F::Elem>)>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: &F) -> Self {
        Echelon { field: field.clone(), rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, mut v: Vec<F::Elem>) -> Vec<F::Elem> {
        let f = &self.field;
        for (piv, row) in &self.rows {
            if f.is_zero(&v[*piv]) {
                continue;
            }
            let factor = v[*piv].clone();
            for c in *piv..v.len() {
                if !f.is_zero(&row[c]) {
                    let t = f.mul(&factor, &row[c]);
                    v[c] = f.sub(&v[c], &t);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        let r = self.reduce(v.to_vec());
        r.iter().all(|x| self.field.is_zero(x))
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: Vec<F::Elem>) -> bool {
        let r = self.reduce(v);
        let Some(piv) = r.iter().position(|x| !self.field.is_zero(x)) else {
            return false;
        };
        let inv = self.field.inv(&r[piv]).expect("nonzero pivot");
        let row: Vec<F::Elem> = r.iter().map(|x| self.field.mul(x, &inv)).collect();
        let at = self.rows.partition_point(|(p, _)| *p < piv);
        self.rows.insert(at, (piv, row));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals, Ring};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ints<F: Field>(f: &F, rows: &[&[i64]]) -> Vec<Vec<F::Elem>> {
        rows.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect()
    }

    #[test]
    fn small_ranks() {
        let q = Rationals;
        assert_eq!(exact_rank(&q, &ints(&q, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])), 3);
        assert_eq!(exact_rank(&q, &ints(&q, &[&[1, -2, 5], &[2, -4, 10]])), 1);
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(exact_rank(&f3, &ints(&f3, &[&[1, 2], &[2, 1]])), 1);
        assert_eq!(exact_rank(&q, &ints(&q, &[&[1, 2], &[2, 1]])), 2);
        assert_eq!(exact_rank::<Rationals>(&q, &[]), 0);
    }

    #[test]
    fn bareiss_handles_fractions() {
        let half = BigRational::new(1.into(), 2.into());
        let rows = vec![vec![half.clone(), BigRational::one()], vec![BigRational::one(), BigRational::from_integer(2.into())]];
        assert_eq!(bareiss_rank(rows), 1);
    }

    #[test]
    fn echelon_tracks_span() {
        let f = PrimeField::new(7).unwrap();
        let mut e = Echelon::new(&f);
        assert!(e.insert(vec![1, 2, 3]));
        assert!(e.insert(vec![0, 1, 1]));
        assert!(!e.insert(vec![2, 5, 0]));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&[1, 3, 4]));
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(seed in any::<u64>(), r in 1usize..6, c in 1usize..6, low in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = PrimeField::new(5).unwrap();
            let q = Rationals;
            let mut m: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-3..=3)).collect()).collect();
            if low && r > 1 {
                let k = rng.gen_range(-2..=2);
                m[r - 1] = m[0].iter().map(|x| x * k).collect();
            }
            let mf: Vec<Vec<u64>> = m.iter().map(|row| row.iter().map(|&x| f.from_i64(x)).collect()).collect();
            prop_assert_eq!(exact_rank(&f, &mf), exact_rank(&f, &transpose(&mf)));
            let mq: Vec<Vec<BigRational>> = m.iter().map(|row| row.iter().map(|&x| q.from_i64(x)).collect()).collect();
            prop_assert_eq!(exact_rank(&q, &mq), exact_rank(&q, &transpose(&mq)));
            prop_assert_eq!(exact_rank(&q, &mq), gauss_rank(&q, mq.clone()));
            let mut e = Echelon::new(&f);
            for row in &mf {
                e.insert(row.clone());
            }
            prop_assert_eq!(e.rank(), exact_rank(&f, &mf));
        }
    }
}
