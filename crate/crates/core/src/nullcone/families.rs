//! Witness families: every rank-two nilpotent `B` with
//! `tr(J2 B) = tr(J2^2 B^2) = 0` is strictly upper triangular (family 1) or
//! `T J2 T^-1` with `T` of one of two shapes (families 2 and 3).

use crate::error::{usage, Result};
use crate::field::{Field, Ring};
use crate::matrix::{conjugate, j2, Matrix, MatrixPoly, NumericMatrix, PolyRing};
use crate::poly::{MultiPoly, Param, Var};

/// Number of free parameters of a family.
pub fn family_arity(family: u8) -> usize {
    if family == 1 {
        3
    } else {
        5
    }
}

/// `0 t1 t2 / 0 0 t3 / 0 0 0`.
pub fn upper_matrix<R: Ring>(ring: &R, t: &dyn Fn(usize) -> R::Elem) -> Matrix<R::Elem> {
    Matrix::from_fn(3, |i, j| match (i, j) {
        (0, 1) => t(1),
        (0, 2) => t(2),
        (1, 2) => t(3),
        _ => ring.zero(),
    })
}

/// `T` for families 2 and 3:
/// `t3t4 t1 t2 / t3 t4 t5 / 0 1 0` and `t1 t2 t3t4 / t3 0 t4 / 1 0 0`.
pub fn t_matrix<R: Ring>(ring: &R, family: u8, t: &dyn Fn(usize) -> R::Elem) -> Result<Matrix<R::Elem>> {
    let t34 = ring.mul(&t(3), &t(4));
    let rows = match family {
        2 => vec![vec![t34, t(1), t(2)], vec![t(3), t(4), t(5)], vec![ring.zero(), ring.one(), ring.zero()]],
        3 => vec![vec![t(1), t(2), t34], vec![t(3), ring.zero(), t(4)], vec![ring.one(), ring.zero(), ring.zero()]],
        _ => return usage(format!("family {family} has no conjugating matrix")),
    };
    Matrix::from_rows(rows)
}

/// A family member over polynomials: `scaled = det(T) B`.
#[derive(Clone, Debug)]
pub struct SymbolicWitness<F: Field> {
    pub family: u8,
    pub scaled: MatrixPoly<F>,
    pub det: MultiPoly<F>,
    /// Factors of `det`, each nonzero on the family.
    pub det_factors: Vec<MultiPoly<F>>,
}

/// Family member with parameters named by `name` (`Param::B`, `Param::C`
/// or `Param::T`).
pub fn symbolic_witness<F: Field>(field: &F, family: u8, name: fn(u8) -> Param) -> Result<SymbolicWitness<F>> {
    let ring = PolyRing(field.clone());
    let t = |i: usize| MultiPoly::var(field, Var::param(name(i as u8)));
    if family == 1 {
        return Ok(SymbolicWitness {
            family,
            scaled: upper_matrix(&ring, &t),
            det: MultiPoly::one(field),
            det_factors: Vec::new(),
        });
    }
    let tm = t_matrix(&ring, family, &t)?;
    let scaled = tm.mul(&ring, &j2(&ring)).mul(&ring, &tm.adjugate(&ring));
    let det_factors = match family {
        2 => vec![t(3), &t(2) - &(&t(4) * &t(5))],
        _ => vec![t(2), t(4)],
    };
    Ok(SymbolicWitness { family, scaled, det: tm.det(&ring), det_factors })
}

/// Family member at numeric parameters `t[0..]` (1-based names `t1..`).
pub fn numeric_witness<F: Field>(field: &F, family: u8, t: &[F::Elem]) -> Result<NumericMatrix<F>> {
    if t.len() < family_arity(family) {
        return usage("too few family parameters");
    }
    let get = |i: usize| t[i - 1].clone();
    match family {
        1 => Ok(upper_matrix(field, &get)),
        2 | 3 => conjugate(field, &t_matrix(field, family, &get)?, &j2(field)),
        _ => usage(format!("unknown family {family}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn det_factorizations() {
        let f = PrimeField::surrogate();
        for family in [2, 3] {
            let w = symbolic_witness(&f, family, Param::T).unwrap();
            let prod = w.det_factors.iter().fold(MultiPoly::one(&f), |a, b| &a * b);
            assert!(w.det == prod || w.det == -&prod, "family {family}: {}", w.det);
        }
    }
}
