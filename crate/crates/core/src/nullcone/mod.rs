//! Nullcone of the case `n = 3`: nilpotent classification, the identities
//! behind the case analysis, and numeric checks.

pub mod families;
pub mod script;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{usage, Error, Result};
use crate::field::{Field, Ring};
use crate::invariant::{build_generators, build_hsop, build_hsop_unchecked, GeneratorSet, HsopTarget, InvariantExpr, ParamSet};
use crate::matrix::{
    conjugate, generic, inverse, j1, j2, random_invertible, random_matrix, random_strict_upper, Matrix, MatrixPoly,
    NumericMatrix, PolyRing,
};
use crate::poly::{MultiPoly, Param, Var};
use crate::report::{derive_seed, ReportItem, Status, VerificationReport};
use crate::word::Word;

use families::{numeric_witness, symbolic_witness};
use script::{complete, replay, CaseScript, ParamMode, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NilpotentClass {
    Zero,
    RankOneJ1,
    RankTwoJ2,
    NotNilpotent,
}

fn check_3x3<T: Clone>(a: &Matrix<T>) -> Result<()> {
    if a.size() != 3 {
        return usage(format!("expected a 3x3 matrix, got {0}x{0}", a.size()));
    }
    Ok(())
}

pub fn classify_nilpotent<F: Field>(field: &F, a: &NumericMatrix<F>) -> Result<NilpotentClass> {
    check_3x3(a)?;
    for k in 1..=3 {
        if !field.is_zero(&a.sigma(field, k)?) {
            return Ok(NilpotentClass::NotNilpotent);
        }
    }
    Ok(if a.is_zero(field) {
        NilpotentClass::Zero
    } else if a.mul(field, a).is_zero(field) {
        NilpotentClass::RankOneJ1
    } else {
        NilpotentClass::RankTwoJ2
    })
}

fn from_columns<F: Field>(cols: &[Vec<F::Elem>; 3]) -> NumericMatrix<F> {
    Matrix::from_fn(3, |i, j| cols[j][i].clone())
}

fn apply<F: Field>(field: &F, a: &NumericMatrix<F>, v: &[F::Elem]) -> Vec<F::Elem> {
    (0..3)
        .map(|i| (0..3).fold(field.zero(), |acc, j| field.add(&acc, &field.mul(a.get(i, j), &v[j]))))
        .collect()
}

fn unit_vector<F: Field>(field: &F, i: usize) -> Vec<F::Elem> {
    (0..3).map(|j| if i == j { field.one() } else { field.zero() }).collect()
}

/// `(T, J)` with `A = T J T^-1` and `J` one of `J1`, `J2`.
pub fn conjugate_to_jordan<F: Field>(field: &F, a: &NumericMatrix<F>) -> Result<(NumericMatrix<F>, NumericMatrix<F>)> {
    let class = classify_nilpotent(field, a)?;
    let nonzero = |v: &[F::Elem]| v.iter().any(|x| !field.is_zero(x));
    let (t, j) = match class {
        NilpotentClass::RankTwoJ2 => {
            let a2 = a.mul(field, a);
            let v = (0..3)
                .map(|i| unit_vector(field, i))
                .find(|v| nonzero(&apply(field, &a2, v)))
                .ok_or_else(|| Error::Internal("A^2 vanishes on the standard basis".into()))?;
            let av = apply(field, a, &v);
            (from_columns::<F>(&[apply(field, a, &av), av, v]), j2(field))
        }
        NilpotentClass::RankOneJ1 => {
            let v = (0..3)
                .map(|i| unit_vector(field, i))
                .find(|v| nonzero(&apply(field, a, v)))
                .ok_or_else(|| Error::Internal("A vanishes on the standard basis".into()))?;
            let av = apply(field, a, &v);
            // Kernel of a rank-one matrix: orthogonal complement of a nonzero row.
            let (r, p) = (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .find(|&(i, j)| !field.is_zero(a.get(i, j)))
                .expect("nonzero matrix");
            let row: Vec<F::Elem> = (0..3).map(|j| a.get(r, j).clone()).collect();
            let mut found = None;
            for q in (0..3).filter(|&q| q != p) {
                let mut w = unit_vector(field, q);
                w[p] = field.neg(&field.div(&row[q], &row[p]).expect("pivot is nonzero"));
                let t = from_columns::<F>(&[av.clone(), v.clone(), w]);
                if !field.is_zero(&t.det(field)) {
                    found = Some(t);
                    break;
                }
            }
            (found.ok_or_else(|| Error::Internal("no kernel complement found".into()))?, j1(field))
        }
        other => return usage(format!("matrix is {other:?}, not a nonzero nilpotent")),
    };
    if conjugate(field, &t, &j)? != *a {
        return Err(Error::Internal("Jordan conjugation does not round-trip".into()));
    }
    Ok((t, j))
}

/// `L = a b c / 0 a b / 0 0 a`.
pub fn toeplitz_l<R: Ring>(ring: &R, a: &R::Elem, b: &R::Elem, c: &R::Elem) -> Matrix<R::Elem> {
    Matrix::from_fn(3, |i, j| match j as isize - i as isize {
        0 => a.clone(),
        1 => b.clone(),
        2 => c.clone(),
        _ => ring.zero(),
    })
}

fn entry_poly<F: Field>(field: &F, m: &MatrixPoly<F>, i: usize, j: usize) -> String {
    let _ = field;
    m.get(i, j).to_string()
}

/// `J1 B J1 = tr(J1 B) J1` for generic `B`, and `A B A = tr(A B) A` for
/// random conjugates `A` of `J1`.
pub fn verify_rank1_identity<F: Field>(field: &F, trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("rank1-identity", &field.spec());
    report.seed = seed;
    report.trials = trials as u64;
    let ring = PolyRing(field.clone());
    let b = generic(field, 1, 3, 1)?;
    let pj = j1(&ring);
    let residual = pj.mul(&ring, &b).mul(&ring, &pj).sub(&ring, &pj.scale_poly(&pj.mul(&ring, &b).trace(&ring)));
    report.push(
        ReportItem::new("symbolic", Status::from_bool(residual.is_zero(&ring)))
            .with("residual", residual.entries().iter().map(|p| p.to_string()).collect::<Vec<_>>()),
    );
    let s = derive_seed(seed, "rank1-identity");
    report.seeds.push(s);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let mut bad = None;
    for t in 0..trials {
        let g = random_invertible(field, 3, &mut rng);
        let a = conjugate(field, &g, &j1(field))?;
        let bm = random_matrix(field, 3, &mut rng);
        let lhs = a.mul(field, &bm).mul(field, &a);
        let rhs = a.scale(field, &a.mul(field, &bm).trace(field));
        if lhs != rhs {
            bad = Some(t);
            break;
        }
    }
    report.push(ReportItem::new("conjugated", Status::from_bool(bad.is_none())).with("trials", trials).with("first_failure", bad));
    Ok(report)
}

/// Rank-two lemma: `A = J2`, nilpotent `B`, `tr(AB) = tr(A^2 B) =
/// tr(A^2 B^2) = 0` force `B` strictly upper triangular and `tr(A B^2) = 0`.
pub fn verify_teranishi<F: Field>(field: &F) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("teranishi", &field.spec());
    let ring = PolyRing(field.clone());
    let a = j2(&ring);
    let a2 = a.mul(&ring, &a);
    let mut b = generic(field, 1, 3, 1)?;
    let x = |i: usize, j: usize| Var::entry(1, i, j);
    let xp = |i: usize, j: usize| MultiPoly::var(field, x(i, j));
    let zero = MultiPoly::zero(field);
    let sub = |b: &MatrixPoly<F>, v: Var, val: &MultiPoly<F>| b.map(|p| p.substitute(v, val));

    // tr(A^2 B) = b31.
    let t1 = a2.mul(&ring, &b).trace(&ring);
    let ok1 = t1 == xp(3, 1);
    report.push(ReportItem::new("tr(A^2B)=b31", Status::from_bool(ok1)).with("residual", t1.to_string()));
    b = sub(&b, x(3, 1), &zero);

    // tr(AB) = b21 + b32; with b21 = -b32, tr(A^2 B^2) = -b32^2.
    let t2 = a.mul(&ring, &b).trace(&ring);
    let ok2 = t2 == &xp(2, 1) + &xp(3, 2);
    let minus = -&xp(3, 2);
    let b_sub = sub(&b, x(2, 1), &minus);
    let t3 = a2.mul(&ring, &b_sub).mul(&ring, &b_sub).trace(&ring);
    let (rest, e) = t3.strip_factor(&xp(3, 2));
    let ok3 = e == 2 && rest.is_constant() && !rest.is_zero();
    report.push(ReportItem::new("tr(AB)=b21+b32", Status::from_bool(ok2)).with("residual", t2.to_string()));
    report.push(ReportItem::new("tr(A^2B^2)=-b32^2", Status::from_bool(ok3)).with("residual", t3.to_string()));
    b = sub(&sub(&b, x(2, 1), &zero), x(3, 2), &zero);

    // B is now upper triangular: sigma_k(B) = e_k(b11, b22, b33), whose
    // vanishing makes the diagonal the roots of t^3.
    let (d1, d2, d3) = (xp(1, 1), xp(2, 2), xp(3, 3));
    let e = [&(&d1 + &d2) + &d3, &(&(&d1 * &d2) + &(&d1 * &d3)) + &(&d2 * &d3), &(&d1 * &d2) * &d3];
    let mut ok4 = true;
    for k in 1..=3 {
        ok4 &= b.sigma(&ring, k)? == e[k - 1];
    }
    report.push(ReportItem::new("sigma_k(B)=e_k(diag)", Status::from_bool(ok4)));
    for i in 1..=3 {
        b = sub(&b, x(i, i), &zero);
    }
    let upper = (0..3).all(|i| (0..=i).all(|j| b.get(i, j).is_zero()));
    let t4 = a.mul(&ring, &b).mul(&ring, &b).trace(&ring);
    report.push(
        ReportItem::new("strictly-upper", Status::from_bool(upper))
            .with("b", (0..3).map(|i| (0..3).map(|j| entry_poly(field, &b, i, j)).collect::<Vec<_>>()).collect::<Vec<_>>()),
    );
    report.push(ReportItem::new("tr(AB^2)=0", Status::from_bool(t4.is_zero())).with("residual", t4.to_string()));

    // Control: without tr(A^2 B^2) = 0, B = e21 - e32 is admissible.
    let bc = Matrix::from_fn(3, |i, j| match (i, j) {
        (1, 0) => field.one(),
        (2, 1) => field.from_i64(-1),
        _ => field.zero(),
    });
    let aj = j2(field);
    let aj2 = aj.mul(field, &aj);
    let kept = [aj.mul(field, &bc).trace(field), aj2.mul(field, &bc).trace(field)];
    let nil = (1..=3).all(|k| bc.sigma(field, k).map(|s| field.is_zero(&s)).unwrap_or(false));
    let dropped = aj2.mul(field, &bc).mul(field, &bc).trace(field);
    let control = kept.iter().all(|v| field.is_zero(v)) && nil && !field.is_zero(&dropped) && !field.is_zero(bc.get(1, 0));
    report.push(
        ReportItem::new("control-without-tr(A^2B^2)", Status::from_bool(control))
            .with("b", "e21 - e32")
            .with("tr(A^2B^2)", field.format(&dropped)),
    );
    Ok(report)
}

fn rank_at_most_one<R: Ring>(ring: &R, b: &Matrix<R::Elem>) -> bool {
    let pairs = [(0, 1), (0, 2), (1, 2)];
    pairs.iter().all(|&(r1, r2)| {
        pairs.iter().all(|&(c1, c2)| {
            let m = ring.sub(&ring.mul(b.get(r1, c1), b.get(r2, c2)), &ring.mul(b.get(r1, c2), b.get(r2, c1)));
            ring.is_zero(&m)
        })
    })
}

/// Lemma on rank-one partners of `J1`: nilpotent rank-one `B` with
/// `tr(J1 B) = 0` has `J1 B = 0` or `B J1 = 0`.
pub fn verify_lemma2<F: Field>(field: &F, trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("lemma2-identities", &field.spec());
    report.seed = seed;
    report.trials = trials as u64;
    let ring = PolyRing(field.clone());
    let b = |i: u8| MultiPoly::var(field, Var::param(Param::B(i)));
    let z = MultiPoly::zero(field);
    let pj = j1(&ring);
    // Families with denominators scaled by b1 and b2.
    let fam: [(MatrixPoly<F>, Vec<Var>); 3] = [
        (
            Matrix::from_rows(vec![
                vec![&b(1) * &b(3), &b(2) * &b(3), -&(&b(3) * &b(3))],
                vec![z.clone(), z.clone(), z.clone()],
                vec![&b(1) * &b(1), &b(1) * &b(2), -&(&b(1) * &b(3))],
            ])?,
            vec![],
        ),
        (
            Matrix::from_rows(vec![
                vec![z.clone(), &b(1) * &b(3), &b(1) * &b(2)],
                vec![z.clone(), &b(2) * &b(3), &b(2) * &b(2)],
                vec![z.clone(), -&(&b(3) * &b(3)), -&(&b(2) * &b(3))],
            ])?,
            vec![],
        ),
        (
            Matrix::from_rows(vec![
                vec![z.clone(), b(1), b(2)],
                vec![z.clone(), z.clone(), z.clone()],
                vec![z.clone(), b(3), z.clone()],
            ])?,
            vec![Var::param(Param::B(2)), Var::param(Param::B(3))],
        ),
    ];
    for (idx, (m, alternatives)) in fam.iter().enumerate() {
        // Family 3 is rank one only when b2 = 0 or b3 = 0.
        let variants: Vec<MatrixPoly<F>> = if alternatives.is_empty() {
            vec![m.clone()]
        } else {
            alternatives.iter().map(|&v| m.map(|p| p.substitute(v, &z))).collect()
        };
        let mut ok = true;
        for m in &variants {
            let nil = (1..=3).all(|k| m.sigma(&ring, k).map(|s| s.is_zero()).unwrap_or(false));
            let tr = pj.mul(&ring, m).trace(&ring).is_zero();
            let rank = rank_at_most_one(&ring, m);
            let concl = pj.mul(&ring, m).is_zero(&ring) || m.mul(&ring, &pj).is_zero(&ring);
            ok &= nil && tr && rank && concl;
        }
        report.push(ReportItem::new(format!("family-{}", idx + 1), Status::from_bool(ok)));
    }

    // Randomized: B = u v^T with v.u = 0 and b21 = u2 v1 = 0, per branch of
    // b23 b31 = 0.
    let aj = j1(field);
    for (branch, name) in ["b23=0,b31!=0", "b23!=0,b31=0", "b23=b31=0"].iter().enumerate() {
        let s = derive_seed(seed, &format!("lemma2/{name}"));
        report.seeds.push(s);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut checked = 0usize;
        let mut failure = None;
        for t in 0..trials {
            let r = |rng: &mut ChaCha8Rng| field.random(rng);
            let nz = |rng: &mut ChaCha8Rng| field.random_nonzero(rng);
            let (u, v) = match branch {
                0 => {
                    let (u1, u3, v1, v2) = (r(&mut rng), nz(&mut rng), nz(&mut rng), r(&mut rng));
                    let v3 = field.neg(&field.div(&field.mul(&u1, &v1), &u3).expect("nonzero"));
                    ([u1, field.zero(), u3], [v1, v2, v3])
                }
                1 => {
                    let (u1, u2, u3, v3) = (r(&mut rng), nz(&mut rng), r(&mut rng), nz(&mut rng));
                    let v2 = field.neg(&field.div(&field.mul(&u3, &v3), &u2).expect("nonzero"));
                    ([u1, u2, u3], [field.zero(), v2, v3])
                }
                _ => {
                    let (mut u3, mut v3) = (r(&mut rng), r(&mut rng));
                    if rng.gen_bool(0.5) {
                        u3 = field.zero();
                    } else {
                        v3 = field.zero();
                    }
                    ([nz(&mut rng), field.zero(), u3], [field.zero(), nz(&mut rng), v3])
                }
            };
            let bm = Matrix::from_fn(3, |i, j| field.mul(&u[i], &v[j]));
            let in_branch = match branch {
                0 => field.is_zero(bm.get(1, 2)) && !field.is_zero(bm.get(2, 0)),
                1 => !field.is_zero(bm.get(1, 2)) && field.is_zero(bm.get(2, 0)),
                _ => field.is_zero(bm.get(1, 2)) && field.is_zero(bm.get(2, 0)),
            };
            let hyp = classify_nilpotent(field, &bm)? == NilpotentClass::RankOneJ1
                && field.is_zero(&aj.mul(field, &bm).trace(field))
                && in_branch;
            if !hyp {
                failure = Some(format!("trial {t}: sampler left the hypotheses"));
                break;
            }
            checked += 1;
            if !(aj.mul(field, &bm).is_zero(field) || bm.mul(field, &aj).is_zero(field)) {
                failure = Some(format!("trial {t}: J1 B and B J1 both nonzero"));
                break;
            }
        }
        report.push(
            ReportItem::new(format!("random/{name}"), Status::from_bool(failure.is_none() && checked == trials))
                .with("checked", checked)
                .with("failure", failure),
        );
    }
    // Excluded example: B = J1^T has tr(J1 B) = 1.
    let jt = aj.transpose();
    report.push(
        ReportItem::new("excluded-J1^T", Status::from_bool(field.is_one(&aj.mul(field, &jt).trace(field))))
            .with("tr(J1 B)", 1),
    );
    Ok(report)
}

/// Which witness family `B` belongs to, after recovering `T` with
/// `B = T J2 T^-1` and normalizing its last row by the stabilizer `L`.
pub fn match_family<F: Field>(field: &F, b: &NumericMatrix<F>) -> Result<Option<u8>> {
    let (t, j) = conjugate_to_jordan(field, b)?;
    if j != j2(field) {
        return Ok(None);
    }
    let r: Vec<F::Elem> = (0..3).map(|k| t.get(2, k).clone()).collect();
    let zero = field.zero();
    let l = if !field.is_zero(&r[0]) {
        let a = field.inv(&r[0]).expect("nonzero");
        let bb = field.neg(&field.mul(&a, &field.div(&r[1], &r[0]).expect("nonzero")));
        let c = field.neg(&field.div(&field.add(&field.mul(&bb, &r[1]), &field.mul(&a, &r[2])), &r[0]).expect("nonzero"));
        toeplitz_l(field, &a, &bb, &c)
    } else if !field.is_zero(&r[1]) {
        let a = field.inv(&r[1]).expect("nonzero");
        let bb = field.neg(&field.div(&field.mul(&a, &r[2]), &r[1]).expect("nonzero"));
        toeplitz_l(field, &a, &bb, &zero)
    } else {
        toeplitz_l(field, &field.inv(&r[2]).ok_or(Error::Singular)?, &zero, &zero)
    };
    let tl = t.mul(field, &l);
    if conjugate(field, &tl, &j2(field))? != *b {
        return Err(Error::Internal("stabilizer changed the conjugate".into()));
    }
    let row3: Vec<bool> = (0..3).map(|k| field.is_one(tl.get(2, k))).collect();
    let e = |i, j| tl.get(i, j).clone();
    Ok(match row3.as_slice() {
        [true, false, false] => (field.is_zero(&e(1, 1)) && e(0, 2) == field.mul(&e(1, 0), &e(1, 2))).then_some(3),
        [false, true, false] => (e(0, 0) == field.mul(&e(1, 0), &e(1, 1))).then_some(2),
        _ => (0..3).all(|i| (0..=i).all(|j| field.is_zero(b.get(i, j)))).then_some(1),
    })
}

/// Random `B = T J2 T^-1` with `tr(J2 B) = tr(J2^2 B^2) = 0`, by the branch
/// of `T31 (T21 T32 - T22 T31) = 0`; `None` on a singular draw.
fn sample_lemma1_partner<F: Field>(field: &F, branch: usize, rng: &mut ChaCha8Rng) -> Result<Option<NumericMatrix<F>>> {
    let mut t = random_matrix(field, 3, rng);
    let g = |t: &NumericMatrix<F>, i: usize, j: usize| t.get(i - 1, j - 1).clone();
    let (m, add, sub) = (|a: &F::Elem, b: &F::Elem| field.mul(a, b), |a: &F::Elem, b: &F::Elem| field.add(a, b), |a: &F::Elem, b: &F::Elem| field.sub(a, b));
    match branch {
        0 => {
            let t31 = field.random_nonzero(rng);
            t.set(2, 0, t31.clone());
            t.set(1, 1, field.div(&m(&g(&t, 2, 1), &g(&t, 3, 2)), &t31).expect("nonzero"));
            // tr(J2 T J2 adj T) is linear in t13 with coefficient -t31^2.
            let rest = {
                let (t11, t12, t21, t22, t23, t32, t33) =
                    (g(&t, 1, 1), g(&t, 1, 2), g(&t, 2, 1), g(&t, 2, 2), g(&t, 2, 3), g(&t, 3, 2), g(&t, 3, 3));
                let mut acc = sub(&m(&m(&t11, &t31), &t33), &m(&m(&t11, &t32), &t32));
                acc = add(&acc, &m(&m(&t12, &t31), &t32));
                acc = sub(&acc, &m(&m(&t21, &t21), &t33));
                acc = add(&acc, &m(&m(&t21, &t22), &t32));
                acc = add(&acc, &m(&m(&t21, &t23), &t31));
                sub(&acc, &m(&m(&t22, &t22), &t31))
            };
            t.set(0, 2, field.div(&rest, &m(&t31, &t31)).expect("nonzero"));
        }
        1 => {
            t.set(2, 0, field.zero());
            let t32 = field.random_nonzero(rng);
            t.set(2, 1, t32.clone());
            let (t21, t22, t33) = (g(&t, 2, 1), g(&t, 2, 2), g(&t, 3, 3));
            let num = sub(&m(&m(&t21, &t22), &t32), &m(&m(&t21, &t21), &t33));
            t.set(0, 0, field.div(&num, &m(&t32, &t32)).expect("nonzero"));
        }
        _ => {
            t.set(2, 0, field.zero());
            t.set(2, 1, field.zero());
            t.set(1, 0, field.zero());
        }
    }
    if field.is_zero(&t.det(field)) {
        return Ok(None);
    }
    Ok(Some(conjugate(field, &t, &j2(field))?))
}

/// Witness families: the symbolic identities, plus matching random
/// admissible partners of `J2` to a family.
pub fn verify_lemma1_families<F: Field>(field: &F, trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("lemma1-families", &field.spec());
    report.seed = seed;
    report.trials = trials as u64;
    let ring = PolyRing(field.clone());
    let a = j2(&ring);
    let a2 = a.mul(&ring, &a);
    for family in 1..=3u8 {
        let w = symbolic_witness(field, family, Param::T)?;
        let b = &w.scaled;
        let tr1 = a.mul(&ring, b).trace(&ring);
        let tr2 = a2.mul(&ring, b).mul(&ring, b).trace(&ring);
        let sig: Vec<MultiPoly<F>> = (1..=3).map(|k| b.sigma(&ring, k)).collect::<Result<_>>()?;
        let ok = tr1.is_zero() && tr2.is_zero() && sig.iter().all(|s| s.is_zero());
        report.push(
            ReportItem::new(format!("family-{family}"), Status::from_bool(ok))
                .with("tr(J2 B)", tr1.to_string())
                .with("tr(J2^2 B^2)", tr2.to_string())
                .with("sigma", sig.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
        );
    }

    let s = derive_seed(seed, "lemma1-families/complete");
    report.seeds.push(s);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let aj = j2(field);
    let aj2 = aj.mul(field, &aj);
    for (branch, name) in ["t31!=0", "t31=0,t32!=0", "t31=t32=0"].iter().enumerate() {
        let mut counts = [0usize; 3];
        let mut failure = None;
        let mut drawn = 0;
        while drawn < trials {
            let Some(b) = sample_lemma1_partner(field, branch, &mut rng)? else { continue };
            drawn += 1;
            let hyp = field.is_zero(&aj.mul(field, &b).trace(field)) && field.is_zero(&aj2.mul(field, &b).mul(field, &b).trace(field));
            match (hyp, match_family(field, &b)?) {
                (true, Some(f)) => counts[f as usize - 1] += 1,
                (false, _) => {
                    failure = Some(format!("draw {drawn}: sampler left the hypotheses"));
                    break;
                }
                (true, None) => {
                    failure = Some(format!("draw {drawn}: no family matches"));
                    break;
                }
            }
        }
        report.push(
            ReportItem::new(format!("complete/{name}"), Status::from_bool(failure.is_none()))
                .with("family_counts", counts)
                .with("failure", failure),
        );
    }

    // L is a stabilizer of J2.
    let mut ok = true;
    for _ in 0..trials.min(100) {
        let l = toeplitz_l(field, &field.random_nonzero(&mut rng), &field.random(&mut rng), &field.random(&mut rng));
        ok &= conjugate(field, &l, &aj)? == aj;
    }
    report.push(ReportItem::new("stabilizer", Status::from_bool(ok)));
    Ok(report)
}

/// Replays every shipped case script with symbolic parameters.
pub fn run_case_scripts<F: Field>(field: &F, params: &ParamSet) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("hsop-cases", &field.spec());
    report.params = Some(params.to_string());
    for sc in CaseScript::shipped() {
        report.push(run_case_script(&sc, field, params)?);
    }
    Ok(report)
}

pub fn run_case_script<F: Field>(sc: &CaseScript, field: &F, params: &ParamSet) -> Result<ReportItem> {
    let (out, _) = replay(sc, field, ParamMode::Symbolic(params))?;
    let branches: Vec<_> = out
        .branches
        .iter()
        .map(|b| {
            serde_json::json!({
                "branch": b.label, "claim": b.claim, "residual": b.residual, "holds": b.holds, "note": b.note,
            })
        })
        .collect();
    Ok(ReportItem::new(format!("case{}", out.id), Status::from_bool(out.passed()))
        .with("steps", &out.log)
        .with("branches", branches))
}

/// Jacobian rank of `set` at random points; pass once it reaches `|set|`.
pub fn jacobian_independence<F: Field>(
    field: &F,
    set: &GeneratorSet<F>,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("hsop-independence", &field.spec());
    report.seed = seed;
    report.trials = trials as u64;
    let s = derive_seed(seed, &format!("jacobian/{}", set.label));
    report.seeds.push(s);
    let (ranks, reached) = jacobian_ranks(field, set, trials, s, true)?;
    let status = if reached { Status::Pass } else { Status::Inconclusive };
    report.push(
        ReportItem::new(set.label.clone(), status)
            .with("size", set.len())
            .with("ranks", &ranks)
            .with("max_rank", ranks.iter().max()),
    );
    Ok(report)
}

/// Ranks at up to `trials` random points; with `stop`, stops at full rank.
pub fn jacobian_ranks<F: Field>(field: &F, set: &GeneratorSet<F>, trials: usize, seed: u64, stop: bool) -> Result<(Vec<usize>, bool)> {
    let (n, d) = (set.n, set.d);
    let vars: Vec<Var> =
        (1..=d).flat_map(|r| (1..=n).flat_map(move |i| (1..=n).map(move |j| Var::entry(r, i, j)))).collect();
    let polys: Vec<MultiPoly<F>> = set.elements.iter().map(|e| e.to_poly(n, d)).collect::<Result<_>>()?;
    let jac: Vec<Vec<MultiPoly<F>>> = polys.iter().map(|p| vars.iter().map(|&v| p.partial_derivative(v)).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranks = Vec::new();
    for _ in 0..trials {
        let point: HashMap<Var, F::Elem> = vars.iter().map(|&v| (v, field.random(&mut rng))).collect();
        let rows = jac.iter().map(|row| row.iter().map(|p| p.eval_map(&point)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        let r = field.rank(rows);
        ranks.push(r);
        if stop && r == set.len() {
            return Ok((ranks, true));
        }
    }
    let full = ranks.iter().any(|&r| r == set.len());
    Ok((ranks, full))
}

/// `P` with `tr(X1^2 X2^2)` replaced by `tr(X1 X2)^2`.
pub fn planted_dependence<F: Field>(field: &F, params: &ParamSet) -> Result<GeneratorSet<F>> {
    let mut p = build_hsop(HsopTarget::R33, params, field)?;
    let target = InvariantExpr::tr(field, &Word::from_letters(&[1, 1, 2, 2]));
    let idx = p.elements.iter().position(|e| *e == target).ok_or_else(|| Error::Internal("tr(X1^2 X2^2) not in P".into()))?;
    let t12 = InvariantExpr::tr(field, &Word::from_letters(&[1, 2]));
    p.elements[idx] = t12.mul(&t12);
    p.label = "P-planted".into();
    Ok(p)
}

fn first_nonzero<F: Field>(field: &F, set: &GeneratorSet<F>, tuple: &[NumericMatrix<F>]) -> Result<Option<usize>> {
    for (i, e) in set.elements.iter().enumerate() {
        if !field.is_zero(&e.evaluate(tuple)?) {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Summary of the witness-family hunt.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct HuntSummary {
    pub samples: usize,
    /// Samples at which `P` vanished.
    pub admissible: usize,
    /// Admissible samples where some generator did not vanish.
    pub violations: usize,
    pub infeasible_branches: Vec<String>,
    pub sampled_branches: Vec<String>,
    pub first_violation: Option<String>,
}

/// Draws numeric tuples `(J2, A2, A3)` from the witness families with the
/// equations of `p` imposed through the case scripts, conjugates them, and
/// checks that `g` vanishes wherever `p` does. Finding nothing is
/// consistent with the nullcone claim; it proves nothing.
pub fn hunt<F: Field>(
    field: &F,
    params: &ParamSet,
    p: &GeneratorSet<F>,
    g: &GeneratorSet<F>,
    samples: usize,
    seed: u64,
) -> Result<HuntSummary> {
    let mut summary = HuntSummary::default();
    let mut pools: Vec<(String, u8, u8, State<F>)> = Vec::new();
    for sc in CaseScript::shipped() {
        let (_, terminals) = replay(&sc, field, ParamMode::Numeric(params))?;
        for t in terminals {
            let id = format!("{}{}", sc.id(), if t.label == "main" { String::new() } else { t.label.clone() });
            let contradiction = t.outcome.holds && t.outcome.claim != "upper";
            if contradiction || !t.state.vanished.is_empty() {
                summary.infeasible_branches.push(id);
                continue;
            }
            let mut st = t.state;
            if complete(&mut st) {
                summary.sampled_branches.push(id.clone());
                pools.push((id, sc.j, sc.k, st));
            } else {
                summary.infeasible_branches.push(format!("{id} (not completed)"));
            }
        }
    }
    if pools.is_empty() {
        return Ok(summary);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free: Vec<Var> = (1..=5).flat_map(|i| [Var::param(Param::B(i)), Var::param(Param::C(i))]).collect();
    let mut attempts = 0usize;
    while summary.samples < samples && attempts < samples * 20 {
        attempts += 1;
        let (id, j, k, st) = &pools[summary.samples % pools.len()];
        let mut point: HashMap<Var, F::Elem> = free.iter().map(|&v| (v, field.random(&mut rng))).collect();
        let mut ok = true;
        for (v, num, den) in st.subs.iter().rev() {
            let dv = den.eval_map(&point)?;
            let Some(inv) = field.inv(&dv) else {
                ok = false;
                break;
            };
            let nv = num.eval_map(&point)?;
            point.insert(*v, field.mul(&nv, &inv));
        }
        if !ok || st.atoms.iter().any(|a| a.eval_map(&point).map(|x| field.is_zero(&x)).unwrap_or(true)) {
            continue;
        }
        let bvals: Vec<F::Elem> = (1..=5).map(|i| point[&Var::param(Param::B(i))].clone()).collect();
        let cvals: Vec<F::Elem> = (1..=5).map(|i| point[&Var::param(Param::C(i))].clone()).collect();
        let (Ok(a2), Ok(a3)) = (numeric_witness(field, *j, &bvals), numeric_witness(field, *k, &cvals)) else {
            continue;
        };
        summary.samples += 1;
        let gm = random_invertible(field, 3, &mut rng);
        let tuple = [j2(field), a2, a3].iter().map(|m| conjugate(field, &gm, m)).collect::<Result<Vec<_>>>()?;
        if first_nonzero(field, p, &tuple)?.is_some() {
            continue;
        }
        summary.admissible += 1;
        if let Some(i) = first_nonzero(field, g, &tuple)? {
            summary.violations += 1;
            if summary.first_violation.is_none() {
                summary.first_violation = Some(format!("branch {id}: {} nonzero", g.elements[i]));
            }
        }
    }
    Ok(summary)
}

/// Strictly upper triangular triples and their conjugates annihilate `P`
/// and the generators; then the witness-family hunt.
pub fn nullcone_vanishing<F: Field>(
    field: &F,
    params: &ParamSet,
    trials: usize,
    hunt_samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("nullcone", &field.spec());
    report.seed = seed;
    report.trials = trials as u64;
    report.params = Some(params.to_string());
    let p = build_hsop(HsopTarget::R33, params, field)?;
    let g = build_generators(field);
    let s = derive_seed(seed, "nullcone/upper");
    report.seeds.push(s);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    for conj in [false, true] {
        let mut failure = None;
        for t in 0..trials {
            let mut tuple: Vec<NumericMatrix<F>> = (0..3).map(|_| random_strict_upper(field, 3, &mut rng)).collect();
            if conj {
                let gm = random_invertible(field, 3, &mut rng);
                let gi = inverse(field, &gm)?;
                tuple = tuple.iter().map(|m| gm.mul(field, m).mul(field, &gi)).collect();
            }
            for set in [&p, &g] {
                if let Some(i) = first_nonzero(field, set, &tuple)? {
                    failure = Some(format!("trial {t}: {} {} nonzero", set.label, set.elements[i]));
                }
            }
            if failure.is_some() {
                break;
            }
        }
        let id = if conj { "upper-conjugated" } else { "upper" };
        report.push(ReportItem::new(id, Status::from_bool(failure.is_none())).with("trials", trials).with("failure", failure));
    }
    let hs = derive_seed(seed, "nullcone/hunt");
    report.seeds.push(hs);
    let summary = hunt(field, params, &p, &g, hunt_samples, hs)?;
    let status = if summary.violations > 0 {
        Status::Fail
    } else if summary.samples < hunt_samples {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    report.push(ReportItem::new("hunt", status).with("summary", &summary).with("verdict", match status {
        Status::Pass => "consistent",
        Status::Fail => "violation",
        Status::Inconclusive => "too few samples",
    }));
    Ok(report)
}

/// Hunt with parameters that violate the key-sum condition; the case-(2,3)
/// branch becomes feasible.
pub fn hunt_control<F: Field>(field: &F, params: &ParamSet, samples: usize, seed: u64) -> Result<HuntSummary> {
    let p = build_hsop_unchecked(HsopTarget::R33, params, field);
    let g = build_generators(field);
    hunt(field, params, &p, &g, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ExtField, PrimeField};

    #[test]
    fn classification_examples() {
        let f = PrimeField::surrogate();
        assert_eq!(classify_nilpotent(&f, &j1(&f)).unwrap(), NilpotentClass::RankOneJ1);
        assert_eq!(classify_nilpotent(&f, &j2(&f)).unwrap(), NilpotentClass::RankTwoJ2);
        assert_eq!(classify_nilpotent(&f, &Matrix::identity(&f, 3)).unwrap(), NilpotentClass::NotNilpotent);
        assert_eq!(classify_nilpotent(&f, &Matrix::zero(&f, 3)).unwrap(), NilpotentClass::Zero);
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(classify_nilpotent(&f3, &Matrix::identity(&f3, 3)).unwrap(), NilpotentClass::NotNilpotent);
    }

    #[test]
    fn jordan_round_trips() {
        let f = PrimeField::surrogate();
        let (t, j) = conjugate_to_jordan(&f, &j2(&f)).unwrap();
        assert_eq!((t, j), (Matrix::identity(&f, 3), j2(&f)));
        let (_, j) = conjugate_to_jordan(&f, &j1(&f).transpose()).unwrap();
        assert_eq!(j, j1(&f));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_invertible(&f, 3, &mut rng);
            for jm in [j1(&f), j2(&f)] {
                let a = conjugate(&f, &g, &jm).unwrap();
                let (t, j) = conjugate_to_jordan(&f, &a).unwrap();
                assert_eq!(j, jm);
                assert_eq!(conjugate(&f, &t, &j).unwrap(), a);
            }
        }
        assert!(conjugate_to_jordan(&f, &Matrix::zero(&f, 3)).is_err());
    }

    #[test]
    fn lemma_checks_pass() {
        let f = PrimeField::surrogate();
        assert!(verify_rank1_identity(&f, 50, 1).unwrap().passed());
        assert!(verify_teranishi(&f).unwrap().passed());
        assert!(verify_teranishi(&ExtField::new(2, 16).unwrap()).unwrap().passed());
        assert!(verify_teranishi(&PrimeField::new(2).unwrap()).unwrap().passed());
        let r = verify_lemma2(&f, 100, 1).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        let r = verify_lemma1_families(&f, 100, 1).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn jacobian_small() {
        let f = PrimeField::surrogate();
        let p32 = build_hsop(HsopTarget::R32, &ParamSet::default_for(0), &f).unwrap();
        let r = jacobian_independence(&f, &p32, 5, 1).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }
}
