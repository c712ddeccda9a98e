//! Case scripts: the rank-two case analysis replayed by substitution.
//!
//! Take `A1 = J2`, `A2` from witness family `j` (parameters `b1..b5`) and
//! `A3` from family `k` (parameters `c1..c5`). Members of families 2 and 3
//! are represented by `det(T) B`; each equation is cleared of the
//! determinants term by term so it stays polynomial. Equations:
//!
//! ```text
//! eq_tr     tr(A2 A3)
//! eq_alpha  tr(A1^2 A2) + alpha1 tr(A2^2 A3) + alpha2 tr(A3^2 A1)
//! eq_beta1  tr(A1^2 A3) - beta1 tr(A3^2 A2)
//! eq_beta2  tr(A1^2 A3) - beta2 tr(A2^2 A1)
//! eq_gamma  tr(A1 A2 A3) + gamma tr(A1 A3 A2)
//! eq_sq     tr(A2^2 A3^2)
//! ```
//!
//! Script format, one statement per line, `#` starts a comment:
//!
//! ```text
//! case J K
//! solve EQ VAR = POLY [over POLY]   EQ forces VAR = POLY (/ POLY)
//! split EQ POLY ; POLY ...          EQ is a product of these factors
//! branch LABEL                      one per split factor, in order
//! assume VAR = POLY [over POLY]     first line of a branch; kills its factor
//! conclude EQ unit                  EQ is a nonzero constant
//! conclude EQ det                   EQ forces a determinant factor to vanish
//! conclude EQ factor POLY           EQ is POLY times parameters
//! conclude det                      a determinant factor has become zero
//! conclude upper                    A2, A3 strictly upper triangular
//! ```
//!
//! All residuals are compared up to the declared-nonzero quantities: the
//! determinant factors of both families (updated under substitution) and,
//! in symbolic mode, the parameters `alpha1, alpha2, beta1, beta2, gamma`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::invariant::ParamSet;
use crate::matrix::{j2, word_product, MatrixPoly, PolyRing};
use crate::poly::{parse_poly, MultiPoly, Param, Var};

use super::families::symbolic_witness;

/// Shipped scripts, by `(j, k)`.
pub const CASE_SOURCES: [((u8, u8), &str); 9] = [
    ((1, 1), include_str!("../../cases/case_1_1.txt")),
    ((1, 2), include_str!("../../cases/case_1_2.txt")),
    ((1, 3), include_str!("../../cases/case_1_3.txt")),
    ((2, 1), include_str!("../../cases/case_2_1.txt")),
    ((2, 2), include_str!("../../cases/case_2_2.txt")),
    ((2, 3), include_str!("../../cases/case_2_3.txt")),
    ((3, 1), include_str!("../../cases/case_3_1.txt")),
    ((3, 2), include_str!("../../cases/case_3_2.txt")),
    ((3, 3), include_str!("../../cases/case_3_3.txt")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Equation {
    Tr,
    Alpha,
    Beta1,
    Beta2,
    Gamma,
    Sq,
}

impl Equation {
    pub const ALL: [Equation; 6] =
        [Equation::Tr, Equation::Alpha, Equation::Beta1, Equation::Beta2, Equation::Gamma, Equation::Sq];

    pub fn name(self) -> &'static str {
        match self {
            Equation::Tr => "eq_tr",
            Equation::Alpha => "eq_alpha",
            Equation::Beta1 => "eq_beta1",
            Equation::Beta2 => "eq_beta2",
            Equation::Gamma => "eq_gamma",
            Equation::Sq => "eq_sq",
        }
    }

    pub fn parse(s: &str) -> Option<Equation> {
        Equation::ALL.into_iter().find(|e| e.name() == s)
    }

    /// `(sign, parameter, word)` per term.
    fn terms(self) -> Vec<(i64, Option<Param>, &'static [u8])> {
        match self {
            Equation::Tr => vec![(1, None, &[2, 3])],
            Equation::Alpha => vec![
                (1, None, &[1, 1, 2]),
                (1, Some(Param::Alpha(1)), &[2, 2, 3]),
                (1, Some(Param::Alpha(2)), &[3, 3, 1]),
            ],
            Equation::Beta1 => vec![(1, None, &[1, 1, 3]), (-1, Some(Param::Beta(1)), &[3, 3, 2])],
            Equation::Beta2 => vec![(1, None, &[1, 1, 3]), (-1, Some(Param::Beta(2)), &[2, 2, 1])],
            Equation::Gamma => vec![(1, None, &[1, 2, 3]), (1, Some(Param::Gamma), &[1, 3, 2])],
            Equation::Sq => vec![(1, None, &[2, 2, 3, 3])],
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `num` or `num / den`, as written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rhs {
    pub num: String,
    pub den: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Solve { eq: Equation, var: Var, rhs: Rhs },
    Assume { var: Var, rhs: Rhs },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    Unit,
    Det,
    Factor(String),
    Upper,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ending {
    Conclude { eq: Option<Equation>, claim: Claim },
    Split { eq: Equation, factors: Vec<String>, branches: Vec<Branch> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub label: String,
    pub steps: Vec<Step>,
    pub eq: Option<Equation>,
    pub claim: Claim,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseScript {
    pub j: u8,
    pub k: u8,
    pub steps: Vec<Step>,
    pub ending: Ending,
}

fn script_var(name: &str) -> Option<Var> {
    let v = Var::parse_param(name)?;
    matches!(v.as_param()?, Param::B(1..=5) | Param::C(1..=5)).then_some(v)
}

fn allowed_in_poly(v: Var) -> bool {
    matches!(
        v.as_param(),
        Some(Param::B(1..=5) | Param::C(1..=5) | Param::Alpha(1..=2) | Param::Beta(1..=2) | Param::Gamma)
    )
}

struct Line<'a> {
    offset: usize,
    text: &'a str,
}

impl Line<'_> {
    fn err(&self, col: usize, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.offset + col, msg: msg.into() }
    }

    /// Offset of `part` (a subslice of the line) within the line.
    fn col(&self, part: &str) -> usize {
        part.as_ptr() as usize - self.text.as_ptr() as usize
    }

    fn check_poly(&self, part: &str) -> Result<String> {
        let p = parse_poly(&crate::field::Rationals, part).map_err(|e| match e {
            Error::Parse { pos, msg } => self.err(self.col(part) + pos, msg),
            other => other,
        })?;
        if let Some(v) = p.vars().into_iter().find(|&v| !allowed_in_poly(v)) {
            return Err(self.err(self.col(part), format!("variable {v} not allowed in scripts")));
        }
        Ok(part.trim().to_string())
    }

    /// `VAR = POLY [over POLY]`.
    fn assignment(&self, rest: &str) -> Result<(Var, Rhs)> {
        let Some(eq) = rest.find('=') else { return Err(self.err(self.col(rest), "expected '='")) };
        let name = rest[..eq].trim();
        let var = script_var(name).ok_or_else(|| self.err(self.col(rest), format!("'{name}' is not b1..b5 or c1..c5")))?;
        let rhs = &rest[eq + 1..];
        let (num, den) = match rhs.find(" over ") {
            Some(i) => (&rhs[..i], Some(&rhs[i + 6..])),
            None => (rhs, None),
        };
        let num = self.check_poly(num)?;
        let den = den.map(|d| self.check_poly(d)).transpose()?;
        Ok((var, Rhs { num, den }))
    }

    fn equation(&self, word: &str) -> Result<Equation> {
        Equation::parse(word).ok_or_else(|| self.err(self.col(word), format!("unknown equation '{word}'")))
    }
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    }
}

impl CaseScript {
    pub fn parse(text: &str) -> Result<CaseScript> {
        let mut lines = Vec::new();
        let mut offset = 0;
        for raw in text.split_inclusive('\n') {
            let body = raw.split('#').next().unwrap_or("");
            let body = body.trim_end_matches(['\n', '\r']);
            if !body.trim().is_empty() {
                lines.push(Line { offset, text: body });
            }
            offset += raw.len();
        }
        let end_err = || Error::Parse { pos: text.len(), msg: "unexpected end of script".into() };
        let mut it = lines.iter().peekable();
        let first = it.next().ok_or_else(end_err)?;
        let (kw, rest) = split_word(first.text);
        if kw != "case" {
            return Err(first.err(first.col(kw), "script must start with 'case J K'"));
        }
        let ids: Vec<u8> = rest.split_whitespace().filter_map(|t| t.parse().ok()).filter(|v| (1..=3).contains(v)).collect();
        if ids.len() != 2 || rest.split_whitespace().count() != 2 {
            return Err(first.err(first.col(rest), "expected two family indices in 1..3"));
        }
        let mut steps = Vec::new();
        let mut ending = None;
        while let Some(line) = it.next() {
            let (kw, rest) = split_word(line.text);
            match kw {
                "solve" => {
                    let (eqw, rest) = split_word(rest);
                    let eq = line.equation(eqw)?;
                    let (var, rhs) = line.assignment(rest)?;
                    steps.push(Step::Solve { eq, var, rhs });
                }
                "conclude" => {
                    let (eq, claim) = parse_conclusion(line, rest)?;
                    ending = Some(Ending::Conclude { eq, claim });
                    break;
                }
                "split" => {
                    let (eqw, rest) = split_word(rest);
                    let eq = line.equation(eqw)?;
                    let factors = rest.split(';').map(|f| line.check_poly(f)).collect::<Result<Vec<_>>>()?;
                    let mut branches = Vec::new();
                    for _ in 0..factors.len() {
                        let head = it.next().ok_or_else(end_err)?;
                        let (kw, label) = split_word(head.text);
                        if kw != "branch" || label.trim().is_empty() {
                            return Err(head.err(0, "expected 'branch LABEL'"));
                        }
                        let mut bsteps = Vec::new();
                        let mut concl = None;
                        for line in it.by_ref() {
                            let (kw, rest) = split_word(line.text);
                            match kw {
                                "assume" if bsteps.is_empty() => {
                                    let (var, rhs) = line.assignment(rest)?;
                                    bsteps.push(Step::Assume { var, rhs });
                                }
                                "solve" if !bsteps.is_empty() => {
                                    let (eqw, rest) = split_word(rest);
                                    let eq = line.equation(eqw)?;
                                    let (var, rhs) = line.assignment(rest)?;
                                    bsteps.push(Step::Solve { eq, var, rhs });
                                }
                                "conclude" if !bsteps.is_empty() => {
                                    concl = Some(parse_conclusion(line, rest)?);
                                    break;
                                }
                                _ => return Err(line.err(0, format!("unexpected '{kw}' in branch"))),
                            }
                        }
                        let (beq, claim) = concl.ok_or_else(end_err)?;
                        branches.push(Branch { label: label.trim().to_string(), steps: bsteps, eq: beq, claim });
                    }
                    ending = Some(Ending::Split { eq, factors, branches });
                    break;
                }
                _ => return Err(line.err(line.col(kw), format!("unexpected '{kw}'"))),
            }
        }
        if let Some(extra) = it.next() {
            return Err(extra.err(0, "statements after the final conclusion"));
        }
        Ok(CaseScript { j: ids[0], k: ids[1], steps, ending: ending.ok_or_else(end_err)? })
    }

    pub fn shipped() -> Vec<CaseScript> {
        CASE_SOURCES.iter().map(|(_, s)| CaseScript::parse(s).expect("shipped script parses")).collect()
    }

    pub fn id(&self) -> String {
        format!("({},{})", self.j, self.k)
    }
}

fn parse_conclusion(line: &Line<'_>, rest: &str) -> Result<(Option<Equation>, Claim)> {
    let (w1, rest1) = split_word(rest);
    match w1 {
        "det" if rest1.trim().is_empty() => return Ok((None, Claim::Det)),
        "upper" if rest1.trim().is_empty() => return Ok((None, Claim::Upper)),
        _ => {}
    }
    let eq = line.equation(w1)?;
    let (w2, rest2) = split_word(rest1);
    let claim = match w2 {
        "unit" if rest2.trim().is_empty() => Claim::Unit,
        "det" if rest2.trim().is_empty() => Claim::Det,
        "factor" => Claim::Factor(line.check_poly(rest2)?),
        _ => return Err(line.err(line.col(w2), "expected 'unit', 'det' or 'factor POLY'")),
    };
    Ok((Some(eq), claim))
}

/// How the parameters enter the replay.
#[derive(Clone, Copy, Debug)]
pub enum ParamMode<'a> {
    /// Parameters stay symbolic and count as nonzero; factor claims are
    /// then evaluated at the given values.
    Symbolic(&'a ParamSet),
    /// Parameters are replaced by the given values from the start.
    Numeric(&'a ParamSet),
}

impl ParamMode<'_> {
    fn set(&self) -> &ParamSet {
        match self {
            ParamMode::Symbolic(p) | ParamMode::Numeric(p) => p,
        }
    }
}

const PARAMS: [Param; 5] = [Param::Alpha(1), Param::Alpha(2), Param::Beta(1), Param::Beta(2), Param::Gamma];

fn param_value(p: &ParamSet, which: Param) -> i64 {
    match which {
        Param::Alpha(1) => p.alpha1,
        Param::Alpha(2) => p.alpha2,
        Param::Beta(1) => p.beta1,
        Param::Beta(2) => p.beta2,
        _ => p.gamma,
    }
}

/// Replay state: equations, the two witness matrices, the nonzero atoms and
/// the substitutions made so far.
#[derive(Clone, Debug)]
pub struct State<F: Field> {
    field: F,
    pub eqs: Vec<(Equation, MultiPoly<F>)>,
    pub a2: MatrixPoly<F>,
    pub a3: MatrixPoly<F>,
    /// Monic nonconstant polynomials known to be nonzero.
    pub atoms: Vec<MultiPoly<F>>,
    /// Atoms that became zero.
    pub vanished: Vec<String>,
    /// Symbolic nonzero parameters.
    params: Vec<Var>,
    /// `(var, num, den)` in the order applied.
    pub subs: Vec<(Var, MultiPoly<F>, MultiPoly<F>)>,
}

impl<F: Field> State<F> {
    pub fn new(field: &F, j: u8, k: u8, mode: ParamMode<'_>) -> Result<Self> {
        let ring = PolyRing(field.clone());
        let w2 = symbolic_witness(field, j, Param::B)?;
        let w3 = symbolic_witness(field, k, Param::C)?;
        let tuple = [j2(&ring), w2.scaled.clone(), w3.scaled.clone()];
        let dets = [MultiPoly::one(field), w2.det.clone(), w3.det.clone()];
        let coef = |p: Option<Param>| -> MultiPoly<F> {
            match (p, mode) {
                (None, _) => MultiPoly::one(field),
                (Some(p), ParamMode::Symbolic(_)) => MultiPoly::var(field, Var::param(p)),
                (Some(p), ParamMode::Numeric(set)) => MultiPoly::from_i64(field, param_value(set, p)),
            }
        };
        let mut eqs = Vec::new();
        for eq in Equation::ALL {
            let terms = eq.terms();
            let count = |w: &[u8], l: u8| w.iter().filter(|&&x| x == l).count() as u32;
            let max2 = terms.iter().map(|t| count(t.2, 2)).max().unwrap_or(0);
            let max3 = terms.iter().map(|t| count(t.2, 3)).max().unwrap_or(0);
            let mut acc = MultiPoly::zero(field);
            for (sign, p, w) in terms {
                let tr = word_product(&ring, w, &tuple)?.trace(&ring);
                let clear = &dets[1].pow(max2 - count(w, 2)) * &dets[2].pow(max3 - count(w, 3));
                let term = &(&tr * &clear) * &coef(p).scale(&field.from_i64(sign));
                acc = &acc + &term;
            }
            eqs.push((eq, acc));
        }
        let params = match mode {
            ParamMode::Symbolic(_) => PARAMS.iter().map(|&p| Var::param(p)).collect(),
            ParamMode::Numeric(_) => Vec::new(),
        };
        let mut s = State {
            field: field.clone(),
            eqs,
            a2: w2.scaled,
            a3: w3.scaled,
            atoms: Vec::new(),
            vanished: Vec::new(),
            params,
            subs: Vec::new(),
        };
        for a in w2.det_factors.iter().chain(&w3.det_factors) {
            s.add_atom(a);
        }
        Ok(s)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn equation(&self, eq: Equation) -> &MultiPoly<F> {
        &self.eqs.iter().find(|(e, _)| *e == eq).expect("all equations present").1
    }

    /// Records `p != 0`, split into variables and a primitive part.
    pub fn add_atom(&mut self, p: &MultiPoly<F>) {
        if p.is_zero() {
            self.vanished.push(p.to_string());
            return;
        }
        let content = p.monomial_content();
        for &(v, _) in content.pairs() {
            if self.params.contains(&v) {
                continue;
            }
            self.push_atom(MultiPoly::var(&self.field, v));
        }
        let primitive = p
            .exact_div(&MultiPoly::from_terms(&self.field, [(content, self.field.one())]))
            .expect("content divides");
        if !primitive.is_constant() {
            self.push_atom(primitive.monic());
        }
    }

    fn push_atom(&mut self, a: MultiPoly<F>) {
        if !self.atoms.contains(&a) {
            self.atoms.push(a);
        }
    }

    /// Replaces `var` by `num / den` everywhere.
    pub fn substitute(&mut self, var: Var, num: &MultiPoly<F>, den: &MultiPoly<F>) {
        for (_, e) in self.eqs.iter_mut() {
            *e = e.substitute_fraction(var, num, den);
        }
        let sub = |m: &MatrixPoly<F>| m.map(|p| p.substitute_fraction(var, num, den));
        self.a2 = sub(&self.a2);
        self.a3 = sub(&self.a3);
        let old = std::mem::take(&mut self.atoms);
        for a in old {
            let moved = a.substitute_fraction(var, num, den);
            if moved.is_zero() {
                self.vanished.push(a.to_string());
            } else {
                self.add_atom(&moved);
            }
        }
        if !den.is_constant() {
            self.add_atom(den);
        }
        self.subs.push((var, num.clone(), den.clone()));
    }

    /// Divides out every atom (except those equal to a `keep` factor) and,
    /// with `params`, every symbolic parameter. Returns the rest and the
    /// number of atoms that divided.
    pub fn strip(&self, p: &MultiPoly<F>, keep: &[MultiPoly<F>], params: bool) -> (MultiPoly<F>, usize) {
        let keep: Vec<MultiPoly<F>> = keep.iter().map(|k| k.monic()).collect();
        let mut cur = p.clone();
        let mut hits = 0;
        for a in &self.atoms {
            if keep.contains(a) {
                continue;
            }
            let (rest, c) = cur.strip_factor(a);
            if c > 0 {
                hits += 1;
            }
            cur = rest;
        }
        if params {
            for &v in &self.params {
                cur = cur.strip_factor(&MultiPoly::var(&self.field, v)).0;
            }
        }
        (cur, hits)
    }

    fn is_nonzero_constant(p: &MultiPoly<F>) -> bool {
        p.is_constant() && !p.is_zero()
    }

    fn only_params(&self, p: &MultiPoly<F>) -> bool {
        p.num_terms() == 1 && p.terms().all(|(m, _)| m.pairs().iter().all(|(v, _)| self.params.contains(v)))
    }
}

/// Result of one branch (or of the whole script when it does not split).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchOutcome {
    pub label: String,
    pub claim: String,
    /// Residual after dividing out declared-nonzero factors.
    pub residual: String,
    pub holds: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub id: String,
    pub log: Vec<String>,
    pub branches: Vec<BranchOutcome>,
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        !self.branches.is_empty() && self.branches.iter().all(|b| b.holds)
    }
}

fn rhs_polys<F: Field>(field: &F, rhs: &Rhs, mode: ParamMode<'_>) -> Result<(MultiPoly<F>, MultiPoly<F>)> {
    let conv = |t: &str| -> Result<MultiPoly<F>> {
        let mut p = parse_poly(field, t)?;
        if let ParamMode::Numeric(set) = mode {
            for q in PARAMS {
                p = p.substitute(Var::param(q), &MultiPoly::from_i64(field, param_value(set, q)));
            }
        }
        Ok(p)
    };
    let num = conv(&rhs.num)?;
    let den = match &rhs.den {
        Some(d) => conv(d)?,
        None => MultiPoly::one(field),
    };
    if den.is_zero() {
        return Err(Error::Param("denominator vanishes".into()));
    }
    Ok((num, den))
}

fn show_rhs(var: Var, rhs: &Rhs) -> String {
    match &rhs.den {
        Some(d) => format!("{var} = ({}) / ({d})", rhs.num),
        None => format!("{var} = {}", rhs.num),
    }
}

/// Applies one step; `Err(msg)` when its check fails.
fn apply_step<F: Field>(
    state: &mut State<F>,
    step: &Step,
    mode: ParamMode<'_>,
    factor: Option<&MultiPoly<F>>,
    log: &mut Vec<String>,
) -> Result<std::result::Result<(), String>> {
    let f = state.field().clone();
    match step {
        Step::Solve { eq, var, rhs } => {
            let (num, den) = rhs_polys(&f, rhs, mode)?;
            let e = state.equation(*eq).clone();
            if e.is_zero() {
                return Ok(Err(format!("{eq} already vanishes")));
            }
            if !e.substitute_fraction(*var, &num, &den).is_zero() {
                return Ok(Err(format!("{} does not solve {eq}", show_rhs(*var, rhs))));
            }
            let g = &(&den * &MultiPoly::var(&f, *var)) - &num;
            let (rest, _) = state.strip(&e, &[], true);
            let (rest, power) = rest.strip_factor(&g);
            if power == 0 || !State::is_nonzero_constant(&rest) {
                return Ok(Err(format!("{eq} does not force {}; cofactor {rest}", show_rhs(*var, rhs))));
            }
            log.push(format!("{eq} forces {}", show_rhs(*var, rhs)));
            state.substitute(*var, &num, &den);
        }
        Step::Assume { var, rhs } => {
            let (num, den) = rhs_polys(&f, rhs, mode)?;
            if let Some(fac) = factor {
                if !fac.substitute_fraction(*var, &num, &den).is_zero() {
                    return Ok(Err(format!("{} does not annihilate {fac}", show_rhs(*var, rhs))));
                }
            }
            log.push(format!("assume {}", show_rhs(*var, rhs)));
            state.substitute(*var, &num, &den);
        }
    }
    Ok(Ok(()))
}

fn check_claim<F: Field>(state: &State<F>, eq: Option<Equation>, claim: &Claim, mode: ParamMode<'_>) -> Result<(bool, String, Option<String>)> {
    let f = state.field().clone();
    let symbolic = matches!(mode, ParamMode::Symbolic(_));
    match (claim, eq) {
        (Claim::Upper, _) => {
            let upper = |m: &MatrixPoly<F>| (0..3).all(|i| (0..=i).all(|j| m.get(i, j).is_zero()));
            let all_zero = state.eqs.iter().all(|(_, e)| e.is_zero());
            let ok = upper(&state.a2) && upper(&state.a3) && all_zero;
            Ok((ok, "0".into(), (!ok).then(|| "matrices are not strictly upper triangular".to_string())))
        }
        (Claim::Det, None) => {
            let ok = !state.vanished.is_empty();
            Ok((ok, state.vanished.join(", "), (!ok).then(|| "no determinant factor vanished".to_string())))
        }
        (_, None) => Err(Error::Internal("claim needs an equation".into())),
        (claim, Some(eq)) => {
            let e = state.equation(eq);
            if e.is_zero() {
                return Ok((false, "0".into(), Some(format!("{eq} vanishes identically"))));
            }
            let strip_params = !matches!(claim, Claim::Factor(_)) || !symbolic;
            let (rest, hits) = state.strip(e, &[], strip_params);
            match claim {
                Claim::Unit => {
                    let ok = State::is_nonzero_constant(&rest);
                    Ok((ok, rest.to_string(), None))
                }
                Claim::Det => {
                    let ok = State::is_nonzero_constant(&rest) && hits > 0;
                    Ok((ok, rest.to_string(), None))
                }
                Claim::Factor(text) if symbolic => {
                    let fac = parse_poly(&f, text)?;
                    let (cof, power) = rest.strip_factor(&fac);
                    if power == 0 || !state.only_params(&cof) {
                        return Ok((false, rest.to_string(), Some(format!("expected ({fac}) times parameters"))));
                    }
                    let set = mode.set();
                    let value = fac.eval(&|v| {
                        PARAMS.iter().find(|&&p| Var::param(p) == v).map(|&p| f.from_i64(param_value(set, p)))
                    })?;
                    let note = f.is_zero(&value).then(|| format!("({fac}) vanishes at parameters {set}"));
                    Ok((note.is_none(), rest.to_string(), note))
                }
                Claim::Factor(_) => {
                    let ok = State::is_nonzero_constant(&rest);
                    Ok((ok, rest.to_string(), (!ok).then(|| "no contradiction at these parameters".to_string())))
                }
                Claim::Upper => unreachable!(),
            }
        }
    }
}

fn claim_text(eq: Option<Equation>, claim: &Claim) -> String {
    let body = match claim {
        Claim::Unit => "unit".to_string(),
        Claim::Det => "det".to_string(),
        Claim::Factor(t) => format!("factor {t}"),
        Claim::Upper => "upper".to_string(),
    };
    match eq {
        Some(e) => format!("{e} {body}"),
        None => body,
    }
}

/// Final state of one branch, kept for sampling.
#[derive(Clone, Debug)]
pub struct Terminal<F: Field> {
    pub label: String,
    pub outcome: BranchOutcome,
    pub state: State<F>,
}

/// Replays the script; returns the outcome and each branch's final state.
pub fn replay<F: Field>(script: &CaseScript, field: &F, mode: ParamMode<'_>) -> Result<(CaseOutcome, Vec<Terminal<F>>)> {
    let mut state = State::new(field, script.j, script.k, mode)?;
    let mut log = Vec::new();
    let mut terminals = Vec::new();
    let fail = |label: &str, claim: String, msg: String| BranchOutcome {
        label: label.to_string(),
        claim,
        residual: String::new(),
        holds: false,
        note: Some(msg),
    };
    for step in &script.steps {
        if let Err(msg) = apply_step(&mut state, step, mode, None, &mut log)? {
            let out = fail("main", "step".into(), msg);
            let outcome = CaseOutcome { id: script.id(), log, branches: vec![out.clone()] };
            terminals.push(Terminal { label: "main".into(), outcome: out, state });
            return Ok((outcome, terminals));
        }
    }
    let mut branches = Vec::new();
    match &script.ending {
        Ending::Conclude { eq, claim } => {
            let (holds, residual, note) = check_claim(&state, *eq, claim, mode)?;
            let out = BranchOutcome { label: "main".into(), claim: claim_text(*eq, claim), residual, holds, note };
            branches.push(out.clone());
            terminals.push(Terminal { label: "main".into(), outcome: out, state });
        }
        Ending::Split { eq, factors, branches: bs } => {
            let polys: Vec<MultiPoly<F>> = factors
                .iter()
                .map(|t| rhs_polys(field, &Rhs { num: t.clone(), den: None }, mode).map(|p| p.0))
                .collect::<Result<_>>()?;
            let e = state.equation(*eq).clone();
            let (mut rest, _) = state.strip(&e, &polys, true);
            let mut split_ok = !e.is_zero();
            for p in &polys {
                let (r, c) = rest.strip_factor(p);
                split_ok &= c > 0;
                rest = r;
            }
            split_ok &= State::is_nonzero_constant(&rest);
            if !split_ok {
                let out = fail("split", format!("{eq} split"), format!("{eq} is not a product of the listed factors; cofactor {rest}"));
                branches.push(out.clone());
                terminals.push(Terminal { label: "split".into(), outcome: out, state });
                return Ok((CaseOutcome { id: script.id(), log, branches }, terminals));
            }
            log.push(format!("{eq} splits into {}", factors.join(" ; ")));
            for (b, fac) in bs.iter().zip(&polys) {
                let mut st = state.clone();
                let mut blog = Vec::new();
                let mut failed = None;
                for (i, step) in b.steps.iter().enumerate() {
                    let factor = (i == 0).then_some(fac);
                    if let Err(msg) = apply_step(&mut st, step, mode, factor, &mut blog)? {
                        failed = Some(msg);
                        break;
                    }
                }
                log.extend(blog.into_iter().map(|l| format!("[{}] {l}", b.label)));
                let out = match failed {
                    Some(msg) => fail(&b.label, claim_text(b.eq, &b.claim), msg),
                    None => {
                        let (holds, residual, note) = check_claim(&st, b.eq, &b.claim, mode)?;
                        BranchOutcome { label: b.label.clone(), claim: claim_text(b.eq, &b.claim), residual, holds, note }
                    }
                };
                branches.push(out.clone());
                terminals.push(Terminal { label: b.label.clone(), outcome: out, state: st });
            }
        }
    }
    Ok((CaseOutcome { id: script.id(), log, branches }, terminals))
}

/// Small search for a solution family of the remaining equations: each
/// step either solves the first nonzero equation for a variable in which
/// it is linear, or pins a variable to a small constant. Returns false when
/// nothing is found within the depth and node budget.
pub fn complete<F: Field>(state: &mut State<F>) -> bool {
    let mut budget = 2000usize;
    match search(state.clone(), 6, &mut budget) {
        Some(found) => {
            *state = found;
            true
        }
        None => false,
    }
}

fn search<F: Field>(state: State<F>, depth: usize, budget: &mut usize) -> Option<State<F>> {
    if !state.vanished.is_empty() || *budget == 0 {
        return None;
    }
    *budget -= 1;
    let pending: Vec<MultiPoly<F>> =
        state.eqs.iter().filter(|(_, e)| !e.is_zero()).map(|(_, e)| state.strip(e, &[], false).0).collect();
    let Some(e) = pending.first() else { return Some(state) };
    if depth == 0 || pending.iter().any(|p| p.is_constant()) {
        return None;
    }
    let f = state.field().clone();
    let vars: Vec<Var> = e.vars().into_iter().filter(|v| script_var(&v.to_string()).is_some()).collect();
    let one = MultiPoly::one(&f);
    for &v in &vars {
        if e.degree_in(v) != 1 {
            continue;
        }
        let p1 = e.partial_derivative(v);
        let p0 = &e.clone() - &(&p1 * &MultiPoly::var(&f, v));
        let mut next = state.clone();
        match (-&p0).exact_div(&p1) {
            Some(q) => next.substitute(v, &q, &one),
            None => next.substitute(v, &-&p0, &p1),
        }
        if let Some(done) = search(next, depth - 1, budget) {
            return Some(done);
        }
    }
    for &v in &vars {
        for c in [0, 1, -1, 2, -2] {
            let mut next = state.clone();
            next.substitute(v, &MultiPoly::from_i64(&f, c), &one);
            if let Some(done) = search(next, depth - 1, budget) {
                return Some(done);
            }
        }
    }
    None
}
