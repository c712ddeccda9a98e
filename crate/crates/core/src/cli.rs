//! Check dispatch behind the command line.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{usage, Error, Result};
use crate::field::{Field, FieldSpec};
use crate::invariant::{
    build_generators, build_hsop, count_msog, g1, transcendence_degree, GeneratorSet, HsopTarget, InvariantExpr,
    ParamSet,
};
use crate::matrix::{random_strict_upper, word_product, NumericMatrix};
use crate::nullcone::{
    hunt_control, jacobian_independence, jacobian_ranks, nullcone_vanishing, planted_dependence, run_case_scripts,
    verify_lemma1_families, verify_lemma2, verify_rank1_identity, verify_teranishi,
};
use crate::report::{derive_seed, ReportItem, Status, VerificationReport};
use crate::rewrite::{NilCombination, Rewriter};
use crate::span::{is_decomposable, verify_generation, verify_minimality};
use crate::with_field;
use crate::word::Word;

/// Known counts of minimal generators for `d = 1..6`.
pub const MSOG_TABLE: [u128; 6] = [3, 11, 48, 189, 607, 1635];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Generators,
    Generation,
    Minimality,
    HsopIndependence,
    HsopCases,
    Nullcone,
    RewriteSuite,
    Counts,
    Teranishi,
    Lemma2Identities,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::Generators,
        Check::Generation,
        Check::Minimality,
        Check::HsopIndependence,
        Check::HsopCases,
        Check::Nullcone,
        Check::RewriteSuite,
        Check::Counts,
        Check::Teranishi,
        Check::Lemma2Identities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Generators => "generators",
            Check::Generation => "generation",
            Check::Minimality => "minimality",
            Check::HsopIndependence => "hsop-independence",
            Check::HsopCases => "hsop-cases",
            Check::Nullcone => "nullcone",
            Check::RewriteSuite => "rewrite-suite",
            Check::Counts => "counts",
            Check::Teranishi => "teranishi",
            Check::Lemma2Identities => "lemma2-identities",
        }
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::Usage(format!("unknown check '{s}'")))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything that determines a run. Equal configs give equal reports up to
/// the timing field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub field: FieldSpec,
    pub seed: u64,
    pub trials: Option<u64>,
    pub bound: Option<usize>,
    pub params: Option<ParamSet>,
}

impl RunConfig {
    pub fn new(field: FieldSpec) -> Self {
        RunConfig { field, seed: 0, trials: None, bound: None, params: None }
    }

    /// `--char` and `--ext`: `0` is the surrogate prime, `Q` the exact
    /// rationals; 2 and 3 default to `GF(2^16)` and `GF(3^10)`.
    pub fn field_from_args(char_sel: &str, ext: Option<u32>) -> Result<FieldSpec> {
        let sel = char_sel.trim();
        if sel.eq_ignore_ascii_case("q") {
            return match ext {
                None | Some(1) => Ok(FieldSpec::rationals()),
                Some(_) => usage("the rationals have no extensions"),
            };
        }
        let p: u64 = sel.parse().map_err(|_| Error::Usage(format!("bad characteristic '{sel}'")))?;
        match (p, ext) {
            (0, None | Some(1)) => Ok(FieldSpec::surrogate()),
            (0, Some(_)) => usage("characteristic 0 has no extensions"),
            (p, None) => FieldSpec::sampling_default(p),
            (p, Some(k)) => FieldSpec::extension(p, k),
        }
    }

    pub fn params(&self) -> ParamSet {
        self.params.clone().unwrap_or_else(|| ParamSet::default_for(self.field.effective_characteristic()))
    }

    fn trials_or(&self, default: u64) -> usize {
        self.trials.unwrap_or(default) as usize
    }

    /// Command line reproducing this run.
    pub fn command_line(&self, check: Check) -> String {
        let sel = if self.field.is_rationals() {
            "Q".to_string()
        } else {
            self.field.effective_characteristic().to_string()
        };
        let mut s = format!("trinv {check} --char {sel}");
        if self.field.extension_degree > 1 {
            s.push_str(&format!(" --ext {}", self.field.extension_degree));
        }
        s.push_str(&format!(" --seed {}", self.seed));
        if let Some(t) = self.trials {
            s.push_str(&format!(" --trials {t}"));
        }
        if let Some(b) = self.bound {
            s.push_str(&format!(" --bound {b}"));
        }
        if let Some(p) = &self.params {
            s.push_str(&format!(" --params {p}"));
        }
        s
    }
}

/// Runs one check and fills in timing and, on failure, a reproducer.
pub fn run_check(check: Check, cfg: &RunConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = with_field!(cfg.field, |f| dispatch(&f, check, cfg))?;
    report.check = check.name().to_string();
    report.field = cfg.field.to_string();
    report.seed = cfg.seed;
    if report.status == Status::Fail {
        let item = report.failing_ids().first().map(|s| s.to_string()).unwrap_or_default();
        report.reproducer = Some(format!("{} # item {item}", cfg.command_line(check)));
    }
    report.timing_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}

fn dispatch<F: Field>(f: &F, check: Check, cfg: &RunConfig) -> Result<VerificationReport> {
    let seed = cfg.seed;
    match check {
        Check::Generators => Ok(generators_report(f)),
        Check::Counts => counts_report(f, cfg),
        Check::Generation => generation_report(f, cfg),
        Check::Minimality => minimality_report(f, cfg),
        Check::HsopIndependence => independence_report(f, cfg),
        Check::HsopCases => run_case_scripts(f, &cfg.params()),
        Check::Nullcone => nullcone_report(f, cfg),
        Check::RewriteSuite => rewrite_suite(f, cfg.trials_or(10_000), seed),
        Check::Teranishi => verify_teranishi(f),
        Check::Lemma2Identities => {
            let trials = cfg.trials_or(500);
            let mut r = verify_lemma2(f, trials, seed)?;
            r.absorb("rank1", verify_rank1_identity(f, trials, seed)?);
            r.absorb("lemma1", verify_lemma1_families(f, trials, seed)?);
            r.trials = trials as u64;
            Ok(r)
        }
    }
}

fn generators_report<F: Field>(f: &F) -> VerificationReport {
    let mut r = VerificationReport::new("generators", &f.spec());
    let g = build_generators(f);
    let expected = if f.characteristic() == 3 { 58 } else { 48 };
    r.push(
        ReportItem::new(g.label.clone(), Status::from_bool(g.len() == expected))
            .with("cardinality", g.len())
            .with("expected", expected)
            .with("elements", g.elements.iter().map(|e| e.to_string()).collect::<Vec<_>>()),
    );
    r
}

fn counts_report<F: Field>(f: &F, cfg: &RunConfig) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("counts", &f.spec());
    for (i, &want) in MSOG_TABLE.iter().enumerate() {
        let d = i as u64 + 1;
        let got = count_msog(d)?;
        r.push(ReportItem::new(format!("M{d}"), Status::from_bool(got == want)).with("value", got).with("expected", want));
    }
    for target in [HsopTarget::R33, HsopTarget::R32, HsopTarget::R42] {
        let set = build_hsop(target, &cfg.params(), f)?;
        let (n, d) = target.shape();
        let want = transcendence_degree(n, d);
        r.push(
            ReportItem::new(set.label.clone(), Status::from_bool(set.len() == want))
                .with("cardinality", set.len())
                .with("transcendence_degree", want),
        );
    }
    Ok(r)
}

/// Degree bound for the generation check: 6, or 8 in characteristic 3.
pub fn default_bound(characteristic: u64) -> usize {
    if characteristic == 3 {
        8
    } else {
        6
    }
}

const START_SAMPLES: usize = 256;

/// Generation of `set` up to `bound`, over three derived seeds.
pub fn generation_of<F: Field>(f: &F, set: &GeneratorSet<F>, bound: usize, seed: u64) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("generation", &f.spec());
    let seeds: Vec<u64> = (0..3).map(|i| derive_seed(seed, &format!("generation/{}/{i}", set.label))).collect();
    let out = verify_generation(f, set.n, set.d, &set.elements, bound, &seeds, START_SAMPLES)?;
    r.seeds = seeds;
    r.trials = 3;
    for row in &out.rows {
        r.push(
            ReportItem::new(format!("{:?}", row.m), Status::from_bool(row.generated == row.full))
                .with("full", row.full)
                .with("generated", row.generated),
        );
    }
    r.push(
        ReportItem::new("seed-consistency", Status::from_bool(out.consistent))
            .with("samples", &out.samples)
            .with("set", &set.label)
            .with("bound", bound),
    );
    Ok(r)
}

fn generation_report<F: Field>(f: &F, cfg: &RunConfig) -> Result<VerificationReport> {
    let g = build_generators(f);
    let bound = cfg.bound.unwrap_or_else(|| default_bound(f.characteristic()));
    generation_of(f, &g, bound, cfg.seed)
}

/// The cyclic pair `tr(X1^2 X2^2 X3^2)`, `tr(X1^2 X3^2 X2^2)` and the
/// relation expressing `tr(X1^2 X2 X3^2 X2)` through it.
pub fn characteristic_split<F: Field>(f: &F, seed: u64) -> Result<(bool, bool)> {
    let tr = |s: &str| InvariantExpr::tr_text(f, s);
    let pair = [tr("x1^2 x2^2 x3^2")?, tr("x1^2 x3^2 x2^2")?];
    let rows = verify_minimality(f, 3, 3, &pair, derive_seed(seed, "minimality/pair"), START_SAMPLES)?;
    let independent = rows.iter().all(|r| r.independent());
    let relation = tr("x1^2 x2 x3^2 x2")?.add(&pair[0]).add(&pair[1]);
    let holds = is_decomposable(f, 3, 3, &relation, derive_seed(seed, "minimality/relation"), START_SAMPLES)?;
    Ok((independent, holds))
}

fn minimality_report<F: Field>(f: &F, cfg: &RunConfig) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("minimality", &f.spec());
    let g = build_generators(f);
    let s = derive_seed(cfg.seed, "minimality");
    r.seeds.push(s);
    for row in verify_minimality(f, 3, 3, &g.elements, s, START_SAMPLES)? {
        r.push(
            ReportItem::new(format!("{:?}", row.m), Status::from_bool(row.independent()))
                .with("count", row.count)
                .with("decomposable", row.decomposable)
                .with("combined", row.combined),
        );
    }
    let p3 = f.characteristic() == 3;
    let (independent, relation) = characteristic_split(f, cfg.seed)?;
    r.push(ReportItem::new("pair-independence", Status::from_bool(independent == p3)).with("independent", independent));
    if !p3 {
        r.push(ReportItem::new("pair-relation", Status::from_bool(relation)).with("decomposable", relation));
    }
    Ok(r)
}

fn independence_report<F: Field>(f: &F, cfg: &RunConfig) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("hsop-independence", &f.spec());
    let trials = cfg.trials_or(10);
    r.trials = trials as u64;
    for target in [HsopTarget::R33, HsopTarget::R32, HsopTarget::R42] {
        let set = build_hsop(target, &cfg.params(), f)?;
        let sub = jacobian_independence(f, &set, trials, cfg.seed)?;
        r.absorb("jacobian", sub);
    }
    let planted = planted_dependence(f, &cfg.params())?;
    let s = derive_seed(cfg.seed, "jacobian/planted");
    r.seeds.push(s);
    let (ranks, full) = jacobian_ranks(f, &planted, 100, s, false)?;
    r.push(
        ReportItem::new("planted-control", Status::from_bool(!full))
            .with("points", ranks.len())
            .with("max_rank", ranks.iter().max()),
    );
    Ok(r)
}

/// Parameters violating the key-sum condition with `beta1 beta2 = -1`, which
/// make the case-(2,3) branch solvable; none exist in characteristic 2.
pub fn control_params(characteristic: u64) -> Option<ParamSet> {
    (characteristic != 2).then(|| ParamSet::new(1, 2, 1, -1, 1))
}

fn nullcone_report<F: Field>(f: &F, cfg: &RunConfig) -> Result<VerificationReport> {
    let params = cfg.params();
    let trials = cfg.trials_or(1000);
    let mut r = nullcone_vanishing(f, &params, trials, 10 * trials, cfg.seed)?;
    if let Some(bad) = control_params(f.characteristic()) {
        let s = derive_seed(cfg.seed, "nullcone/control");
        r.seeds.push(s);
        let summary = hunt_control(f, &bad, 2000, s)?;
        r.push(
            ReportItem::new("hunt-control", Status::from_bool(summary.violations > 0))
                .with("params", bad.to_string())
                .with("summary", &summary),
        );
    }
    Ok(r)
}

/// Canonical form of one word, printed with coefficients in the field.
pub fn rewrite_word(text: &str, field: FieldSpec) -> Result<String> {
    let w = Word::parse(text)?;
    let spec = if field.characteristic == crate::field::SURROGATE_PRIME { FieldSpec::rationals() } else { field };
    with_field!(spec, |f| {
        let c = Rewriter::new(f.characteristic()).canonicalize(&NilCombination::word(&f, w))?;
        Ok(c.to_string())
    })
}

fn eval_combination<F: Field>(f: &F, c: &NilCombination<F>, tuple: &[NumericMatrix<F>]) -> Result<NumericMatrix<F>> {
    let mut acc = NumericMatrix::<F>::zero(f, 3);
    for (w, a) in c.terms() {
        acc = acc.add(f, &word_product(f, w.letters(), tuple)?.scale(f, a));
    }
    Ok(acc)
}

/// Rewriting checks: exhaustive termination up to degree 8, the strictly
/// upper triangular representation, the named rules, and the trace bridge.
pub fn rewrite_suite<F: Field>(f: &F, trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("rewrite-suite", &f.spec());
    r.trials = trials as u64;
    let p = f.characteristic();
    let mut rw = Rewriter::new(p);
    let mut count = 0usize;
    let mut bad = None;
    for deg in 1..=8u32 {
        for code in 0..3usize.pow(deg) {
            let mut c = code;
            let letters: Vec<u8> = (0..deg)
                .map(|_| {
                    let l = (c % 3) as u8 + 1;
                    c /= 3;
                    l
                })
                .collect();
            let w = Word::from_letters(&letters);
            let out = rw.canonicalize(&NilCombination::word(f, w.clone()))?;
            count += 1;
            let wrong = out.terms().find(|(v, _)| !v.is_canonical() || v.mdeg(3) != w.mdeg(3)).map(|(v, _)| format!("{w} -> {v}"));
            if bad.is_none() {
                bad = wrong;
            }
        }
    }
    r.push(ReportItem::new("exhaustive-degree-8", Status::from_bool(bad.is_none())).with("words", count).with("failure", bad));

    let s = derive_seed(seed, "rewrite/representation");
    r.seeds.push(s);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let mut bad = None;
    for t in 0..trials {
        let len = 1 + t % 5;
        let letters: Vec<u8> = (0..len).map(|_| rand::Rng::gen_range(&mut rng, 1..=3u8)).collect();
        let w = Word::from_letters(&letters);
        let canon = rw.canonicalize(&NilCombination::word(f, w.clone()))?;
        let tuple: Vec<NumericMatrix<F>> = (0..3).map(|_| random_strict_upper(f, 3, &mut rng)).collect();
        if eval_combination(f, &NilCombination::word(f, w.clone()), &tuple)? != eval_combination(f, &canon, &tuple)? {
            bad = Some(format!("trial {t}: {w}"));
            break;
        }
    }
    r.push(ReportItem::new("upper-representation", Status::from_bool(bad.is_none())).with("trials", trials).with("failure", bad));

    let canon = |rw: &mut Rewriter, s: &str| -> Result<NilCombination<F>> {
        rw.canonicalize(&NilCombination::word(f, Word::parse(s)?))
    };
    let sign = canon(&mut rw, "x2^2 x1^2 x2 x1")?.add(&canon(&mut rw, "x1^2 x2^2 x1 x2")?);
    r.push(ReportItem::new("sign-identity", Status::from_bool(sign.is_empty())).with("sum", sign.to_string()));
    let ann = canon(&mut rw, "x1^2 x2 x3^2")?;
    r.push(
        ReportItem::new("square-annihilation", Status::from_bool(ann.is_empty() == (p != 3)))
            .with("x1^2 x2 x3^2", ann.to_string()),
    );
    let surv = canon(&mut rw, "x1^2 x2^2 x1")?;
    r.push(ReportItem::new("survivor", Status::from_bool(surv.to_string() == "x1^2 x2^2 x1")).with("form", surv.to_string()));
    let e = InvariantExpr::tr_text(f, "x1^2 x2^2 x1 x3")?;
    let dec = is_decomposable(f, 3, 3, &e, derive_seed(seed, "rewrite/survivor"), START_SAMPLES)?;
    r.push(ReportItem::new("survivor-indecomposable", Status::from_bool(!dec)).with("decomposable", dec));

    // w = canon(w) in the nil algebra implies tr(w x3) = tr(canon(w) x3)
    // modulo decomposables.
    let mut bad = Vec::new();
    let mut checked = 0usize;
    for deg in 2..=4u32 {
        for code in 0..2usize.pow(deg) {
            let letters: Vec<u8> = (0..deg).map(|i| ((code >> i) & 1) as u8 + 1).collect();
            let w = Word::from_letters(&letters);
            let c = rw.canonicalize(&NilCombination::word(f, w.clone()))?;
            let lhs = InvariantExpr::trace_times_letter(&NilCombination::word(f, w.clone()), 3)?;
            let diff = lhs.sub(&InvariantExpr::trace_times_letter(&c, 3)?);
            checked += 1;
            if !diff.is_zero() && !is_decomposable(f, 3, 3, &diff, derive_seed(seed, &format!("bridge/{w}")), 64)? {
                bad.push(w.to_string());
            }
        }
    }
    r.push(ReportItem::new("trace-bridge", Status::from_bool(bad.is_empty())).with("words", checked).with("failures", bad));
    Ok(r)
}

/// The negative control of the generation check: `G1` alone.
pub fn generation_control<F: Field>(f: &F, bound: usize, seed: u64) -> Result<VerificationReport> {
    generation_of(f, &g1(f), bound, seed)
}
