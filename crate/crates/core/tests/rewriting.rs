use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trinv::field::{ExtField, Field, PrimeField};
use trinv::invariant::InvariantExpr;
use trinv::matrix::{random_strict_upper, word_product, Matrix};
use trinv::rewrite::{NilCombination, Rewriter};
use trinv::span::is_decomposable;
use trinv::word::Word;

fn words(deg: u32, letters: u8) -> impl Iterator<Item = Word> {
    (0..(letters as usize).pow(deg)).map(move |code| {
        let mut c = code;
        let v: Vec<u8> = (0..deg)
            .map(|_| {
                let l = (c % letters as usize) as u8 + 1;
                c /= letters as usize;
                l
            })
            .collect();
        Word::from_letters(&v)
    })
}

#[test]
fn terminates_on_every_word_up_to_degree_ten() {
    let f = PrimeField::surrogate();
    for p in [0u64, 2, 3] {
        let mut rw = Rewriter::new(p);
        for deg in 1..=10 {
            for w in words(deg, 3) {
                let out = rw.canonicalize(&NilCombination::word(&f, w.clone())).unwrap();
                assert!(out.terms().all(|(v, _)| v.is_canonical()), "{w}");
            }
        }
    }
}

fn bridge_holds<F: Field>(f: &F, w: &Word, seed: u64) -> bool {
    let canon = Rewriter::new(f.characteristic()).canonicalize(&NilCombination::word(f, w.clone())).unwrap();
    let lhs = InvariantExpr::trace_times_letter(&NilCombination::word(f, w.clone()), 3).unwrap();
    let diff = lhs.sub(&InvariantExpr::trace_times_letter(&canon, 3).unwrap());
    diff.is_zero() || is_decomposable(f, 3, 3, &diff, seed, 64).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_bridge_is_sound(letters in prop::collection::vec(1u8..=2, 2..=6), seed in any::<u64>()) {
        let w = Word::from_letters(&letters);
        prop_assert!(bridge_holds(&PrimeField::surrogate(), &w, seed), "{}", w);
    }

    #[test]
    fn trace_bridge_is_sound_in_char_3(letters in prop::collection::vec(1u8..=2, 2..=5), seed in any::<u64>()) {
        let w = Word::from_letters(&letters);
        prop_assert!(bridge_holds(&ExtField::new(3, 10).unwrap(), &w, seed), "{}", w);
    }

    #[test]
    fn upper_triangular_representation(letters in prop::collection::vec(1u8..=3, 1..=9), seed in any::<u64>()) {
        let f = ExtField::new(2, 16).unwrap();
        let w = Word::from_letters(&letters);
        let canon = Rewriter::new(2).canonicalize(&NilCombination::word(&f, w.clone())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tuple: Vec<_> = (0..3).map(|_| random_strict_upper(&f, 3, &mut rng)).collect();
        let mut rhs = Matrix::zero(&f, 3);
        for (v, a) in canon.terms() {
            rhs = rhs.add(&f, &word_product(&f, v.letters(), &tuple).unwrap().scale(&f, a));
        }
        prop_assert_eq!(word_product(&f, w.letters(), &tuple).unwrap(), rhs);
    }
}

#[test]
fn named_rules() {
    let f = PrimeField::surrogate();
    let c = |s: &str| Rewriter::new(0).canonicalize(&NilCombination::word(&f, Word::parse(s).unwrap())).unwrap();
    assert!(c("x2^2 x1^2 x2 x1").add(&c("x1^2 x2^2 x1 x2")).is_empty());
    assert_eq!(c("x1^2 x2^2 x1").to_string(), "x1^2 x2^2 x1");
    assert_eq!(trinv::cli::rewrite_word("x1 x2 x1", trinv::field::FieldSpec::surrogate()).unwrap(), "- x1^2 x2 - x2 x1^2");
    let e = InvariantExpr::tr_text(&f, "x1^2 x2^2 x1 x3").unwrap();
    assert!(!is_decomposable(&f, 3, 3, &e, 1, 256).unwrap());
}
