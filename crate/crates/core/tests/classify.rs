//! Classification toolkit: families, pencils, searches.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lform_core::classify::search::search_space_size;
use lform_core::classify::{
    brute_search, cubic_criterion, l12_family, l15_examples, newton_toolkit, pencil_disc,
    L15Which, Normalization, PencilData, SearchConfig,
};
use lform_core::identities::random_independent;
use lform_core::lspace::{build_space, standard_space, verify_prompt};
use lform_core::{Error, Fe, Field, Poly};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pencil_disc_degree_law(seed in any::<u64>(), dp in 1usize..5, dq in 0usize..4) {
        prop_assume!(dq < dp);
        let f = Field::parse("11").unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let p = Poly::random_monic(&f, dp, &mut r);
        let q = Poly::random(&f, dq, &mut r);
        prop_assume!(q.deg() == Some(dq) && p.gcd(&q).unwrap().is_one());
        match pencil_disc(&p, &q) {
            Ok(d) => {
                prop_assert!(d.degree_ok);
                prop_assert_ne!(d.roots_check, Some(false));
            }
            // P or Q a p-th power is outside the law's hypotheses.
            Err(Error::PrecondViolation(_)) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn standard_pencils_satisfy_power_sum_laws(seed in any::<u64>()) {
        let f = Field::parse("3^3").unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let a = random_independent(&f, 2, &mut r).unwrap();
        let s = standard_space(&f, &a).unwrap();
        let pencil = PencilData::from_prompt(s.prompt()).unwrap();
        let report = newton_toolkit(&pencil, None).unwrap();
        prop_assert!(report.all_hold(), "{:?}", report.checks);
    }
}

#[test]
fn family_members_match_cubic_criterion() {
    let f = Field::parse("3^4").unwrap();
    for a in f.elements() {
        let m = l12_family(&f, a).unwrap();
        assert_eq!(cubic_criterion(&m.q1, &m.q2).unwrap(), m.criterion);
        // The cubic expression is the coefficient criterion of (Q2, Q1).
        if let Ok(q) = lform_core::lspace::Prompt::new(vec![m.q2.clone(), m.q1.clone()]) {
            let holds = verify_prompt(&q).unwrap().holds;
            assert_eq!(holds, m.criterion == Poly::constant(&f, f.neg(Fe::ONE)));
        }
    }
}

#[test]
fn reference_examples_rebuild_from_prompts() {
    for w in [L15Which::F27, L15Which::F81] {
        let s = l15_examples(w, 0).unwrap();
        let rebuilt = build_space(s.space.prompt()).unwrap();
        assert_eq!(rebuilt.poles(), s.space.poles());
        assert_eq!(rebuilt.poles().len(), 20);
    }
}

#[test]
fn search_respects_space_bound() {
    let mut cfg = SearchConfig::new(Field::parse("3^3").unwrap(), 2, Normalization::None);
    cfg.max_space = 10;
    assert!(matches!(search_space_size(&cfg), Err(Error::SearchSpaceTooLarge { size, .. }) if size > 10));
    assert!(matches!(brute_search(&cfg), Err(Error::SearchSpaceTooLarge { .. })));
}

#[test]
fn parallel_search_matches_serial() {
    let f = Field::parse("2^2").unwrap();
    let serial = brute_search(&SearchConfig::new(f.clone(), 1, Normalization::None)).unwrap();
    let mut cfg = SearchConfig::new(f, 1, Normalization::None);
    cfg.jobs = 3;
    let parallel = brute_search(&cfg).unwrap();
    assert_eq!(serial.to_json(), parallel.to_json());
}

#[test]
fn normalizations_parse() {
    for n in ["none", "s1t1zero", "s3one", "biquadratic"] {
        let parsed: Normalization = n.parse().unwrap();
        assert_eq!(parsed.to_string().parse::<Normalization>().unwrap(), parsed);
    }
    assert!("bogus".parse::<Normalization>().is_err());
}
