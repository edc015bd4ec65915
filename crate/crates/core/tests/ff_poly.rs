//! Field and polynomial invariants.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lform_core::{Error, Fe, Field, Poly};

const SPECS: [&str; 6] = ["2^4", "3^3", "5^2", "7", "3^4/2,2,2,1,1", "11"];

fn field_strategy() -> impl Strategy<Value = Field> {
    prop::sample::select(SPECS.to_vec()).prop_map(|s| Field::parse(s).unwrap())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(f in field_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (f.random(&mut r), f.random(&mut r), f.random(&mut r));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
        }
        prop_assert_eq!(f.pow_u(a, f.order()), a);
        prop_assert_eq!(f.frob(a, f.k()), a);
        prop_assert_eq!(f.inv_frob(f.frob(a, 1)), a);
        prop_assert_eq!(f.frob(f.add(a, b), 1), f.add(f.frob(a, 1), f.frob(b, 1)));
    }

    #[test]
    fn element_text_round_trips(f in field_strategy(), seed in any::<u64>()) {
        let a = f.random(&mut rng(seed));
        prop_assert_eq!(f.parse_elem(&f.fmt_elem(a)).unwrap(), a);
    }

    #[test]
    fn division_with_remainder(f in field_strategy(), seed in any::<u64>(), da in 0usize..8, db in 0usize..5) {
        let mut r = rng(seed);
        let a = Poly::random(&f, da, &mut r);
        let b = Poly::random_monic(&f, db, &mut r);
        let (q, rem) = a.divrem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &rem, a);
        prop_assert!(rem.deg().map_or(true, |d| d < db));
    }

    #[test]
    fn bezout_identity(f in field_strategy(), seed in any::<u64>(), da in 0usize..7, db in 0usize..7) {
        let mut r = rng(seed);
        let a = Poly::random(&f, da, &mut r);
        let b = Poly::random(&f, db, &mut r);
        prop_assume!(!a.is_zero() || !b.is_zero());
        let (g, u, v) = a.gcd_ext(&b).unwrap();
        prop_assert!(g.is_monic());
        prop_assert_eq!(&(&a * &u) + &(&b * &v), g.clone());
        prop_assert!(a.divisible_by(&g).unwrap() && b.divisible_by(&g).unwrap());
    }

    #[test]
    fn product_rule(f in field_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Poly::random(&f, 5, &mut r);
        let b = Poly::random(&f, 4, &mut r);
        prop_assert_eq!(
            (&a * &b).derivative(),
            &(&a.derivative() * &b) + &(&a * &b.derivative())
        );
    }

    #[test]
    fn roots_of_products_are_found(f in field_strategy(), seed in any::<u64>(), k in 1usize..6) {
        let mut r = rng(seed);
        let roots: Vec<Fe> = (0..k).map(|_| f.random(&mut r)).collect();
        let p = Poly::from_roots(&f, &roots);
        let found = p.roots_in_field().unwrap();
        prop_assert!(found.split);
        let mut mult = 0;
        for &(x, m) in &found.roots {
            prop_assert_eq!(roots.iter().filter(|&&y| y == x).count(), m);
            mult += m;
        }
        prop_assert_eq!(mult, k);
    }

    #[test]
    fn interpolation_recovers(f in field_strategy(), seed in any::<u64>(), d in 0usize..6) {
        let mut r = rng(seed);
        let p = Poly::random(&f, d, &mut r);
        let pts: Vec<(Fe, Fe)> = f.elements().take(d + 1).map(|x| (x, p.eval(x))).collect();
        prop_assert_eq!(Poly::interpolate(&f, &pts).unwrap(), p);
    }

    #[test]
    fn resultant_vanishes_iff_common_root(f in field_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Poly::random_monic(&f, 3, &mut r);
        let b = Poly::random_monic(&f, 2, &mut r);
        let common = !a.gcd(&b).unwrap().is_one();
        prop_assert_eq!(a.resultant(&b).unwrap().is_zero(), common);
    }

    #[test]
    fn json_round_trip(f in field_strategy(), seed in any::<u64>(), d in 0usize..6) {
        let p = Poly::random(&f, d, &mut rng(seed));
        prop_assert_eq!(Poly::from_json(&p.to_json(), None).unwrap(), p);
    }
}

#[test]
fn rejects_bad_field_specs() {
    assert!(matches!(Field::parse("4"), Err(Error::NonPrime(_))));
    assert!(matches!(Field::parse("3^2/1,1,1"), Err(Error::ReducibleModulus)));
    assert!(Field::parse("3^2/1,0,1").is_ok());
    assert!(Field::parse("x").is_err());
}

#[test]
fn crt_solves_coprime_systems() {
    let f = Field::parse("7").unwrap();
    let m1 = Poly::from_i64s(&f, &[1, 0, 1]);
    let m2 = Poly::from_i64s(&f, &[2, 1]);
    let r1 = Poly::from_i64s(&f, &[3, 1]);
    let r2 = Poly::from_i64s(&f, &[5]);
    let x = Poly::crt_solve(&f, &[(r1.clone(), m1.clone()), (r2.clone(), m2.clone())]).unwrap();
    assert!((&x - &r1).divisible_by(&m1).unwrap());
    assert!((&x - &r2).divisible_by(&m2).unwrap());
}
