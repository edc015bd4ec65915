//! Invariants of Moore determinants, logarithmic forms, spaces and the
//! characteristic-2 construction.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lform_core::cartier::{check_l_lambda_1, is_logarithmic, jc_check, DiffForm};
use lform_core::char2::{general_construct, wr_equivalence, WTuple, WrRelation};
use lform_core::identities::{random_gl, random_independent};
use lform_core::lspace::{
    audit_pole_combinatorics, build_space, change_basis, equivalence_witness, etale_pullback,
    frobenius_twist, solve_scaling, standard_space, verify_prompt, Prompt,
};
use lform_core::moore::{moore_det, moore_det_product, structural_poly};
use lform_core::{Error, Fe, Field, Poly};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn std_field() -> impl Strategy<Value = (Field, usize)> {
    prop::sample::select(vec![("2^4", 2usize), ("2^4", 3), ("3^3", 2), ("3^3", 3), ("5^2", 2)])
        .prop_map(|(s, n)| (Field::parse(s).unwrap(), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn moore_det_is_product_and_detects_dependence(seed in any::<u64>()) {
        let f = Field::parse("3^3").unwrap();
        let mut r = rng(seed);
        let a: Vec<Fe> = (0..3).map(|_| f.random(&mut r)).collect();
        let d = moore_det(&f, &a).unwrap();
        prop_assert_eq!(d, moore_det_product(&f, &a));
        // Appending an F_p-combination makes the tuple dependent.
        let mut b = a[..2].to_vec();
        b.push(f.add(a[0], f.add(a[1], a[1])));
        prop_assert!(moore_det(&f, &b).unwrap().is_zero());
    }

    #[test]
    fn structural_polynomial_is_additive(seed in any::<u64>()) {
        let f = Field::parse("2^4").unwrap();
        let mut r = rng(seed);
        let a = random_independent(&f, 2, &mut r).unwrap();
        let pv = structural_poly(&f, &a).unwrap();
        let (x, y) = (f.random(&mut r), f.random(&mut r));
        prop_assert_eq!(pv.eval(f.add(x, y)), f.add(pv.eval(x), pv.eval(y)));
        prop_assert!(pv.eval(a[0]).is_zero() && pv.eval(a[1]).is_zero());
    }

    #[test]
    fn standard_space_invariants((f, n) in std_field(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_independent(&f, n, &mut r).unwrap();
        let s = standard_space(&f, &a).unwrap();
        let p = f.p() as usize;
        prop_assert_eq!(s.poles().len(), p.pow(n as u32) - 1);
        let audit = audit_pole_combinatorics(&s).unwrap();
        prop_assert_eq!(audit.pole_count, s.poles().len());
        // Every basis form is logarithmic.
        for w in s.forms() {
            prop_assert!(is_logarithmic(w).unwrap().logarithmic);
        }
        // A change of basis gives the same pole set.
        let m = random_gl(f.p(), n, &mut r);
        let t = change_basis(&s, &m).unwrap();
        let p1: BTreeSet<Fe> = s.poles().iter().copied().collect();
        let p2: BTreeSet<Fe> = t.poles().iter().copied().collect();
        prop_assert_eq!(p1, p2);
    }

    #[test]
    fn scaling_repairs_scaled_prompts(seed in any::<u64>()) {
        let f = Field::parse("3^3").unwrap();
        let mut r = rng(seed);
        let a = random_independent(&f, 2, &mut r).unwrap();
        let s = standard_space(&f, &a).unwrap();
        let c = f.random_nonzero(&mut r);
        let q = s.prompt().scale(c).unwrap();
        let sc = solve_scaling(&q).unwrap();
        prop_assert!(verify_prompt(&sc.prompt).unwrap().holds);
        let rebuilt = build_space(&sc.prompt).unwrap();
        prop_assert_eq!(rebuilt.poles(), s.poles());
    }

    #[test]
    fn affine_images_are_equivalent(seed in any::<u64>()) {
        let f = Field::parse("5^2").unwrap();
        let mut r = rng(seed);
        let a = random_independent(&f, 2, &mut r).unwrap();
        let s = standard_space(&f, &a).unwrap();
        // Pulling back along x ↦ cx + b moves the poles affinely.
        let c = f.random_nonzero(&mut r);
        let b = f.random(&mut r);
        let t = etale_pullback(&s, &Poly::new(&f, vec![b, c])).unwrap();
        prop_assert!(equivalence_witness(&s, &t).unwrap().is_some());
    }

    #[test]
    fn twist_poles_are_pth_powers(seed in any::<u64>()) {
        let f = Field::parse("2^4").unwrap();
        let mut r = rng(seed);
        let a = random_independent(&f, 2, &mut r).unwrap();
        let s = standard_space(&f, &a).unwrap();
        let t = frobenius_twist(&s).unwrap();
        let want: BTreeSet<Fe> = s.poles().iter().map(|&x| f.frob(x, 1)).collect();
        let got: BTreeSet<Fe> = t.poles().iter().copied().collect();
        prop_assert_eq!(want, got);
    }

    #[test]
    fn char2_constructions_verify(seed in any::<u64>()) {
        let f = Field::parse("2^4").unwrap();
        let mut r = rng(seed);
        let w = loop {
            let w = vec![Poly::random(&f, 1, &mut r), Poly::random(&f, 1, &mut r)];
            if let Ok(t) = WTuple::new(w) {
                break t;
            }
        };
        let rr = Poly::random(&f, 1, &mut r);
        let c = general_construct(&w, &rr).unwrap();
        prop_assert!(verify_prompt(&c.prompt).unwrap().holds);
        // Moving the parameters along X ↦ X + b^2 gives an equivalent pair.
        let b = f.random_nonzero(&mut r);
        let s = &Poly::x(&f) + &Poly::constant(&f, f.mul(b, b));
        let w2 = w.compose(&s).unwrap();
        let r2 = &rr.compose(&s) + &Poly::constant(&f, b);
        prop_assert!(matches!(wr_equivalence(&w, &rr, &w2, &r2).unwrap(), WrRelation::Equivalent(_)));
    }
}

#[test]
fn one_dimensional_criterion() {
    let f = Field::parse("5").unwrap();
    // X^5 − X has roots F_5, and dX/(X^5 − X) is −d log of it.
    let p = Poly::from_i64s(&f, &[0, -1, 0, 0, 0, 1]);
    assert_eq!(jc_check(&p).unwrap(), Some(f.neg(Fe::ONE)));
    assert!(check_l_lambda_1(&p, 5).unwrap());
    // X^2 − 2 is irreducible over F_5, so the residues 1/(2x) are not in F_5.
    let q = Poly::from_i64s(&f, &[-2, 0, 1]);
    assert!(!check_l_lambda_1(&q, 2).unwrap());
}

#[test]
fn double_poles_are_not_logarithmic() {
    let f = Field::parse("7").unwrap();
    let den = Poly::from_roots(&f, &[Fe::ONE, Fe::ONE]);
    let w = DiffForm::reciprocal(&den).unwrap();
    let v = is_logarithmic(&w).unwrap();
    assert!(!v.logarithmic);
    assert_eq!(v.residue_route, Some(false));
}

#[test]
fn dependent_leading_coefficients_are_rejected() {
    let f = Field::parse("3^2").unwrap();
    let q1 = Poly::from_i64s(&f, &[0, 1]);
    let q2 = Poly::from_i64s(&f, &[1, 2]);
    assert!(matches!(
        Prompt::new(vec![q1, q2]),
        Err(Error::DependentLeadingCoeffs)
    ));
}

#[test]
fn invalid_w_tuples_are_rejected() {
    let f = Field::parse("2^2").unwrap();
    let x = Poly::x(&f);
    assert!(matches!(
        WTuple::new(vec![x.clone(), x]),
        Err(Error::InvalidWTuple(_))
    ));
}
