use std::sync::Arc;

use formalpatch_core::poly::parse_poly;
use formalpatch_core::{Field, FreeVec, Monomial, Poly, PolyRing, SubmoduleBasis};
use proptest::prelude::*;

fn ring() -> Arc<PolyRing> {
    PolyRing::parse_new(Field::Rational, &["x", "y", "z"], None, &[]).unwrap()
}

prop_compose! {
    fn poly(max_deg: u32)(terms in prop::collection::vec(((0..=max_deg, 0..=max_deg, 0..=max_deg), -4i64..=4), 0..4)) -> Poly {
        Poly::from_terms(terms.into_iter().filter(|((a, b, c), _)| a + b + c <= max_deg).map(|((a, b, c), k)| {
            (Monomial::from_exponents(&[a, b, c]), Field::Rational.from_i64(k))
        }))
    }
}

fn ideal(r: &Arc<PolyRing>, gens: &[Poly]) -> SubmoduleBasis {
    SubmoduleBasis::ideal(r.clone(), gens).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn text_round_trips(p in poly(3)) {
        let r = ring();
        let text = r.text(&p);
        prop_assert_eq!(parse_poly(&text, r.names(), Field::Rational).unwrap(), p);
    }

    #[test]
    fn multiplication_distributes(a in poly(2), b in poly(2), c in poly(2)) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn generators_and_combinations_are_members(gs in prop::collection::vec(poly(2), 1..3), k in poly(1)) {
        let r = ring();
        let i = ideal(&r, &gs);
        for g in &gs {
            prop_assert!(i.contains_poly(g));
        }
        let combo = gs.iter().fold(Poly::zero(), |acc, g| &acc + &(g * &k));
        prop_assert!(i.contains_poly(&combo));
        let again = ideal(&r, &i.basis().iter().map(|v| v.coords()[0].clone()).collect::<Vec<_>>());
        prop_assert_eq!(again.texts(), i.texts());
    }

    #[test]
    fn normal_form_is_idempotent(gs in prop::collection::vec(poly(2), 1..3), p in poly(3)) {
        let r = ring();
        let i = ideal(&r, &gs);
        let v = FreeVec::new(vec![p.clone()]);
        let nf = i.normal_form(&v);
        prop_assert_eq!(i.normal_form(&nf), nf.clone());
        prop_assert!(i.contains(&v.sub(&nf)));
    }

    #[test]
    fn intersection_lies_in_both(a in poly(2), b in poly(2)) {
        let r = ring();
        let (ia, ib) = (ideal(&r, std::slice::from_ref(&a)), ideal(&r, std::slice::from_ref(&b)));
        let both = ia.intersect(&ib).unwrap();
        prop_assert!(ia.contains_all(&both) && ib.contains_all(&both));
        prop_assert!(both.contains_poly(&(&a * &b)));
    }

    #[test]
    fn colon_times_divisor_lies_inside(gs in prop::collection::vec(poly(2), 1..3), f in poly(1)) {
        prop_assume!(!f.is_zero());
        let r = ring();
        let i = ideal(&r, &gs);
        let c = i.quotient_poly(&f).unwrap();
        prop_assert!(c.contains_all(&i));
        for g in c.generators() {
            prop_assert!(i.contains_poly(&(&g.coords()[0] * &f)));
        }
    }
}
