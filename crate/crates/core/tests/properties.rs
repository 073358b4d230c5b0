use num_complex::Complex64;
use petallab::gauss::GaussRat;
use petallab::germ::{formal_log, invert_jet, PolyMapGerm, VectorFieldJet};
use petallab::poly::Poly;
use petallab::resolution::{blow_up, exact_div, overlap_identity, poly_gcd, saturate, ExactVectorField};
use petallab::sector::{principal_power, PetalParams};
use proptest::prelude::*;

type Q = Poly<GaussRat>;

fn small_poly(max_deg: u32) -> impl Strategy<Value = Q> {
    prop::collection::vec((0..=max_deg, 0..=max_deg, -3i64..=3, -1i64..=1), 1..4).prop_map(|terms| {
        Poly::from_terms(terms.into_iter().map(|(i, j, re, im)| (i, j, GaussRat::from_parts(re, 1, im, 1))))
    })
}

fn vanishing_poly() -> impl Strategy<Value = Q> {
    small_poly(3).prop_map(|p| Poly::from_terms(p.terms().filter(|&(i, j, _)| i + j >= 1).map(|(i, j, c)| (i, j, c.clone()))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gcd_divides_and_is_maximal(f in small_poly(2), g in small_poly(2), h in small_poly(2)) {
        prop_assume!(!f.is_zero() && !g.is_zero() && !h.is_zero());
        let a = &f * &g;
        let b = &f * &h;
        let d = poly_gcd(&a, &b);
        prop_assert!(exact_div(&a, &d).is_some());
        prop_assert!(exact_div(&b, &d).is_some());
        prop_assert!(exact_div(&d, &poly_gcd(&f, &f)).is_some());
    }

    #[test]
    fn saturation_reconstructs_input(p in vanishing_poly(), q in vanishing_poly(), f in small_poly(1)) {
        prop_assume!(!f.is_zero() && !p.is_zero() && !q.is_zero());
        let x = ExactVectorField::new(&p * &f, &q * &f);
        let s = saturate(&x).unwrap();
        prop_assert_eq!(&s.factor * &s.saturated.p, x.p.clone());
        prop_assert_eq!(&s.factor * &s.saturated.q, x.q.clone());
        let g = poly_gcd(&s.saturated.p, &s.saturated.q);
        prop_assert!(g.terms().all(|(i, j, _)| i == 0 && j == 0));
    }

    #[test]
    fn blow_up_charts_agree_on_overlap(p in vanishing_poly(), q in vanishing_poly()) {
        prop_assume!(!p.is_zero() || !q.is_zero());
        let z = GaussRat::zero();
        let (c1, c2) = blow_up(&ExactVectorField::new(p, q), (&z, &z));
        prop_assert!(overlap_identity(&c1, &c2));
    }

    #[test]
    fn exact_log_and_exp_are_inverse(a in -3i64..=3, b in -3i64..=3, c in -3i64..=3, d in -3i64..=3) {
        let r = GaussRat::from_int;
        let x = VectorFieldJet::new(
            Poly::from_terms([(2, 0, r(a)), (1, 1, r(b)), (0, 3, r(c))]),
            Poly::from_terms([(1, 1, r(d)), (2, 1, r(a - b))]),
            7,
        );
        let f = x.exp_map();
        let back = formal_log(&f, 7).unwrap();
        prop_assert_eq!(back.p.truncate(7), x.p.truncate(7));
        prop_assert_eq!(back.q.truncate(7), x.q.truncate(7));
    }

    #[test]
    fn inverse_jet_composes_to_identity(a in -3i64..=3, b in -3i64..=3, c in -3i64..=3) {
        let r = GaussRat::from_int;
        let f = PolyMapGerm::new(
            Poly::x() + Poly::from_terms([(2, 0, r(a)), (1, 2, r(b))]),
            Poly::y() + Poly::from_terms([(1, 1, r(c)), (0, 2, r(a))]),
        ).unwrap();
        let g = invert_jet(&f, 6).unwrap();
        let id = f.compose(&g, 6);
        prop_assert_eq!(id.fx, Poly::x());
        prop_assert_eq!(id.fy, Poly::y());
    }

    #[test]
    fn chart_inverse_recovers_chart(re in 150.0f64..400.0, im in -40.0f64..40.0, wr in 0.6f64..1.5, wa in -3.0f64..3.0) {
        let p = PetalParams::new(1, 1, Complex64::new(-0.5, 0.0), Complex64::new(-0.5, 0.0), None, 0).unwrap();
        let z = Complex64::new(re, im);
        let (x, y) = p.chart_inverse_g(z, Complex64::from_polar(wr, wa)).unwrap();
        prop_assert!((p.chart_z(x, y) - z).norm() < 1e-9 * z.norm());
    }

    #[test]
    fn principal_power_multiplies_exponents(re in 0.01f64..3.0, im in -3.0f64..3.0, s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let z = Complex64::new(re, im);
        let lhs = principal_power(z, Complex64::new(s + t, 0.0)).unwrap();
        let rhs = principal_power(z, Complex64::new(s, 0.0)).unwrap() * principal_power(z, Complex64::new(t, 0.0)).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
    }
}
