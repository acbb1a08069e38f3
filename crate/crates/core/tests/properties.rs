use proptest::prelude::*;

use weilforms::arith::{divisors, exact_divisors, gcd, int, rat, Rational};
use weilforms::discform::DiscForm;
use weilforms::divisors::{cusp_classes, fricke_image, heegner_degrees, CuspDivisor};
use weilforms::fracq::{generalized_pow, series_mul, substitute_power, FracSeries};
use weilforms::heckeops::{hecke_tp, level_u, level_v};
use weilforms::vvforms::{
    apply_aut, basis_m_half, decompose, random_supported, Rep, VVExpansion, Weight,
};

fn series() -> impl Strategy<Value = FracSeries> {
    (
        prop::sample::select(vec![1i64, 2, 3, 4, 6, 8, 24]),
        prop::collection::vec((-6i64..40, -5i64..=5, 1i64..=4), 0..10),
        1i64..6,
        0i64..24,
    )
        .prop_map(|(denom, terms, t_int, t_frac)| {
            let trunc = int(t_int) + rat(t_frac, 24);
            FracSeries::new(
                denom,
                terms.into_iter().map(|(e, a, b)| (e, rat(a, b))),
                trunc,
            )
        })
}

fn small_rat() -> impl Strategy<Value = Rational> {
    (-7i64..=7, 1i64..=5).prop_map(|(a, b)| rat(a, b))
}

fn shape() -> impl Strategy<Value = (Weight, Rep)> {
    (prop::sample::select(vec![-1i64, 1, 3, 5]), any::<bool>()).prop_map(|(w, rho)| {
        (
            Weight::from_twice(w).unwrap(),
            if rho { Rep::Rho } else { Rep::Dual },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_multiplication_is_commutative(a in series(), b in series()) {
        prop_assert_eq!(series_mul(&a, &b), series_mul(&b, &a));
    }

    #[test]
    fn series_multiplication_is_associative(a in series(), b in series(), c in series()) {
        let l = series_mul(&series_mul(&a, &b), &c);
        let r = series_mul(&a, &series_mul(&b, &c));
        prop_assert!(l.agrees_with(&r));
    }

    #[test]
    fn series_multiplication_distributes(a in series(), b in series(), c in series()) {
        let l = series_mul(&a, &(&b + &c));
        let r = &series_mul(&a, &b) + &series_mul(&a, &c);
        prop_assert!(l.agrees_with(&r));
    }

    #[test]
    fn series_one_is_neutral(a in series()) {
        let one = FracSeries::one(a.trunc() + int(100));
        prop_assert_eq!(series_mul(&a, &one), a);
    }

    #[test]
    fn substitution_is_multiplicative(a in series(), b in series(), d in 1i64..5) {
        let l = substitute_power(&series_mul(&a, &b), d);
        let r = series_mul(&substitute_power(&a, d), &substitute_power(&b, d));
        prop_assert_eq!(l, r);
    }

    #[test]
    fn generalized_powers_add(n in 1i64..5, e1 in small_rat(), e2 in small_rat(), p in 1i64..20) {
        let prec = int(p);
        let l = series_mul(&generalized_pow(n, &e1, &prec), &generalized_pow(n, &e2, &prec));
        let r = generalized_pow(n, &(&e1 + &e2), &prec);
        prop_assert!(l.agrees_with(&r));
    }

    #[test]
    fn atkin_lehner_group_law(n in 1i64..200, i in 0usize..64, j in 0usize..64, g in 0i64..400) {
        let d = DiscForm::new(n).unwrap();
        let ex = exact_divisors(n);
        let (c1, c2) = (ex[i % ex.len()], ex[j % ex.len()]);
        let h = gcd(c1, c2);
        let c12 = c1 * c2 / (h * h);
        let g = d.reduce(g);
        let composed = d.atkin_lehner(c1, d.atkin_lehner(c2, g).unwrap()).unwrap();
        prop_assert_eq!(composed, d.atkin_lehner(c12, g).unwrap());
    }

    #[test]
    fn apply_aut_is_an_involution(n in 1i64..40, i in 0usize..16, seed in any::<u64>(), (w, rep) in shape()) {
        let f = random_supported(n, w, rep, seed, 20).unwrap();
        let ex = exact_divisors(n);
        let c = ex[i % ex.len()];
        let g = apply_aut(&f, c).unwrap();
        g.check_invariants().unwrap();
        prop_assert_eq!(apply_aut(&g, c).unwrap(), f);
    }

    #[test]
    fn operators_are_linear(n in 1i64..12, s1 in any::<u64>(), s2 in any::<u64>(), x in small_rat(), m in 1i64..5, (w, rep) in shape()) {
        let f = random_supported(n, w, rep, s1, 60).unwrap();
        let g = random_supported(n, w, rep, s2, 60).unwrap();
        let comb = f.add(&g.scale(&x)).unwrap();
        type Op = Box<dyn Fn(&VVExpansion) -> VVExpansion>;
        let ops: Vec<Op> = vec![
            Box::new(move |h| level_u(h, m).unwrap()),
            Box::new(move |h| level_v(h, m).unwrap()),
        ];
        for op in &ops {
            prop_assert_eq!(op(&comb), op(&f).add(&op(&g).scale(&x)).unwrap());
        }
        if gcd(3, 2 * n) == 1 {
            let t = |h: &VVExpansion| hecke_tp(h, 3).unwrap();
            prop_assert_eq!(t(&comb), t(&f).add(&t(&g).scale(&x)).unwrap());
        }
    }

    #[test]
    fn decompose_round_trips(n in 1i64..40, xs in prop::collection::vec(small_rat(), 8)) {
        let basis = basis_m_half(n, 4 * n + 8).unwrap();
        let terms: Vec<(Rational, &VVExpansion)> = basis
            .iter()
            .zip(xs.iter().cycle())
            .map(|(b, x)| (x.clone(), &b.form))
            .collect();
        let f = VVExpansion::linear_combination(&terms).unwrap();
        let coords = decompose(&f, &basis).unwrap();
        let expected: Vec<Rational> = terms.into_iter().map(|(x, _)| x).collect();
        prop_assert_eq!(coords, expected);
    }

    #[test]
    fn fricke_preserves_degree(n in 1i64..120, vals in prop::collection::vec(small_rat(), 16)) {
        let orders: Vec<(i64, Rational)> = divisors(n).into_iter().zip(vals).collect();
        let d = CuspDivisor::new(n, orders).unwrap();
        let w = fricke_image(&d);
        prop_assert_eq!(w.degree(), d.degree());
        prop_assert_eq!(fricke_image(&w), d.clone());
        prop_assert_eq!(cusp_classes(n).unwrap().len(), divisors(n).len());
    }

    #[test]
    fn heegner_degrees_are_symmetric(n in 1i64..30, m in 1i64..150) {
        let degs = heegner_degrees(n, -m).unwrap();
        for (g, deg) in &degs {
            let partner = (2 * n - g) % (2 * n);
            prop_assert_eq!(Some(deg), degs.get(&partner));
            prop_assert!(*deg > Rational::from_integer(0.into()));
        }
    }
}
