use gwloc::algebra::{
    FactoredRational, LinearForm, NilpotentSeries, Polynomial, Rational, SeriesShape,
};
use num_traits::Zero;
use proptest::prelude::*;

const N: usize = 3;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0u32..3, N), -6i64..7), 0..6)
        .prop_map(|terms| Polynomial::from_terms(N, terms.into_iter().map(|(m, c)| (m, rat(c, 1)))))
}

fn linear_form() -> impl Strategy<Value = LinearForm> {
    prop::collection::vec(-3i64..4, N)
        .prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
        .prop_map(|c| LinearForm::from_ints(&c))
}

fn homogeneous(k: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(linear_form(), k)
        .prop_map(|ls| ls.iter().fold(Polynomial::one(N), |p, l| p.mul_linear(l)))
}

/// Numerator a product of linear forms, so the value is homogeneous.
fn factored() -> impl Strategy<Value = FactoredRational> {
    (
        -5i64..6,
        1i64..5,
        (0usize..3).prop_flat_map(homogeneous),
        prop::collection::vec(linear_form(), 0..3),
    )
        .prop_map(|(n, d, num, den)| FactoredRational::new(rat(n, d), num, den).unwrap())
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-50i64..50, 1i64..20), N)
        .prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_a_ring_homomorphism(p in polynomial(), q in polynomial(), x in point()) {
        let (px, qx) = (p.eval(&x).unwrap(), q.eval(&x).unwrap());
        prop_assert_eq!((&p * &q).eval(&x).unwrap(), &px * &qx);
        prop_assert_eq!((&p + &q).eval(&x).unwrap(), px + qx);
    }

    #[test]
    fn polynomial_ring_laws(p in polynomial(), q in polynomial(), r in polynomial()) {
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        let diff = &(&p + &q) - &q;
        prop_assert!(diff.terms().all(|(_, c)| !c.is_zero()));
        prop_assert_eq!(diff, p);
    }

    #[test]
    fn equal_functions_have_equal_representations(
        f in factored(),
        extra in linear_form(),
        s in prop_oneof![Just(-2i64), Just(-1), Just(3)],
    ) {
        // multiply top and bottom by a rescaled copy of the same factor
        let scaled = extra.scale(&rat(s, 1));
        let num = f.numerator().mul_linear(&scaled);
        let mut den = f.denominator().to_vec();
        den.push(scaled);
        let g = FactoredRational::new(f.scalar().clone(), num, den).unwrap();
        prop_assert_eq!(&g, &f);
        let h = FactoredRational::from_linear(&extra);
        prop_assert_eq!(f.mul(&h).div(&h).unwrap(), f.clone());
        prop_assert_eq!(f.add(&h).sub(&h), f);
    }

    #[test]
    fn sums_do_not_depend_on_order(
        (items, shuffled) in prop::collection::vec(factored(), 1..6)
            .prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()))
    ) {
        let a = FactoredRational::sum(N, items);
        let b = FactoredRational::sum(N, shuffled.clone());
        prop_assert_eq!(&a, &b);
        let folded = shuffled.iter().fold(FactoredRational::zero(N), |acc, x| acc.add(x));
        prop_assert_eq!(a, folded);
    }

    #[test]
    fn degrees_add_under_multiplication(f in factored(), g in factored()) {
        let prod = f.mul(&g);
        match (f.degree(), g.degree()) {
            (Some(a), Some(b)) => prop_assert_eq!(prod.degree(), Some(a + b)),
            _ => prop_assert!(f.is_zero() || g.is_zero()),
        }
    }

    #[test]
    fn evaluation_agrees_with_arithmetic(f in factored(), g in factored(), x in point()) {
        let (fx, gx) = (f.evaluate(&x).unwrap(), g.evaluate(&x).unwrap());
        if let (Some(fx), Some(gx)) = (fx, gx) {
            prop_assert_eq!(f.mul(&g).evaluate(&x).unwrap(), Some(&fx * &gx));
            prop_assert_eq!(f.add(&g).evaluate(&x).unwrap(), Some(fx + gx));
        }
    }

    #[test]
    fn series_products_respect_truncation(
        bound in 0u32..4,
        a in prop::collection::vec((0usize..2, 0u32..4, factored()), 0..4),
        b in prop::collection::vec((0usize..2, 0u32..4, factored()), 0..4),
    ) {
        let shape = SeriesShape::new(2, bound).with_cap(1, 1);
        let build = |terms: &[(usize, u32, FactoredRational)]| {
            terms.iter().fold(NilpotentSeries::zero(shape.clone(), N), |acc, (s, p, c)| {
                acc.add(&NilpotentSeries::monomial(shape.clone(), *s, *p, c.clone()))
            })
        };
        let (x, y) = (build(&a), build(&b));
        let xy = x.mul(&y);
        for (m, c) in xy.terms() {
            prop_assert!(m.iter().sum::<u32>() <= bound && m[1] <= 1);
            prop_assert!(!c.is_zero());
        }
        prop_assert_eq!(&xy, &y.mul(&x));
        // coefficient of each surviving monomial is the truncated convolution
        for (m, c) in xy.terms() {
            let mut expect = FactoredRational::zero(N);
            for (p, cp) in x.terms() {
                if p.iter().zip(m.iter()).all(|(i, j)| i <= j) {
                    let q: Vec<u32> = m.iter().zip(p).map(|(j, i)| j - i).collect();
                    expect = expect.add(&cp.mul(&y.coefficient(&q)));
                }
            }
            prop_assert_eq!(c, &expect);
        }
    }
}
