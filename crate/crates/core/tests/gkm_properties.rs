use gwloc::algebra::{FactoredRational, Polynomial, Rational};
use gwloc::gkm::{builtin, product, projective, EquivariantClass, GkmSpace, Pole};
use gwloc::graphs::enumerate_graphs;
use gwloc::localize::{
    compute_invariant, edge_factor, ComputeOptions, Insertion, InvariantRequest,
};
use proptest::prelude::*;

fn spaces() -> Vec<GkmSpace> {
    vec![
        projective(1),
        projective(2),
        projective(3),
        builtin("P1xP1").unwrap(),
        product(&projective(1), &projective(2)),
    ]
}

fn space() -> impl Strategy<Value = GkmSpace> {
    prop::sample::select(spaces())
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `base + Σ c_i · lower_i`, flagged as an inhomogeneous lift.
fn lift(base: &EquivariantClass, lower: &[(&EquivariantClass, Rational)]) -> EquivariantClass {
    let mut out = base.clone();
    for (class, c) in lower {
        for (r, l) in out.restrictions.iter_mut().zip(&class.restrictions) {
            *r = &*r + &l.scale(c);
        }
    }
    out.inhomogeneous = true;
    out
}

#[test]
fn euler_class_is_product_of_sphere_weights() {
    for s in spaces() {
        for p in 0..s.points.len() {
            let prod = s
                .spheres_through(p)
                .map(|e| s.pole_weight(e, s.pole_at(e, p).unwrap()))
                .fold(Polynomial::one(s.rank()), |acc, w| acc.mul_linear(&w));
            assert_eq!(prod, s.euler_at_index(p));
        }
    }
}

#[test]
fn normal_degrees_agree_from_both_poles() {
    for s in spaces() {
        for e in 0..s.spheres.len() {
            let src = s.normal_degrees_from(e, Pole::Src).unwrap();
            let dst = s.normal_degrees_from(e, Pole::Dst).unwrap();
            assert_eq!(src.len(), dst.len());
            let w = s.pole_weight(e, Pole::Src);
            for (a, b) in src.iter().zip(&dst) {
                assert_eq!(a.degree, b.degree);
                assert_eq!(
                    (&a.src_weight, &a.dst_weight),
                    (&b.dst_weight, &b.src_weight)
                );
                let shift = w.scale(&rat(a.degree, 1));
                assert_eq!(a.src_weight.sub(&a.dst_weight), shift);
                assert_eq!(b.src_weight.sub(&b.dst_weight), shift.neg());
            }
            let c1 = s.c1_of_sphere(e).unwrap();
            assert_eq!(c1, 2 + src.iter().map(|n| n.degree).sum::<i64>());
        }
    }
}

#[test]
fn negative_classes_have_no_graphs() {
    let q = builtin("P1xP1").unwrap();
    assert!(enumerate_graphs(&q, 0, 1, &[1, -1]).unwrap().is_empty());
    let req = InvariantRequest::parse(&q, 0, vec![2, -1], &["pt"]).unwrap();
    let r = compute_invariant(&req, &ComputeOptions::default()).unwrap();
    assert!(r.equivariant.is_zero());
    assert_eq!(r.graph_count, 0.into());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integration_vanishes_below_top_degree(s in space(), pick in any::<prop::sample::Index>(), k in 0u32..4) {
        let names: Vec<&String> = s.classes.keys().collect();
        let c = s.class(names[pick.index(names.len())]).unwrap().pow(k);
        let v = s.abbv_integrate(&c).unwrap();
        let top = 2 * s.dim as u32;
        if c.degree < top {
            prop_assert!(v.is_zero());
        } else if c.degree == top {
            prop_assert!(v.as_rational().is_some() || v.is_zero());
        } else {
            prop_assert!(v.is_polynomial());
            prop_assert_eq!(v.degree().unwrap_or(i64::from(c.degree - top) / 2), i64::from(c.degree - top) / 2);
        }
    }

    #[test]
    fn edge_factor_does_not_depend_on_pole(s in space(), e in any::<prop::sample::Index>(), d in 1u32..4) {
        let e = e.index(s.spheres.len());
        prop_assert_eq!(
            edge_factor(&s, e, d, Pole::Src).unwrap(),
            edge_factor(&s, e, d, Pole::Dst).unwrap()
        );
    }

    /// Honest insertions give a polynomial; below the virtual dimension it
    /// is exactly zero, at it a constant.
    #[test]
    fn graph_sums_are_polynomial_and_graded(
        s in prop::sample::select(vec![projective(1), projective(2), builtin("P1xP1").unwrap()]),
        class in prop::collection::vec(0i64..3, 2),
        genus in 0u32..2,
        picks in prop::collection::vec((any::<prop::sample::Index>(), 0u32..2), 0..4),
    ) {
        let class: Vec<i64> = class[..s.h2_rank].to_vec();
        let names: Vec<&String> = s.classes.keys().collect();
        let ins: Vec<Insertion> = picks
            .iter()
            .map(|(i, k)| {
                let n = names[i.index(names.len())];
                Insertion::new(n.clone(), s.class(n).unwrap().clone(), *k)
            })
            .collect();
        let stable = 2 * genus as i64 - 2 + ins.len() as i64 > 0;
        prop_assume!(class.iter().any(|&c| c > 0) || stable);
        let req = InvariantRequest::new(&s, genus, class.clone(), ins);
        let (deg, vdim) = (req.insertion_degree(), req.vdim().unwrap());
        prop_assume!(deg + 2 >= vdim && vdim <= 8);
        let r = compute_invariant(&req, &ComputeOptions::default()).unwrap();
        prop_assert!(r.equivariant.is_polynomial(), "{}", r.equivariant);
        if deg < vdim {
            prop_assert!(r.equivariant.is_zero());
        } else if !r.equivariant.is_zero() {
            prop_assert_eq!(r.equivariant.degree(), Some(deg - vdim));
        }
    }

    /// Adding lower-degree terms to the insertions leaves a correctly
    /// dimensioned invariant unchanged.
    #[test]
    fn lifts_do_not_change_invariants(
        a in -5i64..6, b in -5i64..6, c in -5i64..6, den in 1i64..4,
        which in 0usize..3,
    ) {
        let p2 = projective(2);
        let one = EquivariantClass::one(&p2);
        let h = p2.class("H").unwrap().clone();
        let pt = p2.class("pt").unwrap().clone();
        let pt_lift = lift(&pt, &[(&h, rat(a, den)), (&one, rat(b, den))]);
        let h_lift = lift(&h, &[(&one, rat(c, den))]);
        let (plain, lifted): (Vec<Insertion>, Vec<Insertion>) = match which {
            0 => (
                vec![Insertion::new("pt", pt.clone(), 0); 2],
                vec![Insertion::new("pt", pt_lift.clone(), 0), Insertion::new("pt", pt.clone(), 0)],
            ),
            1 => (
                vec![Insertion::new("H", h.clone(), 0), Insertion::new("pt", pt.clone(), 0), Insertion::new("pt", pt.clone(), 0)],
                vec![Insertion::new("H", h_lift.clone(), 0), Insertion::new("pt", pt_lift.clone(), 0), Insertion::new("pt", pt_lift.clone(), 0)],
            ),
            _ => (
                vec![Insertion::new("pt", pt.clone(), 1), Insertion::new("H", h.clone(), 0)],
                vec![Insertion::new("pt", pt_lift.clone(), 1), Insertion::new("H", h_lift.clone(), 0)],
            ),
        };
        let run = |ins: Vec<Insertion>| {
            let req = InvariantRequest::new(&p2, 0, vec![1], ins);
            compute_invariant(&req, &ComputeOptions::default()).unwrap().equivariant
        };
        let base = run(plain);
        prop_assert!(base.is_zero() || base.as_rational().is_some());
        prop_assert_eq!(run(lifted), base);
    }
}

#[test]
fn lift_helper_changes_restrictions() {
    let p2 = projective(2);
    let h = p2.class("H").unwrap();
    let lifted = lift(h, &[(&EquivariantClass::one(&p2), rat(1, 1))]);
    assert_ne!(&lifted.restrictions, &h.restrictions);
    let v = p2.abbv_integrate(&lifted.mul(&lifted)).unwrap();
    assert_eq!(v, FactoredRational::one(p2.rank()));
}
