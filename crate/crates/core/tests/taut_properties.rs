use std::collections::HashMap;

use gwloc::algebra::{int, FactoredRational, LinearForm, NilpotentSeries, Rational, SeriesShape};
use gwloc::taut::{psi_integral_genus0, HodgeTable, VertexMeasure};
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Genus-0 ψ integrals computed only from the String equation and
/// `<τ_0 τ_0 τ_0> = 1`. Every genus-0 monomial of the right degree has a
/// zero exponent, so this always bottoms out.
fn string_oracle(a: &[u32], memo: &mut HashMap<Vec<u32>, Rational>) -> Rational {
    let n = a.len();
    if n < 3 || a.iter().sum::<u32>() as usize != n - 3 {
        return Rational::zero();
    }
    let mut key = a.to_vec();
    key.sort_unstable();
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let v = if n == 3 {
        Rational::one()
    } else {
        let rest = key[1..].to_vec();
        let mut acc = Rational::zero();
        for j in 0..rest.len() {
            if rest[j] > 0 {
                let mut r = rest.clone();
                r[j] -= 1;
                acc += string_oracle(&r, memo);
            }
        }
        acc
    };
    memo.insert(key, v.clone());
    v
}

fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(n - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[test]
fn genus0_matches_string_oracle() {
    let mut memo = HashMap::new();
    for n in 3..=9 {
        for total in 0..=6 {
            for a in compositions(n, total) {
                assert_eq!(
                    psi_integral_genus0(&a),
                    string_oracle(&a, &mut memo),
                    "{a:?}"
                );
            }
        }
    }
    assert_eq!(string_oracle(&[1, 0, 0, 0], &mut memo), int(1));
    assert_eq!(string_oracle(&[1, 1, 0, 0, 0], &mut memo), int(2));
}

#[test]
fn genus0_string_identity() {
    for n in 3..=8 {
        for total in 0..=5u32 {
            for a in compositions(n, total) {
                let mut with_zero = a.clone();
                with_zero.push(0);
                let mut lowered = Rational::zero();
                for i in 0..n {
                    if a[i] > 0 {
                        let mut b = a.clone();
                        b[i] -= 1;
                        lowered += psi_integral_genus0(&b);
                    }
                }
                assert_eq!(psi_integral_genus0(&with_zero), lowered, "{a:?}");
            }
        }
    }
}

#[test]
fn genus0_dilaton_identity() {
    for n in 3..=8 {
        for total in 0..=5u32 {
            for a in compositions(n, total) {
                let mut b = a.clone();
                b.push(1);
                assert_eq!(
                    psi_integral_genus0(&b),
                    psi_integral_genus0(&a) * int(n as i64 - 2),
                    "{a:?}"
                );
            }
        }
    }
}

#[test]
fn genus1_string_and_dilaton_coherence() {
    let t = HodgeTable::bundled();
    for n in 1..=6 {
        for lam in 0..=1u32 {
            for a in compositions(n, n as u32 - lam) {
                let v = t.hodge_integral_genus1(&a, lam).unwrap();
                let mut s = a.clone();
                s.push(0);
                let mut lowered = Rational::zero();
                for i in 0..n {
                    if a[i] > 0 {
                        let mut b = a.clone();
                        b[i] -= 1;
                        lowered += t.hodge_integral_genus1(&b, lam).unwrap();
                    }
                }
                assert_eq!(t.hodge_integral_genus1(&s, lam).unwrap(), lowered);
                let mut d = a.clone();
                d.push(1);
                assert_eq!(t.hodge_integral_genus1(&d, lam).unwrap(), v * int(n as i64));
            }
        }
    }
}

#[test]
fn genus1_degree_selection() {
    let t = HodgeTable::bundled();
    for n in 1..=5 {
        for total in 0..=n as u32 + 2 {
            for a in compositions(n, total) {
                for lam in 0..=2u32 {
                    if total + lam != n as u32 || lam > 1 {
                        assert!(t.hodge_integral_genus1(&a, lam).unwrap().is_zero());
                    }
                }
            }
        }
    }
}

#[test]
fn genus1_scales_with_table() {
    let t = HodgeTable::from_json_str(
        r#"{"genus1": {"psi": "3", "lambda1": "5"}, "provenance": "scaled"}"#,
    )
    .unwrap();
    let b = HodgeTable::bundled();
    for n in 1..=4 {
        for a in compositions(n, n as u32) {
            assert_eq!(
                t.hodge_integral_genus1(&a, 0).unwrap(),
                b.hodge_integral_genus1(&a, 0).unwrap() / &b.psi * int(3)
            );
        }
        for a in compositions(n, n as u32 - 1) {
            assert_eq!(
                t.hodge_integral_genus1(&a, 1).unwrap(),
                b.hodge_integral_genus1(&a, 1).unwrap() / &b.lambda1 * int(5)
            );
        }
    }
}

#[test]
fn env_override_is_respected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    std::fs::write(
        &path,
        r#"{"genus1": {"psi": "1/2", "lambda1": "1/3"}, "provenance": "x"}"#,
    )
    .unwrap();
    let t = HodgeTable::from_path(&path).unwrap();
    assert_eq!(
        t.hodge_integral_genus1(&[1], 0).unwrap(),
        Rational::new(1.into(), 2.into())
    );
    assert!(HodgeTable::from_path(&dir.path().join("missing.json")).is_err());
}

proptest! {
    #[test]
    fn genus0_is_symmetric(a in prop::collection::vec(0u32..4, 3..8), seed in any::<u64>()) {
        let mut b = a.clone();
        let len = b.len();
        b.rotate_left((seed as usize) % len);
        b.swap(0, (seed as usize / 7) % len);
        prop_assert_eq!(psi_integral_genus0(&a), psi_integral_genus0(&b));
    }

    #[test]
    fn integration_is_linear(
        c1 in prop::collection::vec(-4i64..5, 2),
        c2 in prop::collection::vec(-4i64..5, 2),
        valence in 3usize..6,
        genus in 0u32..2,
    ) {
        let l1 = LinearForm::from_ints(&[c1[0], c1[1]]);
        let l2 = LinearForm::from_ints(&[c2[0], c2[1]]);
        prop_assume!(!l1.is_zero() && !l2.is_zero());
        let t = HodgeTable::bundled();
        let v = VertexMeasure::new(genus, valence);
        let shape = SeriesShape::new(v.nsyms(), v.dimension());
        let s1 = NilpotentSeries::expand_inverse_linear(&l1, shape.clone(), 0).unwrap();
        let s2 = NilpotentSeries::expand_inverse_linear(&l2, shape.clone(), 1 % valence).unwrap();
        let s2 = s2.mul(&NilpotentSeries::constant(shape, FactoredRational::from_linear(&l1)));
        let lhs = t.integrate_vertex_series(v, &s1.add(&s2)).unwrap();
        let rhs = t.integrate_vertex_series(v, &s1).unwrap().add(&t.integrate_vertex_series(v, &s2).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}
