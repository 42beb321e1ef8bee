use num_bigint::BigInt;
use num_traits::One;

use crate::algebra::{
    factorial, FactoredRational, LinearForm, NilpotentSeries, Rational, SeriesShape,
};
use crate::error::{GwError, Result};
use crate::gkm::{GkmSpace, Pole};
use crate::graphs::{DecoratedGraph, Flag};

/// Tangent weight of the edge cover at one of its ends, `w(S, p) / d`.
pub fn flag_weight(space: &GkmSpace, graph: &DecoratedGraph, flag: Flag) -> LinearForm {
    let e = &graph.edges[flag.edge];
    let pole = if flag.at_src { Pole::Src } else { Pole::Dst };
    space
        .pole_weight(e.sphere, pole)
        .scale(&Rational::new(BigInt::one(), BigInt::from(e.degree)))
}

/// `h(p, g)`: `1/e(T_p X)` in genus 0; in genus 1 the series
/// `Π_S (w_S - λ₁)/w_S` in the single symbol λ₁ with `λ₁² = 0`.
pub fn vertex_hodge_factor(space: &GkmSpace, p: usize, genus: u32) -> Result<NilpotentSeries> {
    match genus {
        0 => Ok(NilpotentSeries::constant(
            SeriesShape::new(0, 0),
            space.inverse_euler(p)?,
        )),
        1 => genus1_hodge(space, p, SeriesShape::new(1, 1).with_cap(0, 1), 0),
        g => Err(GwError::UnsupportedGenus(g)),
    }
}

pub(crate) fn genus1_hodge(
    space: &GkmSpace,
    p: usize,
    shape: SeriesShape,
    lambda: usize,
) -> Result<NilpotentSeries> {
    let rank = space.rank();
    let mut linear = FactoredRational::zero(rank);
    for w in &space.points[p].tangent_weights {
        linear = linear.add(&FactoredRational::inverse_linear(w)?);
    }
    let one = NilpotentSeries::constant(shape.clone(), FactoredRational::one(rank));
    Ok(one.add(&NilpotentSeries::monomial(shape, lambda, 1, linear.neg())))
}

/// `b(x, y, r) = Π_{k=0}^{r} 1/(x - k y)` for `r ≥ 0` and
/// `Π_{k=1}^{-1-r} (x + k y)` for `r < 0`.
pub fn b_factor(x: &LinearForm, y: &LinearForm, r: i64) -> Result<FactoredRational> {
    let mut acc = FactoredRational::one(x.rank());
    if r >= 0 {
        for k in 0..=r {
            let f = x.sub(&y.scale(&Rational::from_integer(k.into())));
            if f.is_zero() {
                return Err(GwError::DegenerateWeight {
                    x: x.to_string(),
                    y: y.to_string(),
                    k,
                });
            }
            acc = acc.div_linear(&f)?;
        }
    } else {
        for k in 1..=(-1 - r) {
            acc = acc.mul_linear(&x.add(&y.scale(&Rational::from_integer(k.into()))));
        }
    }
    Ok(acc)
}

/// Contribution `h(S, d)` of a `d`-fold cover of `sphere`, read from `pole`.
pub fn edge_factor(
    space: &GkmSpace,
    sphere: usize,
    degree: u32,
    pole: Pole,
) -> Result<FactoredRational> {
    let w = space.pole_weight(sphere, pole);
    let d = degree as u64;
    let fact = factorial(d);
    let mut pre = Rational::new(BigInt::from(d).pow(2 * degree), &fact * &fact);
    if degree % 2 == 1 {
        pre = -pre;
    }
    let mut acc = FactoredRational::inverse_linear(&w)?
        .pow(2 * degree)
        .scale(&pre);
    let y = w.scale(&Rational::new(BigInt::one(), BigInt::from(d)));
    for n in space.normal_degrees_from(sphere, pole)? {
        acc = acc.mul(&b_factor(&n.src_weight, &y, degree as i64 * n.degree)?);
    }
    Ok(acc)
}
