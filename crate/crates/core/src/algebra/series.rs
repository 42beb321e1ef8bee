use std::collections::BTreeMap;

use num_traits::Zero;

use super::factored::FactoredRational;
use super::linear::LinearForm;
use super::rational::Rational;
use crate::error::{GwError, Result};

/// Layout of a truncated series: number of nilpotent symbols, the total
/// degree bound, and optional per-symbol exponent caps (`λ₁² = 0` is a cap
/// of 1 on the λ symbol).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesShape {
    pub nsyms: usize,
    pub bound: u32,
    pub caps: Vec<Option<u32>>,
}

impl SeriesShape {
    pub fn new(nsyms: usize, bound: u32) -> Self {
        SeriesShape {
            nsyms,
            bound,
            caps: vec![None; nsyms],
        }
    }

    pub fn with_cap(mut self, sym: usize, cap: u32) -> Self {
        self.caps[sym] = Some(cap);
        self
    }

    fn admits(&self, m: &[u32]) -> bool {
        m.iter().sum::<u32>() <= self.bound
            && m.iter()
                .zip(&self.caps)
                .all(|(e, cap)| cap.is_none_or(|c| *e <= c))
    }
}

/// Polynomial in nilpotent symbols (ψ per flag or marking, λ₁) with
/// rational-function coefficients, truncated above a total degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentSeries {
    shape: SeriesShape,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, FactoredRational>,
}

impl NilpotentSeries {
    pub fn zero(shape: SeriesShape, nvars: usize) -> Self {
        NilpotentSeries {
            shape,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(shape: SeriesShape, value: FactoredRational) -> Self {
        let nvars = value.nvars();
        let mut s = Self::zero(shape, nvars);
        let m = vec![0; s.shape.nsyms];
        s.insert(m, value);
        s
    }

    /// `coeff * sym^power`, or zero if the monomial is truncated away.
    pub fn monomial(shape: SeriesShape, sym: usize, power: u32, coeff: FactoredRational) -> Self {
        let nvars = coeff.nvars();
        let mut s = Self::zero(shape, nvars);
        let mut m = vec![0; s.shape.nsyms];
        m[sym] = power;
        s.insert(m, coeff);
        s
    }

    /// Geometric expansion `1/(c - ψ) = Σ_{k=0}^{D} ψ^k / c^{k+1}` in the
    /// symbol `sym`, with `D` the shape's degree bound.
    pub fn expand_inverse_linear(c: &LinearForm, shape: SeriesShape, sym: usize) -> Result<Self> {
        if c.is_zero() {
            return Err(GwError::ZeroWeightExpansion);
        }
        let inv = FactoredRational::inverse_linear(c)?;
        let mut s = Self::zero(shape, c.rank());
        let mut coeff = inv.clone();
        for k in 0..=s.shape.bound {
            let mut m = vec![0; s.shape.nsyms];
            m[sym] = k;
            s.insert(m, coeff.clone());
            coeff = coeff.mul(&inv);
        }
        Ok(s)
    }

    fn insert(&mut self, m: Vec<u32>, value: FactoredRational) {
        if value.is_zero() || !self.shape.admits(&m) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(value);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&value);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn shape(&self) -> &SeriesShape {
        &self.shape
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &FactoredRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u32]) -> FactoredRational {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| FactoredRational::zero(self.nvars))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shape, other.shape);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &FactoredRational) -> Self {
        let mut out = Self::zero(self.shape.clone(), self.nvars);
        for (m, v) in &self.terms {
            out.insert(m.clone(), v.mul(c));
        }
        out
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.shape.clone(), self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.scale(c);
        }
        out
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shape, other.shape);
        let mut out = Self::zero(self.shape.clone(), self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                if out.shape.admits(&m) {
                    out.insert(m, ca.mul(cb));
                }
            }
        }
        out
    }

    /// Multiplies by `sym^power`.
    pub fn shift(&self, sym: usize, power: u32) -> Self {
        if power == 0 {
            return self.clone();
        }
        let mut out = Self::zero(self.shape.clone(), self.nvars);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            m2[sym] += power;
            out.insert(m2, c.clone());
        }
        out
    }

    /// Linear functional sending each monomial to `f(monomial)` times its
    /// coefficient.
    pub fn pair<F>(&self, mut f: F) -> Result<FactoredRational>
    where
        F: FnMut(&[u32]) -> Result<Rational>,
    {
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let w = f(m)?;
            if !w.is_zero() {
                parts.push(c.scale(&w));
            }
        }
        Ok(FactoredRational::sum(self.nvars, parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn c() -> LinearForm {
        LinearForm::from_ints(&[2, -1])
    }

    #[test]
    fn geometric_head() {
        let s = NilpotentSeries::expand_inverse_linear(&c(), SeriesShape::new(1, 0), 0).unwrap();
        assert_eq!(s.terms().count(), 1);
        assert_eq!(
            s.coefficient(&[0]),
            FactoredRational::inverse_linear(&c()).unwrap()
        );
    }

    #[test]
    fn geometric_series_to_degree_two() {
        let s = NilpotentSeries::expand_inverse_linear(&c(), SeriesShape::new(1, 2), 0).unwrap();
        let inv = FactoredRational::inverse_linear(&c()).unwrap();
        for k in 0..=2u32 {
            assert_eq!(s.coefficient(&[k]), inv.pow(k + 1));
        }
    }

    #[test]
    fn multiplying_back_gives_one() {
        let shape = SeriesShape::new(1, 2);
        let s = NilpotentSeries::expand_inverse_linear(&c(), shape.clone(), 0).unwrap();
        let c_minus_psi =
            NilpotentSeries::constant(shape.clone(), FactoredRational::from_linear(&c())).add(
                &NilpotentSeries::monomial(
                    shape.clone(),
                    0,
                    1,
                    FactoredRational::from_rational(2, int(-1)),
                ),
            );
        let prod = c_minus_psi.mul(&s);
        assert_eq!(
            prod,
            NilpotentSeries::constant(shape, FactoredRational::one(2))
        );
    }

    #[test]
    fn zero_weight_rejected() {
        assert!(matches!(
            NilpotentSeries::expand_inverse_linear(&LinearForm::zero(2), SeriesShape::new(1, 2), 0),
            Err(GwError::ZeroWeightExpansion)
        ));
    }

    #[test]
    fn caps_truncate() {
        let shape = SeriesShape::new(2, 3).with_cap(1, 1);
        let lam = NilpotentSeries::monomial(shape.clone(), 1, 1, FactoredRational::one(2));
        assert!(lam.mul(&lam).is_zero());
    }
}
