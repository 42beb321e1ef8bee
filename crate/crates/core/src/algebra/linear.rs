use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::Value;

use super::rational::{denominator_lcm, format_rational, rational_from_json, Rational};
use crate::error::{GwError, Result};

/// Linear form `c_1 u_1 + ... + c_k u_k` in the torus generators.
///
/// Torus weights, flag weights and every denominator factor of the
/// localization formula are of this shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm(Vec<Rational>);

impl LinearForm {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        LinearForm(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        LinearForm(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn zero(rank: usize) -> Self {
        LinearForm(vec![Rational::zero(); rank])
    }

    /// The generator `u_i`.
    pub fn generator(rank: usize, i: usize) -> Self {
        let mut v = vec![Rational::zero(); rank];
        v[i] = Rational::from_integer(1.into());
        LinearForm(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        debug_assert_eq!(self.rank(), other.rank());
        LinearForm(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LinearForm) -> LinearForm {
        debug_assert_eq!(self.rank(), other.rank());
        LinearForm(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> LinearForm {
        LinearForm(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, s: &Rational) -> LinearForm {
        LinearForm(self.0.iter().map(|a| a * s).collect())
    }

    /// Embeds into a larger torus, placing the coefficients at `offset`.
    pub fn embed(&self, offset: usize, rank: usize) -> LinearForm {
        let mut v = vec![Rational::zero(); rank];
        for (i, c) in self.0.iter().enumerate() {
            v[offset + i] = c.clone();
        }
        LinearForm(v)
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.rank() {
            return Err(GwError::LengthMismatch {
                expected: self.rank(),
                got: point.len(),
            });
        }
        Ok(self.0.iter().zip(point).map(|(a, x)| a * x).sum())
    }

    pub fn leading_index(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    /// Writes `self = s * l` with `l` a primitive integer form whose first
    /// nonzero coefficient is positive. Returns `None` for the zero form.
    pub fn normalized(&self) -> Option<(Rational, LinearForm)> {
        let lead = self.leading_index()?;
        let lcm = denominator_lcm(&self.0);
        let scaled: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let content = scaled
            .iter()
            .fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, c));
        let sign = if scaled[lead].is_negative() { -1 } else { 1 };
        let unit = content * BigInt::from(sign);
        let prim = LinearForm(
            scaled
                .iter()
                .map(|c| Rational::from_integer(c / &unit))
                .collect(),
        );
        let s = Rational::new(unit, lcm);
        Some((s, prim))
    }

    /// Integer ratio `self / other` when `self` is an exact integer multiple
    /// of a nonzero `other`.
    pub fn integer_ratio(&self, other: &LinearForm) -> Option<BigInt> {
        let j = other.leading_index()?;
        let q = &self.0[j] / &other.0[j];
        if !q.is_integer() {
            return None;
        }
        if other.scale(&q) == *self {
            Some(q.to_integer())
        } else {
            None
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.0
                .iter()
                .map(|c| Value::from(format_rational(c)))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, rank: usize) -> Result<LinearForm> {
        let arr = v
            .as_array()
            .ok_or_else(|| GwError::Schema(format!("expected weight vector, got {v}")))?;
        if arr.len() != rank {
            return Err(GwError::Schema(format!(
                "weight vector {v} has length {}, torus rank is {rank}",
                arr.len()
            )));
        }
        Ok(LinearForm(
            arr.iter().map(rational_from_json).collect::<Result<_>>()?,
        ))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            if mag != Rational::from_integer(1.into()) {
                write!(f, "{}*", format_rational(&mag))?;
            }
            write!(f, "u{i}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
