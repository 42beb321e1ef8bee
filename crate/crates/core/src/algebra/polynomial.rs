use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use super::linear::LinearForm;
use super::rational::{
    bigint_from_json, bigint_to_json, denominator_lcm, format_rational, numerator_gcd,
    rational_from_json, Rational,
};
use crate::error::{GwError, Result};

/// Exponent vector, one entry per torus generator.
pub type Monomial = Vec<u32>;

/// Polynomial in `Q[u_1, ..., u_k]`.
///
/// Terms are kept in a `BTreeMap` keyed by exponent vector. The derived
/// ordering on `Vec<u32>` is lexicographic with `u_1 > u_2 > ...`, so the
/// last key is the lex-leading monomial. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(m, Rational::one());
        p
    }

    pub fn from_linear(l: &LinearForm) -> Self {
        let n = l.rank();
        let mut p = Self::zero(n);
        for (i, c) in l.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let mut m = vec![0; n];
                m[i] = 1;
                p.terms.insert(m, c.clone());
            }
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(
                m.len(),
                nvars,
                "monomial length must equal the number of variables"
            );
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Highest total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    /// Degree if every term has the same total degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.iter().sum::<u32>());
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.iter().sum::<u32>() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn mul_linear(&self, l: &LinearForm) -> Polynomial {
        debug_assert_eq!(l.rank(), self.nvars);
        let mut out = Self::zero(self.nvars);
        for (i, a) in l.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (m, c) in &self.terms {
                let mut m2 = m.clone();
                m2[i] += 1;
                out.add_term(m2, c * a);
            }
        }
        out
    }

    /// Exact quotient by a nonzero linear form, `None` if it does not divide.
    ///
    /// Division by a single polynomial leaves a zero remainder exactly when
    /// it divides, so the first leading term not divisible by the form's
    /// leading variable settles the question.
    pub fn div_linear(&self, l: &LinearForm) -> Option<Polynomial> {
        let j = l.leading_index()?;
        let lead = &l.coeffs()[j];
        let mut rem = self.terms.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((m, c)) = rem.pop_last() {
            if m[j] == 0 {
                return None;
            }
            let mut qm = m;
            qm[j] -= 1;
            let qc = c / lead;
            for (i, a) in l.coeffs().iter().enumerate() {
                if i == j || a.is_zero() {
                    continue;
                }
                let mut tm = qm.clone();
                tm[i] += 1;
                let delta = -(&qc * a);
                use std::collections::btree_map::Entry;
                match rem.entry(tm) {
                    Entry::Vacant(v) => {
                        v.insert(delta);
                    }
                    Entry::Occupied(mut o) => {
                        *o.get_mut() += delta;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                }
            }
            quot.terms.insert(qm, qc);
        }
        Some(quot)
    }

    /// Ring-homomorphism evaluation at a point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(GwError::LengthMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let maxdeg = self.terms.keys().flatten().copied().max().unwrap_or(0) as usize;
        let powers: Vec<Vec<Rational>> = point
            .iter()
            .map(|x| {
                let mut v = Vec::with_capacity(maxdeg + 1);
                v.push(Rational::one());
                for k in 1..=maxdeg {
                    let next = &v[k - 1] * x;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t *= &powers[i][e as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Coefficients reduced modulo [`MOD_P`]; `None` if some denominator is
    /// divisible by the prime.
    pub(crate) fn residues(&self) -> Option<Vec<(&Monomial, u64)>> {
        self.terms
            .iter()
            .map(|(m, c)| Some((m, rational_mod(c)?)))
            .collect()
    }

    /// Writes `self = c * p` with `p` a primitive integer polynomial whose
    /// lex-leading coefficient is positive. The zero polynomial maps to
    /// `(0, 0)`.
    pub fn primitive_part(&self) -> (Rational, Polynomial) {
        let Some((_, lead)) = self.terms.last_key_value() else {
            return (Rational::zero(), self.clone());
        };
        let lcm = denominator_lcm(self.terms.values());
        let lcm_r = Rational::from_integer(lcm.clone());
        let gcd = numerator_gcd(
            self.terms
                .values()
                .map(|c| c * &lcm_r)
                .collect::<Vec<_>>()
                .iter(),
        );
        let sign = if lead.is_negative() { -1 } else { 1 };
        let unit = Rational::new(gcd * BigInt::from(sign), lcm);
        if unit.is_one() {
            return (unit, self.clone());
        }
        let inv = unit.recip();
        (unit, self.scale(&inv))
    }

    /// Re-embeds into `nvars` variables, shifting exponents by `offset`.
    pub fn embed(&self, offset: usize, nvars: usize) -> Polynomial {
        Polynomial {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m2 = vec![0; nvars];
                    m2[offset..offset + m.len()].copy_from_slice(m);
                    (m2, c.clone())
                })
                .collect(),
        }
    }

    /// `[[exponents...], num, den]` entries in ascending monomial order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    Value::Array(vec![
                        Value::Array(m.iter().map(|&e| Value::from(e)).collect()),
                        bigint_to_json(c.numer()),
                        bigint_to_json(c.denom()),
                    ])
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value, nvars: usize) -> Result<Polynomial> {
        let bad = || GwError::Schema(format!("malformed polynomial {v}"));
        let arr = v.as_array().ok_or_else(bad)?;
        let mut p = Self::zero(nvars);
        for t in arr {
            let t = t.as_array().ok_or_else(bad)?;
            let (m, c) = match t.len() {
                3 => {
                    let n = bigint_from_json(&t[1])?;
                    let d = bigint_from_json(&t[2])?;
                    if d.is_zero() {
                        return Err(GwError::Schema("zero denominator in polynomial".into()));
                    }
                    (&t[0], Rational::new(n, d))
                }
                2 => (&t[0], rational_from_json(&t[1])?),
                _ => return Err(bad()),
            };
            p.add_term(monomial_from_json(m, nvars)?, c);
        }
        Ok(p)
    }

    /// GKM-file form: `[[exponents...], "p/q"]` entries.
    pub fn to_json_compact(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    Value::Array(vec![
                        Value::Array(m.iter().map(|&e| Value::from(e)).collect()),
                        Value::from(format_rational(c)),
                    ])
                })
                .collect(),
        )
    }
}

fn monomial_from_json(v: &Value, nvars: usize) -> Result<Monomial> {
    let arr = v
        .as_array()
        .ok_or_else(|| GwError::Schema(format!("expected exponent list, got {v}")))?;
    if arr.len() != nvars {
        return Err(GwError::Schema(format!(
            "exponent vector {v} has length {}, expected {nvars}",
            arr.len()
        )));
    }
    arr.iter()
        .map(|e| {
            e.as_u64()
                .and_then(|e| u32::try_from(e).ok())
                .ok_or_else(|| GwError::Schema(format!("bad exponent {e}")))
        })
        .collect()
}

/// The Mersenne prime `2^61 - 1`.
pub(crate) const MOD_P: u64 = (1 << 61) - 1;

pub(crate) fn add_mod(a: u64, b: u64) -> u64 {
    (a + b) % MOD_P
}

pub(crate) fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MOD_P as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b);
        }
        b = mul_mod(b, b);
        e >>= 1;
    }
    r
}

/// Value of a polynomial given by [`Polynomial::residues`] at a point.
pub(crate) fn eval_residues(terms: &[(&Monomial, u64)], point: &[u64]) -> u64 {
    let mut acc = 0u64;
    for (m, c) in terms {
        let mut t = *c;
        for (i, &e) in m.iter().enumerate() {
            if e > 0 {
                t = mul_mod(t, pow_mod(point[i], e as u64));
            }
        }
        acc = add_mod(acc, t);
    }
    acc
}

pub(crate) fn bigint_mod(n: &BigInt) -> u64 {
    let m = BigInt::from(MOD_P);
    let r = ((n % &m) + &m) % &m;
    u64::try_from(r).expect("residue fits")
}

pub(crate) fn rational_mod(c: &Rational) -> Option<u64> {
    let d = bigint_mod(c.denom());
    if d == 0 {
        return None;
    }
    Some(mul_mod(bigint_mod(c.numer()), pow_mod(d, MOD_P - 2)))
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("u{i}")
                    } else {
                        format!("u{i}^{e}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}
