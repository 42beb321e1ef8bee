use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::linear::LinearForm;
use super::polynomial::{
    add_mod, eval_residues, mul_mod, pow_mod, rational_mod, Monomial, Polynomial, MOD_P,
};
use super::rational::{format_rational, parse_rational, Rational};
use crate::error::{GwError, Result};

/// Exact rational function whose denominator is a product of linear forms:
/// `scalar * numerator / prod(denominator)`.
///
/// The representation is canonical. Every denominator factor is a primitive
/// integer form with positive leading coefficient, the numerator is a
/// primitive integer polynomial with positive lex-leading coefficient, and
/// no denominator factor divides the numerator. Two values are equal as
/// functions iff their representations are identical, so `Eq` is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredRational {
    scalar: Rational,
    numerator: Polynomial,
    denominator: Vec<LinearForm>,
}

impl FactoredRational {
    pub fn zero(nvars: usize) -> Self {
        FactoredRational {
            scalar: Rational::zero(),
            numerator: Polynomial::one(nvars),
            denominator: Vec::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_rational(nvars, Rational::one())
    }

    pub fn from_rational(nvars: usize, c: Rational) -> Self {
        if c.is_zero() {
            return Self::zero(nvars);
        }
        FactoredRational {
            scalar: c,
            numerator: Polynomial::one(nvars),
            denominator: Vec::new(),
        }
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        let n = p.nvars();
        Self::canonical(Rational::one(), p, Vec::new()).unwrap_or_else(|_| Self::zero(n))
    }

    pub fn from_linear(l: &LinearForm) -> Self {
        Self::from_polynomial(Polynomial::from_linear(l))
    }

    /// `1 / l`.
    pub fn inverse_linear(l: &LinearForm) -> Result<Self> {
        Self::new(Rational::one(), Polynomial::one(l.rank()), vec![l.clone()])
    }

    /// Builds `scalar * numerator / prod(denominator)` and brings it to
    /// canonical form. Fails if a denominator factor is zero.
    pub fn new(
        scalar: Rational,
        numerator: Polynomial,
        denominator: Vec<LinearForm>,
    ) -> Result<Self> {
        let mut scalar = scalar;
        let mut den = Vec::with_capacity(denominator.len());
        for l in denominator {
            let (s, p) = l.normalized().ok_or(GwError::DivisionByZero)?;
            scalar /= s;
            den.push(p);
        }
        den.sort();
        Self::canonical(scalar, numerator, den)
    }

    /// `den` must already hold normalized factors, sorted.
    fn canonical(
        scalar: Rational,
        numerator: Polynomial,
        mut den: Vec<LinearForm>,
    ) -> Result<Self> {
        let nvars = numerator.nvars();
        if scalar.is_zero() || numerator.is_zero() {
            return Ok(Self::zero(nvars));
        }
        let (c, mut num) = numerator.primitive_part();
        let scalar = scalar * c;
        if !num.is_constant() && !den.is_empty() {
            let mut kept = Vec::with_capacity(den.len());
            let mut residues = None;
            let mut i = 0;
            while i < den.len() {
                let f = den[i].clone();
                let mut j = i;
                while j < den.len() && den[j] == f {
                    j += 1;
                }
                let mut count = j - i;
                while count > 0 && !num.is_constant() {
                    if residues.is_none() {
                        residues = Some(num.residues());
                    }
                    if !vanishes_on_hyperplane(residues.as_ref().unwrap().as_deref(), &f) {
                        break;
                    }
                    match num.div_linear(&f) {
                        Some(q) => {
                            num = q;
                            residues = None;
                            count -= 1;
                        }
                        None => break,
                    }
                }
                kept.extend(std::iter::repeat_n(f, count));
                i = j;
            }
            den = kept;
        }
        Ok(FactoredRational {
            scalar,
            numerator: num,
            denominator: den,
        })
    }

    pub fn nvars(&self) -> usize {
        self.numerator.nvars()
    }

    pub fn scalar(&self) -> &Rational {
        &self.scalar
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &[LinearForm] {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    /// The value as a rational constant, if it is one.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        (self.denominator.is_empty() && self.numerator.is_constant())
            .then(|| &self.scalar * self.numerator.constant_term())
    }

    /// The value as a polynomial, if the denominator cancelled completely.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        if self.is_zero() {
            return Some(Polynomial::zero(self.nvars()));
        }
        self.denominator
            .is_empty()
            .then(|| self.numerator.scale(&self.scalar))
    }

    pub fn is_polynomial(&self) -> bool {
        self.is_zero() || self.denominator.is_empty()
    }

    /// Homogeneity degree (numerator degree minus denominator length).
    /// `None` for zero or inhomogeneous values.
    pub fn degree(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        self.numerator
            .homogeneous_degree()
            .map(|d| d as i64 - self.denominator.len() as i64)
    }

    pub fn neg(&self) -> Self {
        FactoredRational {
            scalar: -&self.scalar,
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() || self.is_zero() {
            return Self::zero(self.nvars());
        }
        FactoredRational {
            scalar: &self.scalar * c,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars());
        }
        let mut den = Vec::with_capacity(self.denominator.len() + other.denominator.len());
        den.extend_from_slice(&self.denominator);
        den.extend_from_slice(&other.denominator);
        den.sort();
        let num = if other.numerator.is_constant() {
            self.numerator.clone()
        } else if self.numerator.is_constant() {
            other.numerator.clone()
        } else {
            &self.numerator * &other.numerator
        };
        Self::canonical(&self.scalar * &other.scalar, num, den)
            .expect("product of nonzero values is well formed")
    }

    pub fn mul_polynomial(&self, p: &Polynomial) -> Self {
        self.mul(&Self::from_polynomial(p.clone()))
    }

    pub fn mul_linear(&self, l: &LinearForm) -> Self {
        self.mul(&Self::from_linear(l))
    }

    pub fn div_linear(&self, l: &LinearForm) -> Result<Self> {
        Ok(self.mul(&Self::inverse_linear(l)?))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.denominator == other.denominator {
            let sum = &self.numerator.scale(&self.scalar) + &other.numerator.scale(&other.scalar);
            return Self::canonical(Rational::one(), sum, self.denominator.clone())
                .expect("sum is well formed");
        }
        let ca = counts(&self.denominator);
        let cb = counts(&other.denominator);
        let mut lcm: BTreeMap<&LinearForm, usize> = ca.clone();
        for (f, &n) in &cb {
            let e = lcm.entry(f).or_insert(0);
            *e = (*e).max(n);
        }
        let lift = |num: &Polynomial, own: &BTreeMap<&LinearForm, usize>| {
            let mut p = num.clone();
            for (f, &n) in &lcm {
                let have = own.get(f).copied().unwrap_or(0);
                for _ in have..n {
                    p = p.mul_linear(f);
                }
            }
            p
        };
        let na = lift(&self.numerator, &ca).scale(&self.scalar);
        let nb = lift(&other.numerator, &cb).scale(&other.scalar);
        let den: Vec<LinearForm> = lcm
            .iter()
            .flat_map(|(f, &n)| std::iter::repeat_n((*f).clone(), n))
            .collect();
        Self::canonical(Rational::one(), &na + &nb, den).expect("sum is well formed")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplicative inverse. The numerator must be constant or a single
    /// linear form, since denominators are products of linear forms.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(GwError::DivisionByZero);
        }
        let nvars = self.nvars();
        let mut num = Polynomial::one(nvars);
        for f in &self.denominator {
            num = num.mul_linear(f);
        }
        let den = if self.numerator.is_constant() {
            Vec::new()
        } else if self.numerator.homogeneous_degree() == Some(1) {
            let coeffs = (0..nvars)
                .map(|i| {
                    let mut m = vec![0; nvars];
                    m[i] = 1;
                    self.numerator
                        .terms()
                        .find(|(k, _)| **k == m)
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(Rational::zero)
                })
                .collect();
            vec![LinearForm::new(coeffs)]
        } else {
            return Err(GwError::NonLinearInverse);
        };
        // a constant numerator is the primitive polynomial 1
        Self::new(self.scalar.recip(), num, den)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Exact sum of many values, combined pairwise to keep intermediate
    /// denominators small.
    pub fn sum<I: IntoIterator<Item = Self>>(nvars: usize, items: I) -> Self {
        let mut level: Vec<Self> = items.into_iter().filter(|x| !x.is_zero()).collect();
        if level.is_empty() {
            return Self::zero(nvars);
        }
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            let mut it = level.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(a.add(&b)),
                    None => next.push(a),
                }
            }
            level = next;
        }
        level.pop().unwrap()
    }

    /// Value at a point, `None` if a denominator factor vanishes there.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Option<Rational>> {
        let mut d = Rational::one();
        for f in &self.denominator {
            let v = f.eval(point)?;
            if v.is_zero() {
                return Ok(None);
            }
            d *= v;
        }
        let n = self.numerator.eval(point)?;
        Ok(Some(&self.scalar * n / d))
    }

    /// Fast probabilistic equality: compares values at a few pseudo-random
    /// rational points. A `false` is definitive; a `true` should be
    /// confirmed with `==`.
    pub fn probably_equal(&self, other: &Self, trials: usize) -> bool {
        let nvars = self.nvars();
        let mut rng = SplitMix(0x5eed_1234_abcd_0001);
        let mut done = 0;
        let mut attempts = 0;
        while done < trials && attempts < trials * 8 {
            attempts += 1;
            let pt: Vec<Rational> = (0..nvars).map(|_| rng.small_rational()).collect();
            match (self.evaluate(&pt), other.evaluate(&pt)) {
                (Ok(Some(a)), Ok(Some(b))) => {
                    if a != b {
                        return false;
                    }
                    done += 1;
                }
                _ => continue,
            }
        }
        true
    }

    /// `{"scalar": "p/q", "numerator": [...], "denominator_factors": [[rat...]...]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "scalar": format_rational(&self.scalar),
            "numerator": self.numerator.to_json(),
            "denominator_factors": self.denominator.iter().map(LinearForm::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, nvars: usize) -> Result<Self> {
        let scalar = v
            .get("scalar")
            .and_then(Value::as_str)
            .ok_or_else(|| GwError::Schema("missing scalar".into()))
            .and_then(parse_rational)?;
        let numerator = Polynomial::from_json(
            v.get("numerator")
                .ok_or_else(|| GwError::Schema("missing numerator".into()))?,
            nvars,
        )?;
        let den = v
            .get("denominator_factors")
            .and_then(Value::as_array)
            .ok_or_else(|| GwError::Schema("missing denominator_factors".into()))?
            .iter()
            .map(|f| LinearForm::from_json(f, nvars))
            .collect::<Result<Vec<_>>>()?;
        Self::new(scalar, numerator, den)
    }
}

fn counts(den: &[LinearForm]) -> BTreeMap<&LinearForm, usize> {
    let mut m = BTreeMap::new();
    for f in den {
        *m.entry(f).or_insert(0) += 1;
    }
    m
}

/// Cheap necessary condition for `f | p`: `p` vanishes at a pseudo-random
/// point of the hyperplane `f = 0`. A `true` still needs exact division.
fn vanishes_on_hyperplane(p: Option<&[(&Monomial, u64)]>, f: &LinearForm) -> bool {
    // A nonzero residue at a point of the hyperplane rules out divisibility;
    // otherwise the caller's exact division decides.
    let Some(j) = f.leading_index() else {
        return false;
    };
    let n = f.rank();
    let mut rng = SplitMix(0x9e37_79b9_7f4a_7c15 ^ (n as u64) << 8 ^ j as u64);
    let mut pt: Vec<u64> = (0..n).map(|_| rng.next_u64() % MOD_P).collect();
    let mut rest = 0;
    for (i, a) in f.coeffs().iter().enumerate() {
        if i != j {
            let Some(a) = rational_mod(a) else {
                return true;
            };
            rest = add_mod(rest, mul_mod(a, pt[i]));
        }
    }
    let lead = match rational_mod(&f.coeffs()[j]) {
        Some(0) | None => return true,
        Some(a) => a,
    };
    pt[j] = mul_mod((MOD_P - rest) % MOD_P, pow_mod(lead, MOD_P - 2));
    p.is_none_or(|p| eval_residues(p, &pt) == 0)
}

/// Small deterministic generator for evaluation points.
pub(crate) struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn small_rational(&mut self) -> Rational {
        let n = (self.next_u64() % 20011) as i64 - 10005;
        let d = (self.next_u64() % 97) as i64 + 1;
        Rational::new(n.into(), d.into())
    }
}

impl fmt::Display for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let num = self.numerator.scale(&self.scalar);
        if self.denominator.is_empty() {
            return write!(f, "{num}");
        }
        let den: Vec<String> = self.denominator.iter().map(|l| format!("({l})")).collect();
        write!(f, "({num})/({})", den.join("*"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn lf(c: &[i64]) -> LinearForm {
        LinearForm::from_ints(c)
    }

    #[test]
    fn sum_of_inverses_shares_denominator() {
        let x = lf(&[1, 0]);
        let y = lf(&[0, 1]);
        let s = FactoredRational::inverse_linear(&x)
            .unwrap()
            .add(&FactoredRational::inverse_linear(&y).unwrap());
        let expected = FactoredRational::new(
            Rational::one(),
            Polynomial::from_linear(&lf(&[1, 1])),
            vec![x.clone(), y.clone()],
        )
        .unwrap();
        assert_eq!(s, expected);
        assert_eq!(s.denominator(), &[lf(&[0, 1]), lf(&[1, 0])]);
    }

    #[test]
    fn inverse_pair_multiplies_to_one() {
        let a = FactoredRational::new(
            rat(3, 5),
            Polynomial::from_linear(&lf(&[1, -2])),
            vec![lf(&[2, 7])],
        )
        .unwrap();
        let b = a.inv().unwrap();
        assert_eq!(a.mul(&b), FactoredRational::one(2));
        assert!(matches!(
            FactoredRational::zero(2).inv(),
            Err(GwError::DivisionByZero)
        ));
    }

    #[test]
    fn content_extraction() {
        let v = FactoredRational::new(
            Rational::one(),
            Polynomial::from_linear(&lf(&[2, 2])),
            vec![lf(&[4, 0])],
        )
        .unwrap();
        assert_eq!(v.scalar(), &rat(1, 2));
        assert_eq!(v.numerator(), &Polynomial::from_linear(&lf(&[1, 1])));
        assert_eq!(v.denominator(), &[lf(&[1, 0])]);
    }

    #[test]
    fn cancellation_and_sign_absorption() {
        let w = lf(&[-1, 1]);
        let v = FactoredRational::new(
            Rational::one(),
            Polynomial::from_linear(&w.neg()),
            vec![w.clone()],
        )
        .unwrap();
        assert_eq!(v.as_rational(), Some(int(-1)));
        let neg_w = FactoredRational::inverse_linear(&w.neg()).unwrap();
        assert_eq!(neg_w, FactoredRational::inverse_linear(&w).unwrap().neg());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(FactoredRational::inverse_linear(&lf(&[0, 0])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let v = FactoredRational::new(
            rat(-7, 3),
            &Polynomial::from_linear(&lf(&[1, 3])) * &Polynomial::from_linear(&lf(&[2, -1])),
            vec![lf(&[1, 0]), lf(&[1, 0]), lf(&[1, 1])],
        )
        .unwrap();
        assert_eq!(FactoredRational::from_json(&v.to_json(), 2).unwrap(), v);
    }
}
