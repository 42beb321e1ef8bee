//! ψ/λ intersection numbers on moduli of stable curves in genus 0 and 1.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{factorial, parse_rational, FactoredRational, NilpotentSeries, Rational};
use crate::error::{GwError, Result};

const BUNDLED_TABLE: &str = include_str!("../../data/hodge_table.json");

/// Environment variable naming an alternative genus-1 table file.
pub const HODGE_TABLE_ENV: &str = "GW_HODGE_TABLE";

/// A stable vertex `M̄_{g, m}` of a fixed-locus graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VertexMeasure {
    pub genus: u32,
    pub valence: usize,
}

impl VertexMeasure {
    pub fn new(genus: u32, valence: usize) -> Self {
        VertexMeasure { genus, valence }
    }

    pub fn is_stable(&self) -> bool {
        2 * self.genus as i64 - 2 + self.valence as i64 > 0
    }

    /// Complex dimension `3g - 3 + m`.
    pub fn dimension(&self) -> u32 {
        (3 * self.genus as i64 - 3 + self.valence as i64).max(0) as u32
    }

    /// Number of series symbols: one ψ per special point, plus λ₁ in genus 1.
    pub fn nsyms(&self) -> usize {
        self.valence + usize::from(self.genus == 1)
    }

    pub fn lambda_symbol(&self) -> Option<usize> {
        (self.genus == 1).then_some(self.valence)
    }
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    genus1: Genus1File,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
struct Genus1File {
    psi: String,
    lambda1: String,
}

/// Genus-1 base constants `∫_{M̄_{1,1}} ψ₁` and `∫_{M̄_{1,1}} λ₁`, loaded as
/// data. Everything else in genus 1 is reduced to these two numbers.
#[derive(Debug)]
pub struct HodgeTable {
    pub psi: Rational,
    pub lambda1: Rational,
    pub provenance: String,
    cache: Mutex<HashMap<(Vec<u32>, u32), Rational>>,
}

impl Clone for HodgeTable {
    fn clone(&self) -> Self {
        HodgeTable::new(
            self.psi.clone(),
            self.lambda1.clone(),
            self.provenance.clone(),
        )
    }
}

impl HodgeTable {
    pub fn new(psi: Rational, lambda1: Rational, provenance: String) -> Self {
        HodgeTable {
            psi,
            lambda1,
            provenance,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn bundled() -> Self {
        Self::from_json_str(BUNDLED_TABLE).expect("bundled hodge table parses")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: TableFile =
            serde_json::from_str(s).map_err(|e| GwError::Schema(format!("hodge table: {e}")))?;
        let psi = parse_rational(&f.genus1.psi)?;
        let lambda1 = parse_rational(&f.genus1.lambda1)?;
        if !psi.is_positive() || !lambda1.is_positive() {
            return Err(GwError::Schema(
                "hodge table constants must be positive".into(),
            ));
        }
        Ok(Self::new(psi, lambda1, f.provenance))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Bundled table unless `GW_HODGE_TABLE` names another file.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(HODGE_TABLE_ENV) {
            Some(p) => Self::from_path(Path::new(&p)),
            None => Ok(Self::bundled()),
        }
    }

    /// `∫_{M̄_{1,n}} ψ^a λ₁^b` for `b ∈ {0, 1}`, by String and Dilaton
    /// reduction to the two base constants.
    pub fn hodge_integral_genus1(&self, psi: &[u32], lambda_power: u32) -> Result<Rational> {
        let n = psi.len();
        if n == 0 {
            return Err(GwError::Unreduceable {
                psi: psi.to_vec(),
                lambda: lambda_power,
            });
        }
        if lambda_power > 1 || psi.iter().sum::<u32>() + lambda_power != n as u32 {
            return Ok(Rational::zero());
        }
        let mut key = psi.to_vec();
        key.sort_unstable();
        if let Some(v) = self.cache.lock().unwrap().get(&(key.clone(), lambda_power)) {
            return Ok(v.clone());
        }
        let v = self.reduce_genus1(&key, lambda_power)?;
        self.cache
            .lock()
            .unwrap()
            .insert((key, lambda_power), v.clone());
        Ok(v)
    }

    fn reduce_genus1(&self, psi: &[u32], lambda_power: u32) -> Result<Rational> {
        let n = psi.len();
        if n == 1 {
            return match (psi[0], lambda_power) {
                (1, 0) => Ok(self.psi.clone()),
                (0, 1) => Ok(self.lambda1.clone()),
                _ => Err(GwError::Unreduceable {
                    psi: psi.to_vec(),
                    lambda: lambda_power,
                }),
            };
        }
        if let Some(i) = psi.iter().position(|&a| a == 0) {
            // string: <τ_0 Π τ_{a_j}> = Σ_j <τ_{a_j - 1} Π_{k≠j} τ_{a_k}>
            let rest: Vec<u32> = psi
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, &a)| a)
                .collect();
            let mut acc = Rational::zero();
            for j in 0..rest.len() {
                if rest[j] > 0 {
                    let mut lowered = rest.clone();
                    lowered[j] -= 1;
                    acc += self.hodge_integral_genus1(&lowered, lambda_power)?;
                }
            }
            return Ok(acc);
        }
        if let Some(i) = psi.iter().position(|&a| a == 1) {
            // dilaton: <τ_1 Π τ_{a_j}>_{1,n} = (2g - 2 + n - 1) <Π τ_{a_j}>_{1,n-1}
            let rest: Vec<u32> = psi
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, &a)| a)
                .collect();
            let factor = Rational::from_integer(BigInt::from(n as i64 - 1));
            return Ok(factor * self.hodge_integral_genus1(&rest, lambda_power)?);
        }
        Err(GwError::Unreduceable {
            psi: psi.to_vec(),
            lambda: lambda_power,
        })
    }

    /// Integrates a series over the vertex moduli space. Monomials of the
    /// wrong total degree contribute zero.
    pub fn integrate_vertex_series(
        &self,
        v: VertexMeasure,
        s: &NilpotentSeries,
    ) -> Result<FactoredRational> {
        if v.genus >= 2 {
            return Err(GwError::UnsupportedGenus(v.genus));
        }
        if s.shape().nsyms != v.nsyms() {
            return Err(GwError::LengthMismatch {
                expected: v.nsyms(),
                got: s.shape().nsyms,
            });
        }
        let dim = v.dimension();
        s.pair(|m| {
            if m.iter().sum::<u32>() != dim {
                return Ok(Rational::zero());
            }
            match v.lambda_symbol() {
                None => Ok(psi_integral_genus0(m)),
                Some(l) => self.hodge_integral_genus1(&m[..l], m[l]),
            }
        })
    }
}

impl Default for HodgeTable {
    fn default() -> Self {
        Self::bundled()
    }
}

/// `∫_{M̄_{0,n}} Π ψ_i^{a_i} = (n-3)! / Π a_i!` when `Σ a_i = n - 3`.
pub fn psi_integral_genus0(exponents: &[u32]) -> Rational {
    let n = exponents.len();
    if n < 3 || exponents.iter().sum::<u32>() as usize != n - 3 {
        return Rational::zero();
    }
    let den = exponents
        .iter()
        .fold(BigInt::from(1), |acc, &a| acc * factorial(a as u64));
    Rational::new(factorial(n as u64 - 3), den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat, LinearForm, SeriesShape};

    #[test]
    fn genus0_examples() {
        assert_eq!(psi_integral_genus0(&[0, 0, 0]), int(1));
        assert_eq!(psi_integral_genus0(&[1, 0, 0, 0]), int(1));
        assert_eq!(psi_integral_genus0(&[1, 1, 0, 0, 0]), int(2));
        assert_eq!(psi_integral_genus0(&[2, 0, 0, 0, 0]), int(1));
        assert_eq!(psi_integral_genus0(&[1, 0, 0]), int(0));
        assert_eq!(psi_integral_genus0(&[0, 0]), int(0));
    }

    #[test]
    fn genus1_examples() {
        let t = HodgeTable::bundled();
        assert_eq!(t.hodge_integral_genus1(&[1], 0).unwrap(), t.psi);
        assert_eq!(t.hodge_integral_genus1(&[1, 1], 0).unwrap(), t.psi);
        assert_eq!(t.hodge_integral_genus1(&[2, 0], 0).unwrap(), t.psi);
        assert_eq!(t.hodge_integral_genus1(&[0, 0], 1).unwrap(), int(0));
        assert_eq!(t.hodge_integral_genus1(&[1, 0], 1).unwrap(), t.lambda1);
        assert_eq!(
            t.hodge_integral_genus1(&[1, 1, 1], 0).unwrap(),
            &t.psi * int(2)
        );
        assert_eq!(t.hodge_integral_genus1(&[3], 0).unwrap(), int(0));
        assert!(t.hodge_integral_genus1(&[], 1).is_err());
    }

    #[test]
    fn table_parsing() {
        let t = HodgeTable::from_json_str(
            r#"{"genus1": {"psi": "1/7", "lambda1": "2/7"}, "provenance": "test"}"#,
        )
        .unwrap();
        assert_eq!(t.psi, rat(1, 7));
        assert_eq!(t.hodge_integral_genus1(&[2, 0], 0).unwrap(), rat(1, 7));
        assert!(HodgeTable::from_json_str(
            r#"{"genus1": {"psi": "-1", "lambda1": "1"}, "provenance": ""}"#
        )
        .is_err());
        assert!(HodgeTable::from_json_str("{}").is_err());
    }

    #[test]
    fn vertex_series_integration() {
        let t = HodgeTable::bundled();
        let c = LinearForm::from_ints(&[1, -1]);
        let v = VertexMeasure::new(0, 3);
        let constant = FactoredRational::inverse_linear(&c).unwrap();
        let s = NilpotentSeries::constant(SeriesShape::new(3, 0), constant.clone());
        assert_eq!(t.integrate_vertex_series(v, &s).unwrap(), constant);

        let v = VertexMeasure::new(0, 4);
        let s = NilpotentSeries::expand_inverse_linear(&c, SeriesShape::new(4, 1), 0).unwrap();
        assert_eq!(
            t.integrate_vertex_series(v, &s).unwrap(),
            FactoredRational::inverse_linear(&c).unwrap().pow(2)
        );

        // only degree-overflow monomials
        let s = NilpotentSeries::monomial(SeriesShape::new(4, 3), 1, 3, FactoredRational::one(2));
        assert!(t.integrate_vertex_series(v, &s).unwrap().is_zero());

        let v2 = VertexMeasure::new(2, 1);
        assert!(matches!(
            t.integrate_vertex_series(v2, &s),
            Err(GwError::UnsupportedGenus(2))
        ));
    }
}
