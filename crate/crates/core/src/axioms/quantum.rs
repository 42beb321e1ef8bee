use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::{format_rational, Rational};
use crate::error::{GwError, Result};
use crate::gkm::GkmSpace;
use crate::localize::{
    compute_invariant, nonequivariant_value, ComputeOptions, Insertion, InvariantRequest,
};

/// An element of small quantum cohomology: for each curve class `A`, the
/// coefficient vector of `q^A` in the chosen basis.
pub type QuantumElement = BTreeMap<Vec<i64>, Vec<Rational>>;

/// Structure constants of the small quantum product, truncated at a
/// Novikov area bound.
#[derive(Clone, Debug)]
pub struct QuantumProductTable {
    pub basis: Vec<String>,
    pub area_bound: Rational,
    /// Effective classes up to the bound (including 0), by area then class.
    pub classes: Vec<Vec<i64>>,
    /// Novikov exponent of each class, its symplectic area.
    pub areas: Vec<Rational>,
    /// `constants[a][i][j][k]`: coefficient of `q^{classes[a]} basis[k]`
    /// in `basis[i] * basis[j]`.
    pub constants: Vec<Vec<Vec<Vec<Rational>>>>,
    class_index: HashMap<Vec<i64>, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssociativityReport {
    pub triples: usize,
    /// `(i, j, k)` with `(b_i * b_j) * b_k != b_i * (b_j * b_k)`.
    pub failures: Vec<(usize, usize, usize)>,
}

impl AssociativityReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

impl QuantumProductTable {
    pub fn basis_element(&self, i: usize) -> QuantumElement {
        let mut v = vec![Rational::zero(); self.basis.len()];
        v[i] = Rational::from_integer(1.into());
        BTreeMap::from([(vec![0; self.classes[0].len()], v)])
    }

    /// Product of two truncated elements, dropping classes past the bound.
    pub fn product(&self, x: &QuantumElement, y: &QuantumElement) -> QuantumElement {
        let nb = self.basis.len();
        let mut out = QuantumElement::new();
        for (a, xa) in x {
            for (b, yb) in y {
                for (c, consts) in self.classes.iter().zip(&self.constants) {
                    let total: Vec<i64> = a
                        .iter()
                        .zip(b)
                        .zip(c)
                        .map(|((p, q), r)| p + q + r)
                        .collect();
                    if !self.class_index.contains_key(&total) {
                        continue;
                    }
                    let entry = out
                        .entry(total)
                        .or_insert_with(|| vec![Rational::zero(); nb]);
                    for (i, xi) in xa.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                        for (j, yj) in yb.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                            let s = xi * yj;
                            for (k, c) in consts[i][j].iter().enumerate() {
                                if !c.is_zero() {
                                    entry[k] += &s * c;
                                }
                            }
                        }
                    }
                }
            }
        }
        out.retain(|_, v| v.iter().any(|c| !c.is_zero()));
        out
    }

    pub fn multiply(&self, i: usize, j: usize) -> QuantumElement {
        self.product(&self.basis_element(i), &self.basis_element(j))
    }

    /// Compares `(b_i b_j) b_k` with `b_i (b_j b_k)` on every ordered triple.
    pub fn check_associativity(&self) -> AssociativityReport {
        let n = self.basis.len();
        let mut failures = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = self.product(&self.multiply(i, j), &self.basis_element(k));
                    let right = self.product(&self.basis_element(i), &self.multiply(j, k));
                    if left != right {
                        failures.push((i, j, k));
                    }
                }
            }
        }
        AssociativityReport {
            triples: n * n * n,
            failures,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut products = Vec::new();
        for i in 0..self.basis.len() {
            for j in i..self.basis.len() {
                let terms: Vec<Value> = self
                    .multiply(i, j)
                    .iter()
                    .flat_map(|(class, v)| {
                        let area = format_rational(&self.areas[self.class_index[class]]);
                        v.iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(move |(k, c)| {
                                json!({
                                    "class": class,
                                    "novikov": area,
                                    "basis": self.basis[k],
                                    "coefficient": format_rational(c),
                                })
                            })
                    })
                    .collect();
                products
                    .push(json!({"left": self.basis[i], "right": self.basis[j], "terms": terms}));
            }
        }
        json!({
            "basis": self.basis,
            "area_bound": format_rational(&self.area_bound),
            "products": products,
        })
    }
}

/// Nonzero effective classes generated by the invariant spheres, up to an
/// area bound, together with the zero class.
fn effective_classes(space: &GkmSpace, bound: &Rational) -> Result<Vec<(Rational, Vec<i64>)>> {
    let zero = vec![0i64; space.h2_rank];
    let mut seen = BTreeSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(c) = frontier.pop() {
        for s in &space.spheres {
            let next: Vec<i64> = c.iter().zip(&s.class).map(|(a, b)| a + b).collect();
            if space.area(&next)? <= *bound && seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    let mut out = seen
        .into_iter()
        .map(|c| Ok((space.area(&c)?, c)))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

/// Non-equivariant value, with positive-degree remainders read as 0.
fn constant(v: &crate::algebra::FactoredRational) -> Result<Rational> {
    match nonequivariant_value(v) {
        Err(GwError::PositiveDegree(_)) => Ok(Rational::zero()),
        r => r,
    }
}

fn invert(m: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| Rational::from_integer(((i == j) as i64).into())));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(GwError::SingularPairing)?;
        a.swap(col, p);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Small quantum product on `basis` from genus-0 three-point invariants,
/// with the Poincaré pairing inverted through the fixed-point formula, and
/// its associativity up to the area bound.
pub fn wdvv_quantum_product(
    space: &GkmSpace,
    basis: &[&str],
    area_bound: &Rational,
    opts: &ComputeOptions,
) -> Result<(QuantumProductTable, AssociativityReport)> {
    let ins: Vec<Insertion> = basis
        .iter()
        .map(|b| Insertion::parse(space, b))
        .collect::<Result<_>>()?;
    let n = ins.len();
    let mut pairing = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            pairing[i][j] = constant(&space.abbv_integrate(&ins[i].class.mul(&ins[j].class))?)?;
        }
    }
    let inverse = invert(&pairing)?;
    let found = effective_classes(space, area_bound)?;
    let mut constants = Vec::with_capacity(found.len());
    for (_, class) in &found {
        let mut three: HashMap<Vec<usize>, Rational> = HashMap::new();
        let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let mut key = vec![i, j, l];
                    key.sort_unstable();
                    let v = match three.get(&key) {
                        Some(v) => v.clone(),
                        None => {
                            let req = InvariantRequest::new(
                                space,
                                0,
                                class.clone(),
                                vec![ins[i].clone(), ins[j].clone(), ins[l].clone()],
                            );
                            // a degree mismatch has zero constant term, so the
                            // graph sum is only run for matching degrees
                            let v = if req.insertion_degree() == req.vdim()? {
                                constant(&compute_invariant(&req, opts)?.equivariant)?
                            } else {
                                Rational::zero()
                            };
                            three.insert(key, v.clone());
                            v
                        }
                    };
                    if v.is_zero() {
                        continue;
                    }
                    for k in 0..n {
                        if !inverse[l][k].is_zero() {
                            c[i][j][k] += &v * &inverse[l][k];
                        }
                    }
                }
            }
        }
        constants.push(c);
    }
    let table = QuantumProductTable {
        basis: basis.iter().map(|s| s.to_string()).collect(),
        area_bound: area_bound.clone(),
        class_index: found
            .iter()
            .enumerate()
            .map(|(i, (_, c))| (c.clone(), i))
            .collect(),
        areas: found.iter().map(|(a, _)| a.clone()).collect(),
        classes: found.into_iter().map(|(_, c)| c).collect(),
        constants,
    };
    let report = table.check_associativity();
    Ok((table, report))
}
