use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{FactoredRational, LinearForm, Polynomial, Rational};
use crate::error::{GwError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusContext {
    pub names: Vec<String>,
}

impl TorusContext {
    pub fn standard(rank: usize) -> Self {
        TorusContext {
            names: (0..rank).map(|i| format!("u{i}")).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }
}

/// Isolated fixed point with the weights of the torus on its tangent space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPoint {
    pub id: String,
    pub tangent_weights: Vec<LinearForm>,
}

/// Invariant sphere joining two fixed points. `src` and `dst` index into
/// [`GkmSpace::points`]; `connection` pairs indices into the tangent-weight
/// lists of `src` and `dst`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sphere {
    pub id: String,
    pub src: usize,
    pub dst: usize,
    pub tangent_at_src: LinearForm,
    pub class: Vec<i64>,
    pub area: Rational,
    pub connection: Option<Vec<(usize, usize)>>,
}

/// Cohomology class given by its restrictions to the fixed points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantClass {
    /// Cohomological degree (even).
    pub degree: u32,
    /// One polynomial per fixed point, in point order.
    pub restrictions: Vec<Polynomial>,
    /// Set when restrictions may mix in terms of lower degree.
    pub inhomogeneous: bool,
}

impl EquivariantClass {
    pub fn one(space: &GkmSpace) -> Self {
        let r = space.rank();
        EquivariantClass {
            degree: 0,
            restrictions: vec![Polynomial::one(r); space.points.len()],
            inhomogeneous: false,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        EquivariantClass {
            degree: self.degree + other.degree,
            restrictions: self
                .restrictions
                .iter()
                .zip(&other.restrictions)
                .map(|(a, b)| a * b)
                .collect(),
            inhomogeneous: self.inhomogeneous || other.inhomogeneous,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        EquivariantClass {
            degree: self.degree * e,
            restrictions: self.restrictions.iter().map(|p| p.pow(e)).collect(),
            inhomogeneous: self.inhomogeneous,
        }
    }

    pub fn at(&self, point: usize) -> &Polynomial {
        &self.restrictions[point]
    }
}

/// Localization data of the target manifold: fixed points, invariant
/// spheres, the H₂ lattice rank and a table of named classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkmSpace {
    pub torus: TorusContext,
    pub points: Vec<FixedPoint>,
    pub spheres: Vec<Sphere>,
    pub h2_rank: usize,
    pub dim: usize,
    pub classes: BTreeMap<String, EquivariantClass>,
}

/// One non-sphere tangent direction along a sphere: its weight at each pole
/// and the degree `a` of the corresponding normal line bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalDirection {
    pub src_weight: LinearForm,
    pub dst_weight: LinearForm,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationFailure {
    pub rule: &'static str,
    pub element: String,
    pub message: String,
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.rule, self.element, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, rule: &'static str, element: impl Into<String>, message: impl Into<String>) {
        self.failures.push(ValidationFailure {
            rule,
            element: element.into(),
            message: message.into(),
        });
    }

    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            Ok(())
        } else {
            Err(GwError::InvalidSpace(
                self.failures
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "ok");
        }
        for x in &self.failures {
            writeln!(f, "{x}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pole {
    Src,
    Dst,
}

impl GkmSpace {
    pub fn rank(&self) -> usize {
        self.torus.rank()
    }

    pub fn point_index(&self, id: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| GwError::UnknownPoint(id.to_string()))
    }

    pub fn sphere_index(&self, id: &str) -> Result<usize> {
        self.spheres
            .iter()
            .position(|s| s.id == id)
            .ok_or_else(|| GwError::UnknownSphere(id.to_string()))
    }

    pub fn class(&self, name: &str) -> Result<&EquivariantClass> {
        self.classes
            .get(name)
            .ok_or_else(|| GwError::UnknownClass(name.to_string()))
    }

    /// Resolves `NAME`, `NAME^k` and `*`-separated products of those.
    pub fn resolve_class(&self, expr: &str) -> Result<EquivariantClass> {
        let mut acc = EquivariantClass::one(self);
        for factor in expr.split('*').map(str::trim) {
            if factor.is_empty() {
                return Err(GwError::Parse(format!("empty factor in class '{expr}'")));
            }
            let cls = if let Some(c) = self.classes.get(factor) {
                c.clone()
            } else if let Some((base, e)) = factor.rsplit_once('^') {
                let e: u32 = e
                    .parse()
                    .map_err(|_| GwError::Parse(format!("bad exponent in '{factor}'")))?;
                self.class(base)?.pow(e)
            } else {
                return Err(GwError::UnknownClass(factor.to_string()));
            };
            acc = acc.mul(&cls);
        }
        Ok(acc)
    }

    /// Weight `w(S, p)` of the sphere's tangent line at one of its poles.
    pub fn pole_weight(&self, sphere: usize, pole: Pole) -> LinearForm {
        let s = &self.spheres[sphere];
        match pole {
            Pole::Src => s.tangent_at_src.clone(),
            Pole::Dst => s.tangent_at_src.neg(),
        }
    }

    /// Pole of `sphere` sitting at `point`, if any.
    pub fn pole_at(&self, sphere: usize, point: usize) -> Option<Pole> {
        let s = &self.spheres[sphere];
        if s.src == point {
            Some(Pole::Src)
        } else if s.dst == point {
            Some(Pole::Dst)
        } else {
            None
        }
    }

    pub fn spheres_through(&self, point: usize) -> impl Iterator<Item = usize> + '_ {
        self.spheres
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.src == point || s.dst == point)
            .map(|(i, _)| i)
    }

    /// Equivariant Euler class `e_T(T_p X)`: the product of tangent weights.
    pub fn euler_at(&self, point: &str) -> Result<Polynomial> {
        let p = self.point_index(point)?;
        Ok(self.euler_at_index(p))
    }

    pub fn euler_at_index(&self, p: usize) -> Polynomial {
        self.points[p]
            .tangent_weights
            .iter()
            .fold(Polynomial::one(self.rank()), |acc, w| acc.mul_linear(w))
    }

    /// `1 / e_T(T_p X)` as a factored rational function.
    pub fn inverse_euler(&self, p: usize) -> Result<FactoredRational> {
        FactoredRational::new(
            Rational::one(),
            Polynomial::one(self.rank()),
            self.points[p].tangent_weights.clone(),
        )
    }

    fn tangent_index(&self, point: usize, w: &LinearForm) -> Vec<usize> {
        self.points[point]
            .tangent_weights
            .iter()
            .enumerate()
            .filter(|(_, t)| *t == w)
            .map(|(i, _)| i)
            .collect()
    }

    /// Normal directions along `sphere`, read from its `src` pole.
    pub fn normal_degrees(&self, sphere: usize) -> Result<Vec<NormalDirection>> {
        self.normal_degrees_from(sphere, Pole::Src)
    }

    /// Normal directions read from the chosen pole. From the `Dst` pole the
    /// weights swap roles and the sphere weight flips sign, so each degree
    /// `a` is unchanged.
    pub fn normal_degrees_from(&self, sphere: usize, pole: Pole) -> Result<Vec<NormalDirection>> {
        let s = &self.spheres[sphere];
        let w = self.pole_weight(sphere, Pole::Src);
        let src_idx = self.tangent_index(s.src, &w);
        let dst_idx = self.tangent_index(s.dst, &w.neg());
        let invalid = |msg: String| GwError::InvalidSpace(format!("sphere '{}': {msg}", s.id));
        if src_idx.len() != 1 || dst_idx.len() != 1 {
            return Err(invalid(
                "sphere weight is not a unique tangent weight at both poles".into(),
            ));
        }
        let (is, id) = (src_idx[0], dst_idx[0]);
        let ts = &self.points[s.src].tangent_weights;
        let td = &self.points[s.dst].tangent_weights;
        let pairs: Vec<(usize, usize)> = match &s.connection {
            Some(conn) => {
                let mut seen_s = vec![false; ts.len()];
                let mut seen_d = vec![false; td.len()];
                for &(i, j) in conn {
                    if i >= ts.len()
                        || j >= td.len()
                        || i == is
                        || j == id
                        || seen_s[i]
                        || seen_d[j]
                    {
                        return Err(invalid(format!("connection pair ({i}, {j}) is invalid")));
                    }
                    seen_s[i] = true;
                    seen_d[j] = true;
                }
                if conn.len() + 1 != ts.len() {
                    return Err(invalid(
                        "connection does not cover every normal direction".into(),
                    ));
                }
                conn.clone()
            }
            None => {
                let mut pairs = Vec::new();
                let mut taken = vec![false; td.len()];
                for (i, li) in ts.iter().enumerate() {
                    if i == is {
                        continue;
                    }
                    let cands: Vec<usize> = (0..td.len())
                        .filter(|&j| j != id && li.sub(&td[j]).integer_ratio(&w).is_some())
                        .collect();
                    match cands.as_slice() {
                        [] => {
                            return Err(invalid(format!(
                                "direction {li} at '{}' is congruent to no direction at '{}'",
                                self.points[s.src].id, self.points[s.dst].id
                            )))
                        }
                        [j] if !taken[*j] => {
                            taken[*j] = true;
                            pairs.push((i, *j));
                        }
                        _ => {
                            return Err(GwError::ConnectionRequired {
                                sphere: s.id.clone(),
                                reason: format!(
                                    "direction {li} has an ambiguous congruent partner"
                                ),
                            })
                        }
                    }
                }
                pairs
            }
        };
        let mut out = Vec::with_capacity(pairs.len());
        for (i, j) in pairs {
            let (ls, ld) = (&ts[i], &td[j]);
            let a = ls
                .sub(ld)
                .integer_ratio(&w)
                .ok_or_else(|| invalid(format!("GKM congruence fails for {ls} and {ld}")))?;
            let a = i64::try_from(a).map_err(|_| invalid("normal degree out of range".into()))?;
            out.push(match pole {
                Pole::Src => NormalDirection {
                    src_weight: ls.clone(),
                    dst_weight: ld.clone(),
                    degree: a,
                },
                Pole::Dst => {
                    let a_dst = ld
                        .sub(ls)
                        .integer_ratio(&w.neg())
                        .and_then(|a| i64::try_from(a).ok())
                        .ok_or_else(|| invalid("normal degree out of range".into()))?;
                    NormalDirection {
                        src_weight: ld.clone(),
                        dst_weight: ls.clone(),
                        degree: a_dst,
                    }
                }
            });
        }
        Ok(out)
    }

    /// `c₁(T_X)·[S] = 2 + Σ a_i`.
    pub fn c1_of_sphere(&self, sphere: usize) -> Result<i64> {
        Ok(2 + self
            .normal_degrees(sphere)?
            .iter()
            .map(|n| n.degree)
            .sum::<i64>())
    }

    /// Linear functional on H₂ agreeing with `values` on the sphere classes.
    fn functional(&self, values: &[Rational]) -> Option<Vec<Rational>> {
        let rows: Vec<Vec<Rational>> = self
            .spheres
            .iter()
            .map(|s| {
                s.class
                    .iter()
                    .map(|&c| Rational::from_integer(c.into()))
                    .collect()
            })
            .collect();
        solve_functional(&rows, values, self.h2_rank)
    }

    fn pair_with(&self, values: &[Rational], class: &[i64], what: &str) -> Result<Rational> {
        if class.len() != self.h2_rank {
            return Err(GwError::LengthMismatch {
                expected: self.h2_rank,
                got: class.len(),
            });
        }
        let f = self
            .functional(values)
            .ok_or_else(|| GwError::InvalidSpace(format!("{what} is not linear on H2")))?;
        Ok(f.iter()
            .zip(class)
            .map(|(a, &c)| a * Rational::from_integer(c.into()))
            .sum())
    }

    /// Symplectic area `⟨ω, A⟩`.
    pub fn area(&self, class: &[i64]) -> Result<Rational> {
        let v: Vec<Rational> = self.spheres.iter().map(|s| s.area.clone()).collect();
        self.pair_with(&v, class, "area")
    }

    /// `c₁(T_X)·A`.
    pub fn c1(&self, class: &[i64]) -> Result<i64> {
        let v = (0..self.spheres.len())
            .map(|i| {
                self.c1_of_sphere(i)
                    .map(|c| Rational::from_integer(c.into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let r = self.pair_with(&v, class, "c1")?;
        if !r.is_integer() {
            return Err(GwError::InvalidSpace(format!(
                "c1 pairing {r} is not an integer"
            )));
        }
        i64::try_from(r.to_integer()).map_err(|_| GwError::InvalidSpace("c1 out of range".into()))
    }

    /// Degree of a class of cohomological degree 2 on a sphere:
    /// `(α(src) - α(dst)) / w(S, src)`, required to be a constant.
    pub fn divisor_on_sphere(&self, alpha: &EquivariantClass, sphere: usize) -> Result<Rational> {
        let s = &self.spheres[sphere];
        let diff = alpha.at(s.src) - alpha.at(s.dst);
        if diff.is_zero() {
            return Ok(Rational::zero());
        }
        let q = diff.div_linear(&s.tangent_at_src).ok_or_else(|| {
            GwError::InvalidSpace(format!("class is not GKM-compatible along '{}'", s.id))
        })?;
        if !q.is_constant() {
            return Err(GwError::InvalidSpace(format!(
                "class does not have constant degree on '{}'",
                s.id
            )));
        }
        Ok(q.constant_term())
    }

    /// Non-equivariant pairing `∫_A D` for a divisor class `D`.
    pub fn divisor_pairing(&self, divisor: &EquivariantClass, class: &[i64]) -> Result<Rational> {
        let v = (0..self.spheres.len())
            .map(|i| self.divisor_on_sphere(divisor, i))
            .collect::<Result<Vec<_>>>()?;
        self.pair_with(&v, class, "divisor")
    }

    /// Full scan of the structural invariants. Never stops at the first
    /// failure.
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let k = self.rank();
        if k == 0 {
            r.fail("torus", "torus", "torus rank must be at least 1");
        }
        let mut ids = std::collections::BTreeSet::new();
        for p in &self.points {
            if !ids.insert(&p.id) {
                r.fail("points", &p.id, "duplicate fixed point id");
            }
            if p.tangent_weights.len() != self.dim {
                r.fail(
                    "points",
                    &p.id,
                    format!(
                        "{} tangent weights, dimension is {}",
                        p.tangent_weights.len(),
                        self.dim
                    ),
                );
            }
            for w in &p.tangent_weights {
                if w.rank() != k {
                    r.fail("points", &p.id, format!("weight {w} has wrong torus rank"));
                } else if w.is_zero() {
                    r.fail(
                        "Assumption i) violated",
                        &p.id,
                        "zero tangent weight (fixed point not isolated)",
                    );
                }
            }
            for (i, a) in p.tangent_weights.iter().enumerate() {
                for b in &p.tangent_weights[i + 1..] {
                    if a == b {
                        r.fail("points", &p.id, format!("repeated tangent weight {a}"));
                    }
                }
            }
        }
        if !r.passed() {
            return r;
        }
        let mut sids = std::collections::BTreeSet::new();
        for s in &self.spheres {
            if !sids.insert(&s.id) {
                r.fail("spheres", &s.id, "duplicate sphere id");
            }
            if s.src >= self.points.len() || s.dst >= self.points.len() {
                r.fail("spheres", &s.id, "pole index out of range");
                continue;
            }
            if s.src == s.dst {
                r.fail("spheres", &s.id, "poles must be distinct fixed points");
            }
            if s.class.len() != self.h2_rank {
                r.fail(
                    "spheres",
                    &s.id,
                    format!(
                        "class has length {}, h2_rank is {}",
                        s.class.len(),
                        self.h2_rank
                    ),
                );
            }
            if !s.area.is_positive() {
                r.fail("spheres", &s.id, "area must be positive");
            }
            if s.tangent_at_src.rank() != k || s.tangent_at_src.is_zero() {
                r.fail("spheres", &s.id, "invalid tangent weight at src");
                continue;
            }
            if self.tangent_index(s.src, &s.tangent_at_src).is_empty() {
                r.fail(
                    "spheres",
                    &s.id,
                    "tangent_at_src is not a tangent weight of src",
                );
            }
            if self
                .tangent_index(s.dst, &s.tangent_at_src.neg())
                .is_empty()
            {
                r.fail("spheres", &s.id, "pole weights not opposite");
            }
        }
        if !r.passed() {
            return r;
        }
        for (pi, p) in self.points.iter().enumerate() {
            for (ti, t) in p.tangent_weights.iter().enumerate() {
                let hits = self
                    .spheres_through(pi)
                    .filter(|&si| {
                        let pole = self.pole_at(si, pi).unwrap();
                        self.pole_weight(si, pole) == *t
                    })
                    .count();
                match hits {
                    0 => r.fail(
                        "Assumption ii) violated",
                        &p.id,
                        format!("tangent direction {ti} ({t}) lies on no invariant sphere"),
                    ),
                    1 => {}
                    _ => r.fail(
                        "Assumption ii) violated",
                        &p.id,
                        format!("tangent direction {ti} ({t}) lies on {hits} spheres"),
                    ),
                }
            }
        }
        if !r.passed() {
            return r;
        }
        for (si, s) in self.spheres.iter().enumerate() {
            match (
                self.normal_degrees(si),
                self.normal_degrees_from(si, Pole::Dst),
            ) {
                (Ok(a), Ok(b)) => {
                    let da: Vec<i64> = a.iter().map(|n| n.degree).collect();
                    let db: Vec<i64> = b.iter().map(|n| n.degree).collect();
                    if da != db {
                        r.fail("c1", &s.id, "normal degrees differ between the poles");
                    }
                }
                (Err(e), _) | (_, Err(e)) => r.fail("normal bundle", &s.id, e.to_string()),
            }
        }
        if !r.passed() {
            return r;
        }
        let zero_class = vec![0; self.h2_rank];
        if let Err(e) = self.c1(&zero_class) {
            r.fail("c1", "H2", e.to_string());
        }
        if let Err(e) = self.area(&zero_class) {
            r.fail("area", "H2", e.to_string());
        }
        for (name, c) in &self.classes {
            if c.degree % 2 != 0 {
                r.fail("classes", name, "degree must be even");
            }
            if c.restrictions.len() != self.points.len() {
                r.fail("classes", name, "needs one restriction per fixed point");
                continue;
            }
            for (pi, q) in c.restrictions.iter().enumerate() {
                if q.nvars() != k {
                    r.fail(
                        "classes",
                        name,
                        format!("restriction at '{}' has wrong rank", self.points[pi].id),
                    );
                    continue;
                }
                if !c.inhomogeneous && !q.is_zero() && q.homogeneous_degree() != Some(c.degree / 2)
                {
                    r.fail(
                        "classes",
                        name,
                        format!(
                            "restriction at '{}' is not homogeneous of degree {}",
                            self.points[pi].id,
                            c.degree / 2
                        ),
                    );
                }
            }
            for s in &self.spheres {
                let diff = c.at(s.src) - c.at(s.dst);
                if !diff.is_zero() && diff.div_linear(&s.tangent_at_src).is_none() {
                    r.fail(
                        "classes",
                        name,
                        format!("restrictions not congruent along '{}'", s.id),
                    );
                }
            }
        }
        r
    }

    /// `∫_X α = Σ_p α(p) / e_T(T_p X)`.
    pub fn abbv_integrate(&self, alpha: &EquivariantClass) -> Result<FactoredRational> {
        let parts = (0..self.points.len())
            .map(|p| Ok(self.inverse_euler(p)?.mul_polynomial(alpha.at(p))))
            .collect::<Result<Vec<_>>>()?;
        Ok(FactoredRational::sum(self.rank(), parts))
    }
}

/// Solves `rows · c = values` for `c ∈ Q^dim`, free variables set to zero.
fn solve_functional(
    rows: &[Vec<Rational>],
    values: &[Rational],
    dim: usize,
) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .zip(values)
        .map(|(r, v)| {
            let mut row = r.clone();
            row.push(v.clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..dim {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pr = m[row].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[dim].is_zero()) {
        return None;
    }
    let mut c = vec![Rational::zero(); dim];
    for (i, &col) in pivots.iter().enumerate() {
        c[col] = m[i][dim].clone();
    }
    Some(c)
}
