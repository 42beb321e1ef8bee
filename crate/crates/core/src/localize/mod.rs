//! The graph sum: equivariant Gromov-Witten invariants of a GKM target as
//! a sum over fixed-locus graphs.

mod engine;
mod weights;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::{format_rational, FactoredRational, Polynomial, Rational};
use crate::error::{GwError, Result};
use crate::gkm::{EquivariantClass, GkmSpace};
use crate::graphs::{DecoratedGraph, VertexKind};

pub use engine::{compute_invariant, ComputeOptions, Strategy};
pub use weights::{b_factor, edge_factor, flag_weight, vertex_hodge_factor};

/// `τ_k α`: a class with a power of the cotangent line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Insertion {
    pub name: String,
    pub class: EquivariantClass,
    pub psi_power: u32,
}

impl Insertion {
    pub fn new(name: impl Into<String>, class: EquivariantClass, psi_power: u32) -> Self {
        Insertion {
            name: name.into(),
            class,
            psi_power,
        }
    }

    /// Parses `NAME`, `NAME^k`, products `A*B`, or `tau:K:NAME`.
    pub fn parse(space: &GkmSpace, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(rest) = spec.strip_prefix("tau:") {
            let (k, name) = rest
                .split_once(':')
                .ok_or_else(|| GwError::Parse(format!("expected tau:K:NAME, got '{spec}'")))?;
            let k: u32 = k
                .parse()
                .map_err(|_| GwError::Parse(format!("bad descendant power in '{spec}'")))?;
            return Ok(Insertion::new(name, space.resolve_class(name)?, k));
        }
        Ok(Insertion::new(spec, space.resolve_class(spec)?, 0))
    }

    /// Complex degree `|α|/2 + k`.
    pub fn degree(&self) -> u32 {
        self.class.degree / 2 + self.psi_power
    }

    pub fn label(&self) -> String {
        if self.psi_power == 0 {
            self.name.clone()
        } else {
            format!("tau_{}({})", self.psi_power, self.name)
        }
    }

    fn same_kind(&self, other: &Insertion) -> bool {
        self.psi_power == other.psi_power && self.class == other.class
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Fundamental,
    Other(String),
}

#[derive(Clone, Debug)]
pub struct InvariantRequest<'a> {
    pub space: &'a GkmSpace,
    pub genus: u32,
    pub class: Vec<i64>,
    pub insertions: Vec<Insertion>,
    pub boundary: Boundary,
}

impl<'a> InvariantRequest<'a> {
    pub fn new(
        space: &'a GkmSpace,
        genus: u32,
        class: Vec<i64>,
        insertions: Vec<Insertion>,
    ) -> Self {
        InvariantRequest {
            space,
            genus,
            class,
            insertions,
            boundary: Boundary::Fundamental,
        }
    }

    /// Parses each insertion spec against the space's class table.
    pub fn parse(space: &'a GkmSpace, genus: u32, class: Vec<i64>, specs: &[&str]) -> Result<Self> {
        let ins = specs
            .iter()
            .map(|s| Insertion::parse(space, s))
            .collect::<Result<_>>()?;
        Ok(Self::new(space, genus, class, ins))
    }

    /// `(dim X - 3)(1 - g) + c₁(A) + n`.
    pub fn vdim(&self) -> Result<i64> {
        let c1 = if self.class.iter().all(|&c| c == 0) {
            0
        } else {
            self.space.c1(&self.class)?
        };
        Ok((self.space.dim as i64 - 3) * (1 - self.genus as i64)
            + c1
            + self.insertions.len() as i64)
    }

    pub fn insertion_degree(&self) -> i64 {
        self.insertions.iter().map(|i| i.degree() as i64).sum()
    }
}

/// Weight of a single marked graph.
#[derive(Clone, Debug)]
pub struct GraphContribution {
    pub graph: DecoratedGraph,
    pub aut_order: u64,
    pub cover_factor: u64,
    pub value: FactoredRational,
}

impl GraphContribution {
    pub fn to_json(&self, space: &GkmSpace) -> Value {
        let mut g = self.graph.to_json(space);
        g["aut_order"] = json!(self.aut_order);
        g["cover_factor"] = json!(self.cover_factor);
        g["value"] = self.value.to_json();
        g
    }
}

#[derive(Clone, Debug)]
pub struct InvariantResult {
    pub equivariant: FactoredRational,
    pub is_polynomial: bool,
    pub constant: Option<Rational>,
    pub vdim: i64,
    pub insertion_degree: i64,
    pub graph_count: num_bigint::BigInt,
    pub per_graph: Option<Vec<GraphContribution>>,
}

impl InvariantResult {
    pub fn to_json(&self, space: &GkmSpace) -> Value {
        json!({
            "equivariant": self.equivariant.to_json(),
            "constant": self.constant.as_ref().map(format_rational),
            "vdim": self.vdim,
            "graph_count": crate::algebra::bigint_to_json(&self.graph_count),
            "per_graph": self.per_graph.as_ref().map(|v| v.iter().map(|c| c.to_json(space)).collect::<Vec<_>>()),
        })
    }
}

/// Non-equivariant limit of an equivariant value.
///
/// Degree-zero values give their constant, homogeneous values of negative
/// degree give 0, and anything carrying positive-degree terms is an error.
pub fn nonequivariant_value(v: &FactoredRational) -> Result<Rational> {
    if v.is_zero() {
        return Ok(Rational::zero());
    }
    if let Some(c) = v.as_rational() {
        return Ok(c);
    }
    if let Some(p) = v.as_polynomial() {
        return Err(GwError::PositiveDegree(
            p.total_degree().map_or(0, i64::from),
        ));
    }
    match v.degree() {
        Some(d) if d < 0 => Ok(Rational::zero()),
        Some(d) if d > 0 => Err(GwError::PositiveDegree(d)),
        _ => Err(GwError::NotInR(v.to_string())),
    }
}

/// Restricted insertion product at a vertex, with the ψ powers left over.
pub type VertexInsertions = (Polynomial, Vec<(usize, u32)>);

/// Per-vertex restriction of the insertions of a marked graph: the product
/// of the classes restricted to the vertex's fixed point (times the scalar
/// ψ factors at marked ends), and the formal ψ powers left at stable
/// vertices as `(marking, power)` pairs.
pub fn restrict_insertions(
    space: &GkmSpace,
    graph: &DecoratedGraph,
    insertions: &[Insertion],
) -> Result<Vec<VertexInsertions>> {
    if graph.num_markings() != insertions.len() {
        return Err(GwError::LengthMismatch {
            expected: graph.num_markings(),
            got: insertions.len(),
        });
    }
    let kinds = graph.classify_vertices().kinds;
    let mut out = Vec::new();
    for (v, vert) in graph.vertices.iter().enumerate() {
        let mut scalar = Polynomial::one(space.rank());
        let mut psi = Vec::new();
        for &m in &vert.markings {
            let ins = &insertions[m];
            scalar = &scalar * ins.class.at(vert.point);
            if ins.psi_power > 0 {
                if kinds[v] == VertexKind::MarkedEnd {
                    let w = flag_weight(space, graph, graph.flags_at(v)[0]).neg();
                    for _ in 0..ins.psi_power {
                        scalar = scalar.mul_linear(&w);
                    }
                } else {
                    psi.push((m, ins.psi_power));
                }
            }
        }
        out.push((scalar, psi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat, LinearForm};
    use crate::gkm::{builtin, projective, Pole};
    use crate::graphs::{enumerate_graphs, GraphEdge, GraphVertex};

    fn lf(c: &[i64]) -> LinearForm {
        LinearForm::from_ints(c)
    }

    fn value(space: &GkmSpace, g: u32, a: i64, ins: &[&str]) -> FactoredRational {
        let req = InvariantRequest::parse(space, g, vec![a], ins).unwrap();
        compute_invariant(&req, &ComputeOptions::default())
            .unwrap()
            .equivariant
    }

    #[test]
    fn flag_weights() {
        let p1 = projective(1);
        let mut g = enumerate_graphs(&p1, 0, 0, &[1]).unwrap().remove(0);
        let f = g.flags_at(g.edges[0].src)[0];
        assert_eq!(flag_weight(&p1, &g, f), lf(&[-1, 1]));
        g.edges[0].degree = 2;
        assert_eq!(flag_weight(&p1, &g, f), lf(&[-1, 1]).scale(&rat(1, 2)));
        let back = g.flags_at(g.edges[0].dst)[0];
        assert_eq!(flag_weight(&p1, &g, back), lf(&[1, -1]).scale(&rat(1, 2)));
    }

    #[test]
    fn hodge_factor_examples() {
        let p1 = projective(1);
        let h = vertex_hodge_factor(&p1, 0, 0).unwrap();
        assert_eq!(
            h.coefficient(&[]),
            FactoredRational::inverse_linear(&lf(&[-1, 1])).unwrap()
        );
        let p2 = projective(2);
        let h = vertex_hodge_factor(&p2, 0, 0).unwrap();
        let expected = FactoredRational::inverse_linear(&lf(&[-1, 1, 0]))
            .unwrap()
            .div_linear(&lf(&[-1, 0, 1]))
            .unwrap();
        assert_eq!(h.coefficient(&[]), expected);
        let h = vertex_hodge_factor(&p1, 0, 1).unwrap();
        let w = lf(&[-1, 1]);
        assert_eq!(h.coefficient(&[0]), FactoredRational::one(2));
        assert_eq!(
            h.coefficient(&[1]),
            FactoredRational::inverse_linear(&w).unwrap().neg()
        );
        assert!(h.coefficient(&[2]).is_zero());
        assert!(matches!(
            vertex_hodge_factor(&p1, 0, 2),
            Err(GwError::UnsupportedGenus(2))
        ));
    }

    #[test]
    fn b_factor_examples() {
        let x = lf(&[1, 0, -1]);
        let y = lf(&[0, 1, 0]);
        assert_eq!(
            b_factor(&x, &y, 0).unwrap(),
            FactoredRational::inverse_linear(&x).unwrap()
        );
        assert_eq!(b_factor(&x, &y, -1).unwrap(), FactoredRational::one(3));
        let expected = FactoredRational::inverse_linear(&x)
            .unwrap()
            .div_linear(&x.sub(&y))
            .unwrap()
            .div_linear(&x.sub(&y.scale(&int(2))))
            .unwrap();
        assert_eq!(b_factor(&x, &y, 2).unwrap(), expected);
        assert_eq!(
            b_factor(&x, &y, -3).unwrap(),
            FactoredRational::from_linear(&x.add(&y)).mul_linear(&x.add(&y.scale(&int(2))))
        );
        assert!(matches!(
            b_factor(&x, &x, 3),
            Err(GwError::DegenerateWeight { k: 1, .. })
        ));
    }

    #[test]
    fn edge_factor_examples() {
        let p1 = projective(1);
        let w = lf(&[-1, 1]);
        let inv = FactoredRational::inverse_linear(&w).unwrap();
        assert_eq!(edge_factor(&p1, 0, 1, Pole::Src).unwrap(), inv.pow(2).neg());
        assert_eq!(
            edge_factor(&p1, 0, 2, Pole::Src).unwrap(),
            inv.pow(4).scale(&int(4))
        );
        let p2 = projective(2);
        let w = lf(&[-1, 1, 0]);
        let expected = FactoredRational::inverse_linear(&w)
            .unwrap()
            .pow(2)
            .neg()
            .div_linear(&lf(&[-1, 0, 1]))
            .unwrap()
            .div_linear(&lf(&[0, -1, 1]))
            .unwrap();
        assert_eq!(edge_factor(&p2, 0, 1, Pole::Src).unwrap(), expected);
    }

    #[test]
    fn edge_factor_is_pole_independent() {
        for name in ["P1", "P2", "P3", "P1xP1"] {
            let x = builtin(name).unwrap();
            for s in 0..x.spheres.len() {
                for d in 1..=4 {
                    assert_eq!(
                        edge_factor(&x, s, d, Pole::Src).unwrap(),
                        edge_factor(&x, s, d, Pole::Dst).unwrap(),
                        "{name} sphere {s} degree {d}"
                    );
                }
            }
        }
    }

    #[test]
    fn p1_hand_values() {
        let p1 = projective(1);
        assert_eq!(value(&p1, 0, 1, &[]), FactoredRational::one(2));
        assert_eq!(value(&p1, 0, 1, &["pt", "pt"]), FactoredRational::one(2));
        assert!(value(&p1, 0, 2, &[]).is_zero());
        assert_eq!(value(&p1, 0, 1, &["H"]), FactoredRational::one(2));
    }

    #[test]
    fn p1_hand_graph_weights() {
        let p1 = projective(1);
        let w = lf(&[-1, 1]);
        let inv2 = FactoredRational::inverse_linear(&w).unwrap().pow(2);
        let req = InvariantRequest::new(&p1, 0, vec![2], vec![]);
        let opts = ComputeOptions {
            per_graph: true,
            ..Default::default()
        };
        let r = compute_invariant(&req, &opts).unwrap();
        let per = r.per_graph.unwrap();
        assert_eq!(per.len(), 3);
        let mut chain = 0;
        for c in &per {
            if c.graph.edges.len() == 2 {
                assert_eq!(c.aut_order, 2);
                assert_eq!(c.value, inv2.scale(&rat(1, 4)));
                chain += 1;
            } else {
                assert_eq!(c.cover_factor, 2);
                assert_eq!(c.value, inv2.scale(&rat(-1, 2)));
            }
        }
        assert_eq!(chain, 2);
        assert!(r.equivariant.is_zero());
        assert_eq!(r.constant, Some(int(0)));
    }

    #[test]
    fn pt_pt_four_graphs() {
        let p1 = projective(1);
        let req = InvariantRequest::parse(&p1, 0, vec![1], &["pt", "pt"]).unwrap();
        let r = compute_invariant(
            &req,
            &ComputeOptions {
                per_graph: true,
                strategy: Strategy::Direct,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.per_graph.as_ref().unwrap().len(), 4);
        assert_eq!(r.graph_count, 4.into());
        assert_eq!(r.constant, Some(int(1)));
        // (u0^2 + u1^2 - 2 u0 u1) / (u1 - u0)^2, term by term
        let w = lf(&[-1, 1]);
        let inv2 = FactoredRational::inverse_linear(&w).unwrap().pow(2);
        let terms: Vec<FactoredRational> =
            r.per_graph.unwrap().into_iter().map(|c| c.value).collect();
        let u0sq = FactoredRational::from_linear(&lf(&[1, 0]))
            .pow(2)
            .mul(&inv2);
        let u1sq = FactoredRational::from_linear(&lf(&[0, 1]))
            .pow(2)
            .mul(&inv2);
        let cross = FactoredRational::from_linear(&lf(&[1, 0]))
            .mul_linear(&lf(&[0, 1]))
            .mul(&inv2)
            .neg();
        assert!(terms.contains(&u0sq));
        assert!(terms.contains(&u1sq));
        assert_eq!(terms.iter().filter(|t| **t == cross).count(), 2);
    }

    #[test]
    fn genus1_constant_map() {
        // <α>_{1,1,0} = -1/24 ∫ α c_{dim-1}
        let p1 = projective(1);
        assert_eq!(value(&p1, 1, 0, &["pt"]).as_rational(), Some(rat(-1, 24)));
        let p2 = projective(2);
        // c_1(P2) = 3H, so -1/24 ∫ H · 3H = -1/8
        assert_eq!(value(&p2, 1, 0, &["H"]).as_rational(), Some(rat(-1, 8)));
    }

    #[test]
    fn nonequivariant_rules() {
        assert_eq!(
            nonequivariant_value(&FactoredRational::one(2)).unwrap(),
            int(1)
        );
        let w = lf(&[1, -1]);
        let ratio = FactoredRational::from_linear(&w).div_linear(&w).unwrap();
        assert_eq!(nonequivariant_value(&ratio).unwrap(), int(1));
        let neg = FactoredRational::inverse_linear(&w).unwrap().pow(2);
        assert_eq!(nonequivariant_value(&neg).unwrap(), int(0));
        assert!(matches!(
            nonequivariant_value(&FactoredRational::from_linear(&w)),
            Err(GwError::PositiveDegree(1))
        ));
        let mixed = FactoredRational::one(2).add(&FactoredRational::inverse_linear(&w).unwrap());
        assert!(matches!(
            nonequivariant_value(&mixed),
            Err(GwError::NotInR(_))
        ));
    }

    #[test]
    fn restriction_examples() {
        let p1 = projective(1);
        let g = DecoratedGraph::new(
            vec![
                GraphVertex {
                    point: 0,
                    genus: 0,
                    markings: vec![0],
                },
                GraphVertex {
                    point: 1,
                    genus: 0,
                    markings: vec![],
                },
            ],
            vec![GraphEdge {
                sphere: 0,
                degree: 1,
                src: 0,
                dst: 1,
            }],
        );
        let pt = Insertion::parse(&p1, "pt").unwrap();
        let r = restrict_insertions(&p1, &g, &[pt]).unwrap();
        assert_eq!(r[0].0, Polynomial::from_linear(&lf(&[-1, 0])));
        assert!(r[0].1.is_empty());
        let t = Insertion::parse(&p1, "tau:1:1").unwrap();
        let r = restrict_insertions(&p1, &g, std::slice::from_ref(&t)).unwrap();
        assert_eq!(r[0].0, Polynomial::from_linear(&lf(&[1, -1])));
        let mut g3 = g.clone();
        g3.vertices[0].markings = vec![0, 1];
        let r = restrict_insertions(&p1, &g3, &[t.clone(), t]).unwrap();
        assert_eq!(r[0].1, vec![(0, 1), (1, 1)]);
    }
}
