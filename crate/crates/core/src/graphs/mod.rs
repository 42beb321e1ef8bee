//! Decorated graphs indexing the components of the torus-fixed locus in the
//! moduli of stable maps.

mod canon;
mod enumerate;

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::Rational;
use crate::error::{GwError, Result};
use crate::gkm::GkmSpace;

pub use canon::Labelling;
pub(crate) use enumerate::{attach_markings, check_zero_class};
pub use enumerate::{
    enumerate_graphs, enumerate_skeletons, graph_count, marked_graph_count, marking_orbits,
    Skeleton,
};

/// A contracted component sitting over a fixed point. Markings are
/// zero-based internally and kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphVertex {
    pub point: usize,
    pub genus: u32,
    pub markings: Vec<usize>,
}

/// A `degree`-fold cover of an invariant sphere. `src` is the vertex lying
/// over the sphere's source pole and `dst` the one over its target pole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphEdge {
    pub sphere: usize,
    pub degree: u32,
    pub src: usize,
    pub dst: usize,
}

impl GraphEdge {
    pub fn other(&self, v: usize) -> usize {
        if self.src == v {
            self.dst
        } else {
            self.src
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedGraph {
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
}

/// One end of an edge: the edge index and whether the end is the source.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flag {
    pub edge: usize,
    pub vertex: usize,
    pub at_src: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Stable,
    /// genus 0, no markings, two edges
    Nodal,
    /// genus 0, no markings, one edge
    Branch,
    /// genus 0, one marking, one edge
    MarkedEnd,
}

impl VertexKind {
    pub fn classify(genus: u32, markings: usize, edges: usize) -> Option<VertexKind> {
        if 2 * genus as i64 - 2 + markings as i64 + edges as i64 > 0 {
            return Some(VertexKind::Stable);
        }
        match (genus, markings, edges) {
            (0, 0, 2) => Some(VertexKind::Nodal),
            (0, 0, 1) => Some(VertexKind::Branch),
            (0, 1, 1) => Some(VertexKind::MarkedEnd),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            VertexKind::Stable => "stable",
            VertexKind::Nodal => "nodal",
            VertexKind::Branch => "branch",
            VertexKind::MarkedEnd => "marked-end",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexClassification {
    pub kinds: Vec<VertexKind>,
    pub stable_flags: Vec<Flag>,
}

impl DecoratedGraph {
    pub fn new(vertices: Vec<GraphVertex>, edges: Vec<GraphEdge>) -> Self {
        DecoratedGraph { vertices, edges }
    }

    pub fn single_vertex(point: usize, genus: u32, markings: Vec<usize>) -> Self {
        DecoratedGraph {
            vertices: vec![GraphVertex {
                point,
                genus,
                markings,
            }],
            edges: vec![],
        }
    }

    pub fn flags_at(&self, v: usize) -> Vec<Flag> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.src == v {
                out.push(Flag {
                    edge: i,
                    vertex: v,
                    at_src: true,
                });
            }
            if e.dst == v {
                out.push(Flag {
                    edge: i,
                    vertex: v,
                    at_src: false,
                });
            }
        }
        out
    }

    pub fn edge_valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.src == v || e.dst == v)
            .count()
    }

    /// First Betti number `|E| - |V| + 1` of a connected graph.
    pub fn h1(&self) -> u32 {
        (self.edges.len() + 1).saturating_sub(self.vertices.len()) as u32
    }

    pub fn genus(&self) -> u32 {
        self.vertices.iter().map(|v| v.genus).sum::<u32>() + self.h1()
    }

    pub fn num_markings(&self) -> usize {
        self.vertices.iter().map(|v| v.markings.len()).sum()
    }

    pub fn cover_factor(&self) -> u64 {
        self.edges.iter().map(|e| e.degree as u64).product()
    }

    pub fn class(&self, space: &GkmSpace) -> Vec<i64> {
        let mut a = vec![0i64; space.h2_rank];
        for e in &self.edges {
            for (x, c) in a.iter_mut().zip(&space.spheres[e.sphere].class) {
                *x += e.degree as i64 * c;
            }
        }
        a
    }

    pub fn area(&self, space: &GkmSpace) -> Rational {
        self.edges.iter().fold(BigRational::zero(), |acc, e| {
            acc + &space.spheres[e.sphere].area * Rational::from_integer(e.degree.into())
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                if e.src == v || e.dst == v {
                    let w = e.other(v);
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Checks the structural conditions relative to a target.
    pub fn check(&self, space: &GkmSpace, genus: u32, n: usize, class: &[i64]) -> Result<()> {
        let bad = |m: String| Err(GwError::InvalidSpace(format!("malformed graph: {m}")));
        if !self.is_connected() {
            return bad("not connected".into());
        }
        for e in &self.edges {
            let s = space
                .spheres
                .get(e.sphere)
                .ok_or_else(|| GwError::UnknownSphere(e.sphere.to_string()))?;
            if e.degree == 0 {
                return bad("edge of degree 0".into());
            }
            if self.vertices[e.src].point != s.src || self.vertices[e.dst].point != s.dst {
                return bad(format!("edge on {} does not sit at its poles", s.id));
            }
        }
        let mut marks: Vec<usize> = self
            .vertices
            .iter()
            .flat_map(|v| v.markings.iter().copied())
            .collect();
        marks.sort_unstable();
        if marks != (0..n).collect::<Vec<_>>() {
            return bad("markings do not partition 1..n".into());
        }
        if self.genus() != genus {
            return bad(format!("genus {} instead of {genus}", self.genus()));
        }
        if self.class(space) != class {
            return bad("wrong curve class".into());
        }
        Ok(())
    }

    pub fn classify_vertices(&self) -> VertexClassification {
        let mut kinds = Vec::with_capacity(self.vertices.len());
        let mut stable_flags = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let flags = self.flags_at(i);
            // only the zero-class single vertex can fail to classify, and
            // that case is rejected before any graph is built
            let kind = VertexKind::classify(v.genus, v.markings.len(), flags.len())
                .unwrap_or(VertexKind::Stable);
            if kind == VertexKind::Stable {
                stable_flags.extend(flags);
            }
            kinds.push(kind);
        }
        VertexClassification {
            kinds,
            stable_flags,
        }
    }

    pub fn canonical_form(&self) -> DecoratedGraph {
        Labelling::compute(self).canonical
    }

    pub fn aut_order(&self) -> u64 {
        Labelling::compute(self).aut_order()
    }

    pub fn is_isomorphic(&self, other: &DecoratedGraph) -> bool {
        self.vertices.len() == other.vertices.len()
            && self.edges.len() == other.edges.len()
            && self.canonical_form() == other.canonical_form()
    }

    /// JSON with point and sphere ids and one-based markings.
    pub fn to_json(&self, space: &GkmSpace) -> Value {
        json!({
            "vertices": self.vertices.iter().map(|v| json!({
                "point": space.points[v.point].id,
                "genus": v.genus,
                "markings": v.markings.iter().map(|m| m + 1).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!({
                "sphere": space.spheres[e.sphere].id,
                "degree": e.degree,
                "vertices": [e.src, e.dst],
            })).collect::<Vec<_>>(),
        })
    }

    pub fn describe(&self, space: &GkmSpace) -> String {
        let vs: Vec<String> = self
            .vertices
            .iter()
            .map(|v| {
                let mut s = space.points[v.point].id.clone();
                if v.genus > 0 {
                    s.push_str(&format!(" g{}", v.genus));
                }
                if !v.markings.is_empty() {
                    let m: Vec<String> = v.markings.iter().map(|m| (m + 1).to_string()).collect();
                    s.push_str(&format!(" {{{}}}", m.join(",")));
                }
                s
            })
            .collect();
        let es: Vec<String> = self
            .edges
            .iter()
            .map(|e| {
                format!(
                    "{}x{}({}-{})",
                    space.spheres[e.sphere].id, e.degree, e.src, e.dst
                )
            })
            .collect();
        format!("[{}] [{}]", vs.join("; "), es.join(" "))
    }
}

impl fmt::Display for DecoratedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "v{i}@{}g{}{:?}", v.point, v.genus, v.markings)?;
        }
        for e in &self.edges {
            write!(f, " s{}x{}:{}-{}", e.sphere, e.degree, e.src, e.dst)?;
        }
        Ok(())
    }
}
