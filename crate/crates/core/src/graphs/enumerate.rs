use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use super::canon::Labelling;
use super::{DecoratedGraph, GraphEdge, GraphVertex};
use crate::error::{GwError, Result};
use crate::gkm::GkmSpace;

/// An isomorphism class of unmarked graphs (genus decorations included)
/// together with its automorphism group.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub graph: DecoratedGraph,
    pub vertex_automorphisms: Vec<Vec<usize>>,
    pub aut_order: u64,
}

impl Skeleton {
    fn from_graph(g: &DecoratedGraph) -> Skeleton {
        let l = Labelling::compute(g);
        let aut_order = l.aut_order();
        Skeleton {
            graph: l.canonical,
            vertex_automorphisms: l.vertex_automorphisms,
            aut_order,
        }
    }
}

fn check_class_len(space: &GkmSpace, class: &[i64]) -> Result<()> {
    if class.len() != space.h2_rank {
        return Err(GwError::LengthMismatch {
            expected: space.h2_rank,
            got: class.len(),
        });
    }
    Ok(())
}

/// All unmarked graph classes of the given genus and curve class, sorted
/// by canonical form. For the zero class these are the single vertices.
pub fn enumerate_skeletons(space: &GkmSpace, genus: u32, class: &[i64]) -> Result<Vec<Skeleton>> {
    check_class_len(space, class)?;
    if class.iter().all(|&c| c == 0) {
        return Ok((0..space.points.len())
            .map(|p| Skeleton::from_graph(&DecoratedGraph::single_vertex(p, genus, vec![])))
            .collect());
    }
    let target = space.area(class)?;
    if target <= Zero::zero() {
        return Ok(vec![]);
    }

    let mut level: BTreeSet<DecoratedGraph> = (0..space.points.len())
        .map(|p| DecoratedGraph::single_vertex(p, 0, vec![]))
        .collect();
    let mut found = Vec::new();
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        for g in &level {
            if g.class(space) == class {
                found.push(g.clone());
            }
            let room = &target - g.area(space);
            let degrees = |s: usize| {
                let most = (&room / &space.spheres[s].area).floor().to_integer();
                1..=u32::try_from(most).unwrap_or(0)
            };
            for v in 0..g.vertices.len() {
                let p = g.vertices[v].point;
                for s in space.spheres_through(p) {
                    let sph = &space.spheres[s];
                    let other = if sph.src == p { sph.dst } else { sph.src };
                    for d in degrees(s) {
                        let mut h = g.clone();
                        let w = h.vertices.len();
                        h.vertices.push(GraphVertex {
                            point: other,
                            genus: 0,
                            markings: vec![],
                        });
                        let (src, dst) = if sph.src == p { (v, w) } else { (w, v) };
                        h.edges.push(GraphEdge {
                            sphere: s,
                            degree: d,
                            src,
                            dst,
                        });
                        next.insert(h.canonical_form());
                    }
                }
            }
            if g.h1() < genus {
                for (s, sph) in space.spheres.iter().enumerate() {
                    for a in (0..g.vertices.len()).filter(|&a| g.vertices[a].point == sph.src) {
                        for b in (0..g.vertices.len()).filter(|&b| g.vertices[b].point == sph.dst) {
                            for d in degrees(s) {
                                let mut h = g.clone();
                                h.edges.push(GraphEdge {
                                    sphere: s,
                                    degree: d,
                                    src: a,
                                    dst: b,
                                });
                                next.insert(h.canonical_form());
                            }
                        }
                    }
                }
            }
        }
        level = next;
    }

    let mut out = BTreeSet::new();
    for g in found {
        let h1 = g.h1();
        if h1 > genus {
            continue;
        }
        for split in compositions(g.vertices.len(), genus - h1) {
            let mut h = g.clone();
            for (v, s) in h.vertices.iter_mut().zip(split) {
                v.genus = s;
            }
            out.insert(h.canonical_form());
        }
    }
    Ok(out.iter().map(Skeleton::from_graph).collect())
}

fn compositions(parts: usize, total: u32) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(parts - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// One marking map `{0..n} → V` per orbit of the skeleton's vertex
/// automorphisms (the lexicographically least member).
pub fn marking_orbits(skel: &Skeleton, n: usize) -> Vec<Vec<usize>> {
    let nv = skel.graph.vertices.len();
    let mut out = Vec::new();
    let mut f = vec![0usize; n];
    loop {
        let least = skel
            .vertex_automorphisms
            .iter()
            .all(|s| f.iter().map(|&v| s[v]).collect::<Vec<_>>() >= f);
        if least {
            out.push(f.clone());
        }
        // next map in lex order
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            f[i] += 1;
            if f[i] < nv {
                break;
            }
            f[i] = 0;
        }
    }
}

/// Number of marked graph classes over a skeleton, by Burnside's lemma.
pub fn marked_graph_count(skel: &Skeleton, n: usize) -> BigInt {
    let total: BigInt = skel
        .vertex_automorphisms
        .iter()
        .map(|s| {
            let fixed = s.iter().enumerate().filter(|(v, &w)| *v == w).count();
            BigInt::from(fixed).pow(n as u32)
        })
        .sum();
    total / BigInt::from(skel.vertex_automorphisms.len())
}

pub(crate) fn check_zero_class(genus: u32, n: usize) -> Result<()> {
    if 2 * genus as i64 - 2 + n as i64 <= 0 {
        return Err(GwError::UnstableZeroClass { genus, markings: n });
    }
    Ok(())
}

/// Number of decorated graphs with `n` markings, without listing them.
pub fn graph_count(space: &GkmSpace, genus: u32, n: usize, class: &[i64]) -> Result<BigInt> {
    check_class_len(space, class)?;
    if class.iter().all(|&c| c == 0) {
        check_zero_class(genus, n)?;
    }
    Ok(enumerate_skeletons(space, genus, class)?
        .iter()
        .map(|s| marked_graph_count(s, n))
        .sum())
}

pub(crate) fn attach_markings(skel: &DecoratedGraph, f: &[usize]) -> DecoratedGraph {
    let mut g = skel.clone();
    for (i, &v) in f.iter().enumerate() {
        g.vertices[v].markings.push(i);
    }
    g
}

/// All isomorphism classes of decorated graphs with `n` markings, sorted by
/// canonical form.
pub fn enumerate_graphs(
    space: &GkmSpace,
    genus: u32,
    n: usize,
    class: &[i64],
) -> Result<Vec<DecoratedGraph>> {
    check_class_len(space, class)?;
    if class.iter().all(|&c| c == 0) {
        check_zero_class(genus, n)?;
    }
    let mut out = Vec::new();
    for skel in enumerate_skeletons(space, genus, class)? {
        for f in marking_orbits(&skel, n) {
            out.push(attach_markings(&skel.graph, &f).canonical_form());
        }
    }
    out.sort();
    Ok(out)
}
