//! Canonical labelling by colour refinement and individualization.
//!
//! The search explores every leaf of the individualization tree, so the
//! leaves achieving the minimal encoding are exactly one orbit of the
//! vertex automorphism group. That gives both the canonical form and the
//! group itself.

use std::collections::BTreeMap;

use super::{DecoratedGraph, GraphEdge, GraphVertex};

type Encoding = (Vec<GraphVertex>, Vec<GraphEdge>);

#[derive(Clone, Debug)]
pub struct Labelling {
    pub canonical: DecoratedGraph,
    /// Vertex permutations `σ` (as `σ[v]`) preserving all decorations,
    /// identity included.
    pub vertex_automorphisms: Vec<Vec<usize>>,
    /// Number of ways to permute identical parallel edges, `Π m!`.
    pub edge_symmetry: u64,
}

impl Labelling {
    pub fn compute(g: &DecoratedGraph) -> Labelling {
        let n = g.vertices.len();
        let mut adj: Vec<Vec<(usize, u32, bool, usize)>> = vec![Vec::new(); n];
        for e in &g.edges {
            adj[e.src].push((e.sphere, e.degree, true, e.dst));
            adj[e.dst].push((e.sphere, e.degree, false, e.src));
        }
        let initial: Vec<_> = (0..n)
            .map(|v| {
                let mut inc: Vec<_> = adj[v].iter().map(|&(s, d, src, _)| (s, d, src)).collect();
                inc.sort_unstable();
                (g.vertices[v].clone(), inc)
            })
            .collect();
        let colors = refine(&adj, rank(&initial));
        let mut best: Option<(Encoding, Vec<Vec<usize>>)> = None;
        search(g, &adj, colors, &mut best);
        let (enc, leaves) = best.expect("at least one leaf");
        let first = &leaves[0];
        let mut inv_first = vec![0; n];
        for (v, &pos) in first.iter().enumerate() {
            inv_first[pos] = v;
        }
        // σ = π⁻¹ ∘ π₀ for each minimal leaf π
        let vertex_automorphisms = leaves
            .iter()
            .map(|pi| {
                let mut inv = vec![0; n];
                for (v, &pos) in pi.iter().enumerate() {
                    inv[pos] = v;
                }
                (0..n).map(|v| inv[first[v]]).collect()
            })
            .collect();
        let mut groups: BTreeMap<GraphEdge, u64> = BTreeMap::new();
        for e in &enc.1 {
            *groups.entry(*e).or_default() += 1;
        }
        let edge_symmetry = groups.values().map(|&m| (1..=m).product::<u64>()).product();
        Labelling {
            canonical: DecoratedGraph {
                vertices: enc.0,
                edges: enc.1,
            },
            vertex_automorphisms,
            edge_symmetry,
        }
    }

    pub fn aut_order(&self) -> u64 {
        self.vertex_automorphisms.len() as u64 * self.edge_symmetry
    }
}

fn rank<T: Ord>(sigs: &[T]) -> Vec<usize> {
    let mut sorted: Vec<&T> = sigs.iter().collect();
    sorted.sort();
    sorted.dedup();
    sigs.iter()
        .map(|s| sorted.binary_search(&s).unwrap())
        .collect()
}

fn num_colors(c: &[usize]) -> usize {
    c.iter().copied().max().map_or(0, |m| m + 1)
}

fn refine(adj: &[Vec<(usize, u32, bool, usize)>], mut colors: Vec<usize>) -> Vec<usize> {
    loop {
        let sigs: Vec<_> = (0..colors.len())
            .map(|v| {
                let mut nb: Vec<_> = adj[v]
                    .iter()
                    .map(|&(s, d, src, w)| (s, d, src, colors[w]))
                    .collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let next = rank(&sigs);
        if num_colors(&next) == num_colors(&colors) {
            return next;
        }
        colors = next;
    }
}

fn encode(g: &DecoratedGraph, pos: &[usize]) -> Encoding {
    let mut vertices = vec![None; pos.len()];
    for (v, &p) in pos.iter().enumerate() {
        vertices[p] = Some(g.vertices[v].clone());
    }
    let mut edges: Vec<GraphEdge> = g
        .edges
        .iter()
        .map(|e| GraphEdge {
            sphere: e.sphere,
            degree: e.degree,
            src: pos[e.src],
            dst: pos[e.dst],
        })
        .collect();
    edges.sort_unstable();
    (vertices.into_iter().map(Option::unwrap).collect(), edges)
}

fn search(
    g: &DecoratedGraph,
    adj: &[Vec<(usize, u32, bool, usize)>],
    colors: Vec<usize>,
    best: &mut Option<(Encoding, Vec<Vec<usize>>)>,
) {
    let n = colors.len();
    let k = num_colors(&colors);
    if k == n {
        let enc = encode(g, &colors);
        match best {
            Some((b, leaves)) if *b == enc => leaves.push(colors),
            Some((b, _)) if *b < enc => {}
            _ => *best = Some((enc, vec![colors])),
        }
        return;
    }
    let mut sizes = vec![0usize; k];
    for &c in &colors {
        sizes[c] += 1;
    }
    let target = (0..k)
        .find(|&c| sizes[c] > 1)
        .expect("non-discrete partition");
    for v in (0..n).filter(|&v| colors[v] == target) {
        let sigs: Vec<(usize, bool)> = (0..n).map(|u| (colors[u], u != v)).collect();
        search(g, adj, refine(adj, rank(&sigs)), best);
    }
}
