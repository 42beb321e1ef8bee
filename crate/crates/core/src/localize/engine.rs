use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::weights::{edge_factor, flag_weight, genus1_hodge};
use super::{
    nonequivariant_value, Boundary, GraphContribution, Insertion, InvariantRequest, InvariantResult,
};
use crate::algebra::{
    factorial, FactoredRational, LinearForm, NilpotentSeries, Rational, SeriesShape,
};
use crate::error::{GwError, Result};
use crate::gkm::{GkmSpace, Pole};
use crate::graphs::{
    attach_markings, check_zero_class, enumerate_skeletons, marked_graph_count, marking_orbits,
    Skeleton, VertexKind,
};
use crate::taut::{HodgeTable, VertexMeasure};

/// How the sum over marking assignments is organised.
///
/// `Grouped` sums over all assignments of a skeleton at once, grouping
/// identical insertions; `Direct` visits every marked graph class and is
/// what per-graph output uses. Both give the same exact value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Grouped,
    Direct,
}

#[derive(Clone, Debug, Default)]
pub struct ComputeOptions {
    /// Report each marked graph's contribution (implies `Direct`).
    pub per_graph: bool,
    /// Worker threads; `None` runs on the ambient rayon pool.
    pub threads: Option<usize>,
    pub strategy: Strategy,
    /// Genus-1 constants; `None` reads `GW_HODGE_TABLE` or the bundled file.
    pub hodge: Option<HodgeTable>,
}

type VertexKey = (usize, u32, Vec<LinearForm>, Vec<usize>);

struct Ctx<'a> {
    space: &'a GkmSpace,
    table: &'a HodgeTable,
    kinds: Vec<Insertion>,
    totals: Vec<usize>,
    vertex_cache: Mutex<HashMap<VertexKey, FactoredRational>>,
    edge_cache: Mutex<HashMap<(usize, u32), FactoredRational>>,
}

/// Count vectors `m ≤ totals` in mixed radix.
struct States {
    totals: Vec<usize>,
    vectors: Vec<Vec<usize>>,
}

impl States {
    fn new(totals: &[usize]) -> States {
        let mut vectors = vec![vec![]];
        for &c in totals {
            vectors = vectors
                .into_iter()
                .flat_map(|v| {
                    (0..=c).map(move |k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        States {
            totals: totals.to_vec(),
            vectors,
        }
    }

    fn index(&self, m: &[usize]) -> usize {
        m.iter()
            .zip(&self.totals)
            .fold(0, |acc, (&k, &c)| acc * (c + 1) + k)
    }
}

impl Ctx<'_> {
    fn edge(&self, sphere: usize, degree: u32) -> Result<FactoredRational> {
        if let Some(v) = self.edge_cache.lock().unwrap().get(&(sphere, degree)) {
            return Ok(v.clone());
        }
        let v = edge_factor(self.space, sphere, degree, Pole::Src)?;
        self.edge_cache
            .lock()
            .unwrap()
            .insert((sphere, degree), v.clone());
        Ok(v)
    }

    /// Integrated weight of one vertex carrying `counts[t]` insertions of
    /// kind `t`, with the given flag weights.
    fn vertex(
        &self,
        p: usize,
        genus: u32,
        flags: &[LinearForm],
        counts: &[usize],
    ) -> Result<FactoredRational> {
        let mut sorted = flags.to_vec();
        sorted.sort();
        let key = (p, genus, sorted, counts.to_vec());
        if let Some(v) = self.vertex_cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = self.vertex_uncached(p, genus, flags, counts)?;
        self.vertex_cache.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    fn vertex_uncached(
        &self,
        p: usize,
        genus: u32,
        flags: &[LinearForm],
        counts: &[usize],
    ) -> Result<FactoredRational> {
        let rank = self.space.rank();
        let nmarks: usize = counts.iter().sum();
        let mut classes = FactoredRational::one(rank);
        for (t, &c) in counts.iter().enumerate() {
            if c > 0 {
                let a = FactoredRational::from_polynomial(self.kinds[t].class.at(p).clone());
                classes = classes.mul(&a.pow(c as u32));
            }
        }
        // an edgeless vertex with too few markings only shows up as a
        // partial state of the marking sum, never in a complete graph
        let Some(kind) = VertexKind::classify(genus, nmarks, flags.len()) else {
            return Ok(FactoredRational::zero(rank));
        };
        match kind {
            VertexKind::Branch => Ok(FactoredRational::from_linear(&flags[0])),
            VertexKind::Nodal => {
                let e = FactoredRational::from_polynomial(self.space.euler_at_index(p));
                let sum = flags[0].add(&flags[1]);
                if sum.is_zero() {
                    return Err(GwError::DegenerateWeight {
                        x: flags[0].to_string(),
                        y: flags[1].to_string(),
                        k: -1,
                    });
                }
                e.div_linear(&sum)
            }
            VertexKind::MarkedEnd => {
                let t = counts.iter().position(|&c| c == 1).expect("one marking");
                Ok(classes.mul(
                    &FactoredRational::from_linear(&flags[0].neg()).pow(self.kinds[t].psi_power),
                ))
            }
            VertexKind::Stable => {
                let measure = VertexMeasure::new(genus, flags.len() + nmarks);
                let mut shape = SeriesShape::new(measure.nsyms(), measure.dimension());
                if let Some(l) = measure.lambda_symbol() {
                    shape = shape.with_cap(l, 1);
                }
                let mut s = NilpotentSeries::constant(shape.clone(), FactoredRational::one(rank));
                for (i, w) in flags.iter().enumerate() {
                    s = s.mul(&NilpotentSeries::expand_inverse_linear(
                        w,
                        shape.clone(),
                        i,
                    )?);
                }
                let mut sym = flags.len();
                for (t, &c) in counts.iter().enumerate() {
                    for _ in 0..c {
                        if self.kinds[t].psi_power > 0 {
                            s = s.shift(sym, self.kinds[t].psi_power);
                        }
                        sym += 1;
                    }
                }
                let mut scalar = FactoredRational::from_polynomial(self.space.euler_at_index(p))
                    .pow(flags.len() as u32);
                if let Some(l) = measure.lambda_symbol() {
                    s = s.mul(&genus1_hodge(self.space, p, shape, l)?);
                } else {
                    scalar = scalar.mul(&self.space.inverse_euler(p)?);
                }
                let integral = self.table.integrate_vertex_series(measure, &s)?;
                Ok(integral.mul(&scalar).mul(&classes))
            }
        }
    }

    fn flags_of(&self, skel: &Skeleton) -> Vec<Vec<LinearForm>> {
        let g = &skel.graph;
        (0..g.vertices.len())
            .map(|v| {
                g.flags_at(v)
                    .into_iter()
                    .map(|f| flag_weight(self.space, g, f))
                    .collect()
            })
            .collect()
    }

    fn edge_product(&self, skel: &Skeleton) -> Result<FactoredRational> {
        let mut acc = FactoredRational::one(self.space.rank());
        for e in &skel.graph.edges {
            acc = acc.mul(&self.edge(e.sphere, e.degree)?);
        }
        Ok(acc)
    }

    /// Sum over every marking assignment of a skeleton, weighted so that
    /// each marked graph class appears with `1/|Aut|`.
    fn grouped(&self, skel: &Skeleton) -> Result<FactoredRational> {
        let rank = self.space.rank();
        let states = States::new(&self.totals);
        let full = states.index(&self.totals);
        let flags = self.flags_of(skel);
        let mut dp = vec![FactoredRational::zero(rank); states.vectors.len()];
        dp[0] = FactoredRational::one(rank);
        for (v, vert) in skel.graph.vertices.iter().enumerate() {
            let local: Vec<FactoredRational> = states
                .vectors
                .iter()
                .map(|m| {
                    let den = m
                        .iter()
                        .fold(BigInt::from(1), |acc, &k| acc * factorial(k as u64));
                    let val = self.vertex(vert.point, vert.genus, &flags[v], m)?;
                    Ok(val.scale(&Rational::new(1.into(), den)))
                })
                .collect::<Result<_>>()?;
            let mut next = vec![Vec::new(); dp.len()];
            for (a, ma) in states.vectors.iter().enumerate() {
                if dp[a].is_zero() {
                    continue;
                }
                for (b, mb) in states.vectors.iter().enumerate() {
                    if local[b].is_zero() {
                        continue;
                    }
                    let sum: Vec<usize> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                    if sum.iter().zip(&self.totals).all(|(s, c)| s <= c) {
                        next[states.index(&sum)].push(dp[a].mul(&local[b]));
                    }
                }
            }
            dp = next
                .into_iter()
                .map(|parts| FactoredRational::sum(rank, parts))
                .collect();
        }
        let num = self
            .totals
            .iter()
            .fold(BigInt::from(1), |acc, &c| acc * factorial(c as u64));
        let den = BigInt::from(skel.aut_order) * BigInt::from(skel.graph.cover_factor());
        Ok(dp[full]
            .mul(&self.edge_product(skel)?)
            .scale(&Rational::new(num, den)))
    }

    fn direct(&self, skel: &Skeleton, insertions: &[usize]) -> Result<Vec<GraphContribution>> {
        let flags = self.flags_of(skel);
        let edges = self.edge_product(skel)?;
        let nv = skel.graph.vertices.len();
        let mut out = Vec::new();
        for f in marking_orbits(skel, insertions.len()) {
            let mut counts = vec![vec![0usize; self.kinds.len()]; nv];
            for (i, &v) in f.iter().enumerate() {
                counts[v][insertions[i]] += 1;
            }
            let mut value = edges.clone();
            for (v, vert) in skel.graph.vertices.iter().enumerate() {
                value = value.mul(&self.vertex(vert.point, vert.genus, &flags[v], &counts[v])?);
            }
            let marked = attach_markings(&skel.graph, &f);
            let aut_order = marked.aut_order();
            let cover_factor = marked.cover_factor();
            let value = value.scale(&Rational::new(
                1.into(),
                BigInt::from(aut_order) * BigInt::from(cover_factor),
            ));
            out.push(GraphContribution {
                graph: marked.canonical_form(),
                aut_order,
                cover_factor,
                value,
            });
        }
        Ok(out)
    }
}

/// Equivariant invariant `⟨τ_{k_1}α_1, …, τ_{k_n}α_n⟩_{g,n,A}` by the graph sum.
pub fn compute_invariant(req: &InvariantRequest, opts: &ComputeOptions) -> Result<InvariantResult> {
    let space = req.space;
    if req.boundary != Boundary::Fundamental {
        return Err(GwError::UnsupportedBoundary);
    }
    if req.genus >= 2 {
        return Err(GwError::UnsupportedGenus(req.genus));
    }
    space.validate().into_result()?;
    if req.class.len() != space.h2_rank {
        return Err(GwError::LengthMismatch {
            expected: space.h2_rank,
            got: req.class.len(),
        });
    }
    let n = req.insertions.len();
    if req.class.iter().all(|&c| c == 0) {
        check_zero_class(req.genus, n)?;
    }
    let table = match &opts.hodge {
        Some(t) => t.clone(),
        None => HodgeTable::from_env()?,
    };

    let mut kinds: Vec<Insertion> = Vec::new();
    let mut kind_of = Vec::with_capacity(n);
    for ins in &req.insertions {
        let t = match kinds.iter().position(|k| k.same_kind(ins)) {
            Some(t) => t,
            None => {
                kinds.push(ins.clone());
                kinds.len() - 1
            }
        };
        kind_of.push(t);
    }
    let mut totals = vec![0usize; kinds.len()];
    for &t in &kind_of {
        totals[t] += 1;
    }
    let ctx = Ctx {
        space,
        table: &table,
        kinds,
        totals,
        vertex_cache: Mutex::new(HashMap::new()),
        edge_cache: Mutex::new(HashMap::new()),
    };

    let skeletons = enumerate_skeletons(space, req.genus, &req.class)?;
    let graph_count: BigInt = skeletons.iter().map(|s| marked_graph_count(s, n)).sum();
    let direct = opts.per_graph || opts.strategy == Strategy::Direct;

    let work = |skel: &Skeleton| -> Result<(FactoredRational, Vec<GraphContribution>)> {
        let run = || {
            if direct {
                let parts = ctx.direct(skel, &kind_of)?;
                let total =
                    FactoredRational::sum(space.rank(), parts.iter().map(|c| c.value.clone()));
                Ok((total, parts))
            } else {
                Ok((ctx.grouped(skel)?, Vec::new()))
            }
        };
        run().map_err(|e: GwError| e.in_graph(skel.graph.describe(space)))
    };
    let results: Vec<_> = match opts.threads {
        None => skeletons.par_iter().map(work).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| GwError::Parse(format!("thread pool: {e}")))?
            .install(|| skeletons.par_iter().map(work).collect()),
    };

    let mut totals = Vec::with_capacity(results.len());
    let mut per_graph = Vec::new();
    for r in results {
        let (t, parts) = r?;
        totals.push(t);
        per_graph.extend(parts);
    }
    let equivariant = FactoredRational::sum(space.rank(), totals);
    per_graph.sort_by(|a, b| a.graph.cmp(&b.graph));
    Ok(InvariantResult {
        is_polynomial: equivariant.is_polynomial(),
        constant: nonequivariant_value(&equivariant).ok(),
        equivariant,
        vdim: req.vdim()?,
        insertion_degree: req.insertion_degree(),
        graph_count,
        per_graph: opts.per_graph.then_some(per_graph),
    })
}
