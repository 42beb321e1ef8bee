//! Oracles shared by the integration tests. None of them call into the
//! engine's graph canonicalization or localization code.
#![allow(dead_code)]

use gwloc::gkm::GkmSpace;
use gwloc::graphs::DecoratedGraph;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

fn connected(nv: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn genus_splits(parts: usize, total: u32) -> BigInt {
    // number of ways to write total as an ordered sum of `parts` naturals
    let mut c = BigInt::one();
    for i in 0..total as usize {
        c = c * BigInt::from(parts - 1 + total as usize - i) / BigInt::from(i + 1);
    }
    c
}

/// Number of decorated graphs with labelled vertices `0..V` and labelled
/// edges `0..E`, summed over all `V` and `E`.
pub fn labelled_count(space: &GkmSpace, genus: u32, n: usize, class: &[i64]) -> BigInt {
    let target: BigRational = space.area(class).unwrap();
    let min_area = space.spheres.iter().map(|s| s.area.clone()).min().unwrap();
    let max_edges = (&target / &min_area).floor().to_integer();
    let max_edges: usize = max_edges.try_into().unwrap();
    let np = space.points.len();
    let mut total = BigInt::zero();
    for ne in 1..=max_edges {
        for nv in 1..=ne + 1 {
            let h1 = ne + 1 - nv;
            if h1 as u32 > genus {
                continue;
            }
            let splits = genus_splits(nv, genus - h1 as u32);
            let markings = BigInt::from(nv).pow(n as u32);
            let mut pts = vec![0usize; nv];
            loop {
                let mut options = Vec::new();
                for (s, sph) in space.spheres.iter().enumerate() {
                    for a in (0..nv).filter(|&a| pts[a] == sph.src) {
                        for b in (0..nv).filter(|&b| pts[b] == sph.dst) {
                            options.push((s, a, b));
                        }
                    }
                }
                let mut count = 0u64;
                let mut chosen = Vec::new();
                edge_tuples(
                    space,
                    class,
                    &target,
                    &options,
                    ne,
                    nv,
                    &mut chosen,
                    &mut count,
                );
                total += BigInt::from(count) * &splits * &markings;
                let mut i = 0;
                while i < nv {
                    pts[i] += 1;
                    if pts[i] < np {
                        break;
                    }
                    pts[i] = 0;
                    i += 1;
                }
                if i == nv {
                    break;
                }
            }
        }
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn edge_tuples(
    space: &GkmSpace,
    class: &[i64],
    target: &BigRational,
    options: &[(usize, usize, usize)],
    ne: usize,
    nv: usize,
    chosen: &mut Vec<(usize, u32, usize, usize)>,
    count: &mut u64,
) {
    let used: BigRational = chosen
        .iter()
        .map(|&(s, d, _, _)| &space.spheres[s].area * BigRational::from_integer(d.into()))
        .sum();
    if chosen.len() == ne {
        let mut a = vec![0i64; class.len()];
        for &(s, d, _, _) in chosen.iter() {
            for (x, c) in a.iter_mut().zip(&space.spheres[s].class) {
                *x += d as i64 * c;
            }
        }
        let pairs: Vec<(usize, usize)> = chosen.iter().map(|&(_, _, x, y)| (x, y)).collect();
        if a == class && connected(nv, &pairs) {
            *count += 1;
        }
        return;
    }
    for &(s, x, y) in options {
        let mut d = 1u32;
        loop {
            let extra = &space.spheres[s].area * BigRational::from_integer(d.into());
            if &used + &extra > *target {
                break;
            }
            chosen.push((s, d, x, y));
            edge_tuples(space, class, target, options, ne, nv, chosen, count);
            chosen.pop();
            d += 1;
        }
    }
}

/// Permutation-search isomorphism test.
pub fn brute_isomorphic(a: &DecoratedGraph, b: &DecoratedGraph) -> bool {
    if a.vertices.len() != b.vertices.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    permutations(a.vertices.len())
        .into_iter()
        .any(|p| maps_onto(a, b, &p))
}

fn maps_onto(a: &DecoratedGraph, b: &DecoratedGraph, p: &[usize]) -> bool {
    if (0..p.len()).any(|v| a.vertices[v] != b.vertices[p[v]]) {
        return false;
    }
    let mut ea: Vec<_> = a
        .edges
        .iter()
        .map(|e| (e.sphere, e.degree, p[e.src], p[e.dst]))
        .collect();
    let mut eb: Vec<_> = b
        .edges
        .iter()
        .map(|e| (e.sphere, e.degree, e.src, e.dst))
        .collect();
    ea.sort_unstable();
    eb.sort_unstable();
    ea == eb
}

/// Automorphism count by permutation search, with parallel identical
/// edges contributing `m!`.
pub fn brute_aut_order(a: &DecoratedGraph) -> u64 {
    let perms = permutations(a.vertices.len())
        .into_iter()
        .filter(|p| maps_onto(a, a, p))
        .count() as u64;
    let mut es: Vec<_> = a
        .edges
        .iter()
        .map(|e| (e.sphere, e.degree, e.src, e.dst))
        .collect();
    es.sort_unstable();
    let mut mult = 1u64;
    let mut i = 0;
    while i < es.len() {
        let j = (i..es.len()).find(|&j| es[j] != es[i]).unwrap_or(es.len());
        mult *= (1..=(j - i) as u64).product::<u64>();
        i = j;
    }
    perms * mult
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Number of rational plane curves of degree `d` through `3d - 1` points,
/// by the WDVV recursion.
pub fn kontsevich(d: u64) -> BigInt {
    let mut n = vec![BigInt::zero(), BigInt::one()];
    let binom = |a: u64, b: u64| -> BigInt {
        if b > a {
            return BigInt::zero();
        }
        (0..b).fold(BigInt::one(), |acc, i| {
            acc * BigInt::from(a - i) / BigInt::from(i + 1)
        })
    };
    for k in 2..=d {
        let mut s = BigInt::zero();
        for d1 in 1..k {
            let d2 = k - d1;
            let t = BigInt::from(d1 * d1 * d2 * d2) * binom(3 * k - 4, 3 * d1 - 2)
                - BigInt::from(d1 * d1 * d1 * d2) * binom(3 * k - 4, 3 * d1 - 1);
            s += &n[d1 as usize] * &n[d2 as usize] * t;
        }
        n.push(s);
    }
    n[d as usize].clone()
}
