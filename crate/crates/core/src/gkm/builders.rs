use std::collections::BTreeMap;

use num_traits::One;

use super::space::{EquivariantClass, FixedPoint, GkmSpace, Sphere, TorusContext};
use crate::algebra::{LinearForm, Polynomial, Rational};
use crate::error::{GwError, Result};

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &["P1", "P2", "P3", "P1xP1"];

/// Projective space `P^n` with the standard action of `(C^×)^{n+1}`.
///
/// The tangent weight at `p_i` toward `p_j` is `u_j - u_i` and the
/// hyperplane class restricts to `-u_i` at `p_i`, so `∫ H^n = 1`.
pub fn projective(n: usize) -> GkmSpace {
    assert!(n >= 1, "projective space needs n >= 1");
    let rank = n + 1;
    let u = |i: usize| LinearForm::generator(rank, i);
    let points: Vec<FixedPoint> = (0..=n)
        .map(|i| FixedPoint {
            id: format!("p{i}"),
            tangent_weights: (0..=n)
                .filter(|&j| j != i)
                .map(|j| u(j).sub(&u(i)))
                .collect(),
        })
        .collect();
    // position of the direction toward p_j in p_i's tangent list
    let slot = |i: usize, j: usize| if j < i { j } else { j - 1 };
    let mut spheres = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            let connection = (0..=n)
                .filter(|&k| k != i && k != j)
                .map(|k| (slot(i, k), slot(j, k)))
                .collect();
            spheres.push(Sphere {
                id: format!("S{i}_{j}"),
                src: i,
                dst: j,
                tangent_at_src: u(j).sub(&u(i)),
                class: vec![1],
                area: Rational::one(),
                connection: Some(connection),
            });
        }
    }
    let h = EquivariantClass {
        degree: 2,
        restrictions: (0..=n)
            .map(|i| Polynomial::from_linear(&u(i).neg()))
            .collect(),
        inhomogeneous: false,
    };
    let mut classes = BTreeMap::new();
    classes.insert(
        "1".to_string(),
        EquivariantClass {
            degree: 0,
            restrictions: vec![Polynomial::one(rank); n + 1],
            inhomogeneous: false,
        },
    );
    for m in 2..=n {
        classes.insert(format!("H^{m}"), h.pow(m as u32));
    }
    classes.insert("pt".to_string(), h.pow(n as u32));
    classes.insert("H".to_string(), h);
    GkmSpace {
        torus: TorusContext::standard(rank),
        points,
        spheres,
        h2_rank: 1,
        dim: n,
        classes,
    }
}

/// Product `X × Y` with the concatenated torus.
///
/// Fixed points are pairs `"x|y"`; spheres are `S × {y}` and `{x} × T`.
/// Classes of `X` are pulled back as `NAME_1`, those of `Y` as `NAME_2`;
/// `1` and `pt` (the product of the point classes, when both factors have
/// one) are added.
pub fn product(x: &GkmSpace, y: &GkmSpace) -> GkmSpace {
    let (kx, ky) = (x.rank(), y.rank());
    let rank = kx + ky;
    let (dx, dy) = (x.dim, y.dim);
    let ny = y.points.len();
    let idx = |i: usize, j: usize| i * ny + j;
    let mut names = x.torus.names.clone();
    names.extend(y.torus.names.iter().map(|n| format!("{n}'")));
    let torus = TorusContext { names };

    let mut points = Vec::new();
    for px in &x.points {
        for py in &y.points {
            let mut tw: Vec<LinearForm> = px
                .tangent_weights
                .iter()
                .map(|w| w.embed(0, rank))
                .collect();
            tw.extend(py.tangent_weights.iter().map(|w| w.embed(kx, rank)));
            points.push(FixedPoint {
                id: format!("{}|{}", px.id, py.id),
                tangent_weights: tw,
            });
        }
    }
    let mut spheres = Vec::new();
    for s in &x.spheres {
        for (j, py) in y.points.iter().enumerate() {
            let connection = s.connection.as_ref().map(|c| {
                let mut c = c.clone();
                c.extend((0..dy).map(|t| (dx + t, dx + t)));
                c
            });
            let mut class = s.class.clone();
            class.extend(std::iter::repeat_n(0, y.h2_rank));
            spheres.push(Sphere {
                id: format!("{}|{}", s.id, py.id),
                src: idx(s.src, j),
                dst: idx(s.dst, j),
                tangent_at_src: s.tangent_at_src.embed(0, rank),
                class,
                area: s.area.clone(),
                connection,
            });
        }
    }
    for (i, px) in x.points.iter().enumerate() {
        for t in &y.spheres {
            let connection = t.connection.as_ref().map(|c| {
                let mut out: Vec<(usize, usize)> = (0..dx).map(|k| (k, k)).collect();
                out.extend(c.iter().map(|&(a, b)| (dx + a, dx + b)));
                out
            });
            let mut class = vec![0; x.h2_rank];
            class.extend(t.class.iter().copied());
            spheres.push(Sphere {
                id: format!("{}|{}", px.id, t.id),
                src: idx(i, t.src),
                dst: idx(i, t.dst),
                tangent_at_src: t.tangent_at_src.embed(kx, rank),
                class,
                area: t.area.clone(),
                connection,
            });
        }
    }

    let pull_x = |c: &EquivariantClass| EquivariantClass {
        degree: c.degree,
        restrictions: (0..x.points.len())
            .flat_map(|i| (0..ny).map(move |_| i))
            .map(|i| c.restrictions[i].embed(0, rank))
            .collect(),
        inhomogeneous: c.inhomogeneous,
    };
    let pull_y = |c: &EquivariantClass| EquivariantClass {
        degree: c.degree,
        restrictions: (0..x.points.len())
            .flat_map(|_| 0..ny)
            .map(|j| c.restrictions[j].embed(kx, rank))
            .collect(),
        inhomogeneous: c.inhomogeneous,
    };
    let mut classes = BTreeMap::new();
    for (name, c) in &x.classes {
        if name != "1" {
            classes.insert(format!("{name}_1"), pull_x(c));
        }
    }
    for (name, c) in &y.classes {
        if name != "1" {
            classes.insert(format!("{name}_2"), pull_y(c));
        }
    }
    if let (Some(a), Some(b)) = (x.classes.get("pt"), y.classes.get("pt")) {
        classes.insert("pt".to_string(), pull_x(a).mul(&pull_y(b)));
    }
    let n = points.len();
    classes.insert(
        "1".to_string(),
        EquivariantClass {
            degree: 0,
            restrictions: vec![Polynomial::one(rank); n],
            inhomogeneous: false,
        },
    );
    GkmSpace {
        torus,
        points,
        spheres,
        h2_rank: x.h2_rank + y.h2_rank,
        dim: dx + dy,
        classes,
    }
}

/// Builtin spaces addressable as `builtin:NAME` (`P<n>` for any `n ≥ 1`,
/// and `P1xP1`).
pub fn builtin(name: &str) -> Result<GkmSpace> {
    let name = name.strip_prefix("builtin:").unwrap_or(name);
    if name == "P1xP1" {
        return Ok(product(&projective(1), &projective(1)));
    }
    if let Some(n) = name.strip_prefix('P').and_then(|n| n.parse::<usize>().ok()) {
        if n >= 1 {
            return Ok(projective(n));
        }
    }
    Err(GwError::Parse(format!("unknown builtin space '{name}'")))
}
