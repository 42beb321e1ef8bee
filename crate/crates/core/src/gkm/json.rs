//! GKM space files.
//!
//! ```text
//! {"torus_rank": k, "torus_names": ["u0", ...], "h2_rank": b, "dim": n,
//!  "fixed_points": [{"id": "p0", "tangent_weights": [["-1", "1"], ...]}],
//!  "spheres": [{"id", "src", "dst", "tangent_at_src": [...], "class": [1],
//!               "area": "1", "connection": [[i, j], ...]}],
//!  "classes": {"H": {"degree": 2, "p0": [[[1, 0], "-1"]], ...}}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::space::{EquivariantClass, FixedPoint, GkmSpace, Sphere, TorusContext};
use crate::algebra::{format_rational, parse_rational, LinearForm, Polynomial};
use crate::error::{GwError, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceFile {
    torus_rank: usize,
    /// Variable names; defaults to `u0, u1, ...`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    torus_names: Option<Vec<String>>,
    h2_rank: usize,
    dim: usize,
    fixed_points: Vec<PointFile>,
    spheres: Vec<SphereFile>,
    #[serde(default)]
    classes: BTreeMap<String, Map<String, Value>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointFile {
    id: String,
    tangent_weights: Vec<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereFile {
    id: String,
    src: String,
    dst: String,
    tangent_at_src: Value,
    class: Vec<i64>,
    area: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    connection: Option<Vec<(usize, usize)>>,
}

pub fn space_to_json(space: &GkmSpace) -> Value {
    let file = SpaceFile {
        torus_rank: space.rank(),
        torus_names: (space.torus != TorusContext::standard(space.rank()))
            .then(|| space.torus.names.clone()),
        h2_rank: space.h2_rank,
        dim: space.dim,
        fixed_points: space
            .points
            .iter()
            .map(|p| PointFile {
                id: p.id.clone(),
                tangent_weights: p.tangent_weights.iter().map(LinearForm::to_json).collect(),
            })
            .collect(),
        spheres: space
            .spheres
            .iter()
            .map(|s| SphereFile {
                id: s.id.clone(),
                src: space.points[s.src].id.clone(),
                dst: space.points[s.dst].id.clone(),
                tangent_at_src: s.tangent_at_src.to_json(),
                class: s.class.clone(),
                area: format_rational(&s.area),
                connection: s.connection.clone(),
            })
            .collect(),
        classes: space
            .classes
            .iter()
            .map(|(name, c)| {
                let mut m = Map::new();
                m.insert("degree".into(), Value::from(c.degree));
                if c.inhomogeneous {
                    m.insert("inhomogeneous".into(), Value::from(true));
                }
                for (p, q) in space.points.iter().zip(&c.restrictions) {
                    m.insert(p.id.clone(), q.to_json_compact());
                }
                (name.clone(), m)
            })
            .collect(),
    };
    serde_json::to_value(file).expect("space serializes")
}

/// Parses a space file. Structural problems are reported as schema errors;
/// mathematical validity is left to [`GkmSpace::validate`].
pub fn space_from_json(v: &Value) -> Result<GkmSpace> {
    let file: SpaceFile =
        serde_json::from_value(v.clone()).map_err(|e| GwError::Schema(e.to_string()))?;
    let k = file.torus_rank;
    if k == 0 {
        return Err(GwError::Schema("torus_rank must be at least 1".into()));
    }
    let points = file
        .fixed_points
        .iter()
        .map(|p| {
            Ok(FixedPoint {
                id: p.id.clone(),
                tangent_weights: p
                    .tangent_weights
                    .iter()
                    .map(|w| LinearForm::from_json(w, k))
                    .collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let find = |id: &str| {
        points
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| GwError::Schema(format!("unknown fixed point '{id}'")))
    };
    let spheres = file
        .spheres
        .iter()
        .map(|s| {
            Ok(Sphere {
                id: s.id.clone(),
                src: find(&s.src)?,
                dst: find(&s.dst)?,
                tangent_at_src: LinearForm::from_json(&s.tangent_at_src, k)?,
                class: s.class.clone(),
                area: parse_rational(&s.area).map_err(|e| GwError::Schema(e.to_string()))?,
                connection: s.connection.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut classes = BTreeMap::new();
    for (name, m) in &file.classes {
        let degree = m
            .get("degree")
            .and_then(Value::as_u64)
            .and_then(|d| u32::try_from(d).ok())
            .ok_or_else(|| GwError::Schema(format!("class '{name}' needs an integer degree")))?;
        let inhomogeneous = m
            .get("inhomogeneous")
            .and_then(Value::as_bool)
            .unwrap_or(false);
        for key in m.keys() {
            if key != "degree" && key != "inhomogeneous" && find(key).is_err() {
                return Err(GwError::Schema(format!(
                    "class '{name}' names unknown point '{key}'"
                )));
            }
        }
        let restrictions = points
            .iter()
            .map(|p| match m.get(&p.id) {
                Some(q) => Polynomial::from_json(q, k),
                None => Err(GwError::Schema(format!(
                    "class '{name}' has no restriction at '{}'",
                    p.id
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        classes.insert(
            name.clone(),
            EquivariantClass {
                degree,
                restrictions,
                inhomogeneous,
            },
        );
    }
    let torus = match file.torus_names {
        None => TorusContext::standard(k),
        Some(names) if names.len() == k => TorusContext { names },
        Some(names) => {
            return Err(GwError::Schema(format!(
                "torus_names has {} entries for torus_rank {k}",
                names.len()
            )))
        }
    };
    Ok(GkmSpace {
        torus,
        points,
        spheres,
        h2_rank: file.h2_rank,
        dim: file.dim,
        classes,
    })
}

pub fn space_from_str(s: &str) -> Result<GkmSpace> {
    let v: Value = serde_json::from_str(s).map_err(|e| GwError::Schema(e.to_string()))?;
    space_from_json(&v)
}
