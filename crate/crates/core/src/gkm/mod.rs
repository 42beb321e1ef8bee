//! Target-manifold localization data: fixed points, invariant spheres and
//! equivariant classes, plus integration over the target.

mod builders;
mod json;
mod space;

pub use builders::{builtin, product, projective, BUILTIN_NAMES};
pub use json::{space_from_json, space_from_str, space_to_json};
pub use space::{
    EquivariantClass, FixedPoint, GkmSpace, NormalDirection, Pole, Sphere, TorusContext,
    ValidationFailure, ValidationReport,
};
