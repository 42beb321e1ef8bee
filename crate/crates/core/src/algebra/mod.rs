//! Exact arithmetic over `Q[u_1, ..., u_k]` and the rational functions with
//! linear-form denominators that localization produces.

mod factored;
mod linear;
mod polynomial;
mod rational;
mod series;

pub use factored::FactoredRational;
pub use linear::LinearForm;
pub use polynomial::{Monomial, Polynomial};
pub(crate) use rational::bigint_to_json;
pub use rational::{binomial, factorial, format_rational, int, parse_rational, rat, Rational};
pub use series::{NilpotentSeries, SeriesShape};
