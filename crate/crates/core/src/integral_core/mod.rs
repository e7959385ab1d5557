//! The space of integrable distributions, carried by continuous primitives.

pub mod distribution;
pub mod hake;

pub use distribution::{integral, linear_combine, norm, piecewise_linear, translate, try_from_primitive, Distribution, NormKind};
pub use hake::{hake_extend, hake_from_integrand};
