//! Integration against fixed kernels: the Poisson integral of the upper half
//! plane and the Laplace transform on the half line, with exponentially
//! weighted integrals.

mod laplace;
mod poisson;

pub use laplace::{growth_probe, laplace, laplace_derivative, weighted_integral, ComplexPoint, GrowthReport};
pub use poisson::{boundary_norm_gap, laplacian_probe, poisson, poisson_kernel, HalfPlanePoint};
