//! Functions of bounded variation on the extended line and the
//! Riemann–Stieltjes integral against them.

pub mod bv;
pub mod stieltjes;

pub use bv::{indicator, normalize_nbv, variation, BvFunction, Jump, NbvFunction, Piece};
pub use stieltjes::{rs_integral, rs_integral_with, StieltjesTable};
