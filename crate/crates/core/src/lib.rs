//! Continuous primitive integration on the extended real line.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bv_stieltjes;
pub mod cli;
pub mod convergence_lab;
pub mod error;
pub mod fixtures;
pub mod function_core;
pub mod integral_core;
pub mod lattice_order;
pub mod numerics;
pub mod product_calculus;
pub mod selftest;
pub mod transforms;

pub use error::{Error, Result};
