#![no_std]
#![doc = include_str!("../README.md")]
// `!(x < y)` is how NaN inputs are made to fail range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod basis;
pub mod enumerate;
pub mod error;
pub mod gauss;
pub mod rng;
pub mod samplers;

pub use basis::{dual_basis, lattice_scale, reduce_mod, Basis, CoefVector, Point};
pub use error::{Error, Result};
pub use rng::Rng;

pub mod decision;
pub mod estimate;
pub mod geometry;
pub mod protocols;
