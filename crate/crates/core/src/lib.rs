//! Riesz-type energies on Neumann strips `R^n × [-t, t]`.
//!
//! [`kernel`] evaluates the strip Green-type kernel by its method of images,
//! [`geometry`] turns shapes into weighted quadrature clouds,
//! [`equilibrium`] solves for equilibrium measures on a cloud, and
//! [`analysis`] studies how the energy moves with the thickness `t`.
//! [`cli`] is the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod geometry;
pub mod kernel;
mod serde_float;
pub mod special;
