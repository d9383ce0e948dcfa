//! Boundary-feedback stabilization of linear transport on finite-volume grids,
//! with per-step verification of discrete Lyapunov decay.

// `!(x > 0.0)` also rejects NaN; index loops mirror the stencil notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod initial;
pub mod lyapunov;
pub mod quadrature;
pub mod scheme1d;
pub mod sim;
pub mod splitmd;
pub mod weights;

pub use error::{Error, Result};
