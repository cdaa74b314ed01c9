//! Quadrature by expansion (QBX) for evaluating singular and weakly singular
//! layer potentials at points on the boundary.
//!
//! The pipeline has three steps for each target `x0` on the boundary: place a
//! tangent ball center `x_c` at distance `r`, form a truncated local expansion
//! of the potential about `x_c` using smooth quadrature only, and sum that
//! expansion at `x0`.
//!
//! Supported kernels are the 2D Cauchy integral, the 2D Laplace single and
//! double layers, and the Helmholtz single and double layers in 2D and 3D.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expansion;
pub mod geometry;
pub mod harness;
pub mod quadrature;
pub mod reference;
pub mod special;

pub use error::{QbxError, Result};
pub use num_complex::Complex64;
