//! Numerical Finsler differential geometry.
//!
//! The crate evaluates, at user-chosen points of the tangent bundle, the
//! full local apparatus of a Finsler metric: fundamental tensor, spray and
//! nonlinear connection, Cartan/Chern connection coefficients and torsion,
//! hh-curvature tensors, Riemann and Ricci curvatures, and flag curvature.
//! On top of that it provides the Schwarzian tensor of a conformal factor,
//! the integrability obstruction tensors for the Möbius equations,
//! concircular and C-conformal residuals, and ODE machinery for geodesics,
//! Jacobi fields (conjugate points), and the projective parameter.
//!
//! Everything is driven by one differentiation engine: metric formulas are
//! generic over [`scalar::Scalar`], so the whole pipeline can run in
//! truncated Taylor-polynomial arithmetic and read off exact high-order
//! derivatives (see [`diffengine`]).
//!
//! The `examples/` directory has one runnable program per capability; the
//! `finsler` binary exposes the same operations as subcommands.

pub mod cli;
pub mod connection;
pub mod curvature;
pub mod diffengine;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod fields;
pub mod metrics;
pub mod sample;
pub mod scalar;
pub mod schwarzian;
pub mod tensor;

pub use error::{Error, Result};
pub use metrics::{MetricSpec, TangentPoint};
pub use tensor::{Tensor, Variance};
