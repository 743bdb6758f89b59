//! Lift of a two-dimensional Riemannian metric to the total space of its
//! orthonormal frame bundle.
//!
//! A surface is given in a conformal chart, `g = e^{2λ}((dx¹)² + (dx²)²)`,
//! with `λ` written as an arithmetic expression in `x1`, `x2`. Everything the
//! crate computes is driven by exact truncated-Taylor jets of `λ`:
//!
//! * [`expr`] parses the conformal factor and evaluates it over [`Jet`]s.
//! * [`surface`] builds the base frame `e_a = e^{-λ}∂_a`, its structure
//!   functions and the Gaussian curvature.
//! * [`connection`] is a generic Levi-Civita calculus for orthonormal frames
//!   in dimension 2 or 3. It knows nothing about the lift and serves as the
//!   independent reference for every closed-form formula in [`lift`].
//! * [`lift`] computes the lifted frame `{Ɛ₁, Ɛ₂, Ɛ₃}` on the bundle, its
//!   structure functions, connection, curvature and sectional curvatures.
//! * [`geodesic`] integrates geodesics of the lifted and the base metric and
//!   monitors the conserved quantity `Q³/K`.

// tensor code indexes several tables with the same loop variables
#![allow(clippy::needless_range_loop)]

pub mod connection;
mod error;
pub mod expr;
pub mod geodesic;
pub mod lift;
mod point;
pub mod sampling;
pub mod surface;

pub use connection::{ConnectionTable, CurvatureTable, StructureTable};
pub use error::{Error, Result};
pub use expr::{eval_jet, parse, Expr, Jet, Var};
pub use geodesic::{BaseState, Coupling, LiftState, Method, Trajectory};
pub use lift::{LiftedCurvature, LiftedFrame, LiftedStructure, VerifyReport, KAPPA_MIN};
pub use point::Point;
pub use surface::{catalog, BaseGeometry, ConformalSurface, Guard};
