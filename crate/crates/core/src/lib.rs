//! Reweighted Gaussian belief propagation for quadratic minimization.
//!
//! Minimizes `½xᵀΓx − hᵀx` (equivalently solves `Γx = h`) with the
//! reweighted min-sum algorithm, and provides the machinery used to reason
//! about it: walk-summability and scaled-diagonal-dominance tests, graph
//! covers, explicit computation trees with exact elimination, a Geršgorin
//! certificate for uniform reweighting, and Jacobi / Gauss-Seidel baselines.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the CLI uses.

// `!(x > 0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod covers;
pub mod dense;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod model;
pub mod scalar;

pub use error::{Error, Result};
pub use matrix::{symmetrize, Matrix};
pub use model::{DirectedEdgeIndex, EdgeParameters, ParameterSpec, QuadraticModel};
pub use scalar::{DenseScalar, Scalar};

pub type Model = QuadraticModel<f64>;
pub type Model32 = QuadraticModel<f32>;
pub type Params = EdgeParameters<f64>;
pub type Messages = engine::MessageState<f64>;
pub type Beliefs = engine::BeliefSummary<f64>;
pub type Report = engine::RunReport<f64>;
pub type Cover = covers::CoveredModel<f64>;
pub type Tree = diagnostics::ComputationTree<f64>;
pub type Certificate = diagnostics::GershgorinCertificate<f64>;
