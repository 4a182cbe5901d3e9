//! Solvers for split feasibility problems `find x ∈ C with Ax ∈ Q` under the
//! nonconvex `‖x‖₁ − ‖x‖₂` penalty:
//!
//! ```text
//! min_{x ∈ C} ½‖(I − P_Q)Ax‖² + γ(‖x‖₁ − ‖x‖₂)
//! ```
//!
//! Three methods attack the regularized problem directly: a difference-of-convex
//! outer loop ([`dca`]), forward-backward splitting with the closed-form
//! `ℓ1 − ℓ2` prox ([`fbsplit`]) and a Mine-Fukushima direction/line-search
//! scheme ([`minefuku`]). The CQ and modified CQ iterations in [`baselines`]
//! serve as unregularized references, and [`harness`] reproduces the
//! random-system and sparse-recovery benchmarks.

// `!(x > 0.0)` style checks are used on purpose: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
pub mod dca;
pub mod error;
pub mod fbsplit;
pub mod harness;
pub mod inner;
pub mod linops;
pub mod minefuku;
pub mod problem;
pub mod prox;
pub mod proxcheck;
pub mod report;
pub mod sets;
pub mod textio;

pub use error::{Result, SfpError};
pub use linops::DenseMatrix;
pub use problem::{IterateRecord, ProblemSpec, SolveResult, Stationarity, Status};
pub use sets::ClosedConvexSet;
