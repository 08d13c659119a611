//! Multiplication conditional-type operators `f ↦ w·E(u·f)` on finite and
//! dyadically discretized measure spaces.
//!
//! The crate builds these operators as dense matrices, evaluates the
//! closed-range and Fredholm criteria for them as executable classifiers,
//! and audits every verdict against an independent numerical oracle.
//!
//! Module map:
//!
//! - [`measure`]: spaces, partition sub-algebras, dyadic refinement families
//! - [`condexp`]: functions on a space and the conditional expectation
//! - [`weighted`]: the operator `M_w E M_u`, its matrix, norms, reduction
//! - [`oracle`]: rank, minimum modulus, `L^p → L^q` norms, range distance
//! - [`criteria`]: closed-range classifiers for every exponent ordering
//! - [`fredholm`]: kernel/range/index analysis and refinement sweeps
//! - [`recognition`]: recovering `E(w·)` / `k·E(w·)` structure from a matrix
//! - [`gallery`]: product-space expectations, kernel operators, Laplace
//! - [`scenario`] and [`report`]: file-driven runs behind the `condop` CLI

pub mod condexp;
pub mod criteria;
pub mod error;
pub mod fredholm;
pub mod gallery;
pub mod instances;
pub mod measure;
pub mod oracle;
pub mod recognition;
pub mod report;
pub mod scenario;
pub mod weighted;

pub use condexp::{cond_exp, SpaceFunction};
pub use error::{Error, Result};
pub use measure::{BlockRule, MeasureSpace, PartitionAlgebra, PointKind, RefinementFamily};
pub use oracle::OracleConfig;
pub use weighted::{Codomain, CondOperator, ExponentCase, ExponentPair, OperatorMatrix};
