//! Positive linear approximation operators whose weights come from
//! Brenke-type generating functions, sampled at shifted nodes.
//!
//! A family is described by three power series `A1`, `A2` and `h`; the
//! polynomials `π_k` are the coefficients of `A1(h(t))·A2(x·h(t))` in `t`.
//! The operator samples a function at the nodes `(k + ν1)/(n + ν2)` with the
//! normalized weights `π_k(nx) / (A1(h(1))·A2(nx·h(1)))`.
//!
//! Modules, bottom-up:
//!
//! - [`series`]: truncated power series and the triangular `π_k` table.
//! - [`special`]: log-space Poisson and negative-binomial kernels.
//! - [`families`]: built-in and custom families plus hypothesis checks.
//! - [`operator`]: truncated weight vectors and operator application.
//! - [`moments`]: closed-form raw/central moments and their summation twins.
//! - [`functions`]: the registered test functions with analytic moduli.
//! - [`smoothness`]: grid moduli, Lipschitz constants, K-functional bounds.
//! - [`bounds`]: the four error bounds and the domination sweep.

// `!(v > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod families;
pub mod functions;
pub mod moments;
pub mod operator;
pub mod series;
pub mod smoothness;
pub mod special;

pub use error::{Error, Result};
pub use families::{FamilyKind, FamilySpec, SeriesKind, StancuParams};
pub use operator::{TruncationPolicy, WeightVector};
