//! Exact arithmetic for representation counts over binary digit-sum classes.
//!
//! The crate computes, without floating-point shortcuts wherever a claim is
//! an equality:
//!
//! - digit primitives: the parity sign `ε(n)`, the two digit-sum classes,
//!   base-4 digit statistics, and the exact `(7/2)^t` block identity
//!   ([`digits`]);
//! - correlation sums `S(X,h) = Σ_{n≤X} ε(n)ε(n+h)` and `V(X,h)`, their
//!   halving recursion with coefficient tracking, and the `Σ|S|` growth
//!   audit ([`correlation`]);
//! - complex exponential sums `S(α)`, `W(α)`, twisted variants, complete
//!   Gauss sums mod `q`, and best rational approximation with the Dirichlet
//!   guarantee ([`expsums`]);
//! - exact representation counting for `x₁ⁿ + … + x_kⁿ = N` with per-position
//!   class restrictions, even/mixed power moments via exact integer
//!   convolution, and quadrature cross-checks ([`counting`]);
//! - machine-readable CSV/JSON report emission ([`report`]).

pub mod correlation;
pub mod counting;
pub mod digits;
pub mod error;
pub mod expsums;
pub mod report;

pub use error::{Error, Result};
