//! Extended lower and upper Gini indices.
//!
//! The lower index compares one draw of an `m`-sample with the sample minimum,
//! the upper index compares the sample maximum with one draw; both are scaled by
//! `m` times the mean. Their sum is the `m`-th Gini index (normalized expected
//! range), and at `m = 2` each component is half of the classical Gini
//! coefficient.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: log-gamma, incomplete gamma, polygamma, KS and CvM null laws.
//! * [`quadrature`]: adaptive Gauss–Kronrod on `[0, ∞)` and `[0, 1]`.
//! * [`gamma`]: the gamma model (cdf, quantile, sampler, MLE).
//! * [`population`]: population indices through survival, quantile and Lorenz
//!   representations.
//! * [`estimators`]: exact finite-sample estimators, brute force and
//!   closed-form weighted.
//! * [`inference`]: Monte Carlo bias/MSE harness, consistency and normality
//!   checks, goodness of fit.
//! * [`dataset`]: CSV ingestion and the bundled GDP fixture.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod estimators;
pub mod gamma;
pub mod inference;
pub mod population;
pub mod quadrature;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};
pub use estimators::{EstimateResult, IndexKind, IndexSpec, Sample};
pub use gamma::{FitResult, GammaParams};
pub use quadrature::QuadratureConfig;
