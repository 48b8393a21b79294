//! Probability metrics and comparison-inequality checks for isotropic
//! log-concave distributions.
//!
//! The crate has four layers:
//!
//! - [`dist`]: a catalog of isotropic log-concave laws (Gaussian, uniform,
//!   two-sided exponential, their products and Gaussian-blend convolutions)
//!   with exact densities, CDFs, quantiles, and seeded samplers.
//! - [`metrics`]: total variation, Kolmogorov, bounded-Lipschitz, L_p
//!   Wasserstein, relative entropy, and differential entropy — exact in 1-D
//!   by quadrature/quantile-coupling/grid-LP, Monte Carlo in n dimensions.
//! - [`bounds`]: each comparison inequality between those distances as a
//!   checkable predicate, with suite-wide fitting of the smallest admissible
//!   constants, plus the supporting concentration and smoothing checks.
//! - [`harness`]: config-driven sweeps over distribution suites, CSV/SVG
//!   reporting, constant-fitting reports, and the acceptance verifier that
//!   backs `lcmetrics verify`.

pub mod bounds;
pub mod dist;
pub mod error;
pub mod grid;
pub mod harness;
pub mod metrics;
pub mod num;

pub use dist::{Component, Covariance, LogConcaveDensity};
pub use error::{Error, Result};
pub use grid::GridFunction;
