//! Regression toolkit for interval-valued symbolic data.
//!
//! An interval observation `[l, u]` is treated as the uniform distribution on
//! `[l, u]`, identified with its quantile function
//! `Ψ⁻¹(t) = c + r (2t − 1)` where `c = (l + u) / 2` is the centre and
//! `r = (u − l) / 2` the half-range. Distances between observations are
//! measured with the Mallows (L2 Wasserstein) metric, which for uniform
//! intervals reduces to `(c_a − c_b)² + (r_a − r_b)² / 3`.
//!
//! The central estimator is the DSD (Distribution and Symmetric Distribution)
//! linear model. Each predictor enters twice — once as itself and once
//! through the quantile function of its symmetric distribution — giving
//!
//! `Ψ_Ŷ⁻¹(t) = Σ_k (α_k − β_k) c_k + γ + Σ_k (α_k + β_k) r_k (2t − 1)`
//!
//! with `α_k, β_k ≥ 0` and `γ` free. Fitting is least squares in the Mallows
//! metric, solved by a non-negative active-set method ([`solver`]). Classical
//! interval regressions (centre method, MinMax, centre-and-range with and
//! without constraints) are provided as baselines ([`baselines`]), along with
//! goodness-of-fit metrics ([`metrics`]) and reproducible Monte Carlo study
//! harnesses ([`sim`]).
//!
//! [`io`] reads and writes the on-disk formats (interval tables as CSV,
//! fitted models and study configurations as flat `key=value` files) used by
//! the `dsd` command-line tool.

pub mod baselines;
pub mod error;
pub mod interval;
pub mod io;
pub mod mallows;
pub mod metrics;
pub mod model;
pub mod sim;
pub mod solver;

pub use error::{DsdError, Result};
pub use interval::{Interval, IntervalVariable, SymbolicTable};
pub use model::FittedDsdModel;
pub use solver::DsdCoefficients;
