//! Tail-parameter estimation for the Exponentiated-Fréchet family through
//! asymmetric p-fences.
//!
//! The crate is organised bottom-up:
//!
//! - [`dist`]: the four-parameter Exponentiated-Fréchet law (c.d.f., quantile,
//!   inverse-transform sampling).
//! - [`theory`]: theoretical asymmetric left/right p-fences and the
//!   probabilities of falling outside them.
//! - [`empirical`]: order statistics, type-1 empirical quantiles, empirical
//!   fences and outside-value counts.
//! - [`numerics`]: bracketing, bisection and Nelder–Mead.
//! - [`iapo`]: the IAPO and IAPO-NM estimators of `(alpha, lambda)`, plus
//!   quantile matching for `(mu, sigma)` and quantile extrapolation.
//! - [`baseline`]: Hill, Pickands and Dekkers–Einmahl–de Haan estimators.
//! - [`sim`]: seeded, parallel Monte-Carlo study harness with CSV output.
//!
//! ```
//! use tailfence_core::{DistParams, theory};
//!
//! let params = DistParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
//! let p_right = theory::prob_right_outside(&params, 0.5).unwrap();
//! assert!((p_right.value() - 0.5).abs() < 1e-12);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod dist;
pub mod empirical;
mod error;
pub mod format;
pub mod iapo;
pub mod numerics;
pub mod sim;
pub mod theory;

pub use baseline::{BaselineMethod, TailIndexEstimate};
pub use dist::{DistParams, Probability};
pub use empirical::{OutsideCounts, SortedSample};
pub use error::{Error, Result};
pub use iapo::{EstimateResult, FrequencyPair, Method};
pub use numerics::{RootResult, SimplexResult};
pub use sim::{Estimator, StudyConfig, StudyRow, Target};
pub use theory::{FenceOrigin, FenceReport};
