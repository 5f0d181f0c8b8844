//! Bayesian evidence for finite element model updating.
//!
//! Candidate updating models differ in which element Young's moduli are left
//! free. Each model's evidence `Z = ∫ L(θ) π(θ) dθ` is computed by nested
//! sampling over a truncated Gaussian prior, and models are ranked by Bayes
//! factors on the Jeffreys scale.

pub mod bayes;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod math;
pub mod oracle;
pub mod presets;
pub mod sampler;
pub mod selection;

pub use error::{Error, Result};
