//! Candidate updating models: truncated-Gaussian priors over free Young's
//! moduli and the normalised frequency-error likelihood.

mod model;
mod prior;

pub use model::{
    hbeam_measurements, LikelihoodSpec, MeasuredModalData, MeasuredMode, UpdatingHypothesis, UpdatingProblem,
};
pub use prior::{ParameterPrior, PriorSpec, ProductPrior};
