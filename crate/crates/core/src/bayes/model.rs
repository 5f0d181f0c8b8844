use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::prior::{ParameterPrior, PriorSpec, ProductPrior};
use crate::error::{Error, Result};
use crate::fem::{modal_analysis, StructureModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredMode {
    /// 1-based global mode number, rigid-body modes included.
    pub mode_index: usize,
    pub frequency_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredModalData {
    pub entries: Vec<MeasuredMode>,
}

impl MeasuredModalData {
    pub fn new(entries: Vec<MeasuredMode>) -> Result<Self> {
        let d = Self { entries };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::InvalidArgument("measured data has no modes".into()));
        }
        for e in &self.entries {
            if e.mode_index == 0 || !(e.frequency_hz.is_finite() && e.frequency_hz > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "measured mode {} at {} Hz: indices start at 1 and frequencies must be positive",
                    e.mode_index, e.frequency_hz
                )));
            }
        }
        for w in self.entries.windows(2) {
            if w[1].mode_index <= w[0].mode_index || w[1].frequency_hz <= w[0].frequency_hz {
                return Err(Error::InvalidArgument(format!(
                    "measured modes must increase in index and frequency: ({}, {}) then ({}, {})",
                    w[0].mode_index, w[0].frequency_hz, w[1].mode_index, w[1].frequency_hz
                )));
            }
        }
        Ok(())
    }

    pub fn max_mode_index(&self) -> usize {
        self.entries.iter().map(|e| e.mode_index).max().unwrap_or(0)
    }
}

/// Natural frequencies of the H-beam test article (Hz) at global modes 7, 8,
/// 10, 11 and 13.
pub fn hbeam_measurements() -> MeasuredModalData {
    let entries = [(7, 53.9), (8, 117.3), (10, 208.4), (11, 254.0), (13, 445.0)]
        .into_iter()
        .map(|(mode_index, frequency_hz)| MeasuredMode {
            mode_index,
            frequency_hz,
        })
        .collect();
    MeasuredModalData { entries }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodSpec {
    pub measured: MeasuredModalData,
    pub precision_beta: f64,
}

impl LikelihoodSpec {
    pub fn new(measured: MeasuredModalData, precision_beta: f64) -> Result<Self> {
        let s = Self {
            measured,
            precision_beta,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.measured.validate()?;
        if !(self.precision_beta.is_finite() && self.precision_beta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "likelihood precision must be positive, got {}",
                self.precision_beta
            )));
        }
        Ok(())
    }

    /// `−(β/2) Σ ((f_meas − f_model) / f_meas)²` over the measured modes.
    ///
    /// `model_hz` is indexed by global mode number minus one.
    pub fn log_likelihood_from_frequencies(&self, model_hz: &[f64]) -> Result<f64> {
        let mut sum = 0.0;
        for m in &self.measured.entries {
            let f = *model_hz.get(m.mode_index - 1).ok_or_else(|| {
                Error::Config(format!(
                    "measured mode {} exceeds the {} modes available",
                    m.mode_index,
                    model_hz.len()
                ))
            })?;
            let r = (m.frequency_hz - f) / m.frequency_hz;
            sum += r * r;
        }
        Ok(-0.5 * self.precision_beta * sum)
    }
}

/// One candidate updating model: which element Young's moduli are free.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdatingHypothesis {
    pub name: String,
    pub base_structure: StructureModel,
    pub free_elements: Vec<usize>,
    pub prior: PriorSpec,
    /// Per-element overrides of the shared prior.
    pub element_priors: BTreeMap<usize, PriorSpec>,
    /// Young's modulus assigned to every element that is not free.
    pub fixed_value: f64,
}

impl UpdatingHypothesis {
    pub fn new(
        name: impl Into<String>,
        base_structure: StructureModel,
        free_elements: Vec<usize>,
        prior: PriorSpec,
        fixed_value: f64,
    ) -> Result<Self> {
        let h = Self {
            name: name.into(),
            base_structure,
            free_elements,
            prior,
            element_priors: BTreeMap::new(),
            fixed_value,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.free_elements.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "hypothesis {}: needs at least one free element",
                self.name
            )));
        }
        let known: BTreeSet<usize> = self.base_structure.element_ids().collect();
        let mut seen = BTreeSet::new();
        for &id in &self.free_elements {
            if !known.contains(&id) {
                return Err(Error::InvalidArgument(format!(
                    "hypothesis {}: free element {id} does not exist in the structure",
                    self.name
                )));
            }
            if !seen.insert(id) {
                return Err(Error::InvalidArgument(format!(
                    "hypothesis {}: free element {id} listed twice",
                    self.name
                )));
            }
        }
        self.prior.validate()?;
        for (id, p) in &self.element_priors {
            if !seen.contains(id) {
                return Err(Error::InvalidArgument(format!(
                    "hypothesis {}: prior given for element {id}, which is not free",
                    self.name
                )));
            }
            p.validate()?;
        }
        if !(self.fixed_value.is_finite() && self.fixed_value > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "hypothesis {}: fixed Young's modulus must be positive",
                self.name
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.free_elements.len()
    }

    pub fn prior_for(&self, element: usize) -> &PriorSpec {
        self.element_priors.get(&element).unwrap_or(&self.prior)
    }

    pub fn product_prior(&self) -> ProductPrior {
        let axes = self
            .free_elements
            .iter()
            .map(|&id| ParameterPrior::TruncatedNormal(*self.prior_for(id)))
            .collect();
        ProductPrior::new(axes).expect("hypothesis priors are validated")
    }

    /// Prior means, one per free element.
    pub fn prior_means(&self) -> Vec<f64> {
        self.free_elements.iter().map(|&id| self.prior_for(id).mean).collect()
    }

    fn check_dim(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "hypothesis {} has {} parameters, got {}",
                self.name,
                self.dim(),
                theta.len()
            )));
        }
        Ok(())
    }

    pub fn theta_to_structure(&self, theta: &[f64]) -> Result<StructureModel> {
        self.check_dim(theta)?;
        let mut s = self.base_structure.clone();
        for e in &mut s.elements {
            e.material = e.material.with_youngs_modulus(self.fixed_value);
        }
        for (index, (&id, &value)) in self.free_elements.iter().zip(theta).enumerate() {
            let p = self.prior_for(id);
            if !p.contains(value) {
                return Err(Error::OutOfBounds {
                    index,
                    value,
                    lower: p.lower_bound,
                    upper: p.upper_bound,
                });
            }
            let e = s.element_mut(id).expect("free elements are validated");
            e.material = e.material.with_youngs_modulus(value);
        }
        Ok(s)
    }

    pub fn log_prior(&self, theta: &[f64]) -> Result<f64> {
        self.check_dim(theta)?;
        Ok(self
            .free_elements
            .iter()
            .zip(theta)
            .map(|(&id, &x)| self.prior_for(id).log_density(x))
            .sum())
    }
}

/// A hypothesis bound to measured data: the object the sampler integrates.
#[derive(Debug, Clone)]
pub struct UpdatingProblem {
    pub hypothesis: UpdatingHypothesis,
    pub likelihood: LikelihoodSpec,
    rigid_body_modes: usize,
}

impl UpdatingProblem {
    /// Validates both parts and checks, at the prior means, that every
    /// measured mode index lands on an elastic mode.
    pub fn new(hypothesis: UpdatingHypothesis, likelihood: LikelihoodSpec) -> Result<Self> {
        hypothesis.validate()?;
        likelihood.validate()?;
        let n_modes = likelihood.measured.max_mode_index();
        let baseline = hypothesis.theta_to_structure(&hypothesis.prior_means())?;
        let available = baseline.n_dof_unconstrained() - baseline.constrained_dofs.len();
        if n_modes > available {
            return Err(Error::Config(format!(
                "measured mode {n_modes} exceeds the {available} modes of the structure"
            )));
        }
        let modal = modal_analysis(&baseline, n_modes)?;
        let rigid = modal.rigid_body_count();
        if let Some(m) = likelihood.measured.entries.iter().find(|m| m.mode_index <= rigid) {
            return Err(Error::Config(format!(
                "hypothesis {}: measured mode {} falls on one of the {rigid} rigid-body modes",
                hypothesis.name, m.mode_index
            )));
        }
        Ok(Self {
            hypothesis,
            likelihood,
            rigid_body_modes: rigid,
        })
    }

    pub fn rigid_body_modes(&self) -> usize {
        self.rigid_body_modes
    }

    /// Elastic mode numbers (1-based, rigid-body modes excluded) paired with
    /// the measurements.
    pub fn elastic_mode_numbers(&self) -> Vec<usize> {
        self.likelihood
            .measured
            .entries
            .iter()
            .map(|m| m.mode_index - self.rigid_body_modes)
            .collect()
    }

    pub fn model_frequencies(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let s = self.hypothesis.theta_to_structure(theta)?;
        Ok(modal_analysis(&s, self.likelihood.measured.max_mode_index())?.frequencies_hz)
    }

    pub fn log_likelihood(&self, theta: &[f64]) -> Result<f64> {
        let f = self.model_frequencies(theta)?;
        self.likelihood.log_likelihood_from_frequencies(&f)
    }

    pub fn log_prior(&self, theta: &[f64]) -> Result<f64> {
        self.hypothesis.log_prior(theta)
    }

    pub fn prior(&self) -> ProductPrior {
        self.hypothesis.product_prior()
    }
}

impl crate::sampler::LogLikelihood for UpdatingProblem {
    fn log_likelihood(&self, theta: &[f64]) -> Result<f64> {
        UpdatingProblem::log_likelihood(self, theta)
    }
}
