//! Python bindings: structures and modal solves, updating problems, nested
//! sampling, model comparison and the experiment runner.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use fem_evidence::bayes::{
    LikelihoodSpec, MeasuredModalData, MeasuredMode, PriorSpec, UpdatingHypothesis, UpdatingProblem,
};
use fem_evidence::config::{validate_config as validate_file, ExperimentConfig};
use fem_evidence::experiment::{run_experiment as run_file, RunOptions};
use fem_evidence::fem::{modal_analysis, StructureModel};
use fem_evidence::sampler::{posterior_samples, run_nested_sampling, EvidenceResult, SamplerConfig};
use fem_evidence::selection::{self, ModelEvidence};
use fem_evidence::{oracle, presets, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Plateau { .. } | Error::NotPositiveDefinite | Error::Initialization { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A beam structure with per-element Young's moduli.
#[pyclass(name = "Structure", module = "fem_evidence_py")]
struct PyStructure {
    inner: StructureModel,
}

#[pymethods]
impl PyStructure {
    /// The free-free aluminium H-beam.
    #[staticmethod]
    fn hbeam() -> Self {
        Self {
            inner: presets::hbeam(),
        }
    }

    /// The structure section of an experiment config file.
    #[staticmethod]
    fn from_config(path: PathBuf) -> PyResult<Self> {
        let (cfg, _) = ExperimentConfig::read(&path).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let inner = cfg
            .structure_model()
            .map_err(|d| PyValueError::new_err(d.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")))?;
        Ok(Self { inner })
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.inner.nodes.len()
    }

    #[getter]
    fn n_elements(&self) -> usize {
        self.inner.elements.len()
    }

    fn youngs_modulus(&self, element: usize) -> PyResult<f64> {
        self.inner
            .element(element)
            .map(|e| e.material.youngs_modulus)
            .ok_or_else(|| PyValueError::new_err(format!("no element {element}")))
    }

    fn set_youngs_modulus(&mut self, element: usize, value: f64) -> PyResult<()> {
        let e = self
            .inner
            .element_mut(element)
            .ok_or_else(|| PyValueError::new_err(format!("no element {element}")))?;
        e.material = e.material.with_youngs_modulus(value);
        Ok(())
    }

    /// Lowest `n_modes` natural frequencies in Hz, rigid-body modes included.
    fn natural_frequencies(&self, n_modes: usize) -> PyResult<Vec<f64>> {
        Ok(modal_analysis(&self.inner, n_modes).map_err(to_py)?.frequencies_hz)
    }

    fn __repr__(&self) -> String {
        format!(
            "Structure(nodes={}, elements={})",
            self.inner.nodes.len(),
            self.inner.elements.len()
        )
    }
}

/// Result of one nested-sampling run.
#[pyclass(name = "EvidenceResult", module = "fem_evidence_py", frozen)]
struct PyEvidenceResult {
    inner: EvidenceResult,
}

#[pymethods]
impl PyEvidenceResult {
    #[getter]
    fn log_evidence(&self) -> f64 {
        self.inner.log_evidence
    }

    #[getter]
    fn log_evidence_error(&self) -> f64 {
        self.inner.log_evidence_error
    }

    #[getter]
    fn information(&self) -> f64 {
        self.inner.information_nats
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations_run
    }

    fn posterior_mean(&self) -> Vec<f64> {
        self.inner.posterior_mean()
    }

    /// Total posterior weight; one up to rounding.
    fn total_weight(&self) -> f64 {
        self.inner.total_weight()
    }

    #[pyo3(signature = (n, seed = 0))]
    fn posterior_samples(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        posterior_samples(&self.inner, n, seed)
    }

    /// Dead-point log-likelihoods in retirement order.
    fn dead_log_likelihoods(&self) -> Vec<f64> {
        self.inner.dead_points.iter().map(|d| d.log_likelihood).collect()
    }

    /// `(iteration, logL, logX, logZ)` rows.
    fn trace(&self) -> Vec<(usize, f64, f64, f64)> {
        self.inner
            .trace
            .iter()
            .map(|r| (r.iteration, r.log_likelihood, r.log_prior_volume, r.log_evidence))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "EvidenceResult(log_evidence={:.6}, error={:.6}, iterations={})",
            self.inner.log_evidence, self.inner.log_evidence_error, self.inner.iterations_run
        )
    }
}

/// One updating hypothesis paired with measured natural frequencies.
#[pyclass(name = "UpdatingProblem", module = "fem_evidence_py", frozen)]
struct PyUpdatingProblem {
    inner: UpdatingProblem,
}

#[pymethods]
impl PyUpdatingProblem {
    /// `measured` maps global mode numbers (rigid-body modes counted) to Hz.
    /// `prior` is `(mean, inverse_variance, lower, upper)`.
    #[new]
    #[pyo3(signature = (name, structure, free_elements, measured, prior, precision_beta, fixed_value = None))]
    fn new(
        name: String,
        structure: PyRef<'_, PyStructure>,
        free_elements: Vec<usize>,
        measured: Vec<(usize, f64)>,
        prior: (f64, f64, f64, f64),
        precision_beta: f64,
        fixed_value: Option<f64>,
    ) -> PyResult<Self> {
        let prior = PriorSpec::new(prior.0, prior.1, prior.2, prior.3).map_err(to_py)?;
        let measured = MeasuredModalData::new(
            measured
                .into_iter()
                .map(|(mode_index, frequency_hz)| MeasuredMode {
                    mode_index,
                    frequency_hz,
                })
                .collect(),
        )
        .map_err(to_py)?;
        let hyp = UpdatingHypothesis::new(
            name,
            structure.inner.clone(),
            free_elements,
            prior,
            fixed_value.unwrap_or(prior.mean),
        )
        .map_err(to_py)?;
        let likelihood = LikelihoodSpec::new(measured, precision_beta).map_err(to_py)?;
        let inner = UpdatingProblem::new(hyp, likelihood).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.hypothesis.name.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.hypothesis.dim()
    }

    fn log_likelihood(&self, theta: Vec<f64>) -> PyResult<f64> {
        self.inner.log_likelihood(&theta).map_err(to_py)
    }

    fn log_prior(&self, theta: Vec<f64>) -> PyResult<f64> {
        self.inner.log_prior(&theta).map_err(to_py)
    }

    fn model_frequencies(&self, theta: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.model_frequencies(&theta).map_err(to_py)
    }

    #[pyo3(signature = (n_live = 100, max_iterations = 250, seed = 0, termination_tolerance = None, mcmc_steps = 20))]
    fn run_nested_sampling(
        &self,
        py: Python<'_>,
        n_live: usize,
        max_iterations: usize,
        seed: u64,
        termination_tolerance: Option<f64>,
        mcmc_steps: usize,
    ) -> PyResult<PyEvidenceResult> {
        let cfg = SamplerConfig {
            n_live,
            max_iterations,
            rng_seed: seed,
            termination_tolerance,
            mcmc_steps,
            ..Default::default()
        };
        cfg.validate().map_err(to_py)?;
        let inner = py.detach(|| run_nested_sampling(&self.inner, &cfg)).map_err(to_py)?;
        Ok(PyEvidenceResult { inner })
    }

    /// Midpoint-rule evidence for one or two free parameters.
    fn grid_evidence(&self, py: Python<'_>, points_per_axis: usize) -> PyResult<f64> {
        py.detach(|| oracle::grid_evidence(&self.inner, points_per_axis))
            .map_err(to_py)
    }
}

#[pyfunction]
fn bayes_factor(log_evidence_p: f64, log_evidence_q: f64) -> f64 {
    let e = |z| ModelEvidence {
        name: String::new(),
        log_evidence: z,
        log_evidence_error: 0.0,
        n_parameters: 0,
    };
    selection::bayes_factor(&e(log_evidence_p), &e(log_evidence_q))
}

/// `(label, favours_numerator)` for a natural-log Bayes factor.
#[pyfunction]
fn jeffreys_classify(log_e_factor: f64) -> PyResult<(String, bool)> {
    let (label, dir) = selection::jeffreys_classify(log_e_factor).map_err(to_py)?;
    Ok((label.to_string(), dir == selection::Direction::FavoursNumerator))
}

/// `evidences` holds `(name, log_evidence, error, n_parameters)`. Returns the
/// ranking CSV, the Bayes-factor CSV and the plain-text report.
#[pyfunction]
fn build_report(
    evidences: Vec<(String, f64, f64, usize)>,
    pairs: Vec<(String, String)>,
) -> PyResult<(String, String, String)> {
    let evidences: Vec<ModelEvidence> = evidences
        .into_iter()
        .map(|(name, log_evidence, log_evidence_error, n_parameters)| ModelEvidence {
            name,
            log_evidence,
            log_evidence_error,
            n_parameters,
        })
        .collect();
    let r = selection::build_report(&evidences, &pairs).map_err(to_py)?;
    Ok((r.ranking_csv(), r.bayes_factors_csv(), r.to_text()))
}

#[pyfunction]
fn conjugate_gaussian_evidence(
    prior_mean: f64,
    prior_variance: f64,
    likelihood_mean: f64,
    likelihood_variance: f64,
) -> PyResult<f64> {
    oracle::conjugate_gaussian_evidence(prior_mean, prior_variance, likelihood_mean, likelihood_variance).map_err(to_py)
}

/// Diagnostics for a config file; empty when it is valid.
#[pyfunction]
fn validate_config(path: PathBuf) -> PyResult<Vec<String>> {
    let d = validate_file(&path).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(d.iter().map(ToString::to_string).collect())
}

/// Run a config file and write its outputs. Returns `(name, log_evidence, error)` per hypothesis.
#[pyfunction]
#[pyo3(signature = (config, out_dir, seed = None, trace = false))]
fn run_experiment(
    py: Python<'_>,
    config: PathBuf,
    out_dir: PathBuf,
    seed: Option<u64>,
    trace: bool,
) -> PyResult<Vec<(String, f64, f64)>> {
    let opts = RunOptions {
        out_dir,
        seed,
        trace,
        concurrent: true,
    };
    let outcome = py
        .detach(|| run_file(&config, &opts))
        .map_err(|e| match e.exit_code() {
            1 => PyValueError::new_err(e.to_string()),
            _ => PyRuntimeError::new_err(e.to_string()),
        })?;
    Ok(outcome
        .hypotheses
        .iter()
        .map(|h| (h.name.clone(), h.result.log_evidence, h.result.log_evidence_error))
        .collect())
}

#[pymodule]
fn fem_evidence_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStructure>()?;
    m.add_class::<PyUpdatingProblem>()?;
    m.add_class::<PyEvidenceResult>()?;
    m.add_function(wrap_pyfunction!(bayes_factor, m)?)?;
    m.add_function(wrap_pyfunction!(jeffreys_classify, m)?)?;
    m.add_function(wrap_pyfunction!(build_report, m)?)?;
    m.add_function(wrap_pyfunction!(conjugate_gaussian_evidence, m)?)?;
    m.add_function(wrap_pyfunction!(validate_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
