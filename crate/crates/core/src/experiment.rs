//! Runs every hypothesis of a config and writes the result files.
//!
//! Files written to the output directory:
//!
//! | file | contents |
//! |------|----------|
//! | `evidence_<name>.txt` | `key = value` lines: log Z, its error, H, iterations, seed |
//! | `ranking.csv` | `rank,model,log_evidence,log_evidence_error,n_parameters` |
//! | `bayes_factors.csv` | `pair,log_e_factor,factor,label` |
//! | `posterior_<name>.csv` | `sample,E<id>...` one column per free element |
//! | `trace_<name>.csv` | `iteration,logL,logX,logZ` (only with tracing on) |

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::bayes::UpdatingProblem;
use crate::config::{ConfigError, Experiment, ExperimentConfig};
use crate::sampler::{posterior_samples, run_nested_sampling, write_trace_csv, EvidenceResult, SamplerConfig};
use crate::selection::{build_report, ComparisonReport, ModelEvidence};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Replaces `sampler.rng_seed` from the config.
    pub seed: Option<u64>,
    pub trace: bool,
    /// Run hypotheses on the rayon pool instead of one after another.
    pub concurrent: bool,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            seed: None,
            trace: false,
            concurrent: true,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("hypothesis {hypothesis}: {source}")]
    Numerical {
        hypothesis: String,
        #[source]
        source: crate::Error,
    },
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical { .. } | RunError::Output { .. } => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HypothesisOutcome {
    pub name: String,
    pub free_elements: Vec<usize>,
    pub seed: u64,
    pub result: EvidenceResult,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub hypotheses: Vec<HypothesisOutcome>,
    pub report: ComparisonReport,
}

/// 64-bit FNV-1a, stable across platforms and releases.
pub fn stable_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn hypothesis_seed(base: u64, name: &str) -> u64 {
    base ^ stable_hash(name)
}

fn run_one(problem: &UpdatingProblem, sampler: &SamplerConfig, base_seed: u64) -> Result<HypothesisOutcome, RunError> {
    let name = problem.hypothesis.name.clone();
    let seed = hypothesis_seed(base_seed, &name);
    let cfg = SamplerConfig {
        rng_seed: seed,
        ..sampler.clone()
    };
    let result = run_nested_sampling(problem, &cfg).map_err(|source| RunError::Numerical {
        hypothesis: name.clone(),
        source,
    })?;
    Ok(HypothesisOutcome {
        name,
        free_elements: problem.hypothesis.free_elements.clone(),
        seed,
        result,
    })
}

/// Run every hypothesis without touching the filesystem.
pub fn evaluate(experiment: &Experiment, base_seed: u64, concurrent: bool) -> Result<ExperimentOutcome, RunError> {
    let outcomes: Vec<HypothesisOutcome> = if concurrent {
        experiment
            .problems
            .par_iter()
            .map(|p| run_one(p, &experiment.sampler, base_seed))
            .collect::<Result<_, _>>()?
    } else {
        experiment
            .problems
            .iter()
            .map(|p| run_one(p, &experiment.sampler, base_seed))
            .collect::<Result<_, _>>()?
    };
    let evidences: Vec<ModelEvidence> = outcomes
        .iter()
        .map(|o| ModelEvidence {
            name: o.name.clone(),
            log_evidence: o.result.log_evidence,
            log_evidence_error: o.result.log_evidence_error,
            n_parameters: o.free_elements.len(),
        })
        .collect();
    let report = build_report(&evidences, &experiment.comparisons).map_err(|source| RunError::Numerical {
        hypothesis: "comparison".into(),
        source,
    })?;
    Ok(ExperimentOutcome {
        hypotheses: outcomes,
        report,
    })
}

pub fn evidence_text(o: &HypothesisOutcome) -> String {
    let r = &o.result;
    let mut s = String::new();
    let _ = writeln!(s, "name = {}", o.name);
    let _ = writeln!(s, "log_evidence = {}", r.log_evidence);
    let _ = writeln!(s, "log_evidence_error = {}", r.log_evidence_error);
    let _ = writeln!(s, "information_nats = {}", r.information_nats);
    let _ = writeln!(s, "iterations = {}", r.iterations_run);
    let _ = writeln!(s, "n_live = {}", r.n_live);
    let _ = writeln!(s, "seed = {}", o.seed);
    let ids: Vec<String> = o.free_elements.iter().map(ToString::to_string).collect();
    let _ = writeln!(s, "free_elements = {}", ids.join(" "));
    for (id, m) in o.free_elements.iter().zip(r.posterior_mean()) {
        let _ = writeln!(s, "posterior_mean_E{id} = {m}");
    }
    s
}

pub fn posterior_header(free_elements: &[usize]) -> String {
    let mut h = String::from("sample");
    for id in free_elements {
        let _ = write!(h, ",E{id}");
    }
    h
}

pub fn posterior_csv(o: &HypothesisOutcome, n_samples: usize) -> String {
    let mut s = posterior_header(&o.free_elements);
    s.push('\n');
    for (i, theta) in posterior_samples(&o.result, n_samples, o.seed).iter().enumerate() {
        let _ = write!(s, "{i}");
        for x in theta {
            let _ = write!(s, ",{x}");
        }
        s.push('\n');
    }
    s
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<(), RunError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| RunError::Output {
        path: path.display().to_string(),
        source,
    })
}

/// Write every artifact of a finished experiment.
pub fn write_outputs(
    outcome: &ExperimentOutcome,
    out_dir: &Path,
    posterior_draws: usize,
    trace: bool,
) -> Result<(), RunError> {
    fs::create_dir_all(out_dir).map_err(|source| RunError::Output {
        path: out_dir.display().to_string(),
        source,
    })?;
    for o in &outcome.hypotheses {
        write_file(
            out_dir,
            &format!("evidence_{}.txt", o.name),
            evidence_text(o).as_bytes(),
        )?;
        write_file(
            out_dir,
            &format!("posterior_{}.csv", o.name),
            posterior_csv(o, posterior_draws).as_bytes(),
        )?;
        if trace {
            let mut buf = Vec::new();
            write_trace_csv(&o.result.trace, &mut buf).expect("writing to memory");
            write_file(out_dir, &format!("trace_{}.csv", o.name), &buf)?;
        }
    }
    write_file(out_dir, "ranking.csv", outcome.report.ranking_csv().as_bytes())?;
    write_file(
        out_dir,
        "bayes_factors.csv",
        outcome.report.bayes_factors_csv().as_bytes(),
    )?;
    Ok(())
}

/// Load, validate, run and write. Config problems map to exit code 1,
/// sampler failures to 2.
pub fn run_experiment(config_path: &Path, opts: &RunOptions) -> Result<ExperimentOutcome, RunError> {
    let (cfg, source) = ExperimentConfig::read(config_path)?;
    let experiment = cfg.build(Some(&source))?;
    let base_seed = opts.seed.unwrap_or(cfg.sampler.rng_seed);
    let outcome = evaluate(&experiment, base_seed, opts.concurrent)?;
    write_outputs(&outcome, &opts.out_dir, experiment.posterior_samples, opts.trace)?;
    Ok(outcome)
}
