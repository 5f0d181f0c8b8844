//! Nested sampling over a box-bounded prior.
//!
//! The prior volume shrinks on the deterministic schedule `X_i = exp(−i/N)`.
//! Each iteration retires the worst live point, credits it with the trapezoid
//! weight `(X_{i−1} − X_{i+1}) / 2`, and replaces it by a constrained random
//! walk started from a surviving live point. The walk targets the prior and
//! rejects any proposal that does not strictly beat the retired likelihood.

use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{ProductPrior, UpdatingProblem};
use crate::error::{Error, Result};
use crate::math::{log_add_exp, log_sum_exp};

pub trait LogLikelihood: Sync {
    fn log_likelihood(&self, theta: &[f64]) -> Result<f64>;
}

impl<F> LogLikelihood for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn log_likelihood(&self, theta: &[f64]) -> Result<f64> {
        Ok(self(theta))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub n_live: usize,
    pub max_iterations: usize,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "defaults::mcmc_steps")]
    pub mcmc_steps: usize,
    /// Initial random-walk step as a fraction of each prior box width.
    #[serde(default = "defaults::initial_step_scale")]
    pub initial_step_scale: f64,
    /// Stop once `ln(1 + L_max X_i / Z_i)` drops below this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination_tolerance: Option<f64>,
    /// Proposals allowed before a replacement without any accepted move is
    /// declared a plateau.
    #[serde(default = "defaults::max_proposals")]
    pub max_proposals: usize,
}

mod defaults {
    pub fn mcmc_steps() -> usize {
        20
    }
    pub fn initial_step_scale() -> f64 {
        0.1
    }
    pub fn max_proposals() -> usize {
        1000
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n_live: 100,
            max_iterations: 250,
            rng_seed: 0,
            mcmc_steps: defaults::mcmc_steps(),
            initial_step_scale: defaults::initial_step_scale(),
            termination_tolerance: None,
            max_proposals: defaults::max_proposals(),
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n_live < 2 {
            problems.push(format!("n_live must be at least 2, got {}", self.n_live));
        }
        if self.max_iterations < 1 {
            problems.push("max_iterations must be at least 1".to_string());
        }
        if self.mcmc_steps < 1 {
            problems.push("mcmc_steps must be at least 1".to_string());
        }
        if !(self.initial_step_scale > 0.0 && self.initial_step_scale <= 1.0) {
            problems.push(format!(
                "initial_step_scale must lie in (0, 1], got {}",
                self.initial_step_scale
            ));
        }
        if let Some(t) = self.termination_tolerance {
            if !(t.is_finite() && t > 0.0) {
                problems.push(format!("termination_tolerance must be positive, got {t}"));
            }
        }
        if self.max_proposals < 1 {
            problems.push("max_proposals must be at least 1".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(problems.join("; ")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LivePoint {
    pub theta: Vec<f64>,
    pub log_likelihood: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeadPoint {
    pub theta: Vec<f64>,
    pub log_likelihood: f64,
    /// `ln X_i = −i / N`.
    pub log_prior_volume: f64,
    /// Normalised posterior weight `ln(L_i b_i / Z)`, set by [`NestedSampler::finalize`].
    pub log_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub log_likelihood: f64,
    pub log_prior_volume: f64,
    pub log_evidence: f64,
}

pub const TRACE_HEADER: &str = "iteration,logL,logX,logZ";

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.12e},{:.12e},{:.12e}",
            r.iteration, r.log_likelihood, r.log_prior_volume, r.log_evidence
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct EvidenceResult {
    pub log_evidence: f64,
    pub log_evidence_error: f64,
    pub information_nats: f64,
    pub dead_points: Vec<DeadPoint>,
    pub final_live_points: Vec<LivePoint>,
    /// Posterior weights of `final_live_points`, same normalisation as the dead points.
    pub final_live_log_weights: Vec<f64>,
    pub iterations_run: usize,
    pub n_live: usize,
    pub trace: Vec<TraceRow>,
}

impl EvidenceResult {
    /// Every weighted sample: dead points in order, then the final live set.
    pub fn weighted_points(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.dead_points
            .iter()
            .map(|d| (d.theta.as_slice(), d.log_weight))
            .chain(
                self.final_live_points
                    .iter()
                    .zip(&self.final_live_log_weights)
                    .map(|(p, &w)| (p.theta.as_slice(), w)),
            )
    }

    pub fn total_weight(&self) -> f64 {
        self.weighted_points().map(|(_, w)| w.exp()).sum()
    }

    /// Posterior mean of each parameter.
    pub fn posterior_mean(&self) -> Vec<f64> {
        let d = self.final_live_points.first().map_or(0, |p| p.theta.len());
        let mut mean = vec![0.0; d];
        for (theta, w) in self.weighted_points() {
            let w = w.exp();
            for (m, x) in mean.iter_mut().zip(theta) {
                *m += w * x;
            }
        }
        mean
    }
}

/// Running trapezoid quadrature of `∫ L dX` on the schedule `X_i = exp(−i/N)`.
#[derive(Debug, Clone)]
pub struct EvidenceAccumulator {
    n_live: usize,
    iteration: usize,
    log_evidence: f64,
    log_shrink_gap: f64,
}

impl EvidenceAccumulator {
    pub fn new(n_live: usize) -> Self {
        // X_{i−1} − X_{i+1} = X_{i−1} (1 − e^{−2/N})
        let log_shrink_gap = (-(-2.0 / n_live as f64).exp_m1()).ln();
        Self {
            n_live,
            iteration: 0,
            log_evidence: f64::NEG_INFINITY,
            log_shrink_gap,
        }
    }

    pub fn log_volume(&self, iteration: usize) -> f64 {
        -(iteration as f64) / self.n_live as f64
    }

    /// `ln b_i = ln((X_{i−1} − X_{i+1}) / 2)`.
    pub fn log_trapezoid_weight(&self, iteration: usize) -> f64 {
        self.log_volume(iteration - 1) + self.log_shrink_gap - std::f64::consts::LN_2
    }

    /// Credit the next dead point; returns `(ln X_i, ln b_i)`.
    pub fn push(&mut self, log_likelihood: f64) -> (f64, f64) {
        self.iteration += 1;
        let log_b = self.log_trapezoid_weight(self.iteration);
        self.log_evidence = log_add_exp(self.log_evidence, log_likelihood + log_b);
        (self.log_volume(self.iteration), log_b)
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn log_evidence(&self) -> f64 {
        self.log_evidence
    }

    /// Running evidence plus the remainder `X_n · mean(L_live)`.
    pub fn log_evidence_with_remainder(&self, live_log_likelihoods: &[f64]) -> f64 {
        let remainder = log_sum_exp(live_log_likelihoods) + self.log_volume(self.iteration)
            - (live_log_likelihoods.len() as f64).ln();
        log_add_exp(self.log_evidence, remainder)
    }
}

pub struct NestedSampler<'a, L: LogLikelihood + ?Sized> {
    prior: ProductPrior,
    likelihood: &'a L,
    cfg: SamplerConfig,
    rng: ChaCha8Rng,
    live: Vec<LivePoint>,
    dead: Vec<DeadPoint>,
    accumulator: EvidenceAccumulator,
    widths: Vec<f64>,
    step_scale: f64,
    trace: Vec<TraceRow>,
}

impl<'a, L: LogLikelihood + ?Sized> NestedSampler<'a, L> {
    /// Draw `n_live` points from the prior and evaluate their likelihoods.
    pub fn initialize(prior: ProductPrior, likelihood: &'a L, cfg: SamplerConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let thetas: Vec<Vec<f64>> = (0..cfg.n_live).map(|_| prior.sample(&mut rng)).collect();
        let live = thetas
            .into_par_iter()
            .enumerate()
            .map(|(index, theta)| match likelihood.log_likelihood(&theta) {
                Ok(l) if !l.is_nan() => Ok(LivePoint {
                    theta,
                    log_likelihood: l,
                }),
                Ok(_) => Err(Error::Initialization {
                    index,
                    source: Box::new(Error::InvalidArgument(format!("log-likelihood is NaN at {theta:?}"))),
                }),
                Err(e) => Err(Error::Initialization {
                    index,
                    source: Box::new(e),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        let widths = prior.bounds().iter().map(|(lo, hi)| hi - lo).collect();
        Ok(Self {
            accumulator: EvidenceAccumulator::new(cfg.n_live),
            step_scale: cfg.initial_step_scale,
            prior,
            likelihood,
            cfg,
            rng,
            live,
            dead: Vec::new(),
            widths,
            trace: Vec::new(),
        })
    }

    pub fn live_points(&self) -> &[LivePoint] {
        &self.live
    }

    pub fn dead_points(&self) -> &[DeadPoint] {
        &self.dead
    }

    pub fn iteration(&self) -> usize {
        self.accumulator.iteration()
    }

    pub fn running_log_evidence(&self) -> f64 {
        self.accumulator.log_evidence()
    }

    pub fn step_scale(&self) -> f64 {
        self.step_scale
    }

    /// `ln(1 + L_max X_i / Z_i)`, an upper bound on what the live set can still add.
    pub fn remaining_evidence_bound(&self) -> f64 {
        let max_live = self
            .live
            .iter()
            .map(|p| p.log_likelihood)
            .fold(f64::NEG_INFINITY, f64::max);
        let log_z = self.accumulator.log_evidence();
        if log_z == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        let ratio = max_live + self.accumulator.log_volume(self.iteration()) - log_z;
        ratio.exp().ln_1p()
    }

    pub fn is_terminated(&self) -> bool {
        if self.iteration() >= self.cfg.max_iterations {
            return true;
        }
        matches!(self.cfg.termination_tolerance, Some(t) if self.remaining_evidence_bound() < t)
    }

    /// Retire the worst live point and replace it under the hard constraint.
    pub fn iterate(&mut self) -> Result<()> {
        let worst = self
            .live
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.log_likelihood.total_cmp(&b.1.log_likelihood))
            .map(|(i, _)| i)
            .expect("live set is never empty");
        let threshold = self.live[worst].log_likelihood;
        let (log_x, _) = self.accumulator.push(threshold);
        if let Some(last) = self.dead.last() {
            debug_assert!(threshold >= last.log_likelihood);
        }

        let mut donor = self.rng.random_range(0..self.live.len() - 1);
        if donor >= worst {
            donor += 1;
        }
        let start = self.live[donor].clone();
        let replacement = self.constrained_walk(start, threshold)?;
        assert!(
            replacement.log_likelihood > threshold,
            "replacement violates the likelihood constraint"
        );

        let retired = std::mem::replace(&mut self.live[worst], replacement);
        self.dead.push(DeadPoint {
            theta: retired.theta,
            log_likelihood: retired.log_likelihood,
            log_prior_volume: log_x,
            log_weight: f64::NAN,
        });
        self.trace.push(TraceRow {
            iteration: self.iteration(),
            log_likelihood: threshold,
            log_prior_volume: log_x,
            log_evidence: self.accumulator.log_evidence(),
        });
        Ok(())
    }

    /// Component-wise Metropolis walk on the prior restricted to `L > threshold`.
    fn constrained_walk(&mut self, start: LivePoint, threshold: f64) -> Result<LivePoint> {
        let mut current = start;
        let mut current_log_prior: Vec<f64> = self
            .prior
            .axes()
            .iter()
            .zip(&current.theta)
            .map(|(a, &x)| a.log_density(x))
            .collect();
        let (mut accepted, mut rejected, mut proposals) = (0usize, 0usize, 0usize);
        let mut sweeps = 0;
        let dim = self.prior.dim();

        loop {
            if sweeps >= self.cfg.mcmc_steps && accepted > 0 {
                break;
            }
            for k in 0..dim {
                if accepted == 0 && proposals >= self.cfg.max_proposals {
                    return Err(Error::Plateau {
                        log_likelihood: threshold,
                        proposals,
                    });
                }
                proposals += 1;
                let axis = self.prior.axes()[k];
                let z: f64 = self.rng.sample(StandardNormal);
                let x = current.theta[k] + self.step_scale * self.widths[k] * z;
                let lp = axis.log_density(x);
                if lp == f64::NEG_INFINITY {
                    rejected += 1;
                    continue;
                }
                let u: f64 = self.rng.random();
                if u.ln() > lp - current_log_prior[k] {
                    rejected += 1;
                    continue;
                }
                let mut theta = current.theta.clone();
                theta[k] = x;
                let l = self.likelihood.log_likelihood(&theta)?;
                if l > threshold {
                    current = LivePoint {
                        theta,
                        log_likelihood: l,
                    };
                    current_log_prior[k] = lp;
                    accepted += 1;
                } else {
                    rejected += 1;
                }
            }
            sweeps += 1;
        }

        if accepted > rejected {
            self.step_scale *= (1.0 / accepted as f64).exp();
        } else if accepted < rejected {
            self.step_scale /= (1.0 / rejected as f64).exp();
        }
        self.step_scale = self.step_scale.min(1.0);
        Ok(current)
    }

    /// Iterate until `max_iterations` or the optional tolerance stops the run.
    pub fn run(mut self) -> Result<EvidenceResult> {
        while !self.is_terminated() {
            self.iterate()?;
        }
        Ok(self.finalize())
    }

    /// Add the live-point remainder and normalise the posterior weights.
    pub fn finalize(self) -> EvidenceResult {
        let n = self.cfg.n_live;
        let iterations = self.iteration();
        let log_live_volume = self.accumulator.log_volume(iterations) - (n as f64).ln();

        let mut terms: Vec<f64> = self
            .dead
            .iter()
            .enumerate()
            .map(|(i, d)| d.log_likelihood + self.accumulator.log_trapezoid_weight(i + 1))
            .collect();
        terms.extend(self.live.iter().map(|p| p.log_likelihood + log_live_volume));
        let log_z = log_sum_exp(&terms);

        let mut information = 0.0;
        let all_log_l = self
            .dead
            .iter()
            .map(|d| d.log_likelihood)
            .chain(self.live.iter().map(|p| p.log_likelihood));
        for (t, l) in terms.iter().zip(all_log_l) {
            let p = (t - log_z).exp();
            if p > 0.0 {
                information += p * (l - log_z);
            }
        }
        let information = information.max(0.0);

        let mut dead = self.dead;
        for (d, t) in dead.iter_mut().zip(&terms) {
            d.log_weight = t - log_z;
        }
        let live_weights = terms[dead.len()..].iter().map(|t| t - log_z).collect();

        EvidenceResult {
            log_evidence: log_z,
            log_evidence_error: (information / n as f64).sqrt(),
            information_nats: information,
            dead_points: dead,
            final_live_points: self.live,
            final_live_log_weights: live_weights,
            iterations_run: iterations,
            n_live: n,
            trace: self.trace,
        }
    }
}

/// Run nested sampling on an FE updating problem.
pub fn run_nested_sampling(problem: &UpdatingProblem, cfg: &SamplerConfig) -> Result<EvidenceResult> {
    NestedSampler::initialize(problem.prior(), problem, cfg.clone())?.run()
}

/// Draw `n` parameter vectors with replacement, proportional to posterior weight.
pub fn posterior_samples(result: &EvidenceResult, n: usize, rng_seed: u64) -> Vec<Vec<f64>> {
    if n == 0 {
        return Vec::new();
    }
    let points: Vec<(&[f64], f64)> = result.weighted_points().collect();
    let weights: Vec<f64> = points.iter().map(|(_, w)| w.exp()).collect();
    let index = WeightedIndex::new(&weights).expect("posterior weights are finite and sum to one");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..n).map(|_| points[index.sample(&mut rng)].0.to_vec()).collect()
}
