//! Brute-force evidence: midpoint-rule grid quadrature for one or two
//! parameters, and the closed form for a Gaussian likelihood under a Gaussian
//! prior.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::bayes::{ProductPrior, UpdatingProblem};
use crate::error::{Error, Result};
use crate::math::log_sum_exp;
use crate::sampler::LogLikelihood;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub points_per_axis: usize,
    pub bounds: Vec<(f64, f64)>,
}

impl GridSpec {
    pub fn new(points_per_axis: usize, bounds: Vec<(f64, f64)>) -> Result<Self> {
        let g = Self {
            points_per_axis,
            bounds,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points_per_axis < 16 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 16 points per axis, got {}",
                self.points_per_axis
            )));
        }
        if self.bounds.len() > 2 {
            return Err(Error::Dimensionality(self.bounds.len()));
        }
        if self.bounds.is_empty() {
            return Err(Error::InvalidArgument("grid has no axes".into()));
        }
        for &(lo, hi) in &self.bounds {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidArgument(format!(
                    "grid bounds must be finite and ordered, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    fn axis(&self, k: usize) -> Vec<f64> {
        let (lo, hi) = self.bounds[k];
        let h = (hi - lo) / self.points_per_axis as f64;
        (0..self.points_per_axis).map(|i| lo + (i as f64 + 0.5) * h).collect()
    }

    fn log_cell_volume(&self) -> f64 {
        self.bounds
            .iter()
            .map(|(lo, hi)| ((hi - lo) / self.points_per_axis as f64).ln())
            .sum()
    }
}

/// `ln ∫ L(θ) π(θ) dθ` on the grid. Cells are summed in row-major order.
pub fn grid_log_evidence<L: LogLikelihood + ?Sized>(
    prior: &ProductPrior,
    likelihood: &L,
    grid: &GridSpec,
) -> Result<f64> {
    if prior.dim() > 2 {
        return Err(Error::Dimensionality(prior.dim()));
    }
    grid.validate()?;
    if grid.bounds.len() != prior.dim() {
        return Err(Error::InvalidArgument(format!(
            "grid has {} axes but the prior has {}",
            grid.bounds.len(),
            prior.dim()
        )));
    }
    let axes: Vec<Vec<f64>> = (0..prior.dim()).map(|k| grid.axis(k)).collect();
    let points: Vec<Vec<f64>> = match axes.as_slice() {
        [x] => x.iter().map(|&a| vec![a]).collect(),
        [x, y] => x.iter().flat_map(|&a| y.iter().map(move |&b| vec![a, b])).collect(),
        _ => unreachable!(),
    };
    let terms = points
        .par_iter()
        .map(|theta| {
            let lp = prior.log_density(theta);
            if lp == f64::NEG_INFINITY {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(likelihood.log_likelihood(theta)? + lp)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(log_sum_exp(&terms) + grid.log_cell_volume())
}

/// Grid evidence of a one- or two-parameter updating hypothesis over its prior box.
pub fn grid_evidence(problem: &UpdatingProblem, points_per_axis: usize) -> Result<f64> {
    let prior = problem.prior();
    if prior.dim() > 2 {
        return Err(Error::Dimensionality(prior.dim()));
    }
    let grid = GridSpec::new(points_per_axis, prior.bounds())?;
    grid_log_evidence(&prior, problem, &grid)
}

/// `ln ∫ N(x; m_l, v_l) N(x; m_p, v_p) dx = ln N(m_l; m_p, v_l + v_p)`.
pub fn conjugate_gaussian_evidence(
    prior_mean: f64,
    prior_variance: f64,
    likelihood_mean: f64,
    likelihood_variance: f64,
) -> Result<f64> {
    if !(prior_variance > 0.0 && likelihood_variance > 0.0) {
        return Err(Error::InvalidArgument("variances must be positive".into()));
    }
    let v = prior_variance + likelihood_variance;
    let d = likelihood_mean - prior_mean;
    Ok(-0.5 * (2.0 * PI * v).ln() - 0.5 * d * d / v)
}
