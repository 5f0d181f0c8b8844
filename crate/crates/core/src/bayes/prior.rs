use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Gaussian prior with precision `inverse_variance`, truncated to
/// `[lower_bound, upper_bound]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub mean: f64,
    pub inverse_variance: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

impl PriorSpec {
    pub fn new(mean: f64, inverse_variance: f64, lower_bound: f64, upper_bound: f64) -> Result<Self> {
        let p = Self {
            mean,
            inverse_variance,
            lower_bound,
            upper_bound,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.mean, self.inverse_variance, self.lower_bound, self.upper_bound]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.lower_bound < self.mean && self.mean < self.upper_bound) {
            return Err(Error::InvalidArgument(format!(
                "prior requires lower < mean < upper, got {:e} < {:e} < {:e}",
                self.lower_bound, self.mean, self.upper_bound
            )));
        }
        if self.inverse_variance <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "prior inverse variance must be positive, got {:e}",
                self.inverse_variance
            )));
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.inverse_variance.sqrt().recip()
    }

    /// Prior mass of the untruncated Gaussian inside the bounds.
    pub fn truncation_mass(&self) -> f64 {
        let s = self.sigma();
        std_normal_cdf((self.upper_bound - self.mean) / s) - std_normal_cdf((self.lower_bound - self.mean) / s)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower_bound && x <= self.upper_bound
    }

    pub fn log_density(&self, x: f64) -> f64 {
        if !self.contains(x) {
            return f64::NEG_INFINITY;
        }
        let s = self.sigma();
        let z = (x - self.mean) / s;
        -0.5 * z * z - 0.5 * (2.0 * PI * s * s).ln() - self.truncation_mass().ln()
    }

    /// Exact draw by rejection from the untruncated Gaussian.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let s = self.sigma();
        loop {
            let z: f64 = StandardNormal.sample(rng);
            let x = self.mean + s * z;
            if self.contains(x) {
                return x;
            }
        }
    }
}

/// One axis of a box-bounded prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParameterPrior {
    Uniform { lower: f64, upper: f64 },
    TruncatedNormal(PriorSpec),
}

impl ParameterPrior {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Self::Uniform { lower, upper } => (lower, upper),
            Self::TruncatedNormal(p) => (p.lower_bound, p.upper_bound),
        }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform { lower, upper } if x >= lower && x <= upper => -(upper - lower).ln(),
            Self::Uniform { .. } => f64::NEG_INFINITY,
            Self::TruncatedNormal(p) => p.log_density(x),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Uniform { lower, upper } => rng.random_range(lower..upper),
            Self::TruncatedNormal(p) => p.sample(rng),
        }
    }
}

/// Independent product of per-axis priors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPrior {
    axes: Vec<ParameterPrior>,
}

impl ProductPrior {
    pub fn new(axes: Vec<ParameterPrior>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidArgument("prior needs at least one axis".into()));
        }
        for a in &axes {
            match a {
                ParameterPrior::Uniform { lower, upper } => {
                    if !(lower.is_finite() && upper.is_finite() && lower < upper) {
                        return Err(Error::InvalidArgument(format!(
                            "uniform prior bounds must be finite and ordered, got [{lower}, {upper}]"
                        )));
                    }
                }
                ParameterPrior::TruncatedNormal(p) => p.validate()?,
            }
        }
        Ok(Self { axes })
    }

    pub fn uniform(bounds: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            bounds
                .iter()
                .map(|&(lower, upper)| ParameterPrior::Uniform { lower, upper })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[ParameterPrior] {
        &self.axes
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.axes.iter().map(ParameterPrior::bounds).collect()
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && self.axes.iter().zip(theta).all(|(a, &x)| {
                let (lo, hi) = a.bounds();
                x >= lo && x <= hi
            })
    }

    pub fn log_density(&self, theta: &[f64]) -> f64 {
        debug_assert_eq!(theta.len(), self.dim());
        self.axes.iter().zip(theta).map(|(a, &x)| a.log_density(x)).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.axes.iter().map(|a| a.sample(rng)).collect()
    }
}
