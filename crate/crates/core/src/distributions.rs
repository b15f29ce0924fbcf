//! Parametric families used both to generate data and as ABC models.
//!
//! Parameter conventions:
//!
//! | family      | `p1`            | `p2`          |
//! |-------------|-----------------|---------------|
//! | Normal      | mean μ          | sd σ          |
//! | LogNormal   | log-mean μ      | log-sd σ      |
//! | Weibull     | shape κ         | scale λ       |
//! | Beta        | α               | β             |
//! | Exponential | **mean** (not rate) | unused        |

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Beta, Distribution, Exp, LogNormal, Normal, Weibull};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::gamma_fn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Normal,
    #[serde(alias = "log-normal")]
    LogNormal,
    Weibull,
    Beta,
    Exponential,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::Normal, Family::LogNormal, Family::Weibull, Family::Beta, Family::Exponential];

    pub fn n_params(self) -> usize {
        match self {
            Family::Exponential => 1,
            _ => 2,
        }
    }

    /// True for families supported on the positive half-line.
    pub fn is_positive(self) -> bool {
        matches!(self, Family::LogNormal | Family::Weibull | Family::Exponential)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Normal => "normal",
            Family::LogNormal => "lognormal",
            Family::Weibull => "weibull",
            Family::Beta => "beta",
            Family::Exponential => "exponential",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" => Ok(Family::Normal),
            "lognormal" | "log-normal" => Ok(Family::LogNormal),
            "weibull" => Ok(Family::Weibull),
            "beta" => Ok(Family::Beta),
            "exponential" | "exp" => Ok(Family::Exponential),
            other => Err(Error::Config(format!("unknown family `{other}`"))),
        }
    }
}

/// A family together with its parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub family: Family,
    pub p1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p2: Option<f64>,
}

impl DistributionSpec {
    pub fn normal(mean: f64, sd: f64) -> Self {
        DistributionSpec { family: Family::Normal, p1: mean, p2: Some(sd) }
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Self {
        DistributionSpec { family: Family::LogNormal, p1: mu, p2: Some(sigma) }
    }

    pub fn weibull(shape: f64, scale: f64) -> Self {
        DistributionSpec { family: Family::Weibull, p1: shape, p2: Some(scale) }
    }

    pub fn beta(alpha: f64, beta: f64) -> Self {
        DistributionSpec { family: Family::Beta, p1: alpha, p2: Some(beta) }
    }

    pub fn exponential(mean: f64) -> Self {
        DistributionSpec { family: Family::Exponential, p1: mean, p2: None }
    }

    /// Builds a spec from a parameter slice in `(p1, p2)` order.
    pub fn from_params(family: Family, params: &[f64]) -> Result<Self> {
        if params.len() != family.n_params() {
            return Err(Error::InvalidParameters(format!(
                "{family} takes {} parameters, got {}",
                family.n_params(),
                params.len()
            )));
        }
        DistributionSpec { family, p1: params[0], p2: params.get(1).copied() }.validate()
    }

    pub fn params(&self) -> Vec<f64> {
        std::iter::once(self.p1).chain(self.p2).collect()
    }

    pub fn validate(self) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        let p2 = match (self.family, self.p2) {
            (Family::Exponential, None) => 0.0,
            (Family::Exponential, Some(_)) => return bad("exponential takes one parameter".into()),
            (f, None) => return bad(format!("{f} needs a second parameter")),
            (_, Some(v)) => v,
        };
        if !self.p1.is_finite() || !p2.is_finite() {
            return bad(format!("{self} has non-finite parameters"));
        }
        let ok = match self.family {
            Family::Normal | Family::LogNormal => p2 > 0.0,
            Family::Weibull | Family::Beta => self.p1 > 0.0 && p2 > 0.0,
            Family::Exponential => self.p1 > 0.0,
        };
        if ok {
            Ok(self)
        } else {
            bad(format!("{self} is outside the parameter space"))
        }
    }

    /// Prepares a sampler; validate once, draw many times.
    pub fn sampler(&self) -> Result<Sampler> {
        let spec = self.validate()?;
        let p2 = spec.p2.unwrap_or(0.0);
        let err = |e: &dyn fmt::Display| Error::InvalidParameters(format!("{spec}: {e}"));
        Ok(match spec.family {
            Family::Normal => Sampler::Normal(Normal::new(spec.p1, p2).map_err(|e| err(&e))?),
            Family::LogNormal => Sampler::LogNormal(LogNormal::new(spec.p1, p2).map_err(|e| err(&e))?),
            Family::Weibull => Sampler::Weibull(Weibull::new(p2, spec.p1).map_err(|e| err(&e))?),
            Family::Beta => Sampler::Beta(Beta::new(spec.p1, p2).map_err(|e| err(&e))?),
            Family::Exponential => Sampler::Exponential(Exp::new(1.0 / spec.p1).map_err(|e| err(&e))?),
        })
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.p2 {
            Some(p2) => write!(f, "{}({}, {})", self.family, self.p1, p2),
            None => write!(f, "{}({})", self.family, self.p1),
        }
    }
}

/// A ready-to-draw distribution.
#[derive(Debug, Clone, Copy)]
pub enum Sampler {
    Normal(Normal<f64>),
    LogNormal(LogNormal<f64>),
    Weibull(Weibull<f64>),
    Beta(Beta<f64>),
    Exponential(Exp<f64>),
}

impl Sampler {
    /// Overwrites `buf` with independent draws.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut [f64]) {
        fn go<D: Distribution<f64>, R: Rng + ?Sized>(d: &D, rng: &mut R, buf: &mut [f64]) {
            buf.iter_mut().for_each(|x| *x = d.sample(rng));
        }
        match self {
            Sampler::Normal(d) => go(d, rng, buf),
            Sampler::LogNormal(d) => go(d, rng, buf),
            Sampler::Weibull(d) => go(d, rng, buf),
            Sampler::Beta(d) => go(d, rng, buf),
            Sampler::Exponential(d) => go(d, rng, buf),
        }
    }
}

/// `n` independent draws from `spec`.
pub fn sample<R: Rng + ?Sized>(spec: &DistributionSpec, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let sampler = spec.sampler()?;
    let mut out = vec![0.0; n];
    sampler.fill(rng, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
}

/// Closed-form mean and standard deviation of `spec`.
pub fn moments(spec: &DistributionSpec) -> Result<Moments> {
    let spec = spec.validate()?;
    let p2 = spec.p2.unwrap_or(0.0);
    let (mean, sd) = match spec.family {
        Family::Normal => (spec.p1, p2),
        Family::LogNormal => {
            let mean = (spec.p1 + p2 * p2 / 2.0).exp();
            (mean, mean * (p2 * p2).exp_m1().sqrt())
        }
        Family::Weibull => {
            let (shape, scale) = (spec.p1, p2);
            let g1 = gamma_fn(1.0 + 1.0 / shape)?;
            let g2 = gamma_fn(1.0 + 2.0 / shape)?;
            (scale * g1, scale * (g2 - g1 * g1).max(0.0).sqrt())
        }
        Family::Beta => {
            let (a, b) = (spec.p1, p2);
            let s = a + b;
            (a / s, (a * b / (s * s * (s + 1.0))).sqrt())
        }
        Family::Exponential => (spec.p1, spec.p1),
    };
    Ok(Moments { mean, sd })
}
