//! Closed-form estimators of the sample mean and SD from reported
//! statistics: the ad-hoc rules, Hozo et al., Bland, and Wan et al.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::normal_quantile;
use crate::summary_stats::{Scenario, SummaryStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[serde(alias = "ad-hoc")]
    AdHoc,
    Hozo,
    Bland,
    Wan,
    Abc,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::AdHoc, Method::Hozo, Method::Bland, Method::Wan, Method::Abc];

    pub fn supports(self, scenario: Scenario) -> bool {
        match self {
            Method::AdHoc => scenario != Scenario::S2,
            Method::Hozo => scenario == Scenario::S1,
            Method::Bland => scenario == Scenario::S2,
            Method::Wan | Method::Abc => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::AdHoc => "adhoc",
            Method::Hozo => "hozo",
            Method::Bland => "bland",
            Method::Wan => "wan",
            Method::Abc => "abc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "adhoc" | "ad-hoc" => Ok(Method::AdHoc),
            "hozo" => Ok(Method::Hozo),
            "bland" => Ok(Method::Bland),
            "wan" => Ok(Method::Wan),
            "abc" => Ok(Method::Abc),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub sd: f64,
    pub method: Method,
    pub scenario: Scenario,
}

/// Which line of Bland's formulas to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlandVariant {
    /// The sample-size-free large-n approximation.
    #[default]
    Approximate,
    /// The n-dependent form. Experimental: reconstructed so that it reduces
    /// to the approximation as n grows and gives zero variance for constant
    /// summaries.
    Exact,
}

/// Median for the mean; `range / 4` (S1) or `IQR / 1.35` (S3) for the SD.
pub fn adhoc_estimate(stats: &SummaryStats, scenario: Scenario) -> Result<Estimate> {
    let sd = match scenario {
        Scenario::S1 => (stats.require("max", scenario)? - stats.require("min", scenario)?) / 4.0,
        Scenario::S3 => (stats.require("q3", scenario)? - stats.require("q1", scenario)?) / 1.35,
        Scenario::S2 => return Err(Error::UnsupportedScenario { method: Method::AdHoc, scenario }),
    };
    Ok(Estimate { mean: stats.median, sd, method: Method::AdHoc, scenario })
}

fn hozo_mean(min: f64, med: f64, max: f64, n: usize) -> f64 {
    if n <= 25 {
        (min + 2.0 * med + max) / 4.0
    } else {
        med
    }
}

/// Hozo et al. under S1, piecewise in `n`.
pub fn hozo_estimate(stats: &SummaryStats) -> Result<Estimate> {
    let sc = Scenario::S1;
    let (min, med, max) = (stats.require("min", sc)?, stats.median, stats.require("max", sc)?);
    let n = stats.n;
    if n < 2 {
        return Err(Error::SampleSizeTooSmall { n });
    }
    let range = max - min;
    let variance = if n <= 15 {
        // The skew term is (min - 2 med + max)², which vanishes for symmetric data.
        let skew = min - 2.0 * med + max;
        (skew * skew / 4.0 + range * range) / 12.0
    } else if n <= 70 {
        (range / 4.0).powi(2)
    } else {
        (range / 6.0).powi(2)
    };
    Ok(Estimate { mean: hozo_mean(min, med, max, n), sd: variance.sqrt(), method: Method::Hozo, scenario: sc })
}

struct Five {
    min: f64,
    q1: f64,
    med: f64,
    q3: f64,
    max: f64,
}

impl Five {
    fn from(stats: &SummaryStats) -> Result<Self> {
        let sc = Scenario::S2;
        Ok(Five {
            min: stats.require("min", sc)?,
            q1: stats.require("q1", sc)?,
            med: stats.median,
            q3: stats.require("q3", sc)?,
            max: stats.require("max", sc)?,
        })
    }

    fn approx_mean(&self) -> f64 {
        (self.min + 2.0 * self.q1 + 2.0 * self.med + 2.0 * self.q3 + self.max) / 8.0
    }

    fn sum_sq(&self) -> f64 {
        let Five { min, q1, med, q3, max } = *self;
        min * min + 2.0 * q1 * q1 + 2.0 * med * med + 2.0 * q3 * q3 + max * max
    }

    fn cross(&self) -> f64 {
        self.q1 * (self.min + self.med) + self.q3 * (self.med + self.max)
    }

    fn largest_square(&self) -> f64 {
        [self.min, self.q1, self.med, self.q3, self.max].iter().fold(0.0f64, |m, x| m.max(x * x))
    }
}

/// Bland's estimator under S2, large-n approximation.
pub fn bland_estimate(stats: &SummaryStats) -> Result<Estimate> {
    bland_estimate_with(stats, BlandVariant::Approximate)
}

pub fn bland_estimate_with(stats: &SummaryStats, variant: BlandVariant) -> Result<Estimate> {
    let f = Five::from(stats)?;
    let (mean, variance) = match variant {
        BlandVariant::Approximate => {
            let mean = f.approx_mean();
            (mean, f.sum_sq() / 16.0 + f.cross() / 8.0 - mean * mean)
        }
        BlandVariant::Exact => {
            let n = stats.n as f64;
            if stats.n < 2 {
                return Err(Error::SampleSizeTooSmall { n: stats.n });
            }
            let mean = ((n + 3.0) * (f.min + f.max) + 2.0 * (n - 1.0) * (f.q1 + f.med + f.q3)) / (8.0 * n);
            let var = ((n + 3.0) * f.sum_sq() + 8.0 * (f.min * f.min + f.max * f.max)) / (16.0 * n)
                + (n - 5.0) * f.cross() / (8.0 * n)
                - mean * mean;
            (mean, var)
        }
    };
    let sd = checked_sd(variance, f.largest_square())?;
    Ok(Estimate { mean, sd, method: Method::Bland, scenario: Scenario::S2 })
}

// Cancellation can leave a constant summary a few ulps below zero; anything
// beyond that is reported rather than clamped.
fn checked_sd(variance: f64, scale_sq: f64) -> Result<f64> {
    if variance < -64.0 * f64::EPSILON * scale_sq {
        return Err(Error::NegativeVariance { variance });
    }
    Ok(variance.max(0.0).sqrt())
}

/// Wan et al. mean: Hozo's rule in S1, Bland's in S2, the quartile average in S3.
pub fn wan_mean(stats: &SummaryStats, scenario: Scenario) -> Result<f64> {
    match scenario {
        Scenario::S1 => {
            Ok(hozo_mean(stats.require("min", scenario)?, stats.median, stats.require("max", scenario)?, stats.n))
        }
        Scenario::S2 => Ok(Five::from(stats)?.approx_mean()),
        Scenario::S3 => Ok((stats.require("q1", scenario)? + stats.median + stats.require("q3", scenario)?) / 3.0),
    }
}

fn wan_range_sd(stats: &SummaryStats, scenario: Scenario) -> Result<f64> {
    let range = stats.require("max", scenario)? - stats.require("min", scenario)?;
    let n = stats.n as f64;
    Ok(range / wan_denominator((n - 0.375) / (n + 0.25), stats.n)?)
}

fn wan_iqr_sd(stats: &SummaryStats, scenario: Scenario) -> Result<f64> {
    let iqr = stats.require("q3", scenario)? - stats.require("q1", scenario)?;
    let n = stats.n as f64;
    Ok(iqr / wan_denominator((0.75 * n - 0.125) / (n + 0.25), stats.n)?)
}

fn wan_denominator(p: f64, n: usize) -> Result<f64> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::DegenerateRange { n });
    }
    Ok(2.0 * normal_quantile(p)?)
}

/// Wan et al. SD: range-based in S1, IQR-based in S3, their equal-weight
/// average in S2.
pub fn wan_sd(stats: &SummaryStats, scenario: Scenario) -> Result<f64> {
    match scenario {
        Scenario::S1 => wan_range_sd(stats, scenario),
        Scenario::S3 => wan_iqr_sd(stats, scenario),
        Scenario::S2 => Ok(0.5 * wan_range_sd(stats, scenario)? + 0.5 * wan_iqr_sd(stats, scenario)?),
    }
}

pub fn wan_estimate(stats: &SummaryStats, scenario: Scenario) -> Result<Estimate> {
    Ok(Estimate { mean: wan_mean(stats, scenario)?, sd: wan_sd(stats, scenario)?, method: Method::Wan, scenario })
}

/// Validates `stats` and dispatches to a closed-form method. ABC is not
/// closed-form; see [`crate::abc`].
pub fn closed_form_estimate(method: Method, stats: &SummaryStats, scenario: Scenario) -> Result<Estimate> {
    if !method.supports(scenario) {
        return Err(Error::UnsupportedScenario { method, scenario });
    }
    let stats = stats.validate(scenario)?;
    match method {
        Method::AdHoc => adhoc_estimate(&stats, scenario),
        Method::Hozo => hozo_estimate(&stats),
        Method::Bland => bland_estimate(&stats),
        Method::Wan => wan_estimate(&stats, scenario),
        Method::Abc => Err(Error::Config("ABC is not a closed-form method".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1e-300)
    }

    #[test]
    fn adhoc_examples() {
        let e = adhoc_estimate(&SummaryStats::s1(0.0, 5.0, 10.0, 30), Scenario::S1).unwrap();
        assert_eq!((e.mean, e.sd), (5.0, 2.5));
        let e = adhoc_estimate(&SummaryStats::s3(2.5, 5.0, 7.5, 30), Scenario::S3).unwrap();
        assert_eq!(e.mean, 5.0);
        assert!(close(e.sd, 5.0 / 1.35));
        let s2 = SummaryStats::s2(0.0, 2.5, 5.0, 7.5, 10.0, 30);
        assert!(matches!(adhoc_estimate(&s2, Scenario::S2), Err(Error::UnsupportedScenario { .. })));
    }

    #[test]
    fn hozo_branches() {
        let at = |n| hozo_estimate(&SummaryStats::s1(0.0, 5.0, 10.0, n)).unwrap();
        assert!(close(at(10).sd, (100.0f64 / 12.0).sqrt()));
        assert_eq!(at(10).mean, 5.0);
        assert_eq!((at(30).mean, at(30).sd), (5.0, 2.5));
        assert!(close(at(100).sd, 10.0 / 6.0));

        // asymmetric input separates the mean branches at n = 25 / 26
        let skewed = |n| hozo_estimate(&SummaryStats::s1(0.0, 2.0, 10.0, n)).unwrap();
        assert_eq!(skewed(25).mean, 3.5);
        assert_eq!(skewed(26).mean, 2.0);
        // variance branches at 15 / 16 and 70 / 71
        assert!(close(skewed(15).sd, ((36.0 / 4.0 + 100.0) / 12.0f64).sqrt()));
        assert_eq!(skewed(16).sd, 2.5);
        assert_eq!(skewed(70).sd, 2.5);
        assert!(close(skewed(71).sd, 10.0 / 6.0));
    }

    #[test]
    fn bland_examples() {
        let e = bland_estimate(&SummaryStats::s2(0.0, 2.5, 5.0, 7.5, 10.0, 50)).unwrap();
        assert_eq!(e.mean, 5.0);
        assert!(close(e.sd * e.sd, 7.8125));
        assert!(close(e.sd, 2.795084971874737));

        let e = bland_estimate(&SummaryStats::s2(0.0, 0.0, 0.0, 0.0, 0.0, 50)).unwrap();
        assert_eq!((e.mean, e.sd), (0.0, 0.0));

        let e = bland_estimate(&SummaryStats::s2(1.0, 4.0, 6.0, 8.0, 11.0, 9)).unwrap();
        assert!(close(e.mean, 6.0));
    }

    #[test]
    fn negative_variance_guard() {
        assert_eq!(checked_sd(-1e-3, 1.0), Err(Error::NegativeVariance { variance: -1e-3 }));
        assert_eq!(checked_sd(-1e-18, 1.0), Ok(0.0));
        assert_eq!(checked_sd(4.0, 1.0), Ok(2.0));
    }

    #[test]
    fn bland_exact_variant() {
        let c = 3.7;
        let e = bland_estimate_with(&SummaryStats::s2(c, c, c, c, c, 12), BlandVariant::Exact).unwrap();
        assert!(close(e.mean, c));
        assert!(e.sd < 1e-6);
        // converges to the approximation for large n
        let s = SummaryStats::s2(0.0, 2.5, 5.0, 7.5, 10.0, 10_000_000);
        let exact = bland_estimate_with(&s, BlandVariant::Exact).unwrap();
        let approx = bland_estimate(&s).unwrap();
        assert!((exact.mean - approx.mean).abs() < 1e-5);
        assert!((exact.sd - approx.sd).abs() < 1e-4);
    }

    #[test]
    fn wan_examples() {
        assert_eq!(wan_mean(&SummaryStats::s3(2.5, 5.0, 7.5, 9), Scenario::S3).unwrap(), 5.0);
        assert_eq!(wan_mean(&SummaryStats::s3(1.0, 2.0, 6.0, 9), Scenario::S3).unwrap(), 3.0);
        assert_eq!(wan_mean(&SummaryStats::s1(0.0, 5.0, 10.0, 30), Scenario::S1).unwrap(), 5.0);

        // mpmath: 10 / (2 Φ⁻¹(99.625/100.25)), 5 / (2 Φ⁻¹(74.875/100.25))
        let s1 = wan_sd(&SummaryStats::s1(0.0, 5.0, 10.0, 100), Scenario::S1).unwrap();
        assert!(close(s1, 2.00112818727467));
        let s3 = wan_sd(&SummaryStats::s3(2.5, 5.0, 7.5, 100), Scenario::S3).unwrap();
        assert!(close(s3, 3.761024651310098));
        let s2 = wan_sd(&SummaryStats::s2(0.0, 2.5, 5.0, 7.5, 10.0, 100), Scenario::S2).unwrap();
        assert!(close(s2, 2.881076419292384));
    }

    #[test]
    fn wan_iqr_limit() {
        let s = wan_sd(&SummaryStats::s3(-1.0, 0.0, 1.0, 100_000_000), Scenario::S3).unwrap();
        assert!((s - 2.0 / (2.0 * 0.6744897501960817)).abs() < 1e-6);
        assert!((s - 2.0 / 1.349).abs() < 1e-4);
    }

    #[test]
    fn wan_small_n_guard() {
        let e = wan_sd(&SummaryStats::s1(0.0, 1.0, 2.0, 1), Scenario::S1);
        assert_eq!(e, Err(Error::DegenerateRange { n: 1 }));
        assert!(wan_sd(&SummaryStats::s1(0.0, 1.0, 2.0, 2), Scenario::S1).is_ok());
    }

    #[test]
    fn dispatch_rejects_unsupported_pairs() {
        let s1 = SummaryStats::s1(0.0, 5.0, 10.0, 30);
        assert!(matches!(
            closed_form_estimate(Method::Bland, &s1, Scenario::S1),
            Err(Error::UnsupportedScenario { .. })
        ));
        assert!(matches!(
            closed_form_estimate(Method::Hozo, &s1, Scenario::S3),
            Err(Error::UnsupportedScenario { .. })
        ));
        assert!(matches!(closed_form_estimate(Method::Wan, &s1, Scenario::S3), Err(Error::MissingField { .. })));
        assert_eq!(closed_form_estimate(Method::Hozo, &s1, Scenario::S1).unwrap().sd, 2.5);
    }
}
