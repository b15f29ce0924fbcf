//! Reported summary statistics, the three reporting scenarios, and
//! summarization of raw samples.
//!
//! Observed studies and ABC pseudo-data go through the same code path
//! ([`summarize_in_place`]) so that simulated and reported statistics are
//! always computed under the same quantile convention.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which statistics a study reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Minimum, median, maximum.
    S1,
    /// Minimum, both quartiles, median, maximum.
    S2,
    /// Both quartiles and the median.
    S3,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::S1, Scenario::S2, Scenario::S3];

    /// Field names in canonical vector order.
    pub fn fields(self) -> &'static [&'static str] {
        match self {
            Scenario::S1 => &["min", "median", "max"],
            Scenario::S2 => &["min", "q1", "median", "q3", "max"],
            Scenario::S3 => &["q1", "median", "q3"],
        }
    }

    /// Length of the summary vector compared by ABC.
    pub fn vector_len(self) -> usize {
        self.fields().len()
    }

    /// Picks the richest scenario the present fields support: S2 if all
    /// five statistics are there, then S1, then S3.
    pub fn detect(stats: &SummaryStats) -> Option<Scenario> {
        [Scenario::S2, Scenario::S1, Scenario::S3]
            .into_iter()
            .find(|s| s.fields().iter().all(|f| stats.field(f).is_some()))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Scenario::S1 => "S1",
            Scenario::S2 => "S2",
            Scenario::S3 => "S3",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(Scenario::S1),
            "s2" => Ok(Scenario::S2),
            "s3" => Ok(Scenario::S3),
            other => Err(Error::Config(format!("unknown scenario `{other}`"))),
        }
    }
}

/// Sample quantile convention, in Hyndman and Fan's numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantileRule {
    /// Linear interpolation at 0-based position `(n - 1) p`. The default in
    /// R, NumPy and most spreadsheets.
    #[default]
    Type7,
    /// Linear interpolation at 1-based position `(n + 1) p`, clamped to the
    /// sample extremes (SPSS, Minitab).
    Type6,
}

/// Descriptive statistics reported by one study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub min: Option<f64>,
    pub q1: Option<f64>,
    pub median: f64,
    pub q3: Option<f64>,
    pub max: Option<f64>,
    pub n: usize,
}

impl SummaryStats {
    pub fn s1(min: f64, median: f64, max: f64, n: usize) -> Self {
        SummaryStats { min: Some(min), q1: None, median, q3: None, max: Some(max), n }
    }

    pub fn s2(min: f64, q1: f64, median: f64, q3: f64, max: f64, n: usize) -> Self {
        SummaryStats { min: Some(min), q1: Some(q1), median, q3: Some(q3), max: Some(max), n }
    }

    pub fn s3(q1: f64, median: f64, q3: f64, n: usize) -> Self {
        SummaryStats { min: None, q1: Some(q1), median, q3: Some(q3), max: None, n }
    }

    pub fn field(&self, name: &str) -> Option<f64> {
        match name {
            "min" => self.min,
            "q1" => self.q1,
            "median" => Some(self.median),
            "q3" => self.q3,
            "max" => self.max,
            _ => None,
        }
    }

    /// Looks up a field the scenario needs.
    pub fn require(&self, field: &'static str, scenario: Scenario) -> Result<f64> {
        self.field(field).ok_or(Error::MissingField { field, scenario })
    }

    /// Checks sample size, presence of the scenario's fields, finiteness and
    /// ordering of every present field. Extra fields beyond the scenario are
    /// allowed but must still be ordered.
    pub fn validate(self, scenario: Scenario) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::SampleSizeTooSmall { n: self.n });
        }
        for &f in scenario.fields() {
            self.require(f, scenario)?;
        }
        let present: Vec<(&'static str, f64)> =
            ["min", "q1", "median", "q3", "max"].into_iter().filter_map(|f| self.field(f).map(|v| (f, v))).collect();
        if let Some(&(field, _)) = present.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { field });
        }
        for pair in present.windows(2) {
            let ((lower, lower_value), (upper, upper_value)) = (pair[0], pair[1]);
            if lower_value > upper_value {
                return Err(Error::OrderingViolation { lower, lower_value, upper, upper_value });
            }
        }
        Ok(self)
    }

    /// Canonical statistics vector for the scenario. `n` never enters it.
    pub fn to_vector(&self, scenario: Scenario) -> Result<SummaryVector> {
        let mut v = SummaryVector::empty();
        for &f in scenario.fields() {
            v.push(self.require(f, scenario)?);
        }
        Ok(v)
    }

    /// Keeps only the fields the scenario uses.
    pub fn restrict(&self, scenario: Scenario) -> Result<Self> {
        let keep = |f: &'static str| -> Result<Option<f64>> {
            if scenario.fields().contains(&f) {
                self.require(f, scenario).map(Some)
            } else {
                Ok(None)
            }
        };
        Ok(SummaryStats {
            min: keep("min")?,
            q1: keep("q1")?,
            median: self.median,
            q3: keep("q3")?,
            max: keep("max")?,
            n: self.n,
        })
    }

    /// Applies `x -> a x + b` to every present statistic.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        let t = |x: f64| a * x + b;
        SummaryStats {
            min: self.min.map(t),
            q1: self.q1.map(t),
            median: t(self.median),
            q3: self.q3.map(t),
            max: self.max.map(t),
            n: self.n,
        }
    }
}

/// A scenario's statistics in canonical order: S1 `[min, median, max]`,
/// S2 `[min, q1, median, q3, max]`, S3 `[q1, median, q3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryVector {
    values: [f64; 5],
    len: usize,
}

impl SummaryVector {
    fn empty() -> Self {
        SummaryVector { values: [0.0; 5], len: 0 }
    }

    fn push(&mut self, v: f64) {
        self.values[self.len] = v;
        self.len += 1;
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        if values.len() > 5 {
            return Err(Error::LengthMismatch { left: values.len(), right: 5 });
        }
        let mut v = SummaryVector::empty();
        values.iter().for_each(|&x| v.push(x));
        Ok(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.len]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Computes the scenario's summary of `sample`. `min`/`max` are the sample
/// extremes; quartiles and median follow `rule`.
pub fn summarize_sample(sample: &[f64], scenario: Scenario, rule: QuantileRule) -> Result<SummaryStats> {
    match sample.len() {
        0 => return Err(Error::EmptySample),
        1 => return Err(Error::SampleSizeTooSmall { n: 1 }),
        _ => {}
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue { field: "sample" });
    }
    let mut buf = sample.to_vec();
    let v = summarize_in_place(&mut buf, scenario, rule);
    let s = v.as_slice();
    Ok(match scenario {
        Scenario::S1 => SummaryStats::s1(s[0], s[1], s[2], sample.len()),
        Scenario::S2 => SummaryStats::s2(s[0], s[1], s[2], s[3], s[4], sample.len()),
        Scenario::S3 => SummaryStats::s3(s[0], s[1], s[2], sample.len()),
    })
}

/// Summary vector of `buf`, reordering it in the process. Runs in linear
/// time; `buf` must hold at least one value.
pub fn summarize_in_place(buf: &mut [f64], scenario: Scenario, rule: QuantileRule) -> SummaryVector {
    let mut v = SummaryVector::empty();
    let extremes =
        |buf: &[f64]| buf.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    match scenario {
        Scenario::S1 => {
            let (lo, hi) = extremes(buf);
            v.push(lo);
            v.push(quantile_in_place(buf, 0.5, rule));
            v.push(hi);
        }
        Scenario::S2 => {
            let (lo, hi) = extremes(buf);
            v.push(lo);
            v.push(quantile_in_place(buf, 0.25, rule));
            v.push(quantile_in_place(buf, 0.5, rule));
            v.push(quantile_in_place(buf, 0.75, rule));
            v.push(hi);
        }
        Scenario::S3 => {
            v.push(quantile_in_place(buf, 0.25, rule));
            v.push(quantile_in_place(buf, 0.5, rule));
            v.push(quantile_in_place(buf, 0.75, rule));
        }
    }
    v
}

/// The `p`-quantile of `buf` under `rule`, using selection rather than a
/// full sort. Reorders `buf`.
pub fn quantile_in_place(buf: &mut [f64], p: f64, rule: QuantileRule) -> f64 {
    let n = buf.len();
    debug_assert!(n > 0);
    let h = match rule {
        QuantileRule::Type7 => (n - 1) as f64 * p,
        QuantileRule::Type6 => ((n + 1) as f64 * p - 1.0).clamp(0.0, (n - 1) as f64),
    };
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    let (_, x_lo, upper) = buf.select_nth_unstable_by(lo, f64::total_cmp);
    let x_lo = *x_lo;
    if frac == 0.0 || upper.is_empty() {
        return x_lo;
    }
    let x_hi = upper.iter().copied().fold(f64::INFINITY, f64::min);
    x_lo + frac * (x_hi - x_lo)
}

/// Sample mean and standard deviation (`n - 1` denominator).
pub fn mean_sd(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let ss = sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    let sd = if sample.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
    (mean, sd)
}
