//! ABC rejection sampling for the mean and SD behind a set of reported
//! statistics, and distribution selection by acceptance frequency.
//!
//! One iteration draws parameters from uniform priors, simulates a
//! pseudo-sample of the study's size, summarizes it exactly like the
//! observed study, and records the Euclidean distance between the two
//! summary vectors. The draws with the smallest distances (or those under a
//! fixed epsilon) form the approximate posterior.
//!
//! Iteration `i` always uses the random stream `stream.child(i)`, so the
//! outcome does not depend on how rayon schedules the work.

use rand::distr::{Distribution, Open01};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{Estimate, Method};
use crate::distributions::{moments, DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::summary_stats::{mean_sd, summarize_in_place, QuantileRule, Scenario, SummaryStats, SummaryVector};

/// An open interval `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        Bounds { lower, upper }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = Open01.sample(rng);
        self.lower + self.width() * u
    }

    fn check(&self, what: &str) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(Error::Config(format!(
                "{what} bounds must satisfy lower < upper, got ({}, {})",
                self.lower, self.upper
            )));
        }
        Ok(())
    }
}

/// Independent uniform priors on each parameter of one family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorConfig {
    pub family: Family,
    pub p1: Bounds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p2: Option<Bounds>,
    /// Beta only: the data's natural range. Observed statistics are mapped
    /// affinely onto [0, 1] before fitting and moments are mapped back.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Bounds>,
}

impl PriorConfig {
    pub fn new(family: Family, p1: Bounds, p2: Option<Bounds>) -> Self {
        PriorConfig { family, p1, p2, support: None }
    }

    pub fn with_support(mut self, lower: f64, upper: f64) -> Self {
        self.support = Some(Bounds::new(lower, upper));
        self
    }

    pub fn validate(&self) -> Result<()> {
        let want = self.family.n_params();
        let have = 1 + self.p2.is_some() as usize;
        if want != have {
            return Err(Error::Config(format!("{} prior needs {want} parameter bounds, got {have}", self.family)));
        }
        self.p1.check("first parameter")?;
        if let Some(p2) = self.p2 {
            p2.check("second parameter")?;
        }
        // location parameters are the first ones of Normal and LogNormal
        let location_first = matches!(self.family, Family::Normal | Family::LogNormal);
        if !location_first && self.p1.lower < 0.0 {
            return Err(Error::Config(format!("{} first parameter must have a nonnegative lower bound", self.family)));
        }
        if self.p2.is_some_and(|b| b.lower < 0.0) {
            return Err(Error::Config(format!("{} second parameter must have a nonnegative lower bound", self.family)));
        }
        if let Some(s) = self.support {
            if self.family != Family::Beta {
                return Err(Error::Config("support bounds apply to the beta family only".into()));
            }
            s.check("support")?;
        }
        Ok(())
    }

    /// Draws a parameter vector.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> DistributionSpec {
        let p1 = self.p1.draw(rng);
        let p2 = self.p2.map(|b| b.draw(rng));
        DistributionSpec { family: self.family, p1, p2 }
    }

    pub fn midpoint(&self) -> Vec<f64> {
        std::iter::once(self.p1.midpoint()).chain(self.p2.map(|b| b.midpoint())).collect()
    }
}

/// The default uniform priors for a family given the reported statistics.
///
/// Normal: μ over (min, max) in S1, (q1, q3) otherwise; σ over (0, 50).
/// LogNormal: the same bounds on the log scale; σ over (0, 10).
/// Exponential mean and both Beta shapes over (0, 40); Weibull shape and
/// scale over (0, 50).
pub fn default_priors(family: Family, stats: &SummaryStats, scenario: Scenario) -> Result<PriorConfig> {
    let (lo_field, hi_field) = match scenario {
        Scenario::S1 => ("min", "max"),
        Scenario::S2 | Scenario::S3 => ("q1", "q3"),
    };
    let lo = stats.require(lo_field, scenario)?;
    let hi = stats.require(hi_field, scenario)?;
    let prior = match family {
        Family::Normal => PriorConfig::new(family, Bounds::new(lo, hi), Some(Bounds::new(0.0, 50.0))),
        Family::LogNormal => {
            for (field, value) in [(lo_field, lo), (hi_field, hi)] {
                if value <= 0.0 {
                    return Err(Error::NonPositiveSupport { field, value });
                }
            }
            PriorConfig::new(family, Bounds::new(lo.ln(), hi.ln()), Some(Bounds::new(0.0, 10.0)))
        }
        Family::Exponential => PriorConfig::new(family, Bounds::new(0.0, 40.0), None),
        Family::Beta => PriorConfig::new(family, Bounds::new(0.0, 40.0), Some(Bounds::new(0.0, 40.0))),
        Family::Weibull => PriorConfig::new(family, Bounds::new(0.0, 50.0), Some(Bounds::new(0.0, 50.0))),
    };
    Ok(prior)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Acceptance {
    /// Keep this percentage of all draws, those with the smallest distances.
    Percentile(f64),
    /// Keep draws whose distance is strictly below epsilon.
    Epsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Average the accepted (μ, σ) directly. Normal family only.
    Direct,
    /// Moments of the family at the average accepted parameters.
    #[serde(alias = "plug-in")]
    PlugIn,
    /// Average sample moments of one pseudo-sample per accepted draw.
    Simulation,
}

impl Estimator {
    pub fn default_for(family: Family) -> Self {
        if family == Family::Normal {
            Estimator::Direct
        } else {
            Estimator::PlugIn
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(Estimator::Direct),
            "plugin" | "plug-in" => Ok(Estimator::PlugIn),
            "simulation" => Ok(Estimator::Simulation),
            other => Err(Error::Config(format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbcConfig {
    pub n_iter: usize,
    pub acceptance: Acceptance,
    /// `None` picks [`Estimator::default_for`] the family being fitted.
    #[serde(default)]
    pub estimator: Option<Estimator>,
    #[serde(default)]
    pub quantile_rule: QuantileRule,
    /// Divide distances by the range of the observed summary vector.
    #[serde(default)]
    pub scale_distance: bool,
}

impl Default for AbcConfig {
    /// 50,000 iterations keeping the closest 0.1%.
    fn default() -> Self {
        AbcConfig {
            n_iter: 50_000,
            acceptance: Acceptance::Percentile(0.1),
            estimator: None,
            quantile_rule: QuantileRule::Type7,
            scale_distance: false,
        }
    }
}

impl AbcConfig {
    /// The setting of the published simulation study: 20,000 iterations,
    /// 0.1% accepted (20 draws).
    pub fn simulation_study() -> Self {
        AbcConfig { n_iter: 20_000, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_iter == 0 {
            return Err(Error::Config("n_iter must be positive".into()));
        }
        match self.acceptance {
            Acceptance::Percentile(p) => {
                if !(p > 0.0 && p <= 100.0) {
                    return Err(Error::Config(format!("acceptance percentile must be in (0, 100], got {p}")));
                }
                if self.n_accept() == 0 {
                    return Err(Error::Config(format!("{p}% of {} iterations accepts no draws", self.n_iter)));
                }
            }
            Acceptance::Epsilon(e) => {
                if e.is_nan() || e <= 0.0 {
                    return Err(Error::Config(format!("epsilon must be positive, got {e}")));
                }
            }
        }
        Ok(())
    }

    /// Number of draws kept in percentile mode.
    pub fn n_accept(&self) -> usize {
        match self.acceptance {
            Acceptance::Percentile(p) => ((self.n_iter as f64 * p / 100.0) + 1e-9).floor() as usize,
            Acceptance::Epsilon(_) => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptedDraw {
    pub spec: DistributionSpec,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbcResult {
    /// Accepted draws ordered by distance, ties in iteration order.
    pub accepted: Vec<AcceptedDraw>,
    pub estimate: Estimate,
    pub n_accepted: usize,
    pub acceptance_threshold_used: f64,
    pub estimator: Estimator,
}

impl AbcResult {
    /// Average of each parameter over the accepted draws.
    pub fn mean_params(&self) -> Vec<f64> {
        mean_params(&self.accepted)
    }
}

fn mean_params(accepted: &[AcceptedDraw]) -> Vec<f64> {
    let k = accepted.len() as f64;
    let mut sums = vec![0.0; accepted.first().map_or(0, |d| d.spec.family.n_params())];
    for d in accepted {
        sums.iter_mut().zip(d.spec.params()).for_each(|(s, p)| *s += p);
    }
    sums.into_iter().map(|s| s / k).collect()
}

/// Euclidean distance between two summary vectors.
pub fn distance(a: &SummaryVector, b: &SummaryVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(euclidean(a.as_slice(), b.as_slice()))
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Indices of accepted draws, ordered by distance with ties in index order,
/// and the threshold that was applied. Non-finite distances rank last.
pub fn select_accepted(distances: &[f64], acceptance: Acceptance) -> Result<(Vec<usize>, f64)> {
    let key = |d: f64| if d.is_nan() { f64::INFINITY } else { d };
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&i, &j| key(distances[i]).total_cmp(&key(distances[j])).then(i.cmp(&j)));
    match acceptance {
        Acceptance::Percentile(p) => {
            let k = ((distances.len() as f64 * p / 100.0) + 1e-9).floor() as usize;
            if k == 0 {
                return Err(Error::Config(format!("{p}% of {} draws accepts nothing", distances.len())));
            }
            order.truncate(k);
            let threshold = key(distances[order[k - 1]]);
            Ok((order, threshold))
        }
        Acceptance::Epsilon(eps) => {
            order.retain(|&i| distances[i] < eps);
            if order.is_empty() {
                return Err(Error::NoAcceptedDraws { epsilon: eps });
            }
            Ok((order, eps))
        }
    }
}

/// How observed statistics map into the model's coordinates.
#[derive(Debug, Clone, Copy)]
struct Frame {
    offset: f64,
    width: f64,
}

impl Frame {
    const IDENTITY: Frame = Frame { offset: 0.0, width: 1.0 };

    fn for_prior(prior: &PriorConfig, observed: &SummaryVector) -> Result<Self> {
        let frame = match prior.support {
            Some(b) => Frame { offset: b.lower, width: b.width() },
            None => Frame::IDENTITY,
        };
        let model = observed.as_slice().iter().map(|&x| (x - frame.offset) / frame.width);
        match prior.family {
            Family::Beta => {
                if let Some(x) = model.clone().find(|x| !(0.0..=1.0).contains(x)) {
                    return Err(Error::IncompatibleSupport(format!(
                        "beta needs statistics in [0, 1] (or explicit support bounds); found {}",
                        frame.offset + x * frame.width
                    )));
                }
            }
            f if f.is_positive() => {
                if let Some(x) = model.clone().find(|&x| x < 0.0) {
                    return Err(Error::IncompatibleSupport(format!("{f} needs nonnegative statistics; found {x}")));
                }
            }
            _ => {}
        }
        Ok(frame)
    }

    fn to_data(self, x: f64) -> f64 {
        self.offset + self.width * x
    }
}

/// Per-iteration simulation state shared by `abc_run` and
/// `select_distribution`.
struct Simulator<'a> {
    observed: SummaryVector,
    scenario: Scenario,
    n: usize,
    rule: QuantileRule,
    scale: f64,
    frames: &'a [Frame],
}

impl Simulator<'_> {
    /// Simulates a pseudo-sample under `spec` and returns its distance to
    /// the observed summary in data units.
    fn distance<R: Rng>(&self, spec: &DistributionSpec, frame: usize, rng: &mut R, buf: &mut [f64]) -> f64 {
        let Ok(sampler) = spec.sampler() else {
            return f64::INFINITY;
        };
        sampler.fill(rng, buf);
        let pseudo = summarize_in_place(buf, self.scenario, self.rule);
        let f = self.frames[frame];
        let d = self
            .observed
            .as_slice()
            .iter()
            .zip(pseudo.as_slice())
            .map(|(o, p)| {
                let diff = o - f.to_data(*p);
                diff * diff
            })
            .sum::<f64>()
            .sqrt()
            / self.scale;
        if d.is_finite() {
            d
        } else {
            f64::INFINITY
        }
    }
}

fn distance_scale(observed: &SummaryVector, scaled: bool) -> f64 {
    if !scaled {
        return 1.0;
    }
    let v = observed.as_slice();
    let range = v.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v.iter().copied().fold(f64::INFINITY, f64::min);
    if range > 0.0 {
        range
    } else {
        1.0
    }
}

/// Runs the rejection sampler and turns the accepted draws into a mean/SD
/// estimate.
pub fn abc_run(
    stats: &SummaryStats,
    scenario: Scenario,
    family: Family,
    prior: &PriorConfig,
    config: &AbcConfig,
    stream: RngStream,
) -> Result<AbcResult> {
    config.validate()?;
    let stats = stats.validate(scenario)?;
    prior.validate()?;
    if prior.family != family {
        return Err(Error::Config(format!("prior is for {} but the model is {family}", prior.family)));
    }
    let estimator = config.estimator.unwrap_or_else(|| Estimator::default_for(family));
    if estimator == Estimator::Direct && family != Family::Normal {
        return Err(Error::Config(format!("the direct estimator applies to the normal family only, not {family}")));
    }

    let observed = stats.to_vector(scenario)?;
    let frames = [Frame::for_prior(prior, &observed)?];
    let sim = Simulator {
        observed,
        scenario,
        n: stats.n,
        rule: config.quantile_rule,
        scale: distance_scale(&observed, config.scale_distance),
        frames: &frames,
    };

    let draws_stream = stream.child(0);
    let draws: Vec<(DistributionSpec, f64)> = (0..config.n_iter as u64)
        .into_par_iter()
        .map_init(
            || vec![0.0; sim.n],
            |buf, i| {
                let mut rng = draws_stream.child(i).rng();
                let spec = prior.draw(&mut rng);
                let d = sim.distance(&spec, 0, &mut rng, buf);
                (spec, d)
            },
        )
        .collect();

    let distances: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let (idx, threshold) = select_accepted(&distances, config.acceptance)?;
    let accepted: Vec<AcceptedDraw> =
        idx.iter().map(|&i| AcceptedDraw { spec: draws[i].0, distance: draws[i].1 }).collect();

    let (mean, sd) = estimate_from(&accepted, estimator, stats.n, stream.child(1))?;
    let frame = frames[0];
    Ok(AbcResult {
        n_accepted: accepted.len(),
        accepted,
        estimate: Estimate { mean: frame.to_data(mean), sd: frame.width * sd, method: Method::Abc, scenario },
        acceptance_threshold_used: threshold,
        estimator,
    })
}

fn estimate_from(accepted: &[AcceptedDraw], estimator: Estimator, n: usize, stream: RngStream) -> Result<(f64, f64)> {
    let family = accepted[0].spec.family;
    match estimator {
        Estimator::Direct => {
            let p = mean_params(accepted);
            Ok((p[0], p[1]))
        }
        Estimator::PlugIn => {
            let spec = DistributionSpec::from_params(family, &mean_params(accepted))?;
            let m = moments(&spec)?;
            Ok((m.mean, m.sd))
        }
        Estimator::Simulation => {
            let per_draw: Vec<(f64, f64)> = accepted
                .par_iter()
                .enumerate()
                .map(|(j, d)| {
                    let mut buf = vec![0.0; n];
                    d.spec.sampler()?.fill(&mut stream.child(j as u64).rng(), &mut buf);
                    Ok(mean_sd(&buf))
                })
                .collect::<Result<_>>()?;
            let k = per_draw.len() as f64;
            let (sm, ss) = per_draw.iter().fold((0.0, 0.0), |(a, b), (m, s)| (a + m, b + s));
            Ok((sm / k, ss / k))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateProbability {
    pub family: Family,
    pub probability: f64,
    pub n_accepted: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSelectionResult {
    /// One entry per candidate, in the order given.
    pub posterior_probs: Vec<CandidateProbability>,
    /// `bayes_factors[i][j] = P(i | S) / P(j | S)`; `None` when either is zero.
    pub bayes_factors: Vec<Vec<Option<f64>>>,
    /// Index of the most probable candidate (first on ties).
    pub chosen: usize,
    pub acceptance_threshold_used: f64,
}

impl ModelSelectionResult {
    pub fn chosen_family(&self) -> Family {
        self.posterior_probs[self.chosen].family
    }

    /// Builds the result from per-candidate acceptance counts.
    pub fn from_counts(families: &[Family], counts: &[usize], threshold: f64) -> Self {
        let total: usize = counts.iter().sum();
        let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Self::from_probs(families, &probs, counts, threshold)
    }

    /// Equal probability for every candidate; reported when the accepted
    /// set carries no information.
    pub fn uniform(families: &[Family]) -> Self {
        let probs = vec![1.0 / families.len() as f64; families.len()];
        Self::from_probs(families, &probs, &vec![0; families.len()], f64::NAN)
    }

    fn from_probs(families: &[Family], probs: &[f64], counts: &[usize], threshold: f64) -> Self {
        let bayes_factors =
            probs.iter().map(|&pi| probs.iter().map(|&pj| (pi > 0.0 && pj > 0.0).then(|| pi / pj)).collect()).collect();
        let chosen = probs.iter().enumerate().fold(0, |best, (i, &p)| if p > probs[best] { i } else { best });
        ModelSelectionResult {
            posterior_probs: families
                .iter()
                .zip(probs)
                .zip(counts)
                .map(|((&family, &probability), &n_accepted)| CandidateProbability { family, probability, n_accepted })
                .collect(),
            bayes_factors,
            chosen,
            acceptance_threshold_used: threshold,
        }
    }
}

/// Per-candidate acceptance counts from a joint run: `labels[i]` is the
/// candidate behind draw `i`. Fails with `DegenerateSelection` when the
/// accepted set is an arbitrary cut through one block of tied distances.
pub fn acceptance_counts(
    labels: &[usize],
    distances: &[f64],
    n_candidates: usize,
    acceptance: Acceptance,
) -> Result<(Vec<usize>, f64)> {
    let (idx, threshold) = select_accepted(distances, acceptance)?;
    let first = distances[idx[0]];
    let all_tied = idx.iter().all(|&i| distances[i] == first);
    let tie_spills = distances.iter().filter(|&&d| d == first).count() > idx.len();
    if !first.is_finite() || (all_tied && tie_spills) {
        return Err(Error::DegenerateSelection { candidates: n_candidates });
    }
    let mut counts = vec![0usize; n_candidates];
    idx.iter().for_each(|&i| counts[labels[i]] += 1);
    Ok((counts, threshold))
}

/// Joint ABC over several candidate families with equal prior model
/// probabilities. Each iteration picks a candidate uniformly, then proceeds
/// as in [`abc_run`]; posterior model probabilities are the candidates'
/// shares of the accepted draws.
pub fn select_distribution(
    stats: &SummaryStats,
    scenario: Scenario,
    candidates: &[PriorConfig],
    config: &AbcConfig,
    stream: RngStream,
) -> Result<ModelSelectionResult> {
    if candidates.len() < 2 {
        return Err(Error::Config(format!("model selection needs at least 2 candidates, got {}", candidates.len())));
    }
    config.validate()?;
    let stats = stats.validate(scenario)?;
    let observed = stats.to_vector(scenario)?;
    let frames = candidates
        .iter()
        .map(|p| {
            p.validate()?;
            Frame::for_prior(p, &observed)
        })
        .collect::<Result<Vec<_>>>()?;
    let sim = Simulator {
        observed,
        scenario,
        n: stats.n,
        rule: config.quantile_rule,
        scale: distance_scale(&observed, config.scale_distance),
        frames: &frames,
    };

    let draws: Vec<(usize, f64)> = (0..config.n_iter as u64)
        .into_par_iter()
        .map_init(
            || vec![0.0; sim.n],
            |buf, i| {
                let mut rng = stream.child(i).rng();
                let m = rng.random_range(0..candidates.len());
                let spec = candidates[m].draw(&mut rng);
                (m, sim.distance(&spec, m, &mut rng, buf))
            },
        )
        .collect();
    let (labels, distances): (Vec<usize>, Vec<f64>) = draws.into_iter().unzip();
    let (counts, threshold) = acceptance_counts(&labels, &distances, candidates.len(), config.acceptance)?;
    let families: Vec<Family> = candidates.iter().map(|c| c.family).collect();
    Ok(ModelSelectionResult::from_counts(&families, &counts, threshold))
}
