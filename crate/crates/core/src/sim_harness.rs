//! Average-relative-error studies: draw a sample, reduce it to a summary,
//! estimate the mean and SD with each method from the summary alone, and
//! compare against the sample's own mean and SD.
//!
//! Replicate `r` at sample size `n` uses the stream
//! `RngStream::new(master_seed).child(n).child(r)`, so every cell can be
//! recomputed on its own and the grid can run in any order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abc::{abc_run, default_priors, AbcConfig, PriorConfig};
use crate::closed_form::{closed_form_estimate, Estimate, Method};
use crate::distributions::{sample, DistributionSpec, Family, Moments};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::summary_stats::{mean_sd, summarize_sample, Scenario, SummaryStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    pub scenario: Scenario,
    pub methods: Vec<Method>,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    #[serde(default = "AbcConfig::simulation_study")]
    pub abc: AbcConfig,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.distribution.validate()?;
        if self.n_grid.is_empty() {
            return Err(Error::Config("n_grid must not be empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_grid must be strictly increasing".into()));
        }
        if self.n_grid[0] < 2 {
            return Err(Error::Config("every n in n_grid must be at least 2".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods must not be empty".into()));
        }
        if let Some(m) = self.methods.iter().find(|m| !m.supports(self.scenario)) {
            return Err(Error::Config(format!("method {m} does not support scenario {}", self.scenario)));
        }
        if self.methods.contains(&Method::Abc) {
            self.abc.validate()?;
        }
        Ok(())
    }
}

/// What a method produced for one study summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutput {
    pub estimate: Estimate,
    /// Accepted draws, for ABC.
    pub n_accepted: Option<usize>,
}

/// Estimates with any method. ABC fits `prior.family` under `prior`, or
/// `family` under its default priors when no prior is given.
pub fn estimate_with(
    method: Method,
    stats: &SummaryStats,
    scenario: Scenario,
    family: Family,
    prior: Option<&PriorConfig>,
    abc: &AbcConfig,
    stream: RngStream,
) -> Result<MethodOutput> {
    if method != Method::Abc {
        let estimate = closed_form_estimate(method, stats, scenario)?;
        return Ok(MethodOutput { estimate, n_accepted: None });
    }
    let prior = match prior {
        Some(p) => *p,
        None => default_priors(family, &stats.validate(scenario)?, scenario)?,
    };
    let r = abc_run(stats, scenario, prior.family, &prior, abc, stream)?;
    Ok(MethodOutput { estimate: r.estimate, n_accepted: Some(r.n_accepted) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeError {
    pub mean: f64,
    pub sd: f64,
}

impl RelativeError {
    /// `(estimate - truth) / truth` for both moments.
    pub fn of(estimate: &Estimate, truth: &Moments) -> Result<Self> {
        if truth.sd == 0.0 {
            return Err(Error::ZeroTruth);
        }
        Ok(RelativeError { mean: (estimate.mean - truth.mean) / truth.mean, sd: (estimate.sd - truth.sd) / truth.sd })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    /// The sample's own mean and SD.
    pub truth: Moments,
    /// All the estimators get to see.
    pub stats: SummaryStats,
    pub outcomes: Vec<(Method, Result<RelativeError>)>,
}

// Each method's stream depends on the method, not its position in the list.
fn method_stream(trial: RngStream, method: Method) -> RngStream {
    trial.child(1).child(method as u64)
}

/// One replicate: a fresh sample of size `n` from `spec`, summarized under
/// `scenario`, estimated by every method. Method failures become `Err`
/// outcomes; only sampling problems abort the trial.
pub fn run_trial(
    spec: &DistributionSpec,
    n: usize,
    scenario: Scenario,
    methods: &[Method],
    abc: &AbcConfig,
    stream: RngStream,
) -> Result<Trial> {
    let data = sample(spec, n, &mut stream.child(0).rng())?;
    let (mean, sd) = mean_sd(&data);
    let truth = Moments { mean, sd };
    let stats = summarize_sample(&data, scenario, abc.quantile_rule)?;
    drop(data);
    let outcomes = methods
        .iter()
        .map(|&m| {
            let re = if truth.sd == 0.0 {
                Err(Error::ZeroTruth)
            } else {
                estimate_with(m, &stats, scenario, spec.family, None, abc, method_stream(stream, m))
                    .and_then(|out| RelativeError::of(&out.estimate, &truth))
            };
            (m, re)
        })
        .collect();
    Ok(Trial { truth, stats, outcomes })
}

/// Every replicate's relative errors for one (method, n) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub method: Method,
    pub n: usize,
    /// Successful replicates, in replicate order.
    pub errors: Vec<RelativeError>,
    pub failures: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreRecord {
    pub method: Method,
    pub n: usize,
    pub are_mean: f64,
    pub are_sd: f64,
    pub se_mean: f64,
    pub se_sd: f64,
    pub replicates: usize,
    pub failures: usize,
}

impl CellResult {
    pub fn summarize(&self) -> AreRecord {
        let (are_mean, se_mean) = mean_se(self.errors.iter().map(|e| e.mean));
        let (are_sd, se_sd) = mean_se(self.errors.iter().map(|e| e.sd));
        AreRecord {
            method: self.method,
            n: self.n,
            are_mean,
            are_sd,
            se_mean,
            se_sd,
            replicates: self.errors.len() + self.failures,
            failures: self.failures,
        }
    }
}

fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let xs: Vec<f64> = xs.collect();
    match xs.len() {
        0 => (f64::NAN, f64::NAN),
        1 => (xs[0], 0.0),
        k => {
            let (m, s) = mean_sd(&xs);
            (m, s / (k as f64).sqrt())
        }
    }
}

/// Runs all replicates for the given sample sizes, in parallel, and
/// returns one `CellResult` per (method, n), methods outermost.
pub fn run_cells(config: &ExperimentConfig, ns: &[usize]) -> Result<Vec<CellResult>> {
    config.validate()?;
    let root = RngStream::new(config.master_seed);
    let jobs: Vec<(usize, usize)> = ns.iter().flat_map(|&n| (0..config.replicates).map(move |r| (n, r))).collect();
    let trials: Vec<Trial> = jobs
        .par_iter()
        .map(|&(n, r)| {
            let stream = root.child(n as u64).child(r as u64);
            run_trial(&config.distribution, n, config.scenario, &config.methods, &config.abc, stream)
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::with_capacity(config.methods.len() * ns.len());
    for (mi, &method) in config.methods.iter().enumerate() {
        for (ni, &n) in ns.iter().enumerate() {
            let block = &trials[ni * config.replicates..(ni + 1) * config.replicates];
            let mut cell = CellResult { method, n, errors: Vec::with_capacity(block.len()), failures: 0 };
            for t in block {
                match &t.outcomes[mi].1 {
                    Ok(e) => cell.errors.push(*e),
                    Err(_) => cell.failures += 1,
                }
            }
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// Runs the whole n-grid and reduces each cell to an [`AreRecord`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<AreRecord>> {
    Ok(run_cells(config, &config.n_grid)?.iter().map(CellResult::summarize).collect())
}

/// The ten sample sizes used by the bundled simulation configs.
pub const STANDARD_N_GRID: [usize; 10] = [10, 40, 80, 100, 150, 200, 300, 400, 500, 600];
