//! The `abcest` command line: `estimate`, `select` and `simulate`.
//!
//! Study tables are CSV with the header
//! `study_id,n,min,q1,median,q3,max,family_hint,lower,upper` (empty cells for
//! missing values) or a JSON array of objects with the same keys. Every
//! output file gets a `<output>.manifest.json` sidecar recording the tool
//! version, seed, a digest of the effective configuration and a timestamp.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 input parse
//! failure, 4 configuration failure, 5 some output rows failed, 6 every
//! output row failed.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::abc::{
    default_priors, select_distribution, AbcConfig, Acceptance, Estimator, ModelSelectionResult, PriorConfig,
};
use crate::closed_form::Method;
use crate::distributions::Family;
use crate::error::Error;
use crate::rng::RngStream;
use crate::sim_harness::{estimate_with, run_experiment, ExperimentConfig};
use crate::summary_stats::{Scenario, SummaryStats};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;
pub const EXIT_PARTIAL: i32 = 5;
pub const EXIT_ALL_FAILED: i32 = 6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
        }
    }

    fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }
}

#[derive(Debug, Parser)]
#[command(name = "abcest", version, about = "Estimate sample mean and SD from reported summary statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate mean and SD for every study in a table.
    Estimate(EstimateArgs),
    /// Choose a distribution for every study by ABC model selection.
    Select(SelectArgs),
    /// Run an average-relative-error simulation study from a JSON config.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AbcArgs {
    /// ABC iterations.
    #[arg(long, default_value_t = 50_000)]
    pub iterations: usize,
    /// Percentage of draws to accept (closest first).
    #[arg(long = "accept-pct", conflicts_with = "epsilon")]
    pub accept_pct: Option<f64>,
    /// Accept draws closer than this instead of a percentage.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// direct, plugin or simulation; defaults to direct for normal, plugin otherwise.
    #[arg(long)]
    pub estimator: Option<String>,
}

impl AbcArgs {
    fn config(&self) -> Result<AbcConfig, CliError> {
        let acceptance = match (self.accept_pct, self.epsilon) {
            (_, Some(e)) => Acceptance::Epsilon(e),
            (Some(p), None) => Acceptance::Percentile(p),
            (None, None) => Acceptance::Percentile(0.1),
        };
        let estimator = self
            .estimator
            .as_deref()
            .map(|s| s.parse::<Estimator>().map_err(|e| CliError::Usage(e.to_string())))
            .transpose()?;
        let cfg = AbcConfig { n_iter: self.iterations, acceptance, estimator, ..AbcConfig::default() };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    /// Study table (.csv or .json).
    pub input: PathBuf,
    /// Force a scenario (s1, s2, s3) instead of detecting it per row.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Comma-separated methods: adhoc, hozo, bland, wan, abc. Defaults to
    /// every method applicable to each row.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// ABC family for rows without a family_hint.
    #[arg(long, default_value = "normal")]
    pub family: String,
    #[command(flatten)]
    pub abc: AbcArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelectArgs {
    pub input: PathBuf,
    /// Comma-separated candidate families, at least two.
    #[arg(long, value_delimiter = ',', required = true)]
    pub candidates: Vec<String>,
    #[arg(long)]
    pub scenario: Option<String>,
    #[command(flatten)]
    pub abc: AbcArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Experiment config: one JSON object or an array of them.
    pub config: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// One study as read from an input table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyRow {
    pub study_id: String,
    pub n: usize,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub q1: Option<f64>,
    #[serde(default)]
    pub median: Option<f64>,
    #[serde(default)]
    pub q3: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default)]
    pub family_hint: Option<Family>,
    #[serde(default)]
    pub lower: Option<f64>,
    #[serde(default)]
    pub upper: Option<f64>,
}

impl StudyRow {
    pub fn stats(&self) -> Result<SummaryStats, Error> {
        let median = self.median.ok_or(Error::MissingField { field: "median", scenario: Scenario::S1 })?;
        Ok(SummaryStats { min: self.min, q1: self.q1, median, q3: self.q3, max: self.max, n: self.n })
    }

    pub fn scenario(&self, forced: Option<Scenario>) -> Result<Scenario, Error> {
        match forced {
            Some(s) => Ok(s),
            None => Scenario::detect(&self.stats()?).ok_or(Error::MissingField { field: "q1", scenario: Scenario::S3 }),
        }
    }

    fn support(&self) -> Option<(f64, f64)> {
        self.lower.zip(self.upper)
    }
}

/// Reproducibility record written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub seed: u64,
    pub config_digest: String,
    pub timestamp: String,
}

impl RunManifest {
    fn new(seed: u64, config: &[u8]) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config_digest: Sha256::digest(config).iter().map(|b| format!("{b:02x}")).collect(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

/// Reads a study table, choosing the format by extension.
pub fn read_studies(path: &Path) -> Result<Vec<StudyRow>, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let rows = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        parse_studies_json(&bytes)?
    } else {
        parse_studies_csv(&bytes)?
    };
    let mut seen = HashSet::new();
    for (i, r) in rows.iter().enumerate() {
        if !seen.insert(r.study_id.as_str()) {
            return Err(CliError::Parse(format!("row {}: duplicate study_id `{}`", i + 1, r.study_id)));
        }
    }
    Ok(rows)
}

pub fn parse_studies_csv(bytes: &[u8]) -> Result<Vec<StudyRow>, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let headers = rdr.headers().map_err(|e| CliError::Parse(e.to_string()))?.clone();
    rdr.deserialize()
        .map(|r| {
            r.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                let column = match e.kind() {
                    csv::ErrorKind::Deserialize { err, .. } => {
                        err.field().and_then(|i| headers.get(i as usize)).unwrap_or("?").to_string()
                    }
                    _ => "?".into(),
                };
                CliError::Parse(format!("line {line}, column `{column}`: {e}"))
            })
        })
        .collect()
}

pub fn parse_studies_json(bytes: &[u8]) -> Result<Vec<StudyRow>, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Parse(format!("at `{}`: {}", e.path(), e.inner())))
}

/// Parses an experiment config: a single object or an array of objects.
pub fn parse_experiments(text: &str) -> Result<Vec<ExperimentConfig>, CliError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        Many(Vec<serde_json::Value>),
        One(serde_json::Value),
    }
    let parsed: OneOrMany = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let (values, many) = match parsed {
        OneOrMany::Many(v) => (v, true),
        OneOrMany::One(v) => (vec![v], false),
    };
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let prefix = if many { format!("[{i}].") } else { String::new() };
            let cfg: ExperimentConfig = serde_path_to_error::deserialize(v)
                .map_err(|e| CliError::Config(format!("field `{prefix}{}`: {}", e.path(), e.inner())))?;
            cfg.validate().map_err(|e| CliError::Config(format!("{prefix}{e}")))?;
            Ok(cfg)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub study_id: String,
    pub method: String,
    pub scenario: Option<Scenario>,
    pub mean_est: Option<f64>,
    pub sd_est: Option<f64>,
    pub n_accepted: Option<usize>,
    pub error_code: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectRow {
    pub study_id: String,
    pub family: Family,
    pub posterior_prob: f64,
    pub n_accepted: usize,
    pub chosen: bool,
    pub error_code: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRow {
    pub method: Method,
    pub distribution: String,
    pub scenario: Scenario,
    pub n: usize,
    pub are_mean: f64,
    pub are_sd: f64,
    pub se_mean: f64,
    pub se_sd: f64,
    pub replicates: usize,
    pub failures: usize,
}

/// Rows written plus how many of them carry an error.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<R> {
    pub rows: Vec<R>,
    pub failed: usize,
    pub seed: u64,
}

impl<R> Outcome<R> {
    pub fn exit_code(&self) -> i32 {
        if self.failed == 0 {
            EXIT_OK
        } else if self.failed == self.rows.len() {
            EXIT_ALL_FAILED
        } else {
            EXIT_PARTIAL
        }
    }
}

fn parse_scenario(s: &Option<String>) -> Result<Option<Scenario>, CliError> {
    s.as_deref().map(|s| s.parse().map_err(|e: Error| CliError::Usage(e.to_string()))).transpose()
}

fn parse_list<T: std::str::FromStr<Err = Error>>(items: &[String]) -> Result<Vec<T>, CliError> {
    items.iter().map(|s| s.parse().map_err(|e: Error| CliError::Usage(e.to_string()))).collect()
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::rng().random::<u64>();
        eprintln!("abcest: no --seed given, using {s}");
        s
    })
}

fn prior_for(family: Family, row: &StudyRow, stats: &SummaryStats, scenario: Scenario) -> Result<PriorConfig, Error> {
    let prior = default_priors(family, &stats.validate(scenario)?, scenario)?;
    Ok(match (family, row.support()) {
        (Family::Beta, Some((lo, hi))) => prior.with_support(lo, hi),
        _ => prior,
    })
}

/// Runs `estimate` over already-parsed rows.
pub fn estimate_rows(rows: &[StudyRow], args: &EstimateArgs) -> Result<Outcome<EstimateRow>, CliError> {
    let forced = parse_scenario(&args.scenario)?;
    let methods: Option<Vec<Method>> = args.methods.as_deref().map(parse_list).transpose()?;
    let default_family: Family = args.family.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
    let abc = args.abc.config()?;
    let seed = resolve_seed(args.seed);
    let root = RngStream::new(seed);

    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let scenario = row.scenario(forced);
        let row_methods: Vec<Method> = match (&methods, &scenario) {
            (Some(m), _) => m.clone(),
            (None, Ok(sc)) => Method::ALL.into_iter().filter(|m| m.supports(*sc)).collect(),
            (None, Err(_)) => vec![Method::Wan],
        };
        for method in row_methods {
            let family = row.family_hint.unwrap_or(default_family);
            let result = scenario.clone().and_then(|sc| {
                let stats = row.stats()?;
                let prior = if method == Method::Abc { Some(prior_for(family, row, &stats, sc)?) } else { None };
                let stream = root.child(i as u64).child(method as u64);
                estimate_with(method, &stats, sc, family, prior.as_ref(), &abc, stream)
            });
            out.push(match result {
                Ok(o) => EstimateRow {
                    study_id: row.study_id.clone(),
                    method: method.to_string(),
                    scenario: Some(o.estimate.scenario),
                    mean_est: Some(o.estimate.mean),
                    sd_est: Some(o.estimate.sd),
                    n_accepted: o.n_accepted,
                    error_code: None,
                },
                Err(e) => EstimateRow {
                    study_id: row.study_id.clone(),
                    method: method.to_string(),
                    scenario: scenario.clone().ok(),
                    mean_est: None,
                    sd_est: None,
                    n_accepted: None,
                    error_code: Some(e.code().to_string()),
                },
            });
        }
    }
    let failed = out.iter().filter(|r| r.error_code.is_some()).count();
    Ok(Outcome { rows: out, failed, seed })
}

/// Runs `select` over already-parsed rows.
pub fn select_rows(rows: &[StudyRow], args: &SelectArgs) -> Result<Outcome<SelectRow>, CliError> {
    let forced = parse_scenario(&args.scenario)?;
    let families: Vec<Family> = parse_list(&args.candidates)?;
    if families.len() < 2 {
        return Err(CliError::Usage("--candidates needs at least two families".into()));
    }
    let abc = args.abc.config()?;
    let seed = resolve_seed(args.seed);
    let root = RngStream::new(seed);

    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let result = row.scenario(forced).and_then(|sc| {
            let stats = row.stats()?;
            let priors = families.iter().map(|&f| prior_for(f, row, &stats, sc)).collect::<Result<Vec<_>, _>>()?;
            select_distribution(&stats, sc, &priors, &abc, root.child(i as u64))
        });
        let (sel, code) = match result {
            Ok(sel) => (sel, None),
            Err(e) => (ModelSelectionResult::uniform(&families), Some(e.code().to_string())),
        };
        for (j, p) in sel.posterior_probs.iter().enumerate() {
            out.push(SelectRow {
                study_id: row.study_id.clone(),
                family: p.family,
                posterior_prob: p.probability,
                n_accepted: p.n_accepted,
                chosen: code.is_none() && j == sel.chosen,
                error_code: code.clone(),
            });
        }
    }
    let failed = out.iter().filter(|r| r.error_code.is_some()).count();
    Ok(Outcome { rows: out, failed, seed })
}

/// Runs every experiment in the config and flattens the records.
pub fn simulate_configs(configs: &[ExperimentConfig]) -> Result<Vec<SimulateRow>, CliError> {
    let mut rows = Vec::new();
    for cfg in configs {
        let records = run_experiment(cfg).map_err(|e| CliError::Config(e.to_string()))?;
        rows.extend(records.into_iter().map(|r| SimulateRow {
            method: r.method,
            distribution: cfg.distribution.to_string(),
            scenario: cfg.scenario,
            n: r.n,
            are_mean: r.are_mean,
            are_sd: r.are_sd,
            se_mean: r.se_mean,
            se_sd: r.se_sd,
            replicates: r.replicates,
            failures: r.failures,
        }));
    }
    Ok(rows)
}

pub fn to_csv<R: Serialize>(rows: &[R]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("serializing to memory cannot fail");
    }
    w.into_inner().expect("flushing to memory cannot fail")
}

fn write_output(path: &Option<PathBuf>, csv: &[u8], manifest: &RunManifest) -> Result<(), CliError> {
    let manifest_json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    match path {
        Some(p) => {
            fs::write(p, csv).map_err(|e| CliError::io(p, e))?;
            let mut sidecar = p.clone().into_os_string();
            sidecar.push(".manifest.json");
            fs::write(&sidecar, manifest_json).map_err(|e| CliError::io(&sidecar, e))?;
        }
        None => {
            io::stdout().write_all(csv).map_err(|e| CliError::io("<stdout>", e))?;
            eprintln!("{manifest_json}");
        }
    }
    Ok(())
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => {
            let pool =
                rayon::ThreadPoolBuilder::new().num_threads(t).build().map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn digest_input<A: Serialize>(args: &A, input: &[u8]) -> Vec<u8> {
    let mut bytes = serde_json::to_vec(args).expect("arguments serialize");
    bytes.extend_from_slice(input);
    bytes
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<i32, CliError> {
    let rows = read_studies(&args.input)?;
    let outcome = with_threads(args.threads, || estimate_rows(&rows, args))??;
    let input = fs::read(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let manifest = RunManifest::new(outcome.seed, &digest_input(args, &input));
    write_output(&args.output, &to_csv(&outcome.rows), &manifest)?;
    Ok(outcome.exit_code())
}

pub fn cmd_select(args: &SelectArgs) -> Result<i32, CliError> {
    let rows = read_studies(&args.input)?;
    let outcome = with_threads(args.threads, || select_rows(&rows, args))??;
    let input = fs::read(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let manifest = RunManifest::new(outcome.seed, &digest_input(args, &input));
    write_output(&args.output, &to_csv(&outcome.rows), &manifest)?;
    Ok(outcome.exit_code())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32, CliError> {
    let text = fs::read_to_string(&args.config).map_err(|e| CliError::io(&args.config, e))?;
    let configs = parse_experiments(&text)?;
    let rows = with_threads(args.threads, || simulate_configs(&configs))??;
    let canonical = serde_json::to_vec(&configs).expect("configs serialize");
    let manifest = RunManifest::new(configs[0].master_seed, &canonical);
    write_output(&args.output, &to_csv(&rows), &manifest)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Select(a) => cmd_select(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("abcest: {e}");
        e.exit_code()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "study_id,n,min,q1,median,q3,max,family_hint,lower,upper\n";

    #[test]
    fn csv_rows_parse_with_empty_cells() {
        let text = format!("{HEADER}a,30,0,,5,,10,,,\nb,50,,2.5,5,7.5,,beta,0,100\n");
        let rows = parse_studies_csv(text.as_bytes()).unwrap();
        assert_eq!(rows[0].min, Some(0.0));
        assert_eq!(rows[0].q1, None);
        assert_eq!(rows[0].scenario(None).unwrap(), Scenario::S1);
        assert_eq!(rows[1].family_hint, Some(Family::Beta));
        assert_eq!(rows[1].scenario(None).unwrap(), Scenario::S3);
        assert_eq!(rows[1].support(), Some((0.0, 100.0)));
    }

    #[test]
    fn csv_parse_error_names_position() {
        let text = format!("{HEADER}a,30,0,,five,,10,,,\n");
        let err = parse_studies_csv(text.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("median"), "{msg}");
        assert_eq!(err.exit_code(), EXIT_PARSE);
    }

    #[test]
    fn json_rows_and_errors() {
        let rows = parse_studies_json(br#"[{"study_id":"x","n":12,"q1":1,"median":2,"q3":3}]"#).unwrap();
        assert_eq!(rows[0].scenario(None).unwrap(), Scenario::S3);
        let err = parse_studies_json(br#"[{"study_id":"x","n":"many"}]"#).unwrap_err();
        assert!(err.to_string().contains("[0].n"), "{err}");
    }

    #[test]
    fn experiment_config_errors_name_the_field() {
        let text = r#"{"distribution":{"family":"normal","p1":50,"p2":17},"scenario":"s1",
            "methods":["wan","magic"],"n_grid":[10],"replicates":2,"master_seed":1}"#;
        let err = parse_experiments(text).unwrap_err();
        assert!(err.to_string().contains("methods[1]"), "{err}");
        assert_eq!(err.exit_code(), EXIT_CONFIG);

        let ok = text.replace("\"magic\"", "\"hozo\"");
        let cfgs = parse_experiments(&ok).unwrap();
        assert_eq!(cfgs[0].abc, AbcConfig::simulation_study());
        assert!(parse_experiments(&format!("[{ok},{ok}]")).unwrap().len() == 2);
    }

    #[test]
    fn exit_codes_from_outcome() {
        let o = |failed| Outcome { rows: vec![(); 3], failed, seed: 0 };
        assert_eq!(o(0).exit_code(), EXIT_OK);
        assert_eq!(o(1).exit_code(), EXIT_PARTIAL);
        assert_eq!(o(3).exit_code(), EXIT_ALL_FAILED);
    }
}
