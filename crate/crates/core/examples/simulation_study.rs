//! A small average-relative-error study. Pass a config path to run one of
//! the bundled experiments instead, e.g.
//! `cargo run --release --example simulation_study -- configs/five_families_s1.json`.

use abcest::cli::parse_experiments;
use abcest::sim_harness::{run_experiment, ExperimentConfig};
use abcest::{AbcConfig, DistributionSpec, Method, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let configs = match std::env::args().nth(1) {
        Some(path) => parse_experiments(&std::fs::read_to_string(path)?)?,
        None => vec![ExperimentConfig {
            distribution: DistributionSpec::exponential(10.0),
            scenario: Scenario::S1,
            methods: vec![Method::Hozo, Method::Wan, Method::Abc],
            n_grid: vec![20, 100, 400],
            replicates: 25,
            abc: AbcConfig { n_iter: 5_000, ..AbcConfig::simulation_study() },
            master_seed: 3,
        }],
    };

    for cfg in &configs {
        println!("{} {}", cfg.distribution, cfg.scenario);
        println!("{:<6} {:>5} {:>10} {:>10} {:>8}", "method", "n", "ARE mean", "ARE sd", "failed");
        for r in run_experiment(cfg)? {
            println!("{:<6} {:>5} {:>10.4} {:>10.4} {:>8}", r.method, r.n, r.are_mean, r.are_sd, r.failures);
        }
    }
    Ok(())
}
