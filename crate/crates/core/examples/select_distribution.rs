//! Simulate a study from Beta(9, 4), then ask ABC which of beta and normal
//! explains its summary better.

use abcest::distributions::sample;
use abcest::{
    default_priors, select_distribution, summarize_sample, AbcConfig, DistributionSpec, Family, QuantileRule,
    RngStream, Scenario,
};

fn main() -> abcest::Result<()> {
    let stream = RngStream::new(2024);
    let data = sample(&DistributionSpec::beta(9.0, 4.0), 400, &mut stream.child(0).rng())?;
    let stats = summarize_sample(&data, Scenario::S2, QuantileRule::Type7)?;

    let candidates = [Family::Beta, Family::Normal, Family::Weibull]
        .map(|f| default_priors(f, &stats, Scenario::S2))
        .into_iter()
        .collect::<abcest::Result<Vec<_>>>()?;
    let result =
        select_distribution(&stats, Scenario::S2, &candidates, &AbcConfig::simulation_study(), stream.child(1))?;

    for p in &result.posterior_probs {
        println!("{:<8} P = {:.3} ({} accepted)", p.family, p.probability, p.n_accepted);
    }
    println!("chosen: {}", result.chosen_family());
    if let Some(bf) = result.bayes_factors[0][1] {
        println!("Bayes factor beta vs normal: {bf:.2}");
    }
    Ok(())
}
