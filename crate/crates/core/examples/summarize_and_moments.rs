//! Draw from each family, summarize the sample, and compare the sample
//! moments with the closed-form ones.

use abcest::distributions::sample;
use abcest::summary_stats::mean_sd;
use abcest::{moments, summarize_sample, DistributionSpec, QuantileRule, RngStream, Scenario};

fn main() -> abcest::Result<()> {
    let specs = [
        DistributionSpec::normal(50.0, 17.0),
        DistributionSpec::lognormal(4.0, 0.3),
        DistributionSpec::weibull(2.0, 35.0),
        DistributionSpec::beta(9.0, 4.0),
        DistributionSpec::exponential(10.0),
    ];
    let stream = RngStream::new(11);

    for (i, spec) in specs.iter().enumerate() {
        let data = sample(spec, 200, &mut stream.child(i as u64).rng())?;
        let truth = moments(spec)?;
        let (m, s) = mean_sd(&data);
        let five = summarize_sample(&data, Scenario::S2, QuantileRule::Type7)?;
        let alt = summarize_sample(&data, Scenario::S3, QuantileRule::Type6)?;
        println!("{spec}");
        println!("  population mean {:.4} sd {:.4}; sample mean {m:.4} sd {s:.4}", truth.mean, truth.sd);
        println!(
            "  min {:.4} q1 {:.4} median {:.4} q3 {:.4} max {:.4}",
            five.min.unwrap(),
            five.q1.unwrap(),
            five.median,
            five.q3.unwrap(),
            five.max.unwrap()
        );
        println!("  type-6 quartiles {:.4} / {:.4}", alt.q1.unwrap(), alt.q3.unwrap());
    }
    Ok(())
}
