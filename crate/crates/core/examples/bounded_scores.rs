//! Scores on a 0-100 scale modelled as a rescaled beta distribution.

use abcest::abc::Bounds;
use abcest::{abc_run, AbcConfig, Family, PriorConfig, RngStream, Scenario, SummaryStats};

fn main() -> abcest::Result<()> {
    let stats = SummaryStats::s3(61.0, 72.0, 80.0, 85);
    let prior =
        PriorConfig::new(Family::Beta, Bounds::new(0.0, 40.0), Some(Bounds::new(0.0, 40.0))).with_support(0.0, 100.0);

    let fit = abc_run(&stats, Scenario::S3, Family::Beta, &prior, &AbcConfig::default(), RngStream::new(9))?;
    let [a, b] = fit.mean_params()[..] else { unreachable!() };
    println!("beta({a:.2}, {b:.2}) on [0, 100]: mean {:.2} sd {:.2}", fit.estimate.mean, fit.estimate.sd);

    // The same summary without the support is rejected: beta lives on [0, 1].
    let unit = PriorConfig { support: None, ..prior };
    if let Err(e) = abc_run(&stats, Scenario::S3, Family::Beta, &unit, &AbcConfig::default(), RngStream::new(9)) {
        println!("without support bounds: {e}");
    }
    Ok(())
}
