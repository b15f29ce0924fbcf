//! Every closed-form rule on the summaries a trial report might give.
//!
//! Run with `cargo run --example closed_form`.

use abcest::closed_form::{bland_estimate_with, closed_form_estimate, BlandVariant};
use abcest::{Method, Scenario, SummaryStats};

fn main() -> abcest::Result<()> {
    let reports = [
        ("range only", SummaryStats::s1(12.0, 31.0, 88.0, 40)),
        ("five numbers", SummaryStats::s2(12.0, 22.0, 31.0, 45.0, 88.0, 40)),
        ("quartiles only", SummaryStats::s3(22.0, 31.0, 45.0, 40)),
    ];

    for (label, stats) in &reports {
        let scenario = Scenario::detect(stats).expect("each report matches a scenario");
        println!("{label} ({scenario}, n = {}):", stats.n);
        for method in Method::ALL.into_iter().filter(|m| *m != Method::Abc) {
            match closed_form_estimate(method, stats, scenario) {
                Ok(e) => println!("  {:<6} mean {:>8.3}  sd {:>8.3}", method, e.mean, e.sd),
                Err(e) => println!("  {:<6} -- {e}", method),
            }
        }
    }

    let exact = bland_estimate_with(&reports[1].1, BlandVariant::Exact)?;
    println!("bland, exact variance form: mean {:.3} sd {:.3}", exact.mean, exact.sd);
    Ok(())
}
