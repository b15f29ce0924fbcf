mod common;

use abcest::distributions::sample;
use abcest::special::{gamma_fn, normal_quantile};
use abcest::summary_stats::mean_sd;
use abcest::{moments, DistributionSpec, RngStream};
use common::{bisect_quantile, quantile_grid, rel_err};

#[test]
fn normal_quantile_matches_erf_bisection() {
    let worst = quantile_grid().map(|p| (normal_quantile(p).unwrap() - bisect_quantile(p)).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "worst absolute error {worst:e}");
}

#[test]
fn normal_quantile_tails_match_erf_bisection() {
    for p in [1e-300, 1e-100, 1e-20, 1e-10, 1e-8] {
        let (q, oracle) = (normal_quantile(p).unwrap(), bisect_quantile(p));
        assert!(rel_err(q, oracle) < 1e-12, "p = {p:e}: {q} vs {oracle}");
    }
}

#[test]
fn gamma_matches_independent_implementation() {
    for x in (0..680).map(|i| 0.125 + 0.25 * i as f64) {
        // Log space: |ln a - ln b| bounds the relative error and survives
        // where the oracle's own gamma overflows.
        let (ours, oracle) = (gamma_fn(x).unwrap().ln(), statrs::function::gamma::ln_gamma(x));
        assert!((ours - oracle).abs() < 1e-9, "x = {x}: ln {ours} vs {oracle}");
    }
}

#[test]
fn gamma_identities() {
    // Reflection and duplication.
    for &x in &[0.1, 0.3, 0.5, 0.77, 0.9] {
        let reflect = gamma_fn(x).unwrap() * gamma_fn(1.0 - x).unwrap();
        let expected = std::f64::consts::PI / (std::f64::consts::PI * x).sin();
        assert!(rel_err(reflect, expected) < 1e-12, "reflection at {x}");
    }
    for &x in &[0.3, 1.7, 4.2, 12.5] {
        let lhs = gamma_fn(x).unwrap() * gamma_fn(x + 0.5).unwrap();
        let rhs = 2f64.powf(1.0 - 2.0 * x) * std::f64::consts::PI.sqrt() * gamma_fn(2.0 * x).unwrap();
        assert!(rel_err(lhs, rhs) < 1e-12, "duplication at {x}");
    }
    let mut factorial = 1.0;
    for k in 1..=29u32 {
        factorial *= k as f64;
        assert_eq!(gamma_fn(k as f64 + 1.0).unwrap(), factorial);
    }
}

#[test]
fn sample_moments_converge_for_every_family() {
    let specs = [
        DistributionSpec::normal(50.0, 17.0),
        DistributionSpec::lognormal(4.0, 0.3),
        DistributionSpec::weibull(2.0, 35.0),
        DistributionSpec::beta(9.0, 4.0),
        DistributionSpec::exponential(10.0),
    ];
    let n = 1_000_000;
    for (i, spec) in specs.iter().enumerate() {
        let data = sample(spec, n, &mut RngStream::new(77).child(i as u64).rng()).unwrap();
        let truth = moments(spec).unwrap();
        let (m, s) = mean_sd(&data);
        let se = truth.sd / (n as f64).sqrt();
        assert!((m - truth.mean).abs() < 4.0 * se, "{spec}: mean {m} vs {}", truth.mean);
        assert!(rel_err(s, truth.sd) < 0.01, "{spec}: sd {s} vs {}", truth.sd);
    }
}
