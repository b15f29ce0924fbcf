//! Property suites, shared by the `properties` tests and the acceptance run.

use abcest::abc::{acceptance_counts, select_accepted, Acceptance, ModelSelectionResult};
use abcest::closed_form::closed_form_estimate;
use abcest::special::{gamma_fn, normal_quantile};
use abcest::{summarize_sample, Family, Method, QuantileRule, Scenario, SummaryStats};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub const CASES: u32 = 1000;

pub type Property = (&'static str, fn() -> Result<(), String>);

pub const ALL: [Property; 9] = [
    ("closed-form location-scale equivariance", closed_form_is_location_scale_equivariant),
    ("closed-form constant summaries", constant_summaries_give_zero_sd),
    ("summary permutation invariance", summaries_ignore_sample_order),
    ("summary affine equivariance", summaries_are_affine_equivariant),
    ("normal quantile antisymmetry", normal_quantile_is_antisymmetric),
    ("normal quantile monotonicity", normal_quantile_is_monotone),
    ("gamma recurrence", gamma_satisfies_recurrence),
    ("accepted set is the closest", accepted_set_is_the_closest),
    ("posterior normalization and scale invariance", posterior_probs_normalize_and_ignore_distance_scale),
];

fn check<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    TestRunner::new(config).run(&strategy, test).map_err(|e| e.to_string())
}

/// Five ordered values spanning at least 1 and a sample size.
fn ordered_stats() -> impl Strategy<Value = SummaryStats> {
    (prop::array::uniform5(-100.0f64..100.0), 1.0f64..50.0, 2usize..1000).prop_map(|(mut v, spread, n)| {
        v.sort_by(f64::total_cmp);
        v[4] = v[4].max(v[0] + spread);
        SummaryStats::s2(v[0], v[1], v[2], v[3], v[4], n)
    })
}

fn closed_methods() -> impl Iterator<Item = (Method, Scenario)> {
    [Method::AdHoc, Method::Hozo, Method::Bland, Method::Wan]
        .into_iter()
        .flat_map(|m| Scenario::ALL.into_iter().filter(move |&s| m.supports(s)).map(move |s| (m, s)))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

pub fn closed_form_is_location_scale_equivariant() -> Result<(), String> {
    check((ordered_stats(), 0.1f64..10.0, -100.0f64..100.0), |(stats, a, b)| {
        for (method, scenario) in closed_methods() {
            let base = closed_form_estimate(method, &stats.restrict(scenario).unwrap(), scenario).unwrap();
            let moved =
                closed_form_estimate(method, &stats.restrict(scenario).unwrap().affine(a, b), scenario).unwrap();
            prop_assert!(close(moved.mean, a * base.mean + b, 1e-9), "{method} {scenario} mean");
            prop_assert!(close(moved.sd, a * base.sd, 1e-7), "{method} {scenario} sd {} vs {}", moved.sd, a * base.sd);
        }
        Ok(())
    })
}

pub fn constant_summaries_give_zero_sd() -> Result<(), String> {
    check((-1e3f64..1e3, 2usize..1000), |(c, n)| {
        let stats = SummaryStats::s2(c, c, c, c, c, n);
        for (method, scenario) in closed_methods() {
            let e = closed_form_estimate(method, &stats.restrict(scenario).unwrap(), scenario).unwrap();
            prop_assert!(close(e.mean, c, 1e-12));
            prop_assert!(e.sd.abs() <= 1e-6 * (1.0 + c.abs()), "{method} {scenario} sd {}", e.sd);
        }
        Ok(())
    })
}

pub fn summaries_ignore_sample_order() -> Result<(), String> {
    check(
        prop::collection::vec(-1e3f64..1e3, 2..200).prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle())),
        |(data, shuffled)| {
            for scenario in Scenario::ALL {
                for rule in [QuantileRule::Type7, QuantileRule::Type6] {
                    prop_assert_eq!(
                        summarize_sample(&data, scenario, rule).unwrap(),
                        summarize_sample(&shuffled, scenario, rule).unwrap()
                    );
                }
            }
            Ok(())
        },
    )
}

pub fn summaries_are_affine_equivariant() -> Result<(), String> {
    check((prop::collection::vec(-1e3f64..1e3, 2..200), 0.01f64..100.0, -1e3f64..1e3), |(data, a, b)| {
        let moved: Vec<f64> = data.iter().map(|x| a * x + b).collect();
        for rule in [QuantileRule::Type7, QuantileRule::Type6] {
            let s = summarize_sample(&data, Scenario::S2, rule).unwrap().affine(a, b);
            let t = summarize_sample(&moved, Scenario::S2, rule).unwrap();
            let tol = 1e-9 * (a * 1e3 + b.abs());
            for field in ["min", "q1", "median", "q3", "max"] {
                prop_assert!((s.field(field).unwrap() - t.field(field).unwrap()).abs() <= tol, "{field}");
            }
        }
        Ok(())
    })
}

pub fn normal_quantile_is_antisymmetric() -> Result<(), String> {
    check(1e-6f64..0.5, |p| {
        let lo = normal_quantile(p).unwrap();
        let hi = normal_quantile(1.0 - p).unwrap();
        // Rounding in 1 - p limits how far into the tail this can be exact.
        prop_assert!((lo + hi).abs() <= 1e-9 * (1.0 + lo.abs()), "{lo} {hi}");
        Ok(())
    })
}

pub fn normal_quantile_is_monotone() -> Result<(), String> {
    check((1e-12f64..1.0, 1e-12f64..1.0), |(p, q)| {
        let (p, q) = if p <= q { (p, q) } else { (q, p) };
        prop_assume!(q < 1.0);
        prop_assert!(normal_quantile(p).unwrap() <= normal_quantile(q).unwrap());
        Ok(())
    })
}

pub fn gamma_satisfies_recurrence() -> Result<(), String> {
    check(0.01f64..60.0, |x| {
        let lhs = gamma_fn(x + 1.0).unwrap();
        let rhs = x * gamma_fn(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs(), "x = {x}: {lhs} vs {rhs}");
        Ok(())
    })
}

pub fn accepted_set_is_the_closest() -> Result<(), String> {
    check((prop::collection::vec(0u32..1000, 1..400), 0.5f64..100.0), |(distances, pct)| {
        let d: Vec<f64> = distances.iter().map(|&x| x as f64).collect();
        let Ok((idx, threshold)) = select_accepted(&d, Acceptance::Percentile(pct)) else {
            return Ok(());
        };
        let accepted: std::collections::HashSet<usize> = idx.iter().copied().collect();
        for (i, &x) in d.iter().enumerate() {
            if accepted.contains(&i) {
                prop_assert!(x <= threshold);
            } else {
                prop_assert!(x >= threshold);
            }
        }
        Ok(())
    })
}

pub fn posterior_probs_normalize_and_ignore_distance_scale() -> Result<(), String> {
    check(
        (
            (2usize..6).prop_flat_map(|k| (Just(k), prop::collection::vec((0..k, 0u32..10_000), 50..500))),
            1.0f64..100.0,
            -20i32..20,
        ),
        |((k, draws), pct, shift)| {
            let labels: Vec<usize> = draws.iter().map(|d| d.0).collect();
            let d: Vec<f64> = draws.iter().map(|d| d.1 as f64).collect();
            let scaled: Vec<f64> = d.iter().map(|x| x * 2f64.powi(shift)).collect();
            let families = &Family::ALL[..k];

            let base = acceptance_counts(&labels, &d, k, Acceptance::Percentile(pct));
            let other = acceptance_counts(&labels, &scaled, k, Acceptance::Percentile(pct));
            match (base, other) {
                (Ok((c1, _)), Ok((c2, _))) => {
                    prop_assert_eq!(&c1, &c2);
                    let r = ModelSelectionResult::from_counts(families, &c1, 0.0);
                    let total: f64 = r.posterior_probs.iter().map(|p| p.probability).sum();
                    prop_assert!((total - 1.0).abs() < 1e-12);
                    prop_assert_eq!(r.chosen, ModelSelectionResult::from_counts(families, &c2, 0.0).chosen);
                }
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "scaling changed the outcome: {a:?} vs {b:?}"),
            }
            Ok(())
        },
    )
}
