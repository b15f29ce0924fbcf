#![allow(dead_code)]

pub mod props;

use statrs::function::erf::erfc;

/// Standard normal CDF through the complementary error function, accurate
/// in both tails.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverts `normal_cdf` by bisection.
pub fn bisect_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// 1,000 evenly spaced probabilities covering [1e-6, 1 - 1e-6].
pub fn quantile_grid() -> impl Iterator<Item = f64> {
    let (a, b) = (1e-6, 1.0 - 1e-6);
    (0..1000).map(move |i| a + (b - a) * i as f64 / 999.0)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}
