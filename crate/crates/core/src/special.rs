//! Standard normal distribution functions.
//!
//! `erfc` comes from `libm` (few-ulp accuracy, relative accuracy held deep
//! into the tails). The inverses start from the `statrs` rational
//! approximation and are polished with Newton steps against `libm::erfc`.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Φ(x).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// 1 − Φ(x), computed without cancellation.
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Φ⁻¹(p) for p in (0, 1).
pub fn std_normal_quantile(p: f64) -> f64 {
    if p > 0.5 {
        std_normal_isf(1.0 - p)
    } else {
        -std_normal_isf(p)
    }
}

/// The x with 1 − Φ(x) = q, for q in (0, 1); accurate for tiny q.
pub fn std_normal_isf(q: f64) -> f64 {
    if q <= 0.0 {
        return f64::INFINITY;
    }
    if q >= 1.0 {
        return f64::NEG_INFINITY;
    }
    if q > 0.5 {
        return -std_normal_isf(1.0 - q);
    }
    let mut x = SQRT_2 * erfc_inv(2.0 * q);
    for _ in 0..3 {
        let phi = std_normal_pdf(x);
        if phi == 0.0 {
            break;
        }
        let step = (std_normal_sf(x) - q) / phi;
        x += step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}
