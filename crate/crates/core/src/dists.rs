//! Closed-form distribution kernel.
//!
//! Four nonnegative families are supported: exponential, half-normal,
//! Pareto type I (power law) and the location Pareto distribution
//! `LPD(α, μ, δ)` with tail `((μ + δ)/(x + δ))^α` on `x ≥ μ`. The classical
//! Pareto / GPD with `ξ > 0` is the `μ = 0` member, with `ξ = 1/α` and
//! `β = δ/α`.
//!
//! Besides pdf/cdf/quantile the kernel exposes partial expectations
//! `E(X·1{X > ν})` and the Markov-type bounds built from them.

use std::fmt;

use libm::{erf, erfc};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::rng::open_unit;
use crate::special::{std_normal_isf, std_normal_pdf, std_normal_sf};

/// Identity and parameters of a supported distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistributionSpec {
    Exponential { rate: f64 },
    HalfNormal { sigma: f64 },
    ParetoI { alpha: f64, mu: f64 },
    LocationPareto { alpha: f64, mu: f64, delta: f64 },
}

/// A moment that may diverge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn value(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Moment::Finite(_))
    }

    /// The value as an `f64`, with `+∞` for the infinite marker.
    pub fn as_f64(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Moment::Finite(v) => write!(f, "{v}"),
            Moment::Infinite => f.write_str("∞"),
        }
    }
}

/// A continuous law described through its tail function.
///
/// Used by checks that only need `1 − F` and its inverse, so fitted
/// exceedance models and closed-form specs can be treated alike.
pub trait TailFunction {
    /// `Pr{X > x}`.
    fn tail(&self, x: f64) -> f64;
    /// The `x` with `Pr{X > x} = q`, for `q` in `(0, 1)`.
    fn inverse_tail(&self, q: f64) -> f64;
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl DistributionSpec {
    pub fn exponential(rate: f64) -> Result<Self> {
        let d = DistributionSpec::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn half_normal(sigma: f64) -> Result<Self> {
        let d = DistributionSpec::HalfNormal { sigma };
        d.validate()?;
        Ok(d)
    }

    /// Half-normal with unit expectation, `σ = sqrt(π/2)`.
    pub fn unit_mean_half_normal() -> Self {
        DistributionSpec::HalfNormal { sigma: (std::f64::consts::PI / 2.0).sqrt() }
    }

    pub fn pareto(alpha: f64, mu: f64) -> Result<Self> {
        let d = DistributionSpec::ParetoI { alpha, mu };
        d.validate()?;
        Ok(d)
    }

    pub fn location_pareto(alpha: f64, mu: f64, delta: f64) -> Result<Self> {
        let d = DistributionSpec::LocationPareto { alpha, mu, delta };
        d.validate()?;
        Ok(d)
    }

    /// Generalized Pareto on `x ≥ 0` with `ξ > 0`, i.e. `LPD(1/ξ, 0, β/ξ)`.
    pub fn gpd(xi: f64, beta: f64) -> Result<Self> {
        positive("xi", xi)?;
        positive("beta", beta)?;
        Self::location_pareto(1.0 / xi, 0.0, beta / xi)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Exponential { rate } => positive("rate", rate),
            DistributionSpec::HalfNormal { sigma } => positive("sigma", sigma),
            DistributionSpec::ParetoI { alpha, mu } => {
                positive("alpha", alpha)?;
                positive("mu", mu)
            }
            DistributionSpec::LocationPareto { alpha, mu, delta } => {
                positive("alpha", alpha)?;
                if !(mu.is_finite() && mu >= 0.0) {
                    return Err(Error::InvalidParameter(format!("mu must be finite and >= 0, got {mu}")));
                }
                if !(delta.is_finite() && delta > -mu) {
                    return Err(Error::InvalidParameter(format!("delta must exceed -mu ({}), got {delta}", -mu)));
                }
                Ok(())
            }
        }
    }

    /// Lower end of the support.
    pub fn support_min(&self) -> f64 {
        match *self {
            DistributionSpec::Exponential { .. } | DistributionSpec::HalfNormal { .. } => 0.0,
            DistributionSpec::ParetoI { mu, .. } | DistributionSpec::LocationPareto { mu, .. } => mu,
        }
    }

    /// Tail index for the Pareto families, `None` for the light-tailed ones.
    pub fn tail_index(&self) -> Option<f64> {
        match *self {
            DistributionSpec::ParetoI { alpha, .. } | DistributionSpec::LocationPareto { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    pub fn has_finite_mean(&self) -> bool {
        self.tail_index().map_or(true, |a| a > 1.0)
    }

    fn require_finite_mean(&self) -> Result<()> {
        match self.tail_index() {
            Some(alpha) if alpha <= 1.0 => Err(Error::InfiniteMean { alpha }),
            _ => Ok(()),
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.pdf_unchecked(x))
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.cdf_unchecked(x))
    }

    /// Tail function `1 − F(x)`.
    pub fn tail(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.tail_unchecked(x))
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.validate()?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile probability must lie in (0, 1), got {p}")));
        }
        Ok(self.quantile_unchecked(p))
    }

    fn pdf_unchecked(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            DistributionSpec::HalfNormal { sigma } => {
                if x < 0.0 {
                    0.0
                } else {
                    2.0 * std_normal_pdf(x / sigma) / sigma
                }
            }
            DistributionSpec::ParetoI { alpha, mu } => {
                if x < mu {
                    0.0
                } else {
                    alpha / mu * (mu / x).powf(alpha + 1.0)
                }
            }
            DistributionSpec::LocationPareto { alpha, mu, delta } => {
                if x < mu {
                    0.0
                } else {
                    let s = mu + delta;
                    alpha / s * (s / (x + delta)).powf(alpha + 1.0)
                }
            }
        }
    }

    fn cdf_unchecked(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            DistributionSpec::HalfNormal { sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    erf(x / (sigma * std::f64::consts::SQRT_2))
                }
            }
            DistributionSpec::ParetoI { alpha, mu } => {
                if x <= mu {
                    0.0
                } else {
                    -(alpha * (mu / x).ln()).exp_m1()
                }
            }
            DistributionSpec::LocationPareto { alpha, mu, delta } => {
                if x <= mu {
                    0.0
                } else {
                    -(alpha * ((mu + delta) / (x + delta)).ln()).exp_m1()
                }
            }
        }
    }

    fn tail_unchecked(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            DistributionSpec::HalfNormal { sigma } => {
                if x <= 0.0 {
                    1.0
                } else {
                    erfc(x / (sigma * std::f64::consts::SQRT_2))
                }
            }
            DistributionSpec::ParetoI { alpha, mu } => {
                if x <= mu {
                    1.0
                } else {
                    (mu / x).powf(alpha)
                }
            }
            DistributionSpec::LocationPareto { alpha, mu, delta } => {
                if x <= mu {
                    1.0
                } else {
                    ((mu + delta) / (x + delta)).powf(alpha)
                }
            }
        }
    }

    fn quantile_unchecked(&self, p: f64) -> f64 {
        // -ln(1 - p), accurate for small p
        let neg_log_sf = -(-p).ln_1p();
        match *self {
            DistributionSpec::Exponential { rate } => neg_log_sf / rate,
            DistributionSpec::HalfNormal { sigma } => sigma * std_normal_isf(0.5 * (1.0 - p)),
            DistributionSpec::ParetoI { alpha, mu } => mu * (neg_log_sf / alpha).exp(),
            DistributionSpec::LocationPareto { alpha, mu, delta } => (mu + delta) * (neg_log_sf / alpha).exp() - delta,
        }
    }

    fn inverse_tail_unchecked(&self, q: f64) -> f64 {
        match *self {
            DistributionSpec::Exponential { rate } => -q.ln() / rate,
            DistributionSpec::HalfNormal { sigma } => sigma * std_normal_isf(0.5 * q),
            DistributionSpec::ParetoI { alpha, mu } => mu * q.powf(-1.0 / alpha),
            DistributionSpec::LocationPareto { alpha, mu, delta } => (mu + delta) * q.powf(-1.0 / alpha) - delta,
        }
    }

    /// Draws one value by inverse transform of a single open-unit uniform.
    ///
    /// The spec is assumed valid; use [`DistributionSpec::sample`] for the
    /// checked entry point.
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        debug_assert!(self.validate().is_ok());
        self.inverse_tail_unchecked(open_unit(rng))
    }

    /// `n` i.i.d. draws, reproducible from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with<R: RngCore + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        self.validate()?;
        if n == 0 {
            return Err(Error::InvalidParameter("sample size must be >= 1".into()));
        }
        Ok((0..n).map(|_| self.draw(rng)).collect())
    }

    /// `E(X^k)`; infinite moments come back as [`Moment::Infinite`].
    pub fn moment(&self, k: u32) -> Result<Moment> {
        self.validate()?;
        if k == 0 {
            return Ok(Moment::Finite(1.0));
        }
        let kf = f64::from(k);
        let m = match *self {
            DistributionSpec::Exponential { rate } => {
                Moment::Finite((1..=k).map(f64::from).product::<f64>() / rate.powf(kf))
            }
            DistributionSpec::HalfNormal { sigma } => {
                // m_k = (k - 1) σ² m_{k-2}
                let mut even = 1.0;
                let mut odd = sigma * (2.0 / std::f64::consts::PI).sqrt();
                for j in 2..=k {
                    let next = f64::from(j - 1) * sigma * sigma;
                    if j % 2 == 0 {
                        even *= next;
                    } else {
                        odd *= next;
                    }
                }
                Moment::Finite(if k % 2 == 0 { even } else { odd })
            }
            DistributionSpec::ParetoI { alpha, mu } => {
                if kf < alpha {
                    Moment::Finite(alpha * mu.powf(kf) / (alpha - kf))
                } else {
                    Moment::Infinite
                }
            }
            DistributionSpec::LocationPareto { alpha, mu, delta } => {
                if kf < alpha {
                    // X = (μ + δ)P − δ with P ~ Pareto I(α, 1); expand binomially.
                    let scale = mu + delta;
                    let mut total = 0.0;
                    let mut binom = 1.0;
                    for j in 0..=k {
                        let jf = f64::from(j);
                        if j > 0 {
                            binom *= f64::from(k - j + 1) / jf;
                        }
                        let pareto_moment = alpha / (alpha - jf);
                        total += binom * scale.powf(jf) * (-delta).powf(kf - jf) * pareto_moment;
                    }
                    Moment::Finite(total)
                } else {
                    Moment::Infinite
                }
            }
        };
        Ok(m)
    }

    pub fn mean(&self) -> Result<Moment> {
        self.moment(1)
    }

    fn finite_mean(&self) -> Result<f64> {
        self.require_finite_mean()?;
        Ok(self.mean()?.as_f64())
    }

    /// Partial expectation `E(X·1{X > ν})`; equals the mean for `ν` at or
    /// below the support minimum.
    pub fn partial_expectation(&self, nu: f64) -> Result<f64> {
        self.validate()?;
        if !nu.is_finite() {
            return Err(Error::Domain(format!("threshold must be finite, got {nu}")));
        }
        let mean = self.finite_mean()?;
        if nu <= self.support_min() {
            return Ok(mean);
        }
        Ok(match *self {
            DistributionSpec::Exponential { rate } => (-rate * nu).exp() * (nu + 1.0 / rate),
            DistributionSpec::HalfNormal { sigma } => {
                sigma * (2.0 / std::f64::consts::PI).sqrt() * (-nu * nu / (2.0 * sigma * sigma)).exp()
            }
            DistributionSpec::ParetoI { alpha, mu } => alpha / (alpha - 1.0) * mu.powf(alpha) * nu.powf(1.0 - alpha),
            DistributionSpec::LocationPareto { alpha, delta, .. } => {
                self.tail_unchecked(nu) * (alpha * nu + delta) / (alpha - 1.0)
            }
        })
    }

    fn check_threshold(nu: f64) -> Result<()> {
        if nu.is_finite() && nu > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("threshold must be finite and > 0, got {nu}")))
        }
    }

    /// `E_ν(X)/ν`.
    pub fn improved_markov_bound(&self, nu: f64) -> Result<f64> {
        Self::check_threshold(nu)?;
        Ok(self.partial_expectation(nu)? / nu)
    }

    /// `E(X)/ν`.
    pub fn traditional_markov_bound(&self, nu: f64) -> Result<f64> {
        Self::check_threshold(nu)?;
        self.validate()?;
        Ok(self.finite_mean()? / nu)
    }

    /// `E(X^k)/ν^k`.
    pub fn moment_markov_bound(&self, nu: f64, k: u32) -> Result<f64> {
        Self::check_threshold(nu)?;
        match self.moment(k)? {
            Moment::Finite(m) => Ok(m / nu.powf(f64::from(k))),
            Moment::Infinite => Err(Error::InfiniteMoment { k, alpha: self.tail_index().unwrap_or(f64::INFINITY) }),
        }
    }

    /// `∫_ν^∞ (1 − F(x)) dx`, the integrated tail, in closed form.
    fn integrated_tail(&self, nu: f64) -> f64 {
        match *self {
            DistributionSpec::Exponential { rate } => {
                if nu <= 0.0 {
                    -nu + 1.0 / rate
                } else {
                    (-rate * nu).exp() / rate
                }
            }
            DistributionSpec::HalfNormal { sigma } => {
                let z = nu.max(0.0) / sigma;
                let above = 2.0 * sigma * (std_normal_pdf(z) - z * std_normal_sf(z));
                above + (-nu).max(0.0)
            }
            DistributionSpec::ParetoI { alpha, mu } => {
                if nu < mu {
                    (mu - nu) + mu / (alpha - 1.0)
                } else {
                    mu.powf(alpha) * nu.powf(1.0 - alpha) / (alpha - 1.0)
                }
            }
            DistributionSpec::LocationPareto { alpha, mu, delta } => {
                if nu < mu {
                    (mu - nu) + (mu + delta) / (alpha - 1.0)
                } else {
                    self.tail_unchecked(nu) * (nu + delta) / (alpha - 1.0)
                }
            }
        }
    }

    /// Gap between the improved Markov bound and the true tail,
    /// `(1/ν)∫_ν^∞ (1 − F(x)) dx`.
    pub fn markov_error(&self, nu: f64) -> Result<f64> {
        Self::check_threshold(nu)?;
        self.validate()?;
        self.require_finite_mean()?;
        Ok(self.integrated_tail(nu) / nu)
    }

    /// The same gap by adaptive quadrature of the tail function.
    pub fn markov_error_quadrature(&self, nu: f64) -> Result<f64> {
        Self::check_threshold(nu)?;
        self.validate()?;
        self.require_finite_mean()?;
        let lo = self.support_min();
        let below = if nu < lo { lo - nu } else { 0.0 };
        let from = nu.max(lo);
        let above = quad::integrate_to_infinity(|x| self.tail_unchecked(x), from, 1e-13);
        Ok((below + above) / nu)
    }

    /// Smallest `x₀` in the support beyond which `x·(1 − F(x))` is
    /// nonincreasing.
    pub fn x_tail_decreasing_from(&self) -> Result<f64> {
        self.validate()?;
        self.require_finite_mean()?;
        Ok(match *self {
            DistributionSpec::Exponential { rate } => 1.0 / rate,
            DistributionSpec::ParetoI { mu, .. } => mu,
            DistributionSpec::LocationPareto { alpha, mu, delta } => mu.max(delta / (alpha - 1.0)),
            DistributionSpec::HalfNormal { sigma } => {
                // d/dz [z·sf(z)] = sf(z) − z·φ(z): positive at 0, negative for large z.
                let slope = |z: f64| std_normal_sf(z) - z * std_normal_pdf(z);
                let (mut lo, mut hi) = (0.0_f64, 10.0_f64);
                while hi - lo > 1e-10 {
                    let mid = 0.5 * (lo + hi);
                    if slope(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                sigma * 0.5 * (lo + hi)
            }
        })
    }

    /// Short kind name used in tables.
    pub fn kind_name(&self) -> &'static str {
        match self {
            DistributionSpec::Exponential { .. } => "exponential",
            DistributionSpec::HalfNormal { .. } => "half-normal",
            DistributionSpec::ParetoI { .. } => "pareto",
            DistributionSpec::LocationPareto { .. } => "location-pareto",
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistributionSpec::Exponential { rate } => write!(f, "exponential(rate={rate})"),
            DistributionSpec::HalfNormal { sigma } => write!(f, "half-normal(sigma={sigma})"),
            DistributionSpec::ParetoI { alpha, mu } => write!(f, "pareto(alpha={alpha}, mu={mu})"),
            DistributionSpec::LocationPareto { alpha, mu, delta } => {
                write!(f, "location-pareto(alpha={alpha}, mu={mu}, delta={delta})")
            }
        }
    }
}

impl TailFunction for DistributionSpec {
    fn tail(&self, x: f64) -> f64 {
        self.tail_unchecked(x)
    }

    fn inverse_tail(&self, q: f64) -> f64 {
        self.inverse_tail_unchecked(q)
    }
}
