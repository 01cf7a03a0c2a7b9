//! Empirical, model-free tail bounds from an ordered sample.
//!
//! The central quantity is the empirical upper bound
//! `eB(ν) = x_{n,n} / (n·ν)`: the partial expectation above the largest
//! estimable level, estimated by the top order statistic over `n`, and
//! divided by `ν` as in the improved Markov inequality.

use serde::Serialize;

use crate::dists::TailFunction;
use crate::error::{Error, Result};

/// Ascending sample of nonnegative reals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Sorts `values` and checks they are finite and nonnegative.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("sample values must be finite and >= 0, got {bad}")));
        }
        values.sort_by(f64::total_cmp);
        Ok(SortedSample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `x_{n,n}`.
    pub fn maximum(&self) -> f64 {
        *self.values.last().expect("nonempty by construction")
    }

    /// `x_{r,n}` with 1-based `r`.
    pub fn order_statistic(&self, r: usize) -> Option<f64> {
        r.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Partial mean `pM_k = (1/n) Σ_{j<k} x_{n−j,n}`.
    pub fn partial_mean(&self, k: usize) -> Result<f64> {
        let n = self.len();
        if k == 0 || k > n {
            return Err(Error::Domain(format!("k must lie in 1..={n}, got {k}")));
        }
        Ok(self.values[n - k..].iter().sum::<f64>() / n as f64)
    }

    /// Number of observations strictly larger than `nu`.
    pub fn count_exceedances(&self, nu: f64) -> usize {
        self.len() - self.values.partition_point(|&x| x <= nu)
    }

    /// Observations strictly above `nu`, ascending.
    pub fn exceedances(&self, nu: f64) -> &[f64] {
        &self.values[self.values.partition_point(|&x| x <= nu)..]
    }

    /// Rescales every value by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be > 0, got {c}")));
        }
        Ok(SortedSample { values: self.values.iter().map(|x| x * c).collect() })
    }

    /// `eB(ν) = x_{n,n}/(n·ν)`.
    pub fn empirical_bound(&self, nu: f64) -> Result<TailBoundReport> {
        check_threshold(nu)?;
        let n = self.len();
        let max = self.maximum();
        Ok(TailBoundReport {
            threshold: nu,
            bound: max / (n as f64 * nu),
            method: BoundMethod::EmpiricalEb,
            inputs: BoundInputs { n: Some(n), maximum: Some(max), ..Default::default() },
            below_maximum: nu < max,
        })
    }

    /// `a·x_{n,n}/(n·ν)` for `a ≥ 1`.
    pub fn scaled_bound(&self, nu: f64, a: f64) -> Result<TailBoundReport> {
        check_threshold(nu)?;
        if !(a.is_finite() && a >= 1.0) {
            return Err(Error::Domain(format!("scale factor a must be >= 1, got {a}")));
        }
        let n = self.len();
        let max = self.maximum();
        Ok(TailBoundReport {
            threshold: nu,
            bound: a * max / (n as f64 * nu),
            method: BoundMethod::ScaledEb,
            inputs: BoundInputs { n: Some(n), maximum: Some(max), a: Some(a), ..Default::default() },
            below_maximum: nu < max,
        })
    }

    /// `pM_k/ν` with `k` the exceedance count of `ν`. At or above the
    /// maximum no partial mean is estimable and the empirical bound is
    /// returned instead.
    pub fn partial_mean_bound(&self, nu: f64) -> Result<TailBoundReport> {
        check_threshold(nu)?;
        let k = self.count_exceedances(nu);
        if k == 0 {
            return self.empirical_bound(nu);
        }
        let pm = self.partial_mean(k)?;
        Ok(TailBoundReport {
            threshold: nu,
            bound: pm / nu,
            method: BoundMethod::PartialMean,
            inputs: BoundInputs {
                n: Some(self.len()),
                maximum: Some(self.maximum()),
                k: Some(k),
                ..Default::default()
            },
            below_maximum: true,
        })
    }
}

fn check_threshold(nu: f64) -> Result<()> {
    if nu.is_finite() && nu > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("threshold must be finite and > 0, got {nu}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    EmpiricalEb,
    ScaledEb,
    PartialMean,
    ImprovedMarkov,
    TraditionalMarkov,
    MomentMarkov,
}

impl BoundMethod {
    pub fn tag(self) -> &'static str {
        match self {
            BoundMethod::EmpiricalEb => "empirical-eB",
            BoundMethod::ScaledEb => "scaled-eB",
            BoundMethod::PartialMean => "partial-mean",
            BoundMethod::ImprovedMarkov => "improved-markov",
            BoundMethod::TraditionalMarkov => "traditional-markov",
            BoundMethod::MomentMarkov => "moment-markov",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BoundInputs {
    pub n: Option<usize>,
    pub maximum: Option<f64>,
    pub k: Option<usize>,
    pub a: Option<f64>,
}

/// A tail bound with the method and inputs that produced it.
///
/// Values above 1 are kept as computed; they are simply uninformative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBoundReport {
    pub threshold: f64,
    pub bound: f64,
    pub method: BoundMethod,
    pub inputs: BoundInputs,
    /// Set when an empirical bound is evaluated below the sample maximum,
    /// outside the range `ν ≥ x_{n,n}` it is derived for.
    pub below_maximum: bool,
}

impl TailBoundReport {
    /// Wraps a bound computed analytically from a distribution.
    pub fn analytic(method: BoundMethod, threshold: f64, bound: f64, k: Option<usize>) -> Self {
        TailBoundReport {
            threshold,
            bound,
            method,
            inputs: BoundInputs { k, ..Default::default() },
            below_maximum: false,
        }
    }
}

fn check_count(n: usize) -> Result<f64> {
    if n == 0 {
        Err(Error::Domain("sample size must be >= 1".into()))
    } else {
        Ok(n as f64)
    }
}

/// `1 − (1 − a/n)ⁿ`: probability that `1 − F(X_{n,n}) < a/n`, i.e. that the
/// scaled bound holds at the maximum.
pub fn coverage_probability(n: usize, a: f64) -> Result<f64> {
    let nf = check_count(n)?;
    if !(a > 0.0 && a < nf) {
        return Err(Error::Domain(format!("a must lie in (0, {n}), got {a}")));
    }
    Ok(-(nf * (-a / nf).ln_1p()).exp_m1())
}

/// `1 − e^{−a}`, the large-sample limit of [`coverage_probability`].
pub fn coverage_limit(a: f64) -> f64 {
    -(-a).exp_m1()
}

/// `Pr{F(X_{n,n}) ≤ x} = xⁿ`, whatever the (continuous) distribution.
pub fn max_cdf_value_distribution(n: usize, x: f64) -> Result<f64> {
    check_count(n)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x must lie in (0, 1), got {x}")));
    }
    Ok(x.powi(n as i32))
}

/// `E[F(X_{r,n})] = r/(n + 1)`.
pub fn expected_order_statistic_cdf(r: usize, n: usize) -> Result<f64> {
    check_count(n)?;
    if r == 0 || r > n {
        return Err(Error::Domain(format!("r must lie in 1..={n}, got {r}")));
    }
    Ok(r as f64 / (n as f64 + 1.0))
}

/// Classical first approximation `Pr{X > X_{n,n}} ≈ 1/(n + 1)`.
pub fn np_max_probability(n: usize) -> f64 {
    1.0 / (n as f64 + 1.0)
}

/// The three statements tied to `q₁ = Q(1 − 1/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Q1Check {
    /// `x_{n,n} ≥ q₁`.
    pub max_exceeds_q1: bool,
    /// `1 − F(x_{n,n}) ≤ 1/n`.
    pub ineq_at_max: bool,
    /// `1 − F(q₁) ≤ eB(q₁)`.
    pub ineq_at_q1: bool,
}

impl Q1Check {
    pub fn consistent(&self) -> bool {
        self.max_exceeds_q1 == self.ineq_at_max && self.ineq_at_max == self.ineq_at_q1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Q1Report {
    pub n: usize,
    pub q1: f64,
    pub maximum: f64,
    pub flags: Q1Check,
}

/// Evaluates the three equivalent claims at `q₁` for a sample under a
/// reference law.
pub fn q1_equivalence_check<T: TailFunction + ?Sized>(sample: &SortedSample, law: &T) -> Result<Q1Report> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::InsufficientData("q1 check needs n >= 2".into()));
    }
    let nf = n as f64;
    let q1 = law.inverse_tail(1.0 / nf);
    let max = sample.maximum();
    let flags = Q1Check {
        max_exceeds_q1: max >= q1,
        ineq_at_max: law.tail(max) <= 1.0 / nf,
        ineq_at_q1: law.tail(q1) <= max / (nf * q1),
    };
    Ok(Q1Report { n, q1, maximum: max, flags })
}
