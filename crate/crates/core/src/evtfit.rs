//! Peaks-over-threshold fitting: GPD maximum likelihood, the power-law
//! (Hill) estimator, and two automatic threshold-selection scans.
//!
//! Exceedances above a threshold `μ` are `y = x − μ` for `x > μ` strictly.
//! The GPD tail `(1 + ξy/β)^{−1/ξ}` with `ξ > 0` is the location-Pareto law
//! `LPD(1/ξ, μ, β/ξ − μ)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::SortedSample;
use crate::dists::{DistributionSpec, TailFunction};
use crate::error::{Error, Result};
use crate::montecarlo::nearest_rank;
use crate::rng::{open_unit, stream_rng};
use crate::table::{fmt_opt, fmt_sig, Table};

pub const XI_MIN: f64 = -0.99;
pub const XI_MAX: f64 = 10.0;
const XI_TOL: f64 = 1e-8;
const NEWTON_MAX_ITER: usize = 200;

/// Fitted generalized Pareto model for the exceedances of `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GpdFit {
    pub mu: f64,
    pub xi: f64,
    pub beta: f64,
    /// `1/ξ` for `ξ > 0`, otherwise infinite (serialized as `null`).
    pub alpha: f64,
    pub n_exceed: usize,
    pub loglik: f64,
    /// Set when `ξ` ended within `1e−6` of the search interval's ends.
    pub at_boundary: bool,
}

impl GpdFit {
    pub fn new(mu: f64, xi: f64, beta: f64, n_exceed: usize, loglik: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
        }
        if !xi.is_finite() || !mu.is_finite() {
            return Err(Error::InvalidParameter("xi and mu must be finite".into()));
        }
        let alpha = if xi > 0.0 { 1.0 / xi } else { f64::INFINITY };
        Ok(GpdFit { mu, xi, beta, alpha, n_exceed, loglik, at_boundary: false })
    }

    /// `δ = α·β` when `ξ > 0`, the origin shift of the LPD form measured from μ.
    pub fn delta(&self) -> Option<f64> {
        (self.xi > 0.0).then(|| self.beta / self.xi - self.mu)
    }

    /// `Pr{X > ν | X > μ}`.
    pub fn conditional_tail(&self, nu: f64) -> f64 {
        let y = nu - self.mu;
        if y <= 0.0 {
            return 1.0;
        }
        let z = self.xi * y / self.beta;
        if self.xi == 0.0 {
            (-y / self.beta).exp()
        } else if z <= -1.0 {
            0.0
        } else {
            (-z.ln_1p() / self.xi).exp()
        }
    }

    /// The `ν` with conditional tail `q`.
    pub fn conditional_inverse_tail(&self, q: f64) -> f64 {
        if q >= 1.0 {
            return self.mu;
        }
        if q <= 0.0 {
            return if self.xi < 0.0 { self.mu - self.beta / self.xi } else { f64::INFINITY };
        }
        let y = if self.xi == 0.0 { -self.beta * q.ln() } else { self.beta * (-self.xi * q.ln()).exp_m1() / self.xi };
        self.mu + y
    }

    /// The equivalent `LPD(α, μ, δ)`; needs `ξ > 0` and `β/ξ > 0`.
    pub fn to_location_pareto(&self) -> Result<DistributionSpec> {
        match self.delta() {
            Some(delta) => DistributionSpec::location_pareto(self.alpha, self.mu, delta),
            None => Err(Error::Domain(format!("LPD form needs xi > 0, got {}", self.xi))),
        }
    }
}

/// GPD log-likelihood of exceedances `y`; `−∞` outside the support.
pub fn gpd_loglik(y: &[f64], xi: f64, beta: f64) -> f64 {
    if !(beta > 0.0) {
        return f64::NEG_INFINITY;
    }
    let k = y.len() as f64;
    let mut s = 0.0;
    for &v in y {
        let t = v / beta;
        if xi == 0.0 {
            s += t;
        } else {
            let z = xi * t;
            if z <= -1.0 {
                return f64::NEG_INFINITY;
            }
            let l = z.ln_1p();
            s += l / xi + l;
        }
    }
    -k * beta.ln() - s
}

/// Root of `(1+ξ)·Σ y/(β+ξy) = k` in `β`: the profile MLE of the scale.
fn profile_beta(y: &[f64], xi: f64, ymax: f64) -> Result<f64> {
    let k = y.len() as f64;
    if xi == 0.0 {
        return Ok(y.iter().sum::<f64>() / k);
    }
    let h = |b: f64| -> (f64, f64) {
        let mut s = 0.0;
        let mut ds = 0.0;
        for &v in y {
            let d = b + xi * v;
            s += v / d;
            ds += v / (d * d);
        }
        ((1.0 + xi) * s - k, -(1.0 + xi) * ds)
    };
    let floor = (-xi * ymax).max(0.0);
    let mut lo = floor;
    let mut hi = floor + 1.0;
    let mut grow = 0;
    while h(hi).0 > 0.0 {
        lo = hi;
        hi = floor + 2.0 * (hi - floor);
        grow += 1;
        if grow > 200 {
            return Err(Error::NonConvergence(format!("no scale bracket at xi = {xi}")));
        }
    }
    let mut b = 0.5 * (lo + hi);
    for _ in 0..NEWTON_MAX_ITER {
        let (f, df) = h(b);
        if f == 0.0 {
            return Ok(b);
        }
        if f > 0.0 {
            lo = b;
        } else {
            hi = b;
        }
        let newton = b - f / df;
        let next = if newton > lo && newton < hi && df < 0.0 { newton } else { 0.5 * (lo + hi) };
        if (next - b).abs() <= 1e-14 * b.abs() || hi - lo <= 1e-15 * hi {
            return Ok(next);
        }
        b = next;
    }
    Err(Error::NonConvergence(format!("scale solve did not converge at xi = {xi}")))
}

fn xi_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (1..=149).map(|i| -1.0 + 0.02 * i as f64).collect();
    g.extend((0..80).map(|i| 2.1 + 0.1 * i as f64).filter(|&x| x < XI_MAX));
    g.push(9.99);
    g
}

/// Maximum-likelihood GPD fit to exceedances `y > 0`, by profile likelihood
/// over `ξ ∈ (−0.99, 10)`.
pub fn fit_gpd_mle(y: &[f64]) -> Result<GpdFit> {
    fit_gpd_mle_at(y, 0.0)
}

/// [`fit_gpd_mle`] labelled with the threshold `mu` the exceedances came from.
pub fn fit_gpd_mle_at(y: &[f64], mu: f64) -> Result<GpdFit> {
    if y.len() < 2 {
        return Err(Error::InsufficientData(format!("GPD fit needs >= 2 exceedances, got {}", y.len())));
    }
    if let Some(bad) = y.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Domain(format!("exceedances must be finite and > 0, got {bad}")));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::Degenerate("all exceedances are equal".into()));
    }
    // work on y/mean so the optimizer path does not depend on units
    let k = y.len() as f64;
    let scale = y.iter().sum::<f64>() / k;
    let z: Vec<f64> = y.iter().map(|v| v / scale).collect();
    let zmax = z.iter().cloned().fold(0.0, f64::max);

    let profile = |xi: f64| -> Result<(f64, f64)> {
        let b = profile_beta(&z, xi, zmax)?;
        Ok((gpd_loglik(&z, xi, b), b))
    };

    let grid = xi_grid();
    let mut best_i = 0;
    let mut best_l = f64::NEG_INFINITY;
    for (i, &xi) in grid.iter().enumerate() {
        let (l, _) = profile(xi)?;
        if l > best_l {
            best_l = l;
            best_i = i;
        }
    }
    let mut a = if best_i == 0 { XI_MIN } else { grid[best_i - 1] };
    let mut b = if best_i + 1 == grid.len() { XI_MAX } else { grid[best_i + 1] };

    // golden section on the bracketing interval
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = profile(c)?.0;
    let mut fd = profile(d)?.0;
    let mut iters = 0;
    while b - a > XI_TOL {
        iters += 1;
        if iters > 200 {
            return Err(Error::NonConvergence("golden-section search on xi".into()));
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = profile(c)?.0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = profile(d)?.0;
        }
    }
    let mut xi = 0.5 * (a + b);
    let (mut l, mut beta) = profile(xi)?;
    if best_l > l {
        xi = grid[best_i];
        (l, beta) = profile(xi)?;
    }
    let (l0, b0) = profile(0.0)?;
    if l0 >= l {
        xi = 0.0;
        l = l0;
        beta = b0;
    }
    let mut fit = GpdFit::new(mu, xi, beta * scale, y.len(), l - k * scale.ln())?;
    fit.at_boundary = xi - XI_MIN < 1e-6 || XI_MAX - xi < 1e-6;
    Ok(fit)
}

/// Power-law fit above `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HillFit {
    pub mu: f64,
    pub alpha: f64,
    pub n_exceed: usize,
}

impl HillFit {
    /// Power-law cdf `1 − (μ/x)^α` for `x > μ`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.mu {
            0.0
        } else {
            -(self.alpha * (self.mu / x).ln()).exp_m1()
        }
    }

    /// The same law as a GPD on `x − μ`: `ξ = 1/α`, `β = μ/α`.
    pub fn as_gpd(&self, loglik: f64) -> Result<GpdFit> {
        GpdFit::new(self.mu, 1.0 / self.alpha, self.mu / self.alpha, self.n_exceed, loglik)
    }
}

/// Conditional power-law MLE `α = k / Σ_{x>μ} ln(x/μ)`.
pub fn fit_hill(sample: &SortedSample, mu: f64) -> Result<HillFit> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Domain(format!("Hill threshold must be > 0, got {mu}")));
    }
    let ex = sample.exceedances(mu);
    if ex.len() < 2 {
        return Err(Error::InsufficientData(format!("Hill fit needs >= 2 values above {mu}, got {}", ex.len())));
    }
    let s: f64 = ex.iter().map(|x| (x / mu).ln()).sum();
    Ok(HillFit { mu, alpha: ex.len() as f64 / s, n_exceed: ex.len() })
}

/// Kolmogorov–Smirnov distance between the empirical cdf of `data` and `cdf`,
/// checked on both sides of every step.
pub fn ks_distance<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> f64 {
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / k - f).max(f - i as f64 / k)
    })
}

/// Sample coefficient of variation (`n − 1` denominator).
pub fn residual_cv(y: &[f64]) -> Result<f64> {
    if y.len() < 2 {
        return Err(Error::InsufficientData("coefficient of variation needs >= 2 values".into()));
    }
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    if !(mean > 0.0) {
        return Err(Error::Domain(format!("coefficient of variation needs a positive mean, got {mean}")));
    }
    let ss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    Ok((ss / (n - 1.0)).sqrt() / mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMethod {
    ClausetKs,
    CvLowest,
    CvBest,
}

impl ScanMethod {
    pub fn tag(self) -> &'static str {
        match self {
            ScanMethod::ClausetKs => "clauset-ks",
            ScanMethod::CvLowest => "cv-lowest",
            ScanMethod::CvBest => "cv-best",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdCandidate {
    pub mu: f64,
    pub n_exceed: usize,
    /// GPD MLE for the CV scans; the Hill fit in GPD form for Clauset.
    pub fit: GpdFit,
    /// KS distance (Clauset) or residual CV.
    pub statistic: f64,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdScan {
    pub method: ScanMethod,
    pub candidates: Vec<ThresholdCandidate>,
    /// `None` when no candidate qualifies (lowest-pass with no p above the cut).
    pub selected: Option<usize>,
}

impl ThresholdScan {
    pub fn selected_candidate(&self) -> Option<&ThresholdCandidate> {
        self.selected.map(|i| &self.candidates[i])
    }

    /// Columns: mu, n_exceed, xi, beta, alpha, statistic, p_value, selected.
    pub fn table(&self, digits: usize) -> Table {
        let mut t = Table::new(["mu", "n_exceed", "xi", "beta", "alpha", "statistic", "p_value", "selected"]);
        for (i, c) in self.candidates.iter().enumerate() {
            t.push(vec![
                fmt_sig(c.mu, digits),
                c.n_exceed.to_string(),
                fmt_sig(c.fit.xi, digits),
                fmt_sig(c.fit.beta, digits),
                fmt_sig(c.fit.alpha, digits),
                fmt_sig(c.statistic, digits),
                fmt_opt(c.p_value, digits),
                u8::from(self.selected == Some(i)).to_string(),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CandidatePolicy {
    /// Every distinct positive sample value below the top `exclude_top`
    /// order statistics.
    DistinctValues {
        exclude_top: usize,
    },
    Grid(Vec<f64>),
}

impl Default for CandidatePolicy {
    fn default() -> Self {
        CandidatePolicy::DistinctValues { exclude_top: 5 }
    }
}

fn power_law_loglik(sample: &SortedSample, h: &HillFit) -> f64 {
    let ex = sample.exceedances(h.mu);
    let k = ex.len() as f64;
    let slog: f64 = ex.iter().map(|x| x.ln()).sum();
    k * h.alpha.ln() + k * h.alpha * h.mu.ln() - (h.alpha + 1.0) * slog
}

/// Threshold minimizing the KS distance between the exceedances and their
/// fitted power law. Ties go to the smaller threshold.
pub fn select_threshold_clauset(sample: &SortedSample, policy: &CandidatePolicy) -> Result<ThresholdScan> {
    if sample.len() < 10 {
        return Err(Error::InsufficientData(format!("threshold scan needs >= 10 values, got {}", sample.len())));
    }
    let mut mus: Vec<f64> = match policy {
        CandidatePolicy::DistinctValues { exclude_top } => {
            let v = sample.values();
            let upto = v.len().saturating_sub(*exclude_top);
            v[..upto].iter().copied().filter(|&x| x > 0.0).collect()
        }
        CandidatePolicy::Grid(g) => g.iter().copied().filter(|&x| x > 0.0).collect(),
    };
    mus.sort_by(f64::total_cmp);
    mus.dedup();
    let candidates: Vec<ThresholdCandidate> = mus
        .par_iter()
        .filter_map(|&mu| {
            let h = fit_hill(sample, mu).ok()?;
            let ks = ks_distance(sample.exceedances(mu), |x| h.cdf(x));
            let fit = h.as_gpd(power_law_loglik(sample, &h)).ok()?;
            Some(ThresholdCandidate { mu, n_exceed: h.n_exceed, fit, statistic: ks, p_value: None })
        })
        .collect();
    if candidates.is_empty() {
        return Err(Error::InsufficientData("no admissible threshold candidates".into()));
    }
    let mut sel = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.statistic < candidates[sel].statistic {
            sel = i;
        }
    }
    Ok(ThresholdScan { method: ScanMethod::ClausetKs, candidates, selected: Some(sel) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvPolicy {
    /// Smallest threshold whose p-value exceeds the cut.
    LowestPass,
    /// Largest p-value.
    BestPass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOptions {
    pub policy: CvPolicy,
    pub p_threshold: f64,
    /// Sample-quantile probabilities; `0` means threshold `0`.
    pub grid: Vec<f64>,
    pub bootstrap: usize,
    pub seed: u64,
    /// Candidates with fewer exceedances are skipped.
    pub min_exceed: usize,
}

impl CvOptions {
    pub fn new(policy: CvPolicy, seed: u64) -> Self {
        CvOptions {
            policy,
            p_threshold: 0.10,
            grid: (0..=18).map(|i| i as f64 * 0.05).collect(),
            bootstrap: 500,
            seed,
            min_exceed: 5,
        }
    }
}

/// Two-sided parametric-bootstrap p-value of the residual CV under a unit
/// scale GPD with the given `ξ` (the CV does not depend on the scale).
fn cv_bootstrap_p(observed: f64, xi: f64, k: usize, reps: usize, seed: u64, stream_hi: u64) -> f64 {
    let mut ge = 0usize;
    let mut le = 0usize;
    let mut draws = vec![0.0; k];
    for b in 0..reps as u64 {
        let mut rng = stream_rng(seed, (stream_hi << 32) | b);
        for d in draws.iter_mut() {
            let u = open_unit(&mut rng);
            *d = if xi == 0.0 { -u.ln() } else { (-xi * u.ln()).exp_m1() / xi };
        }
        let cv = residual_cv(&draws).unwrap_or(0.0);
        if cv >= observed {
            ge += 1;
        }
        if cv <= observed {
            le += 1;
        }
    }
    let r = reps as f64 + 1.0;
    (2.0 * ((ge as f64 + 1.0) / r).min((le as f64 + 1.0) / r)).min(1.0)
}

/// Residual-CV threshold scan over a grid of sample quantiles.
pub fn select_threshold_cv(sample: &SortedSample, opts: &CvOptions) -> Result<ThresholdScan> {
    if sample.len() < 20 {
        return Err(Error::InsufficientData(format!("CV scan needs >= 20 values, got {}", sample.len())));
    }
    if opts.bootstrap == 0 {
        return Err(Error::InvalidParameter("bootstrap replicates must be >= 1".into()));
    }
    let mut points: Vec<(u64, f64)> = Vec::new();
    for (i, &p) in opts.grid.iter().enumerate() {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("grid probability {p} outside [0, 1)")));
        }
        let mu = if p == 0.0 { 0.0 } else { nearest_rank(sample.values(), p) };
        if points.last().map_or(true, |&(_, last)| mu > last) {
            points.push((i as u64, mu));
        }
    }
    let candidates: Vec<ThresholdCandidate> = points
        .par_iter()
        .filter_map(|&(idx, mu)| {
            let y: Vec<f64> = sample.exceedances(mu).iter().map(|x| x - mu).collect();
            if y.len() < opts.min_exceed.max(2) {
                return None;
            }
            let fit = fit_gpd_mle_at(&y, mu).ok()?;
            let cv = residual_cv(&y).ok()?;
            let p = cv_bootstrap_p(cv, fit.xi, y.len(), opts.bootstrap, opts.seed, idx);
            Some(ThresholdCandidate { mu, n_exceed: y.len(), fit, statistic: cv, p_value: Some(p) })
        })
        .collect();
    if candidates.is_empty() {
        return Err(Error::InsufficientData("no admissible threshold candidates".into()));
    }
    let pv = |c: &ThresholdCandidate| c.p_value.unwrap_or(0.0);
    let (method, selected) = match opts.policy {
        CvPolicy::LowestPass => (ScanMethod::CvLowest, candidates.iter().position(|c| pv(c) > opts.p_threshold)),
        CvPolicy::BestPass => {
            let mut sel = 0;
            for (i, c) in candidates.iter().enumerate() {
                if pv(c) > pv(&candidates[sel]) {
                    sel = i;
                }
            }
            (ScanMethod::CvBest, Some(sel))
        }
    };
    Ok(ThresholdScan { method, candidates, selected })
}

/// Conditional `Pr{X > ν | X > μ}` under the fit.
pub fn lpd_tail_prob(fit: &GpdFit, nu: f64) -> Result<f64> {
    if !(nu >= fit.mu) {
        return Err(Error::Domain(format!("nu = {nu} is below the threshold {}", fit.mu)));
    }
    Ok(fit.conditional_tail(nu))
}

/// Expected waiting time in years for a daily probability.
pub fn return_period(prob: f64, trading_days_per_year: f64) -> Result<f64> {
    if !(prob > 0.0 && prob <= 1.0) {
        return Err(Error::Domain(format!("probability must lie in (0, 1], got {prob}")));
    }
    if !(trading_days_per_year > 0.0) {
        return Err(Error::InvalidParameter("trading days per year must be > 0".into()));
    }
    Ok(1.0 / (prob * trading_days_per_year))
}

/// A fitted exceedance model scaled to the whole sample: `Pr{X > x} =
/// fraction · Pr{X > x | X > μ}` for `x ≥ μ`. Below `μ` the shape is not
/// modelled and the tail is reported as `fraction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceedanceModel {
    pub fit: GpdFit,
    pub fraction: f64,
}

impl ExceedanceModel {
    pub fn new(fit: GpdFit, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Domain(format!("exceedance fraction must lie in (0, 1], got {fraction}")));
        }
        Ok(ExceedanceModel { fit, fraction })
    }
}

impl TailFunction for ExceedanceModel {
    fn tail(&self, x: f64) -> f64 {
        self.fraction * self.fit.conditional_tail(x.max(self.fit.mu))
    }

    fn inverse_tail(&self, q: f64) -> f64 {
        if q >= self.fraction {
            self.fit.mu
        } else {
            self.fit.conditional_inverse_tail(q / self.fraction)
        }
    }
}
