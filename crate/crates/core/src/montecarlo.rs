//! Reproducible simulation of the sample maximum.
//!
//! Each replicate draws an `n`-sample on its own ChaCha8 stream
//! `(base_seed, replicate)`, so serial and parallel runs produce identical
//! maxima in identical order. All summaries reduce over that fixed order.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::coverage_probability;
use crate::dists::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::table::{fmt_sig, Table};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 20_150_101;
pub const DEFAULT_REPLICATES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub spec: DistributionSpec,
    pub n: usize,
    pub replicates: usize,
    pub base_seed: u64,
    pub a_levels: Vec<f64>,
    pub tail_multipliers: Vec<f64>,
}

impl SimulationConfig {
    /// Defaults: 10⁵ replicates, `a ∈ {1, 3, 5}`, multipliers `{1, 0.5, 0.2}`.
    pub fn new(spec: DistributionSpec, n: usize) -> Self {
        SimulationConfig {
            spec,
            n,
            replicates: DEFAULT_REPLICATES,
            base_seed: DEFAULT_SEED,
            a_levels: vec![1.0, 3.0, 5.0],
            tail_multipliers: vec![1.0, 0.5, 0.2],
        }
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("replicates must be >= 1".into()));
        }
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {}", self.n)));
        }
        let nf = self.n as f64;
        if let Some(a) = self.a_levels.iter().find(|&&a| !(a > 0.0 && a < nf)) {
            return Err(Error::InvalidParameter(format!("a-level {a} outside (0, {})", self.n)));
        }
        if let Some(c) = self.tail_multipliers.iter().find(|&&c| !(c > 0.0 && c <= 1.0)) {
            return Err(Error::InvalidParameter(format!("tail multiplier {c} outside (0, 1]")));
        }
        Ok(())
    }
}

/// Sample maxima for `replicates` independent `n`-samples, in replicate order.
pub fn simulate_maxima(spec: &DistributionSpec, n: usize, replicates: usize, base_seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    if n == 0 || replicates == 0 {
        return Err(Error::InvalidParameter("n and replicates must be >= 1".into()));
    }
    Ok((0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(base_seed, r);
            (0..n).map(|_| spec.draw(&mut rng)).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

/// Nearest-rank empirical quantile of an ascending slice.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let len = sorted.len();
    if p <= 0.0 {
        return sorted[0];
    }
    // guard against p·len landing a hair above an integer
    let rank = ((p * len as f64) - 1e-9).ceil().clamp(1.0, len as f64) as usize;
    sorted[rank - 1]
}

/// Six-number summary of the replicate statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub q01: f64,
    pub median: f64,
    pub q99: f64,
    pub max: f64,
    pub mean: f64,
}

impl Summary {
    pub fn from_values(values: &[f64]) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Summary {
            min: sorted[0],
            q01: nearest_rank(&sorted, 0.01),
            median: nearest_rank(&sorted, 0.5),
            q99: nearest_rank(&sorted, 0.99),
            max: sorted[sorted.len() - 1],
            mean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelProbability {
    pub a: f64,
    /// Simulated fraction of replicates with `X_{n,n} > Q(1 − a/n)`.
    pub probability: f64,
    /// `1 − (1 − a/n)ⁿ`.
    pub theoretical: f64,
}

/// One row of the maximum-at-`q₁` table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub spec: DistributionSpec,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    /// `q₁ = Q(1 − 1/n)`.
    pub q1: f64,
    /// Summary of `n·eB(q₁) = X_{n,n}/q₁`.
    pub summary: Summary,
    pub exceedance: Vec<LevelProbability>,
}

/// One cell of the beyond-`q₁` table, for tail multiplier `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table2Cell {
    pub spec: DistributionSpec,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub multiplier: f64,
    /// `1 − c/n`.
    pub probability: f64,
    /// `q_c = Q(1 − c/n)`.
    pub quantile: f64,
    /// Median of `n·eB(q_c) = X_{n,n}/q_c`.
    pub median: f64,
    /// Fraction of replicates with `eB(q_c) ≥ 1 − F(q_c)`, i.e. `X_{n,n}/q_c ≥ c`.
    pub exceed_probability: f64,
}

fn require_finite_mean(spec: &DistributionSpec) -> Result<()> {
    match spec.tail_index() {
        Some(alpha) if alpha <= 1.0 => Err(Error::InfiniteMean { alpha }),
        _ => Ok(()),
    }
}

pub fn run_table1(config: &SimulationConfig) -> Result<Table1Row> {
    config.validate()?;
    require_finite_mean(&config.spec)?;
    let n = config.n;
    let nf = n as f64;
    let q1 = config.spec.quantile(1.0 - 1.0 / nf)?;
    let maxima = simulate_maxima(&config.spec, n, config.replicates, config.base_seed)?;
    let stat: Vec<f64> = maxima.iter().map(|m| m / q1).collect();
    let reps = maxima.len() as f64;
    let exceedance = config
        .a_levels
        .iter()
        .map(|&a| {
            let qa = config.spec.quantile(1.0 - a / nf)?;
            let hits = maxima.iter().filter(|&&m| m > qa).count();
            Ok(LevelProbability { a, probability: hits as f64 / reps, theoretical: coverage_probability(n, a)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1Row {
        spec: config.spec,
        n,
        replicates: config.replicates,
        seed: config.base_seed,
        q1,
        summary: Summary::from_values(&stat),
        exceedance,
    })
}

pub fn run_table2(config: &SimulationConfig) -> Result<Vec<Table2Cell>> {
    config.validate()?;
    require_finite_mean(&config.spec)?;
    let nf = config.n as f64;
    let maxima = simulate_maxima(&config.spec, config.n, config.replicates, config.base_seed)?;
    let reps = maxima.len() as f64;
    config
        .tail_multipliers
        .iter()
        .map(|&c| {
            let probability = 1.0 - c / nf;
            let quantile = config.spec.quantile(probability)?;
            let mut ratios: Vec<f64> = maxima.iter().map(|m| m / quantile).collect();
            let hits = ratios.iter().filter(|&&r| r >= c).count();
            ratios.sort_by(f64::total_cmp);
            Ok(Table2Cell {
                spec: config.spec,
                n: config.n,
                replicates: config.replicates,
                seed: config.base_seed,
                multiplier: c,
                probability,
                quantile,
                median: nearest_rank(&ratios, 0.5),
                exceed_probability: hits as f64 / reps,
            })
        })
        .collect()
}

/// Smallest `n` with `Pr{X_{n,n} > x₀} = 1 − F(x₀)ⁿ ≥ confidence`.
pub fn min_n_for_max_exceeding(spec: &DistributionSpec, x0: f64, confidence: f64) -> Result<u64> {
    let f = spec.cdf(x0)?;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Domain(format!("F(x0) must lie strictly inside (0, 1), got {f}")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Domain(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    let n = ((-confidence).ln_1p() / f.ln()).ceil();
    Ok(n.max(1.0) as u64)
}

/// Simulated `Pr{X_{n,n} > x₀}`.
pub fn simulate_max_exceeding(
    spec: &DistributionSpec,
    x0: f64,
    n: usize,
    replicates: usize,
    base_seed: u64,
) -> Result<f64> {
    let maxima = simulate_maxima(spec, n, replicates, base_seed)?;
    Ok(maxima.iter().filter(|&&m| m > x0).count() as f64 / replicates as f64)
}

/// Simulation cross-check of [`min_n_for_max_exceeding`]: the first `n` in
/// `1..=n_max` whose simulated exceedance frequency reaches `confidence`.
pub fn min_n_by_simulation(
    spec: &DistributionSpec,
    x0: f64,
    confidence: f64,
    replicates: usize,
    base_seed: u64,
    n_max: usize,
) -> Result<Option<usize>> {
    for n in 1..=n_max {
        let seed = base_seed.wrapping_add(n as u64);
        if simulate_max_exceeding(spec, x0, n, replicates, seed)? >= confidence {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Column layout: distribution, n, quantile, min, q0.01, median, q0.99, max,
/// mean, then one `a=<level>` column per a-level.
pub fn table1(rows: &[Table1Row], digits: usize) -> Table {
    let mut columns: Vec<String> = ["distribution", "n", "quantile", "min", "q0.01", "median", "q0.99", "max", "mean"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if let Some(first) = rows.first() {
        columns.extend(first.exceedance.iter().map(|l| format!("a={}", l.a)));
    }
    let mut t = Table { columns, rows: Vec::new() };
    for r in rows {
        let s = &r.summary;
        let mut row = vec![r.spec.to_string(), r.n.to_string(), fmt_sig(r.q1, digits)];
        row.extend([s.min, s.q01, s.median, s.q99, s.max, s.mean].iter().map(|&v| fmt_sig(v, digits)));
        row.extend(r.exceedance.iter().map(|l| fmt_sig(l.probability, digits)));
        t.push(row);
    }
    t
}

/// Column layout: distribution, n, probability, quantile, tail_n_times,
/// median, prob_exceeds.
pub fn table2(cells: &[Table2Cell], digits: usize) -> Table {
    let mut t = Table::new(["distribution", "n", "probability", "quantile", "tail_n_times", "median", "prob_exceeds"]);
    for c in cells {
        t.push(vec![
            c.spec.to_string(),
            c.n.to_string(),
            fmt_sig(c.probability, digits.max(5)),
            fmt_sig(c.quantile, digits),
            fmt_sig(c.multiplier, digits),
            fmt_sig(c.median, digits),
            fmt_sig(c.exceed_probability, digits),
        ]);
    }
    t
}
