//! Daily closing prices to percent log-returns, loss rankings and the
//! unconditional tail analysis of the losses.

use std::collections::HashSet;
use std::io::Read;

use chrono::{Datelike, NaiveDate};
use serde::Serialize;

use crate::bounds::{q1_equivalence_check, BoundInputs, BoundMethod, Q1Report, SortedSample, TailBoundReport};
use crate::dists::TailFunction;
use crate::error::{Error, Result};
use crate::evtfit::{
    fit_gpd_mle_at, return_period, select_threshold_clauset, select_threshold_cv, CandidatePolicy, CvOptions, CvPolicy,
    ExceedanceModel, GpdFit, ThresholdScan,
};
use crate::special::std_normal_cdf;
use crate::table::{fmt_opt, fmt_sig, Table};

pub const TRADING_DAYS_PER_YEAR: f64 = 250.0;
pub const PRICE_HEADER: &str = "date,close";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceSeries {
    pub entries: Vec<(NaiveDate, f64)>,
}

/// Reads a `date,close` CSV (ISO dates, LF or CRLF). Rows may come in any
/// order; the result is sorted by date.
pub fn load_prices<R: Read>(mut source: R) -> Result<PriceSeries> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim_start_matches('\u{feff}').trim().eq_ignore_ascii_case(PRICE_HEADER) => {}
        Some((i, h)) => {
            return Err(Error::Parse { line: i + 1, message: format!("expected header `{PRICE_HEADER}`, got `{h}`") })
        }
        None => return Err(Error::Parse { line: 1, message: format!("missing header `{PRICE_HEADER}`") }),
    }
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in lines {
        let line = i + 1;
        let err = |message: String| Error::Parse { line, message };
        let mut fields = raw.trim().split(',');
        let (Some(d), Some(c), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err(format!("expected 2 fields, got `{raw}`")));
        };
        let date = NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").map_err(|e| err(format!("bad date `{d}`: {e}")))?;
        let close: f64 = c.trim().parse().map_err(|_| err(format!("bad close `{c}`")))?;
        if !(close.is_finite() && close > 0.0) {
            return Err(err(format!("close must be > 0, got {close}")));
        }
        if !seen.insert(date) {
            return Err(err(format!("duplicate date {date}")));
        }
        entries.push((date, close));
    }
    if entries.len() < 2 {
        return Err(Error::InsufficientData(format!("need >= 2 prices, got {}", entries.len())));
    }
    entries.sort_by_key(|e| e.0);
    Ok(PriceSeries { entries })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SignCounts {
    pub total: usize,
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Dated daily returns in percent, `R_t = 100·ln(S_t/S_{t−1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnsSeries {
    pub entries: Vec<(NaiveDate, f64)>,
    pub counts: SignCounts,
}

pub fn log_returns(prices: &PriceSeries) -> ReturnsSeries {
    let entries: Vec<(NaiveDate, f64)> =
        prices.entries.windows(2).map(|w| (w[1].0, 100.0 * (w[1].1 / w[0].1).ln())).collect();
    let mut counts = SignCounts { total: entries.len(), ..Default::default() };
    for &(_, r) in &entries {
        if r > 0.0 {
            counts.positive += 1;
        } else if r < 0.0 {
            counts.negative += 1;
        } else {
            counts.zero += 1;
        }
    }
    ReturnsSeries { entries, counts }
}

impl ReturnsSeries {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.1)
    }

    /// Sign-flipped negative returns, ascending.
    pub fn negative_losses(&self) -> Result<SortedSample> {
        SortedSample::new(self.values().filter(|&r| r < 0.0).map(|r| -r).collect())
    }

    /// `x_max/(n_total·ν)`: the eB bound on the losses times the fraction of
    /// losses among all returns.
    pub fn unconditional_bound(&self, nu: f64) -> Result<TailBoundReport> {
        let losses = self.negative_losses()?;
        let n = self.counts.total;
        let max = losses.maximum();
        let conditional = losses.empirical_bound(nu)?;
        Ok(TailBoundReport {
            threshold: nu,
            bound: max / (n as f64 * nu),
            method: BoundMethod::EmpiricalEb,
            inputs: BoundInputs { n: Some(n), maximum: Some(max), ..Default::default() },
            below_maximum: conditional.below_maximum,
        })
    }

    /// Conditional eB on the losses times `n_losses/n_total`; the same number
    /// as [`Self::unconditional_bound`] up to rounding.
    pub fn unconditional_bound_via_fraction(&self, nu: f64) -> Result<f64> {
        let losses = self.negative_losses()?;
        let frac = losses.len() as f64 / self.counts.total as f64;
        Ok(losses.empirical_bound(nu)?.bound * frac)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Daily,
    Monthly,
    Yearly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossRow {
    pub rank: usize,
    /// The loss day for daily rows; the period's last trading day otherwise.
    pub date: NaiveDate,
    /// Day the loss occurred.
    pub event_date: NaiveDate,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossTable {
    pub granularity: Granularity,
    pub rows: Vec<LossRow>,
}

impl LossTable {
    /// Columns: rank, date, loss.
    pub fn table(&self, digits: usize) -> Table {
        let mut t = Table::new(["rank", "date", "loss"]);
        for r in &self.rows {
            t.push(vec![r.rank.to_string(), r.date.to_string(), fmt_sig(r.loss, digits)]);
        }
        t
    }
}

/// Top-`k` losses, either by day or as the worst day of each month or year.
/// Ties go to the earlier date.
pub fn largest_losses(returns: &ReturnsSeries, granularity: Granularity, k: usize) -> LossTable {
    let period = |d: NaiveDate| -> (i32, u32) {
        match granularity {
            Granularity::Daily => (d.year(), d.ordinal()),
            Granularity::Monthly => (d.year(), d.month()),
            Granularity::Yearly => (d.year(), 0),
        }
    };
    // (period end, event date, loss) per period, in date order
    let mut periods: Vec<(NaiveDate, NaiveDate, f64)> = Vec::new();
    // (period key, last trading day, worst day so far)
    type Open = ((i32, u32), NaiveDate, Option<(NaiveDate, f64)>);
    let mut current: Option<Open> = None;
    let mut flush = |c: Option<Open>| {
        if let Some((_, end, Some((ev, loss)))) = c {
            periods.push((end, ev, loss));
        }
    };
    for &(d, r) in &returns.entries {
        let key = period(d);
        if current.as_ref().map_or(true, |c| c.0 != key) {
            flush(current.take());
            current = Some((key, d, None));
        }
        let c = current.as_mut().expect("period set above");
        c.1 = d;
        if r < 0.0 && c.2.map_or(true, |(_, l)| -r > l) {
            c.2 = Some((d, -r));
        }
    }
    flush(current);
    periods.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.1.cmp(&b.1)));
    let rows = periods
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, (end, ev, loss))| LossRow { rank: i + 1, date: end, event_date: ev, loss })
        .collect();
    LossTable { granularity, rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianRefutation {
    pub loss_threshold: f64,
    pub mu_hat: f64,
    pub sigma_hat: f64,
    /// `Φ((−threshold − μ̂)/σ̂)`.
    pub prob: f64,
    pub return_period_years: f64,
}

/// Normal fit by sample mean and standard deviation (`n − 1`), and the
/// implied chance of a daily loss beyond `loss_threshold` percent.
pub fn gaussian_refutation(returns: &ReturnsSeries, loss_threshold: f64) -> Result<GaussianRefutation> {
    let n = returns.entries.len();
    if n < 2 {
        return Err(Error::InsufficientData("need >= 2 returns".into()));
    }
    let nf = n as f64;
    let mu_hat = returns.values().sum::<f64>() / nf;
    let var = returns.values().map(|r| (r - mu_hat).powi(2)).sum::<f64>() / (nf - 1.0);
    let sigma_hat = var.sqrt();
    if !(sigma_hat > 0.0) {
        return Err(Error::Degenerate("returns have zero variance".into()));
    }
    let prob = std_normal_cdf((-loss_threshold - mu_hat) / sigma_hat);
    let return_period_years = if prob > 0.0 { 1.0 / (prob * TRADING_DAYS_PER_YEAR) } else { f64::INFINITY };
    Ok(GaussianRefutation { loss_threshold, mu_hat, sigma_hat, prob, return_period_years })
}

/// How the threshold of an LPD model is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelSpec {
    Threshold(f64),
    Clauset,
    CvLowest,
    CvBest,
}

impl ModelSpec {
    pub fn tag(&self) -> String {
        match self {
            ModelSpec::Threshold(mu) => format!("mu={mu}"),
            ModelSpec::Clauset => "clauset".into(),
            ModelSpec::CvLowest => "cv-lowest".into(),
            ModelSpec::CvBest => "cv-best".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpdModel {
    pub label: String,
    pub spec: ModelSpec,
    pub fit: GpdFit,
    /// Exceedances of `μ` over the number of losses.
    pub loss_fraction: f64,
    /// Exceedances of `μ` over all returns.
    pub fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ThresholdScan>,
}

impl LpdModel {
    /// Unconditional `Pr{R < −ν}`.
    pub fn probability(&self, nu: f64) -> f64 {
        self.fraction * self.fit.conditional_tail(nu)
    }

    /// The model for the loss distribution alone.
    pub fn loss_model(&self) -> ExceedanceModel {
        ExceedanceModel { fit: self.fit, fraction: self.loss_fraction }
    }
}

/// Fits one LPD per spec to the losses; the GPD MLE is always used for
/// `(ξ, β)`, whichever rule picked `μ`.
pub fn fit_lpd_models(returns: &ReturnsSeries, specs: &[ModelSpec], seed: u64) -> Result<Vec<LpdModel>> {
    let losses = returns.negative_losses()?;
    let n_total = returns.counts.total as f64;
    specs
        .iter()
        .enumerate()
        .map(|(i, &spec)| {
            let (mu, scan) = match spec {
                ModelSpec::Threshold(mu) => (mu, None),
                ModelSpec::Clauset => pick(select_threshold_clauset(&losses, &CandidatePolicy::default())?)?,
                ModelSpec::CvLowest => {
                    pick(select_threshold_cv(&losses, &CvOptions::new(CvPolicy::LowestPass, seed))?)?
                }
                ModelSpec::CvBest => pick(select_threshold_cv(&losses, &CvOptions::new(CvPolicy::BestPass, seed))?)?,
            };
            let y: Vec<f64> = losses.exceedances(mu).iter().map(|x| x - mu).collect();
            let fit = fit_gpd_mle_at(&y, mu)?;
            Ok(LpdModel {
                label: format!("lpd{}", i + 1),
                spec,
                fit,
                loss_fraction: y.len() as f64 / losses.len() as f64,
                fraction: y.len() as f64 / n_total,
                scan,
            })
        })
        .collect()
}

fn pick(scan: ThresholdScan) -> Result<(f64, Option<ThresholdScan>)> {
    match scan.selected_candidate() {
        Some(c) => Ok((c.mu, Some(scan))),
        None => Err(Error::NonConvergence(format!("{} scan found no acceptable threshold", scan.method.tag()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub threshold: f64,
    pub probability: f64,
    /// `probability · n_total`.
    pub expected_count: f64,
    pub return_period: Option<f64>,
}

impl ThresholdRow {
    fn new(threshold: f64, probability: f64, n_total: usize) -> Self {
        ThresholdRow {
            threshold,
            probability,
            expected_count: probability * n_total as f64,
            return_period: return_period(probability, TRADING_DAYS_PER_YEAR).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub model: LpdModel,
    pub rows: Vec<ThresholdRow>,
    /// `q₁` of the fitted loss law against the observed losses.
    pub q1: Q1Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub counts: SignCounts,
    pub n_losses: usize,
    pub max_loss: f64,
    pub second_loss: Option<f64>,
    pub bound: Vec<ThresholdRow>,
    pub empirical: Vec<ThresholdRow>,
    pub models: Vec<ModelReport>,
    pub gaussian: GaussianRefutation,
}

impl AnalysisReport {
    /// Columns: method, threshold, probability, expected_count, return_period.
    pub fn table(&self, digits: usize) -> Table {
        let mut t = Table::new(["method", "threshold", "probability", "expected_count", "return_period"]);
        let mut emit = |name: &str, rows: &[ThresholdRow]| {
            for r in rows {
                t.push(vec![
                    name.to_string(),
                    fmt_sig(r.threshold, digits),
                    fmt_sig(r.probability, digits),
                    fmt_sig(r.expected_count, digits),
                    fmt_opt(r.return_period, digits),
                ]);
            }
        };
        emit("eB", &self.bound);
        emit("empirical", &self.empirical);
        for m in &self.models {
            emit(&m.model.label, &m.rows);
        }
        t
    }

    /// Columns: model, mu, n_exceed, alpha, beta, xi, q1, max_loss,
    /// max_exceeds_q1, ineq_at_max, ineq_at_q1.
    pub fn model_table(&self, digits: usize) -> Table {
        let mut t = Table::new([
            "model",
            "selector",
            "mu",
            "n_exceed",
            "alpha",
            "beta",
            "xi",
            "q1",
            "max_loss",
            "max_exceeds_q1",
            "ineq_at_max",
            "ineq_at_q1",
        ]);
        for m in &self.models {
            let f = &m.model.fit;
            let fl = m.q1.flags;
            t.push(vec![
                m.model.label.clone(),
                m.model.spec.tag(),
                fmt_sig(f.mu, digits),
                f.n_exceed.to_string(),
                fmt_sig(f.alpha, digits),
                fmt_sig(f.beta, digits),
                fmt_sig(f.xi, digits),
                fmt_sig(m.q1.q1, digits),
                fmt_sig(m.q1.maximum, digits),
                fl.max_exceeds_q1.to_string(),
                fl.ineq_at_max.to_string(),
                fl.ineq_at_q1.to_string(),
            ]);
        }
        t
    }
}

/// Loss threshold used for the normal-model comparison.
pub const GAUSSIAN_LOSS_THRESHOLD: f64 = 10.0;

/// eB bound, observed frequencies and each LPD model at every threshold.
pub fn full_analysis(returns: &ReturnsSeries, thresholds: &[f64], models: Vec<LpdModel>) -> Result<AnalysisReport> {
    let losses = returns.negative_losses()?;
    let n = returns.counts.total;
    let bound = thresholds
        .iter()
        .map(|&nu| Ok(ThresholdRow::new(nu, returns.unconditional_bound(nu)?.bound, n)))
        .collect::<Result<Vec<_>>>()?;
    let empirical =
        thresholds.iter().map(|&nu| ThresholdRow::new(nu, losses.count_exceedances(nu) as f64 / n as f64, n)).collect();
    let models = models
        .into_iter()
        .map(|model| {
            let rows = thresholds.iter().map(|&nu| ThresholdRow::new(nu, model.probability(nu), n)).collect();
            let q1 = q1_equivalence_check(&losses, &model.loss_model())?;
            Ok(ModelReport { model, rows, q1 })
        })
        .collect::<Result<Vec<_>>>()?;
    let len = losses.len();
    Ok(AnalysisReport {
        counts: returns.counts,
        n_losses: len,
        max_loss: losses.maximum(),
        second_loss: if len >= 2 { losses.order_statistic(len - 1) } else { None },
        bound,
        empirical,
        models,
        gaussian: gaussian_refutation(returns, GAUSSIAN_LOSS_THRESHOLD)?,
    })
}

/// Plot data for the loss tail on a regular `ν` grid: the empirical step
/// function, each model, and the eB curve (blank below the second-largest
/// loss). All columns are unconditional probabilities.
pub fn emit_tail_plot_data(
    returns: &ReturnsSeries,
    models: &[LpdModel],
    nu_min: f64,
    nu_max: f64,
    points: usize,
    digits: usize,
) -> Result<Table> {
    if !(nu_min > 0.0 && nu_max > nu_min && points >= 2) {
        return Err(Error::InvalidParameter("need 0 < nu_min < nu_max and >= 2 points".into()));
    }
    let losses = returns.negative_losses()?;
    let n = returns.counts.total as f64;
    let anchor = if losses.len() >= 2 { losses.order_statistic(losses.len() - 1).unwrap_or(0.0) } else { 0.0 };
    let mut cols = vec!["nu".to_string(), "empirical".to_string()];
    cols.extend(models.iter().map(|m| m.label.clone()));
    cols.push("eb".into());
    let mut t = Table::new(cols);
    for i in 0..points {
        let nu = nu_min + (nu_max - nu_min) * i as f64 / (points - 1) as f64;
        let mut row = vec![fmt_sig(nu, digits), fmt_sig(losses.count_exceedances(nu) as f64 / n, digits)];
        row.extend(models.iter().map(|m| fmt_sig(m.probability(nu), digits)));
        row.push(if nu >= anchor { fmt_sig(returns.unconditional_bound(nu)?.bound, digits) } else { String::new() });
        t.push(row);
    }
    Ok(t)
}

/// `q₁` of an exceedance model for a loss sample of size `n` (tail `1/n`).
pub fn model_q1(model: &LpdModel, n: usize) -> f64 {
    model.loss_model().inverse_tail(1.0 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn series(closes: &[f64]) -> ReturnsSeries {
        let start = d("2021-01-01");
        let entries = closes.iter().enumerate().map(|(i, &c)| (start + chrono::Days::new(i as u64), c)).collect();
        log_returns(&PriceSeries { entries })
    }

    #[test]
    fn load_examples() {
        let p = load_prices("date,close\n2020-01-02,100\n2020-01-03,100\n".as_bytes()).unwrap();
        let r = log_returns(&p);
        assert_eq!(r.entries, vec![(d("2020-01-03"), 0.0)]);
        assert_eq!(r.counts, SignCounts { total: 1, positive: 0, negative: 0, zero: 1 });

        let crlf = "\u{feff}date,close\r\n2020-01-03,50\r\n\r\n2020-01-02,25\r\n";
        let p = load_prices(crlf.as_bytes()).unwrap();
        assert_eq!(p.entries[0], (d("2020-01-02"), 25.0));
        assert!((log_returns(&p).entries[0].1 - 100.0 * 2f64.ln()).abs() < 1e-12);

        match load_prices("2020-01-02,1\n2020-01-03,2\n".as_bytes()) {
            Err(Error::Parse { line: 1, message }) => assert!(message.contains("date,close")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            load_prices("date,close\n2020-01-02,1\n2020-01-03,0\n".as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            load_prices("date,close\n2020-01-02,1\n2020-01-02,2\n".as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(load_prices("date,close\n2020-13-02,1\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(load_prices("date,close\n2020-01-02,1\n".as_bytes()).is_err());
    }

    #[test]
    fn constant_prices_give_zero_returns() {
        let r = series(&[5.0; 6]);
        assert_eq!(r.counts.zero, 5);
        assert!(r.negative_losses().is_err());
    }

    #[test]
    fn unconditional_forms_agree() {
        let r = series(&[100.0, 98.0, 99.0, 90.0, 95.0, 95.0, 94.0]);
        assert_eq!(r.counts, SignCounts { total: 6, positive: 2, negative: 3, zero: 1 });
        let losses = r.negative_losses().unwrap();
        assert!(losses.values().iter().all(|&v| v > 0.0));
        for &nu in &[5.0, 10.0, 20.0] {
            let a = r.unconditional_bound(nu).unwrap().bound;
            let b = r.unconditional_bound_via_fraction(nu).unwrap();
            assert!((a / b - 1.0).abs() < 1e-15);
            assert!((a * nu - losses.maximum() / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_tables() {
        // Jan: -1%, -3.05%; Feb: -2%; Mar: the same -3.05% ratio, later
        let start = d("2021-01-04");
        let days = [
            ("2021-01-04", 100.0),
            ("2021-01-05", 99.0),
            ("2021-01-06", 96.03),
            ("2021-01-29", 96.03),
            ("2021-02-01", 94.1094),
            ("2021-02-26", 99.0),
            ("2021-03-01", 96.03),
            ("2021-03-31", 96.5),
        ];
        let entries = days.iter().map(|&(s, c)| (d(s), c)).collect();
        let r = log_returns(&PriceSeries { entries });
        assert_eq!(r.entries[0].0, start.succ_opt().unwrap());
        let daily = largest_losses(&r, Granularity::Daily, 2);
        assert_eq!(daily.rows.len(), 2);
        assert_eq!(daily.rows[0].date, d("2021-01-06"));
        assert_eq!(daily.rows[1].date, d("2021-03-01"));
        let monthly = largest_losses(&r, Granularity::Monthly, 10);
        assert_eq!(monthly.rows.len(), 3);
        assert_eq!(monthly.rows[0].date, d("2021-01-29"));
        assert_eq!(monthly.rows[0].event_date, d("2021-01-06"));
        assert_eq!(monthly.rows[1].date, d("2021-03-31"));
        assert_eq!(monthly.rows[2].date, d("2021-02-26"));
        assert!(monthly.rows.windows(2).all(|w| w[0].loss >= w[1].loss));
        let yearly = largest_losses(&r, Granularity::Yearly, 5);
        assert_eq!(yearly.rows.len(), 1);
        assert_eq!(yearly.rows[0].date, d("2021-03-31"));
        assert_eq!(yearly.rows[0].loss, daily.rows[0].loss);
    }

    #[test]
    fn gaussian_symmetric() {
        let r = series(&[100.0, 110.0, 100.0, 110.0, 100.0]);
        let g = gaussian_refutation(&r, 0.0).unwrap();
        assert!(g.mu_hat.abs() < 1e-12);
        assert!((g.prob - 0.5).abs() < 1e-12);
        assert!((g.return_period_years - 1.0 / 125.0).abs() < 1e-12);
    }

    #[test]
    fn analysis_counts() {
        let closes: Vec<f64> = (0..400).map(|i| 100.0 * (1.0 + 0.05 * ((i * 7919 % 97) as f64 / 97.0 - 0.5))).collect();
        let r = series(&closes);
        let models = fit_lpd_models(&r, &[ModelSpec::Threshold(0.0), ModelSpec::Threshold(1.0)], 1).unwrap();
        let rep = full_analysis(&r, &[1.0, 3.0], models.clone()).unwrap();
        for m in &rep.models {
            for row in &m.rows {
                assert_eq!(row.expected_count, row.probability * r.counts.total as f64);
                if row.probability > 0.0 {
                    assert!((row.expected_count / row.probability - r.counts.total as f64).abs() < 1e-9);
                }
            }
        }
        let plot = emit_tail_plot_data(&r, &models, 0.5, 6.0, 12, 4).unwrap();
        assert_eq!(plot.columns, vec!["nu", "empirical", "lpd1", "lpd2", "eb"]);
        assert_eq!(plot.rows[0][4], "");
    }
}
