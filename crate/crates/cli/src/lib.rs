//! Command-line front end for `tailbound`.
//!
//! [`run`] takes the argument vector and two sinks so the whole CLI can be
//! driven from tests. Data goes to `out`, diagnostics to `err`.

use std::fs::File;
use std::io::{self, Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use tailbound::bounds::SortedSample;
use tailbound::dists::{DistributionSpec, Moment};
use tailbound::evtfit::{
    fit_gpd_mle_at, select_threshold_clauset, select_threshold_cv, CandidatePolicy, CvOptions, CvPolicy,
};
use tailbound::montecarlo::{self, SimulationConfig, DEFAULT_REPLICATES, DEFAULT_SEED};
use tailbound::returns::{
    emit_tail_plot_data, fit_lpd_models, full_analysis, largest_losses, load_prices, log_returns, Granularity,
    ModelSpec, ReturnsSeries, PRICE_HEADER, TRADING_DAYS_PER_YEAR,
};
use tailbound::table::{fmt_opt, fmt_sig, Table};
use tailbound::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "tailbound", version, about = "Tail probability bounds from the sample maximum")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Monte Carlo replicates.
    #[arg(long, global = true, default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,
    /// Significant digits in tabular output.
    #[arg(long, global = true, default_value_t = 4)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Tsv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a distribution and its Markov-type bounds.
    Dist(DistArgs),
    /// Empirical bounds on a sample or on the losses of a price file.
    Bound(BoundArgs),
    /// Monte Carlo study of the sample maximum.
    Simulate(SimulateArgs),
    /// Threshold scan and GPD fit.
    Fit(FitArgs),
    /// Full returns pipeline on a `date,close` file.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Exponential,
    HalfNormal,
    Pareto,
    LocationPareto,
}

#[derive(Debug, Args)]
struct SpecArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    alpha: Option<f64>,
    /// Pareto minimum (default 1) or LPD location (default 0).
    #[arg(long)]
    mu: Option<f64>,
    /// Half-normal scale; defaults to the unit-mean value sqrt(pi/2).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Debug, Args)]
struct DistArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Thresholds, comma separated.
    #[arg(long, value_delimiter = ',')]
    at: Vec<f64>,
    /// Probabilities for quantiles, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Moment order for the moment bound.
    #[arg(long, default_value_t = 2)]
    k: u32,
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// One value per line, or a `date,close` file; `-` reads stdin.
    #[arg(long)]
    input: String,
    #[arg(long, value_delimiter = ',', required = true)]
    nu: Vec<f64>,
    /// Scale factor of the scaled bound.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimTable {
    Table1,
    Table2,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(value_enum)]
    table: SimTable,
    #[command(flatten)]
    spec: SpecArgs,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FitMethod {
    Clauset,
    CvLowest,
    CvBest,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    input: String,
    #[arg(long, value_enum, default_value_t = FitMethod::Clauset)]
    method: FitMethod,
    /// Bootstrap replicates for the CV scans.
    #[arg(long, default_value_t = 500)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0.10)]
    p_threshold: f64,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    prices: String,
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 13.84, 15.0, 20.0])]
    thresholds: Vec<f64>,
    /// Threshold rules: cv-lowest, cv-best, clauset, or a number.
    #[arg(long, value_delimiter = ',', default_values_t = ["cv-lowest".to_string(), "cv-best".to_string(), "clauset".to_string()])]
    models: Vec<String>,
    /// Rows per loss ranking.
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Also write tail plot data (CSV) to this path.
    #[arg(long)]
    emit_plot_data: Option<String>,
    #[arg(long, default_value_t = 400)]
    plot_points: usize,
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit status: 0 ok, 1 data error, 2 usage error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let mut buf = Vec::new();
    let status = match dispatch(&cli, &mut buf) {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(CliError::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    };
    if status == 0 && out.write_all(&buf).and_then(|_| out.flush()).is_err() {
        return 1;
    }
    status
}

fn dispatch(cli: &Cli, out: &mut Vec<u8>) -> CliResult<()> {
    let ctx = Ctx { seed: cli.seed, format: cli.format, digits: cli.precision.max(1) };
    match &cli.command {
        Command::Dist(a) => cmd_dist(&ctx, a, out),
        Command::Bound(a) => cmd_bound(&ctx, a, out),
        Command::Simulate(a) => cmd_simulate(&ctx, cli.replicates, a, out),
        Command::Fit(a) => cmd_fit(&ctx, a, out),
        Command::Analyze(a) => cmd_analyze(&ctx, a, out),
    }
}

struct Ctx {
    seed: u64,
    format: Format,
    digits: usize,
}

impl Ctx {
    fn header(&self, out: &mut Vec<u8>) -> CliResult<()> {
        writeln!(out, "# tailbound {VERSION} seed={}", self.seed)?;
        Ok(())
    }

    /// Writes `sections` as delimited tables, each after a `# name` line.
    fn tables(&self, sections: &[(&str, Table)], out: &mut Vec<u8>) -> CliResult<()> {
        let delim = if self.format == Format::Tsv { b'\t' } else { b',' };
        self.header(out)?;
        for (i, (name, t)) in sections.iter().enumerate() {
            if sections.len() > 1 {
                if i > 0 {
                    writeln!(out)?;
                }
                writeln!(out, "# {name}")?;
            }
            t.write_delimited(&mut *out, delim)?;
        }
        Ok(())
    }

    fn json<T: Serialize>(&self, command: &str, body: &T, out: &mut Vec<u8>) -> CliResult<()> {
        let doc =
            json!({ "tool": "tailbound", "version": VERSION, "seed": self.seed, "command": command, "result": body });
        serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }
}

fn build_spec(a: &SpecArgs) -> CliResult<DistributionSpec> {
    let need_alpha = || a.alpha.ok_or_else(|| CliError::Usage("--alpha is required for this --kind".to_string()));
    let spec = match a.kind {
        Kind::Exponential => DistributionSpec::exponential(a.rate),
        Kind::HalfNormal => match a.sigma {
            Some(s) => DistributionSpec::half_normal(s),
            None => Ok(DistributionSpec::unit_mean_half_normal()),
        },
        Kind::Pareto => DistributionSpec::pareto(need_alpha()?, a.mu.unwrap_or(1.0)),
        Kind::LocationPareto => {
            let delta =
                a.delta.ok_or_else(|| CliError::Usage("--delta is required for --kind location-pareto".into()))?;
            DistributionSpec::location_pareto(need_alpha()?, a.mu.unwrap_or(0.0), delta)
        }
    };
    spec.map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Serialize)]
struct DistRow {
    quantity: &'static str,
    x: Option<f64>,
    value: Option<f64>,
}

/// Infinite moments and undefined bounds print as `inf`.
fn finite_or_inf(r: tailbound::Result<f64>) -> tailbound::Result<f64> {
    match r {
        Err(Error::InfiniteMean { .. }) | Err(Error::InfiniteMoment { .. }) => Ok(f64::INFINITY),
        other => other,
    }
}

fn cmd_dist(ctx: &Ctx, a: &DistArgs, out: &mut Vec<u8>) -> CliResult<()> {
    let spec = build_spec(&a.spec)?;
    let mut rows = Vec::new();
    let mean = match spec.mean()? {
        Moment::Finite(m) => m,
        Moment::Infinite => f64::INFINITY,
    };
    rows.push(DistRow { quantity: "mean", x: None, value: Some(mean) });
    for &x in &a.at {
        rows.push(DistRow { quantity: "pdf", x: Some(x), value: Some(spec.pdf(x)?) });
        rows.push(DistRow { quantity: "cdf", x: Some(x), value: Some(spec.cdf(x)?) });
        rows.push(DistRow { quantity: "tail", x: Some(x), value: Some(spec.tail(x)?) });
        if x > 0.0 {
            let pe = finite_or_inf(spec.partial_expectation(x))?;
            rows.push(DistRow { quantity: "partial_expectation", x: Some(x), value: Some(pe) });
            let bounds: [(&'static str, tailbound::Result<f64>); 4] = [
                ("improved_markov", spec.improved_markov_bound(x)),
                ("traditional_markov", spec.traditional_markov_bound(x)),
                ("moment_markov", spec.moment_markov_bound(x, a.k)),
                ("markov_error", spec.markov_error(x)),
            ];
            for (q, v) in bounds {
                rows.push(DistRow { quantity: q, x: Some(x), value: Some(finite_or_inf(v)?) });
            }
        }
    }
    for &p in &a.p {
        rows.push(DistRow { quantity: "quantile", x: Some(p), value: Some(spec.quantile(p)?) });
    }
    if ctx.format == Format::Json {
        return ctx.json("dist", &json!({ "spec": spec, "k": a.k, "rows": rows }), out);
    }
    let mut t = Table::new(["distribution", "quantity", "x", "value"]);
    for r in &rows {
        t.push(vec![spec.to_string(), r.quantity.into(), fmt_opt(r.x, ctx.digits), fmt_opt(r.value, ctx.digits)]);
    }
    ctx.tables(&[("dist", t)], out)
}

fn read_input(path: &str) -> CliResult<String> {
    let mut s = String::new();
    if path == "-" {
        io::stdin().read_to_string(&mut s)?;
    } else {
        File::open(path).map_err(|e| CliError::Data(Error::Io(format!("{path}: {e}"))))?.read_to_string(&mut s)?;
    }
    Ok(s)
}

fn is_price_file(text: &str) -> bool {
    text.lines()
        .find(|l| !l.trim().is_empty())
        .is_some_and(|l| l.trim_start_matches('\u{feff}').trim().eq_ignore_ascii_case(PRICE_HEADER))
}

enum Input {
    Sample(SortedSample),
    Returns(ReturnsSeries),
}

fn parse_values(text: &str) -> CliResult<SortedSample> {
    let mut v = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let x: f64 =
            l.parse().map_err(|_| Error::Parse { line: i + 1, message: format!("expected a number, got `{l}`") })?;
        v.push(x);
    }
    Ok(SortedSample::new(v)?)
}

fn load_input(path: &str) -> CliResult<Input> {
    let text = read_input(path)?;
    if is_price_file(&text) {
        Ok(Input::Returns(log_returns(&load_prices(text.as_bytes())?)))
    } else {
        Ok(Input::Sample(parse_values(&text)?))
    }
}

fn cmd_bound(ctx: &Ctx, a: &BoundArgs, out: &mut Vec<u8>) -> CliResult<()> {
    let input = load_input(&a.input)?;
    let mut reports = Vec::new();
    let mut periods = Vec::new();
    for &nu in &a.nu {
        match &input {
            Input::Sample(s) => {
                reports.push(s.empirical_bound(nu)?);
                if a.a != 1.0 {
                    reports.push(s.scaled_bound(nu, a.a)?);
                }
                reports.push(s.partial_mean_bound(nu)?);
                periods.extend([None; 3]);
            }
            Input::Returns(r) => {
                let rep = r.unconditional_bound(nu)?;
                periods.push(Some(1.0 / (rep.bound * TRADING_DAYS_PER_YEAR)));
                reports.push(rep);
            }
        }
    }
    if ctx.format == Format::Json {
        return ctx.json("bound", &reports, out);
    }
    let mut t =
        Table::new(["method", "threshold", "bound", "n", "maximum", "k", "a", "below_maximum", "return_period"]);
    let d = ctx.digits;
    for (r, p) in reports.iter().zip(&periods) {
        t.push(vec![
            r.method.tag().into(),
            fmt_sig(r.threshold, d),
            fmt_sig(r.bound, d),
            r.inputs.n.map(|n| n.to_string()).unwrap_or_default(),
            fmt_opt(r.inputs.maximum, d),
            r.inputs.k.map(|k| k.to_string()).unwrap_or_default(),
            fmt_opt(r.inputs.a, d),
            r.below_maximum.to_string(),
            fmt_opt(*p, d),
        ]);
    }
    ctx.tables(&[("bound", t)], out)
}

fn cmd_simulate(ctx: &Ctx, replicates: usize, a: &SimulateArgs, out: &mut Vec<u8>) -> CliResult<()> {
    let spec = build_spec(&a.spec)?;
    let configs: Vec<SimulationConfig> =
        a.n.iter().map(|&n| SimulationConfig::new(spec, n).with_replicates(replicates).with_seed(ctx.seed)).collect();
    for c in &configs {
        c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match a.table {
        SimTable::Table1 => {
            let rows = configs.iter().map(montecarlo::run_table1).collect::<tailbound::Result<Vec<_>>>()?;
            if ctx.format == Format::Json {
                return ctx.json("simulate table1", &rows, out);
            }
            ctx.tables(&[("table1", montecarlo::table1(&rows, ctx.digits))], out)
        }
        SimTable::Table2 => {
            let mut cells = Vec::new();
            for c in &configs {
                cells.extend(montecarlo::run_table2(c)?);
            }
            if ctx.format == Format::Json {
                return ctx.json("simulate table2", &cells, out);
            }
            ctx.tables(&[("table2", montecarlo::table2(&cells, ctx.digits))], out)
        }
    }
}

fn losses_of(input: Input) -> CliResult<SortedSample> {
    match input {
        Input::Sample(s) => Ok(s),
        Input::Returns(r) => Ok(r.negative_losses()?),
    }
}

fn cmd_fit(ctx: &Ctx, a: &FitArgs, out: &mut Vec<u8>) -> CliResult<()> {
    let sample = losses_of(load_input(&a.input)?)?;
    let scan = match a.method {
        FitMethod::Clauset => select_threshold_clauset(&sample, &CandidatePolicy::default())?,
        FitMethod::CvLowest | FitMethod::CvBest => {
            let policy = if a.method == FitMethod::CvLowest { CvPolicy::LowestPass } else { CvPolicy::BestPass };
            let mut opts = CvOptions::new(policy, ctx.seed);
            opts.bootstrap = a.bootstrap;
            opts.p_threshold = a.p_threshold;
            select_threshold_cv(&sample, &opts)?
        }
    };
    let fit = match scan.selected_candidate() {
        Some(c) => {
            let y: Vec<f64> = sample.exceedances(c.mu).iter().map(|x| x - c.mu).collect();
            Some(fit_gpd_mle_at(&y, c.mu)?)
        }
        None => None,
    };
    if ctx.format == Format::Json {
        return ctx.json("fit", &json!({ "scan": scan, "gpd_fit": fit }), out);
    }
    let d = ctx.digits;
    let mut summary = Table::new(["method", "mu", "n_exceed", "xi", "beta", "alpha", "loglik", "at_boundary"]);
    match fit {
        Some(f) => summary.push(vec![
            scan.method.tag().into(),
            fmt_sig(f.mu, d),
            f.n_exceed.to_string(),
            fmt_sig(f.xi, d),
            fmt_sig(f.beta, d),
            fmt_sig(f.alpha, d),
            fmt_sig(f.loglik, d),
            f.at_boundary.to_string(),
        ]),
        None => summary.push(vec![
            scan.method.tag().into(),
            String::new(),
            "0".into(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]),
    }
    ctx.tables(&[("selected", summary), ("scan", scan.table(d))], out)
}

fn parse_models(names: &[String]) -> CliResult<Vec<ModelSpec>> {
    names
        .iter()
        .map(|m| match m.trim() {
            "clauset" => Ok(ModelSpec::Clauset),
            "cv-lowest" => Ok(ModelSpec::CvLowest),
            "cv-best" => Ok(ModelSpec::CvBest),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|mu| mu.is_finite() && *mu >= 0.0)
                .map(ModelSpec::Threshold)
                .ok_or_else(|| CliError::Usage(format!("unknown model `{other}`"))),
        })
        .collect()
}

fn cmd_analyze(ctx: &Ctx, a: &AnalyzeArgs, out: &mut Vec<u8>) -> CliResult<()> {
    let specs = parse_models(&a.models)?;
    if a.thresholds.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(CliError::Usage("thresholds must be > 0".into()));
    }
    let text = read_input(&a.prices)?;
    let returns = log_returns(&load_prices(text.as_bytes())?);
    let models = fit_lpd_models(&returns, &specs, ctx.seed)?;
    if let Some(path) = &a.emit_plot_data {
        let losses = returns.negative_losses()?;
        let hi = (losses.maximum() * 1.5).max(20.0);
        let plot = emit_tail_plot_data(&returns, &models, 0.05, hi, a.plot_points.max(2), ctx.digits.max(6))?;
        let mut f = File::create(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        plot.write_delimited(&mut f, b',')?;
    }
    let report = full_analysis(&returns, &a.thresholds, models)?;
    let tables =
        [Granularity::Daily, Granularity::Monthly, Granularity::Yearly].map(|g| largest_losses(&returns, g, a.top));
    if ctx.format == Format::Json {
        return ctx.json("analyze", &json!({ "report": report, "largest_losses": tables }), out);
    }
    let d = ctx.digits;
    let c = report.counts;
    let g = report.gaussian;
    let mut summary = Table::new(["quantity", "value"]);
    let rows: Vec<(&str, String)> = vec![
        ("n_returns", c.total.to_string()),
        ("positive", c.positive.to_string()),
        ("negative", c.negative.to_string()),
        ("zero", c.zero.to_string()),
        ("max_loss", fmt_sig(report.max_loss, d.max(5))),
        ("second_loss", fmt_opt(report.second_loss, d.max(5))),
        ("gaussian_mu", fmt_sig(g.mu_hat, d)),
        ("gaussian_sigma", fmt_sig(g.sigma_hat, d)),
        ("gaussian_threshold", fmt_sig(g.loss_threshold, d)),
        ("gaussian_prob", fmt_sig(g.prob, d)),
        ("gaussian_return_period", fmt_sig(g.return_period_years, d)),
    ];
    for (k, v) in rows {
        summary.push(vec![k.into(), v]);
    }
    let [daily, monthly, yearly] = tables;
    ctx.tables(
        &[
            ("summary", summary),
            ("largest_daily", daily.table(d.max(5))),
            ("largest_monthly", monthly.table(d.max(5))),
            ("largest_yearly", yearly.table(d.max(5))),
            ("models", report.model_table(d)),
            ("probabilities", report.table(d)),
        ],
        out,
    )
}
