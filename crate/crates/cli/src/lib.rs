//! Command-line front end: argument parsing, the report type, and renderers
//! for JSON, CSV and plain text.

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;
use tailclass_core::float_serde;
use tailclass_core::*;

pub const TOOL: &str = "tailclass";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status when every requested verdict is decided.
pub const EXIT_OK: i32 = 0;
/// Exit status for internal errors.
pub const EXIT_INTERNAL: i32 = 1;
/// Exit status for malformed command lines.
pub const EXIT_USAGE: i32 = 2;
/// Exit status when some requested verdict is inconclusive.
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Header of the CSV written by `convolve`.
pub const CONVOLVE_CSV_HEADER: &str = "x,density,tail,hazard,max_sum_ratio";
/// Header of the CSV written by `pitman`.
pub const PITMAN_CSV_HEADER: &str = "x,kappa,pitman";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Membership in D, E, L, S, A and D∩A, with indices and hazard limits.
    Classify,
    /// Matuszewska indices of the tail, density and hazard rate, and M1/M2.
    Indices,
    /// Density, tail, hazard and max-sum ratio of the convolution of two models.
    Convolve,
    /// Pitman's integral over the grid for each κ, and the Pitman verdict.
    Pitman,
    /// One model: hazard-rate bounds. Two models: convolution closure.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = TOOL, version = VERSION, about = "Tail-class membership tests for distributions on (0, inf)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Args, Debug)]
struct Options {
    /// Model spec such as `pareto:a=2` or `weibull:shape=0.5,scale=1`; repeat for two models.
    #[arg(long = "model", global = true, value_name = "SPEC")]
    models: Vec<String>,
    /// First grid point.
    #[arg(long, global = true)]
    x_start: Option<f64>,
    /// Grid multiplier r > 1.
    #[arg(long, global = true)]
    grid_ratio: Option<f64>,
    /// Number of grid points K.
    #[arg(long, global = true)]
    grid_count: Option<usize>,
    /// Trailing window W used for liminf and limsup.
    #[arg(long, global = true)]
    window: Option<usize>,
    /// Comma-separated u values for the ratio tests.
    #[arg(long, global = true, value_delimiter = ',')]
    u_grid: Option<Vec<f64>>,
    /// Comma-separated κ values for Pitman's integral.
    #[arg(long = "kappa", global = true, value_delimiter = ',')]
    kappas: Option<Vec<f64>>,
    /// Band for ratio-to-limit comparisons.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Relative tolerance of the quadrature.
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Absolute tolerance of the quadrature.
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long = "out", global = true, value_enum, default_value = "json")]
    out: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output_path: Option<PathBuf>,
}

/// Grid settings given on the command line; the rest comes from the model's
/// default grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GridOverrides {
    pub x_start: Option<f64>,
    pub ratio: Option<f64>,
    pub count: Option<usize>,
    pub window: Option<usize>,
}

impl GridOverrides {
    pub fn resolve(&self, model: &dyn DistributionModel) -> GridSpec {
        let d = GridSpec::for_model(model);
        GridSpec {
            x_start: self.x_start.unwrap_or(d.x_start),
            ratio: self.ratio.unwrap_or(d.ratio),
            count: self.count.unwrap_or(d.count),
            window: self.window.unwrap_or(d.window),
        }
    }
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub models: Vec<FamilySpec>,
    pub grid: GridOverrides,
    pub classifier: ClassifierConfig,
    pub output: OutputFormat,
    pub output_path: Option<PathBuf>,
}

/// Why a command line was rejected.
#[derive(Debug, Clone, PartialEq)]
pub enum UsageError {
    /// `--help` or `--version`; not an error, but parsing stops.
    Info(String),
    Invalid { message: String, token: Option<String> },
}

impl UsageError {
    fn invalid(message: impl Into<String>, token: Option<&str>) -> Self {
        UsageError::Invalid {
            message: message.into(),
            token: token.map(str::to_string),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            UsageError::Info(_) => EXIT_OK,
            UsageError::Invalid { .. } => EXIT_USAGE,
        }
    }

    /// The argument that caused the error, when one can be singled out.
    pub fn token(&self) -> Option<&str> {
        match self {
            UsageError::Info(_) => None,
            UsageError::Invalid { token, .. } => token.as_deref(),
        }
    }
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UsageError::Info(text) => f.write_str(text),
            UsageError::Invalid { message, .. } => f.write_str(message),
        }
    }
}

impl std::error::Error for UsageError {}

fn clap_token(err: &clap::Error) -> Option<String> {
    [ContextKind::InvalidValue, ContextKind::InvalidArg, ContextKind::InvalidSubcommand]
        .into_iter()
        .find_map(|kind| match err.get(kind) {
            Some(ContextValue::String(s)) => Some(s.clone()),
            Some(ContextValue::Strings(v)) => v.first().cloned(),
            _ => None,
        })
}

/// Parses a command line, program name excluded.
pub fn parse_config<I, S>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args = std::iter::once(TOOL.to_string()).chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            UsageError::Info(e.render().to_string())
        }
        _ => UsageError::Invalid {
            message: e.render().to_string(),
            token: clap_token(&e),
        },
    })?;
    let o = cli.options;

    let models = o
        .models
        .iter()
        .map(|s| {
            s.parse::<FamilySpec>()
                .and_then(|spec| spec.validate().map(|_| spec))
                .map_err(|e| UsageError::invalid(format!("invalid --model `{s}`: {e}"), Some(s)))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let wanted = match cli.command {
        Command::Convolve => 2..=2,
        Command::Verify => 1..=2,
        _ => 1..=1,
    };
    if !wanted.contains(&models.len()) {
        let n = if wanted.start() == wanted.end() {
            format!("exactly {}", wanted.start())
        } else {
            format!("{} or {}", wanted.start(), wanted.end())
        };
        return Err(UsageError::invalid(
            format!("`{:?}` takes {n} --model, got {}", cli.command, models.len()).to_lowercase(),
            None,
        ));
    }
    if o.out == OutputFormat::Csv && !matches!(cli.command, Command::Convolve | Command::Pitman) {
        return Err(UsageError::invalid(
            "CSV output is only available for convolve and pitman",
            Some("csv"),
        ));
    }

    let mut classifier = ClassifierConfig::default();
    if let Some(u) = o.u_grid {
        classifier.u_grid = u;
    }
    if let Some(k) = o.kappas {
        classifier.kappas = k;
    }
    if let Some(t) = o.tol {
        classifier.tol = t;
    }
    if let Some(t) = o.rel_tol {
        classifier.quad.rel_tol = t;
    }
    if let Some(t) = o.abs_tol {
        classifier.quad.abs_tol = t;
    }
    classifier
        .validate()
        .map_err(|e| UsageError::invalid(format!("invalid setting: {e}"), None))?;

    let grid = GridOverrides {
        x_start: o.x_start,
        ratio: o.grid_ratio,
        count: o.grid_count,
        window: o.window,
    };
    let config = RunConfig {
        command: cli.command,
        models,
        grid,
        classifier,
        output: o.out,
        output_path: o.output_path,
    };
    for (spec, model) in config.models.iter().zip(config.built_models()) {
        grid.resolve(&model)
            .validate(model.support_low())
            .map_err(|e| UsageError::invalid(format!("grid invalid for {spec}: {e}"), None))?;
    }
    Ok(config)
}

impl RunConfig {
    fn built_models(&self) -> Vec<Family> {
        self.models
            .iter()
            .map(|s| build(*s).expect("specs are validated by parse_config"))
            .collect()
    }
}

/// Matuszewska indices of `F̄`, `f` and `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub tail: IndexEstimate,
    pub density: IndexEstimate,
    /// Absent when `ln h` could not be sampled or regressed.
    pub hazard: Option<IndexEstimate>,
}

/// `M1 = liminf x h(x)` and `M2 = limsup x h(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardLimits {
    pub xh: LimitEstimate,
    /// Log-log slope of `x h(x)` over the trailing half of the grid.
    #[serde(with = "float_serde")]
    pub growth: f64,
    /// Verdict on `M1 > 0`.
    pub m1_positive: Verdict,
    /// Verdict on `M2 < ∞`.
    pub m2_finite: Verdict,
    /// `"M1 zero"`, `"M2 unbounded"` when the corresponding verdict is a non-member.
    pub flags: Vec<String>,
}

/// One row of the `convolve` curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionPoint {
    #[serde(with = "float_serde")]
    pub x: f64,
    #[serde(with = "float_serde")]
    pub density: f64,
    #[serde(with = "float_serde")]
    pub tail: f64,
    #[serde(with = "float_serde")]
    pub hazard: f64,
    #[serde(with = "float_serde")]
    pub max_sum_ratio: f64,
}

/// One row of the `pitman` curve. `value` is NaN where the overflow guard fired.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitmanPoint {
    #[serde(with = "float_serde")]
    pub x: f64,
    #[serde(with = "float_serde")]
    pub kappa: f64,
    #[serde(with = "float_serde")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub section: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    /// Model labels, in command-line order.
    pub models: Vec<String>,
    /// Grid used for each model (for `convolve`, the grid of the convolution).
    pub grids: Vec<GridSpec>,
    pub verdicts: Vec<ClassVerdict>,
    pub indices: Option<IndexReport>,
    pub hazard_limits: Option<HazardLimits>,
    pub bounds: Vec<BoundCheck>,
    pub closure: Option<ClosureReport>,
    pub convolution: Vec<ConvolutionPoint>,
    pub pitman: Vec<PitmanPoint>,
    /// Problems that did not stop the run.
    pub notes: Vec<String>,
    /// Wall-clock seconds per section; not part of the canonical form.
    pub timings: Vec<Timing>,
}

impl Report {
    fn new(config: &RunConfig) -> Self {
        Report {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            config: config.clone(),
            models: Vec::new(),
            grids: Vec::new(),
            verdicts: Vec::new(),
            indices: None,
            hazard_limits: None,
            bounds: Vec::new(),
            closure: None,
            convolution: Vec::new(),
            pitman: Vec::new(),
            notes: Vec::new(),
            timings: Vec::new(),
        }
    }

    fn timed<T>(&mut self, section: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings.push(Timing {
            section: section.to_string(),
            seconds: t.elapsed().as_secs_f64(),
        });
        out
    }

    /// Exit status implied by the verdicts.
    pub fn exit_code(&self) -> i32 {
        if self.verdicts.iter().any(|v| v.verdict == Verdict::Inconclusive) {
            EXIT_INCONCLUSIVE
        } else {
            EXIT_OK
        }
    }

    /// JSON with the wall-clock section emptied. Identical configurations
    /// give byte-identical canonical JSON.
    pub fn canonical_json(&self) -> serde_json::Result<String> {
        let mut canon = self.clone();
        canon.timings.clear();
        serde_json::to_string_pretty(&canon)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

fn indices(c: &Classifier, m: &dyn DistributionModel, g: &GridSpec, notes: &mut Vec<String>) -> Result<IndexReport> {
    let us = &c.config.index_u_grid;
    let tail = matuszewska_indices(&|x: f64| m.log_tail(x), g, us)?;
    let density = matuszewska_indices(&|x: f64| m.log_density(x), g, us)?;
    let hazard = match c.hazard_decrease(m, g) {
        Ok(ix) => Some(ix),
        Err(e) => {
            notes.push(format!("hazard-rate indices unavailable: {e}"));
            None
        }
    };
    Ok(IndexReport { tail, density, hazard })
}

fn hazard_limits(c: &Classifier, m: &dyn DistributionModel, g: &GridSpec) -> Result<HazardLimits> {
    let seq = xh_sequence(m, g)?;
    let m1 = c.test_e(m, g, ERoute::HazardM1).verdict;
    let m2 = c.test_d(m, g, DRoute::HazardM2).verdict;
    let mut flags = Vec::new();
    if m1 == Verdict::NonMember {
        flags.push("M1 zero".to_string());
    }
    if m2 == Verdict::NonMember {
        flags.push("M2 unbounded".to_string());
    }
    Ok(HazardLimits {
        xh: seq.estimate(),
        growth: seq.growth(),
        m1_positive: m1,
        m2_finite: m2,
        flags,
    })
}

/// Hazard-rate bound checks: the lower bound for each listed `δ` inside
/// `(1, δ_f)`, the upper bound for `γ_f + 0.5` and `γ_f + 1` with `λ` in {2, 10}.
fn bound_suite(c: &Classifier, m: &dyn DistributionModel, g: &GridSpec) -> Result<Vec<BoundCheck>> {
    let dens = matuszewska_indices(&|x: f64| m.log_density(x), g, &c.config.index_u_grid)?;
    let mut out = Vec::new();
    for delta in [1.25, 1.5, 2.0, 2.5, 3.0, 3.5, 4.5] {
        if delta > 1.0 && delta < dens.delta {
            out.push(c.check_xh_lower_bound(m, delta, g)?);
        }
    }
    if dens.gamma.is_finite() {
        for gamma in [dens.gamma + 0.5, dens.gamma + 1.0] {
            for lambda in [2.0, 10.0] {
                out.push(c.check_xh_upper_bound(m, gamma, lambda, g)?);
            }
        }
    }
    Ok(out)
}

/// Runs the configured command.
pub fn run(config: &RunConfig) -> anyhow::Result<Report> {
    let c = Classifier::new(config.classifier.clone())?;
    let models = config.built_models();
    let mut report = Report::new(config);
    report.models = models.iter().map(|m| m.label()).collect();
    let first = &models[0];
    let g = config.grid.resolve(first);

    match config.command {
        Command::Classify => {
            report.grids = vec![g];
            let verdicts = report.timed("verdicts", || {
                vec![
                    c.test_d(first, &g, DRoute::Both),
                    c.test_e(first, &g, ERoute::Both),
                    c.test_l(first, &g),
                    c.test_s(first, &g, SRoute::Both),
                    c.test_a(first, &g),
                    c.test_dcap_a(first, &g),
                ]
            });
            report.verdicts = verdicts;
            let mut notes = Vec::new();
            report.indices = Some(report.timed("indices", || indices(&c, first, &g, &mut notes))?);
            report.hazard_limits = Some(report.timed("hazard_limits", || hazard_limits(&c, first, &g))?);
            report.notes.extend(notes);
        }
        Command::Indices => {
            report.grids = vec![g];
            let mut notes = Vec::new();
            report.indices = Some(report.timed("indices", || indices(&c, first, &g, &mut notes))?);
            report.hazard_limits = Some(report.timed("hazard_limits", || hazard_limits(&c, first, &g))?);
            report.notes.extend(notes);
        }
        Command::Convolve => {
            let (l, r) = (&models[0], &models[1]);
            let conv = ConvolvedModel::new(*l, *r, config.classifier.quad);
            let cg = config.grid.resolve(&conv);
            report.grids = vec![cg];
            let q = config.classifier.quad;
            let rows = report.timed("convolution", || {
                cg.points()
                    .into_iter()
                    .map(|x| -> Result<ConvolutionPoint> {
                        let log_density = tailclass_core::convolution::log_convolve_density(l, r, x, &q)?;
                        let log_tail = convolution_tail(l, r, x, &q)?;
                        Ok(ConvolutionPoint {
                            x,
                            density: log_density.exp(),
                            tail: log_tail.exp(),
                            hazard: (log_density - log_tail).exp(),
                            max_sum_ratio: max_sum_ratio(l, r, x, &q)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            report.convolution = rows;
        }
        Command::Pitman => {
            report.grids = vec![g];
            let q = config.classifier.quad;
            let mut notes = Vec::new();
            let rows = report.timed("pitman_curve", || {
                let mut rows = Vec::new();
                for x in g.points() {
                    for &kappa in &config.classifier.kappas {
                        let value = match pitman_integral(first, kappa, x, &q) {
                            Ok(v) => v,
                            Err(e @ Error::OverflowGuard { .. }) => {
                                if notes.len() < 5 {
                                    notes.push(format!("x={x}, kappa={kappa}: {e}"));
                                }
                                f64::NAN
                            }
                            Err(e) => return Err(e),
                        };
                        rows.push(PitmanPoint { x, kappa, value });
                    }
                }
                Ok(rows)
            })?;
            report.pitman = rows;
            report.notes.extend(notes);
            let v = report.timed("verdicts", || c.test_s(first, &g, SRoute::Pitman));
            report.verdicts.push(v);
        }
        Command::Verify if models.len() == 1 => {
            report.grids = vec![g];
            report.bounds = report.timed("bounds", || bound_suite(&c, first, &g))?;
        }
        Command::Verify => {
            let (l, r): (Arc<dyn DistributionModel>, Arc<dyn DistributionModel>) =
                (Arc::new(models[0]), Arc::new(models[1]));
            let rg = config.grid.resolve(r.as_ref());
            let closure = report.timed("closure", || c.verify_convolution_closure(l, r, &g))?;
            report.grids = vec![g, rg, closure.convolution_grid];
            report.verdicts.push(closure.convolution_e.clone());
            if let Some(v) = &closure.convolution_dcap_a {
                report.verdicts.push(v.clone());
            }
            report.closure = Some(closure);
        }
    }
    Ok(report)
}

fn csv_number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Renders the report in the configured format.
pub fn render(report: &Report) -> anyhow::Result<String> {
    Ok(match report.config.output {
        OutputFormat::Json => report.to_json()? + "\n",
        OutputFormat::Csv => render_csv(report),
        OutputFormat::Text => render_text(report),
    })
}

fn render_csv(report: &Report) -> String {
    let mut out = String::new();
    if report.config.command == Command::Pitman {
        out.push_str(PITMAN_CSV_HEADER);
        out.push('\n');
        for p in &report.pitman {
            let _ = writeln!(out, "{},{},{}", csv_number(p.x), csv_number(p.kappa), csv_number(p.value));
        }
    } else {
        out.push_str(CONVOLVE_CSV_HEADER);
        out.push('\n');
        for p in &report.convolution {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                csv_number(p.x),
                csv_number(p.density),
                csv_number(p.tail),
                csv_number(p.hazard),
                csv_number(p.max_sum_ratio)
            );
        }
    }
    out
}

fn fmt_limit(e: &LimitEstimate) -> String {
    format!("[{:.6}, {:.6}] trend {:+.3e} last {:.6}", e.lower, e.upper, e.trend, e.last)
}

fn fmt_index(ix: &IndexEstimate) -> String {
    format!("gamma {:.4} delta {:.4} residual {:.2e}", ix.gamma, ix.delta, ix.residual)
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let cmd = format!("{:?}", report.config.command).to_lowercase();
    let _ = writeln!(out, "{} {} {} {}", report.tool, report.version, cmd, report.models.join(" "));
    for g in &report.grids {
        let _ = writeln!(
            out,
            "grid: x_start {} ratio {:.6} count {} window {} (x_max {:.4e})",
            g.x_start,
            g.ratio,
            g.count,
            g.window,
            g.x_max()
        );
    }
    if !report.verdicts.is_empty() {
        out.push_str("verdicts:\n");
        for v in &report.verdicts {
            let _ = writeln!(out, "  {:<6} {:<12} {:<16} {}", v.class.to_string(), v.verdict.to_string(), v.route, v.reason);
        }
    }
    if let Some(ix) = &report.indices {
        out.push_str("indices:\n");
        let _ = writeln!(out, "  tail     {}", fmt_index(&ix.tail));
        let _ = writeln!(out, "  density  {}", fmt_index(&ix.density));
        if let Some(h) = &ix.hazard {
            let _ = writeln!(out, "  hazard   {}", fmt_index(h));
        }
    }
    if let Some(h) = &report.hazard_limits {
        let _ = writeln!(out, "x h(x): {} growth {:+.4}", fmt_limit(&h.xh), h.growth);
        let _ = writeln!(out, "  M1 > 0: {}  M2 < inf: {}  {}", h.m1_positive, h.m2_finite, h.flags.join(", "));
    }
    if !report.bounds.is_empty() {
        out.push_str("bounds:\n");
        for b in &report.bounds {
            let observed = b.observed.map(|o| fmt_limit(&o)).unwrap_or_default();
            let lambda = b.lambda.map(|l| format!(" lambda {l}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "  {:?} exponent {:.4}{lambda} rhs {:.6} holds {} {observed}",
                b.bound, b.exponent, b.rhs, b.holds
            );
        }
    }
    if let Some(c) = &report.closure {
        let p = &c.preconditions;
        let _ = writeln!(out, "closure {} * {}:", c.left, c.right);
        let _ = writeln!(out, "  preconditions satisfied: {} ({})", p.satisfied, p.reason);
        let _ = writeln!(out, "  convolution E: {}", c.convolution_e.verdict);
        let _ = writeln!(
            out,
            "  inputs D∩A: {}, {}",
            c.inputs_dcap_a[0].verdict, c.inputs_dcap_a[1].verdict
        );
        if let Some(v) = &c.convolution_dcap_a {
            let _ = writeln!(out, "  convolution D∩A: {}", v.verdict);
        }
        let _ = writeln!(out, "  max-sum ratio: {} -> {}", fmt_limit(&c.max_sum), c.max_sum_verdict);
        let _ = writeln!(out, "  convolution tail index: {}", fmt_index(&c.convolution_tail_index));
    }
    if !report.convolution.is_empty() {
        let _ = writeln!(out, "{:>14} {:>14} {:>14} {:>14} {:>14}", "x", "density", "tail", "hazard", "max_sum_ratio");
        for p in &report.convolution {
            let _ = writeln!(
                out,
                "{:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6}",
                p.x, p.density, p.tail, p.hazard, p.max_sum_ratio
            );
        }
    }
    if !report.pitman.is_empty() {
        let _ = writeln!(out, "{:>14} {:>8} {:>14}", "x", "kappa", "pitman");
        for p in &report.pitman {
            let _ = writeln!(out, "{:>14.6e} {:>8} {:>14.8}", p.x, p.kappa, p.value);
        }
    }
    for n in &report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    for t in &report.timings {
        let _ = writeln!(out, "time {}: {:.3} s", t.section, t.seconds);
    }
    out
}
