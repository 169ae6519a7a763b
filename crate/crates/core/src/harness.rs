//! Batch experiments over catalog entries: growth sweeps outside the data
//! interval, convergence against a reference function, and contour checks.
//!
//! A run is described by one JSON [`ExperimentConfig`]. Reports render to
//! CSV (numbers as `{:.16e}`, 17 significant digits) or JSON. A CSV report
//! starts with `#` comment lines; the `generated` field in them is the only
//! run-dependent content and is left out when `reproducible` is set.
//!
//! Exit codes: 0 success, 1 the verdict failed, 2 configuration or
//! validation error, 3 semantic precondition error, 4 numeric failure.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approximant::{approximant_boundary, l2_error_on_window, sup_error_on_compact, BoundarySignal};
use crate::asymptotics::{contour_identity_report, ContourSpec, GrowthReport, GrowthSample};
use crate::catalog::{self, CatalogEntry, CatalogInfo, EntryParams};
use crate::error::Error;
use crate::quadrature::{QuadTolerance, PV_ENDPOINT_GUARD};
use crate::quench::{Interval, QuenchParams};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "H2RECOVER_THREADS";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A real point, or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EvalPoint {
    Real(f64),
    Complex([f64; 2]),
}

impl EvalPoint {
    pub fn to_complex(self) -> Complex64 {
        match self {
            EvalPoint::Real(x) => Complex64::new(x, 0.0),
            EvalPoint::Complex([re, im]) => Complex64::new(re, im),
        }
    }

    /// The real coordinate when the point lies on the real line.
    pub fn as_real(self) -> Option<f64> {
        let z = self.to_complex();
        (z.im == 0.0).then_some(z.re)
    }
}

/// One `(xi, alpha, R, height)` tuple for the contour check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourCase {
    pub xi: f64,
    pub alpha: f64,
    pub half_width: f64,
    #[serde(default = "default_height")]
    pub height: f64,
}

fn default_height() -> f64 {
    1.5 * PI
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

/// Eight log-spaced points from `1e1` to `1e8`.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..=8).map(|k| 10f64.powi(k)).collect()
}

fn default_growth_tolerance() -> f64 {
    0.05
}

fn default_window() -> Interval {
    Interval::new(-5.0, 5.0).expect("valid window")
}

fn default_window_samples() -> usize {
    200
}

fn default_contour_tolerance() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    #[serde(alias = "entry_name")]
    pub entry: String,
    #[serde(default)]
    pub params: EntryParams,
    /// Defaults to the entry's own interval.
    #[serde(default)]
    pub interval: Option<Interval>,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    #[serde(default)]
    pub eval_points: Vec<EvalPoint>,
    #[serde(default)]
    pub tolerances: QuadTolerance,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Allowed gap between fitted and predicted exponents.
    #[serde(default = "default_growth_tolerance")]
    pub growth_tolerance: f64,
    /// Real-line window of the L2 error.
    #[serde(default = "default_window")]
    pub window: Interval,
    #[serde(default = "default_window_samples")]
    pub window_samples: usize,
    #[serde(default)]
    pub contour_cases: Vec<ContourCase>,
    #[serde(default = "default_contour_tolerance")]
    pub contour_tolerance: f64,
}

impl ExperimentConfig {
    /// A configuration with every optional field at its default.
    pub fn for_entry(entry: &str) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            entry: entry.to_string(),
            params: EntryParams::default(),
            interval: None,
            lambda_grid: default_lambda_grid(),
            eval_points: Vec::new(),
            tolerances: QuadTolerance::default(),
            output_path: None,
            format: Format::Csv,
            growth_tolerance: default_growth_tolerance(),
            window: default_window(),
            window_samples: default_window_samples(),
            contour_cases: Vec::new(),
            contour_tolerance: default_contour_tolerance(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::from_json(&text)
    }

    /// Checks that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let config = |msg: String| Err(HarnessError::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return config(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            ));
        }
        if self.lambda_grid.is_empty() {
            return config("lambda_grid is empty".into());
        }
        if self.lambda_grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return config("lambda_grid values must be positive and finite".into());
        }
        if self.lambda_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return config("lambda_grid must be strictly increasing".into());
        }
        self.tolerances
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if !(self.growth_tolerance > 0.0 && self.growth_tolerance.is_finite()) {
            return config(format!(
                "growth_tolerance must be positive, got {}",
                self.growth_tolerance
            ));
        }
        if !(self.contour_tolerance > 0.0 && self.contour_tolerance.is_finite()) {
            return config(format!(
                "contour_tolerance must be positive, got {}",
                self.contour_tolerance
            ));
        }
        if self.window_samples == 0 {
            return config("window_samples must be positive".into());
        }
        for (k, p) in self.eval_points.iter().enumerate() {
            let z = p.to_complex();
            if !(z.re.is_finite() && z.im.is_finite()) {
                return config(format!("eval_points[{k}] is not finite"));
            }
        }
        if let Some(interval) = self.interval {
            let guard = PV_ENDPOINT_GUARD * interval.len();
            for (k, p) in self.eval_points.iter().enumerate() {
                if let Some(x) = p.as_real() {
                    if interval.endpoint_distance(x) < guard {
                        return config(format!("eval_points[{k}] = {x} is within the guard of an endpoint"));
                    }
                }
            }
        }
        Ok(())
    }

    /// The catalog entry, on the configured interval when one is given.
    ///
    /// An entry with a reference function may be moved to another interval;
    /// its strip data belong to the catalog interval and are dropped.
    pub fn resolve_entry(&self) -> Result<CatalogEntry, HarnessError> {
        let mut entry = catalog::lookup(&self.entry, &self.params).map_err(|e| HarnessError::Config(e.to_string()))?;
        if let Some(interval) = self.interval {
            if interval != entry.interval {
                if entry.reference.is_none() {
                    return Err(HarnessError::Config(format!(
                        "{} is defined on ({}, {}) only",
                        entry.name,
                        entry.interval.lo(),
                        entry.interval.hi()
                    )));
                }
                let eval = entry.signal.evaluator().clone();
                entry.signal = BoundarySignal::new(move |x| eval(x));
                entry.interval = interval;
            }
        }
        let guard = PV_ENDPOINT_GUARD * entry.interval.len();
        for (k, p) in self.eval_points.iter().enumerate() {
            if let Some(x) = p.as_real() {
                if entry.interval.endpoint_distance(x) < guard {
                    return Err(HarnessError::Config(format!(
                        "eval_points[{k}] = {x} is within the guard of an endpoint"
                    )));
                }
            }
        }
        Ok(entry)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Precondition(String),

    #[error("{context}: {source}")]
    Numeric { context: String, source: Error },

    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Output { .. } => 2,
            HarnessError::Precondition(_) => 3,
            HarnessError::Numeric { source, .. } => match source {
                Error::NonConvergence { .. } | Error::NonFinite { .. } | Error::NonPositiveMagnitude { .. } => 4,
                Error::InsufficientData(_) | Error::InvalidTolerance(_) => 2,
                _ => 3,
            },
        }
    }

    fn numeric(context: String) -> impl FnOnce(Error) -> HarnessError {
        move |source| HarnessError::Numeric { context, source }
    }
}

/// Settings that apply to how a report is written.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputOptions {
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub reproducible: bool,
}

/// The growth reports of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthExperiment {
    pub entry: String,
    pub interval: Interval,
    pub tolerance: f64,
    pub reports: Vec<GrowthReport>,
}

impl GrowthExperiment {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.agrees(self.tolerance))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub lambda: f64,
    pub sup_error: f64,
    pub l2_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub entry: String,
    pub interval: Interval,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Both error columns are nonincreasing in `lambda`.
    pub fn passed(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].sup_error <= w[0].sup_error && w[1].l2_error <= w[0].l2_error)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourRow {
    pub case: ContourCase,
    pub residual: f64,
    pub side_edge_magnitude: f64,
    pub top_edge_magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourCheckReport {
    pub entry: String,
    pub tolerance: f64,
    pub rows: Vec<ContourRow>,
}

impl ContourCheckReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.residual < self.tolerance)
    }
}

/// Sweeps `|g_lambda(x)|` over the lambda grid at each real point outside
/// the closed interval and fits the growth exponent per point.
pub fn run_growth_experiment(cfg: &ExperimentConfig) -> Result<GrowthExperiment, HarnessError> {
    cfg.validate()?;
    let entry = cfg.resolve_entry()?;
    if cfg.eval_points.is_empty() {
        return Err(HarnessError::Config("growth needs at least one eval point".into()));
    }
    let mut xs = Vec::with_capacity(cfg.eval_points.len());
    for (k, p) in cfg.eval_points.iter().enumerate() {
        match p.as_real() {
            Some(x) if !(entry.interval.lo()..=entry.interval.hi()).contains(&x) => xs.push(x),
            _ => {
                return Err(HarnessError::Precondition(format!(
                    "growth needs real eval points outside [{}, {}]; eval_points[{k}] is {}",
                    entry.interval.lo(),
                    entry.interval.hi(),
                    p.to_complex()
                )))
            }
        }
    }
    let cells: Vec<(usize, usize)> = (0..xs.len())
        .flat_map(|j| (0..cfg.lambda_grid.len()).map(move |i| (j, i)))
        .collect();
    let magnitudes: Vec<Result<f64, HarnessError>> = cells
        .par_iter()
        .map(|&(j, i)| {
            let (x, lambda) = (xs[j], cfg.lambda_grid[i]);
            let context = format!("lambda = {lambda}, x = {x}");
            let p = QuenchParams::new(lambda).map_err(HarnessError::numeric(context.clone()))?;
            approximant_boundary(x, &p, &entry.interval, &entry.signal, &cfg.tolerances)
                .map(|v| v.norm())
                .map_err(HarnessError::numeric(context))
        })
        .collect();
    let mut magnitudes = magnitudes.into_iter();
    let mut reports = Vec::with_capacity(xs.len());
    for &x in &xs {
        let mut samples = Vec::with_capacity(cfg.lambda_grid.len());
        for &lambda in &cfg.lambda_grid {
            let magnitude = magnitudes.next().expect("one result per cell")?;
            samples.push(GrowthSample { lambda, magnitude });
        }
        let report = GrowthReport::from_samples(x, samples, entry.signal.singularities())
            .map_err(HarnessError::numeric(format!("fit at x = {x}")))?;
        reports.push(report);
    }
    Ok(GrowthExperiment {
        entry: entry.name,
        interval: entry.interval,
        tolerance: cfg.growth_tolerance,
        reports,
    })
}

/// Sup error over the interior eval points and L2 error over the window,
/// per lambda.
pub fn run_convergence_experiment(cfg: &ExperimentConfig) -> Result<ConvergenceReport, HarnessError> {
    cfg.validate()?;
    let entry = cfg.resolve_entry()?;
    let reference = entry.reference.as_ref().ok_or_else(|| {
        HarnessError::Precondition(format!("MissingReference: {} has no reference function", entry.name))
    })?;
    if cfg.eval_points.is_empty() {
        return Err(HarnessError::Config("converge needs at least one eval point".into()));
    }
    let mut points = Vec::with_capacity(cfg.eval_points.len());
    for (k, p) in cfg.eval_points.iter().enumerate() {
        let z = p.to_complex();
        if !(z.im > 0.0) {
            return Err(HarnessError::Precondition(format!(
                "converge needs eval points in the upper half plane; eval_points[{k}] is {z}"
            )));
        }
        points.push(z);
    }
    let mut rows = Vec::with_capacity(cfg.lambda_grid.len());
    for &lambda in &cfg.lambda_grid {
        let context = format!("lambda = {lambda}");
        let p = QuenchParams::new(lambda).map_err(HarnessError::numeric(context.clone()))?;
        let sup_error = sup_error_on_compact(&points, &p, &entry.interval, &entry.signal, reference, &cfg.tolerances)
            .map_err(HarnessError::numeric(format!("{context}, sup error")))?;
        let l2_error = l2_error_on_window(
            &p,
            &entry.interval,
            &entry.signal,
            reference,
            &cfg.window,
            cfg.window_samples,
            &cfg.tolerances,
        )
        .map_err(HarnessError::numeric(format!("{context}, L2 error")))?;
        rows.push(ConvergenceRow {
            lambda,
            sup_error,
            l2_error,
        });
    }
    Ok(ConvergenceReport {
        entry: entry.name,
        interval: entry.interval,
        rows,
    })
}

/// Residual of the contour identity for each configured case.
pub fn run_contour_check(cfg: &ExperimentConfig) -> Result<ContourCheckReport, HarnessError> {
    cfg.validate()?;
    let entry = cfg.resolve_entry()?;
    if cfg.contour_cases.is_empty() {
        return Err(HarnessError::Config(
            "contour needs at least one entry in contour_cases".into(),
        ));
    }
    let mut specs = Vec::with_capacity(cfg.contour_cases.len());
    for (k, c) in cfg.contour_cases.iter().enumerate() {
        if !(c.xi >= 0.0 && c.xi.is_finite()) {
            return Err(HarnessError::Config(format!(
                "contour_cases[{k}]: xi must be non-negative, got {}",
                c.xi
            )));
        }
        let spec = ContourSpec::new(c.half_width, c.height)
            .and_then(|s| s.validate_for_alpha(c.alpha).map(|_| s))
            .map_err(|e| HarnessError::Config(format!("contour_cases[{k}]: {e}")))?;
        specs.push(spec);
    }
    let pullback = entry
        .signal
        .pullback()
        .ok_or_else(|| HarnessError::Precondition(format!("{} carries no strip data", entry.name)))?;
    let g = |z: Complex64| (pullback.eval)(z);
    let rows: Vec<Result<ContourRow, HarnessError>> = cfg
        .contour_cases
        .par_iter()
        .zip(specs.par_iter())
        .map(|(case, spec)| {
            let context = format!(
                "xi = {}, alpha = {}, R = {}, height = {}",
                case.xi, case.alpha, case.half_width, case.height
            );
            let report = contour_identity_report(
                &g,
                case.xi,
                case.alpha,
                spec,
                entry.signal.singularities(),
                &cfg.tolerances,
            )
            .map_err(HarnessError::numeric(context))?;
            Ok(ContourRow {
                case: *case,
                residual: report.residual,
                side_edge_magnitude: report.side_edge_magnitude,
                top_edge_magnitude: report.top_edge_magnitude,
            })
        })
        .collect();
    Ok(ContourCheckReport {
        entry: entry.name,
        tolerance: cfg.contour_tolerance,
        rows: rows.into_iter().collect::<Result<_, _>>()?,
    })
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn header(kind: &str, entry: &str, reproducible: bool) -> String {
    let mut h = format!("# h2recover {kind} schema_version={SCHEMA_VERSION} entry={entry}");
    if !reproducible {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let _ = write!(h, " generated={secs}");
    }
    h.push('\n');
    h
}

#[derive(Serialize)]
struct JsonEnvelope<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated: Option<u64>,
    passed: bool,
    report: &'a T,
}

fn render_json<T: Serialize>(kind: &str, passed: bool, report: &T, reproducible: bool) -> String {
    let generated = (!reproducible).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let envelope = JsonEnvelope {
        schema_version: SCHEMA_VERSION,
        kind,
        generated,
        passed,
        report,
    };
    let mut s = serde_json::to_string_pretty(&envelope).expect("reports serialize");
    s.push('\n');
    s
}

impl GrowthExperiment {
    /// CSV columns: `lambda,point_index,x,magnitude,fitted_slope,predicted_slope`,
    /// ordered by lambda, then point index.
    pub fn render(&self, format: Format, reproducible: bool) -> String {
        if format == Format::Json {
            return render_json("growth", self.passed(), self, reproducible);
        }
        let mut s = header("growth", &self.entry, reproducible);
        for r in &self.reports {
            let _ = writeln!(
                s,
                "# x={} verdict={} fitted={} predicted={} residual_std={} high_variance={}",
                num(r.x),
                serde_json::to_string(&r.verdict).expect("verdict").trim_matches('"'),
                num(r.fitted_exponent),
                num(r.predicted_exponent),
                num(r.residual_std),
                r.high_variance
            );
        }
        s.push_str("lambda,point_index,x,magnitude,fitted_slope,predicted_slope\n");
        let n_lambda = self.reports.first().map_or(0, |r| r.samples.len());
        for i in 0..n_lambda {
            for (j, r) in self.reports.iter().enumerate() {
                let sample = r.samples[i];
                let _ = writeln!(
                    s,
                    "{},{j},{},{},{},{}",
                    num(sample.lambda),
                    num(r.x),
                    num(sample.magnitude),
                    num(r.fitted_exponent),
                    num(r.predicted_exponent)
                );
            }
        }
        s
    }
}

impl ConvergenceReport {
    /// CSV columns: `lambda,sup_error,l2_error`.
    pub fn render(&self, format: Format, reproducible: bool) -> String {
        if format == Format::Json {
            return render_json("converge", self.passed(), self, reproducible);
        }
        let mut s = header("converge", &self.entry, reproducible);
        s.push_str("lambda,sup_error,l2_error\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{}", num(r.lambda), num(r.sup_error), num(r.l2_error));
        }
        s
    }
}

impl ContourCheckReport {
    /// CSV columns: `case_index,xi,alpha,half_width,height,residual,side_edge_magnitude,top_edge_magnitude`.
    pub fn render(&self, format: Format, reproducible: bool) -> String {
        if format == Format::Json {
            return render_json("contour", self.passed(), self, reproducible);
        }
        let mut s = header("contour", &self.entry, reproducible);
        s.push_str("case_index,xi,alpha,half_width,height,residual,side_edge_magnitude,top_edge_magnitude\n");
        for (k, r) in self.rows.iter().enumerate() {
            let c = r.case;
            let _ = writeln!(
                s,
                "{k},{},{},{},{},{},{},{}",
                num(c.xi),
                num(c.alpha),
                num(c.half_width),
                num(c.height),
                num(r.residual),
                num(r.side_edge_magnitude),
                num(r.top_edge_magnitude)
            );
        }
        s
    }
}

/// CSV columns: `name,lo,hi,expected_exponent,has_reference,strip_singularities`.
pub fn render_catalog(entries: &[CatalogInfo], format: Format) -> String {
    if format == Format::Json {
        let mut s = serde_json::to_string_pretty(entries).expect("catalog serializes");
        s.push('\n');
        return s;
    }
    let mut s = String::from("name,lo,hi,expected_exponent,has_reference,strip_singularities\n");
    for e in entries {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            e.name,
            num(e.interval[0]),
            num(e.interval[1]),
            num(e.expected_exponent),
            e.has_reference,
            e.singularities.len()
        );
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Growth,
    Converge,
    Contour,
}

/// Runs one subcommand and writes its report. Returns whether the verdict
/// passed.
pub fn execute(command: Command, cfg: &ExperimentConfig, opts: &OutputOptions) -> Result<bool, HarnessError> {
    let format = opts.format.unwrap_or(cfg.format);
    let (text, passed) = match command {
        Command::Growth => {
            let r = run_growth_experiment(cfg)?;
            (r.render(format, opts.reproducible), r.passed())
        }
        Command::Converge => {
            let r = run_convergence_experiment(cfg)?;
            (r.render(format, opts.reproducible), r.passed())
        }
        Command::Contour => {
            let r = run_contour_check(cfg)?;
            (r.render(format, opts.reproducible), r.passed())
        }
    };
    write_output(opts.out.as_deref().or(cfg.output_path.as_deref()), &text)?;
    Ok(passed)
}

/// Writes `text` to `path`, or to standard output when there is none.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|e| HarnessError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Applies the thread count from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<(), HarnessError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| HarnessError::Config(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> Result<ExperimentConfig, HarnessError> {
        ExperimentConfig::from_json(json)
    }

    #[test]
    fn defaults_fill_in() {
        let c = cfg(r#"{"entry": "example2", "eval_points": [2.0]}"#).unwrap();
        assert_eq!(c.lambda_grid.len(), 8);
        assert_eq!(c.lambda_grid[0], 10.0);
        assert_eq!(c.lambda_grid[7], 1e8);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.tolerances, QuadTolerance::default());
        assert_eq!(c.growth_tolerance, 0.05);
        let alias = cfg(r#"{"entry_name": "example2"}"#).unwrap();
        assert_eq!(alias.entry, "example2");
    }

    #[test]
    fn eval_points_accept_real_and_complex() {
        let c = cfg(r#"{"entry": "h2pole", "eval_points": [2.0, [0.5, 1.0]]}"#).unwrap();
        assert_eq!(c.eval_points[0].as_real(), Some(2.0));
        assert_eq!(c.eval_points[1].to_complex(), Complex64::new(0.5, 1.0));
        assert_eq!(EvalPoint::Complex([3.0, 0.0]).as_real(), Some(3.0));
    }

    #[test]
    fn config_errors_exit_2() {
        for bad in [
            r#"{"entry": "example2", "lambda_grid": []}"#,
            r#"{"entry": "example2", "lambda_grid": [10, 5]}"#,
            r#"{"entry": "example2", "lambda_grid": [0, 5]}"#,
            r#"{"entry": "example2", "schema_version": 7}"#,
            r#"{"entry": "example2", "unknown": 1}"#,
            r#"{"entry": "example2", "interval": [-1, 1], "eval_points": [1.0]}"#,
            r#"{"entry": "example2", "tolerances": {"abs_tol": 0, "rel_tol": 1e-10, "max_subdivisions": 10}}"#,
            r#"not json"#,
        ] {
            let err = cfg(bad).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}: {err}");
        }
    }

    #[test]
    fn unknown_entry_is_config_error() {
        let c = cfg(r#"{"entry": "nope", "eval_points": [2.0]}"#).unwrap();
        assert_eq!(run_growth_experiment(&c).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn growth_rejects_points_inside_interval() {
        let c = cfg(r#"{"entry": "example2", "eval_points": [0.5]}"#).unwrap();
        assert_eq!(run_growth_experiment(&c).unwrap_err().exit_code(), 3);
        let c = cfg(r#"{"entry": "example2", "eval_points": [[2.0, 1.0]]}"#).unwrap();
        assert_eq!(run_growth_experiment(&c).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn growth_needs_enough_lambdas() {
        let c = cfg(r#"{"entry": "example2", "eval_points": [2.0], "lambda_grid": [10, 100]}"#).unwrap();
        assert_eq!(run_growth_experiment(&c).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn convergence_requires_reference() {
        let c = cfg(r#"{"entry": "example1", "eval_points": [[0.0, 1.0]]}"#).unwrap();
        let err = run_convergence_experiment(&c).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("MissingReference"));
    }

    #[test]
    fn convergence_single_lambda_is_vacuous() {
        let c = cfg(r#"{"entry": "h2pole", "eval_points": [[0.0, 1.0]], "lambda_grid": [10], "window_samples": 20}"#)
            .unwrap();
        let r = run_convergence_experiment(&c).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.passed());
        let csv = r.render(Format::Csv, true);
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn contour_validation() {
        let height_pi = format!(
            r#"{{"entry": "example2", "contour_cases": [{{"xi": 1, "alpha": 2, "half_width": 20, "height": {PI}}}]}}"#
        );
        let c = cfg(&height_pi).unwrap();
        assert_eq!(run_contour_check(&c).unwrap_err().exit_code(), 2);
        let narrow = r#"{"entry": "example2", "contour_cases": [{"xi": 1, "alpha": 2, "half_width": 1}]}"#;
        assert_eq!(run_contour_check(&cfg(narrow).unwrap()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn contour_example2_passes() {
        let c = cfg(r#"{"entry": "example2", "contour_cases": [{"xi": 1, "alpha": 2, "half_width": 20}]}"#).unwrap();
        let r = run_contour_check(&c).unwrap();
        assert!(r.passed(), "{:?}", r.rows);
        let csv = r.render(Format::Csv, true);
        assert!(csv.starts_with("# h2recover contour schema_version=1 entry=example2\n"));
    }

    #[test]
    fn moved_interval_drops_strip_data() {
        let c = cfg(
            r#"{"entry": "h2pole", "interval": [0, 2], "contour_cases": [{"xi": 1, "alpha": 2, "half_width": 20}]}"#,
        )
        .unwrap();
        assert_eq!(run_contour_check(&c).unwrap_err().exit_code(), 3);
        let c = cfg(r#"{"entry": "example1", "interval": [0, 2]}"#).unwrap();
        assert_eq!(c.resolve_entry().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn numbers_keep_17_digits() {
        let v = 0.1 + 0.2;
        assert_eq!(num(v).parse::<f64>().unwrap(), v);
        assert_eq!(num(PI).split('e').next().unwrap().len(), 18);
    }

    #[test]
    fn header_timestamp_only_when_not_reproducible() {
        assert!(!header("growth", "example2", true).contains("generated"));
        assert!(header("growth", "example2", false).contains("generated="));
    }

    #[test]
    fn numeric_exit_codes() {
        let nc = HarnessError::Numeric {
            context: "x".into(),
            source: Error::NonConvergence {
                error: 1.0,
                target: 0.1,
                subdivisions: 5,
            },
        };
        assert_eq!(nc.exit_code(), 4);
        let pole = HarnessError::Numeric {
            context: "x".into(),
            source: Error::PoleOnContour {
                at: Complex64::new(0.0, 1.0),
            },
        };
        assert_eq!(pole.exit_code(), 3);
    }
}
