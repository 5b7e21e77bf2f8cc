//! Command-line front end.
//!
//! Every option can also come from a TOML file given with `--config`; keys
//! are the long flag names with `-` replaced by `_`. Flags on the command
//! line win over file values.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::gaussian::{
    classify_detailed, nu_minus, nu_prime_minus, symplectic_spectrum, toy_covariance, ToyPoint,
    CLASSIFY_TOL,
};
use crate::infogeo::{toy_metric_numeric, toy_metric_paper, MetricTensor};
use crate::output::{default_series, emit_plot, write_table, TableFormat};
use crate::phase_space::{nc_form, ppt_form, NCParams};
use crate::report::{discrepancy_report, ReportOptions};
use crate::volume::{
    integrate_region, linear_grid, sweep, Column, Density, IntegrationOptions, Method,
    MetricBackend, RegionKind, RegionSpec, SweepFixed, SweepParam, SweepTable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendArg {
    Paper,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityArg {
    Det,
    SqrtDet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    McPolar,
    McCartesian,
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionArg {
    PositiveDisk,
    Quantum,
    Separable,
    Entangled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamArg {
    Kappa,
    Theta,
    Eta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Text,
    Csv,
    Json,
}

impl From<BackendArg> for MetricBackend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Paper => MetricBackend::PaperClosedForm,
            BackendArg::Numeric => MetricBackend::NumericFisher,
        }
    }
}

impl From<DensityArg> for Density {
    fn from(d: DensityArg) -> Self {
        match d {
            DensityArg::Det => Density::Det,
            DensityArg::SqrtDet => Density::SqrtDet,
        }
    }
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::McPolar => Method::MonteCarloPolar,
            MethodArg::McCartesian => Method::MonteCarloCartesian,
            MethodArg::GaussLegendre => Method::GaussLegendrePolar,
        }
    }
}

impl From<RegionArg> for RegionKind {
    fn from(r: RegionArg) -> Self {
        match r {
            RegionArg::PositiveDisk => RegionKind::PositiveDisk,
            RegionArg::Quantum => RegionKind::Quantum,
            RegionArg::Separable => RegionKind::Separable,
            RegionArg::Entangled => RegionKind::Entangled,
        }
    }
}

impl From<ParamArg> for SweepParam {
    fn from(p: ParamArg) -> Self {
        match p {
            ParamArg::Kappa => SweepParam::Kappa,
            ParamArg::Theta => SweepParam::Theta,
            ParamArg::Eta => SweepParam::Eta,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ncgeom",
    version,
    about = "Entanglement classification and regularized Fisher-Rao volumes for Gaussian states on noncommutative phase space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the toy state at (m, n) as Unphysical, Separable or Entangled.
    Classify(PointCmd),
    /// Print symplectic spectra with respect to Ω and its partial transpose.
    Spectrum(PointCmd),
    /// Print the Fisher-Rao metric of the toy family at (m, n).
    Metric(PointCmd),
    /// Regularized volume of one parameter region.
    Volume(VolumeCmd),
    /// Volumes and entangled/separable ratio along a parameter grid.
    Sweep(SweepCmd),
    /// Regenerate all sweep tables and plots into a directory.
    Figures(FiguresCmd),
    /// Audit closed-form expressions against the numeric routes.
    Report(ReportCmd),
}

/// Options shared by every subcommand. All are optional so that config
/// files can supply them.
#[derive(Debug, Args, Default)]
struct Opts {
    /// TOML file with default option values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    /// Tolerance on the ν ≥ 1 thresholds.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output file (directory for `figures`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
struct IntegrationArgs {
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    #[arg(long, value_enum)]
    density: Option<DensityArg>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Integrand evaluations (at least 10000).
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct PointCmd {
    #[arg(long, allow_hyphen_values = true)]
    m: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<f64>,
    /// Metric backend (for `metric`).
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Args)]
struct VolumeCmd {
    #[arg(long, value_enum)]
    region: Option<RegionArg>,
    #[command(flatten)]
    integration: IntegrationArgs,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Args)]
struct SweepCmd {
    #[arg(long, value_enum)]
    param: Option<ParamArg>,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// SVG plot of the sweep.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    integration: IntegrationArgs,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Args)]
struct FiguresCmd {
    #[command(flatten)]
    integration: IntegrationArgs,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Args)]
struct ReportCmd {
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    #[command(flatten)]
    integration: IntegrationArgs,
    #[command(flatten)]
    opts: Opts,
}

/// Values read from a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub m: Option<f64>,
    pub n: Option<f64>,
    pub theta: Option<f64>,
    pub eta: Option<f64>,
    pub kappa: Option<f64>,
    pub backend: Option<BackendArg>,
    pub density: Option<DensityArg>,
    pub method: Option<MethodArg>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub region: Option<RegionArg>,
    pub param: Option<ParamArg>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<FormatArg>,
    pub plot: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| Error::Domain(format!("config {}: {}", path.display(), e.message())))
    }
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m: f64,
    pub n: f64,
    pub nc: NCParams,
    pub kappa: f64,
    pub integration: IntegrationOptions,
    pub region: RegionKind,
    pub param: SweepParam,
    pub grid: Vec<f64>,
    pub report_grid: usize,
    pub out: Option<PathBuf>,
    pub format: Option<FormatArg>,
    pub plot: Option<PathBuf>,
}

/// Defaults that depend on the subcommand.
struct CommandDefaults {
    backend: BackendArg,
    method: MethodArg,
}

fn validate_kappa(kappa: f64) -> Result<f64> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(kappa)
    } else {
        Err(Error::domain(format!(
            "kappa must be positive, got {kappa}"
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn resolve(
    file: FileConfig,
    point: (Option<f64>, Option<f64>),
    opts: &Opts,
    integ: &IntegrationArgs,
    region: Option<RegionArg>,
    grid: (Option<ParamArg>, Option<f64>, Option<f64>, Option<usize>),
    report_grid: Option<usize>,
    plot: Option<PathBuf>,
    defaults: CommandDefaults,
) -> Result<RunConfig> {
    let theta = opts.theta.or(file.theta).unwrap_or(0.0);
    let eta = opts.eta.or(file.eta).unwrap_or(0.0);
    let nc = NCParams::new(theta, eta)?;
    let m = point.0.or(file.m).unwrap_or(0.0);
    let n = point.1.or(file.n).unwrap_or(0.0);
    if !m.is_finite() || !n.is_finite() || !(m.hypot(n) < 1.0) {
        return Err(Error::domain(format!(
            "(m, n) = ({m}, {n}) must lie inside the unit disk"
        )));
    }
    let param: SweepParam = grid.0.or(file.param).unwrap_or(ParamArg::Theta).into();
    let (lo, hi) = match param {
        SweepParam::Kappa => (0.5, 4.0),
        SweepParam::Theta | SweepParam::Eta => (0.1, 1.0),
    };
    let from = grid.1.or(file.from).unwrap_or(lo);
    let to = grid.2.or(file.to).unwrap_or(hi);
    let steps = grid.3.or(file.steps).unwrap_or(10);
    let kappa = validate_kappa(integ.kappa.or(file.kappa).unwrap_or(4.0))?;
    let integration = IntegrationOptions {
        backend: integ
            .backend
            .or(file.backend)
            .unwrap_or(defaults.backend)
            .into(),
        density: integ
            .density
            .or(file.density)
            .unwrap_or(DensityArg::Det)
            .into(),
        method: integ
            .method
            .or(file.method)
            .unwrap_or(defaults.method)
            .into(),
        budget: integ.budget.or(file.budget).unwrap_or(40_000),
        seed: integ.seed.or(file.seed).unwrap_or(0),
        tol: opts.tol.or(file.tol).unwrap_or(CLASSIFY_TOL),
    };
    if integration.budget < crate::volume::MIN_BUDGET {
        return Err(Error::domain(format!(
            "budget must be at least {}, got {}",
            crate::volume::MIN_BUDGET,
            integration.budget
        )));
    }
    if !(integration.tol >= 0.0) {
        return Err(Error::domain("tol must be non-negative"));
    }
    Ok(RunConfig {
        m,
        n,
        nc,
        kappa,
        integration,
        region: region
            .or(file.region)
            .unwrap_or(RegionArg::PositiveDisk)
            .into(),
        param,
        grid: linear_grid(from, to, steps)?,
        report_grid: report_grid.or(file.grid).unwrap_or(101),
        out: opts.out.clone().or(file.out),
        format: opts.format.or(file.format),
        plot: plot.or(file.plot),
    })
}

fn load_file(opts: &Opts) -> Result<FileConfig> {
    match &opts.config {
        Some(p) => FileConfig::load(p),
        None => Ok(FileConfig::default()),
    }
}

const POINT_DEFAULTS: CommandDefaults = CommandDefaults {
    backend: BackendArg::Numeric,
    method: MethodArg::GaussLegendre,
};

fn point_config(cmd: &PointCmd) -> Result<RunConfig> {
    let integ = IntegrationArgs {
        backend: cmd.backend,
        ..Default::default()
    };
    resolve(
        load_file(&cmd.opts)?,
        (cmd.m, cmd.n),
        &cmd.opts,
        &integ,
        None,
        (None, None, None, None),
        None,
        None,
        POINT_DEFAULTS,
    )
}

fn integration_config(
    opts: &Opts,
    integ: &IntegrationArgs,
    method: MethodArg,
) -> Result<RunConfig> {
    resolve(
        load_file(opts)?,
        (None, None),
        opts,
        integ,
        None,
        (None, None, None, None),
        None,
        None,
        CommandDefaults {
            backend: BackendArg::Paper,
            method,
        },
    )
}

fn sink(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn cmd_classify(cmd: &PointCmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = point_config(cmd)?;
    let p = ToyPoint::new(cfg.m, cfg.n, cfg.nc)?;
    let c = classify_detailed(&p, cfg.integration.tol)?;
    if let Some(d) = &c.discrepancy {
        let show = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v:.9}"));
        writeln!(
            err,
            "note: closed-form spectrum disagrees with numeric (nu_-: {} vs {:.9}, nu'_-: {} vs {:.9}); using numeric",
            show(d.closed_nu),
            d.numeric_nu,
            show(d.closed_nu_prime),
            d.numeric_nu_prime
        )?;
    }
    let text = match cfg.format {
        Some(FormatArg::Json) => json_text(&json!({
            "m": cfg.m, "n": cfg.n,
            "theta": cfg.nc.theta(), "eta": cfg.nc.eta(),
            "class": c.class.to_string(),
            "nu_minus": c.nu, "nu_prime_minus": c.nu_prime,
        })),
        _ => format!("{}\n", c.class),
    };
    sink(out, cfg.out.as_deref(), &text)
}

fn cmd_spectrum(cmd: &PointCmd, out: &mut dyn Write) -> Result<()> {
    let cfg = point_config(cmd)?;
    let p = ToyPoint::new(cfg.m, cfg.n, cfg.nc)?;
    let sigma = toy_covariance(&p)?;
    let omega = nc_form(cfg.nc);
    let spec = symplectic_spectrum(&sigma, &omega)?;
    let spec_prime = symplectic_spectrum(&sigma, &ppt_form(&omega))?;
    let closed_nu = nu_minus(&p).ok();
    let closed_prime = nu_prime_minus(&p).ok();
    let text = match cfg.format {
        Some(FormatArg::Json) => json_text(&json!({
            "m": cfg.m, "n": cfg.n,
            "theta": cfg.nc.theta(), "eta": cfg.nc.eta(),
            "spectrum": spec.values,
            "spectrum_partial_transpose": spec_prime.values,
            "nu_minus": spec.min(),
            "nu_prime_minus": spec_prime.min(),
            "closed_form_nu_minus": closed_nu,
            "closed_form_nu_prime_minus": closed_prime,
        })),
        _ => {
            let list = |v: &[f64]| {
                v.iter()
                    .map(|x| format!("{x:.12}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let opt = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v:.12}"));
            format!(
                "spectrum (Omega):             [{}]\n\
                 spectrum (partial transpose): [{}]\n\
                 nu_-  numeric {:.12}  closed form {}\n\
                 nu'_- numeric {:.12}  closed form {}\n",
                list(&spec.values),
                list(&spec_prime.values),
                spec.min(),
                opt(closed_nu),
                spec_prime.min(),
                opt(closed_prime)
            )
        }
    };
    sink(out, cfg.out.as_deref(), &text)
}

fn cmd_metric(cmd: &PointCmd, out: &mut dyn Write) -> Result<()> {
    let cfg = point_config(cmd)?;
    let g: MetricTensor = match cfg.integration.backend {
        MetricBackend::PaperClosedForm => toy_metric_paper(cfg.m, cfg.n)?,
        MetricBackend::NumericFisher => toy_metric_numeric(cfg.m, cfg.n)?,
    };
    let rows = [[g.get(0, 0), g.get(0, 1)], [g.get(1, 0), g.get(1, 1)]];
    let text = match cfg.format {
        Some(FormatArg::Json) => json_text(&json!({
            "m": cfg.m, "n": cfg.n,
            "metric": rows,
            "determinant": g.determinant(),
            "min_eigenvalue": g.min_eigenvalue(),
        })),
        _ => format!(
            "g = [[{:.12e}, {:.12e}],\n     [{:.12e}, {:.12e}]]\ndet g = {:.12e}\nmin eigenvalue = {:.12e}\n",
            rows[0][0],
            rows[0][1],
            rows[1][0],
            rows[1][1],
            g.determinant(),
            g.min_eigenvalue()
        ),
    };
    sink(out, cfg.out.as_deref(), &text)
}

fn cmd_volume(cmd: &VolumeCmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let file = load_file(&cmd.opts)?;
    let cfg = resolve(
        file,
        (None, None),
        &cmd.opts,
        &cmd.integration,
        cmd.region,
        (None, None, None, None),
        None,
        None,
        CommandDefaults {
            backend: BackendArg::Paper,
            method: MethodArg::GaussLegendre,
        },
    )?;
    let region = RegionSpec {
        kind: cfg.region,
        nc: cfg.nc,
    };
    let est = integrate_region(region, cfg.kappa, &cfg.integration)?;
    if est.is_zero_measure() {
        writeln!(
            err,
            "note: no evaluation point fell inside the region; volume is 0"
        )?;
    }
    let text = match cfg.format {
        Some(FormatArg::Json) => json_text(&serde_json::to_value(est).expect("serializable")),
        _ => format!(
            "{:.9} +- {:.3e} (evals {}, accepted {})\n",
            est.value, est.std_error, est.evals, est.accepted
        ),
    };
    sink(out, cfg.out.as_deref(), &text)
}

fn table_format(f: Option<FormatArg>) -> Result<TableFormat> {
    match f {
        None | Some(FormatArg::Csv) => Ok(TableFormat::Csv),
        Some(FormatArg::Json) => Ok(TableFormat::Json),
        Some(FormatArg::Text) => Err(Error::domain("tables are written as csv or json")),
    }
}

fn write_sweep(
    table: &SweepTable,
    format: TableFormat,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let mut buf = Vec::new();
    write_table(table, format, &mut buf)?;
    sink(
        out,
        path,
        &String::from_utf8(buf).expect("tables are utf-8"),
    )
}

fn cmd_sweep(cmd: &SweepCmd, out: &mut dyn Write) -> Result<()> {
    let file = load_file(&cmd.opts)?;
    let cfg = resolve(
        file,
        (None, None),
        &cmd.opts,
        &cmd.integration,
        None,
        (cmd.param, cmd.from, cmd.to, cmd.steps),
        None,
        cmd.plot.clone(),
        CommandDefaults {
            backend: BackendArg::Paper,
            method: MethodArg::McPolar,
        },
    )?;
    let format = table_format(cfg.format)?;
    let fixed = SweepFixed {
        theta: cfg.nc.theta(),
        eta: cfg.nc.eta(),
        kappa: cfg.kappa,
    };
    let table = sweep(cfg.param, &cfg.grid, fixed, &cfg.integration)?;
    write_sweep(&table, format, cfg.out.as_deref(), out)?;
    if let Some(plot) = &cfg.plot {
        emit_plot(&table, &default_series(cfg.param), plot)?;
    }
    Ok(())
}

/// Files written by `figures`, relative to the output directory.
pub const FIGURE_FILES: [&str; 7] = [
    "kappa.csv",
    "kappa.svg",
    "theta.csv",
    "theta.svg",
    "theta-volumes.svg",
    "eta.csv",
    "eta.svg",
];

fn cmd_figures(cmd: &FiguresCmd, out: &mut dyn Write) -> Result<()> {
    let cfg = integration_config(&cmd.opts, &cmd.integration, MethodArg::GaussLegendre)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
    fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let opts = cfg.integration;
    let jobs = [
        (
            SweepParam::Kappa,
            linear_grid(0.5, 4.0, 10)?,
            SweepFixed {
                theta: 0.0,
                eta: 0.0,
                kappa: 4.0,
            },
        ),
        (
            SweepParam::Theta,
            linear_grid(0.1, 1.0, 10)?,
            SweepFixed {
                theta: 0.0,
                eta: 0.0,
                kappa: 4.0,
            },
        ),
        (
            SweepParam::Eta,
            linear_grid(0.1, 1.0, 10)?,
            SweepFixed {
                theta: 0.0,
                eta: 0.0,
                kappa: 4.0,
            },
        ),
    ];
    for (param, grid, fixed) in jobs {
        let table = sweep(param, &grid, fixed, &opts)?;
        let name = param.name();
        crate::output::emit_table(&table, TableFormat::Csv, &dir.join(format!("{name}.csv")))?;
        emit_plot(
            &table,
            &default_series(param),
            &dir.join(format!("{name}.svg")),
        )?;
        if param == SweepParam::Theta {
            emit_plot(
                &table,
                &[Column::Quantum, Column::Separable, Column::Entangled],
                &dir.join("theta-volumes.svg"),
            )?;
        }
        writeln!(
            out,
            "{name}: {} rows written to {}",
            table.rows.len(),
            dir.display()
        )?;
    }
    Ok(())
}

fn cmd_report(cmd: &ReportCmd, out: &mut dyn Write) -> Result<()> {
    let file = load_file(&cmd.opts)?;
    let cfg = resolve(
        file,
        (None, None),
        &cmd.opts,
        &cmd.integration,
        None,
        (None, None, None, None),
        cmd.grid,
        None,
        CommandDefaults {
            backend: BackendArg::Paper,
            method: MethodArg::GaussLegendre,
        },
    )?;
    let opts = ReportOptions {
        grid: cfg.report_grid,
        budget: cfg.integration.budget,
        ..ReportOptions::default()
    };
    let report = discrepancy_report(&opts)?;
    let text = match cfg.format {
        Some(FormatArg::Json) => report.to_json()? + "\n",
        Some(FormatArg::Csv) => return Err(Error::domain("the report is written as text or json")),
        _ => report.render_text(),
    };
    sink(out, cfg.out.as_deref(), &text)
}

/// Runs the command line `argv` (program name first) against the given
/// streams and returns the process exit code: 0 on success, 1 on domain or
/// runtime errors, 2 on usage errors.
pub fn run_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Classify(c) => cmd_classify(c, out, err),
        Command::Spectrum(c) => cmd_spectrum(c, out),
        Command::Metric(c) => cmd_metric(c, out),
        Command::Volume(c) => cmd_volume(c, out, err),
        Command::Sweep(c) => cmd_sweep(c, out),
        Command::Figures(c) => cmd_figures(c, out),
        Command::Report(c) => cmd_report(c, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

/// [`run_with`] on standard output and standard error.
pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let argv: Vec<String> = std::iter::once("ncgeom")
            .chain(args.iter().copied())
            .map(String::from)
            .collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(&argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn classify_origin() {
        let (code, out, _) = call(&[
            "classify", "--m", "0", "--n", "0", "--theta", "0", "--eta", "0",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "Separable\n");
    }

    #[test]
    fn negative_values_parse() {
        let (code, out, _) = call(&["classify", "--m", "-0.3", "--n", "-0.2"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["classify", "--bogus", "1"]).0, 2);
        assert_eq!(call(&["classify", "--m", "abc"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&[]).0, 2);
    }

    #[test]
    fn domain_errors_exit_1() {
        let (code, _, err) = call(&["classify", "--m", "0.9", "--n", "0.9"]);
        assert_eq!(code, 1);
        assert!(
            err.starts_with("error:") && err.lines().count() == 1,
            "{err}"
        );
        assert_eq!(call(&["classify", "--theta", "2", "--eta", "1"]).0, 1);
        assert_eq!(call(&["volume", "--kappa", "-1"]).0, 1);
        assert_eq!(call(&["volume", "--budget", "10"]).0, 1);
    }

    #[test]
    fn config_file_and_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "m = 0.0\nn = 0.0\ntheta = 2.0\neta = 0.9\n").unwrap();
        let p = path.to_str().unwrap();
        // file alone gives θη ≥ 1
        assert_eq!(call(&["classify", "--config", p]).0, 1);
        let (code, out, _) = call(&["classify", "--config", p, "--theta", "0", "--eta", "0"]);
        assert_eq!((code, out.as_str()), (0, "Separable\n"));
        fs::write(&path, "unknown_key = 1\n").unwrap();
        assert_eq!(call(&["classify", "--config", p]).0, 1);
    }
}
