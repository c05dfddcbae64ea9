//! Command-line front end.
//!
//! Every setting has a flag and a config-file key of the same name
//! (`--t-min` and `t_min`); flags win over the file. Exit codes: 0 success,
//! 1 I/O failure, 2 configuration error, 3 singular input, 4 a solve did not
//! certify (outputs are still written).

pub mod config;
pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{
    energy_curve, large_t_model, low_energy_reference, ps_compare, validate_large_t, validate_small_t, AnalysisOptions,
    AsymptoticReport, EnergyCurve, PsOptions, SmallTReport,
};
use crate::equilibrium::{capacity, equilibrium, EnergyReport, KernelSpec};
use crate::error::{Error, Result};
use crate::geometry::{discretize, QuadratureCloud};
use crate::kernel::{
    closed_form_n3_q2, kernel_dt, kernel_dz, kernel_value, kernel_value_truncated, StripPoint,
};

pub use config::{parse_config, read_config, GridSpec, PairSpec, RunConfig, SweepSpec};
pub use output::{read_json, Diagnostics, Metadata, Report, Table};

#[derive(Parser, Debug)]
#[command(name = "strip-riesz", version, about = "Riesz energies of conductors between insulating hyperplanes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the strip kernel at one pair of points.
    Kernel(Flags),
    /// Solve for the equilibrium measure of a discretized shape.
    Equilibrium(Flags),
    /// Energy as a function of the strip thickness.
    Curve(Flags),
    /// Check large- and small-thickness asymptotics.
    Asymptotics(Flags),
    /// Compare a convex shape with the ball of equal Riesz energy.
    Ps(Flags),
}

/// Flags shared by all subcommands; each maps to the config key of the same
/// name with dashes replaced by underscores.
#[derive(Args, Debug, Default, Serialize)]
struct Flags {
    /// Config file of `key = value` lines.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// disk | ball | ellipse | rectangle | square | segment | annulus | file
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    width: Option<String>,
    #[arg(long)]
    height: Option<String>,
    #[arg(long)]
    length: Option<String>,
    #[arg(long)]
    inner: Option<String>,
    #[arg(long)]
    outer: Option<String>,
    /// Point-cloud file for `--shape file`.
    #[arg(long)]
    path: Option<String>,
    /// Treat the last coordinate as height in the strip.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    vertical: Option<String>,
    /// Comma-separated centre.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    /// Horizontal dimension.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// Half-thickness, or `inf`.
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// Use the sinh/cosh form when n = 3, q = 2.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    closed_form: Option<String>,
    #[arg(long)]
    resolution: Option<String>,
    #[arg(long)]
    resolution2: Option<String>,
    #[arg(long)]
    t_min: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    count: Option<String>,
    #[arg(long)]
    large_t_min: Option<String>,
    #[arg(long)]
    large_t_max: Option<String>,
    #[arg(long)]
    large_count: Option<String>,
    #[arg(long)]
    small_t_min: Option<String>,
    #[arg(long)]
    small_t_max: Option<String>,
    #[arg(long)]
    small_count: Option<String>,
    #[arg(long)]
    large_t_factor: Option<String>,
    /// Self-distance factor of the matrix diagonal.
    #[arg(long)]
    sigma: Option<String>,
    /// auto | frank_wolfe | projected_gradient
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    frostman_tol: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Prefix for output file names.
    #[arg(long)]
    prefix: Option<String>,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    #[arg(long)]
    sweep_max: Option<String>,
    #[arg(long)]
    sweep_count: Option<String>,
}

impl Flags {
    /// Config file values overlaid with the flags that were given.
    fn merged(&self) -> Result<BTreeMap<String, String>> {
        let mut map = match &self.config {
            Some(path) => read_config(path).map_err(|e| match e {
                Error::Io(io) => Error::invalid("config", format!("{}: {io}", path.display())),
                other => other,
            })?,
            None => BTreeMap::new(),
        };
        if let serde_json::Value::Object(fields) = serde_json::to_value(self)? {
            for (k, v) in fields {
                if let serde_json::Value::String(s) = v {
                    map.insert(k, s);
                }
            }
        }
        Ok(map)
    }
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invalid { .. } | Error::Parse { .. } | Error::Domain(_) | Error::Truncation(_) => 2,
        Error::Singular(_) => 3,
        Error::Solver(_) => 4,
        Error::Io(_) | Error::Json(_) => 1,
    }
}

/// Outcome of a command that ran to completion.
struct Outcome {
    converged: bool,
    outputs: Vec<PathBuf>,
}

/// Parse arguments, run the command and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    let (name, flags) = match &cli.command {
        Command::Kernel(f) => ("kernel", f),
        Command::Equilibrium(f) => ("equilibrium", f),
        Command::Curve(f) => ("curve", f),
        Command::Asymptotics(f) => ("asymptotics", f),
        Command::Ps(f) => ("ps", f),
    };
    let result = flags
        .merged()
        .and_then(|map| RunConfig::from_map(&map, name))
        .and_then(|cfg| {
            let outcome = match name {
                "kernel" => cmd_kernel(&cfg),
                "equilibrium" => cmd_equilibrium(&cfg),
                "curve" => cmd_curve(&cfg),
                "asymptotics" => cmd_asymptotics(&cfg),
                _ => cmd_ps(&cfg),
            }?;
            if !outcome.outputs.is_empty() {
                write_metadata(&cfg, name, &args, &outcome.outputs)?;
            }
            Ok(outcome)
        });
    match result {
        Ok(o) if o.converged => 0,
        Ok(_) => {
            eprintln!("warning: at least one solve did not certify");
            4
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads() {
    let threads = std::env::var("STRIP_RIESZ_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if threads > 0 {
        // fails harmlessly if the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

fn write_metadata(cfg: &RunConfig, name: &str, args: &[OsString], outputs: &[PathBuf]) -> Result<()> {
    let meta = Metadata {
        command: name.to_string(),
        arguments: args.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
        version: output::VERSION.to_string(),
        unix_time: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        threads: rayon::current_num_threads(),
        outputs: outputs.to_vec(),
    };
    output::write_json(&cfg.output_path(&format!("{name}.meta.json")), &meta)
}

fn analysis_options(cfg: &RunConfig) -> AnalysisOptions {
    AnalysisOptions {
        policy: cfg.policy,
        solver: cfg.solver,
    }
}

fn cloud_for(cfg: &RunConfig, resolution: usize) -> Result<QuadratureCloud> {
    let cloud = discretize(&cfg.shape, resolution)?;
    if cloud.dim() != cfg.params.n() {
        return Err(Error::invalid(
            "n",
            format!("kernel dimension {} does not match the shape's {}", cfg.params.n(), cloud.dim()),
        ));
    }
    Ok(cloud)
}

fn diagnostics<'a>(reports: impl Iterator<Item = &'a EnergyReport>, extra: Vec<String>) -> Diagnostics {
    let mut converged = true;
    let mut warnings = extra;
    for r in reports {
        converged &= r.converged;
        warnings.extend(r.warnings.iter().cloned());
    }
    warnings.sort();
    warnings.dedup();
    Diagnostics { converged, warnings }
}

#[derive(Serialize)]
struct KernelResults {
    value: f64,
    dz: Option<f64>,
    dt: Option<f64>,
    truncation_j_max: Option<u64>,
    truncation_tail_bound: Option<f64>,
    truncated_value: Option<f64>,
    closed_form: Option<f64>,
    /// `t·G_t - log(1/d)` for planar `q = 1` pairs.
    log_excess: Option<f64>,
}

fn cmd_kernel(cfg: &RunConfig) -> Result<Outcome> {
    let pair = cfg.pair.as_ref().expect("kernel config has a pair");
    let p = cfg.params;
    let (xh, yh) = (StripPoint::new(pair.x.clone(), pair.z), StripPoint::new(pair.y.clone(), pair.w));
    let value = kernel_value(&xh, &yh, &p)?;
    println!("value           {value:.16e}");

    let finite = p.t().is_finite();
    let d = pair.x.iter().zip(&pair.y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let mut res = KernelResults {
        value,
        dz: None,
        dt: None,
        truncation_j_max: None,
        truncation_tail_bound: None,
        truncated_value: None,
        closed_form: None,
        log_excess: None,
    };
    if finite {
        let dz = kernel_dz(&xh, &yh, &p)?;
        let dt = kernel_dt(&xh, &yh, &p)?;
        println!("d/dz            {dz:.16e}");
        println!("d/dt            {dt:.16e}");
        let series = p.with_closed_form(false);
        let (tv, plan) = kernel_value_truncated(&xh, &yh, &series)?;
        println!("truncation      J = {}, tail bound {:.3e}", plan.j_max, plan.tail_bound);
        println!("truncated value {tv:.16e} (delta {:.3e})", tv - value);
        res.dz = Some(dz);
        res.dt = Some(dt);
        res.truncation_j_max = Some(plan.j_max);
        res.truncation_tail_bound = Some(plan.tail_bound);
        res.truncated_value = Some(tv);
        if p.n() == 3 && p.q() == 2.0 {
            let cf = closed_form_n3_q2(&xh, &yh, p.t())?;
            let sv = kernel_value(&xh, &yh, &series)?;
            println!("closed form     {cf:.16e} (series delta {:.3e})", sv - cf);
            res.closed_form = Some(cf);
        }
        if p.q() == 1.0 && pair.z == 0.0 && pair.w == 0.0 && d > 0.0 {
            let excess = p.t() * value + d.ln();
            println!("t*G - log(1/d)  {excess:.16e}");
            res.log_excess = Some(excess);
        }
    }

    let mut outputs = Vec::new();
    if cfg.out.is_some() || cfg.sweep.is_some() {
        if let Some(sweep) = cfg.sweep {
            let mut table = Table::new(&["distance", "value", "closed_form"]);
            for i in 1..=sweep.count {
                let dist = sweep.max * i as f64 / sweep.count as f64;
                let mut y = pair.x.clone();
                y[0] += dist;
                let ys = StripPoint::new(y, pair.w);
                let v = kernel_value(&xh, &ys, &p.with_closed_form(false))?;
                let cf = if p.n() == 3 && p.q() == 2.0 && finite {
                    closed_form_n3_q2(&xh, &ys, p.t())?
                } else {
                    f64::NAN
                };
                table.push(vec![dist, v, cf]);
            }
            let path = cfg.output_path("kernel_sweep.csv");
            output::write_table(&path, &table)?;
            outputs.push(path);
        }
        let path = cfg.output_path("kernel.json");
        output::write_json(&path, &Report::new(cfg, &res, Diagnostics { converged: true, warnings: vec![] }))?;
        outputs.push(path);
    }
    Ok(Outcome { converged: true, outputs })
}

#[derive(Serialize)]
struct EquilibriumResults<'a> {
    points: usize,
    energy: f64,
    capacity: Option<f64>,
    report: &'a EnergyReport,
}

fn cmd_equilibrium(cfg: &RunConfig) -> Result<Outcome> {
    let cloud = cloud_for(cfg, cfg.resolution)?;
    let spec = KernelSpec::Strip(cfg.params);
    let (w, report) = equilibrium(&cloud, &spec, cfg.policy, &cfg.solver)?;
    let cap = if cfg.params.t().is_infinite() {
        capacity(report.energy, cfg.params.q()).ok()
    } else {
        None
    };
    println!("points          {}", cloud.len());
    println!("energy          {:.16e}", report.energy);
    if let Some(c) = cap {
        println!("capacity        {c:.16e}");
    }
    println!(
        "certificate     gap {:.3e}, support {}, method {}",
        report.frostman_gap, report.support_size, report.method
    );

    let dim = cloud.dim();
    let mut header: Vec<String> = (1..=dim).map(|k| format!("x{k}")).collect();
    header.push("z".into());
    header.push("weight".into());
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new(&refs);
    for i in 0..cloud.len() {
        let mut row = cloud.points()[i].clone();
        row.push(cloud.heights()[i]);
        row.push(w.weights()[i]);
        table.push(row);
    }
    let measure_path = cfg.output_path("equilibrium_measure.csv");
    output::write_table(&measure_path, &table)?;
    let diag = diagnostics(std::iter::once(&report), vec![]);
    let converged = diag.converged;
    let results = EquilibriumResults {
        points: cloud.len(),
        energy: report.energy,
        capacity: cap,
        report: &report,
    };
    let json_path = cfg.output_path("equilibrium.json");
    output::write_json(&json_path, &Report::new(cfg, results, diag))?;
    Ok(Outcome {
        converged,
        outputs: vec![measure_path, json_path],
    })
}

/// CSV rows of a curve, the whole-space sample last as `inf`.
pub fn curve_table(curve: &EnergyCurve) -> Table {
    let mut table = Table::new(&["t", "energy", "t_times_energy", "frostman_gap", "converged"]);
    for s in curve.samples.iter().chain(std::iter::once(&curve.infinity)) {
        let gap = s.report.as_ref().map_or(f64::NAN, |r| r.frostman_gap);
        let te = if s.t.is_finite() { s.t * s.energy } else { f64::INFINITY };
        table.push(vec![s.t, s.energy, te, gap, f64::from(u8::from(s.converged()))]);
    }
    table
}

fn cmd_curve(cfg: &RunConfig) -> Result<Outcome> {
    let cloud = cloud_for(cfg, cfg.resolution)?;
    let grid = cfg.grid.values()?;
    let mut curve = energy_curve(&cloud, &cfg.params, &grid, &analysis_options(cfg))?;
    curve.shape = Some(cfg.shape.clone());
    for s in curve.samples.iter().chain(std::iter::once(&curve.infinity)) {
        println!("t {:>12}  E {:.12e}", output::format_number(s.t), s.energy);
    }
    let errors: Vec<String> = curve
        .samples
        .iter()
        .chain(std::iter::once(&curve.infinity))
        .filter_map(|s| s.error.as_ref().map(|e| format!("t = {}: {e}", s.t)))
        .collect();
    let diag = diagnostics(curve.reports(), errors);
    let converged = diag.converged && curve.all_ok();
    let csv = cfg.output_path("curve.csv");
    output::write_table(&csv, &curve_table(&curve))?;
    let json = cfg.output_path("curve.json");
    output::write_json(&json, &Report::new(cfg, &curve, diag))?;
    Ok(Outcome {
        converged,
        outputs: vec![csv, json],
    })
}

#[derive(Serialize, serde::Deserialize, Debug, Clone, PartialEq)]
pub struct AsymptoticsResults {
    pub large_t: AsymptoticReport,
    pub small_t: SmallTReport,
    pub fitted_slope: Option<f64>,
}

fn cmd_asymptotics(cfg: &RunConfig) -> Result<Outcome> {
    let cloud = cloud_for(cfg, cfg.resolution)?;
    let opts = analysis_options(cfg);
    let diameter = cloud.horizontal_diameter();
    let large = cfg.large_grid.unwrap_or(GridSpec {
        t_min: 5.0 * diameter,
        t_max: 500.0 * diameter,
        count: 9,
    });
    let h = cloud.max_spacing();
    let small = cfg.small_grid.unwrap_or(GridSpec {
        t_min: 2.0 * h,
        t_max: 12.0 * h,
        count: 6,
    });
    let large_curve = energy_curve(&cloud, &cfg.params, &large.values()?, &opts)?;
    let model = large_t_model(&cloud, &cfg.params, &opts)?;
    let large_report = validate_large_t(&large_curve, &model)?;

    let small_curve = energy_curve(&cloud, &cfg.params, &small.values()?, &opts)?;
    let reference = low_energy_reference(&cloud, cfg.params.q(), &opts)?;
    let small_report = validate_small_t(&small_curve, reference, cfg.shape.is_convex_body())?;

    println!(
        "large t: slope {} ({:?}), coefficient error {:.3e}",
        large_report
            .fitted_slope
            .map_or("n/a".to_string(), |s| format!("{s:.4}")),
        large_report.verdict,
        large_report.coefficient_error
    );
    println!(
        "small t: limit {:.8} vs reference {:.8} (abs {:.3e}), lower bound {}",
        small_report.extrapolated_limit,
        small_report.reference,
        small_report.absolute_error,
        if small_report.lower_bound_holds { "holds" } else { "violated" }
    );

    let mut table = Table::new(&["t", "log_t", "residual", "log_abs_residual"]);
    for (t, r) in large_report.t.iter().zip(&large_report.residuals) {
        table.push(vec![*t, t.ln(), *r, r.abs().ln()]);
    }
    let csv = cfg.output_path("asymptotics_residuals.csv");
    output::write_table(&csv, &table)?;

    let diag = diagnostics(large_curve.reports().chain(small_curve.reports()), small_report.notes.clone());
    let converged = diag.converged && large_curve.all_ok() && small_curve.all_ok();
    let results = AsymptoticsResults {
        fitted_slope: large_report.fitted_slope,
        large_t: large_report,
        small_t: small_report,
    };
    let json = cfg.output_path("asymptotics.json");
    output::write_json(&json, &Report::new(cfg, results, diag))?;
    Ok(Outcome {
        converged,
        outputs: vec![csv, json],
    })
}

fn cmd_ps(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.grid.values()?;
    let opts = PsOptions {
        resolutions: (cfg.resolution, cfg.resolution2),
        large_t_factor: cfg.large_t_factor,
        analysis: analysis_options(cfg),
    };
    let report = ps_compare(&cfg.shape, &cfg.params, &grid, &opts)?;
    println!("matched ball radius {:.10}", report.fine.ball_radius);
    for r in &report.rows {
        println!("t {:>10.4}  margin {:+.6e} ± {:.2e}", r.t, r.margin, r.error_bar);
    }
    println!(
        "all margins within error bars: {}; large-t signs agree: {}",
        report.all_within_error, report.large_t_sign_agrees
    );
    let mut table = Table::new(&["t", "energy_set", "energy_ball", "margin", "margin_coarse", "error_bar", "large_t"]);
    for r in &report.rows {
        table.push(vec![
            r.t,
            r.energy_set,
            r.energy_ball,
            r.margin,
            r.margin_coarse,
            r.error_bar,
            f64::from(u8::from(r.large_t)),
        ]);
    }
    let csv = cfg.output_path("ps_margins.csv");
    output::write_table(&csv, &table)?;
    let levels = [&report.coarse, &report.fine];
    let reports = levels
        .iter()
        .flat_map(|l| l.set_curve.reports().chain(l.ball_curve.reports()));
    let diag = diagnostics(reports, vec![]);
    let converged = diag.converged
        && levels
            .iter()
            .all(|l| l.set_curve.all_ok() && l.ball_curve.all_ok());
    let json = cfg.output_path("ps.json");
    output::write_json(&json, &Report::new(cfg, &report, diag))?;
    Ok(Outcome {
        converged,
        outputs: vec![csv, json],
    })
}

