//! Command-line front end: experiment runner and plot-data emitter.
//!
//! Subcommands map to the library surfaces — `assoc` (association
//! probabilities), `meta` (meta distribution of SIR/SNR), `coverage`
//! (moments and their variance), `delay` (mean local delay and jitter),
//! `rate` (data-rate moments and meta distribution) and `validate`
//! (Monte Carlo against analytics). Every experiment yields one or more
//! named curves written as CSV files plus a `manifest.json`, or a table on
//! stdout when no output directory is given.
//!
//! Exit codes: 0 on success, 1 when `validate` finds disagreement (or a
//! numerical failure occurs), 2 on usage or configuration errors.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::mcsim::{self, SimOptions, ThetaPair};
use crate::metadist::{self, GilPelaezOptions};
use crate::model::{NetworkConfig, Params};
use crate::moments::{self, EvalPath, MomentQuery, Variant};
use crate::{assoc, MetaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Analytic,
    Mc,
    Both,
}

impl Mode {
    fn analytic(self) -> bool {
        self != Mode::Mc
    }
    fn mc(self) -> bool {
        self != Mode::Analytic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Hybrid,
    Uwave,
    MmwaveBackhaul,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Hybrid => Variant::Hybrid,
            VariantArg::Uwave => Variant::UWaveOnly,
            VariantArg::MmwaveBackhaul => Variant::MmWaveBackhaul,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "metacell", version, about = "Meta distributions of SIR/SNR and rate in a two-tier hybrid cellular network")]
pub struct Cli {
    /// JSON network configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV curves and manifest.json (stdout table if unset).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "analytic")]
    pub mode: Mode,
    #[arg(long, global = true, value_enum, default_value = "hybrid")]
    pub variant: VariantArg,
    /// Master seed for the simulation streams.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 20_000)]
    pub realizations: usize,
    /// Comma-separated SIR/SNR thresholds in dB (applied to both hops).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta_db: Option<Vec<f64>>,
    /// Reliability grid as START:STOP:POINTS (e.g. 0.01:0.99:99).
    #[arg(long, global = true)]
    pub x_grid: Option<String>,
    /// Parameter sweep NAME=START:STOP:POINTS (e.g. lambda2=20:100:9).
    #[arg(long, global = true)]
    pub sweep: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tier/branch association probabilities.
    Assoc,
    /// Meta distribution of the SIR/SNR at each threshold.
    Meta,
    /// Success-probability moments M1, M2 and their variance.
    Coverage,
    /// Mean local delay and jitter.
    Delay,
    /// Data-rate moments and the rate meta distribution.
    Rate {
        /// Target device rate on both device links, bit/s.
        #[arg(long, default_value_t = 1e9)]
        rate_device: f64,
        /// Target rate on the wireless backhaul, bit/s (0 = unconstrained).
        #[arg(long, default_value_t = 0.0)]
        rate_backhaul: f64,
    },
    /// Cross-check Monte Carlo against the analytic moments.
    Validate,
}

/// One named table of plot data.
#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub name: String,
    pub columns: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<Vec<f64>>,
}

/// Experiment result: curves plus human-readable summary lines.
#[derive(Debug, Default)]
pub struct Report {
    pub curves: Vec<Curve>,
    pub summary: Vec<String>,
    /// Set by `validate` when simulation and analytics disagree.
    pub validation_failed: bool,
}

/// Parse a `START:STOP:POINTS` grid specification.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(MetaError::ConfigParse(format!(
            "grid spec must be START:STOP:POINTS, got '{spec}'"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| MetaError::ConfigParse(format!("bad grid start '{}'", parts[0])))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| MetaError::ConfigParse(format!("bad grid stop '{}'", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| MetaError::ConfigParse(format!("bad grid point count '{}'", parts[2])))?;
    if n == 0 {
        return Err(MetaError::ConfigParse("grid needs at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (n - 1) as f64;
    Ok((0..n).map(|i| start + step * i as f64).collect())
}

/// Parse `NAME=START:STOP:POINTS`.
pub fn parse_sweep(spec: &str) -> Result<(String, Vec<f64>)> {
    let (name, grid) = spec.split_once('=').ok_or_else(|| {
        MetaError::ConfigParse(format!("sweep must be NAME=START:STOP:POINTS, got '{spec}'"))
    })?;
    Ok((name.trim().to_string(), parse_grid(grid)?))
}

/// Apply a sweep value to a named configuration field.
pub fn apply_sweep(cfg: &mut NetworkConfig, name: &str, value: f64) -> Result<()> {
    match name {
        "lambda1" => cfg.macro_tier.density_per_km2 = value,
        "lambda2" => cfg.small_tier.density_per_km2 = value,
        "n-antenna" => cfg.small_tier.n_antenna_elements = value.round().max(1.0) as u32,
        "los-ball-d" => cfg.mmwave.los_ball_d_m = value,
        "p-los" => cfg.mmwave.p_los = value,
        "p-nlos" => cfg.mmwave.p_nlos = value,
        "bias2-db" => cfg.small_tier.bias_db = value,
        "power2-dbm" => cfg.small_tier.power_dbm = value,
        "eta" => cfg.uwave.access_fraction_eta = value,
        other => {
            return Err(MetaError::ConfigParse(format!(
                "unknown sweep parameter '{other}' (try lambda1, lambda2, n-antenna, \
                 los-ball-d, p-los, p-nlos, bias2-db, power2-dbm, eta)"
            )))
        }
    }
    Ok(())
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

struct Context {
    cfg: NetworkConfig,
    params: Params,
    variant: Variant,
    mode: Mode,
    sim: SimOptions,
    thetas_db: Vec<f64>,
    xs: Vec<f64>,
    sweep: Option<(String, Vec<f64>)>,
}

impl Context {
    fn from_cli(cli: &Cli) -> Result<Self> {
        let cfg = match &cli.config {
            Some(path) => NetworkConfig::from_json_file(path)?,
            None => NetworkConfig::default(),
        };
        let params = cfg.to_params()?;
        let xs = parse_grid(cli.x_grid.as_deref().unwrap_or("0.01:0.99:99"))?;
        if xs.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(MetaError::ConfigParse(
                "reliability grid points must lie in [0, 1]".into(),
            ));
        }
        let sweep = cli.sweep.as_deref().map(parse_sweep).transpose()?;
        Ok(Self {
            cfg,
            params,
            variant: cli.variant.into(),
            mode: cli.mode,
            sim: SimOptions {
                realizations: cli.realizations,
                seed: cli.seed,
                ..SimOptions::default()
            },
            thetas_db: cli.theta_db.clone().unwrap_or_else(|| vec![-10.0, -5.0, 0.0, 5.0, 10.0]),
            xs,
            sweep,
        })
    }

    /// Configs visited by this experiment: the sweep grid, or just the
    /// base config labeled by NaN.
    fn sweep_points(&self) -> Result<Vec<(f64, Params)>> {
        match &self.sweep {
            None => Ok(vec![(f64::NAN, self.params.clone())]),
            Some((name, values)) => values
                .iter()
                .map(|&v| {
                    let mut cfg = self.cfg.clone();
                    apply_sweep(&mut cfg, name, v)?;
                    Ok((v, cfg.to_params()?))
                })
                .collect(),
        }
    }

    fn sweep_label(&self) -> String {
        self.sweep
            .as_ref()
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| "point".into())
    }
}

fn fmt_db(db: f64) -> String {
    format!("{db:+.0}dB").replace('+', "p").replace('-', "m")
}

fn total_moment(p: &Params, variant: Variant, b: f64, theta: f64) -> Result<moments::MomentResult> {
    moments::moment_total(
        &MomentQuery {
            order_b: Complex64::new(b, 0.0),
            theta_backhaul: theta,
            theta_device: theta,
            variant,
            eval_path: if b < 0.0 { EvalPath::Series } else { EvalPath::DirectQuadrature },
        },
        p,
    )
}

fn run_assoc(ctx: &Context) -> Result<Report> {
    let mut rep = Report::default();
    let mut curve = Curve {
        name: "association".into(),
        columns: vec![ctx.sweep_label(), "a_direct".into(), "a_sbs_los".into(), "a_sbs_nlos".into()],
        rows: Vec::new(),
    };
    let mc_cols = ctx.mode.mc();
    if mc_cols {
        curve.columns.extend(["mc_direct".into(), "mc_sbs_los".into(), "mc_sbs_nlos".into()]);
    }
    for (v, p) in ctx.sweep_points()? {
        let mut row = vec![v];
        if ctx.mode.analytic() {
            let a = assoc::assoc_probs(&p)?;
            row.extend([a.a1, a.a2_los, a.a2_nlos]);
        } else {
            row.extend([f64::NAN; 3]);
        }
        if mc_cols {
            let th = [ThetaPair { theta_backhaul: 1.0, theta_device: 1.0 }];
            let out = mcsim::run(&p, ctx.variant, &th, &ctx.sim)?;
            let n = ctx.sim.realizations as f64;
            row.extend([
                out.assoc.direct as f64 / n,
                out.assoc.access_los as f64 / n,
                out.assoc.access_nlos as f64 / n,
            ]);
        }
        curve.rows.push(row);
    }
    if let Some(last) = curve.rows.last() {
        rep.summary.push(format!(
            "association (last point): direct {:.6}, SBS-LOS {:.6}, SBS-NLOS {:.6}",
            last[1], last[2], last[3]
        ));
    }
    rep.curves.push(curve);
    Ok(rep)
}

fn run_meta(ctx: &Context) -> Result<Report> {
    let mut rep = Report::default();
    for &th_db in &ctx.thetas_db {
        let theta = db_to_linear(th_db);
        let mut curve = Curve {
            name: format!("meta_theta{}", fmt_db(th_db)),
            columns: vec!["x".into()],
            rows: ctx.xs.iter().map(|&x| vec![x]).collect(),
        };
        if ctx.mode.analytic() {
            let mc = metadist::meta_sir(
                theta,
                theta,
                &ctx.params,
                ctx.variant,
                &ctx.xs,
                &GilPelaezOptions::default(),
            )?;
            curve.columns.push("ccdf_exact".into());
            for (row, &v) in curve.rows.iter_mut().zip(&mc.ccdf_exact) {
                row.push(v);
            }
            if !mc.ccdf_beta.is_empty() {
                curve.columns.push("ccdf_beta".into());
                for (row, &v) in curve.rows.iter_mut().zip(&mc.ccdf_beta) {
                    row.push(v);
                }
            }
            rep.summary.push(match mc.beta {
                Some(fit) => format!(
                    "theta {th_db} dB: M1 {:.6}, M2 {:.6}, Beta(a={:.4}, b={:.4})",
                    mc.m1, mc.m2, fit.a, fit.b
                ),
                None => format!("theta {th_db} dB: M1 {:.6}, M2 {:.6}, Beta fit degenerate", mc.m1, mc.m2),
            });
        }
        if ctx.mode.mc() {
            let th = [ThetaPair { theta_backhaul: theta, theta_device: theta }];
            let out = mcsim::run(&ctx.params, ctx.variant, &th, &ctx.sim)?;
            let emp = mcsim::empirical_meta(&out.csp[0], &ctx.xs);
            curve.columns.push("ccdf_mc".into());
            for (row, &v) in curve.rows.iter_mut().zip(&emp) {
                row.push(v);
            }
        }
        rep.curves.push(curve);
    }
    Ok(rep)
}

fn run_coverage(ctx: &Context) -> Result<Report> {
    let mut rep = Report::default();
    let mut curve = Curve {
        name: "coverage".into(),
        columns: vec!["theta_db".into(), "m1".into(), "m2".into(), "variance".into()],
        rows: Vec::new(),
    };
    if ctx.mode.mc() {
        curve.columns.extend(["m1_mc".into(), "m1_mc_se".into()]);
    }
    let mc_out = if ctx.mode.mc() {
        let ths: Vec<ThetaPair> = ctx
            .thetas_db
            .iter()
            .map(|&db| {
                let t = db_to_linear(db);
                ThetaPair { theta_backhaul: t, theta_device: t }
            })
            .collect();
        Some(mcsim::run(&ctx.params, ctx.variant, &ths, &ctx.sim)?)
    } else {
        None
    };
    for (k, &th_db) in ctx.thetas_db.iter().enumerate() {
        let theta = db_to_linear(th_db);
        let m1 = total_moment(&ctx.params, ctx.variant, 1.0, theta)?.value.re;
        let m2 = total_moment(&ctx.params, ctx.variant, 2.0, theta)?.value.re;
        let mut row = vec![th_db, m1, m2, (m2 - m1 * m1).max(0.0)];
        if let Some(out) = &mc_out {
            let (est, se) = mcsim::empirical_moment(&out.csp[k], 1.0, ctx.sim.blocks);
            row.extend([est, se]);
        }
        rep.summary.push(format!(
            "theta {th_db:+.1} dB: coverage {m1:.6}, variance {:.6}",
            (m2 - m1 * m1).max(0.0)
        ));
        curve.rows.push(row);
    }
    rep.curves.push(curve);
    Ok(rep)
}

fn run_delay(ctx: &Context) -> Result<Report> {
    let mut rep = Report::default();
    let theta = db_to_linear(*ctx.thetas_db.first().unwrap_or(&-10.0));
    let mut curve = Curve {
        name: "delay".into(),
        columns: vec![ctx.sweep_label(), "mean_delay".into(), "jitter".into()],
        rows: Vec::new(),
    };
    for (v, p) in ctx.sweep_points()? {
        let (delay, jitter) = match ctx.variant {
            Variant::Hybrid => {
                let d = moments::mean_local_delay(theta, theta, &p)?;
                let j = moments::network_jitter(theta, theta, &p)?;
                (d, j.value.re)
            }
            _ => {
                let d = total_moment(&p, ctx.variant, -1.0, theta)?;
                let d2 = total_moment(&p, ctx.variant, -2.0, theta)?;
                let j = if d.diverged || d2.diverged {
                    f64::INFINITY
                } else {
                    (d2.value.re - d.value.re * d.value.re).max(0.0)
                };
                (d, j)
            }
        };
        let dv = if delay.diverged { f64::INFINITY } else { delay.value.re };
        curve.rows.push(vec![v, dv, jitter]);
        rep.summary.push(if delay.diverged {
            format!("{} = {v}: mean local delay diverges at this threshold", ctx.sweep_label())
        } else {
            format!("{} = {v}: mean local delay {dv:.6}, jitter {jitter:.6}", ctx.sweep_label())
        });
    }
    rep.curves.push(curve);
    Ok(rep)
}

fn run_rate(ctx: &Context, rate_device: f64, rate_backhaul: f64) -> Result<Report> {
    let mut rep = Report::default();
    let rates = (rate_device, rate_device, rate_backhaul);
    let mut moments_curve = Curve {
        name: "rate_moments".into(),
        columns: vec![ctx.sweep_label(), "q1".into(), "q2".into()],
        rows: Vec::new(),
    };
    for (v, p) in ctx.sweep_points()? {
        let q1 = moments::rate_moment(Complex64::new(1.0, 0.0), rates, &p)?;
        let q2 = moments::rate_moment(Complex64::new(2.0, 0.0), rates, &p)?;
        moments_curve.rows.push(vec![v, q1.value.re, q2.value.re]);
        rep.summary.push(format!(
            "{} = {v}: rate coverage Q1 {:.6}, Q2 {:.6}",
            ctx.sweep_label(),
            q1.value.re,
            q2.value.re
        ));
    }
    rep.curves.push(moments_curve);
    // Rate meta distribution at the base configuration.
    let mc = metadist::meta_rate(rates, &ctx.params, &ctx.xs, &GilPelaezOptions::default())?;
    let mut curve = Curve {
        name: "rate_meta".into(),
        columns: vec!["x".into(), "ccdf_exact".into()],
        rows: ctx
            .xs
            .iter()
            .zip(&mc.ccdf_exact)
            .map(|(&x, &c)| vec![x, c])
            .collect(),
    };
    if !mc.ccdf_beta.is_empty() {
        curve.columns.push("ccdf_beta".into());
        for (row, &v) in curve.rows.iter_mut().zip(&mc.ccdf_beta) {
            row.push(v);
        }
    }
    rep.curves.push(curve);
    Ok(rep)
}

fn run_validate(ctx: &Context) -> Result<Report> {
    let mut rep = Report::default();
    let ths: Vec<ThetaPair> = ctx
        .thetas_db
        .iter()
        .map(|&db| {
            let t = db_to_linear(db);
            ThetaPair { theta_backhaul: t, theta_device: t }
        })
        .collect();
    let out = mcsim::run(&ctx.params, ctx.variant, &ths, &ctx.sim)?;
    let mut curve = Curve {
        name: "validate".into(),
        columns: vec![
            "theta_db".into(),
            "m1_analytic".into(),
            "m1_mc".into(),
            "m1_mc_se".into(),
            "zscore".into(),
        ],
        rows: Vec::new(),
    };
    let mut failed = false;
    for (k, &th_db) in ctx.thetas_db.iter().enumerate() {
        let theta = db_to_linear(th_db);
        let m1 = total_moment(&ctx.params, ctx.variant, 1.0, theta)?.value.re;
        let (est, se) = mcsim::empirical_moment(&out.csp[k], 1.0, ctx.sim.blocks);
        // Allow a small absolute floor on top of 4 sigma so tiny runs
        // with noisy jackknife standard errors do not flag spuriously.
        let z = (est - m1) / se.max(1e-12);
        let ok = (est - m1).abs() <= 4.0 * se + 5e-3;
        failed |= !ok;
        curve.rows.push(vec![th_db, m1, est, se, z]);
        rep.summary.push(format!(
            "theta {th_db:+.1} dB: analytic {m1:.6} vs MC {est:.6} +/- {se:.6} [{}]",
            if ok { "ok" } else { "MISMATCH" }
        ));
    }
    rep.summary.push(format!(
        "backhaul/access CSP correlation: {:.4}; empty-tier resamples: {}",
        out.corr_backhaul_access, out.resampled_empty
    ));
    rep.curves.push(curve);
    rep.validation_failed = failed;
    Ok(rep)
}

/// Run the experiment selected on the command line.
pub fn run_experiment(cli: &Cli) -> Result<Report> {
    let ctx = Context::from_cli(cli)?;
    match &cli.command {
        Command::Assoc => run_assoc(&ctx),
        Command::Meta => run_meta(&ctx),
        Command::Coverage => run_coverage(&ctx),
        Command::Delay => run_delay(&ctx),
        Command::Rate { rate_device, rate_backhaul } => run_rate(&ctx, *rate_device, *rate_backhaul),
        Command::Validate => run_validate(&ctx),
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: String,
    variant: &'a str,
    mode: &'a str,
    files: Vec<ManifestEntry>,
    config: &'a NetworkConfig,
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    columns: Vec<String>,
    rows: usize,
}

/// Write each curve as CSV into `dir` plus a `manifest.json` describing
/// them and echoing the resolved configuration.
pub fn emit_plotdata(report: &Report, cli: &Cli, dir: &Path) -> Result<()> {
    let io_err = |source: std::io::Error| MetaError::Io {
        path: dir.display().to_string(),
        source,
    };
    fs::create_dir_all(dir).map_err(io_err)?;
    let mut entries = Vec::new();
    for curve in &report.curves {
        let file = format!("{}.csv", curve.name);
        let path = dir.join(&file);
        let mut w = csv::Writer::from_path(&path).map_err(|e| MetaError::ConfigParse(e.to_string()))?;
        w.write_record(&curve.columns)
            .map_err(|e| MetaError::ConfigParse(e.to_string()))?;
        for row in &curve.rows {
            w.write_record(row.iter().map(|v| format!("{v:.12e}")))
                .map_err(|e| MetaError::ConfigParse(e.to_string()))?;
        }
        w.flush().map_err(io_err)?;
        entries.push(ManifestEntry {
            file,
            columns: curve.columns.clone(),
            rows: curve.rows.len(),
        });
    }
    let cfg = match &cli.config {
        Some(path) => NetworkConfig::from_json_file(path)?,
        None => NetworkConfig::default(),
    };
    let manifest = Manifest {
        command: format!("{:?}", cli.command),
        variant: match cli.variant {
            VariantArg::Hybrid => "hybrid",
            VariantArg::Uwave => "uwave",
            VariantArg::MmwaveBackhaul => "mmwave-backhaul",
        },
        mode: match cli.mode {
            Mode::Analytic => "analytic",
            Mode::Mc => "mc",
            Mode::Both => "both",
        },
        files: entries,
        config: &cfg,
    };
    let mut f = fs::File::create(dir.join("manifest.json")).map_err(io_err)?;
    serde_json::to_writer_pretty(&mut f, &manifest)
        .map_err(|e| MetaError::ConfigParse(e.to_string()))?;
    f.write_all(b"\n").map_err(io_err)?;
    Ok(())
}

fn print_report(report: &Report) {
    for line in &report.summary {
        println!("{line}");
    }
    for curve in &report.curves {
        println!("\n# {}", curve.name);
        println!("{}", curve.columns.join(","));
        for row in &curve.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.6e}")).collect();
            println!("{}", cells.join(","));
        }
    }
}

/// Entry point used by the binary: parses arguments, runs the experiment,
/// emits output, maps errors to exit codes.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap reports usage problems with exit code 2 and help/version
            // with 0; keep that convention.
            e.exit();
        }
    };
    match run_experiment(&cli) {
        Ok(report) => {
            if let Some(dir) = &cli.output {
                if let Err(e) = emit_plotdata(&report, &cli, dir) {
                    eprintln!("error: {e}");
                    return 2;
                }
                for line in &report.summary {
                    println!("{line}");
                }
                println!("wrote {} curve(s) to {}", report.curves.len(), dir.display());
            } else {
                print_report(&report);
            }
            if report.validation_failed {
                eprintln!("validation failed: simulation disagrees with analytics");
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                MetaError::InvalidConfig(_) | MetaError::ConfigParse(_) | MetaError::Io { .. } => 2,
                _ => 1,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a:1:3").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn sweep_parsing_and_application() {
        let (name, vals) = parse_sweep("lambda2=20:100:5").unwrap();
        assert_eq!(name, "lambda2");
        assert_eq!(vals, vec![20.0, 40.0, 60.0, 80.0, 100.0]);
        let mut cfg = NetworkConfig::default();
        apply_sweep(&mut cfg, "lambda2", 42.0).unwrap();
        assert_eq!(cfg.small_tier.density_per_km2, 42.0);
        apply_sweep(&mut cfg, "n-antenna", 50.0).unwrap();
        assert_eq!(cfg.small_tier.n_antenna_elements, 50);
        assert!(apply_sweep(&mut cfg, "nonsense", 1.0).is_err());
        assert!(parse_sweep("lambda2").is_err());
    }

    #[test]
    fn cli_parses_and_runs_assoc() {
        let cli = Cli::try_parse_from(["metacell", "assoc"]).unwrap();
        let rep = run_experiment(&cli).unwrap();
        assert_eq!(rep.curves.len(), 1);
        assert_eq!(rep.curves[0].rows.len(), 1);
        // a1 + a2L + a2N ~ 1.
        let row = &rep.curves[0].rows[0];
        assert!((row[1] + row[2] + row[3] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cli_coverage_with_sweep_and_thetas() {
        let cli = Cli::try_parse_from([
            "metacell",
            "coverage",
            "--theta-db",
            "-10,0",
        ])
        .unwrap();
        let rep = run_experiment(&cli).unwrap();
        let curve = &rep.curves[0];
        assert_eq!(curve.rows.len(), 2);
        // Coverage decreases with threshold.
        assert!(curve.rows[0][1] > curve.rows[1][1]);
    }

    #[test]
    fn emit_plotdata_writes_csv_and_manifest() {
        let cli = Cli::try_parse_from(["metacell", "assoc"]).unwrap();
        let rep = run_experiment(&cli).unwrap();
        let dir = std::env::temp_dir().join(format!("metacell-cli-test-{}", std::process::id()));
        emit_plotdata(&rep, &cli, &dir).unwrap();
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["files"][0]["file"], "association.csv");
        let csv_text = fs::read_to_string(dir.join("association.csv")).unwrap();
        assert!(csv_text.starts_with("point,a_direct"));
        fs::remove_dir_all(&dir).unwrap();
    }
}
