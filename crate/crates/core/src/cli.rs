//! Batch commands behind the `lpmhd` binary: single runs, ε-sweeps and the
//! verification suite. Every command returns a process exit code.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{
    fit_euler_growth_constant, fit_lifespan_constant, lifespan_bound_new, lifespan_bound_old, t_star_empirical,
    DiagnosticsRecord, InitialNorms, LifespanEstimate, LifespanSample, TStar, CSV_COLUMNS,
};
use crate::dynamics::snapshot::write_snapshot;
use crate::dynamics::{run_simulation_with, RunOptions, SimConfig, Termination, Trajectory};
use crate::error::{Error, Result};
use crate::verify::{run_verify, VerifyLevel, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "LPMHD_SEED";

#[derive(Debug, Parser)]
#[command(name = "lpmhd", version, about = "Pseudo-spectral 2-D ideal MHD laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write diagnostics.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also dump state snapshots at the configured snapshot cadence.
        #[arg(long)]
        snapshots: bool,
    },
    /// Run the configuration for each ε and write sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated list of magnetic amplitudes ‖b₀‖_{B¹∞,1}.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the property suites and print a pass/ratio table.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        /// Flip the sign of the gradient part of the Leray symbol used by
        /// the projector checks (mutation testing of the suite).
        #[arg(long, hide = true)]
        inject_leray_sign_error: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Fast,
    Full,
}

pub fn main_with(cli: Cli) -> i32 {
    match cli.command {
        Command::Run { config, out, snapshots } => cmd_run(&config, &out, snapshots),
        Command::Sweep { config, eps, out, jobs } => cmd_sweep(&config, &eps, &out, jobs),
        Command::Verify { level, inject_leray_sign_error } => {
            let level = match level {
                LevelArg::Fast => VerifyLevel::Fast,
                LevelArg::Full => VerifyLevel::Full,
            };
            let opts = VerifyOptions {
                level,
                leray_sign: if inject_leray_sign_error { -1.0 } else { 1.0 },
            };
            cmd_verify(&opts)
        }
    }
}

fn load_config(path: &Path) -> Result<SimConfig> {
    let mut cfg = SimConfig::from_file(path)?;
    if let Ok(raw) = std::env::var(SEED_ENV) {
        cfg.seed = raw
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}={raw} is not an unsigned integer")))?;
    }
    Ok(cfg)
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_diagnostics_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in records {
        w.write_record(r.values().iter().map(|&v| fmt_f64(v))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub termination: Termination,
    pub steps: usize,
    pub records: usize,
    pub energy_drift: f64,
    pub final_integrals: FinalIntegrals,
    pub initial_norms: InitialNorms,
    pub lifespan_new_c1: LifespanEstimate,
    pub lifespan_old_c1: LifespanEstimate,
    /// Present with an Euler reference.
    pub reference: Option<ReferenceSummary>,
    pub config: SimConfig,
}

#[derive(Debug, Serialize)]
pub struct FinalIntegrals {
    pub hess_u: f64,
    pub lipschitz: f64,
    pub omega_plus_j: f64,
    pub omega_minus_j: f64,
    pub j_b1_sq: f64,
}

#[derive(Debug, Serialize)]
pub struct ReferenceSummary {
    pub e0: f64,
    pub e_max: f64,
    pub t_star: TStar,
    /// Largest C with the new bound below this run's T*; absent if censored.
    pub lifespan_c_fit: Option<f64>,
    /// Smallest C for which the Euler growth bound dominates ‖v‖_{L²∩B²∞,1}.
    pub euler_growth_c_fit: Option<f64>,
}

fn reference_summary(traj: &Trajectory) -> Result<Option<ReferenceSummary>> {
    if !traj.records.first().is_some_and(DiagnosticsRecord::has_reference) {
        return Ok(None);
    }
    let times = traj.times();
    let e: Vec<f64> = traj.records.iter().map(|r| r.e_sup).collect();
    let e0 = e[0];
    let e_max = e.iter().copied().fold(0.0, f64::max);
    let t_star = if e0 > 0.0 {
        t_star_empirical(&times, &e, e0)?
    } else {
        TStar { t_star: times[times.len() - 1], censored: true }
    };
    let n = &traj.initial_norms;
    let lifespan_c_fit = if !t_star.censored && n.b0_b1 > 0.0 {
        fit_lifespan_constant(&[LifespanSample { u0_norm: n.u0_l2_b2, b0_norm: n.b0_b1, t_star: t_star.t_star }])?
    } else {
        None
    };
    let v: Vec<f64> = traj.records.iter().map(|r| r.v_l2_b2).collect();
    let euler_growth_c_fit = (v[0] > 0.0)
        .then(|| fit_euler_growth_constant(v[0], &times, &v))
        .transpose()?;
    Ok(Some(ReferenceSummary { e0, e_max, t_star, lifespan_c_fit, euler_growth_c_fit }))
}

pub fn summarize(config: &SimConfig, traj: &Trajectory) -> Result<RunSummary> {
    let last = traj.records.last().ok_or_else(|| Error::Diagnostic("no records".into()))?;
    let n = &traj.initial_norms;
    Ok(RunSummary {
        termination: traj.termination.clone(),
        steps: traj.steps,
        records: traj.records.len(),
        energy_drift: traj.energy_drift(),
        final_integrals: FinalIntegrals {
            hess_u: last.int_hess_u,
            lipschitz: last.int_lipschitz,
            omega_plus_j: last.int_omega_plus_j,
            omega_minus_j: last.int_omega_minus_j,
            j_b1_sq: last.int_j_b1_sq,
        },
        initial_norms: *n,
        lifespan_new_c1: lifespan_bound_new(n.u0_l2_b2, n.b0_b1, 1.0)?,
        lifespan_old_c1: lifespan_bound_old(n.pair_l2_b2, n.pair_l2_b1, n.b0_b1, 1.0)?,
        reference: reference_summary(traj)?,
        config: config.clone(),
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Runs `config` and writes its artifacts into `out`.
pub fn execute_run(config: &SimConfig, out: &Path, snapshots: bool) -> Result<(Trajectory, RunSummary)> {
    fs::create_dir_all(out)?;
    let traj = run_simulation_with(config, RunOptions { keep_snapshots: snapshots })?;
    write_diagnostics_csv(&out.join("diagnostics.csv"), &traj.records)?;
    let summary = summarize(config, &traj)?;
    write_json(&out.join("summary.json"), &summary)?;
    if snapshots {
        let dir = out.join("snapshots");
        fs::create_dir_all(&dir)?;
        for (i, s) in traj.snapshots.iter().enumerate() {
            let mut w = BufWriter::new(fs::File::create(dir.join(format!("snap_{i:05}.bin")))?);
            write_snapshot(&mut w, s)?;
            w.flush()?;
        }
    }
    Ok((traj, summary))
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::ConfigFile { .. } => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

pub fn cmd_run(config: &Path, out: &Path, snapshots: bool) -> i32 {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match execute_run(&cfg, out, snapshots) {
        Ok((traj, _)) => {
            eprintln!(
                "{}: {} records, t = {}",
                traj.termination.label(),
                traj.records.len(),
                traj.termination.time()
            );
            if traj.termination.is_failure() { EXIT_NUMERICAL } else { EXIT_OK }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// One line of `sweep.csv`.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub t_star: f64,
    pub censored: bool,
    pub e_tfix: f64,
    pub bound_new_c1: f64,
    pub bound_new_cfit: f64,
    pub energy_drift: f64,
    pub status: String,
    #[serde(skip)]
    pub u0_norm: f64,
}

pub const SWEEP_COLUMNS: [&str; 8] = [
    "epsilon",
    "t_star",
    "censored",
    "e_tfix",
    "bound_new_c1",
    "bound_new_cfit",
    "energy_drift",
    "status",
];

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Largest C for which the new bound lies below every uncensored T*.
    pub c_fit: Option<f64>,
    pub duplicates_removed: usize,
}

/// Drops duplicate ε values (first occurrence kept) and sorts descending.
pub fn dedupe_epsilons(eps: &[f64]) -> (Vec<f64>, usize) {
    let mut out: Vec<f64> = Vec::new();
    for &e in eps {
        if !out.contains(&e) {
            out.push(e);
        }
    }
    let removed = eps.len() - out.len();
    out.sort_by(|a, b| b.total_cmp(a));
    (out, removed)
}

/// Linear interpolation of a record column at time `t`; NaN outside.
fn value_at(records: &[DiagnosticsRecord], t: f64, f: impl Fn(&DiagnosticsRecord) -> f64) -> f64 {
    for w in records.windows(2) {
        if w[0].t <= t && t <= w[1].t {
            let lam = (t - w[0].t) / (w[1].t - w[0].t);
            return (1.0 - lam) * f(&w[0]) + lam * f(&w[1]);
        }
    }
    match records {
        [only] if only.t == t => f(only),
        _ => f64::NAN,
    }
}

fn sweep_row(config: &SimConfig, eps: f64, out: &Path) -> SweepRow {
    let mut cfg = config.clone();
    cfg.epsilon = Some(eps);
    cfg.euler_reference = true;
    let failed = |status: String| SweepRow {
        epsilon: eps,
        t_star: f64::NAN,
        censored: false,
        e_tfix: f64::NAN,
        bound_new_c1: f64::NAN,
        bound_new_cfit: f64::NAN,
        energy_drift: f64::NAN,
        status,
        u0_norm: f64::NAN,
    };
    let dir = out.join(format!("eps_{eps:e}"));
    match execute_run(&cfg, &dir, false) {
        Err(e) => failed(format!("error: {e}")),
        Ok((traj, summary)) if traj.termination.is_failure() => {
            let mut row = failed(traj.termination.label().into());
            row.energy_drift = summary.energy_drift;
            row
        }
        Ok((traj, summary)) => {
            let r = summary.reference.expect("sweep runs carry a reference");
            SweepRow {
                epsilon: eps,
                t_star: r.t_star.t_star,
                censored: r.t_star.censored,
                e_tfix: value_at(&traj.records, cfg.t_fix, |x| x.e_sup),
                bound_new_c1: summary.lifespan_new_c1.bound,
                bound_new_cfit: f64::NAN,
                energy_drift: summary.energy_drift,
                status: traj.termination.label().into(),
                u0_norm: summary.initial_norms.u0_l2_b2,
            }
        }
    }
}

fn row_ok(r: &SweepRow) -> bool {
    !r.t_star.is_nan()
}

pub fn execute_sweep(config: &SimConfig, eps: &[f64], out: &Path, jobs: Option<usize>) -> Result<SweepResult> {
    for &e in eps {
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::Config(format!("sweep epsilon must be positive, got {e}")));
        }
    }
    let (eps, duplicates_removed) = dedupe_epsilons(eps);
    if eps.is_empty() {
        return Err(Error::Config("empty epsilon list".into()));
    }
    fs::create_dir_all(out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut rows: Vec<SweepRow> = pool.install(|| eps.par_iter().map(|&e| sweep_row(config, e, out)).collect());
    let samples: Vec<LifespanSample> = rows
        .iter()
        .filter(|r| row_ok(r) && !r.censored)
        .map(|r| LifespanSample { u0_norm: r.u0_norm, b0_norm: r.epsilon, t_star: r.t_star })
        .collect();
    let c_fit = fit_lifespan_constant(&samples)?;
    if let Some(c) = c_fit {
        for r in rows.iter_mut().filter(|r| row_ok(r)) {
            r.bound_new_cfit = lifespan_bound_new(r.u0_norm, r.epsilon, c)?.bound;
        }
    }
    let mut w = csv::Writer::from_path(out.join("sweep.csv")).map_err(csv_err)?;
    w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    for r in &rows {
        w.write_record([
            fmt_f64(r.epsilon),
            fmt_f64(r.t_star),
            (r.censored as u8).to_string(),
            fmt_f64(r.e_tfix),
            fmt_f64(r.bound_new_c1),
            fmt_f64(r.bound_new_cfit),
            fmt_f64(r.energy_drift),
            r.status.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    let result = SweepResult { rows, c_fit, duplicates_removed };
    write_json(&out.join("sweep_summary.json"), &result)?;
    Ok(result)
}

pub fn cmd_sweep(config: &Path, eps: &[f64], out: &Path, jobs: Option<usize>) -> i32 {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match execute_sweep(&cfg, eps, out, jobs) {
        Ok(res) => {
            if res.duplicates_removed > 0 {
                eprintln!("warning: removed {} duplicate epsilon value(s)", res.duplicates_removed);
            }
            for r in &res.rows {
                eprintln!("eps {:e}: T* = {} ({}), {}", r.epsilon, r.t_star, if r.censored { "censored" } else { "reached" }, r.status);
            }
            match res.c_fit {
                Some(c) => eprintln!("fitted lifespan constant C = {c:.6e}"),
                None => eprintln!("no uncensored rows; lifespan constant not fitted"),
            }
            if res.rows.iter().any(row_ok) { EXIT_OK } else { EXIT_NUMERICAL }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn cmd_verify(opts: &VerifyOptions) -> i32 {
    let report = run_verify(opts);
    print!("{}", report.table());
    match report.first_failure() {
        None => {
            println!("all {} checks passed", report.checks.len());
            EXIT_OK
        }
        Some(c) => {
            println!("FAILED: {}", c.name);
            EXIT_VERIFY_FAILED
        }
    }
}
