//! The `run`, `compare` and `convergence` subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use thiserror::Error;

use conserve_core::framework::toy::Oscillator;
use conserve_core::io::{DiagnosticsWriter, IoError};

use crate::config::{ConfigError, Initial, ProblemKind, RunConfig};
use crate::runner::{execute, RunOutcome};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("usage: {0}")]
    Usage(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("{context}: {source}")]
    Io { context: String, source: IoError },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(IoError) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| io_err(p.display().to_string())(e.into()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn failure_message(outcome: &RunOutcome) -> Option<(usize, String)> {
    outcome.summary.failure.as_ref().map(|(step, e)| (*step, e.to_string()))
}

/// Executes one configuration, writing diagnostics rows as steps complete.
pub fn run(config: &Path, output: Option<PathBuf>, snapshot: Option<PathBuf>) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let output = output.or_else(|| cfg.output.clone());
    let ctx = output.as_ref().map_or("stdout".to_string(), |p| p.display().to_string());
    let sink = open_output(output.as_deref())?;
    let mut writer = DiagnosticsWriter::new(sink, quantity_count(&cfg)).map_err(io_err(ctx.clone()))?;
    let mut write_err = None;
    let outcome = execute(&cfg, &mut |r| {
        if write_err.is_none() {
            write_err = writer.write(r).err();
        }
    })?;
    if let Some(e) = write_err {
        return Err(io_err(ctx)(e));
    }
    let failure = failure_message(&outcome);
    if let Some((step, reason)) = &failure {
        writer.write_failure(*step, reason).map_err(io_err(ctx.clone()))?;
    }
    writer.finish().map_err(io_err(ctx))?;
    if let Some(path) = snapshot {
        let f = File::create(&path).map_err(|e| io_err(path.display().to_string())(e.into()))?;
        outcome
            .snapshot
            .write_to(BufWriter::new(f))
            .map_err(io_err(path.display().to_string()))?;
    }
    info!(
        "{} of {} steps; final drift {:?}",
        outcome.summary.steps_completed,
        cfg.n_steps,
        outcome.summary.final_drift()
    );
    match failure {
        Some((step, reason)) => Err(CliError::Solver(format!("step {step}: {reason}"))),
        None => Ok(()),
    }
}

fn quantity_count(cfg: &RunConfig) -> usize {
    match cfg.problem {
        ProblemKind::Toy => 1,
        ProblemKind::Incompressible3d => 2,
        ProblemKind::Compressible1d => 4,
    }
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftComparison {
    pub quantity: String,
    pub drift_a: f64,
    pub drift_b: f64,
    /// `drift_b / drift_a`.
    pub ratio: f64,
}

/// Runs two configurations of the same experiment side by side and tabulates
/// each quantity's largest drift from its initial value.
pub fn compare_configs(a: &RunConfig, b: &RunConfig) -> Result<(Vec<DriftComparison>, [Option<usize>; 2]), CliError> {
    a.same_experiment(b)?;
    let (ra, rb) = std::thread::scope(|s| {
        let ha = s.spawn(|| execute(a, &mut |_| {}));
        let hb = s.spawn(|| execute(b, &mut |_| {}));
        (ha.join().expect("run A panicked"), hb.join().expect("run B panicked"))
    });
    let (ra, rb) = (ra?, rb?);
    let rows = ra
        .quantity_names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let (da, db) = (ra.summary.max_drift[k], rb.summary.max_drift[k]);
            DriftComparison {
                quantity: name.clone(),
                drift_a: da,
                drift_b: db,
                ratio: db / da,
            }
        })
        .collect();
    let failures = [failure_message(&ra).map(|f| f.0), failure_message(&rb).map(|f| f.0)];
    Ok((rows, failures))
}

pub fn compare(config_a: &Path, config_b: &Path, output: Option<PathBuf>) -> Result<(), CliError> {
    let a = RunConfig::load(config_a)?;
    let b = RunConfig::load(config_b)?;
    let (rows, failures) = compare_configs(&a, &b)?;
    let ctx = output.as_ref().map_or("stdout".to_string(), |p| p.display().to_string());
    let mut w = csv::Writer::from_writer(open_output(output.as_deref())?);
    let csv_err = |e: csv::Error| io_err(ctx.clone())(e.into());
    w.write_record(["quantity", "max_drift_a", "max_drift_b", "ratio_b_over_a"]).map_err(csv_err)?;
    for r in &rows {
        w.write_record([
            r.quantity.clone(),
            format!("{:.16e}", r.drift_a),
            format!("{:.16e}", r.drift_b),
            format!("{:.16e}", r.ratio),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| io_err(ctx.clone())(e.into()))?;
    for (label, f) in ["A", "B"].iter().zip(failures) {
        if let Some(step) = f {
            warn!("run {label} stopped at step {step}; drifts cover the completed steps");
        }
    }
    match failures {
        [None, None] => Ok(()),
        _ => Err(CliError::Solver("one of the compared runs stopped early".into())),
    }
}

/// Reference for the convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Closed-form solution (toy problem only).
    Exact,
    /// The finest level's final state.
    Finest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub dt: f64,
    pub n_steps: usize,
    pub error: f64,
    /// `log2(e_{k-1} / e_k)`; `None` on the first row.
    pub order: Option<f64>,
}

/// Halves the timestep `levels − 1` times at fixed final time and estimates
/// the observed order from consecutive errors.
pub fn convergence_study(base: &RunConfig, levels: usize, reference: Reference) -> Result<Vec<ConvergenceRow>, CliError> {
    if levels < 3 {
        return Err(CliError::Usage(format!("convergence needs at least 3 levels, got {levels}")));
    }
    if reference == Reference::Exact && base.problem != ProblemKind::Toy {
        return Err(CliError::Usage("an exact reference is only available for the toy problem".into()));
    }
    let mut finals = Vec::with_capacity(levels);
    for level in 0..levels {
        let mut cfg = base.clone();
        cfg.dt = base.dt / f64::powi(2.0, level as i32);
        cfg.n_steps = base.n_steps << level;
        let out = execute(&cfg, &mut |_| {})?;
        if let Some((step, reason)) = failure_message(&out) {
            return Err(CliError::Solver(format!("level {level}, step {step}: {reason}")));
        }
        info!("level {level}: dt = {:e}, {} steps", cfg.dt, cfg.n_steps);
        finals.push((cfg.dt, cfg.n_steps, out.summary.final_state));
    }
    let reference_state = match reference {
        Reference::Exact => {
            let u0 = match &base.initial {
                Initial::Values { values } => [values[0], values[1]],
                _ => [1.0, 0.0],
            };
            Oscillator::exact(u0, base.dt * base.n_steps as f64).to_vec()
        }
        Reference::Finest => finals.pop().expect("at least three levels").2,
    };
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for (level, (dt, n_steps, state)) in finals.into_iter().enumerate() {
        let error = state
            .iter()
            .zip(&reference_state)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let order = rows.last().map(|prev| (prev.error / error).log2());
        rows.push(ConvergenceRow {
            level,
            dt,
            n_steps,
            error,
            order,
        });
    }
    if rows.windows(2).any(|w| w[1].error >= w[0].error) {
        warn!("error sequence is not monotone; order estimates are unreliable");
    }
    Ok(rows)
}

pub fn convergence(config: &Path, levels: usize, reference: Option<Reference>, output: Option<PathBuf>) -> Result<(), CliError> {
    let base = RunConfig::load(config)?;
    let reference = reference.unwrap_or(if base.problem == ProblemKind::Toy {
        Reference::Exact
    } else {
        Reference::Finest
    });
    let rows = convergence_study(&base, levels, reference)?;
    let ctx = output.as_ref().map_or("stdout".to_string(), |p| p.display().to_string());
    let mut w = csv::Writer::from_writer(open_output(output.as_deref())?);
    let csv_err = |e: csv::Error| io_err(ctx.clone())(e.into());
    w.write_record(["level", "dt", "n_steps", "error", "order"]).map_err(csv_err)?;
    let monotone = rows.windows(2).all(|w| w[1].error < w[0].error);
    for r in &rows {
        w.write_record([
            r.level.to_string(),
            format!("{:.16e}", r.dt),
            r.n_steps.to_string(),
            format!("{:.16e}", r.error),
            r.order.map_or(String::new(), |o| format!("{o:.6}")),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| io_err(ctx.clone())(e.into()))?;
    if !monotone {
        let mut inner = w.into_inner().map_err(|e| io_err(ctx.clone())(IoError::Io(e.into_error())))?;
        writeln!(inner, "# warning: error sequence is not monotone").map_err(|e| io_err(ctx)(e.into()))?;
    }
    Ok(())
}
