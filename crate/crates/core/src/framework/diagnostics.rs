use thiserror::Error;

use super::problem::{Problem, Structure};
use super::slab::{predicted_changes, FrameworkError, SlabScheme, SlabSolver, SlabState};
use crate::nlsolve::{FailureReason, SolveReport};

/// Per-step record of the quantities of interest and the update identity
/// `Q(after) − Q(before) = I_n[F̃(u, w̃; w̃_q)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub q_before: Vec<f64>,
    pub q_after: Vec<f64>,
    /// `NaN` for quantities without a discrete test function.
    pub predicted_delta: Vec<f64>,
    pub identity_gap: Vec<f64>,
    pub report: SolveReport,
}

impl StepDiagnostics {
    pub fn delta(&self) -> Vec<f64> {
        self.q_after.iter().zip(&self.q_before).map(|(a, b)| a - b).collect()
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub next: Vec<f64>,
    pub slab: SlabState,
    pub diagnostics: StepDiagnostics,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StepError {
    #[error(transparent)]
    Setup(#[from] FrameworkError),
    #[error("slab solve failed: {reason} after {} iterations (residual {:.3e})", report.iterations, report.residual_norm)]
    Solver { reason: FailureReason, report: SolveReport },
}

/// Solves one slab starting from `u_n` and returns the end value with diagnostics.
/// On solver failure nothing is applied and the caller keeps `u_n`.
pub fn advance<P, S>(problem: &P, solver: &S, scheme: &SlabScheme, u_n: &[f64], dt: f64) -> Result<StepOutcome, StepError>
where
    P: Problem + ?Sized,
    S: SlabSolver<P> + ?Sized,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FrameworkError::Timestep(dt).into());
    }
    if u_n.len() != problem.dof_count() {
        return Err(FrameworkError::Dimension {
            what: "incoming state",
            expected: problem.dof_count(),
            got: u_n.len(),
        }
        .into());
    }
    if u_n.iter().any(|x| !x.is_finite()) {
        return Err(FrameworkError::NonFiniteState.into());
    }
    let guess = SlabState::initial_guess(problem, scheme, u_n);
    let (slab, report) = solver.solve(problem, scheme, dt, guess);
    if !report.converged {
        let reason = report.failure.unwrap_or(FailureReason::MaxIterations);
        return Err(StepError::Solver { reason, report });
    }
    let next = slab.end_value(scheme.basis());
    if next.iter().any(|x| !x.is_finite()) {
        return Err(StepError::Solver {
            reason: FailureReason::NonFinite,
            report,
        });
    }
    let q_before = problem.quantities(u_n);
    let q_after = problem.quantities(&next);
    let predicted_delta = predicted_changes(problem, scheme, &slab, dt);
    let identity_gap = q_after
        .iter()
        .zip(&q_before)
        .zip(&predicted_delta)
        .map(|((a, b), p)| ((a - b) - p).abs())
        .collect();
    Ok(StepOutcome {
        next,
        slab,
        diagnostics: StepDiagnostics {
            q_before,
            q_after,
            predicted_delta,
            identity_gap,
            report,
        },
    })
}

/// Outcome of comparing one step against the update identity and the declared structure.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub gap: Vec<f64>,
    /// `true` where the gap is within `tol × max(1, |Q|)` (or the quantity has no prediction).
    pub gap_ok: Vec<bool>,
    /// `true` where the change respects the declared structure within the same tolerance.
    pub structure_ok: Vec<bool>,
}

impl IdentityCheck {
    pub fn all_ok(&self) -> bool {
        self.gap_ok.iter().chain(&self.structure_ok).all(|&b| b)
    }
}

pub fn check_update_identity<P: Problem + ?Sized>(problem: &P, diag: &StepDiagnostics, tol: f64) -> IdentityCheck {
    let structure = problem.structure();
    let delta = diag.delta();
    let scale: Vec<f64> = diag.q_before.iter().map(|q| tol * q.abs().max(1.0)).collect();
    let gap_ok = diag
        .identity_gap
        .iter()
        .zip(&scale)
        .map(|(g, s)| g.is_nan() || g <= s)
        .collect();
    let structure_ok = structure
        .iter()
        .zip(&delta)
        .zip(&scale)
        .map(|((st, d), s)| st.admits(*d, *s))
        .collect();
    IdentityCheck {
        gap: diag.identity_gap.clone(),
        gap_ok,
        structure_ok,
    }
}

/// One completed step, as streamed to a sink.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// 1-based index of the completed step.
    pub step: usize,
    pub t: f64,
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    pub predicted_dq: Vec<f64>,
    pub gap: Vec<f64>,
    pub newton_iters: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectorySummary {
    pub initial_q: Vec<f64>,
    pub final_q: Vec<f64>,
    pub final_state: Vec<f64>,
    pub steps_completed: usize,
    /// 1-based index of the step that failed, with the reason.
    pub failure: Option<(usize, StepError)>,
    pub max_abs_dq: Vec<f64>,
    /// Largest identity gap per quantity; `NaN` when never predicted.
    pub max_gap: Vec<f64>,
    /// Largest `|Q(t) − Q(0)|` per quantity.
    pub max_drift: Vec<f64>,
}

impl TrajectorySummary {
    pub fn final_drift(&self) -> Vec<f64> {
        self.final_q.iter().zip(&self.initial_q).map(|(a, b)| a - b).collect()
    }
}

fn nan_max(acc: f64, x: f64) -> f64 {
    if acc.is_nan() {
        x
    } else if x.is_nan() {
        acc
    } else {
        acc.max(x)
    }
}

/// Advances `n_steps` steps, handing each completed step to `sink`. Stops at the
/// first failing step and keeps the partial trajectory.
pub fn run_transient<P, S>(
    problem: &P,
    solver: &S,
    scheme: &SlabScheme,
    u0: &[f64],
    dt: f64,
    n_steps: usize,
    mut sink: impl FnMut(&StepRecord),
) -> TrajectorySummary
where
    P: Problem + ?Sized,
    S: SlabSolver<P> + ?Sized,
{
    let initial_q = problem.quantities(u0);
    let nq = initial_q.len();
    let mut summary = TrajectorySummary {
        final_q: initial_q.clone(),
        initial_q,
        final_state: u0.to_vec(),
        steps_completed: 0,
        failure: None,
        max_abs_dq: vec![0.0; nq],
        max_gap: vec![f64::NAN; nq],
        max_drift: vec![0.0; nq],
    };
    for step in 1..=n_steps {
        let outcome = match advance(problem, solver, scheme, &summary.final_state, dt) {
            Ok(o) => o,
            Err(e) => {
                summary.failure = Some((step, e));
                break;
            }
        };
        let d = &outcome.diagnostics;
        let dq = d.delta();
        for k in 0..nq {
            summary.max_abs_dq[k] = summary.max_abs_dq[k].max(dq[k].abs());
            summary.max_gap[k] = nan_max(summary.max_gap[k], d.identity_gap[k]);
            summary.max_drift[k] = summary.max_drift[k].max((d.q_after[k] - summary.initial_q[k]).abs());
        }
        sink(&StepRecord {
            step,
            t: step as f64 * dt,
            q: d.q_after.clone(),
            dq,
            predicted_dq: d.predicted_delta.clone(),
            gap: d.identity_gap.clone(),
            newton_iters: d.report.iterations,
            residual: d.report.residual_norm,
        });
        summary.final_q = d.q_after.clone();
        summary.final_state = outcome.next;
        summary.steps_completed = step;
    }
    summary
}

/// Structure flags of a problem paired with its quantity names, for reporting.
pub fn describe_structure<P: Problem + ?Sized>(problem: &P) -> Vec<(String, Structure)> {
    problem.quantity_names().into_iter().zip(problem.structure()).collect()
}
