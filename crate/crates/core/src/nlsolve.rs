//! Nonlinear solvers for per-slab systems.
//!
//! [`newton_solve`] is a damped Newton iteration on a finite-difference
//! Jacobian, factorized densely. When the residual has a known locality pattern
//! the Jacobian columns can be probed in groups ([`ColumnGroups`]), which turns
//! `n + 1` residual evaluations into one per group. [`picard_solve`] is plain
//! fixed-point iteration for problems that bring their own contraction.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Threshold on the ∞-norm of the residual (Newton) or of the update (Picard).
    pub abs_tol: f64,
    /// Optional threshold relative to the initial residual; `0` disables it.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Relative finite-difference increment: `h = fd_step * max(1, |x_j|)`.
    pub fd_step: f64,
    pub initial_damping: f64,
    pub min_damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 0.0,
            max_iter: 50,
            fd_step: 1e-7,
            initial_damping: 1.0,
            min_damping: 2f64.powi(-30),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverConfigError {
    #[error("abs_tol must be positive and finite")]
    AbsTol,
    #[error("rel_tol must be nonnegative and finite")]
    RelTol,
    #[error("max_iter must be at least 1")]
    MaxIter,
    #[error("fd_step must be positive and finite")]
    FdStep,
    #[error("damping factors must satisfy 0 < min_damping <= initial_damping <= 1")]
    Damping,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverConfigError> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(SolverConfigError::AbsTol);
        }
        if !(self.rel_tol >= 0.0 && self.rel_tol.is_finite()) {
            return Err(SolverConfigError::RelTol);
        }
        if self.max_iter == 0 {
            return Err(SolverConfigError::MaxIter);
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(SolverConfigError::FdStep);
        }
        if !(self.min_damping > 0.0
            && self.min_damping <= self.initial_damping
            && self.initial_damping <= 1.0)
        {
            return Err(SolverConfigError::Damping);
        }
        Ok(())
    }

    fn tolerance(&self, initial: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * initial)
    }
}

/// Marker returned by a residual or map evaluated outside its domain
/// (e.g. a non-positive density). The Newton line search backs off from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inadmissible;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    MaxIterations,
    SingularJacobian,
    /// Damping reached its floor without decreasing the residual.
    LineSearch,
    /// The starting point is inadmissible or produced non-finite values.
    InvalidStart,
    NonFinite,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::MaxIterations => "maximum iterations reached",
            Self::SingularJacobian => "singular Jacobian",
            Self::LineSearch => "line search failed to decrease the residual",
            Self::InvalidStart => "inadmissible initial guess",
            Self::NonFinite => "non-finite iterate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual_norm: f64,
    pub initial_residual_norm: f64,
    pub failure: Option<FailureReason>,
}

impl SolveReport {
    fn failed(
        iterations: usize,
        residual_norm: f64,
        initial: f64,
        reason: FailureReason,
    ) -> Self {
        Self {
            converged: false,
            iterations,
            residual_norm,
            initial_residual_norm: initial,
            failure: Some(reason),
        }
    }
}

pub fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Groups of Jacobian columns whose row supports are pairwise disjoint, so a
/// single perturbed residual evaluation recovers every column in a group.
#[derive(Debug, Clone)]
pub struct ColumnGroups {
    groups: Vec<Vec<usize>>,
    rows_of: Vec<Vec<usize>>,
    n_rows: usize,
}

impl ColumnGroups {
    /// Greedy distance-2 colouring. `rows_of[j]` lists every residual row that
    /// column `j` can influence.
    pub fn greedy(rows_of: Vec<Vec<usize>>, n_rows: usize) -> Self {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut occupied: Vec<Vec<bool>> = Vec::new();
        for (j, rows) in rows_of.iter().enumerate() {
            let slot = occupied
                .iter()
                .position(|mask| rows.iter().all(|&r| !mask[r]));
            let g = match slot {
                Some(g) => g,
                None => {
                    groups.push(Vec::new());
                    occupied.push(vec![false; n_rows]);
                    groups.len() - 1
                }
            };
            groups[g].push(j);
            for &r in rows {
                occupied[g][r] = true;
            }
        }
        Self {
            groups,
            rows_of,
            n_rows,
        }
    }

    /// One column per group: equivalent to the dense probe.
    pub fn dense(n: usize) -> Self {
        Self {
            groups: (0..n).map(|j| vec![j]).collect(),
            rows_of: (0..n).map(|_| (0..n).collect()).collect(),
            n_rows: n,
        }
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn column_count(&self) -> usize {
        self.rows_of.len()
    }
}

fn step_size(cfg: &SolverConfig, xj: f64) -> f64 {
    cfg.fd_step * xj.abs().max(1.0)
}

/// Forward-difference Jacobian, one column at a time.
pub fn fd_jacobian<F>(
    residual: &mut F,
    x: &DVector<f64>,
    r0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<DMatrix<f64>, Inadmissible>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>, Inadmissible>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(r0.len(), n);
    let mut xp = x.clone();
    for j in 0..n {
        xp[j] = x[j] + step_size(cfg, x[j]);
        let h = xp[j] - x[j];
        let rp = residual(&xp)?;
        xp[j] = x[j];
        for i in 0..r0.len() {
            jac[(i, j)] = (rp[i] - r0[i]) / h;
        }
    }
    Ok(jac)
}

/// Forward-difference Jacobian probed one column group at a time.
pub fn fd_jacobian_grouped<F>(
    residual: &mut F,
    x: &DVector<f64>,
    r0: &DVector<f64>,
    cfg: &SolverConfig,
    groups: &ColumnGroups,
) -> Result<DMatrix<f64>, Inadmissible>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>, Inadmissible>,
{
    assert_eq!(groups.column_count(), x.len(), "column groups do not match unknowns");
    assert_eq!(groups.n_rows, r0.len(), "column groups do not match residual");
    let mut jac = DMatrix::zeros(r0.len(), x.len());
    let mut xp = x.clone();
    for group in &groups.groups {
        for &j in group {
            xp[j] = x[j] + step_size(cfg, x[j]);
        }
        let rp = residual(&xp)?;
        for &j in group {
            let h = xp[j] - x[j];
            for &i in &groups.rows_of[j] {
                jac[(i, j)] = (rp[i] - r0[i]) / h;
            }
            xp[j] = x[j];
        }
    }
    Ok(jac)
}

/// Damped Newton with a dense finite-difference Jacobian.
pub fn newton_solve<F>(residual: F, x0: DVector<f64>, cfg: &SolverConfig) -> (DVector<f64>, SolveReport)
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>, Inadmissible>,
{
    newton_impl(residual, x0, cfg, None)
}

/// Damped Newton whose Jacobian is probed by column groups.
pub fn newton_solve_grouped<F>(
    residual: F,
    x0: DVector<f64>,
    cfg: &SolverConfig,
    groups: &ColumnGroups,
) -> (DVector<f64>, SolveReport)
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>, Inadmissible>,
{
    newton_impl(residual, x0, cfg, Some(groups))
}

fn newton_impl<F>(
    mut residual: F,
    x0: DVector<f64>,
    cfg: &SolverConfig,
    groups: Option<&ColumnGroups>,
) -> (DVector<f64>, SolveReport)
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>, Inadmissible>,
{
    let mut x = x0;
    let mut r = match residual(&x) {
        Ok(r) if r.iter().all(|v| v.is_finite()) => r,
        _ => return (x, SolveReport::failed(0, f64::NAN, f64::NAN, FailureReason::InvalidStart)),
    };
    assert_eq!(r.len(), x.len(), "residual and unknown dimensions differ");
    let initial = inf_norm(&r);
    let tol = cfg.tolerance(initial);
    let mut norm = initial;
    if norm <= tol {
        return (
            x,
            SolveReport {
                converged: true,
                iterations: 0,
                residual_norm: norm,
                initial_residual_norm: initial,
                failure: None,
            },
        );
    }
    for iter in 1..=cfg.max_iter {
        let jac = match groups {
            Some(g) => fd_jacobian_grouped(&mut residual, &x, &r, cfg, g),
            None => fd_jacobian(&mut residual, &x, &r, cfg),
        };
        let Ok(jac) = jac else {
            // a probe left the admissible set; treat like a failed line search
            return (x, SolveReport::failed(iter - 1, norm, initial, FailureReason::LineSearch));
        };
        let Some(dx) = jac.lu().solve(&(-&r)) else {
            return (x, SolveReport::failed(iter - 1, norm, initial, FailureReason::SingularJacobian));
        };
        if dx.iter().any(|v| !v.is_finite()) {
            return (x, SolveReport::failed(iter - 1, norm, initial, FailureReason::SingularJacobian));
        }
        let mut lambda = cfg.initial_damping;
        loop {
            let trial = &x + lambda * &dx;
            if let Ok(rt) = residual(&trial) {
                let nt = inf_norm(&rt);
                if nt.is_finite() && (nt < norm || nt <= tol) {
                    x = trial;
                    r = rt;
                    norm = nt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < cfg.min_damping {
                return (x, SolveReport::failed(iter, norm, initial, FailureReason::LineSearch));
            }
        }
        if norm <= tol {
            return (
                x,
                SolveReport {
                    converged: true,
                    iterations: iter,
                    residual_norm: norm,
                    initial_residual_norm: initial,
                    failure: None,
                },
            );
        }
    }
    (x, SolveReport::failed(cfg.max_iter, norm, initial, FailureReason::MaxIterations))
}

/// Fixed-point iteration `x ← map(x)` until successive iterates differ by at
/// most `abs_tol` in the ∞-norm. `iterations` counts map evaluations.
pub fn picard_solve<G>(mut map: G, x0: DVector<f64>, cfg: &SolverConfig) -> (DVector<f64>, SolveReport)
where
    G: FnMut(&DVector<f64>) -> Result<DVector<f64>, Inadmissible>,
{
    let mut x = x0;
    let mut initial = f64::NAN;
    let mut diff = f64::NAN;
    for iter in 1..=cfg.max_iter {
        let next = match map(&x) {
            Ok(next) => next,
            Err(Inadmissible) => {
                let reason = if iter == 1 { FailureReason::InvalidStart } else { FailureReason::NonFinite };
                return (x, SolveReport::failed(iter - 1, diff, initial, reason));
            }
        };
        assert_eq!(next.len(), x.len(), "fixed-point map changed dimension");
        diff = inf_norm(&(&next - &x));
        if iter == 1 {
            initial = diff;
        }
        if !diff.is_finite() {
            return (x, SolveReport::failed(iter, diff, initial, FailureReason::NonFinite));
        }
        x = next;
        if diff <= cfg.tolerance(initial) {
            return (
                x,
                SolveReport {
                    converged: true,
                    iterations: iter,
                    residual_norm: diff,
                    initial_residual_norm: initial,
                    failure: None,
                },
            );
        }
    }
    (x, SolveReport::failed(cfg.max_iter, diff, initial, FailureReason::MaxIterations))
}
