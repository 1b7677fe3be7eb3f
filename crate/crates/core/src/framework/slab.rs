use nalgebra::DVector;
use thiserror::Error;

use super::problem::{dot, Problem};
use crate::nlsolve::{newton_solve, newton_solve_grouped, ColumnGroups, Inadmissible, SolveReport, SolverConfig};
use crate::temporal::{combine, combine_into, gauss_rule, QuadratureRule, TemporalBasis, TemporalError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameworkError {
    #[error(transparent)]
    Temporal(#[from] TemporalError),
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("slab state left the admissible set")]
    Inadmissible,
    #[error("timestep must be positive and finite, got {0}")]
    Timestep(f64),
    #[error("incoming state contains non-finite values")]
    NonFiniteState,
    #[error("exact rule is exact to degree {have}, at least {need} is required")]
    ExactRule { have: usize, need: usize },
}

/// Temporal discretization of one slab: the trial/test bases, the main rule
/// `I_n`, and the near-exact rule used for the right side of the auxiliary
/// definitions. Basis tables at both rules' nodes are precomputed.
#[derive(Debug, Clone)]
pub struct SlabScheme {
    basis: TemporalBasis,
    main: QuadratureRule,
    exact: QuadratureRule,
    main_trial: Vec<Vec<f64>>,
    main_trial_deriv: Vec<Vec<f64>>,
    main_test: Vec<Vec<f64>>,
    exact_trial: Vec<Vec<f64>>,
    exact_test: Vec<Vec<f64>>,
}

impl SlabScheme {
    pub fn new(basis: TemporalBasis, main: QuadratureRule, exact: QuadratureRule) -> Result<Self, FrameworkError> {
        let need = 2 * basis.degree() - 1;
        if exact.exactness_degree() < need {
            return Err(FrameworkError::ExactRule {
                have: exact.exactness_degree(),
                need,
            });
        }
        let main_trial = main.nodes().iter().map(|&t| basis.trial_values(t)).collect();
        let main_trial_deriv = main.nodes().iter().map(|&t| basis.trial_derivatives(t)).collect();
        let main_test = main.nodes().iter().map(|&t| basis.test_values(t)).collect();
        let exact_trial = exact.nodes().iter().map(|&t| basis.trial_values(t)).collect();
        let exact_test = exact.nodes().iter().map(|&t| basis.test_values(t)).collect();
        Ok(Self {
            basis,
            main,
            exact,
            main_trial,
            main_trial_deriv,
            main_test,
            exact_trial,
            exact_test,
        })
    }

    /// Degree `s`, `I_n` = `s`-point Gauss, exact rule = `(4s + 4)`-point Gauss.
    pub fn gauss(s: usize) -> Result<Self, FrameworkError> {
        Self::with_points(s, s, 4 * s + 4)
    }

    /// Degree `s` with Gauss test nodes and custom Gauss rule sizes.
    pub fn with_points(s: usize, main_points: usize, exact_points: usize) -> Result<Self, FrameworkError> {
        Self::new(TemporalBasis::gauss(s)?, gauss_rule(main_points)?, gauss_rule(exact_points)?)
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn basis(&self) -> &TemporalBasis {
        &self.basis
    }

    pub fn main_rule(&self) -> &QuadratureRule {
        &self.main
    }

    pub fn exact_rule(&self) -> &QuadratureRule {
        &self.exact
    }

    /// Trial basis values at the main rule's nodes, one row per node.
    pub fn main_trial_table(&self) -> &[Vec<f64>] {
        &self.main_trial
    }

    pub fn main_trial_derivative_table(&self) -> &[Vec<f64>] {
        &self.main_trial_deriv
    }

    pub fn main_test_table(&self) -> &[Vec<f64>] {
        &self.main_test
    }

    pub fn exact_trial_table(&self) -> &[Vec<f64>] {
        &self.exact_trial
    }

    pub fn exact_test_table(&self) -> &[Vec<f64>] {
        &self.exact_test
    }
}

/// All unknowns of one slab: trial coefficients `u_0..u_S` (with `u_0` the
/// incoming state) and auxiliary values at the `S` test nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabState {
    pub trial: Vec<Vec<f64>>,
    pub aux: Vec<Vec<f64>>,
}

impl SlabState {
    /// Constant extrapolation of `u_n`, auxiliaries from the associated test
    /// functions at `u_n`.
    pub fn initial_guess<P: Problem + ?Sized>(problem: &P, scheme: &SlabScheme, u_n: &[f64]) -> Self {
        let s = scheme.degree();
        let mut aux0 = vec![0.0; problem.aux_dof_count()];
        if !aux0.is_empty() {
            problem.associated_aux(u_n, &mut aux0);
        }
        Self {
            trial: vec![u_n.to_vec(); s + 1],
            aux: vec![aux0; s],
        }
    }

    pub fn degree(&self) -> usize {
        self.aux.len()
    }

    /// Unknown vector: `u_1..u_S`, then auxiliaries node by node.
    pub fn unknowns(&self) -> DVector<f64> {
        let mut v = Vec::new();
        for c in &self.trial[1..] {
            v.extend_from_slice(c);
        }
        for a in &self.aux {
            v.extend_from_slice(a);
        }
        DVector::from_vec(v)
    }

    pub fn set_unknowns(&mut self, x: &[f64]) {
        let mut offset = 0;
        for c in self.trial[1..].iter_mut() {
            let n = c.len();
            c.copy_from_slice(&x[offset..offset + n]);
            offset += n;
        }
        for a in self.aux.iter_mut() {
            let n = a.len();
            a.copy_from_slice(&x[offset..offset + n]);
            offset += n;
        }
    }

    /// Trial polynomial at reference time `t`.
    pub fn value_at(&self, basis: &TemporalBasis, t: f64) -> Vec<f64> {
        combine(&basis.trial_values(t), &self.trial)
    }

    pub fn end_value(&self, basis: &TemporalBasis) -> Vec<f64> {
        self.value_at(basis, 1.0)
    }
}

fn check_dims<P: Problem + ?Sized>(problem: &P, scheme: &SlabScheme, slab: &SlabState) -> Result<(), FrameworkError> {
    let s = scheme.degree();
    let dim = |what, expected, got| {
        if expected == got {
            Ok(())
        } else {
            Err(FrameworkError::Dimension { what, expected, got })
        }
    };
    dim("trial coefficient count", s + 1, slab.trial.len())?;
    dim("auxiliary node count", s, slab.aux.len())?;
    for c in &slab.trial {
        dim("trial coefficient", problem.dof_count(), c.len())?;
    }
    for a in &slab.aux {
        dim("auxiliary coefficient", problem.aux_dof_count(), a.len())?;
    }
    Ok(())
}

/// Residual of the slab equations: for each test basis function `φ_j`,
///
/// * `I_n[M(u; u̇, φ_j e_i) − F̃(u, w̃; φ_j e_i)]` over all spatial directions, then
/// * `I_n[M_aux(u; φ_j e_i, w̃)] − ∫ aux_target(u; φ_j e_i)` with the exact rule.
///
/// `I_n` carries the factor `dt`.
pub fn assemble_residual<P: Problem + ?Sized>(
    problem: &P,
    scheme: &SlabScheme,
    slab: &SlabState,
    dt: f64,
) -> Result<Vec<f64>, FrameworkError> {
    check_dims(problem, scheme, slab)?;
    residual_unchecked(problem, scheme, slab, dt).map_err(|_| FrameworkError::Inadmissible)
}

pub(crate) fn residual_unchecked<P: Problem + ?Sized>(
    problem: &P,
    scheme: &SlabScheme,
    slab: &SlabState,
    dt: f64,
) -> Result<Vec<f64>, Inadmissible> {
    let n = problem.dof_count();
    let a = problem.aux_dof_count();
    let s = scheme.degree();
    let mut res = vec![0.0; s * (n + a)];
    let (res_main, res_aux) = res.split_at_mut(s * n);

    let mut u = vec![0.0; n];
    let mut udot = vec![0.0; n];
    let mut w = vec![0.0; a];
    let mut m = vec![0.0; n];
    let mut f = vec![0.0; n];
    let mut am = vec![0.0; a];

    for (q, &wq) in scheme.main.weights().iter().enumerate() {
        combine_into(&scheme.main_trial[q], &slab.trial, &mut u);
        combine_into(&scheme.main_trial_deriv[q], &slab.trial, &mut udot);
        udot.iter_mut().for_each(|x| *x /= dt);
        if a > 0 {
            combine_into(&scheme.main_test[q], &slab.aux, &mut w);
        }
        if !problem.admissible_state(&u) || (a > 0 && !problem.admissible_aux(&w)) {
            return Err(Inadmissible);
        }
        problem.mass_action(&u, &udot, &mut m);
        problem.modified_rhs(&u, &w, &mut f);
        if a > 0 {
            problem.aux_mass_action(&u, &w, &mut am);
        }
        for j in 0..s {
            let c = dt * wq * scheme.main_test[q][j];
            if c == 0.0 {
                continue;
            }
            let rj = &mut res_main[j * n..(j + 1) * n];
            for i in 0..n {
                rj[i] += c * (m[i] - f[i]);
            }
            if a > 0 {
                let bj = &mut res_aux[j * a..(j + 1) * a];
                for i in 0..a {
                    bj[i] += c * am[i];
                }
            }
        }
    }

    if a > 0 {
        let mut target = vec![0.0; a];
        for (q, &wq) in scheme.exact.weights().iter().enumerate() {
            combine_into(&scheme.exact_trial[q], &slab.trial, &mut u);
            if !problem.admissible_state(&u) {
                return Err(Inadmissible);
            }
            problem.aux_target(&u, &mut target);
            for j in 0..s {
                let c = dt * wq * scheme.exact_test[q][j];
                let bj = &mut res_aux[j * a..(j + 1) * a];
                for i in 0..a {
                    bj[i] -= c * target[i];
                }
            }
        }
    }

    if res.iter().any(|x| !x.is_finite()) {
        return Err(Inadmissible);
    }
    Ok(res)
}

/// `I_n[F̃(u, w̃; w̃_q)]` for every quantity; `NaN` where the problem defines no
/// discrete test function.
pub fn predicted_changes<P: Problem + ?Sized>(problem: &P, scheme: &SlabScheme, slab: &SlabState, dt: f64) -> Vec<f64> {
    let n = problem.dof_count();
    let a = problem.aux_dof_count();
    let nq = problem.quantity_count();
    let mut u = vec![0.0; n];
    let mut w = vec![0.0; a];
    let mut f = vec![0.0; n];
    let mut test = vec![0.0; n];
    let mut has = vec![a > 0; nq];
    let mut out = vec![0.0; nq];
    for (q, &wq) in scheme.main.weights().iter().enumerate() {
        combine_into(&scheme.main_trial[q], &slab.trial, &mut u);
        if a > 0 {
            combine_into(&scheme.main_test[q], &slab.aux, &mut w);
        }
        problem.modified_rhs(&u, &w, &mut f);
        for k in 0..nq {
            if !has[k] {
                continue;
            }
            if problem.aux_test_function(k, &w, &mut test) {
                out[k] += dt * wq * dot(&f, &test);
            } else {
                has[k] = false;
            }
        }
    }
    out.iter()
        .zip(&has)
        .map(|(&v, &h)| if h { v } else { f64::NAN })
        .collect()
}

/// Strategy for solving the nonlinear slab system.
pub trait SlabSolver<P: Problem + ?Sized> {
    fn solve(&self, problem: &P, scheme: &SlabScheme, dt: f64, guess: SlabState) -> (SlabState, SolveReport);

    fn config(&self) -> &SolverConfig;
}

/// Monolithic damped Newton over all slab unknowns with a finite-difference
/// Jacobian. Uses column grouping when the problem reports its locality.
#[derive(Debug, Clone, Default)]
pub struct NewtonSlabSolver {
    pub config: SolverConfig,
}

impl NewtonSlabSolver {
    pub fn new(config: SolverConfig) -> Self {
        Self { config }
    }
}

/// Column groups for the slab Jacobian derived from spatial locality.
pub fn slab_column_groups<P: Problem + ?Sized>(problem: &P, s: usize) -> Option<ColumnGroups> {
    let loc = problem.locality()?;
    let n = problem.dof_count();
    let a = problem.aux_dof_count();
    let n_sites = loc.neighbours.len();
    let mut primal_at = vec![Vec::new(); n_sites];
    let mut aux_at = vec![Vec::new(); n_sites];
    for (d, &site) in loc.primal_site.iter().enumerate() {
        primal_at[site].push(d);
    }
    for (d, &site) in loc.aux_site.iter().enumerate() {
        aux_at[site].push(d);
    }
    // rows touched by any unknown living on `site`
    let rows_for_site = |site: usize| -> Vec<usize> {
        let mut rows = Vec::new();
        for &nb in &loc.neighbours[site] {
            for j in 0..s {
                rows.extend(primal_at[nb].iter().map(|&d| j * n + d));
                rows.extend(aux_at[nb].iter().map(|&d| s * n + j * a + d));
            }
        }
        rows
    };
    let site_rows: Vec<Vec<usize>> = (0..n_sites).map(rows_for_site).collect();
    let mut rows_of = Vec::with_capacity(s * (n + a));
    for _ in 0..s {
        rows_of.extend(loc.primal_site.iter().map(|&site| site_rows[site].clone()));
    }
    for _ in 0..s {
        rows_of.extend(loc.aux_site.iter().map(|&site| site_rows[site].clone()));
    }
    Some(ColumnGroups::greedy(rows_of, s * (n + a)))
}

impl<P: Problem + ?Sized> SlabSolver<P> for NewtonSlabSolver {
    fn solve(&self, problem: &P, scheme: &SlabScheme, dt: f64, guess: SlabState) -> (SlabState, SolveReport) {
        let mut work = guess.clone();
        let residual = |x: &DVector<f64>| {
            work.set_unknowns(x.as_slice());
            residual_unchecked(problem, scheme, &work, dt).map(DVector::from_vec)
        };
        let x0 = guess.unknowns();
        let (x, report) = match slab_column_groups(problem, scheme.degree()) {
            Some(groups) => newton_solve_grouped(residual, x0, &self.config, &groups),
            None => newton_solve(residual, x0, &self.config),
        };
        let mut out = guess;
        out.set_unknowns(x.as_slice());
        (out, report)
    }

    fn config(&self) -> &SolverConfig {
        &self.config
    }
}
