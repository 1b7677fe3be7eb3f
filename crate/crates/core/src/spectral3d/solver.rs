use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;

use super::field::{curl_into, VectorField};
use super::problem::{IncompressibleProblem, Variant};
use crate::framework::{SlabScheme, SlabSolver, SlabState};
use crate::nlsolve::{picard_solve, FailureReason, Inadmissible, SolveReport, SolverConfig};
use crate::temporal::projection_matrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fixed-point slab solver for the incompressible problem: the time derivative
/// and viscous term are solved exactly per Fourier mode (an `S × S` temporal
/// system depending only on `|k|²`), the convective term is lagged.
#[derive(Debug, Clone, Default)]
pub struct PicardSlabSolver {
    pub config: SolverConfig,
}

impl PicardSlabSolver {
    pub fn new(config: SolverConfig) -> Self {
        Self { config }
    }
}

/// Temporal matrices of one slab, independent of the spatial mode.
struct SlabMatrices {
    s: usize,
    /// `Σ_q w_q φ_j(t_q) ψ'_i(t_q)`, `S × (S+1)`.
    deriv: DMatrix<f64>,
    /// Matrix multiplying `−ν|κ|²` trial coefficients: the viscous term acts on
    /// `ũ` (projected trial) or on `u` itself for the base scheme.
    visc: DMatrix<f64>,
    /// `Π`, trial coefficients to auxiliary node values.
    proj: DMatrix<f64>,
    /// `w_q φ_j(t_q)`, `S × Q`.
    load: DMatrix<f64>,
    trial_at: Vec<Vec<f64>>,
    test_at: Vec<Vec<f64>>,
}

impl SlabMatrices {
    fn new(scheme: &SlabScheme, variant: Variant) -> Self {
        let s = scheme.degree();
        let w = scheme.main_rule().weights();
        let nq = w.len();
        let phi = scheme.main_test_table();
        let psi = scheme.main_trial_table();
        let dpsi = scheme.main_trial_derivative_table();
        let deriv = DMatrix::from_fn(s, s + 1, |j, i| (0..nq).map(|q| w[q] * phi[q][j] * dpsi[q][i]).sum());
        let load = DMatrix::from_fn(s, nq, |j, q| w[q] * phi[q][j]);
        let proj = projection_matrix(scheme.basis(), scheme.main_rule(), scheme.exact_rule())
            .expect("Gauss test nodes give a nonsingular Gram matrix");
        let visc = match variant {
            Variant::Base => DMatrix::from_fn(s, s + 1, |j, i| (0..nq).map(|q| w[q] * phi[q][j] * psi[q][i]).sum()),
            _ => {
                let gram = DMatrix::from_fn(s, s, |j, l| (0..nq).map(|q| w[q] * phi[q][j] * phi[q][l]).sum());
                gram * &proj
            }
        };
        Self {
            s,
            deriv,
            visc,
            proj,
            load,
            trial_at: psi.to_vec(),
            test_at: phi.to_vec(),
        }
    }

    /// Inverse of the unknown block and the column multiplying `u_0`, for `a = dt ν |κ|²`.
    fn mode_system(&self, a: f64) -> (DMatrix<f64>, DVector<f64>) {
        let s = self.s;
        let k = DMatrix::from_fn(s, s, |j, i| self.deriv[(j, i + 1)] + a * self.visc[(j, i + 1)]);
        let b0 = DVector::from_fn(s, |j, _| self.deriv[(j, 0)] + a * self.visc[(j, 0)]);
        let inv = k.try_inverse().expect("temporal system is nonsingular for a ≥ 0");
        (inv, b0)
    }
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

fn to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn combine_c(weights: &[f64], coeffs: &[Vec<Complex64>], out: &mut [Complex64]) {
    out.iter_mut().for_each(|z| *z = ZERO);
    for (w, c) in weights.iter().zip(coeffs) {
        if *w == 0.0 {
            continue;
        }
        for (o, x) in out.iter_mut().zip(c) {
            *o += *w * x;
        }
    }
}

impl SlabSolver<IncompressibleProblem> for PicardSlabSolver {
    fn solve(&self, problem: &IncompressibleProblem, scheme: &SlabScheme, dt: f64, guess: SlabState) -> (SlabState, SolveReport) {
        let grid = problem.grid();
        let variant = problem.variant();
        let mats = SlabMatrices::new(scheme, variant);
        let s = mats.s;
        let nq = mats.load.ncols();
        let len = grid.coeff_len();
        let nu = problem.params().inv_re();

        let mut systems: HashMap<i64, (DMatrix<f64>, DVector<f64>)> = HashMap::new();
        let mut mode_sys = Vec::with_capacity(len / 3);
        let tp2 = (2.0 * std::f64::consts::PI).powi(2);
        for (i, j, l) in grid.modes() {
            let k = grid.k(i, j, l);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            systems.entry(k2).or_insert_with(|| mats.mode_system(dt * nu * tp2 * k2 as f64));
            mode_sys.push(k2);
        }

        let u0 = to_complex(&guess.trial[0]);
        let block = len / 3;
        let mut map = |x: &DVector<f64>| -> Result<DVector<f64>, Inadmissible> {
            let mut trial: Vec<Vec<Complex64>> = Vec::with_capacity(s + 1);
            trial.push(u0.clone());
            for i in 0..s {
                trial.push(to_complex(&x.as_slice()[2 * i * len..2 * (i + 1) * len]));
            }
            let aux_nodes: Vec<Vec<Complex64>> = (0..s)
                .map(|l| {
                    let row: Vec<f64> = (0..=s).map(|i| mats.proj[(l, i)]).collect();
                    let mut out = vec![ZERO; len];
                    combine_c(&row, &trial, &mut out);
                    out
                })
                .collect();
            // convective term at each main quadrature node
            let mut conv = vec![vec![ZERO; len]; nq];
            let mut a = vec![ZERO; len];
            let mut b = vec![ZERO; len];
            let mut tmp = vec![ZERO; len];
            for q in 0..nq {
                match variant {
                    Variant::Full => {
                        combine_c(&mats.test_at[q], &aux_nodes, &mut a);
                        curl_into(grid, &a, &mut b);
                    }
                    Variant::EnergyOnly => {
                        combine_c(&mats.test_at[q], &aux_nodes, &mut a);
                        combine_c(&mats.trial_at[q], &trial, &mut tmp);
                        curl_into(grid, &tmp, &mut b);
                    }
                    Variant::Base => {
                        combine_c(&mats.trial_at[q], &trial, &mut a);
                        curl_into(grid, &a, &mut b);
                    }
                }
                problem.projected_cross(&a, &b, &mut conv[q]);
            }
            let mut next = vec![ZERO; s * len];
            let mut rhs = vec![ZERO; s];
            for c in 0..3 {
                for (m, k2) in mode_sys.iter().enumerate() {
                    let o = c * block + m;
                    let (inv, b0) = &systems[k2];
                    for j in 0..s {
                        let mut r = -b0[j] * u0[o];
                        for q in 0..nq {
                            r += dt * mats.load[(j, q)] * conv[q][o];
                        }
                        rhs[j] = r;
                    }
                    for i in 0..s {
                        let mut v = ZERO;
                        for j in 0..s {
                            v += inv[(i, j)] * rhs[j];
                        }
                        next[i * len + o] = v;
                    }
                }
            }
            if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Inadmissible);
            }
            Ok(DVector::from_vec(to_real(&next)))
        };

        let mut x0 = Vec::with_capacity(2 * s * len);
        for c in &guess.trial[1..] {
            x0.extend_from_slice(c);
        }
        let (x, mut report) = picard_solve(&mut map, DVector::from_vec(x0), &self.config);

        let mut out = guess;
        for i in 0..s {
            out.trial[i + 1].copy_from_slice(&x.as_slice()[2 * i * len..2 * (i + 1) * len]);
        }
        let trial_c: Vec<Vec<Complex64>> = out.trial.iter().map(|t| to_complex(t)).collect();
        for l in 0..s {
            let row: Vec<f64> = (0..=s).map(|i| mats.proj[(l, i)]).collect();
            let mut ut = vec![ZERO; len];
            combine_c(&row, &trial_c, &mut ut);
            match variant {
                Variant::Full => {
                    let mut w = vec![ZERO; len];
                    curl_into(grid, &ut, &mut w);
                    let mut aux = to_real(&ut);
                    aux.extend(to_real(&w));
                    out.aux[l] = aux;
                }
                Variant::EnergyOnly => out.aux[l] = to_real(&ut),
                Variant::Base => {}
            }
        }
        if report.converged && out.trial.iter().flatten().any(|x| !x.is_finite()) {
            report.converged = false;
            report.failure = Some(FailureReason::NonFinite);
        }
        (out, report)
    }

    fn config(&self) -> &SolverConfig {
        &self.config
    }
}

/// `I_n[−(1/Re)‖∇ũ‖²]` and `I_n[−(1/Re)(∇ũ, ∇ω̃)]` over a converged slab of the
/// full scheme: the predicted viscous changes of energy and helicity.
pub fn viscous_changes(problem: &IncompressibleProblem, scheme: &SlabScheme, slab: &SlabState, dt: f64) -> [f64; 2] {
    let grid = problem.grid();
    let nd = 2 * grid.coeff_len();
    let mut out = [0.0; 2];
    if slab.aux.first().map_or(true, |a| a.len() < 2 * nd) {
        return [f64::NAN; 2];
    }
    for (q, &w) in scheme.main_rule().weights().iter().enumerate() {
        let phi = &scheme.main_test_table()[q];
        let mut ut = vec![0.0; nd];
        let mut om = vec![0.0; nd];
        for (j, a) in slab.aux.iter().enumerate() {
            for k in 0..nd {
                ut[k] += phi[j] * a[k];
                om[k] += phi[j] * a[nd + k];
            }
        }
        let ut = VectorField::from_real(grid, &ut);
        let om = VectorField::from_real(grid, &om);
        out[0] += dt * w * problem.viscous_form(&ut, &ut);
        out[1] += dt * w * problem.viscous_form(&ut, &om);
    }
    out
}

