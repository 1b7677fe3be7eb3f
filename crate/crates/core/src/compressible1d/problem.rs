use thiserror::Error;

use super::gas::{GasLaw, IdealGas};
use crate::fem1d::{p1_gradient, p1_value, PeriodicMesh1D, QuadPoint};
use crate::framework::{Locality, Problem, Structure};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum ParamsError {
    #[error("Reynolds number must be positive (or infinite), got {0}")]
    Reynolds(f64),
    #[error("Prandtl number must be positive and finite, got {0}")]
    Prandtl(f64),
}

/// Reynolds and Prandtl numbers; `re = ∞` drops viscosity and heat conduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressibleParams {
    pub re: f64,
    pub pr: f64,
}

impl CompressibleParams {
    pub fn ideal() -> Self {
        Self {
            re: f64::INFINITY,
            pr: 0.71,
        }
    }

    pub fn viscous(re: f64, pr: f64) -> Self {
        Self { re, pr }
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if !(self.re > 0.0) {
            return Err(ParamsError::Reynolds(self.re));
        }
        if !(self.pr > 0.0 && self.pr.is_finite()) {
            return Err(ParamsError::Prandtl(self.pr));
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.re.is_infinite()
    }

    pub fn inv_re(&self) -> f64 {
        if self.is_ideal() {
            0.0
        } else {
            1.0 / self.re
        }
    }
}

/// Values and gradients of `(σ, μ, ζ)` and derived primal quantities at one point.
#[derive(Debug, Clone, Copy)]
struct PrimalPoint {
    sigma: f64,
    mu: f64,
    rho: f64,
    eps: f64,
    u: f64,
    u_x: f64,
    p: f64,
    p_x: f64,
    theta: f64,
    theta_x: f64,
    beta: f64,
    g: f64,
    s: f64,
}

#[derive(Debug, Clone, Copy)]
struct AuxPoint {
    g: f64,
    g_x: f64,
    u: f64,
    u_x: f64,
    beta: f64,
    beta_x: f64,
}

/// 1D periodic compressible Navier–Stokes in the variables `σ = √ρ`,
/// `μ = √ρ u`, `ζ = log ε` on P1 elements.
///
/// Unknown layout: `[σ, μ, ζ]`, each a block of nodal values. Auxiliary
/// layout: `[g̃, ũ, β̃]`. Quantities: mass, momentum, energy, entropy.
#[derive(Debug, Clone)]
pub struct CompressibleProblem<G = IdealGas> {
    mesh: PeriodicMesh1D,
    gas: G,
    params: CompressibleParams,
}

impl<G: GasLaw> CompressibleProblem<G> {
    pub fn new(mesh: PeriodicMesh1D, gas: G, params: CompressibleParams) -> Result<Self, ParamsError> {
        params.validate()?;
        Ok(Self { mesh, gas, params })
    }

    pub fn mesh(&self) -> &PeriodicMesh1D {
        &self.mesh
    }

    pub fn gas(&self) -> &G {
        &self.gas
    }

    pub fn params(&self) -> &CompressibleParams {
        &self.params
    }

    fn n(&self) -> usize {
        self.mesh.n_nodes()
    }

    fn primal(&self, u: &[f64], p: &QuadPoint) -> PrimalPoint {
        let n = self.n();
        let h = self.mesh.h();
        let (sb, mb, zb) = (&u[..n], &u[n..2 * n], &u[2 * n..3 * n]);
        let sigma = p1_value(sb, p.cell, p.xi);
        let mu = p1_value(mb, p.cell, p.xi);
        let zeta = p1_value(zb, p.cell, p.xi);
        let sigma_x = p1_gradient(sb, p.cell, h);
        let mu_x = p1_gradient(mb, p.cell, h);
        let zeta_x = p1_gradient(zb, p.cell, h);
        let rho = sigma * sigma;
        let eps = zeta.exp();
        let vel = mu / sigma;
        let u_x = (mu_x - vel * sigma_x) / sigma;
        let (rho_x, eps_x) = (2.0 * sigma * sigma_x, eps * zeta_x);
        match self.gas.forward_state(rho, eps) {
            Ok(f) => PrimalPoint {
                sigma,
                mu,
                rho,
                eps,
                u: vel,
                u_x,
                p: f.p,
                p_x: f.dp_drho * rho_x + f.dp_deps * eps_x,
                theta: f.theta,
                theta_x: f.dtheta_drho * rho_x + f.dtheta_deps * eps_x,
                beta: f.beta,
                g: f.g,
                s: f.s,
            },
            Err(_) => PrimalPoint {
                sigma,
                mu,
                rho,
                eps,
                u: vel,
                u_x,
                p: f64::NAN,
                p_x: f64::NAN,
                theta: f64::NAN,
                theta_x: f64::NAN,
                beta: f64::NAN,
                g: f64::NAN,
                s: f64::NAN,
            },
        }
    }

    fn aux(&self, w: &[f64], p: &QuadPoint) -> AuxPoint {
        let n = self.n();
        let h = self.mesh.h();
        let (gb, ub, bb) = (&w[..n], &w[n..2 * n], &w[2 * n..3 * n]);
        AuxPoint {
            g: p1_value(gb, p.cell, p.xi),
            g_x: p1_gradient(gb, p.cell, h),
            u: p1_value(ub, p.cell, p.xi),
            u_x: p1_gradient(ub, p.cell, h),
            beta: p1_value(bb, p.cell, p.xi),
            beta_x: p1_gradient(bb, p.cell, h),
        }
    }

    /// Scatters per-point `(A, B)` coefficients of three rows into `out`.
    fn assemble(&self, out: &mut [f64], mut coeffs: impl FnMut(&QuadPoint) -> [(f64, f64); 3]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        let n = self.n();
        for p in self.mesh.points() {
            let rows = coeffs(&p);
            for (b, (a, bx)) in rows.into_iter().enumerate() {
                if a != 0.0 || bx != 0.0 {
                    self.mesh.scatter(&p, a, bx, &mut out[b * n..(b + 1) * n]);
                }
            }
        }
    }

    /// Pointwise entropy production `(4/(3 Re)) ρ β̃ ũ_x² + (1/(Re Pr)) ρ θ² β̃_x²`,
    /// integrated over the domain.
    pub fn entropy_production(&self, u: &[f64], w: &[f64]) -> f64 {
        let nu = self.params.inv_re();
        if nu == 0.0 {
            return 0.0;
        }
        let kappa = nu / self.params.pr;
        self.mesh
            .points()
            .map(|p| {
                let pr = self.primal(u, &p);
                let ax = self.aux(w, &p);
                let visc = 4.0 / 3.0 * nu * pr.rho * ax.beta * ax.u_x * ax.u_x;
                let heat = kappa * pr.rho * pr.theta * pr.theta * ax.beta_x * ax.beta_x;
                p.weight * (visc + heat)
            })
            .sum()
    }

    /// Nodal values of the primal fields `(ρ, u, p)`.
    pub fn primitive_nodal(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.n();
        let rho: Vec<f64> = u[..n].iter().map(|s| s * s).collect();
        let vel = (0..n).map(|i| u[n + i] / u[i]).collect();
        let p = (0..n)
            .map(|i| self.gas.forward_state(rho[i], u[2 * n + i].exp()).map_or(f64::NAN, |f| f.p))
            .collect();
        (rho, vel, p)
    }
}

const NAMES: [&str; 4] = ["mass", "momentum", "energy", "entropy"];

impl<G: GasLaw> Problem for CompressibleProblem<G> {
    fn dof_count(&self) -> usize {
        3 * self.n()
    }

    fn aux_dof_count(&self) -> usize {
        3 * self.n()
    }

    fn quantity_count(&self) -> usize {
        4
    }

    fn structure(&self) -> Vec<Structure> {
        let entropy = if self.params.is_ideal() {
            Structure::Conserved
        } else {
            Structure::NonDecreasing
        };
        vec![Structure::Conserved, Structure::Conserved, Structure::Conserved, entropy]
    }

    fn quantity_names(&self) -> Vec<String> {
        NAMES.iter().map(|s| s.to_string()).collect()
    }

    fn mass_action(&self, u: &[f64], udot: &[f64], out: &mut [f64]) {
        let n = self.n();
        self.assemble(out, |p| {
            let sigma = p1_value(&u[..n], p.cell, p.xi);
            let eps = p1_value(&u[2 * n..], p.cell, p.xi).exp();
            let sd = p1_value(&udot[..n], p.cell, p.xi);
            let md = p1_value(&udot[n..2 * n], p.cell, p.xi);
            let zd = p1_value(&udot[2 * n..], p.cell, p.xi);
            [(2.0 * sigma * sd, 0.0), (sigma * md, 0.0), (eps * zd, 0.0)]
        });
    }

    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        let nu = self.params.inv_re();
        let kappa = nu / self.params.pr;
        self.assemble(out, |p| {
            let q = self.primal(u, p);
            let visc = 4.0 / 3.0 * nu * q.rho * q.u_x;
            [
                (0.0, q.sigma * q.mu),
                (-0.5 * q.rho * q.u * q.u_x - q.p_x, 0.5 * q.rho * q.u * q.u - visc),
                (
                    q.u * q.p_x + visc * q.u_x,
                    q.u * (q.eps + q.p) - kappa * q.rho * q.theta_x,
                ),
            ]
        });
    }

    fn modified_rhs(&self, u: &[f64], aux: &[f64], out: &mut [f64]) {
        let nu = self.params.inv_re();
        let kappa = nu / self.params.pr;
        self.assemble(out, |p| {
            let q = self.primal(u, p);
            let a = self.aux(aux, p);
            let (rho_t, p_t, eps_t, p_t_x) = match self.gas.inverse_state(a.g, a.beta) {
                Ok(st) => (st.rho, st.p, st.eps, st.dp[0] * a.g_x + st.dp[1] * a.beta_x),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
            };
            let visc = 4.0 / 3.0 * nu * q.rho * a.u_x;
            [
                (0.0, rho_t * a.u),
                (-0.5 * rho_t * a.u * a.u_x - p_t_x, 0.5 * rho_t * a.u * a.u - visc),
                (
                    a.u * p_t_x + visc * a.u_x,
                    a.u * (eps_t + p_t) + kappa * q.rho * q.theta * q.theta * a.beta_x,
                ),
            ]
        });
    }

    fn quantities(&self, u: &[f64]) -> Vec<f64> {
        let mut q = [0.0; 4];
        for p in self.mesh.points() {
            let s = self.primal(u, &p);
            q[0] += p.weight * s.rho;
            q[1] += p.weight * s.sigma * s.mu;
            q[2] += p.weight * (0.5 * s.mu * s.mu + s.eps);
            q[3] += p.weight * s.rho * s.s;
        }
        q.to_vec()
    }

    fn quantity_derivative(&self, q: usize, u: &[f64], out: &mut [f64]) {
        self.assemble(out, |p| {
            let s = self.primal(u, p);
            match q {
                0 => [(2.0 * s.sigma, 0.0), (0.0, 0.0), (0.0, 0.0)],
                1 => [(s.mu, 0.0), (s.sigma, 0.0), (0.0, 0.0)],
                2 => [(0.0, 0.0), (s.mu, 0.0), (s.eps, 0.0)],
                _ => [(2.0 * s.sigma * s.g, 0.0), (0.0, 0.0), (s.eps * s.beta, 0.0)],
            }
        });
    }

    fn aux_mass_action(&self, u: &[f64], w: &[f64], out: &mut [f64]) {
        let n = self.n();
        self.assemble(out, |p| {
            let sigma = p1_value(&u[..n], p.cell, p.xi);
            let eps = p1_value(&u[2 * n..], p.cell, p.xi).exp();
            let a = self.aux(w, p);
            [(2.0 * sigma * a.g, 0.0), (sigma * a.u, 0.0), (eps * a.beta, 0.0)]
        });
    }

    fn aux_target(&self, u: &[f64], out: &mut [f64]) {
        self.assemble(out, |p| {
            let s = self.primal(u, p);
            [(2.0 * s.sigma * s.g, 0.0), (s.mu, 0.0), (s.eps * s.beta, 0.0)]
        });
    }

    fn aux_test_function(&self, q: usize, aux: &[f64], out: &mut [f64]) -> bool {
        let n = self.n();
        let (g, vel, beta) = (&aux[..n], &aux[n..2 * n], &aux[2 * n..]);
        let (a, rest) = out.split_at_mut(n);
        let (b, c) = rest.split_at_mut(n);
        match q {
            0 => {
                a.fill(1.0);
                b.fill(0.0);
                c.fill(0.0);
            }
            1 => {
                a.iter_mut().zip(vel).for_each(|(x, v)| *x = 0.5 * v);
                b.fill(1.0);
                c.fill(0.0);
            }
            2 => {
                a.fill(0.0);
                b.copy_from_slice(vel);
                c.fill(1.0);
            }
            3 => {
                a.copy_from_slice(g);
                b.fill(0.0);
                c.copy_from_slice(beta);
            }
            _ => return false,
        }
        true
    }

    fn associated_aux(&self, u: &[f64], out: &mut [f64]) {
        let n = self.n();
        for i in 0..n {
            let (sigma, mu, zeta) = (u[i], u[n + i], u[2 * n + i]);
            let rho = sigma * sigma;
            let (g, beta) = self
                .gas
                .forward_state(rho, zeta.exp())
                .map_or((f64::NAN, f64::NAN), |f| (f.g, f.beta));
            out[i] = g;
            out[n + i] = mu / sigma;
            out[2 * n + i] = beta;
        }
    }

    fn admissible_state(&self, u: &[f64]) -> bool {
        let n = self.n();
        u[..n].iter().all(|&s| s > 0.0) && u.iter().all(|x| x.is_finite())
    }

    fn admissible_aux(&self, aux: &[f64]) -> bool {
        let n = self.n();
        aux[2 * n..].iter().all(|&b| b > 0.0) && aux.iter().all(|x| x.is_finite())
    }

    fn locality(&self) -> Option<Locality> {
        let n = self.n();
        let sites: Vec<usize> = (0..3).flat_map(|_| 0..n).collect();
        let neighbours = (0..n)
            .map(|i| {
                let mut nb = vec![(i + n - 1) % n, i, (i + 1) % n];
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        Some(Locality {
            primal_site: sites.clone(),
            aux_site: sites,
            neighbours,
        })
    }
}
