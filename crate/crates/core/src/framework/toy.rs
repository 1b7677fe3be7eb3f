//! Small ODE instantiations used to exercise the framework.

use super::problem::{Problem, Structure};

/// Harmonic oscillator `(q, p)` with `F̃(u, ũ; v) = (J ũ, v)`, `J = [[0, 1], [−1, 0]]`,
/// and `Q₁ = ½(q² + p²)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Oscillator;

impl Oscillator {
    /// Exact flow: rotation of the initial point by angle `t`.
    pub fn exact(u0: [f64; 2], t: f64) -> [f64; 2] {
        let (s, c) = t.sin_cos();
        [c * u0[0] + s * u0[1], -s * u0[0] + c * u0[1]]
    }
}

impl Problem for Oscillator {
    fn dof_count(&self) -> usize {
        2
    }
    fn aux_dof_count(&self) -> usize {
        2
    }
    fn quantity_count(&self) -> usize {
        1
    }
    fn structure(&self) -> Vec<Structure> {
        vec![Structure::Conserved]
    }
    fn quantity_names(&self) -> Vec<String> {
        vec!["energy".into()]
    }
    fn mass_action(&self, _u: &[f64], udot: &[f64], out: &mut [f64]) {
        out.copy_from_slice(udot);
    }
    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[1];
        out[1] = -u[0];
    }
    fn modified_rhs(&self, _u: &[f64], aux: &[f64], out: &mut [f64]) {
        out[0] = aux[1];
        out[1] = -aux[0];
    }
    fn quantities(&self, u: &[f64]) -> Vec<f64> {
        vec![0.5 * (u[0] * u[0] + u[1] * u[1])]
    }
    fn quantity_derivative(&self, _q: usize, u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(u);
    }
    fn aux_mass_action(&self, _u: &[f64], w: &[f64], out: &mut [f64]) {
        out.copy_from_slice(w);
    }
    fn aux_target(&self, u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(u);
    }
    fn aux_test_function(&self, _q: usize, aux: &[f64], out: &mut [f64]) -> bool {
        out.copy_from_slice(aux);
        true
    }
    fn associated_aux(&self, u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(u);
    }
}

/// Scalar decay `u̇ = −u` written as `F̃(u, ũ; v) = −(ũ, v)` with `Q₁ = ½u²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DissipativeScalar;

impl Problem for DissipativeScalar {
    fn dof_count(&self) -> usize {
        1
    }
    fn aux_dof_count(&self) -> usize {
        1
    }
    fn quantity_count(&self) -> usize {
        1
    }
    fn structure(&self) -> Vec<Structure> {
        vec![Structure::NonIncreasing]
    }
    fn mass_action(&self, _u: &[f64], udot: &[f64], out: &mut [f64]) {
        out[0] = udot[0];
    }
    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        out[0] = -u[0];
    }
    fn modified_rhs(&self, _u: &[f64], aux: &[f64], out: &mut [f64]) {
        out[0] = -aux[0];
    }
    fn quantities(&self, u: &[f64]) -> Vec<f64> {
        vec![0.5 * u[0] * u[0]]
    }
    fn quantity_derivative(&self, _q: usize, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }
    fn aux_mass_action(&self, _u: &[f64], w: &[f64], out: &mut [f64]) {
        out[0] = w[0];
    }
    fn aux_target(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }
    fn aux_test_function(&self, _q: usize, aux: &[f64], out: &mut [f64]) -> bool {
        out[0] = aux[0];
        true
    }
    fn associated_aux(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }
}

/// `u̇ = λu` with no auxiliaries (`F̃ = F`), the base scheme.
#[derive(Debug, Clone, Copy)]
pub struct LinearScalar {
    pub lambda: f64,
}

impl Problem for LinearScalar {
    fn dof_count(&self) -> usize {
        1
    }
    fn aux_dof_count(&self) -> usize {
        0
    }
    fn quantity_count(&self) -> usize {
        1
    }
    fn structure(&self) -> Vec<Structure> {
        vec![Structure::Indefinite]
    }
    fn mass_action(&self, _u: &[f64], udot: &[f64], out: &mut [f64]) {
        out[0] = udot[0];
    }
    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        out[0] = self.lambda * u[0];
    }
    fn modified_rhs(&self, u: &[f64], _aux: &[f64], out: &mut [f64]) {
        self.rhs(u, out);
    }
    fn quantities(&self, u: &[f64]) -> Vec<f64> {
        vec![0.5 * u[0] * u[0]]
    }
    fn quantity_derivative(&self, _q: usize, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }
    fn aux_mass_action(&self, _u: &[f64], _w: &[f64], _out: &mut [f64]) {}
    fn aux_target(&self, _u: &[f64], _out: &mut [f64]) {}
    fn aux_test_function(&self, _q: usize, _aux: &[f64], _out: &mut [f64]) -> bool {
        false
    }
    fn associated_aux(&self, _u: &[f64], _out: &mut [f64]) {}
}

/// Stiff cubic decay `u̇ = −k u³` written as `F̃(u, ũ; v) = −k u² (ũ, v)`.
/// With large `k·Δt` and a tight iteration cap the slab solve fails, which
/// exercises failure reporting.
#[derive(Debug, Clone, Copy)]
pub struct StiffCubic {
    pub k: f64,
}

impl Problem for StiffCubic {
    fn dof_count(&self) -> usize {
        1
    }
    fn aux_dof_count(&self) -> usize {
        1
    }
    fn quantity_count(&self) -> usize {
        1
    }
    fn structure(&self) -> Vec<Structure> {
        vec![Structure::NonIncreasing]
    }
    fn mass_action(&self, _u: &[f64], udot: &[f64], out: &mut [f64]) {
        out[0] = udot[0];
    }
    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        out[0] = -self.k * u[0].powi(3);
    }
    fn modified_rhs(&self, u: &[f64], aux: &[f64], out: &mut [f64]) {
        out[0] = -self.k * u[0] * u[0] * aux[0];
    }
    fn quantities(&self, u: &[f64]) -> Vec<f64> {
        vec![0.5 * u[0] * u[0]]
    }
    fn quantity_derivative(&self, _q: usize, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }
    fn aux_mass_action(&self, _u: &[f64], w: &[f64], out: &mut [f64]) {
        out[0] = w[0];
    }
    fn aux_target(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }
    fn aux_test_function(&self, _q: usize, aux: &[f64], out: &mut [f64]) -> bool {
        out[0] = aux[0];
        true
    }
    fn associated_aux(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }
}
