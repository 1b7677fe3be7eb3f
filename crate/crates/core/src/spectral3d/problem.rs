use rustfft::num_complex::Complex64;
use thiserror::Error;

use super::field::{cross_into, curl_into, grad_inner, helicity, kinetic_energy, leray_in_place, ProductWorkspace, VectorField};
use super::grid::FourierGrid;
use crate::framework::{Problem, Structure};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("Reynolds number must be positive (or infinite), got {0}")]
pub struct ReynoldsError(pub f64);

/// `re = ∞` is the ideal (inviscid) limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncompressibleParams {
    pub re: f64,
}

impl IncompressibleParams {
    pub fn ideal() -> Self {
        Self { re: f64::INFINITY }
    }

    pub fn viscous(re: f64) -> Self {
        Self { re }
    }

    pub fn validate(&self) -> Result<(), ReynoldsError> {
        if self.re > 0.0 {
            Ok(())
        } else {
            Err(ReynoldsError(self.re))
        }
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

/// Which modified right side the problem uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Auxiliaries `ũ, ω̃`; `F̃ = P(ũ × ω̃) − ν∇²`-term on `ũ`. Conserves energy and helicity.
    Full,
    /// Auxiliary `ũ` only; `F̃ = P(ũ × curl u) − ν∇²`-term on `ũ`. Conserves energy only.
    EnergyOnly,
    /// No auxiliaries, `F̃ = F` (Gauss collocation).
    Base,
}

/// Incompressible Navier–Stokes in rotational form on the Fourier space of
/// divergence-free, mean-zero fields. Quantities: energy `½‖u‖²` and helicity
/// `½(u, curl u)`.
///
/// Unknowns are interleaved real/imaginary parts of all coefficients, so the
/// L² inner product is the Euclidean dot product. Auxiliary layout: `[ũ, ω̃]`
/// for [`Variant::Full`], `[ũ]` for [`Variant::EnergyOnly`].
#[derive(Debug, Clone)]
pub struct IncompressibleProblem {
    grid: FourierGrid,
    params: IncompressibleParams,
    variant: Variant,
}

impl IncompressibleProblem {
    pub fn new(grid: FourierGrid, params: IncompressibleParams, variant: Variant) -> Result<Self, ReynoldsError> {
        params.validate()?;
        Ok(Self { grid, params, variant })
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn params(&self) -> &IncompressibleParams {
        &self.params
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    fn complex(&self, v: &[f64]) -> Vec<Complex64> {
        v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
    }

    fn write_real(z: &[Complex64], out: &mut [f64]) {
        for (o, c) in out.chunks_exact_mut(2).zip(z) {
            o[0] = c.re;
            o[1] = c.im;
        }
    }

    /// `P(a × b)` into `out`.
    pub(crate) fn projected_cross(&self, a: &[Complex64], b: &[Complex64], out: &mut [Complex64]) {
        cross_into(&self.grid, a, b, &mut ProductWorkspace::new(&self.grid), out);
        leray_in_place(&self.grid, out);
    }

    /// `out -= ν |2πk|² a`.
    pub(crate) fn sub_viscous(&self, a: &[Complex64], out: &mut [Complex64]) {
        let nu = self.params.inv_re();
        if nu == 0.0 {
            return;
        }
        for (i, j, l) in self.grid.modes() {
            let kap = self.grid.kappa(i, j, l);
            let k2 = kap[0] * kap[0] + kap[1] * kap[1] + kap[2] * kap[2];
            for c in 0..3 {
                let o = self.grid.index(c, i, j, l);
                out[o] -= nu * k2 * a[o];
            }
        }
    }

    fn curl_c(&self, a: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
        curl_into(&self.grid, a, &mut out);
        out
    }

    /// `−(1/Re) ∫ ∇a : ∇b`, the viscous part of `F̃` tested with `b`.
    pub fn viscous_form(&self, a: &VectorField, b: &VectorField) -> f64 {
        -self.params.inv_re() * grad_inner(&self.grid, a, b)
    }
}

impl Problem for IncompressibleProblem {
    fn dof_count(&self) -> usize {
        2 * self.grid.coeff_len()
    }

    fn aux_dof_count(&self) -> usize {
        match self.variant {
            Variant::Full => 2 * self.dof_count(),
            Variant::EnergyOnly => self.dof_count(),
            Variant::Base => 0,
        }
    }

    fn quantity_count(&self) -> usize {
        2
    }

    fn structure(&self) -> Vec<Structure> {
        let energy = if self.params.is_ideal() {
            Structure::Conserved
        } else {
            Structure::NonIncreasing
        };
        match (self.variant, self.params.is_ideal()) {
            (Variant::Full, true) => vec![Structure::Conserved, Structure::Conserved],
            (Variant::Full, false) | (Variant::EnergyOnly, _) => vec![energy, Structure::Indefinite],
            (Variant::Base, _) => vec![Structure::Indefinite, Structure::Indefinite],
        }
    }

    fn quantity_names(&self) -> Vec<String> {
        vec!["energy".into(), "helicity".into()]
    }

    fn mass_action(&self, _u: &[f64], udot: &[f64], out: &mut [f64]) {
        out.copy_from_slice(udot);
    }

    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        let uc = self.complex(u);
        let w = self.curl_c(&uc);
        let mut f = vec![Complex64::new(0.0, 0.0); uc.len()];
        self.projected_cross(&uc, &w, &mut f);
        self.sub_viscous(&uc, &mut f);
        Self::write_real(&f, out);
    }

    fn modified_rhs(&self, u: &[f64], aux: &[f64], out: &mut [f64]) {
        let nd = self.dof_count();
        let (ut, w) = match self.variant {
            Variant::Full => (self.complex(&aux[..nd]), self.complex(&aux[nd..])),
            Variant::EnergyOnly => (self.complex(&aux[..nd]), self.curl_c(&self.complex(u))),
            Variant::Base => return self.rhs(u, out),
        };
        let mut f = vec![Complex64::new(0.0, 0.0); ut.len()];
        self.projected_cross(&ut, &w, &mut f);
        self.sub_viscous(&ut, &mut f);
        Self::write_real(&f, out);
    }

    fn quantities(&self, u: &[f64]) -> Vec<f64> {
        let f = VectorField::from_real(&self.grid, u);
        vec![kinetic_energy(&f), helicity(&self.grid, &f)]
    }

    fn quantity_derivative(&self, q: usize, u: &[f64], out: &mut [f64]) {
        if q == 0 {
            out.copy_from_slice(u);
        } else {
            Self::write_real(&self.curl_c(&self.complex(u)), out);
        }
    }

    fn aux_mass_action(&self, _u: &[f64], w: &[f64], out: &mut [f64]) {
        out.copy_from_slice(w);
    }

    fn aux_target(&self, u: &[f64], out: &mut [f64]) {
        let nd = self.dof_count();
        match self.variant {
            Variant::Full => {
                out[..nd].copy_from_slice(u);
                Self::write_real(&self.curl_c(&self.complex(u)), &mut out[nd..]);
            }
            Variant::EnergyOnly => out.copy_from_slice(u),
            Variant::Base => {}
        }
    }

    fn aux_test_function(&self, q: usize, aux: &[f64], out: &mut [f64]) -> bool {
        let nd = self.dof_count();
        match (self.variant, q) {
            (Variant::Full, 0) | (Variant::EnergyOnly, 0) => out.copy_from_slice(&aux[..nd]),
            (Variant::Full, 1) => out.copy_from_slice(&aux[nd..2 * nd]),
            _ => return false,
        }
        true
    }

    fn associated_aux(&self, u: &[f64], out: &mut [f64]) {
        self.aux_target(u, out);
    }
}
