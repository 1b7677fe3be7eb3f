//! 1D periodic compressible Navier–Stokes with mass, momentum, energy, and
//! entropy structure.

mod gas;
mod initial;
mod problem;

pub use gas::{thermo_cancellation, ForwardState, GasError, GasLaw, IdealGas, InverseState};
pub use initial::{make_inviscid_ic, make_supersonic_ic, make_uniform};
pub use problem::{CompressibleParams, CompressibleProblem, ParamsError};

use crate::fem1d::NodalField;
use crate::framework::{FrameworkError, SlabScheme};

/// Nodal `σ = √ρ`, `μ = √ρ u`, `ζ = log ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressibleState {
    pub sigma: NodalField,
    pub mu: NodalField,
    pub zeta: NodalField,
}

impl CompressibleState {
    /// Flat unknown vector `[σ, μ, ζ]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.sigma.0.clone();
        v.extend_from_slice(&self.mu.0);
        v.extend_from_slice(&self.zeta.0);
        v
    }

    pub fn from_slice(u: &[f64]) -> Self {
        let n = u.len() / 3;
        Self {
            sigma: NodalField(u[..n].to_vec()),
            mu: NodalField(u[n..2 * n].to_vec()),
            zeta: NodalField(u[2 * n..3 * n].to_vec()),
        }
    }
}

/// Nodal auxiliaries `(g̃, ũ, β̃)` at one temporal test node.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxState {
    pub g: NodalField,
    pub u: NodalField,
    pub beta: NodalField,
}

impl AuxState {
    pub fn from_slice(w: &[f64]) -> Self {
        let n = w.len() / 3;
        Self {
            g: NodalField(w[..n].to_vec()),
            u: NodalField(w[n..2 * n].to_vec()),
            beta: NodalField(w[2 * n..3 * n].to_vec()),
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.g.0.clone();
        v.extend_from_slice(&self.u.0);
        v.extend_from_slice(&self.beta.0);
        v
    }
}

/// Slab scheme for the compressible problem: the main rule uses `3S + 3`
/// Gauss points so that `∫ ε ζ̇` (a non-polynomial time integrand) is resolved
/// close to roundoff; the near-exact rule uses `4S + 4`.
pub fn compressible_scheme(s: usize) -> Result<SlabScheme, FrameworkError> {
    SlabScheme::with_points(s, 3 * s + 3, 4 * s + 4)
}
