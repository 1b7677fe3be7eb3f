use std::f64::consts::PI;

use super::CompressibleState;
use crate::fem1d::PeriodicMesh1D;

/// Smooth isentropic perturbation: `σ = exp(½ sin 2πx)`, `μ = 0`,
/// `ζ = (1 + 1/C_V) sin 2πx`, which makes the specific entropy uniform.
pub fn make_inviscid_ic(mesh: &PeriodicMesh1D, cv: f64) -> CompressibleState {
    let wave = |x: f64| (2.0 * PI * x).sin();
    CompressibleState {
        sigma: mesh.interpolate(|x| (0.5 * wave(x)).exp()),
        mu: mesh.interpolate(|_| 0.0),
        zeta: mesh.interpolate(|x| (1.0 + 1.0 / cv) * wave(x)),
    }
}

/// Uniform density and energy with a localized velocity bump of peak 8 at `x = 0`:
/// `σ = 1`, `μ = 8 exp(cos 2πx − 1)`, `ζ = 0`.
pub fn make_supersonic_ic(mesh: &PeriodicMesh1D) -> CompressibleState {
    CompressibleState {
        sigma: mesh.interpolate(|_| 1.0),
        mu: mesh.interpolate(|x| 8.0 * ((2.0 * PI * x).cos() - 1.0).exp()),
        zeta: mesh.interpolate(|_| 0.0),
    }
}

/// Constant state with density `rho`, velocity `u`, and internal energy `eps`.
pub fn make_uniform(mesh: &PeriodicMesh1D, rho: f64, u: f64, eps: f64) -> CompressibleState {
    let sigma = rho.sqrt();
    CompressibleState {
        sigma: mesh.interpolate(|_| sigma),
        mu: mesh.interpolate(|_| sigma * u),
        zeta: mesh.interpolate(|_| eps.ln()),
    }
}
