//! 3D periodic incompressible flow on a Fourier–Galerkin space with energy
//! and helicity structure.

mod field;
mod grid;
mod problem;
mod solver;

pub use field::{
    cross_product_dealiased, curl, curl_hat, grad_inner, helicity, inner_product, kinetic_energy, leray_project,
    make_abc_field, make_random_divfree, DivFreeField, ProductWorkspace, VectorField,
};
pub use grid::{FourierGrid, GridError};
pub use problem::{IncompressibleParams, IncompressibleProblem, ReynoldsError, Variant};
pub use solver::{viscous_changes, PicardSlabSolver};

use crate::framework::{FrameworkError, SlabScheme};

/// Slab scheme whose main rule integrates the cubic-in-time convective term
/// exactly (`⌈3S/2⌉` Gauss points). With only `S` points the auxiliary `ũ`
/// agrees with `u` at every node and all variants collapse to Gauss collocation.
pub fn incompressible_scheme(s: usize) -> Result<SlabScheme, FrameworkError> {
    SlabScheme::with_points(s, (3 * s).div_ceil(2), 2 * s)
}

#[cfg(test)]
mod tests;
