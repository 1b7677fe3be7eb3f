//! Fixtures shared by the benchmarks.

use conserve_core::compressible1d::{make_inviscid_ic, CompressibleParams, CompressibleProblem, IdealGas};
use conserve_core::fem1d::PeriodicMesh1D;
use conserve_core::spectral3d::{make_random_divfree, FourierGrid, IncompressibleParams, IncompressibleProblem, Variant};

/// Inviscid compressible problem on `cells` cells and its smooth initial state.
pub fn compressible_fixture(cells: usize) -> (CompressibleProblem, Vec<f64>) {
    let mesh = PeriodicMesh1D::new(cells).expect("valid mesh");
    let gas = IdealGas::new(2.5).expect("valid gas");
    let u0 = make_inviscid_ic(&mesh, gas.cv()).to_vec();
    let problem = CompressibleProblem::new(mesh, gas, CompressibleParams::ideal()).expect("valid parameters");
    (problem, u0)
}

/// Ideal incompressible problem on an `n³` Fourier grid with a random initial field.
pub fn incompressible_fixture(n: usize, variant: Variant) -> (IncompressibleProblem, Vec<f64>) {
    let grid = FourierGrid::new(n).expect("valid grid");
    let u0 = make_random_divfree(&grid, 1, 1.0).to_real();
    let problem = IncompressibleProblem::new(grid, IncompressibleParams::ideal(), variant).expect("valid parameters");
    (problem, u0)
}
