//! Structure-preserving time integration with auxiliary variables.
//!
//! A semi-discrete problem `M(u; u̇, v) = F(u; v)` is advanced over slabs with
//! a degree-`S` trial polynomial in time. Each quantity of interest gets an
//! auxiliary unknown, the temporal projection of its associated test function,
//! and the modified right side `F̃` is built so that testing with the auxiliary
//! reproduces the quantity's conservation or dissipation law exactly.
//!
//! Two instantiations ship with the crate: 3D periodic incompressible flow on
//! a Fourier–Galerkin space ([`spectral3d`]) and 1D periodic compressible flow
//! on P1 finite elements ([`compressible1d`]).

pub mod baselines;
pub mod compressible1d;
pub mod fem1d;
pub mod framework;
pub mod io;
pub mod nlsolve;
pub mod spectral3d;
pub mod temporal;

pub use framework::{
    advance, run_transient, NewtonSlabSolver, Problem, SlabScheme, SlabSolver, SlabState, StepDiagnostics,
    StepRecord, Structure, TrajectorySummary,
};
pub use nlsolve::{SolveReport, SolverConfig};
pub use temporal::{gauss_rule, QuadratureRule, TemporalBasis};
