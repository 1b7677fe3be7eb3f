//! Auxiliary-variable slab scheme: problem abstraction, residual assembly,
//! timestepping, and update-identity diagnostics.

mod diagnostics;
mod problem;
mod slab;
pub mod toy;

pub use diagnostics::{
    advance, check_update_identity, describe_structure, run_transient, IdentityCheck, StepDiagnostics, StepError,
    StepOutcome, StepRecord, TrajectorySummary,
};
pub use problem::{dot, Locality, Problem, Structure};
pub use slab::{
    assemble_residual, predicted_changes, slab_column_groups, FrameworkError, NewtonSlabSolver, SlabScheme,
    SlabSolver, SlabState,
};
