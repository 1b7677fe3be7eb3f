//! Builds the problem, scheme and solver a configuration describes and runs it.

use conserve_core::baselines::{midpoint_scheme, BaseCollocation};
use conserve_core::compressible1d::{
    compressible_scheme, make_inviscid_ic, make_supersonic_ic, make_uniform, CompressibleParams, CompressibleProblem,
    IdealGas,
};
use conserve_core::fem1d::PeriodicMesh1D;
use conserve_core::framework::toy::Oscillator;
use conserve_core::framework::{run_transient, NewtonSlabSolver, Problem, SlabScheme, SlabSolver, StepRecord, TrajectorySummary};
use conserve_core::io::Snapshot;
use conserve_core::spectral3d::{
    incompressible_scheme, make_abc_field, make_random_divfree, FourierGrid, IncompressibleParams,
    IncompressibleProblem, PicardSlabSolver, Variant, VectorField,
};

use crate::config::{ConfigError, Initial, ProblemKind, RunConfig, SchemeKind};

const DEFAULT_FOURIER_N: usize = 8;
const DEFAULT_CELLS: usize = 64;

#[derive(Debug)]
pub struct RunOutcome {
    pub quantity_names: Vec<String>,
    pub summary: TrajectorySummary,
    pub snapshot: Snapshot,
}

fn setup(key: &'static str, e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        key,
        message: e.to_string(),
    }
}

fn scheme_for(cfg: &RunConfig) -> Result<SlabScheme, ConfigError> {
    let s = cfg.s;
    let q = &cfg.quadrature;
    let scheme = match (cfg.scheme, q.main, q.exact) {
        (SchemeKind::ImplicitMidpoint, None, None) => midpoint_scheme(),
        (SchemeKind::ImplicitMidpoint, m, e) => SlabScheme::with_points(1, m.unwrap_or(1), e.unwrap_or(4)),
        (SchemeKind::BaseCollocation, m, e) => SlabScheme::with_points(s, m.unwrap_or(s), e.unwrap_or(4 * s + 4)),
        (_, None, None) => match cfg.problem {
            ProblemKind::Toy => SlabScheme::gauss(s),
            ProblemKind::Incompressible3d => incompressible_scheme(s),
            ProblemKind::Compressible1d => compressible_scheme(s),
        },
        (_, m, e) => SlabScheme::with_points(s, m.unwrap_or(s), e.unwrap_or(4 * s + 4)),
    };
    scheme.map_err(|e| setup("quadrature", e))
}

fn drive<P, S>(
    problem: &P,
    solver: &S,
    cfg: &RunConfig,
    u0: &[f64],
    sink: &mut dyn FnMut(&StepRecord),
) -> Result<TrajectorySummary, ConfigError>
where
    P: Problem + ?Sized,
    S: SlabSolver<P>,
{
    let scheme = scheme_for(cfg)?;
    Ok(run_transient(problem, solver, &scheme, u0, cfg.dt, cfg.n_steps, sink))
}

/// Runs a validated configuration, streaming each completed step to `sink`.
pub fn execute(cfg: &RunConfig, sink: &mut dyn FnMut(&StepRecord)) -> Result<RunOutcome, ConfigError> {
    let newton = NewtonSlabSolver::new(cfg.solver.to_config());
    let base = matches!(cfg.scheme, SchemeKind::BaseCollocation | SchemeKind::ImplicitMidpoint);
    match cfg.problem {
        ProblemKind::Toy => {
            let u0 = match &cfg.initial {
                Initial::Values { values } => values.clone(),
                _ => vec![1.0, 0.0],
            };
            let summary = if base {
                drive(&BaseCollocation::new(Oscillator), &newton, cfg, &u0, sink)?
            } else {
                drive(&Oscillator, &newton, cfg, &u0, sink)?
            };
            let snapshot = Snapshot {
                n: 2,
                spatial_dims: 1,
                components: 1,
                values: summary.final_state.clone(),
            };
            Ok(RunOutcome {
                quantity_names: Oscillator.quantity_names(),
                summary,
                snapshot,
            })
        }
        ProblemKind::Incompressible3d => {
            let grid = FourierGrid::new(cfg.space.n.unwrap_or(DEFAULT_FOURIER_N)).map_err(|e| setup("space.n", e))?;
            let params = cfg.physics.re.map_or(IncompressibleParams::ideal(), IncompressibleParams::viscous);
            let variant = match cfg.scheme {
                SchemeKind::StructurePreserving => Variant::Full,
                SchemeKind::Q1Only => Variant::EnergyOnly,
                SchemeKind::ImplicitMidpoint | SchemeKind::BaseCollocation => Variant::Base,
            };
            let problem = IncompressibleProblem::new(grid.clone(), params, variant).map_err(|e| setup("physics.re", e))?;
            let field = match cfg.initial {
                Initial::Abc { a, b, c } => make_abc_field(&grid, a, b, c),
                Initial::Random { decay, amplitude } => {
                    let mut f = make_random_divfree(&grid, cfg.seed, decay).into_field();
                    f.scale(amplitude);
                    conserve_core::spectral3d::leray_project(&grid, &f)
                }
                _ => make_abc_field(&grid, 1.0, 1.0, 1.0),
            };
            let solver = PicardSlabSolver::new(cfg.solver.to_config());
            let summary = drive(&problem, &solver, cfg, &field.to_real(), sink)?;
            let physical = VectorField::from_real(&grid, &summary.final_state).to_physical(&grid);
            Ok(RunOutcome {
                quantity_names: problem.quantity_names(),
                snapshot: Snapshot {
                    n: grid.n() as u32,
                    spatial_dims: 3,
                    components: 3,
                    values: physical,
                },
                summary,
            })
        }
        ProblemKind::Compressible1d => {
            let cells = cfg.space.n.unwrap_or(DEFAULT_CELLS);
            let mesh = match cfg.space.points_per_cell {
                Some(p) => PeriodicMesh1D::with_points(cells, p),
                None => PeriodicMesh1D::new(cells),
            }
            .map_err(|e| setup("space", e))?;
            let gas = IdealGas::new(cfg.physics.cv).map_err(|e| setup("physics.cv", e))?;
            let params = match cfg.physics.re {
                Some(re) => CompressibleParams::viscous(re, cfg.physics.pr),
                None => CompressibleParams::ideal(),
            };
            let problem = CompressibleProblem::new(mesh.clone(), gas, params).map_err(|e| setup("physics", e))?;
            let state = match cfg.initial {
                Initial::Supersonic => make_supersonic_ic(&mesh),
                Initial::Uniform { rho, u, eps } => make_uniform(&mesh, rho, u, eps),
                _ => make_inviscid_ic(&mesh, cfg.physics.cv),
            };
            let u0 = state.to_vec();
            let names = problem.quantity_names();
            let summary = if base {
                drive(&BaseCollocation::new(problem), &newton, cfg, &u0, sink)?
            } else {
                drive(&problem, &newton, cfg, &u0, sink)?
            };
            Ok(RunOutcome {
                quantity_names: names,
                snapshot: Snapshot {
                    n: cells as u32,
                    spatial_dims: 1,
                    components: 3,
                    values: summary.final_state.clone(),
                },
                summary,
            })
        }
    }
}
