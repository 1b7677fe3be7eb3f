//! Comparator schemes: implicit midpoint, the energy-only incompressible
//! variant, and plain Gauss collocation.

use std::fmt;
use std::str::FromStr;

use crate::compressible1d::{CompressibleProblem, CompressibleState, GasLaw};
use crate::framework::{advance, FrameworkError, Locality, NewtonSlabSolver, Problem, SlabScheme, StepError, Structure};
use crate::nlsolve::SolverConfig;
use crate::spectral3d::{FourierGrid, IncompressibleParams, IncompressibleProblem, ReynoldsError, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    ImplicitMidpointCompressible,
    Q1OnlyIncompressible,
    BaseGaussCollocation,
}

impl BaselineKind {
    pub fn tag(self) -> &'static str {
        match self {
            BaselineKind::ImplicitMidpointCompressible => "implicit_midpoint_compressible",
            BaselineKind::Q1OnlyIncompressible => "q1_only_incompressible",
            BaselineKind::BaseGaussCollocation => "base_gauss_collocation",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown baseline tag `{0}`")]
pub struct UnknownBaseline(pub String);

impl FromStr for BaselineKind {
    type Err = UnknownBaseline;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            BaselineKind::ImplicitMidpointCompressible,
            BaselineKind::Q1OnlyIncompressible,
            BaselineKind::BaseGaussCollocation,
        ]
        .into_iter()
        .find(|k| k.tag() == s)
        .ok_or_else(|| UnknownBaseline(s.to_string()))
    }
}

/// Wraps a problem so that the slab scheme reduces to Gauss collocation:
/// no auxiliaries, `F̃ = F`, and no quantity carries a structure claim.
/// Quantities are still tracked so diagnostics line up with the wrapped problem.
#[derive(Debug, Clone)]
pub struct BaseCollocation<P> {
    inner: P,
}

impl<P: Problem> BaseCollocation<P> {
    pub fn new(inner: P) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: Problem> Problem for BaseCollocation<P> {
    fn dof_count(&self) -> usize {
        self.inner.dof_count()
    }

    fn aux_dof_count(&self) -> usize {
        0
    }

    fn quantity_count(&self) -> usize {
        self.inner.quantity_count()
    }

    fn structure(&self) -> Vec<Structure> {
        vec![Structure::Indefinite; self.inner.quantity_count()]
    }

    fn quantity_names(&self) -> Vec<String> {
        self.inner.quantity_names()
    }

    fn mass_action(&self, u: &[f64], udot: &[f64], out: &mut [f64]) {
        self.inner.mass_action(u, udot, out)
    }

    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        self.inner.rhs(u, out)
    }

    fn modified_rhs(&self, u: &[f64], _aux: &[f64], out: &mut [f64]) {
        self.inner.rhs(u, out)
    }

    fn quantities(&self, u: &[f64]) -> Vec<f64> {
        self.inner.quantities(u)
    }

    fn quantity_derivative(&self, q: usize, u: &[f64], out: &mut [f64]) {
        self.inner.quantity_derivative(q, u, out)
    }

    fn aux_mass_action(&self, _u: &[f64], _w: &[f64], _out: &mut [f64]) {}

    fn aux_target(&self, _u: &[f64], _out: &mut [f64]) {}

    fn aux_test_function(&self, _q: usize, _aux: &[f64], _out: &mut [f64]) -> bool {
        false
    }

    fn associated_aux(&self, _u: &[f64], _out: &mut [f64]) {}

    fn admissible_state(&self, u: &[f64]) -> bool {
        self.inner.admissible_state(u)
    }

    fn locality(&self) -> Option<Locality> {
        self.inner.locality().map(|l| Locality {
            aux_site: Vec::new(),
            ..l
        })
    }
}

/// Implicit midpoint as a slab scheme: `S = 1` with a one-point Gauss rule.
/// Combined with [`BaseCollocation`] it is the classical implicit midpoint rule.
pub fn midpoint_scheme() -> Result<SlabScheme, FrameworkError> {
    SlabScheme::with_points(1, 1, 4)
}

/// One implicit-midpoint step of the semi-discrete compressible system.
pub fn midpoint_step_compressible<G: GasLaw + Clone>(
    problem: &CompressibleProblem<G>,
    state: &CompressibleState,
    dt: f64,
    config: SolverConfig,
) -> Result<CompressibleState, StepError> {
    let base = BaseCollocation::new(problem.clone());
    let scheme = midpoint_scheme().map_err(StepError::Setup)?;
    let out = advance(&base, &NewtonSlabSolver::new(config), &scheme, &state.to_vec(), dt)?;
    Ok(CompressibleState::from_slice(&out.next))
}

/// Incompressible problem whose modified right side only carries the
/// auxiliary velocity: energy keeps its structure, helicity is merely tracked.
pub fn q1_only_incompressible_problem(
    grid: FourierGrid,
    params: IncompressibleParams,
) -> Result<IncompressibleProblem, ReynoldsError> {
    IncompressibleProblem::new(grid, params, Variant::EnergyOnly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compressible1d::{make_supersonic_ic, make_uniform, CompressibleParams, IdealGas};
    use crate::fem1d::PeriodicMesh1D;
    use crate::framework::toy::{LinearScalar, Oscillator};
    use crate::framework::run_transient;
    use crate::spectral3d::{incompressible_scheme, make_random_divfree, PicardSlabSolver};

    fn tight() -> SolverConfig {
        SolverConfig {
            abs_tol: 1e-14,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn tags_round_trip() {
        for k in [
            BaselineKind::ImplicitMidpointCompressible,
            BaselineKind::Q1OnlyIncompressible,
            BaselineKind::BaseGaussCollocation,
        ] {
            assert_eq!(k.tag().parse::<BaselineKind>().unwrap(), k);
        }
        assert!("midpoint".parse::<BaselineKind>().is_err());
    }

    #[test]
    fn midpoint_matches_closed_form_on_linear_problem() {
        let lambda = -3.0;
        let p = BaseCollocation::new(LinearScalar { lambda });
        let dt = 0.1;
        let out = advance(&p, &NewtonSlabSolver::new(tight()), &midpoint_scheme().unwrap(), &[1.0], dt).unwrap();
        let expect = (1.0 + 0.5 * dt * lambda) / (1.0 - 0.5 * dt * lambda);
        assert!((out.next[0] - expect).abs() < 1e-13);
    }

    #[test]
    fn midpoint_matches_structure_scheme_for_linear_oscillator() {
        // on a linear problem with quadratic quantity, both reduce to the same map
        let solver = NewtonSlabSolver::new(tight());
        let base = BaseCollocation::new(Oscillator);
        let a = advance(&base, &solver, &midpoint_scheme().unwrap(), &[1.0, 0.3], 0.2).unwrap();
        let b = advance(&Oscillator, &solver, &SlabScheme::gauss(1).unwrap(), &[1.0, 0.3], 0.2).unwrap();
        assert!((a.next[0] - b.next[0]).abs() < 1e-13 && (a.next[1] - b.next[1]).abs() < 1e-13);
        assert!(base.structure().iter().all(|s| *s == Structure::Indefinite));
        assert_eq!(base.aux_dof_count(), 0);
    }

    #[test]
    fn midpoint_keeps_uniform_state() {
        let mesh = PeriodicMesh1D::new(8).unwrap();
        let p = CompressibleProblem::new(mesh.clone(), IdealGas::new(2.5).unwrap(), CompressibleParams::viscous(128.0, 0.71))
            .unwrap();
        let u = make_uniform(&mesh, 1.3, 0.4, 2.0);
        let next = midpoint_step_compressible(&p, &u, 0.01, tight()).unwrap();
        let d = next.to_vec().iter().zip(u.to_vec()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(d < 1e-13);
    }

    #[test]
    fn midpoint_conserves_mass_only() {
        let mesh = PeriodicMesh1D::new(16).unwrap();
        let p = CompressibleProblem::new(mesh.clone(), IdealGas::new(2.5).unwrap(), CompressibleParams::viscous(128.0, 0.71))
            .unwrap();
        let base = BaseCollocation::new(p);
        let u0 = make_supersonic_ic(&mesh).to_vec();
        let sum = run_transient(&base, &NewtonSlabSolver::new(tight()), &midpoint_scheme().unwrap(), &u0, 1.0 / 512.0, 4, |_| {});
        assert!(sum.failure.is_none());
        assert!(sum.max_abs_dq[0] < 1e-10 * sum.initial_q[0].abs());
        assert!(sum.max_abs_dq[2] > 1e-8, "{:?}", sum.max_abs_dq);
    }

    #[test]
    fn energy_only_variant_conserves_energy() {
        let grid = FourierGrid::new(8).unwrap();
        let p = q1_only_incompressible_problem(grid.clone(), IncompressibleParams::ideal()).unwrap();
        assert_eq!(p.structure(), vec![Structure::Conserved, Structure::Indefinite]);
        let u0 = make_random_divfree(&grid, 2, 1.0).to_real();
        let sum = run_transient(&p, &PicardSlabSolver::default(), &incompressible_scheme(2).unwrap(), &u0, 1.0 / 64.0, 3, |_| {});
        assert!(sum.failure.is_none());
        assert!(sum.max_abs_dq[0] < 1e-12);
        let visc = q1_only_incompressible_problem(grid, IncompressibleParams::viscous(100.0)).unwrap();
        let sum = run_transient(&visc, &PicardSlabSolver::default(), &incompressible_scheme(2).unwrap(), &u0, 1.0 / 64.0, 3, |r| {
            assert!(r.dq[0] <= 1e-12)
        });
        assert_eq!(sum.steps_completed, 3);
    }
}
