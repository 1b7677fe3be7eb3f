//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::f64::consts::PI;

use conserve_core::baselines::{midpoint_scheme, q1_only_incompressible_problem, BaseCollocation};
use conserve_core::compressible1d::{
    compressible_scheme, make_inviscid_ic, make_supersonic_ic, thermo_cancellation, CompressibleParams,
    CompressibleProblem, GasLaw, IdealGas,
};
use conserve_core::fem1d::{p1_gradient, p1_value, PeriodicMesh1D};
use conserve_core::framework::toy::Oscillator;
use conserve_core::framework::{advance, run_transient, NewtonSlabSolver, Problem, SlabScheme, TrajectorySummary};
use conserve_core::io::{read_diagnostics, DiagnosticsWriter};
use conserve_core::spectral3d::{
    incompressible_scheme, make_abc_field, make_random_divfree, viscous_changes, FourierGrid, IncompressibleParams,
    IncompressibleProblem, PicardSlabSolver, Variant,
};
use conserve_core::temporal::{combine, gauss_rule};
use conserve_core::SolverConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(name: &str, pass: bool, detail: String) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

fn tight_newton() -> NewtonSlabSolver {
    NewtonSlabSolver::new(SolverConfig {
        abs_tol: 1e-14,
        ..SolverConfig::default()
    })
}

#[test]
fn quadrature_exactness() {
    let mut worst = 0f64;
    for m in 1..=6 {
        let rule = gauss_rule(m).unwrap();
        for k in 0..2 * m {
            let err = (rule.integrate(|t| t.powi(k as i32)) - 1.0 / (k as f64 + 1.0)).abs();
            worst = worst.max(err);
        }
    }
    report("gauss rule exactness (m = 1..6, degree ≤ 2m−1)", worst <= 1e-14, format!("max error {worst:.3e}"));
}

fn oscillator_error(s: usize, dt: f64, t_end: f64) -> f64 {
    let u0 = [1.0, 0.25];
    let n = (t_end / dt).round() as usize;
    let sum = run_transient(&Oscillator, &tight_newton(), &SlabScheme::gauss(s).unwrap(), &u0, dt, n, |_| {});
    let exact = Oscillator::exact(u0, t_end);
    (sum.final_state[0] - exact[0]).hypot(sum.final_state[1] - exact[1])
}

#[test]
fn oscillator_conservation_and_order() {
    let mut worst_drift = 0f64;
    let mut min_margin = f64::INFINITY;
    let mut orders = Vec::new();
    for s in 1..=3 {
        let sum = run_transient(&Oscillator, &tight_newton(), &SlabScheme::gauss(s).unwrap(), &[1.0, 0.25], 0.1, 100, |_| {});
        assert!(sum.failure.is_none());
        worst_drift = worst_drift.max(sum.max_drift[0]);
        let errs: Vec<f64> = [0.25, 0.125, 0.0625].iter().map(|&dt| oscillator_error(s, dt, 2.0)).collect();
        for pair in errs.windows(2) {
            let order = (pair[0] / pair[1]).log2();
            min_margin = min_margin.min(order - s as f64);
            orders.push(format!("S={s}:{order:.2}"));
        }
    }
    report(
        "oscillator energy conservation and temporal order",
        worst_drift <= 1e-12 && min_margin >= 0.0,
        format!("max |Q1 drift| {worst_drift:.3e}; observed orders {}", orders.join(" ")),
    );
}

#[test]
fn incompressible_ideal_abc_conservation() {
    let grid = FourierGrid::new(8).unwrap();
    let p = IncompressibleProblem::new(grid.clone(), IncompressibleParams::ideal(), Variant::Full).unwrap();
    let u0 = make_abc_field(&grid, 1.0, 1.0, 1.0).to_real();
    let q0 = p.quantities(&u0);
    let sum = run_transient(&p, &PicardSlabSolver::default(), &incompressible_scheme(2).unwrap(), &u0, 1.0 / 128.0, 64, |_| {});
    let init_ok = (q0[0] - 1.5).abs() < 1e-13 && (q0[1] - 3.0 * PI).abs() < 1e-12;
    let dq = sum.max_abs_dq[0].max(sum.max_abs_dq[1]);
    let gap = sum.max_gap[0].max(sum.max_gap[1]);
    report(
        "ideal incompressible ABC flow, 64 steps",
        init_ok && sum.failure.is_none() && sum.steps_completed == 64 && dq <= 1e-10 && gap <= 1e-10,
        format!("Q(0) = {q0:?}; max |ΔQ| {dq:.3e}; max identity gap {gap:.3e}"),
    );
}

#[test]
fn incompressible_viscous_dissipation_identities() {
    let grid = FourierGrid::new(8).unwrap();
    let p = IncompressibleProblem::new(grid.clone(), IncompressibleParams::viscous(100.0), Variant::Full).unwrap();
    let scheme = incompressible_scheme(2).unwrap();
    let solver = PicardSlabSolver::default();
    let dt = 1.0 / 128.0;
    let mut u = make_random_divfree(&grid, 21, 1.0).to_real();
    let mut max_increase = f64::NEG_INFINITY;
    let mut mismatch = [0f64; 2];
    for _ in 0..32 {
        let out = advance(&p, &solver, &scheme, &u, dt).unwrap();
        let dq = out.diagnostics.delta();
        let pred = viscous_changes(&p, &scheme, &out.slab, dt);
        max_increase = max_increase.max(dq[0]);
        for k in 0..2 {
            mismatch[k] = mismatch[k].max((dq[k] - pred[k]).abs());
        }
        u = out.next;
    }
    report(
        "viscous incompressible energy decay and dissipation identities (Re = 100)",
        max_increase <= 1e-12 && mismatch[0] <= 1e-10 && mismatch[1] <= 1e-10,
        format!(
            "largest ΔQ1 {max_increase:.3e}; |ΔQ − predicted| energy {:.3e}, helicity {:.3e}",
            mismatch[0], mismatch[1]
        ),
    );
}

#[test]
fn helicity_drift_energy_only_vs_full() {
    let grid = FourierGrid::new(8).unwrap();
    let u0 = make_random_divfree(&grid, 7, 1.0).to_real();
    let scheme = incompressible_scheme(2).unwrap();
    let run = |p: &IncompressibleProblem| {
        let sum = run_transient(p, &PicardSlabSolver::default(), &scheme, &u0, 1.0 / 128.0, 50, |_| {});
        assert!(sum.failure.is_none());
        sum.final_drift()[1].abs()
    };
    let full = run(&IncompressibleProblem::new(grid.clone(), IncompressibleParams::ideal(), Variant::Full).unwrap());
    let q1_only = run(&q1_only_incompressible_problem(grid, IncompressibleParams::ideal()).unwrap());
    report(
        "helicity drift: energy-only variant exceeds full scheme (50 steps)",
        q1_only > full && full <= 1e-9,
        format!("|Q2 drift| full {full:.3e}, energy-only {q1_only:.3e}"),
    );
}

fn rel_max_dq(sum: &TrajectorySummary, k: usize) -> f64 {
    sum.max_abs_dq[k] / sum.initial_q[k].abs().max(1.0)
}

#[test]
fn compressible_inviscid_conservation() {
    let mesh = PeriodicMesh1D::new(64).unwrap();
    let p = CompressibleProblem::new(mesh.clone(), IdealGas::new(2.5).unwrap(), CompressibleParams::ideal()).unwrap();
    let u0 = make_inviscid_ic(&mesh, 2.5).to_vec();
    let dt = 2f64.powi(-7);
    let solver = NewtonSlabSolver::default();
    let sp = run_transient(&p, &solver, &compressible_scheme(1).unwrap(), &u0, dt, 128, |_| {});
    let mp = run_transient(&BaseCollocation::new(p.clone()), &solver, &midpoint_scheme().unwrap(), &u0, dt, sp.steps_completed, |_| {});

    // momentum defect under spatial quadrature refinement, on a state with strong momentum
    let momentum: Vec<f64> = [2, 3, 10]
        .iter()
        .map(|&pts| {
            let mesh = PeriodicMesh1D::with_points(64, pts).unwrap();
            let p = CompressibleProblem::new(mesh.clone(), IdealGas::new(2.5).unwrap(), CompressibleParams::ideal()).unwrap();
            let u = make_supersonic_ic(&mesh).to_vec();
            run_transient(&p, &solver, &compressible_scheme(1).unwrap(), &u, 2f64.powi(-9), 4, |_| {}).max_abs_dq[1]
        })
        .collect();
    let refine_ok = momentum[1] < momentum[0] && momentum[2] <= momentum[1].max(1e-13);

    let sp_entropy = sp.max_drift[3];
    let mp_entropy = mp.max_drift[3];
    let pass = sp.steps_completed > 0
        && rel_max_dq(&sp, 0) <= 1e-10
        && rel_max_dq(&sp, 2) <= 1e-10
        && sp.max_abs_dq[1] <= 1e-8
        && sp.max_abs_dq[3] <= 1e-8
        && refine_ok
        && mp_entropy >= 10.0 * sp_entropy;
    report(
        "inviscid compressible conservation (N = 64, S = 1, dt = 2^-7)",
        pass,
        format!(
            "{} steps (failure: {:?}); max |ΔQ| {:.3e} {:.3e} {:.3e} {:.3e}; momentum defect by spatial points [2,3,10] {:.3e} {:.3e} {:.3e}; entropy drift SP {sp_entropy:.3e} vs midpoint {mp_entropy:.3e}",
            sp.steps_completed,
            sp.failure.as_ref().map(|f| f.0),
            sp.max_abs_dq[0],
            sp.max_abs_dq[1],
            sp.max_abs_dq[2],
            sp.max_abs_dq[3],
            momentum[0],
            momentum[1],
            momentum[2],
        ),
    );
}

#[test]
fn compressible_viscous_entropy_production() {
    let mesh = PeriodicMesh1D::new(64).unwrap();
    let p = CompressibleProblem::new(mesh.clone(), IdealGas::new(2.5).unwrap(), CompressibleParams::viscous(128.0, 0.71))
        .unwrap();
    let scheme = compressible_scheme(1).unwrap();
    let solver = NewtonSlabSolver::default();
    let dt = 2f64.powi(-9);
    let steps = 24;
    let u0 = make_supersonic_ic(&mesh).to_vec();
    let q0 = p.quantities(&u0);

    let mut u = u0.clone();
    let mut max_dq = [0f64; 4];
    let mut min_dq4 = f64::INFINITY;
    let mut production_gap = 0f64;
    let mut completed = 0;
    for _ in 0..steps {
        let Ok(out) = advance(&p, &solver, &scheme, &u, dt) else { break };
        let dq = out.diagnostics.delta();
        let mut production = 0.0;
        for (q, w) in scheme.main_rule().weights().iter().enumerate() {
            let uq = combine(&scheme.main_trial_table()[q], &out.slab.trial);
            let wq = combine(&scheme.main_test_table()[q], &out.slab.aux);
            production += dt * w * p.entropy_production(&uq, &wq);
        }
        production_gap = production_gap.max((dq[3] - production).abs());
        min_dq4 = min_dq4.min(dq[3]);
        for k in 0..4 {
            max_dq[k] = max_dq[k].max(dq[k].abs());
        }
        u = out.next;
        completed += 1;
    }
    let sp_energy_drift = (p.quantities(&u)[2] - q0[2]).abs();
    let mp = run_transient(&BaseCollocation::new(p.clone()), &solver, &midpoint_scheme().unwrap(), &u0, dt, steps, |_| {});

    let rel = |k: usize| max_dq[k] / q0[k].abs().max(1.0);
    let pass = completed == steps
        && rel(0) <= 1e-10
        && rel(2) <= 1e-10
        && max_dq[1] <= 1e-8
        && min_dq4 >= -1e-10
        && production_gap <= 1e-8
        && mp.max_drift[2] >= 100.0 * sp_energy_drift;
    report(
        "viscous compressible entropy production (Re = 128, Pr = 0.71)",
        pass,
        format!(
            "{completed} steps; max |ΔQ1..3| {:.3e} {:.3e} {:.3e}; min ΔQ4 {min_dq4:.3e}; |ΔQ4 − production| {production_gap:.3e}; energy drift SP {sp_energy_drift:.3e} vs midpoint {:.3e}",
            max_dq[0], max_dq[1], max_dq[2], mp.max_drift[2]
        ),
    );
}

#[test]
fn thermodynamic_identities() {
    let gas = IdealGas::new(2.5).unwrap();
    let mesh = PeriodicMesh1D::new(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0f64;
    for _ in 0..1000 {
        let g: Vec<f64> = (0..16).map(|_| rng.random_range(-7.0..-4.5)).collect();
        let beta: Vec<f64> = (0..16).map(|_| rng.random_range(1.5..3.5)).collect();
        for pt in mesh.points() {
            let r = thermo_cancellation(
                &gas,
                p1_value(&g, pt.cell, pt.xi),
                p1_value(&beta, pt.cell, pt.xi),
                p1_gradient(&g, pt.cell, mesh.h()),
                p1_gradient(&beta, pt.cell, mesh.h()),
            )
            .unwrap();
            worst = worst.max(r.abs());
        }
    }

    let mut round_trip = 0f64;
    let mut partials = 0f64;
    for _ in 0..1000 {
        let rho = rng.random_range(0.1..10.0);
        let eps = rng.random_range(0.1..20.0);
        let f = gas.forward_state(rho, eps).unwrap();
        let inv = gas.inverse_state(f.g, f.beta).unwrap();
        round_trip = round_trip.max(((inv.rho - rho) / rho).abs()).max(((inv.eps - eps) / eps).abs());
        // central differences with relative increments
        let h = 1e-6;
        let d_rho = |f: &dyn Fn(f64, f64) -> f64| (f(rho * (1.0 + h), eps) - f(rho * (1.0 - h), eps)) / (2.0 * h * rho);
        let d_eps = |f: &dyn Fn(f64, f64) -> f64| (f(rho, eps * (1.0 + h)) - f(rho, eps * (1.0 - h))) / (2.0 * h * eps);
        let p_of = |r: f64, e: f64| gas.forward_state(r, e).unwrap().p;
        let theta_of = |r: f64, e: f64| gas.forward_state(r, e).unwrap().theta;
        let (pr, pe, tr, te) = (d_rho(&p_of), d_eps(&p_of), d_rho(&theta_of), d_eps(&theta_of));
        for (fd_val, exact) in [(pr, f.dp_drho), (pe, f.dp_deps), (tr, f.dtheta_drho), (te, f.dtheta_deps)] {
            partials = partials.max((fd_val - exact).abs() / exact.abs().max(1e-300));
        }
    }
    report(
        "thermodynamic cancellation and gas-law consistency",
        worst <= 1e-12 && round_trip <= 1e-6 && partials <= 1e-6,
        format!("max pointwise residual {worst:.3e}; round-trip {round_trip:.3e}; partials {partials:.3e} (relative)"),
    );
}

#[test]
fn solver_failure_is_surfaced() {
    let mesh = PeriodicMesh1D::new(16).unwrap();
    let p = CompressibleProblem::new(mesh.clone(), IdealGas::new(2.5).unwrap(), CompressibleParams::ideal()).unwrap();
    let u0 = make_supersonic_ic(&mesh).to_vec();
    let mut writer = DiagnosticsWriter::new(Vec::new(), p.quantity_count()).unwrap();
    let sum = run_transient(&p, &NewtonSlabSolver::default(), &compressible_scheme(1).unwrap(), &u0, 2f64.powi(-6), 200, |r| {
        writer.write(r).unwrap()
    });
    if let Some((step, err)) = &sum.failure {
        writer.write_failure(*step, &err.to_string()).unwrap();
    }
    let table = read_diagnostics(writer.finish().unwrap().as_slice()).unwrap();
    let steps = table.column("step").unwrap();
    let contiguous = steps.iter().enumerate().all(|(i, s)| *s == (i + 1) as f64);
    let failed_at = sum.failure.as_ref().map(|f| f.0);
    report(
        "under-resolved inviscid run reports its failing step",
        failed_at.is_some() && table.failure_step == failed_at && steps.len() == sum.steps_completed && contiguous,
        format!("failure at step {failed_at:?}; {} rows written; trailer step {:?}", steps.len(), table.failure_step),
    );
}
