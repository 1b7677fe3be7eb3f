use std::f64::consts::PI;

use proptest::prelude::*;
use rustfft::num_complex::Complex64;

use super::*;
use crate::framework::{advance, assemble_residual, dot, NewtonSlabSolver, Problem, SlabScheme, Structure};
use crate::nlsolve::SolverConfig;

fn grid(n: usize) -> FourierGrid {
    FourierGrid::new(n).unwrap()
}

fn max_diff(a: &VectorField, b: &VectorField) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn rejects_bad_sizes() {
    assert!(FourierGrid::new(2).is_err());
    assert!(FourierGrid::new(7).is_err());
    assert_eq!(grid(8).padded(), 12);
}

#[test]
fn transforms_round_trip() {
    let g = grid(8);
    let f = make_random_divfree(&g, 3, 1.0);
    let phys = f.field().to_physical(&g);
    let back = VectorField::from_physical(&g, |x, y, z| {
        let (i, j, l) = ((x * 8.0).round() as usize, (y * 8.0).round() as usize, (z * 8.0).round() as usize);
        [0, 1, 2].map(|c| phys[((c * 8 + i) * 8 + j) * 8 + l])
    });
    assert!(max_diff(&back, f.field()) < 1e-13);
}

#[test]
fn leray_examples() {
    let g = grid(8);
    // gradient of sin(2π(x + 2y)) is parallel to k
    let grad = VectorField::from_physical(&g, |x, y, _| {
        let c = (2.0 * PI * (x + 2.0 * y)).cos() * 2.0 * PI;
        [c, 2.0 * c, 0.0]
    });
    assert!(leray_project(&g, &grad).field().max_abs() < 1e-14);
    let constant = VectorField::from_physical(&g, |_, _, _| [1.0, -2.0, 0.5]);
    assert!(leray_project(&g, &constant).field().max_abs() < 1e-15);
    let abc = make_abc_field(&g, 1.0, 1.0, 1.0);
    assert!(max_diff(leray_project(&g, abc.field()).field(), abc.field()) < 1e-14);
}

#[test]
fn curl_examples() {
    let g = grid(8);
    let f = VectorField::from_physical(&g, |x, _, _| [0.0, 0.0, (2.0 * PI * x).sin()]);
    let expect = VectorField::from_physical(&g, |x, _, _| [0.0, -2.0 * PI * (2.0 * PI * x).cos(), 0.0]);
    assert!(max_diff(&curl(&g, &f), &expect) < 1e-13);

    let abc = make_abc_field(&g, 1.0, 1.0, 1.0);
    let mut scaled = abc.field().clone();
    scaled.scale(2.0 * PI);
    assert!(max_diff(curl_hat(&g, &abc).field(), &scaled) < 1e-13);

    // curl curl of a div-free single mode is |2πk|² times the mode
    let mode = leray_project(
        &g,
        &VectorField::from_physical(&g, |x, y, z| {
            let ph = 2.0 * PI * (x - 2.0 * y + 3.0 * z);
            [ph.sin(), ph.cos(), 0.3 * ph.sin()]
        }),
    );
    let cc = curl(&g, &curl(&g, mode.field()));
    let mut expect = mode.field().clone();
    expect.scale(4.0 * PI * PI * 14.0);
    assert!(max_diff(&cc, &expect) < 1e-13 * 4.0 * PI * PI * 14.0);
}

#[test]
fn cross_product_examples() {
    let g = grid(8);
    let a = make_random_divfree(&g, 5, 1.0);
    assert!(cross_product_dealiased(&g, a.field(), a.field()).max_abs() < 1e-15);

    // sin(2πx) e₂ × cos(2πx) e₃ = ½ sin(4πx) e₁
    let s = VectorField::from_physical(&g, |x, _, _| [0.0, (2.0 * PI * x).sin(), 0.0]);
    let c = VectorField::from_physical(&g, |x, _, _| [0.0, 0.0, (2.0 * PI * x).cos()]);
    let p = cross_product_dealiased(&g, &s, &c);
    // sin(4πx)/2 has coefficient 1/(4i) at k = 2
    let coef = p.coeffs()[g.index(0, 2, 0, 0)];
    assert!((coef - Complex64::new(0.0, -0.25)).norm() < 1e-15);
    let expect = VectorField::from_physical(&g, |x, _, _| [0.5 * (4.0 * PI * x).sin(), 0.0, 0.0]);
    assert!(max_diff(&p, &expect) < 1e-15);
}

#[test]
fn cross_product_is_exact_for_retained_modes() {
    // product of two modes near the cutoff lands without aliasing
    let g = grid(8);
    let a = VectorField::from_physical(&g, |x, _, _| [0.0, (6.0 * PI * x).cos(), 0.0]);
    let b = VectorField::from_physical(&g, |x, _, _| [0.0, 0.0, (6.0 * PI * x).cos()]);
    // cos² = ½ + ½ cos(12πx); k = 6 is outside the retained range, so only the mean survives
    let p = cross_product_dealiased(&g, &a, &b);
    assert!((p.coeffs()[g.index(0, 0, 0, 0)].re - 0.5).abs() < 1e-15);
    assert!(p.coeffs()[g.index(0, 2, 0, 0)].norm() < 1e-15);
}

#[test]
fn inner_product_examples() {
    let g = grid(8);
    let abc = make_abc_field(&g, 1.0, 1.0, 1.0);
    assert!((inner_product(abc.field(), abc.field()) - 3.0).abs() < 1e-14);
    assert!((kinetic_energy(abc.field()) - 1.5).abs() < 1e-14);
    assert!((helicity(&g, abc.field()) - 3.0 * PI).abs() < 1e-13);
    let single = make_abc_field(&g, 1.0, 0.0, 0.0);
    assert!((kinetic_energy(single.field()) - 0.5).abs() < 1e-14);
    assert!((helicity(&g, single.field()) - PI).abs() < 1e-13);
    // one mode sin(2π·2x) e₂ has L² mass ½ and |2πk|² = 16π²
    let f = VectorField::from_physical(&g, |x, _, _| [0.0, (4.0 * PI * x).sin(), 0.0]);
    assert!((grad_inner(&g, &f, &f) - 16.0 * PI * PI * 0.5).abs() < 1e-12);
}

#[test]
fn random_field_constraints() {
    let g = grid(8);
    for seed in 0..4 {
        let f = make_random_divfree(&g, seed, 1.5);
        assert!(f.field().max_divergence(&g) < 1e-13);
        assert!(f.field().mean(&g).iter().all(|z| z.norm() == 0.0));
        assert!(f.field().max_asymmetry(&g) < 1e-15);
        assert!((inner_product(f.field(), f.field()) - 1.0).abs() < 1e-13);
    }
    assert_eq!(make_random_divfree(&g, 9, 1.0), make_random_divfree(&g, 9, 1.0));
}

fn full(g: &FourierGrid, params: IncompressibleParams) -> IncompressibleProblem {
    IncompressibleProblem::new(g.clone(), params, Variant::Full).unwrap()
}

#[test]
fn modified_rhs_orthogonality() {
    let g = grid(8);
    let u = make_random_divfree(&g, 1, 1.0).to_real();
    let ut = make_random_divfree(&g, 2, 1.0).to_real();
    let om = curl(&g, &VectorField::from_real(&g, &ut)).to_real();
    let mut aux = ut.clone();
    aux.extend_from_slice(&om);
    let ideal = full(&g, IncompressibleParams::ideal());
    assert!(ideal.ftilde_form(&u, &aux, &ut).abs() < 1e-13);
    assert!(ideal.ftilde_form(&u, &aux, &om).abs() < 1e-12);
    let visc = full(&g, IncompressibleParams::viscous(100.0));
    let e = visc.ftilde_form(&u, &aux, &ut);
    let ut_f = VectorField::from_real(&g, &ut);
    assert!(e < 0.0);
    assert!((e + grad_inner(&g, &ut_f, &ut_f) / 100.0).abs() < 1e-12);
}

#[test]
fn structure_flags() {
    let g = grid(4);
    use Structure::*;
    assert_eq!(full(&g, IncompressibleParams::ideal()).structure(), vec![Conserved, Conserved]);
    assert_eq!(full(&g, IncompressibleParams::viscous(10.0)).structure(), vec![NonIncreasing, Indefinite]);
    let e = IncompressibleProblem::new(g.clone(), IncompressibleParams::ideal(), Variant::EnergyOnly).unwrap();
    assert_eq!(e.structure(), vec![Conserved, Indefinite]);
    assert!(IncompressibleProblem::new(g, IncompressibleParams::viscous(0.0), Variant::Full).is_err());
}

#[test]
fn abc_flow_is_stationary_when_ideal() {
    let g = grid(8);
    let p = full(&g, IncompressibleParams::ideal());
    let u0 = make_abc_field(&g, 1.0, 1.0, 1.0).to_real();
    let out = advance(&p, &PicardSlabSolver::default(), &incompressible_scheme(2).unwrap(), &u0, 1.0 / 128.0).unwrap();
    let d = out.next.iter().zip(&u0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(d < 1e-14);
}

#[test]
fn ideal_random_run_conserves_both_quantities() {
    let g = grid(8);
    let p = full(&g, IncompressibleParams::ideal());
    let scheme = incompressible_scheme(2).unwrap();
    let solver = PicardSlabSolver::default();
    let mut u = make_random_divfree(&g, 11, 1.0).to_real();
    for _ in 0..5 {
        let out = advance(&p, &solver, &scheme, &u, 1.0 / 64.0).unwrap();
        let dq = out.diagnostics.delta();
        assert!(dq[0].abs() < 1e-13 && dq[1].abs() < 1e-12, "{dq:?}");
        assert!(out.diagnostics.identity_gap.iter().all(|g| *g < 1e-12));
        let f = VectorField::from_real(&g, &out.next);
        assert!(f.max_divergence(&g) < 1e-12);
        u = out.next;
    }
}

#[test]
fn viscous_changes_match_measured() {
    let g = grid(8);
    let p = full(&g, IncompressibleParams::viscous(100.0));
    let scheme = incompressible_scheme(2).unwrap();
    let u = make_random_divfree(&g, 4, 1.0).to_real();
    let out = advance(&p, &PicardSlabSolver::default(), &scheme, &u, 1.0 / 64.0).unwrap();
    let pred = viscous_changes(&p, &scheme, &out.slab, 1.0 / 64.0);
    let dq = out.diagnostics.delta();
    assert!(dq[0] < 0.0);
    assert!((dq[0] - pred[0]).abs() < 1e-12, "{dq:?} {pred:?}");
    assert!((dq[1] - pred[1]).abs() < 1e-12, "{dq:?} {pred:?}");
}

#[test]
fn picard_and_newton_agree_on_small_grid() {
    let g = grid(4);
    let scheme = incompressible_scheme(1).unwrap();
    let dt = 0.05;
    let u = make_random_divfree(&g, 8, 0.5).to_real();
    for variant in [Variant::Full, Variant::EnergyOnly, Variant::Base] {
        let p = IncompressibleProblem::new(g.clone(), IncompressibleParams::viscous(20.0), variant).unwrap();
        let a = advance(&p, &PicardSlabSolver::default(), &scheme, &u, dt).unwrap();
        let r = assemble_residual(&p, &scheme, &a.slab, dt).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-12), "{variant:?}");
        let newton = NewtonSlabSolver::new(SolverConfig {
            max_iter: 8,
            ..SolverConfig::default()
        });
        let b = advance(&p, &newton, &scheme, &u, dt).unwrap();
        let d = a.next.iter().zip(&b.next).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(d < 1e-11, "{variant:?}: {d:e}");
    }
}

#[test]
fn auxiliary_vorticity_is_curl_of_projection() {
    let g = grid(8);
    let p = full(&g, IncompressibleParams::ideal());
    let scheme = incompressible_scheme(2).unwrap();
    let u = make_random_divfree(&g, 6, 1.0).to_real();
    let out = advance(&p, &PicardSlabSolver::default(), &scheme, &u, 1.0 / 32.0).unwrap();
    let nd = p.dof_count();
    let proj = crate::temporal::temporal_l2_project(scheme.basis(), &out.slab.trial, scheme.exact_rule()).unwrap();
    for (aux, pj) in out.slab.aux.iter().zip(&proj) {
        let c = curl(&g, &VectorField::from_real(&g, pj)).to_real();
        let d = aux[nd..].iter().zip(&c).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(d < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cross_product_orthogonal_to_factors(s1 in 0u64..1000, s2 in 0u64..1000) {
        let g = grid(8);
        let a = make_random_divfree(&g, s1, 1.0);
        let b = make_random_divfree(&g, s2 + 1000, 0.5);
        let c = cross_product_dealiased(&g, a.field(), b.field());
        prop_assert!(inner_product(&c, a.field()).abs() < 1e-13);
        prop_assert!(inner_product(&c, b.field()).abs() < 1e-13);
    }

    #[test]
    fn projection_is_idempotent(seed in 0u64..1000) {
        let g = grid(4);
        let raw = VectorField::from_real(&g, &{
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..2 * g.coeff_len()).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>()
        });
        let once = leray_project(&g, &raw);
        let twice = leray_project(&g, once.field());
        prop_assert!(max_diff(once.field(), twice.field()) < 1e-15);
        prop_assert!(once.field().max_divergence(&g) < 1e-13);
        prop_assert!(dot(&once.to_real(), &once.to_real()) <= dot(&raw.to_real(), &raw.to_real()) + 1e-12);
    }
}

fn helicity_drift(variant: Variant, scheme: &SlabScheme) -> f64 {
    let g = grid(8);
    let p = IncompressibleProblem::new(g.clone(), IncompressibleParams::ideal(), variant).unwrap();
    let u0 = make_random_divfree(&g, 7, 1.0).to_real();
    let sum = crate::framework::run_transient(&p, &PicardSlabSolver::default(), scheme, &u0, 1.0 / 128.0, 10, |_| {});
    assert!(sum.failure.is_none());
    sum.final_drift()[1].abs()
}

#[test]
fn energy_only_variant_loses_helicity_with_exact_time_integral() {
    let exact = incompressible_scheme(2).unwrap();
    let full = helicity_drift(Variant::Full, &exact);
    let energy_only = helicity_drift(Variant::EnergyOnly, &exact);
    assert!(full < 1e-12, "{full:e}");
    assert!(energy_only > 1e3 * full, "{energy_only:e} vs {full:e}");
}

#[test]
fn gauss_rule_makes_variants_coincide() {
    // the projected velocity interpolates u at the Gauss nodes
    let gauss = SlabScheme::gauss(2).unwrap();
    assert!(helicity_drift(Variant::EnergyOnly, &gauss) < 1e-12);
    assert!(helicity_drift(Variant::Base, &gauss) < 1e-12);
}
