//! Continuous piecewise-linear finite elements on the periodic unit interval.

use thiserror::Error;

use crate::temporal::{gauss_rule, QuadratureRule, TemporalError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Fem1dError {
    #[error("a periodic mesh needs at least 2 cells, got {0}")]
    TooFewCells(usize),
    #[error(transparent)]
    Quadrature(#[from] TemporalError),
    #[error("non-finite integrand in cell {cell} at point {point}")]
    NonFinite { cell: usize, point: usize },
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
}

/// Uniform periodic mesh of `[0, 1)` with one fixed Gauss rule per cell.
#[derive(Debug, Clone)]
pub struct PeriodicMesh1D {
    n: usize,
    h: f64,
    rule: QuadratureRule,
}

/// Location of one spatial quadrature point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub cell: usize,
    pub index: usize,
    /// Position inside the cell on `[0, 1]`.
    pub xi: f64,
    pub x: f64,
    /// Physical weight, `h × reference weight`.
    pub weight: f64,
}

pub const DEFAULT_POINTS_PER_CELL: usize = 10;

impl PeriodicMesh1D {
    pub fn new(n_cells: usize) -> Result<Self, Fem1dError> {
        Self::with_points(n_cells, DEFAULT_POINTS_PER_CELL)
    }

    pub fn with_points(n_cells: usize, points_per_cell: usize) -> Result<Self, Fem1dError> {
        if n_cells < 2 {
            return Err(Fem1dError::TooFewCells(n_cells));
        }
        Ok(Self {
            n: n_cells,
            h: 1.0 / n_cells as f64,
            rule: gauss_rule(points_per_cell)?,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n
    }

    /// Equal to the number of cells on a periodic mesh.
    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn points_per_cell(&self) -> usize {
        self.rule.len()
    }

    pub fn node_x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Left and right node of a cell.
    pub fn cell_nodes(&self, cell: usize) -> (usize, usize) {
        (cell, (cell + 1) % self.n)
    }

    pub fn points(&self) -> impl Iterator<Item = QuadPoint> + '_ {
        (0..self.n).flat_map(move |cell| {
            self.rule
                .nodes()
                .iter()
                .zip(self.rule.weights())
                .enumerate()
                .map(move |(index, (&xi, &w))| QuadPoint {
                    cell,
                    index,
                    xi,
                    x: (cell as f64 + xi) * self.h,
                    weight: w * self.h,
                })
        })
    }

    pub fn point_count(&self) -> usize {
        self.n * self.rule.len()
    }

    /// `Σ_cells Σ_points weight × f`.
    pub fn integrate(&self, mut f: impl FnMut(&QuadPoint) -> f64) -> Result<f64, Fem1dError> {
        let mut sum = 0.0;
        for p in self.points() {
            let v = f(&p);
            if !v.is_finite() {
                return Err(Fem1dError::NonFinite {
                    cell: p.cell,
                    point: p.index,
                });
            }
            sum += p.weight * v;
        }
        Ok(sum)
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> NodalField {
        NodalField((0..self.n).map(|i| f(self.node_x(i))).collect())
    }

    /// `∫ w a b` with `w` sampled at every quadrature point in [`points`](Self::points) order.
    pub fn weighted_mass_apply(&self, w: &[f64], a: &NodalField, b: &NodalField) -> Result<f64, Fem1dError> {
        if w.len() != self.point_count() {
            return Err(Fem1dError::Length {
                expected: self.point_count(),
                got: w.len(),
            });
        }
        let mut k = 0;
        self.integrate(|p| {
            let v = w[k] * a.value(self, p) * b.value(self, p);
            k += 1;
            v
        })
    }

    /// Scatters `∫ (A v + B v_x)` into the nodal vector `out` for the hat
    /// functions of one cell, where `A`, `B` are values at point `p`.
    #[inline]
    pub fn scatter(&self, p: &QuadPoint, a: f64, b: f64, out: &mut [f64]) {
        let (l, r) = self.cell_nodes(p.cell);
        let bx = b / self.h;
        out[l] += p.weight * (a * (1.0 - p.xi) - bx);
        out[r] += p.weight * (a * p.xi + bx);
    }
}

/// Periodic P1 field stored by nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField(pub Vec<f64>);

impl NodalField {
    pub fn constant(n: usize, c: f64) -> Self {
        Self(vec![c; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn at(&self, cell: usize, xi: f64) -> f64 {
        p1_value(&self.0, cell, xi)
    }

    pub fn value(&self, _mesh: &PeriodicMesh1D, p: &QuadPoint) -> f64 {
        p1_value(&self.0, p.cell, p.xi)
    }

    pub fn gradient(&self, mesh: &PeriodicMesh1D, cell: usize) -> f64 {
        p1_gradient(&self.0, cell, mesh.h())
    }
}

#[inline]
pub fn p1_value(nodal: &[f64], cell: usize, xi: f64) -> f64 {
    let r = if cell + 1 == nodal.len() { 0 } else { cell + 1 };
    nodal[cell] * (1.0 - xi) + nodal[r] * xi
}

/// `(right − left) / h`, constant on the cell.
#[inline]
pub fn p1_gradient(nodal: &[f64], cell: usize, h: f64) -> f64 {
    let r = if cell + 1 == nodal.len() { 0 } else { cell + 1 };
    (nodal[r] - nodal[cell]) / h
}

/// Chain rule `Σ ∂f/∂y_i · ∇y_i` at one point.
#[inline]
pub fn composite_gradient(partials: &[f64], gradients: &[f64]) -> f64 {
    partials.iter().zip(gradients).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_integrand() {
        let m = PeriodicMesh1D::new(7).unwrap();
        assert!((m.integrate(|_| 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hat_integral_is_h() {
        let m = PeriodicMesh1D::new(8).unwrap();
        for node in [0, 3, 7] {
            let mut hat = NodalField::constant(8, 0.0);
            hat.0[node] = 1.0;
            let v = m.integrate(|p| hat.value(&m, p)).unwrap();
            assert!((v - m.h()).abs() < 1e-15);
        }
    }

    #[test]
    fn exp_of_zero_field() {
        let m = PeriodicMesh1D::new(5).unwrap();
        let z = NodalField::constant(5, 0.0);
        assert!((m.integrate(|p| z.value(&m, p).exp()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_reports_cell() {
        let m = PeriodicMesh1D::with_points(4, 2).unwrap();
        let err = m.integrate(|p| if p.cell == 2 && p.index == 1 { f64::NAN } else { 1.0 }).unwrap_err();
        assert_eq!(err, Fem1dError::NonFinite { cell: 2, point: 1 });
    }

    #[test]
    fn too_few_cells() {
        assert_eq!(PeriodicMesh1D::new(1).unwrap_err(), Fem1dError::TooFewCells(1));
    }

    #[test]
    fn gradients() {
        let m = PeriodicMesh1D::new(4).unwrap();
        assert_eq!(NodalField::constant(4, 3.0).gradient(&m, 2), 0.0);
        let ramp = NodalField(vec![0.0, 0.5, 1.0, 1.5]);
        assert!((ramp.gradient(&m, 1) - 2.0).abs() < 1e-15);
        // with one inactive argument the chain rule keeps the other term only
        assert_eq!(composite_gradient(&[-3.0, 0.7], &[0.0, 2.0]), 0.7 * 2.0);
    }

    #[test]
    fn weighted_mass_examples() {
        let m = PeriodicMesh1D::new(2).unwrap();
        let one = NodalField::constant(2, 1.0);
        let w = vec![1.0; m.point_count()];
        assert!((m.weighted_mass_apply(&w, &one, &one).unwrap() - 1.0).abs() < 1e-15);
        let hat = NodalField(vec![1.0, 0.0]);
        assert!((m.weighted_mass_apply(&w, &one, &hat).unwrap() - 0.5).abs() < 1e-15);
        let zeta = NodalField::constant(2, 0.0);
        let w_exp: Vec<f64> = m.points().map(|p| zeta.value(&m, &p).exp()).collect();
        assert_eq!(
            m.weighted_mass_apply(&w_exp, &one, &hat).unwrap(),
            m.weighted_mass_apply(&w, &one, &hat).unwrap()
        );
        assert!(m.weighted_mass_apply(&w[1..], &one, &hat).is_err());
    }

    #[test]
    fn scatter_matches_direct_integration() {
        let m = PeriodicMesh1D::new(6).unwrap();
        let f = m.interpolate(|x| (2.0 * std::f64::consts::PI * x).sin());
        let mut out = vec![0.0; 6];
        for p in m.points() {
            m.scatter(&p, f.value(&m, &p), f.gradient(&m, p.cell), &mut out);
        }
        for node in 0..6 {
            let mut hat = NodalField::constant(6, 0.0);
            hat.0[node] = 1.0;
            let direct = m
                .integrate(|p| f.value(&m, p) * hat.value(&m, p) + f.gradient(&m, p.cell) * hat.gradient(&m, p.cell))
                .unwrap();
            assert!((out[node] - direct).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn gradient_integrates_to_zero(vals in prop::collection::vec(-5.0f64..5.0, 3..20)) {
            let m = PeriodicMesh1D::new(vals.len()).unwrap();
            let f = NodalField(vals);
            let v = m.integrate(|p| f.gradient(&m, p.cell)).unwrap();
            prop_assert!(v.abs() < 1e-12);
        }

        #[test]
        fn nonnegative_samples_integrate_nonnegative(vals in prop::collection::vec(0.0f64..5.0, 3..20)) {
            let m = PeriodicMesh1D::new(vals.len()).unwrap();
            let f = NodalField(vals);
            prop_assert!(m.integrate(|p| f.value(&m, p).powi(3)).unwrap() >= 0.0);
        }

        #[test]
        fn positive_weight_mass_is_positive_definite(
            vals in prop::collection::vec(-5.0f64..5.0, 4..12),
            logw in prop::collection::vec(-2.0f64..2.0, 4..12),
        ) {
            let n = vals.len().min(logw.len());
            let m = PeriodicMesh1D::new(n).unwrap();
            let lw = NodalField(logw[..n].to_vec());
            let w: Vec<f64> = m.points().map(|p| lw.value(&m, &p).exp()).collect();
            let a = NodalField(vals[..n].to_vec());
            let b = NodalField(vals[..n].iter().rev().cloned().collect());
            let aa = m.weighted_mass_apply(&w, &a, &a).unwrap();
            let ab = m.weighted_mass_apply(&w, &a, &b).unwrap();
            let ba = m.weighted_mass_apply(&w, &b, &a).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab.abs()));
            prop_assert!(aa >= 0.0);
            if a.0.iter().any(|x| x.abs() > 1e-3) {
                prop_assert!(aa > 0.0);
            }
        }
    }
}
