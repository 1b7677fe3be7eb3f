//! Temporal polynomial spaces on a single slab and the quadrature rules used to
//! integrate over it.
//!
//! Everything lives on the reference interval `[0, 1]`. A slab `[t_n, t_n + dt]`
//! is reached through the affine map `t = t_n + tau * dt`, so integrals pick up a
//! factor `dt` and time derivatives a factor `1 / dt`. Stored coefficients are
//! always Lagrange values at the reference nodes.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TemporalError {
    #[error("a quadrature rule needs at least one point")]
    EmptyRule,
    #[error("polynomial degree must be at least 1, got {0}")]
    InvalidDegree(usize),
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("test nodes must be distinct points in (0, 1]")]
    InvalidNodes,
    #[error("rule exact to degree {have} but degree {need} is required")]
    InsufficientExactness { have: usize, need: usize },
    #[error("temporal Gram matrix is singular")]
    SingularGram,
}

/// A positive-weight quadrature rule on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    exactness_degree: usize,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exactness_degree(&self) -> usize {
        self.exactness_degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Reference-interval integral of `f`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// `m`-point Gauss-Legendre rule mapped to `[0, 1]`, exact for degree `2m - 1`.
pub fn gauss_rule(m: usize) -> Result<QuadratureRule, TemporalError> {
    if m == 0 {
        return Err(TemporalError::EmptyRule);
    }
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_m over [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push(0.5 * (1.0 - x));
        weights.push(0.5 * w);
    }
    // Ascending order on [0, 1] already, since x was descending.
    Ok(QuadratureRule {
        nodes,
        weights,
        exactness_degree: 2 * m - 1,
    })
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let d = m as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// Lagrange values of all basis polynomials through `nodes` at `t`.
fn lagrange_values(nodes: &[f64], t: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|i| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &tj)| (t - tj) / (nodes[i] - tj))
                .product()
        })
        .collect()
}

fn lagrange_derivatives(nodes: &[f64], t: f64) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|i| {
            let mut total = 0.0;
            for k in (0..n).filter(|&k| k != i) {
                let mut term = 1.0 / (nodes[i] - nodes[k]);
                for j in (0..n).filter(|&j| j != i && j != k) {
                    term *= (t - nodes[j]) / (nodes[i] - nodes[j]);
                }
                total += term;
            }
            total
        })
        .collect()
}

/// Trial space `P_S` and test space `P_{S-1}` on the reference slab.
///
/// Trial nodes are `{0} ∪ test_nodes`, so the incoming state is the first trial
/// coefficient and the remaining `S` trial coefficients are the unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalBasis {
    degree: usize,
    trial_nodes: Vec<f64>,
    test_nodes: Vec<f64>,
}

impl TemporalBasis {
    pub fn new(test_nodes: Vec<f64>) -> Result<Self, TemporalError> {
        let degree = test_nodes.len();
        if degree == 0 {
            return Err(TemporalError::InvalidDegree(0));
        }
        let in_range = test_nodes.iter().all(|&t| t > 0.0 && t <= 1.0);
        let distinct = test_nodes
            .iter()
            .enumerate()
            .all(|(i, a)| test_nodes[i + 1..].iter().all(|b| (a - b).abs() > 1e-12));
        if !in_range || !distinct {
            return Err(TemporalError::InvalidNodes);
        }
        let mut trial_nodes = Vec::with_capacity(degree + 1);
        trial_nodes.push(0.0);
        trial_nodes.extend_from_slice(&test_nodes);
        Ok(Self {
            degree,
            trial_nodes,
            test_nodes,
        })
    }

    /// Degree-`s` basis with Gauss-Legendre test nodes.
    pub fn gauss(s: usize) -> Result<Self, TemporalError> {
        if s == 0 {
            return Err(TemporalError::InvalidDegree(0));
        }
        Self::new(gauss_rule(s)?.nodes)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn trial_nodes(&self) -> &[f64] {
        &self.trial_nodes
    }

    pub fn test_nodes(&self) -> &[f64] {
        &self.test_nodes
    }

    pub fn trial_values(&self, t: f64) -> Vec<f64> {
        lagrange_values(&self.trial_nodes, t)
    }

    /// Reference-time derivatives of the trial basis; divide by `dt` for physical time.
    pub fn trial_derivatives(&self, t: f64) -> Vec<f64> {
        lagrange_derivatives(&self.trial_nodes, t)
    }

    pub fn test_values(&self, t: f64) -> Vec<f64> {
        lagrange_values(&self.test_nodes, t)
    }
}

/// `Σ_i weights[i] * coeffs[i]` for equally sized spatial vectors.
pub fn combine(weights: &[f64], coeffs: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.first().map_or(0, Vec::len)];
    combine_into(weights, coeffs, &mut out);
    out
}

pub fn combine_into(weights: &[f64], coeffs: &[Vec<f64>], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (w, c) in weights.iter().zip(coeffs) {
        if *w == 0.0 {
            continue;
        }
        for (o, x) in out.iter_mut().zip(c) {
            *o += w * x;
        }
    }
}

fn check_count(expected: usize, got: usize) -> Result<(), TemporalError> {
    if expected == got {
        Ok(())
    } else {
        Err(TemporalError::CoefficientCount { expected, got })
    }
}

/// Value of the degree-`S` trial polynomial at reference time `t`.
pub fn eval_trial(
    basis: &TemporalBasis,
    coeffs: &[Vec<f64>],
    t: f64,
) -> Result<Vec<f64>, TemporalError> {
    check_count(basis.degree + 1, coeffs.len())?;
    Ok(combine(&basis.trial_values(t), coeffs))
}

/// Reference-time derivative of the trial polynomial at `t`.
pub fn eval_trial_derivative(
    basis: &TemporalBasis,
    coeffs: &[Vec<f64>],
    t: f64,
) -> Result<Vec<f64>, TemporalError> {
    check_count(basis.degree + 1, coeffs.len())?;
    Ok(combine(&basis.trial_derivatives(t), coeffs))
}

/// Value of a degree-`S-1` test-space polynomial at `t`.
pub fn eval_test(
    basis: &TemporalBasis,
    coeffs: &[Vec<f64>],
    t: f64,
) -> Result<Vec<f64>, TemporalError> {
    check_count(basis.degree, coeffs.len())?;
    Ok(combine(&basis.test_values(t), coeffs))
}

/// Matrix `Π` (S × (S+1)) mapping trial coefficients to the test-space
/// coefficients of the projection defined by
/// `gram_rule[φ_j p] = moment_rule[φ_j u]` for every test basis function `φ_j`.
pub fn projection_matrix(
    basis: &TemporalBasis,
    gram_rule: &QuadratureRule,
    moment_rule: &QuadratureRule,
) -> Result<DMatrix<f64>, TemporalError> {
    let s = basis.degree;
    let mut gram = DMatrix::zeros(s, s);
    for (&t, &w) in gram_rule.nodes.iter().zip(&gram_rule.weights) {
        let phi = basis.test_values(t);
        for j in 0..s {
            for l in 0..s {
                gram[(j, l)] += w * phi[j] * phi[l];
            }
        }
    }
    let mut moments = DMatrix::zeros(s, s + 1);
    for (&t, &w) in moment_rule.nodes.iter().zip(&moment_rule.weights) {
        let phi = basis.test_values(t);
        let psi = basis.trial_values(t);
        for j in 0..s {
            for i in 0..=s {
                moments[(j, i)] += w * phi[j] * psi[i];
            }
        }
    }
    let lu = gram.lu();
    lu.solve(&moments).ok_or(TemporalError::SingularGram)
}

/// L²(slab) projection of a trial polynomial onto the test space, returned as
/// values at the test nodes.
pub fn temporal_l2_project(
    basis: &TemporalBasis,
    coeffs: &[Vec<f64>],
    rule: &QuadratureRule,
) -> Result<Vec<Vec<f64>>, TemporalError> {
    check_count(basis.degree + 1, coeffs.len())?;
    let need = 2 * basis.degree - 1;
    if rule.exactness_degree < need {
        return Err(TemporalError::InsufficientExactness {
            have: rule.exactness_degree,
            need,
        });
    }
    let proj = projection_matrix(basis, rule, rule)?;
    Ok((0..basis.degree)
        .map(|j| {
            let row: Vec<f64> = (0..=basis.degree).map(|i| proj[(j, i)]).collect();
            combine(&row, coeffs)
        })
        .collect())
}
