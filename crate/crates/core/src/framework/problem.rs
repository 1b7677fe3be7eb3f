use std::fmt;

/// Expected behaviour of a quantity of interest across a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Structure {
    Conserved,
    NonIncreasing,
    NonDecreasing,
    Indefinite,
}

impl Structure {
    /// Whether a change `dq` is compatible with the structure, with slack `tol`.
    pub fn admits(self, dq: f64, tol: f64) -> bool {
        match self {
            Structure::Conserved => dq.abs() <= tol,
            Structure::NonIncreasing => dq <= tol,
            Structure::NonDecreasing => dq >= -tol,
            Structure::Indefinite => true,
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Conserved => "conserved",
            Structure::NonIncreasing => "non-increasing",
            Structure::NonDecreasing => "non-decreasing",
            Structure::Indefinite => "indefinite",
        })
    }
}

/// Spatial locality of the degrees of freedom, used to probe Jacobians by
/// column groups. Each primal and auxiliary degree of freedom lives on a
/// site; residual rows at a site only depend on unknowns at neighbouring sites.
#[derive(Debug, Clone)]
pub struct Locality {
    pub primal_site: Vec<usize>,
    pub aux_site: Vec<usize>,
    /// `neighbours[s]` includes `s` itself. Must be symmetric.
    pub neighbours: Vec<Vec<usize>>,
}

/// A semi-discrete problem `M(u; u̇, v) = F(u; v)` together with the data that
/// turns it into a structure-preserving slab scheme.
///
/// Forms are exposed in "tested against every basis direction" form: each
/// `*_action` method writes the vector `[form(..., e_i)]_i`. Because every form
/// is linear in its test slot, scalar evaluations follow by a dot product, see
/// the provided `*_form` methods.
///
/// Auxiliary unknowns are stored as one vector of length [`aux_dof_count`]
/// per temporal test node. Their defining equation is
/// `I_n[aux_mass(u; v, w̃)] = ∫ aux_target(u; v)` for all test-space `v`.
///
/// [`aux_dof_count`]: Problem::aux_dof_count
pub trait Problem {
    fn dof_count(&self) -> usize;
    fn aux_dof_count(&self) -> usize;
    fn quantity_count(&self) -> usize;
    fn structure(&self) -> Vec<Structure>;

    fn quantity_names(&self) -> Vec<String> {
        (1..=self.quantity_count()).map(|q| format!("q{q}")).collect()
    }

    /// `out_i = M(u; udot, e_i)`.
    fn mass_action(&self, u: &[f64], udot: &[f64], out: &mut [f64]);
    /// `out_i = F(u; e_i)`.
    fn rhs(&self, u: &[f64], out: &mut [f64]);
    /// `out_i = F̃(u, aux; e_i)`.
    fn modified_rhs(&self, u: &[f64], aux: &[f64], out: &mut [f64]);

    fn quantities(&self, u: &[f64]) -> Vec<f64>;
    /// `out_i = Q'_q(u; e_i)`.
    fn quantity_derivative(&self, q: usize, u: &[f64], out: &mut [f64]);

    /// `out_i = M_aux(u; e_i, w)` over the auxiliary space.
    fn aux_mass_action(&self, u: &[f64], w: &[f64], out: &mut [f64]);
    /// Right side of the auxiliary definition, tested against every auxiliary direction.
    fn aux_target(&self, u: &[f64], out: &mut [f64]);
    /// Writes the discrete test function `w̃_q` built from auxiliary values.
    /// Returns `false` for quantities that are tracked without one.
    fn aux_test_function(&self, q: usize, aux: &[f64], out: &mut [f64]) -> bool;
    /// Pointwise associated test functions at `u`; the initial auxiliary guess.
    fn associated_aux(&self, u: &[f64], out: &mut [f64]);

    fn admissible_state(&self, _u: &[f64]) -> bool {
        true
    }

    fn admissible_aux(&self, _aux: &[f64]) -> bool {
        true
    }

    fn locality(&self) -> Option<Locality> {
        None
    }

    fn m_form(&self, u: &[f64], udot: &[f64], v: &[f64]) -> f64 {
        let mut out = vec![0.0; self.dof_count()];
        self.mass_action(u, udot, &mut out);
        dot(&out, v)
    }

    fn f_form(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut out = vec![0.0; self.dof_count()];
        self.rhs(u, &mut out);
        dot(&out, v)
    }

    fn ftilde_form(&self, u: &[f64], aux: &[f64], v: &[f64]) -> f64 {
        let mut out = vec![0.0; self.dof_count()];
        self.modified_rhs(u, aux, &mut out);
        dot(&out, v)
    }

    fn q_derivative(&self, q: usize, u: &[f64], v: &[f64]) -> f64 {
        let mut out = vec![0.0; self.dof_count()];
        self.quantity_derivative(q, u, &mut out);
        dot(&out, v)
    }

    fn aux_m_form(&self, u: &[f64], v: &[f64], w: &[f64]) -> f64 {
        let mut out = vec![0.0; self.aux_dof_count()];
        self.aux_mass_action(u, w, &mut out);
        dot(&out, v)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
