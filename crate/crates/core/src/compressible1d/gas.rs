use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum GasError {
    #[error("density and internal energy must be positive, got rho = {rho}, eps = {eps}")]
    NonPositiveState { rho: f64, eps: f64 },
    #[error("inverse temperature must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("heat capacity must be positive and finite, got {0}")]
    InvalidHeatCapacity(f64),
}

/// Thermodynamic state from density `ρ` and internal energy per volume `ε`,
/// with the partial derivatives needed for chain-rule gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardState {
    pub p: f64,
    pub theta: f64,
    pub beta: f64,
    /// Specific entropy.
    pub s: f64,
    /// Negative specific free energy over temperature.
    pub g: f64,
    pub dp_drho: f64,
    pub dp_deps: f64,
    pub dtheta_drho: f64,
    pub dtheta_deps: f64,
}

/// Density, pressure, and internal energy reconstructed from `(g, β)`,
/// with partials with respect to `g` and `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseState {
    pub rho: f64,
    pub p: f64,
    pub eps: f64,
    pub drho: [f64; 2],
    pub dp: [f64; 2],
    pub deps: [f64; 2],
}

/// Constitutive law: the forward map `(ρ, ε) ↦ (p, θ, β, s, g)` and its inverse
/// `(g, β) ↦ (ρ, p, ε)`.
pub trait GasLaw {
    fn forward_state(&self, rho: f64, eps: f64) -> Result<ForwardState, GasError>;
    fn inverse_state(&self, g: f64, beta: f64) -> Result<InverseState, GasError>;
}

/// Ideal gas `p = ρθ`, `ε = C_V p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGas {
    cv: f64,
}

impl IdealGas {
    pub fn new(cv: f64) -> Result<Self, GasError> {
        if cv > 0.0 && cv.is_finite() {
            Ok(Self { cv })
        } else {
            Err(GasError::InvalidHeatCapacity(cv))
        }
    }

    pub fn cv(&self) -> f64 {
        self.cv
    }
}

impl Default for IdealGas {
    fn default() -> Self {
        Self { cv: 2.5 }
    }
}

impl GasLaw for IdealGas {
    fn forward_state(&self, rho: f64, eps: f64) -> Result<ForwardState, GasError> {
        if !(rho > 0.0 && eps > 0.0) {
            return Err(GasError::NonPositiveState { rho, eps });
        }
        let c = self.cv;
        let p = eps / c;
        let theta = p / rho;
        let s = c * theta.ln() - rho.ln();
        Ok(ForwardState {
            p,
            theta,
            beta: 1.0 / theta,
            s,
            g: s - (c + 1.0),
            dp_drho: 0.0,
            dp_deps: 1.0 / c,
            dtheta_drho: -theta / rho,
            dtheta_deps: theta / eps,
        })
    }

    fn inverse_state(&self, g: f64, beta: f64) -> Result<InverseState, GasError> {
        if !(beta > 0.0) {
            return Err(GasError::NonPositiveBeta(beta));
        }
        let c = self.cv;
        let rho = (-c * beta.ln() - g - (c + 1.0)).exp();
        let p = rho / beta;
        let drho = [-rho, -c * rho / beta];
        let dp = [-p, -(c + 1.0) * p / beta];
        Ok(InverseState {
            rho,
            p,
            eps: c * p,
            drho,
            dp,
            deps: [c * dp[0], c * dp[1]],
        })
    }
}

/// Pointwise residual of `ρ̃ ∇g̃ + ε̃ ∇β̃ + ∇[p̃ β̃]` for given values and gradients
/// of the auxiliary pair, with gradients of composites taken by the chain rule.
pub fn thermo_cancellation<G: GasLaw + ?Sized>(
    gas: &G,
    g: f64,
    beta: f64,
    g_x: f64,
    beta_x: f64,
) -> Result<f64, GasError> {
    let st = gas.inverse_state(g, beta)?;
    let p_x = st.dp[0] * g_x + st.dp[1] * beta_x;
    Ok(st.rho * g_x + st.eps * beta_x + (p_x * beta + st.p * beta_x))
}
