//! Run configuration, parsed from TOML. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use conserve_core::SolverConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("`{key}`: {message}")]
    Invalid { key: &'static str, message: String },
}

fn invalid(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Toy,
    Incompressible3d,
    Compressible1d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    #[default]
    StructurePreserving,
    Q1Only,
    ImplicitMidpoint,
    BaseCollocation,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemKind,
    #[serde(default)]
    pub scheme: SchemeKind,
    /// Temporal degree `S`.
    #[serde(default = "one")]
    pub s: usize,
    pub dt: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub space: Space,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub quadrature: Quadrature,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    /// Absent means the ideal limit.
    pub re: Option<f64>,
    pub pr: f64,
    pub cv: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            re: None,
            pr: 0.71,
            cv: 2.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Space {
    /// Fourier modes per direction or number of cells.
    pub n: Option<usize>,
    pub points_per_cell: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    /// Problem-specific default.
    #[default]
    Default,
    Values { values: Vec<f64> },
    Abc {
        #[serde(default = "unit")]
        a: f64,
        #[serde(default = "unit")]
        b: f64,
        #[serde(default = "unit")]
        c: f64,
    },
    Random {
        #[serde(default = "unit")]
        decay: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    Inviscid,
    Supersonic,
    Uniform { rho: f64, u: f64, eps: f64 },
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            abs_tol: d.abs_tol,
            rel_tol: d.rel_tol,
            max_iter: d.max_iter,
            fd_step: d.fd_step,
        }
    }
}

impl SolverSection {
    pub fn to_config(&self) -> SolverConfig {
        SolverConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_iter: self.max_iter,
            fd_step: self.fd_step,
            ..SolverConfig::default()
        }
    }
}

/// Temporal quadrature point counts; absent means the problem default.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Quadrature {
    pub main: Option<usize>,
    pub exact: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("must be positive and finite, got {}", self.dt)));
        }
        if !(1..=6).contains(&self.s) {
            return Err(invalid("s", format!("temporal degree must be in 1..=6, got {}", self.s)));
        }
        if let Some(re) = self.physics.re {
            if !(re > 0.0) {
                return Err(invalid("physics.re", format!("must be positive, got {re}")));
            }
        }
        if !(self.physics.pr > 0.0 && self.physics.pr.is_finite()) {
            return Err(invalid("physics.pr", format!("must be positive, got {}", self.physics.pr)));
        }
        if !(self.physics.cv > 0.0 && self.physics.cv.is_finite()) {
            return Err(invalid("physics.cv", format!("must be positive, got {}", self.physics.cv)));
        }
        self.solver.to_config().validate().map_err(|e| invalid("solver", e.to_string()))?;
        if self.quadrature.main == Some(0) || self.quadrature.exact == Some(0) {
            return Err(invalid("quadrature", "point counts must be positive"));
        }
        match self.scheme {
            SchemeKind::Q1Only if self.problem != ProblemKind::Incompressible3d => {
                return Err(invalid("scheme", "q1_only is only defined for incompressible3d"));
            }
            SchemeKind::ImplicitMidpoint if self.s != 1 => {
                return Err(invalid("s", "implicit_midpoint requires s = 1"));
            }
            _ => {}
        }
        match self.problem {
            ProblemKind::Toy => {
                if let Initial::Values { values } = &self.initial {
                    if values.len() != 2 {
                        return Err(invalid("initial.values", "the oscillator has two components"));
                    }
                } else if self.initial != Initial::Default {
                    return Err(invalid("initial.kind", "toy problem accepts `default` or `values`"));
                }
            }
            ProblemKind::Incompressible3d => {
                if let Some(n) = self.space.n {
                    if n < 4 || n % 2 != 0 {
                        return Err(invalid("space.n", format!("Fourier grid size must be even and ≥ 4, got {n}")));
                    }
                }
                if !matches!(self.initial, Initial::Default | Initial::Abc { .. } | Initial::Random { .. }) {
                    return Err(invalid("initial.kind", "incompressible3d accepts `default`, `abc` or `random`"));
                }
                if let Initial::Random { decay, amplitude } = self.initial {
                    if !(decay >= 0.0 && amplitude.is_finite()) {
                        return Err(invalid("initial", "decay must be non-negative and amplitude finite"));
                    }
                }
            }
            ProblemKind::Compressible1d => {
                if self.space.n.is_some_and(|n| n < 3) {
                    return Err(invalid("space.n", "need at least 3 cells"));
                }
                if self.space.points_per_cell == Some(0) {
                    return Err(invalid("space.points_per_cell", "must be positive"));
                }
                match self.initial {
                    Initial::Default | Initial::Inviscid | Initial::Supersonic => {}
                    Initial::Uniform { rho, eps, .. } if rho > 0.0 && eps > 0.0 => {}
                    Initial::Uniform { .. } => return Err(invalid("initial", "rho and eps must be positive")),
                    _ => {
                        return Err(invalid(
                            "initial.kind",
                            "compressible1d accepts `default`, `inviscid`, `supersonic` or `uniform`",
                        ))
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether two configs describe the same physical experiment, ignoring the
    /// scheme, quadrature, solver settings and output.
    pub fn same_experiment(&self, other: &RunConfig) -> Result<(), ConfigError> {
        let checks: [(&'static str, bool); 7] = [
            ("problem", self.problem == other.problem),
            ("dt", self.dt == other.dt),
            ("n_steps", self.n_steps == other.n_steps),
            ("seed", self.seed == other.seed),
            ("physics", self.physics == other.physics),
            ("space", self.space == other.space),
            ("initial", self.initial == other.initial),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((key, _)) => Err(invalid(key, "differs between the compared configurations")),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::from_toml(text, Path::new("test.toml"))
    }

    #[test]
    fn minimal_toy_config() {
        let c = parse("problem = \"toy\"\ndt = 0.1\nn_steps = 10\n").unwrap();
        assert_eq!(c.scheme, SchemeKind::StructurePreserving);
        assert_eq!(c.s, 1);
        assert_eq!(c.initial, Initial::Default);
        assert_eq!(c.physics.cv, 2.5);
    }

    #[test]
    fn nested_sections() {
        let c = parse(
            r#"
            problem = "compressible1d"
            scheme = "implicit_midpoint"
            dt = 0.0078125
            n_steps = 4
            [physics]
            re = 128.0
            [space]
            n = 32
            [initial]
            kind = "uniform"
            rho = 1.0
            u = 0.5
            eps = 2.0
            "#,
        )
        .unwrap();
        assert_eq!(c.physics.re, Some(128.0));
        assert_eq!(c.initial, Initial::Uniform { rho: 1.0, u: 0.5, eps: 2.0 });
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse("problem = \"toy\"\ndt = 0.1\nn_steps = 1\ntimestep = 3\n").unwrap_err();
        assert!(e.to_string().contains("timestep"), "{e}");
        let e = parse("problem = \"toy\"\ndt = 0.1\nn_steps = 1\n[physics]\nreynolds = 3\n").unwrap_err();
        assert!(e.to_string().contains("reynolds"), "{e}");
        assert!(parse("problem = \"toy\"\ndt = 0.1\nn_steps = 1\n[initial]\nkind = \"abc\"\nd = 1.0\n").is_err());
    }

    #[test]
    fn invalid_values_name_their_key() {
        let cases = [
            ("problem = \"toy\"\ndt = -0.1\nn_steps = 1\n", "dt"),
            ("problem = \"toy\"\ndt = 0.1\nn_steps = 1\ns = 0\n", "s"),
            ("problem = \"incompressible3d\"\ndt = 0.1\nn_steps = 1\n[space]\nn = 7\n", "space.n"),
            ("problem = \"compressible1d\"\ndt = 0.1\nn_steps = 1\n[physics]\nre = -1.0\n", "physics.re"),
            ("problem = \"toy\"\nscheme = \"q1_only\"\ndt = 0.1\nn_steps = 1\n", "scheme"),
            ("problem = \"toy\"\nscheme = \"implicit_midpoint\"\ns = 2\ndt = 0.1\nn_steps = 1\n", "s"),
        ];
        for (text, key) in cases {
            match parse(text) {
                Err(ConfigError::Invalid { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn experiment_comparison_ignores_scheme() {
        let a = parse("problem = \"toy\"\ndt = 0.1\nn_steps = 3\n").unwrap();
        let mut b = a.clone();
        b.scheme = SchemeKind::BaseCollocation;
        assert!(a.same_experiment(&b).is_ok());
        b.dt = 0.2;
        assert!(matches!(a.same_experiment(&b), Err(ConfigError::Invalid { key: "dt", .. })));
    }
}
