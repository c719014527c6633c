//! Run configuration: JSON schema, defaults, validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use chaplygin_core::systems::{
    build, BuiltSystem, PotentialKind, SystemDescriptor, SystemName,
};
use chaplygin_core::verify::Tolerances;

/// Configuration errors carry everything wrong at once.
#[derive(Debug)]
pub enum ConfigError {
    /// The document is not valid JSON or has unknown/ill-typed keys; the
    /// message carries line/column context from the parser.
    Parse(String),
    /// The document parsed but violates the schema constraints.
    Validation(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "configuration parse error: {msg}"),
            ConfigError::Validation(violations) => {
                write!(f, "configuration invalid: {}", violations.join("; "))
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// The on-disk run configuration. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// vertical-disk | nonholonomic-particle | veselova
    pub system: String,
    /// Per-system physical parameters (missing keys take defaults).
    pub params: BTreeMap<String, f64>,
    /// none | quadratic-y
    pub potential: String,
    /// Optional command pin; must match the invoked subcommand.
    pub command: Option<String>,
    pub initial_point: Option<Vec<f64>>,
    pub initial_velocity: Option<Vec<f64>>,
    pub t_final: f64,
    pub dt: f64,
    pub seed: u64,
    /// Window of the local distance comparison.
    pub t_small: f64,
    /// Chart points for `build-metric`.
    pub points: Option<Vec<Vec<f64>>>,
    /// Base-grid resolution for `recover-phi`.
    pub grid: Vec<usize>,
    /// Tolerance overrides for `verify` and `distance`.
    pub tolerances: Tolerances,
    /// Output path; stdout when absent.
    pub output: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: "nonholonomic-particle".into(),
            params: BTreeMap::new(),
            potential: "none".into(),
            command: None,
            initial_point: None,
            initial_velocity: None,
            t_final: 10.0,
            dt: 1e-3,
            seed: 0,
            t_small: 0.3,
            points: None,
            grid: vec![5, 5],
            tolerances: Tolerances::default(),
            output: None,
        }
    }
}

impl RunConfig {
    /// Parse a JSON document, filling defaults and rejecting unknown keys.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization")
    }

    fn potential_kind(&self) -> Result<PotentialKind, String> {
        match self.potential.as_str() {
            "none" => Ok(PotentialKind::None),
            "quadratic-y" => Ok(PotentialKind::QuadraticY),
            other => Err(format!(
                "unknown potential '{other}' (expected none | quadratic-y)"
            )),
        }
    }

    /// Validate every constraint at once and build the system.
    pub fn validate(&self, invoked_command: &str) -> Result<ValidatedRun, ConfigError> {
        let mut violations = Vec::new();
        if !(self.dt > 0.0) {
            violations.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_final > 0.0) {
            violations.push(format!("t_final must be positive, got {}", self.t_final));
        }
        if !(self.t_small > 0.0) {
            violations.push(format!("t_small must be positive, got {}", self.t_small));
        }
        if let Some(cmd) = &self.command {
            if cmd != invoked_command {
                violations.push(format!(
                    "config pins command '{cmd}' but '{invoked_command}' was invoked"
                ));
            }
        }
        if self.grid.len() != 2 || self.grid.iter().any(|n| *n < 2) {
            violations.push(format!(
                "grid must be two counts >= 2, got {:?}",
                self.grid
            ));
        }
        let name = match SystemName::parse(&self.system) {
            Ok(name) => Some(name),
            Err(e) => {
                violations.push(e.to_string());
                None
            }
        };
        let potential = match self.potential_kind() {
            Ok(p) => Some(p),
            Err(e) => {
                violations.push(e);
                None
            }
        };
        let built = match (name, potential) {
            (Some(name), Some(potential)) => {
                let mut descriptor = SystemDescriptor::new(name).with_potential(potential);
                for (k, v) in &self.params {
                    descriptor = descriptor.with_param(k, *v);
                }
                match build(&descriptor) {
                    Ok(b) => Some(b),
                    Err(e) => {
                        violations.push(e.to_string());
                        None
                    }
                }
            }
            _ => None,
        };
        if let Some(b) = &built {
            let n = b.dim();
            if let Some(p) = &self.initial_point {
                if p.len() != n {
                    violations.push(format!(
                        "initial_point has dimension {}, system has {n}",
                        p.len()
                    ));
                }
            }
            if let Some(v) = &self.initial_velocity {
                if v.len() != n {
                    violations.push(format!(
                        "initial_velocity has dimension {}, system has {n}",
                        v.len()
                    ));
                }
            }
            if let Some(points) = &self.points {
                for (i, p) in points.iter().enumerate() {
                    if p.len() != n {
                        violations.push(format!(
                            "points[{i}] has dimension {}, system has {n}",
                            p.len()
                        ));
                    }
                }
            }
        }
        match built {
            Some(built) if violations.is_empty() => {
                let (q0, v0) = match (&self.initial_point, &self.initial_velocity) {
                    (Some(q), Some(v)) => (q.clone(), v.clone()),
                    (Some(q), None) => {
                        let base_v = &built.default_initial.1[..built.base_dim()].to_vec();
                        match chaplygin_core::chaplygin::horizontal_lift(&built.system, q, base_v)
                        {
                            Ok(v) => (q.clone(), v),
                            Err(e) => {
                                return Err(ConfigError::Validation(vec![format!(
                                    "cannot lift default velocity at initial_point: {e}"
                                )]))
                            }
                        }
                    }
                    (None, Some(v)) => (built.default_initial.0.clone(), v.clone()),
                    (None, None) => built.default_initial.clone(),
                };
                Ok(ValidatedRun {
                    config: self.clone(),
                    built,
                    q0,
                    v0,
                })
            }
            _ => Err(ConfigError::Validation(violations)),
        }
    }
}

/// A config bound to a built system and concrete initial data.
pub struct ValidatedRun {
    pub config: RunConfig,
    pub built: BuiltSystem,
    pub q0: Vec<f64>,
    pub v0: Vec<f64>,
}
