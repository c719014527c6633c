//! Descriptors naming the built-in systems and their parameters.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Built-in system names (also the CLI contract).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemName {
    #[serde(rename = "vertical-disk")]
    VerticalDisk,
    #[serde(rename = "nonholonomic-particle")]
    NonholonomicParticle,
    #[serde(rename = "veselova")]
    Veselova,
}

impl SystemName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "vertical-disk" => Ok(Self::VerticalDisk),
            "nonholonomic-particle" => Ok(Self::NonholonomicParticle),
            "veselova" => Ok(Self::Veselova),
            other => Err(Error::InvalidParameters(format!(
                "unknown system '{other}' (expected vertical-disk | nonholonomic-particle | veselova)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::VerticalDisk => "vertical-disk",
            Self::NonholonomicParticle => "nonholonomic-particle",
            Self::Veselova => "veselova",
        }
    }

    /// Parameter keys accepted by this system, with defaults.
    pub fn default_params(&self) -> BTreeMap<String, f64> {
        let mut p = BTreeMap::new();
        match self {
            Self::VerticalDisk => {
                p.insert("m".into(), 1.0);
                p.insert("R".into(), 1.0);
                p.insert("I".into(), 1.0);
                p.insert("J".into(), 1.0);
            }
            Self::NonholonomicParticle => {}
            Self::Veselova => {
                p.insert("I1".into(), 1.0);
                p.insert("I2".into(), 2.0);
                p.insert("I3".into(), 3.0);
            }
        }
        p
    }
}

impl fmt::Display for SystemName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Optional potential selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PotentialKind {
    #[default]
    #[serde(rename = "none")]
    None,
    /// Harmonic potential in the second base coordinate (for the particle,
    /// `V = y^2 / 2`).
    #[serde(rename = "quadratic-y")]
    QuadraticY,
}

/// A validated request for one of the built-in systems.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemDescriptor {
    pub name: SystemName,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub potential: PotentialKind,
}

impl SystemDescriptor {
    pub fn new(name: SystemName) -> Self {
        Self {
            name,
            params: name.default_params(),
            potential: PotentialKind::None,
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    pub fn with_potential(mut self, potential: PotentialKind) -> Self {
        self.potential = potential;
        self
    }

    /// Fill in defaults for missing keys and reject unknown or non-positive
    /// parameters.
    pub fn validated_params(&self) -> Result<BTreeMap<String, f64>> {
        let mut params = self.name.default_params();
        for (key, value) in &self.params {
            if !params.contains_key(key) {
                return Err(Error::InvalidParameters(format!(
                    "system '{}' does not take a parameter '{key}'",
                    self.name
                )));
            }
            if !(*value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameters(format!(
                    "parameter '{key}' must be a positive real, got {value}"
                )));
            }
            params.insert(key.clone(), *value);
        }
        Ok(params)
    }
}
