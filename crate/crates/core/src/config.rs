//! Suite constants: pass thresholds and numerical tolerances, loaded from a
//! single versioned TOML document. The frozen defaults are compiled in from
//! `suite_constants.toml`.

use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};

const FROZEN: &str = include_str!("../suite_constants.toml");

pub const SUITE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConstants {
    pub version: u32,
    pub checks: CheckConstants,
    pub bellman: BellmanConstants,
    pub norm: NormConstants,
    pub scan: ScanConstants,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConstants {
    pub carleson_lemma: f64,
    pub quarter_power: f64,
    pub cubic: f64,
    pub wittwer: f64,
    pub bilinear: f64,
    pub pass_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellmanConstants {
    pub b2_midpoint_ratio: f64,
    pub b3_midpoint_ratio: f64,
    pub slack_tolerance: f64,
    pub fd_relative_tolerance: f64,
    pub fd_derivative_tolerance: f64,
    pub fd_relative_step: f64,
    pub quadrature_relative_tolerance: f64,
    pub log2_range: f64,
    pub fd_log2_range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConstants {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restart_seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConstants {
    pub max_slope: f64,
    pub max_ratio_spread: f64,
    pub unweighted_bound: f64,
    pub wittwer_max_slope: f64,
}

impl SuiteConstants {
    /// The compiled-in frozen constants.
    pub fn frozen() -> Self {
        Self::from_toml(FROZEN).expect("embedded suite constants are valid")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: SuiteConstants =
            toml::from_str(text).map_err(|e| DyadicError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("suite constants serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SUITE_VERSION {
            return Err(DyadicError::Config(format!(
                "unsupported constants version {} (expected {SUITE_VERSION})",
                self.version
            )));
        }
        let positive = [
            ("checks.carleson_lemma", self.checks.carleson_lemma),
            ("checks.quarter_power", self.checks.quarter_power),
            ("checks.cubic", self.checks.cubic),
            ("checks.wittwer", self.checks.wittwer),
            ("checks.bilinear", self.checks.bilinear),
            ("checks.pass_slack", self.checks.pass_slack),
            ("bellman.b2_midpoint_ratio", self.bellman.b2_midpoint_ratio),
            ("bellman.b3_midpoint_ratio", self.bellman.b3_midpoint_ratio),
            ("bellman.slack_tolerance", self.bellman.slack_tolerance),
            ("bellman.fd_relative_tolerance", self.bellman.fd_relative_tolerance),
            ("bellman.fd_derivative_tolerance", self.bellman.fd_derivative_tolerance),
            ("bellman.fd_relative_step", self.bellman.fd_relative_step),
            (
                "bellman.quadrature_relative_tolerance",
                self.bellman.quadrature_relative_tolerance,
            ),
            ("bellman.log2_range", self.bellman.log2_range),
            ("bellman.fd_log2_range", self.bellman.fd_log2_range),
            ("norm.tolerance", self.norm.tolerance),
            ("scan.max_slope", self.scan.max_slope),
            ("scan.max_ratio_spread", self.scan.max_ratio_spread),
            ("scan.unweighted_bound", self.scan.unweighted_bound),
            ("scan.wittwer_max_slope", self.scan.wittwer_max_slope),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(DyadicError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.norm.max_iterations == 0 || self.norm.restart_seeds.is_empty() {
            return Err(DyadicError::Config(
                "norm.max_iterations and norm.restart_seeds must be nonempty".into(),
            ));
        }
        Ok(())
    }
}

impl Default for SuiteConstants {
    fn default() -> Self {
        Self::frozen()
    }
}
