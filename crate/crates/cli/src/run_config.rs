//! Resolution of the run configuration: command-line flags take precedence
//! over `DYADIC_SEED`, which takes precedence over the `--config` file.

use std::path::{Path, PathBuf};

use dyadic_core::SuiteConstants;
use serde::Deserialize;

pub const MAX_DEPTH: u32 = 16;
pub const DEFAULT_DEPTH: u32 = 10;
pub const DEFAULT_SEED: u64 = 0;

/// On-disk form of the run configuration.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub depth: Option<u32>,
    pub seed: Option<u64>,
    /// Suite constants file, relative to the config file.
    pub constants: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub pass_slack: Option<f64>,
    pub norm: Option<f64>,
    pub norm_max_iterations: Option<usize>,
    pub bellman_slack: Option<f64>,
    pub fd_relative: Option<f64>,
    pub quadrature_relative: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub depth: u32,
    pub seed: u64,
    pub constants: SuiteConstants,
}

impl RunConfig {
    pub fn resolve(
        config: Option<&Path>,
        constants: Option<&Path>,
        seed: Option<u64>,
    ) -> Result<Self, String> {
        let (file, base) = match config {
            Some(path) => {
                let text = read(path)?;
                let file: ConfigFile =
                    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
                (file, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (ConfigFile::default(), PathBuf::new()),
        };

        let constants_path = constants
            .map(Path::to_path_buf)
            .or_else(|| file.constants.as_ref().map(|p| base.join(p)));
        let mut suite = match constants_path {
            Some(path) => SuiteConstants::from_toml(&read(&path)?)
                .map_err(|e| format!("{}: {e}", path.display()))?,
            None => SuiteConstants::frozen(),
        };
        file.tolerances.apply(&mut suite);
        suite.validate().map_err(|e| e.to_string())?;

        let depth = file.depth.unwrap_or(DEFAULT_DEPTH);
        check_depth(depth)?;
        Ok(RunConfig {
            depth,
            seed: seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            constants: suite,
        })
    }

    pub fn depth_or(&self, flag: Option<u32>) -> Result<u32, String> {
        let depth = flag.unwrap_or(self.depth);
        check_depth(depth)?;
        Ok(depth)
    }
}

impl ToleranceOverrides {
    fn apply(&self, c: &mut SuiteConstants) {
        if let Some(v) = self.pass_slack {
            c.checks.pass_slack = v;
        }
        if let Some(v) = self.norm {
            c.norm.tolerance = v;
        }
        if let Some(v) = self.norm_max_iterations {
            c.norm.max_iterations = v;
        }
        if let Some(v) = self.bellman_slack {
            c.bellman.slack_tolerance = v;
        }
        if let Some(v) = self.fd_relative {
            c.bellman.fd_relative_tolerance = v;
        }
        if let Some(v) = self.quadrature_relative {
            c.bellman.quadrature_relative_tolerance = v;
        }
    }
}

pub fn check_depth(depth: u32) -> Result<(), String> {
    if (1..=MAX_DEPTH).contains(&depth) {
        Ok(())
    } else {
        Err(format!("depth must lie in 1..={MAX_DEPTH}, got {depth}"))
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}
