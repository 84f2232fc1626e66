//! Flat JSON configuration: seeds, grid, verification flags, output.

use serde::{Deserialize, Serialize};
use susy_chain::{BacklundChain, SeedSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub seeds: Vec<SeedConfig>,
    pub grid: GridConfig,
    #[serde(default)]
    pub verify: VerifyFlags,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    pub family: String,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub shift: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFlags {
    #[serde(default = "enabled")]
    pub riccati: bool,
    #[serde(default = "enabled")]
    pub oracle: bool,
    #[serde(default = "enabled")]
    pub scattering: bool,
    #[serde(default = "enabled")]
    pub spectrum: bool,
    #[serde(default = "enabled")]
    pub poles: bool,
}

fn enabled() -> bool {
    true
}

impl Default for VerifyFlags {
    fn default() -> Self {
        VerifyFlags {
            riccati: true,
            oracle: true,
            scattering: true,
            spectrum: true,
            poles: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_format")]
    pub format: String,
    #[serde(default)]
    pub path: Option<String>,
}

fn default_format() -> String {
    "csv".into()
}

impl ChainConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let config: ChainConfig =
            serde_json::from_str(&text).map_err(|e| format!("invalid config JSON: {e}"))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), String> {
        if self.seeds.is_empty() {
            return Err("config needs at least one seed".into());
        }
        if self.grid.samples < 2 {
            return Err(format!(
                "grid.samples must be at least 2, got {}",
                self.grid.samples
            ));
        }
        if self.grid.x_min.is_nan() || self.grid.x_max.is_nan() || self.grid.x_min >= self.grid.x_max {
            return Err(format!(
                "grid must satisfy x_min < x_max, got [{}, {}]",
                self.grid.x_min, self.grid.x_max
            ));
        }
        if let Some(out) = &self.output {
            if out.format != "csv" && out.format != "json" {
                return Err(format!(
                    "output.format must be \"csv\" or \"json\", got {:?}",
                    out.format
                ));
            }
        }
        Ok(())
    }

    pub fn seed_specs(&self) -> Result<Vec<SeedSpec>, String> {
        self.seeds
            .iter()
            .map(|s| {
                let family = s.family.parse().map_err(|e| format!("{e}"))?;
                SeedSpec::new(family, s.kappa, s.shift).map_err(|e| format!("{e}"))
            })
            .collect()
    }

    /// Build the chain; duplicate factorization energies surface here.
    pub fn chain(&self) -> Result<BacklundChain, String> {
        BacklundChain::new(self.seed_specs()?).map_err(|e| format!("{e}"))
    }
}
