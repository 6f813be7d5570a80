//! Run configuration read from a TOML file. Every table and key is optional;
//! missing entries take the engine defaults.
//!
//! ```toml
//! seed = 0
//! strict = false
//! residual_state = "weld/residual_state.csv"
//!
//! [pipe]
//! inner_radius = 110.0
//! wall_thickness = 7.5
//!
//! [weld]
//! dwell = 10.0
//!
//! [scenario]
//! grade = "X80"
//! residual_stress = true
//! length_scale_factor = 4.0
//!
//! [scenario.schedule]
//! dp = 0.25
//!
//! [rcurve]
//! grade = "X80"
//! pressure = 21.0
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use weldfrac_core::coupling::Scenario;
use weldfrac_core::materials::{sievert_concentration, Grade, RegionMaterial};
use weldfrac_core::mesh::pipe::PipeSectionSpec;
use weldfrac_core::rcurve::{BoundaryLayerSpec, RcurveHydrogen};
use weldfrac_core::thermal::ThermalOptions;
use weldfrac_core::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// RNG seed for porosity placement.
    pub seed: u64,
    /// Treat validity warnings as failures (exit code 4).
    pub strict: bool,
    /// Mesh file to use instead of generating the pipe section.
    pub mesh: Option<PathBuf>,
    /// Residual-state CSV written by `weld`.
    pub residual_state: Option<PathBuf>,
    /// Hardness raster CSV in local (lateral, depth) coordinates.
    pub hardness_map: Option<PathBuf>,
    pub pipe: PipeSectionSpec,
    pub weld: WeldConfig,
    pub scenario: Scenario,
    pub rcurve: RcurveConfig,
    pub screen: ScreenConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            strict: false,
            mesh: None,
            residual_state: None,
            hardness_map: None,
            pipe: PipeSectionSpec::default(),
            weld: WeldConfig::default(),
            scenario: Scenario::default(),
            rcurve: RcurveConfig::default(),
            screen: ScreenConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeldConfig {
    /// Torch hold per pass [s].
    pub torch_duration: f64,
    /// Cooling time after each pass [s].
    pub dwell: f64,
    /// Multiplier on the thermal expansion table.
    pub alpha_scale: f64,
    /// Monitored point, local (lateral, depth) [mm].
    pub probe: [f64; 2],
    /// Lateral position of the through-wall stress line [mm].
    pub hoop_line: f64,
    pub hoop_samples: usize,
    pub thermal: ThermalOptions,
}

impl Default for WeldConfig {
    fn default() -> Self {
        Self {
            torch_duration: 5.0,
            dwell: 10.0,
            alpha_scale: 1.0,
            probe: [5.6, 5.5],
            hoop_line: 0.0,
            hoop_samples: 16,
            thermal: ThermalOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RcurveConfig {
    pub grade: Grade,
    /// Use the weld-metal properties instead of the base metal.
    pub weld_metal: bool,
    /// Gas pressure [MPa]; when set, the specimen is pre-charged to S√p.
    pub pressure: Option<f64>,
    pub model: BoundaryLayerSpec,
}

impl Default for RcurveConfig {
    fn default() -> Self {
        Self { grade: Grade::X80, weld_metal: false, pressure: None, model: BoundaryLayerSpec::default() }
    }
}

impl RcurveConfig {
    pub fn material(&self) -> RegionMaterial {
        if self.weld_metal {
            self.grade.weld()
        } else {
            self.grade.base()
        }
    }

    /// Boundary-layer spec with the pressure translated to a pre-charge.
    pub fn spec(&self) -> BoundaryLayerSpec {
        let mut spec = self.model.clone();
        if let Some(p) = self.pressure {
            let c = sievert_concentration(p, self.material().hydrogen.solubility);
            spec.hydrogen = RcurveHydrogen::Uniform { c };
        }
        spec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScreenConfig {
    /// Largest concentration on the curve grid [wppm].
    pub c_max: f64,
    pub points: usize,
}

impl Default for ScreenConfig {
    fn default() -> Self {
        Self { c_max: 5.0, points: 200 }
    }
}

/// Parsed configuration plus the directory relative paths refer to.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let config = parse(&text)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, base_dir })
    }

    pub fn defaults() -> Self {
        Self { config: RunConfig::default(), base_dir: PathBuf::new() }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// An input file named in the config; it must exist.
    pub fn input(&self, p: &Option<PathBuf>) -> Result<Option<PathBuf>> {
        match p {
            None => Ok(None),
            Some(p) => {
                let full = self.resolve(p);
                if !full.is_file() {
                    return Err(Error::Config(format!("input file {} does not exist", full.display())));
                }
                Ok(Some(full))
            }
        }
    }
}

pub fn parse(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// Hash of the effective configuration for one subcommand. Output paths do
/// not enter the hash.
pub fn effective_hash(command: &str, config: &RunConfig) -> Result<String> {
    let json = serde_json::to_string(config)?;
    Ok(weldfrac_core::io::config_hash(&format!("{command}\n{json}")))
}
