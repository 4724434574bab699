//! Scenario files. Every key carries its unit; dB and dBm values are
//! converted to linear ratios and watts here and nowhere else.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use risplace::channel::PhysicalParams;
use risplace::geometry::RisLayout;
use risplace::optimizer::AltOptConfig;
use risplace::sweep::{ArrayShape, Placement, ScenarioConfig, Spacing, SweepRange};
use risplace::units::{db_to_linear, dbm_to_watts};

const PAPER_FULL: &str = include_str!("../presets/paper-full.toml");
const PAPER_SMALL: &str = include_str!("../presets/paper-small.toml");

pub const PRESETS: [&str; 2] = ["paper-full", "paper-small"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}: field `{field}`: {message}")]
    Field {
        origin: String,
        field: String,
        message: String,
    },
    #[error("unknown preset `{0}` (available: paper-full, paper-small)")]
    UnknownPreset(String),
    #[error("bad override `{0}`: {1}")]
    Override(String, String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub physical: PhysicalSection,
    pub geometry: GeometrySection,
    pub ris: RisSection,
    pub sweep: SweepSection,
    pub optimizer: OptimizerSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    pub frequency_ghz: f64,
    pub absorption_per_m: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub power_dbm: f64,
    pub noise_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub center_x_m: f64,
    pub center_y_m: f64,
    pub tx_z_m: f64,
    pub rx_z_m: f64,
    pub tx_rows: usize,
    pub tx_cols: usize,
    pub rx_rows: usize,
    pub rx_cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisSection {
    pub elements_x: usize,
    pub elements_y: usize,
    pub element_width_lambda: f64,
    pub element_length_lambda: f64,
    pub gap_x_lambda: f64,
    pub gap_y_lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementKey {
    Midpoints,
    Endpoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub z_min_m: f64,
    pub z_max_m: f64,
    pub positions: usize,
    pub placement: PlacementKey,
    pub spacings_lambda: Vec<f64>,
    /// Rx spacings paired with `spacings_lambda`; defaults to the same list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rx_spacings_lambda: Option<Vec<f64>>,
    pub include_baseline: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    pub starts: usize,
    pub gamma: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

/// Where a configuration comes from, kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Preset(String),
    File(String),
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Preset(name) => write!(f, "preset {name}"),
            Source::File(path) => write!(f, "{path}"),
        }
    }
}

pub fn preset_text(name: &str) -> Result<&'static str, ConfigError> {
    match name {
        "paper-full" => Ok(PAPER_FULL),
        "paper-small" => Ok(PAPER_SMALL),
        other => Err(ConfigError::UnknownPreset(other.to_string())),
    }
}

/// Raw TOML table of a preset or file. A `.json` file is read as a run
/// manifest and its echoed configuration is used.
pub fn load_table(source: &Source) -> Result<toml::Table, ConfigError> {
    let origin = source.to_string();
    let text = match source {
        Source::Preset(name) => preset_text(name)?.to_string(),
        Source::File(path) => {
            let raw = fs::read_to_string(path).map_err(|e| ConfigError::Io {
                path: path.clone(),
                source: e,
            })?;
            if Path::new(path).extension().is_some_and(|e| e == "json") {
                crate::manifest::config_from_manifest(&raw).map_err(|message| {
                    ConfigError::Parse {
                        origin: origin.clone(),
                        message,
                    }
                })?
            } else {
                raw
            }
        }
    };
    text.parse::<toml::Table>().map_err(|e| ConfigError::Parse {
        origin,
        message: e.to_string(),
    })
}

/// Applies `section.key=value` (or bare `key=value` when the key name is
/// unique across sections). The value is read as a TOML literal, falling back
/// to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let bad = |msg: &str| ConfigError::Override(assignment.to_string(), msg.to_string());
    let (key, raw) = assignment.split_once('=').ok_or_else(|| bad("expected key=value"))?;
    let (key, raw) = (key.trim(), raw.trim());
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let (section, field) = match key.split_once('.') {
        Some((s, f)) => (s.to_string(), f.to_string()),
        None => {
            let owners: Vec<&String> = table
                .iter()
                .filter(|(_, v)| v.as_table().is_some_and(|t| t.contains_key(key)))
                .map(|(k, _)| k)
                .collect();
            match owners.as_slice() {
                [one] => ((*one).clone(), key.to_string()),
                [] => return Err(bad("no section has this key; use section.key")),
                _ => return Err(bad("key is ambiguous; use section.key")),
            }
        }
    };
    let target = table
        .entry(section)
        .or_insert_with(|| toml::Value::Table(toml::Table::new()))
        .as_table_mut()
        .ok_or_else(|| bad("not a section"))?;
    target.insert(field, value);
    Ok(())
}

impl FileConfig {
    pub fn from_table(table: toml::Table, source: &Source) -> Result<Self, ConfigError> {
        toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| ConfigError::Parse {
            origin: source.to_string(),
            message: e.to_string().trim_end().to_string(),
        })
    }

    /// Parses text directly so errors carry line and column.
    pub fn parse(text: &str, source: &Source) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e: toml::de::Error| ConfigError::Parse {
            origin: source.to_string(),
            message: e.to_string().trim_end().to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn spacings(&self) -> Result<Vec<Spacing>, String> {
        let tx = &self.sweep.spacings_lambda;
        match &self.sweep.rx_spacings_lambda {
            None => Ok(tx.iter().map(|&s| Spacing::uniform(s)).collect()),
            Some(rx) if rx.len() == tx.len() => Ok(tx
                .iter()
                .zip(rx)
                .map(|(&tx, &rx)| Spacing { tx, rx })
                .collect()),
            Some(rx) => Err(format!(
                "has {} entries but spacings_lambda has {}",
                rx.len(),
                tx.len()
            )),
        }
    }

    /// Converts to the simulator's scenario in SI units and validates it.
    pub fn to_scenario(&self, source: &Source, jobs: usize) -> Result<ScenarioConfig, ConfigError> {
        let field = |field: &str, message: String| ConfigError::Field {
            origin: source.to_string(),
            field: field.to_string(),
            message,
        };
        let p = &self.physical;
        let physical = PhysicalParams::new(
            p.frequency_ghz * 1e9,
            p.absorption_per_m,
            db_to_linear(p.tx_gain_dbi),
            db_to_linear(p.rx_gain_dbi),
        )
        .map_err(|e| field("physical", e.to_string()))?;
        let lambda = physical.wavelength();

        let r = &self.ris;
        let ris = RisLayout::new(
            r.elements_x,
            r.elements_y,
            r.element_width_lambda * lambda,
            r.element_length_lambda * lambda,
            r.gap_x_lambda * lambda,
            r.gap_y_lambda * lambda,
        )
        .map_err(|e| field("ris", e.to_string()))?;

        let spacings = self
            .spacings()
            .map_err(|m| field("sweep.rx_spacings_lambda", m))?;
        if spacings.is_empty() {
            return Err(field("sweep.spacings_lambda", "needs at least one spacing".into()));
        }

        let g = &self.geometry;
        let s = &self.sweep;
        let o = &self.optimizer;
        let cfg = ScenarioConfig {
            physical,
            tx_shape: ArrayShape {
                rows: g.tx_rows,
                cols: g.tx_cols,
            },
            rx_shape: ArrayShape {
                rows: g.rx_rows,
                cols: g.rx_cols,
            },
            center_x: g.center_x_m,
            center_y: g.center_y_m,
            tx_z: g.tx_z_m,
            rx_z: g.rx_z_m,
            ris,
            range: SweepRange {
                min: s.z_min_m,
                max: s.z_max_m,
                count: s.positions,
                placement: match s.placement {
                    PlacementKey::Midpoints => Placement::Midpoints,
                    PlacementKey::Endpoints => Placement::Endpoints,
                },
            },
            spacings,
            optimizer: AltOptConfig {
                starts: o.starts,
                tolerance: o.gamma,
                max_iterations: o.max_iterations,
                seed: o.seed,
                stream: 0,
            },
            power: dbm_to_watts(p.power_dbm),
            noise: dbm_to_watts(p.noise_dbm),
            include_baseline: s.include_baseline,
            jobs,
        };
        cfg.validate().map_err(|e| ConfigError::Parse {
            origin: source.to_string(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }
}

/// Loads a preset or file, applies overrides and returns the resolved file
/// configuration.
pub fn resolve(source: &Source, overrides: &[String]) -> Result<FileConfig, ConfigError> {
    if overrides.is_empty() {
        if let Source::File(path) = source {
            if !path.ends_with(".json") {
                let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
                    path: path.clone(),
                    source: e,
                })?;
                return FileConfig::parse(&text, source);
            }
        }
    }
    let mut table = load_table(source)?;
    for assignment in overrides {
        apply_override(&mut table, assignment)?;
    }
    FileConfig::from_table(table, source)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FileConfig {
        resolve(&Source::Preset("paper-small".into()), &[]).unwrap()
    }

    #[test]
    fn presets_parse_and_validate() {
        for name in PRESETS {
            let src = Source::Preset(name.into());
            let cfg = resolve(&src, &[]).unwrap();
            let scenario = cfg.to_scenario(&src, 1).unwrap();
            assert_eq!(scenario.tx_shape.len(), 4);
            assert!((scenario.power - 0.01).abs() < 1e-15);
            assert!((scenario.noise - 1e-12).abs() < 1e-24);
        }
    }

    #[test]
    fn both_presets_share_the_aperture() {
        let full = resolve(&Source::Preset("paper-full".into()), &[]).unwrap();
        let small = small();
        let src = Source::Preset("x".into());
        let a = full.to_scenario(&src, 1).unwrap().ris.max_dimension();
        let b = small.to_scenario(&src, 1).unwrap().ris.max_dimension();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn override_sets_values() {
        let src = Source::Preset("paper-small".into());
        let cfg = resolve(&src, &["power_dbm=-inf".into(), "sweep.positions=3".into()]).unwrap();
        assert_eq!(cfg.physical.power_dbm, f64::NEG_INFINITY);
        assert_eq!(cfg.sweep.positions, 3);
        assert_eq!(cfg.to_scenario(&src, 1).unwrap().power, 0.0);
        assert!(matches!(
            resolve(&src, &["nonsense".into()]),
            Err(ConfigError::Override(..))
        ));
        assert!(matches!(
            resolve(&src, &["no_such_key=1".into()]),
            Err(ConfigError::Override(..))
        ));
    }

    #[test]
    fn unknown_fields_are_rejected_with_location() {
        let text = small().to_toml().replace("starts = 10", "starts = 10\nstrats = 3");
        let err = FileConfig::parse(&text, &Source::File("x.toml".into())).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("strats"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = small();
        cfg.physical.power_dbm = f64::NEG_INFINITY;
        cfg.sweep.rx_spacings_lambda = Some(vec![1.0, 2.0, 3.0, 4.0]);
        let back = FileConfig::parse(&cfg.to_toml(), &Source::File("echo".into())).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn invalid_values_name_the_field() {
        let mut cfg = small();
        cfg.sweep.rx_spacings_lambda = Some(vec![1.0]);
        let err = cfg.to_scenario(&Source::File("f".into()), 1).unwrap_err();
        assert!(err.to_string().contains("rx_spacings_lambda"));
        let mut cfg = small();
        cfg.sweep.positions = 0;
        assert!(cfg.to_scenario(&Source::File("f".into()), 1).is_err());
    }
}
