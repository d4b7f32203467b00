//! Flat `key = value` run configuration.
//!
//! ```text
//! # sodium D2 line, resonant cavity
//! E0      = 2.104 eV
//! d       = 1 D
//! n       = 3.5e11 cm^-3
//! tau_coh = 10 ns
//! m       = 1
//! Delta   = 0 meV
//! g       = 0.1 meV
//! ```
//!
//! Dimensional values must carry a unit. Either `L_cav` or `Delta` fixes the
//! cavity mode, never both.

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coupling::{
    coupling_for_transition, length_for_detuning, CavityParams, CouplingParams, MediumParams,
    DEFAULT_STRONG_THRESHOLD,
};
use crate::dispersion::DEFAULT_PARAXIAL_BOUND;
use crate::quantities::{Dimension, Measured, Quantity, Unit, UnitError, UnitSystem};
use crate::thermo::{effective_masses, GasState, TrapSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("key `{key}`: {source}")]
    Value {
        key: &'static str,
        #[source]
        source: UnitError,
    },
    #[error("key `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("keys `{0}` and `{1}` are mutually exclusive")]
    Conflict(&'static str, &'static str),
    #[error(transparent)]
    Physics(#[from] crate::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeySpec {
    pub name: &'static str,
    pub dim: Dimension,
    /// Dimensionless keys take bare numbers.
    pub bare: bool,
}

const fn key(name: &'static str, dim: Dimension) -> KeySpec {
    KeySpec {
        name,
        dim,
        bare: false,
    }
}

const fn bare(name: &'static str) -> KeySpec {
    KeySpec {
        name,
        dim: Dimension::NONE,
        bare: true,
    }
}

pub const KEYS: &[KeySpec] = &[
    key("E0", Dimension::ENERGY),
    key("d", Dimension::DIPOLE),
    key("n", Dimension::VOLUME_DENSITY),
    key("tau_coh", Dimension::TIME),
    bare("m"),
    key("L_cav", Dimension::LENGTH),
    key("Delta", Dimension::ENERGY),
    key("d_beam", Dimension::LENGTH),
    key("g", Dimension::ENERGY),
    key("T", Dimension::TEMPERATURE),
    key("m_eff", Dimension::MASS),
    key("n2", Dimension::AREA_DENSITY),
    key("n3", Dimension::VOLUME_DENSITY),
    key("n_s", Dimension::AREA_DENSITY),
    key("omega_eff", Dimension::FREQUENCY),
    key("U0", Dimension::ENERGY),
    key("r0", Dimension::LENGTH),
    key("omega_at", Dimension::FREQUENCY),
    bare("n0"),
    key("E_char", Dimension::ENERGY),
    bare("strong_threshold"),
    bare("paraxial_bound"),
];

pub fn key_spec(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A config value with the unit it was written in.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub quantity: Quantity,
    pub magnitude: f64,
    pub unit: Option<Unit>,
}

impl Entry {
    pub fn parse(spec: &KeySpec, text: &str) -> Result<Entry, ConfigError> {
        let text = text.trim();
        if spec.bare {
            let magnitude: f64 = text.parse().map_err(|_| ConfigError::Value {
                key: spec.name,
                source: UnitError::BadNumber(text.to_string()),
            })?;
            return Ok(Entry {
                quantity: Quantity::dimensionless(magnitude),
                magnitude,
                unit: None,
            });
        }
        let m: Measured = text.parse().map_err(|source| ConfigError::Value {
            key: spec.name,
            source,
        })?;
        if m.unit.dim != spec.dim {
            return Err(ConfigError::Value {
                key: spec.name,
                source: UnitError::WrongUnit {
                    unit: m.unit.name,
                    expected: spec.dim,
                    found: m.unit.dim,
                },
            });
        }
        Ok(Entry {
            quantity: m.quantity(),
            magnitude: m.magnitude,
            unit: Some(m.unit),
        })
    }

    /// Same unit as `self`, new magnitude.
    pub fn with_magnitude(&self, magnitude: f64) -> Entry {
        let quantity = match &self.unit {
            Some(u) => u.of(magnitude),
            None => Quantity::dimensionless(magnitude),
        };
        Entry {
            quantity,
            magnitude,
            unit: self.unit.clone(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    entries: BTreeMap<&'static str, Entry>,
    pub format: Option<OutputFormat>,
    pub units: Option<UnitSystem>,
    /// Short SHA-256 of the source text.
    pub hash: String,
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in &self.entries {
            match &e.unit {
                Some(u) => writeln!(f, "{k} = {} {}", e.magnitude, u.name)?,
                None => writeln!(f, "{k} = {}", e.magnitude)?,
            }
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig {
            hash: hex::encode(&Sha256::digest(text.as_bytes())[..8]),
            ..RunConfig::default()
        };
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: line_no })?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "format" => {
                    cfg.format = Some(match v {
                        "csv" => OutputFormat::Csv,
                        "json" => OutputFormat::Json,
                        _ => {
                            return Err(ConfigError::Invalid {
                                key: "format",
                                reason: format!("expected csv or json, got `{v}`"),
                            })
                        }
                    });
                    continue;
                }
                "units" => {
                    cfg.units = Some(v.parse().map_err(|source| ConfigError::Value {
                        key: "units",
                        source,
                    })?);
                    continue;
                }
                _ => {}
            }
            let spec = key_spec(k).ok_or_else(|| ConfigError::UnknownKey {
                line: line_no,
                key: k.to_string(),
            })?;
            let entry = Entry::parse(spec, v)?;
            if cfg.entries.insert(spec.name, entry).is_some() {
                return Err(ConfigError::Duplicate {
                    line: line_no,
                    key: k.to_string(),
                });
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn get(&self, key: &str) -> Option<Quantity> {
        self.entries.get(key).map(|e| e.quantity)
    }

    pub fn require(&self, key: &'static str) -> Result<Quantity, ConfigError> {
        self.get(key).ok_or(ConfigError::Missing(key))
    }

    pub fn set(&mut self, key: &'static str, entry: Entry) {
        self.entries.insert(key, entry);
    }

    pub fn remove(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn scalar(&self, key: &'static str, default: f64) -> f64 {
        self.get(key).map(|q| q.value()).unwrap_or(default)
    }

    pub fn strong_threshold(&self) -> f64 {
        self.scalar("strong_threshold", DEFAULT_STRONG_THRESHOLD)
    }

    pub fn paraxial_bound(&self) -> f64 {
        self.scalar("paraxial_bound", DEFAULT_PARAXIAL_BOUND)
    }

    pub fn medium(&self) -> Result<MediumParams, ConfigError> {
        Ok(MediumParams::new(
            self.require("E0")?,
            self.require("d")?,
            self.require("n")?,
            self.require("tau_coh")?,
        )?)
    }

    pub fn mode_index(&self) -> Result<u32, ConfigError> {
        let m = self.require("m")?.value();
        if m < 1.0 || m.fract() != 0.0 || m > u32::MAX as f64 {
            return Err(ConfigError::Invalid {
                key: "m",
                reason: format!("mode index must be a positive integer, got {m}"),
            });
        }
        Ok(m as u32)
    }

    pub fn cavity(&self) -> Result<CavityParams, ConfigError> {
        let m = self.mode_index()?;
        let length = match (self.get("L_cav"), self.get("Delta")) {
            (Some(_), Some(_)) => return Err(ConfigError::Conflict("L_cav", "Delta")),
            (Some(l), None) => l,
            (None, Some(delta)) => length_for_detuning(self.require("E0")?, m, delta)?,
            (None, None) => return Err(ConfigError::Missing("L_cav")),
        };
        Ok(CavityParams::new(length, m, self.get("d_beam"))?)
    }

    pub fn coupling(&self) -> Result<CouplingParams, ConfigError> {
        let cavity = self.cavity()?;
        let mut cp = coupling_for_transition(self.require("E0")?, &cavity, self.require("g")?)?;
        // The length was solved from Delta; keep Delta itself rather than the
        // round-tripped difference so that Delta = 0 is exactly resonant.
        if let Some(delta) = self.get("Delta") {
            cp.detuning = delta.to_cgs();
        }
        Ok(cp)
    }

    /// `m_eff` from the config, else the lower-branch mass. The flag is true
    /// when the mass was derived.
    pub fn effective_mass(&self) -> Result<(Quantity, bool), ConfigError> {
        if let Some(m) = self.get("m_eff") {
            return Ok((m, false));
        }
        let coupling = self.coupling().map_err(|e| match e {
            ConfigError::Missing(k) => ConfigError::Invalid {
                key: "m_eff",
                reason: format!("not given, and cannot derive it from the cavity: missing `{k}`"),
            },
            other => other,
        })?;
        let mass = effective_masses(&coupling)
            .lower
            .value()
            .ok_or(ConfigError::Invalid {
                key: "m_eff",
                reason: "lower-branch mass is saturated for this detuning".into(),
            })?;
        Ok((mass, true))
    }

    pub fn gas(&self) -> Result<(GasState, bool), ConfigError> {
        let temperature = self.require("T")?;
        let (m_eff, derived) = self.effective_mass()?;
        let n2 = self.get("n2");
        let n3 = self.get("n3");
        if n2.is_none() && n3.is_none() {
            return Err(ConfigError::Missing("n2"));
        }
        Ok((
            GasState {
                n2,
                n3,
                n_s: self.get("n_s"),
                temperature,
                m_eff,
            },
            derived,
        ))
    }

    pub fn trap(&self) -> Result<Option<TrapSpec>, ConfigError> {
        let Some(omega) = self.get("omega_eff") else {
            return Ok(None);
        };
        let mut spec = TrapSpec::new(omega)?;
        spec.u0 = self.get("U0");
        spec.r0 = self.get("r0");
        Ok(Some(spec))
    }
}
