//! Device parameters consumed by the cost model.
//!
//! Lengths and widths are in micrometres, areas in mm^2, powers in mW,
//! losses in dB, delays in ps and frequencies in GHz.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GF_PRESET: &str = include_str!("../presets/gf.toml");
const CUSTOM_PRESET: &str = include_str!("../presets/custom.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseShifterSpec {
    pub length: f64,
    pub width: f64,
    pub insertion_loss: f64,
    /// Static (holding) power per phase shifter.
    #[serde(default)]
    pub static_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplerSpec {
    pub ports: usize,
    pub length: f64,
    pub insertion_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingSpec {
    pub length: f64,
    pub width: f64,
    pub insertion_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YBranchSpec {
    pub length: f64,
    #[serde(default)]
    pub insertion_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spacing {
    /// Longitudinal gap between stages.
    pub dl: f64,
    /// Lateral waveguide pitch.
    pub dw: f64,
    pub dl_cr: f64,
    pub dw_cr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Electrical {
    pub a_tia: f64,
    pub a_pd: f64,
    pub a_mzm: f64,
    pub a_dac: f64,
    pub a_adc: f64,
    pub p_mzm: f64,
    pub p_tia: f64,
    pub p_pd: f64,
    /// DAC power at `f_s` and `b0` bits.
    pub p_dac0: f64,
    /// ADC power at `f_s` and `b0` bits.
    pub p_adc0: f64,
    pub b0: u32,
    pub f_s: f64,
    pub tau_dac: f64,
    pub tau_pd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optics {
    /// Laser wall-plug efficiency in (0, 1].
    pub eta: f64,
    /// Photodetector sensitivity in dBm.
    pub s_pd: f64,
    pub n_g: f64,
    /// Speed of light in um/ps.
    #[serde(default = "default_c0")]
    pub c0: f64,
}

fn default_c0() -> f64 {
    299.792458
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    /// Clock in GHz.
    pub f: f64,
    /// Converter resolution in bits.
    pub b: u32,
}

impl Default for SystemSpec {
    fn default() -> Self {
        Self { f: 10.0, b: 4 }
    }
}

/// A process design kit: geometry, losses and electrical parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pdk {
    #[serde(default)]
    pub name: String,
    pub ps: PhaseShifterSpec,
    #[serde(rename = "dc")]
    couplers: Vec<CouplerSpec>,
    pub cr: CrossingSpec,
    pub ybranch: YBranchSpec,
    pub spacing: Spacing,
    pub electrical: Electrical,
    pub optics: Optics,
    #[serde(default)]
    pub system: SystemSpec,
}

impl Pdk {
    pub fn preset(name: &str) -> Result<Pdk> {
        let text = match name {
            "gf" => GF_PRESET,
            "custom" => CUSTOM_PRESET,
            other => {
                return Err(Error::Config(format!(
                    "unknown PDK preset `{other}` (expected `gf` or `custom`)"
                )))
            }
        };
        Self::from_toml_str(text)
    }

    pub fn gf() -> Pdk {
        Self::preset("gf").expect("shipped preset parses")
    }

    pub fn custom() -> Pdk {
        Self::preset("custom").expect("shipped preset parses")
    }

    pub fn from_toml_str(text: &str) -> Result<Pdk> {
        let pdk: Pdk = toml::from_str(text).map_err(|e| Error::Config(format!("PDK: {e}")))?;
        pdk.validate()?;
        Ok(pdk)
    }

    pub fn from_json_str(text: &str) -> Result<Pdk> {
        let pdk: Pdk =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("PDK: {e}")))?;
        pdk.validate()?;
        Ok(pdk)
    }

    /// Load from a `.toml` or `.json` file; other extensions are tried as
    /// TOML first, then JSON.
    pub fn load(path: &Path) -> Result<Pdk> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read PDK {}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            Some("toml") => Self::from_toml_str(&text),
            _ => Self::from_toml_str(&text).or_else(|_| Self::from_json_str(&text)),
        }
    }

    /// Resolve a CLI argument: a preset name or a file path.
    pub fn resolve(arg: &str) -> Result<Pdk> {
        match arg {
            "gf" | "custom" => Self::preset(arg),
            path => Self::load(Path::new(path)),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("PDK serializes")
    }

    pub fn coupler(&self, ports: usize) -> Option<&CouplerSpec> {
        self.couplers.iter().find(|c| c.ports == ports)
    }

    pub fn coupler_map(&self) -> BTreeMap<usize, &CouplerSpec> {
        self.couplers.iter().map(|c| (c.ports, c)).collect()
    }

    /// Multi-port coupler sizes available in this kit.
    pub fn port_counts(&self) -> Vec<usize> {
        self.coupler_map().keys().copied().collect()
    }

    /// Whether a partition entry may appear in a coupler layer.
    pub fn supports_ports(&self, ports: usize) -> bool {
        ports == 1 || self.coupler(ports).is_some()
    }

    pub fn set_coupler(&mut self, spec: CouplerSpec) {
        self.couplers.retain(|c| c.ports != spec.ports);
        self.couplers.push(spec);
        self.couplers.sort_by_key(|c| c.ports);
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("ps.length", self.ps.length),
            ("ps.width", self.ps.width),
            ("cr.length", self.cr.length),
            ("cr.width", self.cr.width),
            ("ybranch.length", self.ybranch.length),
            ("spacing.dl", self.spacing.dl),
            ("spacing.dw", self.spacing.dw),
            ("spacing.dl_cr", self.spacing.dl_cr),
            ("spacing.dw_cr", self.spacing.dw_cr),
            ("electrical.f_s", self.electrical.f_s),
            ("system.f", self.system.f),
        ];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidPdk(format!("{field} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("ps.insertion_loss", self.ps.insertion_loss),
            ("ps.static_power", self.ps.static_power),
            ("cr.insertion_loss", self.cr.insertion_loss),
            ("ybranch.insertion_loss", self.ybranch.insertion_loss),
            ("electrical.a_tia", self.electrical.a_tia),
            ("electrical.a_pd", self.electrical.a_pd),
            ("electrical.a_mzm", self.electrical.a_mzm),
            ("electrical.a_dac", self.electrical.a_dac),
            ("electrical.a_adc", self.electrical.a_adc),
            ("electrical.p_mzm", self.electrical.p_mzm),
            ("electrical.p_tia", self.electrical.p_tia),
            ("electrical.p_pd", self.electrical.p_pd),
            ("electrical.p_dac0", self.electrical.p_dac0),
            ("electrical.p_adc0", self.electrical.p_adc0),
            ("electrical.tau_dac", self.electrical.tau_dac),
            ("electrical.tau_pd", self.electrical.tau_pd),
            ("optics.n_g", self.optics.n_g),
        ];
        for (field, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidPdk(format!(
                    "{field} must be non-negative, got {v}"
                )));
            }
        }
        if !(self.optics.eta > 0.0 && self.optics.eta <= 1.0) {
            return Err(Error::InvalidPdk(format!(
                "optics.eta must lie in (0, 1], got {}",
                self.optics.eta
            )));
        }
        if !(self.optics.c0 > 0.0) {
            return Err(Error::InvalidPdk("optics.c0 must be positive".into()));
        }
        if self.electrical.b0 == 0 || self.system.b == 0 {
            return Err(Error::InvalidPdk("bit widths must be at least 1".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.couplers {
            if c.ports < 2 {
                return Err(Error::InvalidPdk(format!(
                    "coupler entries need at least 2 ports, got {}",
                    c.ports
                )));
            }
            if !seen.insert(c.ports) {
                return Err(Error::InvalidPdk(format!("duplicate {}-port coupler", c.ports)));
            }
            if !(c.length > 0.0) || !(c.insertion_loss >= 0.0) {
                return Err(Error::InvalidPdk(format!(
                    "{}-port coupler has invalid length or loss",
                    c.ports
                )));
            }
        }
        Ok(())
    }
}
