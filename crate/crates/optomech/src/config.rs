//! Parameter files: one `key = value` per line, `#` starts a comment.
//!
//! ```text
//! preset = P0              # optional starting point; later keys override it
//! mass_kg = 2.5e-10
//! omega_m_hz = 1e7         # `_hz` keys take Hz, other frequency keys rad/s
//! gamma_m = 628.3          # a value may also carry a `hz` or `rad/s` suffix
//! cavity_frequency = 1.77e15
//! gamma_c = 5e7
//! cavity_length_m = 5e-4
//! laser_frequency = 1.77e15
//! laser_power_w = 0.05
//! temperature_k = 300      # or `beta = …` (1/J) or `zero_temp = true`
//! ```
//!
//! Without a preset every key except the thermal one is required.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use optomech_core::params::{CavityParams, LaserDrive, MechanicalParams, SystemParams, ThermalEnv};

use crate::csv::fmt_e;
use crate::error::{Error, Result};
use crate::units::parse_frequency;

const FREQUENCY_KEYS: [&str; 5] = ["omega_m", "gamma_m", "cavity_frequency", "gamma_c", "laser_frequency"];
const PLAIN_KEYS: [&str; 3] = ["mass_kg", "cavity_length_m", "laser_power_w"];
const THERMAL_KEYS: [&str; 3] = ["temperature_k", "beta", "zero_temp"];

/// Named parameter sets.
pub fn preset(name: &str) -> Result<SystemParams> {
    match name.trim().to_ascii_uppercase().as_str() {
        "P0" => Ok(SystemParams::preset_p0()),
        other => Err(Error::config(format!("unknown preset `{other}` (available: P0)"))),
    }
}

/// Reads and parses a parameter file.
pub fn load_params(path: &Path) -> Result<SystemParams> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_params(&text).map_err(|e| match e {
        Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses parameter-file text.
pub fn parse_params(text: &str) -> Result<SystemParams> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut base = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::config(format!("line {lineno}: expected `key = value`")))?;
        let (key, value) = (key.trim().to_ascii_lowercase(), value.trim().to_string());
        if key == "preset" {
            base = Some(preset(&value)?);
            continue;
        }
        let canonical = canonical_key(&key).ok_or_else(|| Error::config(format!("line {lineno}: unknown key `{key}`")))?;
        if let Some((first, _)) = entries.get(canonical) {
            return Err(Error::config(format!("line {lineno}: `{canonical}` already set on line {first}")));
        }
        entries.insert(canonical.to_string(), (lineno, format!("{key}={value}")));
    }
    build(base, &entries)
}

fn canonical_key(key: &str) -> Option<&'static str> {
    let stem = key.strip_suffix("_hz").unwrap_or(key);
    FREQUENCY_KEYS.iter().find(|k| **k == stem).or_else(|| PLAIN_KEYS.iter().chain(THERMAL_KEYS.iter()).find(|k| **k == key)).copied()
}

fn value_of(entries: &BTreeMap<String, (usize, String)>, key: &str) -> Result<Option<f64>> {
    let Some((lineno, kv)) = entries.get(key) else { return Ok(None) };
    let (k, v) = kv.split_once('=').expect("stored as key=value");
    let err = |e: Error| match e {
        Error::Config(msg) => Error::config(format!("line {lineno}: {msg}")),
        other => other,
    };
    if FREQUENCY_KEYS.contains(&key) {
        if k.ends_with("_hz") {
            let hz: f64 = v.parse().map_err(|_| Error::config(format!("line {lineno}: invalid number `{v}`")))?;
            return Ok(Some(hz * TAU));
        }
        return parse_frequency(v).map(Some).map_err(err);
    }
    if key == "zero_temp" {
        return match v.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => Ok(Some(1.0)),
            "false" | "no" | "0" => Ok(Some(0.0)),
            _ => Err(Error::config(format!("line {lineno}: zero_temp expects true or false"))),
        };
    }
    v.parse().map(Some).map_err(|_| Error::config(format!("line {lineno}: invalid number `{v}`")))
}

fn build(base: Option<SystemParams>, entries: &BTreeMap<String, (usize, String)>) -> Result<SystemParams> {
    let get = |key: &str, fallback: Option<f64>| -> Result<f64> {
        value_of(entries, key)?.or(fallback).ok_or_else(|| Error::config(format!("missing key `{key}` (no preset given)")))
    };
    let b = base.as_ref();
    let mass = get("mass_kg", b.map(|p| p.mech.mass()))?;
    let omega_m = get("omega_m", b.map(|p| p.mech.bare_frequency()))?;
    let gamma_m = get("gamma_m", b.map(|p| p.mech.damping()))?;
    let cavity_frequency = get("cavity_frequency", b.map(|p| p.cavity.resonance))?;
    let gamma_c = get("gamma_c", b.map(|p| p.cavity.decay))?;
    let length = get("cavity_length_m", b.map(|p| p.cavity.length))?;
    let laser_frequency = get("laser_frequency", b.map(|p| p.laser.frequency))?;
    let power = get("laser_power_w", b.map(|p| p.laser.power))?;

    let thermal_given: Vec<&str> = THERMAL_KEYS.iter().copied().filter(|k| entries.contains_key(*k)).collect();
    let thermal = match thermal_given.as_slice() {
        [] => b.map(|p| p.thermal).unwrap_or(ThermalEnv::ZeroTemperature),
        ["temperature_k"] => ThermalEnv::from_temperature(get("temperature_k", None)?).map_err(invalid)?,
        ["beta"] => ThermalEnv::from_beta(get("beta", None)?).map_err(invalid)?,
        ["zero_temp"] => {
            if get("zero_temp", None)? == 1.0 {
                ThermalEnv::ZeroTemperature
            } else {
                return Err(Error::config("zero_temp = false needs temperature_k or beta instead"));
            }
        }
        many => return Err(Error::config(format!("conflicting thermal keys: {}", many.join(", ")))),
    };
    Ok(SystemParams::new(
        MechanicalParams::new(mass, omega_m, gamma_m).map_err(invalid)?,
        CavityParams::new(cavity_frequency, gamma_c, length).map_err(invalid)?,
        LaserDrive::new(laser_frequency, power).map_err(invalid)?,
        thermal,
    ))
}

fn invalid(e: optomech_core::CoreError) -> Error {
    Error::config(e.to_string())
}

/// One-line `key=value` rendering of a parameter set, used as the
/// `# params:` header of every output file.
pub fn params_echo(p: &SystemParams) -> String {
    let thermal = match p.thermal {
        ThermalEnv::Beta(b) => format!("beta={}", fmt_e(b)),
        ThermalEnv::ZeroTemperature => "zero_temp=true".to_string(),
    };
    format!(
        "mass_kg={} omega_m={} gamma_m={} cavity_frequency={} gamma_c={} cavity_length_m={} laser_frequency={} laser_power_w={} {}",
        fmt_e(p.mech.mass()),
        fmt_e(p.mech.bare_frequency()),
        fmt_e(p.mech.damping()),
        fmt_e(p.cavity.resonance),
        fmt_e(p.cavity.decay),
        fmt_e(p.cavity.length),
        fmt_e(p.laser.frequency),
        fmt_e(p.laser.power),
        thermal
    )
}
