//! Frequency literals and grid specifications.
//!
//! A frequency is a number in rad/s, optionally suffixed with `rad/s`, or a
//! number suffixed with `hz` (case-insensitive), which is multiplied by `2π`.

use std::f64::consts::TAU;

use optomech_core::table::{geomspace, linspace};

use crate::error::{Error, Result};

/// Parses a frequency literal into rad/s.
pub fn parse_frequency(text: &str) -> Result<f64> {
    let t = text.trim();
    let lower = t.to_ascii_lowercase();
    let (num, scale) = if let Some(n) = lower.strip_suffix("rad/s") {
        (n, 1.0)
    } else if let Some(n) = lower.strip_suffix("hz") {
        (n, TAU)
    } else {
        (lower.as_str(), 1.0)
    };
    let v: f64 = num.trim().parse().map_err(|_| Error::config(format!("invalid frequency `{t}`")))?;
    if !v.is_finite() {
        return Err(Error::config(format!("frequency `{t}` is not finite")));
    }
    Ok(v * scale)
}

/// Spacing of a [`GridSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// `min:max:n[:log]` with frequency literals for the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::config(format!("invalid grid `{text}` (expected min:max:n[:log|:lin])"));
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let min = parse_frequency(parts[0])?;
        let max = parse_frequency(parts[1])?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let spacing = match parts.get(3).map(|s| s.trim().to_ascii_lowercase()) {
            None => Spacing::Linear,
            Some(s) if s == "lin" => Spacing::Linear,
            Some(s) if s == "log" => Spacing::Log,
            Some(_) => return Err(bad()),
        };
        let g = Self { min, max, n, spacing };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config(format!("grid needs n ≥ 2, got {}", self.n)));
        }
        if self.min >= self.max {
            return Err(Error::config(format!("grid needs min < max, got {:e} ≥ {:e}", self.min, self.max)));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::config("log grid needs a positive minimum"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => linspace(self.min, self.max, self.n),
            Spacing::Log => geomspace(self.min, self.max, self.n),
        }
    }
}

impl std::str::FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_suffixes() {
        assert_eq!(parse_frequency("5e7").unwrap(), 5e7);
        assert_eq!(parse_frequency("5e7 rad/s").unwrap(), 5e7);
        assert!((parse_frequency("1e7Hz").unwrap() - TAU * 1e7).abs() < 1e-6);
        assert!(parse_frequency("fast").is_err());
        assert!(parse_frequency("inf").is_err());
    }

    #[test]
    fn grids() {
        let g = GridSpec::parse("0:2e7hz:5").unwrap();
        assert_eq!(g.points().len(), 5);
        assert!((g.points()[4] - TAU * 2e7).abs() < 1e-6);
        let g = GridSpec::parse("1e6:1e9:4:log").unwrap();
        assert!((g.points()[1] - 1e7).abs() < 1e-6);
        assert!(GridSpec::parse("1:0:5").is_err());
        assert!(GridSpec::parse("0:1:1").is_err());
        assert!(GridSpec::parse("0:1:5:log").is_err());
        assert!(GridSpec::parse("0:1").is_err());
    }
}
