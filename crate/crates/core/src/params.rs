//! Physical inputs, constants and single-oscillator derived quantities.
//!
//! Every frequency is angular (rad/s). Conversions from Hz happen at the
//! file and command-line boundary, never here.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::{CoreError, Result};
#[allow(unused_imports)] // only unused when a dependency links std
use num_traits::Float;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const C_LIGHT: f64 = 2.997_924_58e8;

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CoreError::InvalidParameter { name, value, reason: "must be finite and positive" })
    }
}

fn nonnegative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(CoreError::InvalidParameter { name, value, reason: "must be finite and nonnegative" })
    }
}

/// `sqrt(Ω² − γ²/4)`, factored as `sqrt((Ω−γ/2)(Ω+γ/2))` to keep full precision.
pub fn damped_frequency(bare_frequency: f64, damping: f64) -> Result<f64> {
    let h = 0.5 * damping;
    if !(bare_frequency > h) {
        return Err(CoreError::Overdamped { omega_sq: bare_frequency * bare_frequency, quarter_gamma_sq: h * h });
    }
    Ok(((bare_frequency - h) * (bare_frequency + h)).sqrt())
}

/// Mass, bare angular frequency `Ω` and energy damping rate `γ_m` of the oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalParams {
    mass: f64,
    bare_frequency: f64,
    damping: f64,
    damped_frequency: f64,
}

/// Quantities fixed by [`MechanicalParams`] alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedMechanical {
    /// `ω = sqrt(Ω² − γ_m²/4)`
    pub damped_frequency: f64,
    /// `τ = ω/Ω − iγ_m/(2Ω)`, of unit modulus.
    pub tau: Complex64,
}

impl MechanicalParams {
    /// Zero damping is accepted (the isolated oscillator); anything that
    /// divides by `γ_m` downstream requires it to be positive.
    pub fn new(mass: f64, bare_frequency: f64, damping: f64) -> Result<Self> {
        positive("mass", mass)?;
        positive("bare_frequency", bare_frequency)?;
        nonnegative("damping", damping)?;
        let damped_frequency = damped_frequency(bare_frequency, damping)?;
        Ok(Self { mass, bare_frequency, damping, damped_frequency })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `Ω`
    pub fn bare_frequency(&self) -> f64 {
        self.bare_frequency
    }

    /// `γ_m`
    pub fn damping(&self) -> f64 {
        self.damping
    }

    /// `ω`
    pub fn damped_frequency(&self) -> f64 {
        self.damped_frequency
    }

    /// `Ω − ω = γ_m² / (4(Ω + ω))`, free of cancellation.
    pub fn frequency_pull(&self) -> f64 {
        self.damping * self.damping / (4.0 * (self.bare_frequency + self.damped_frequency))
    }

    pub fn tau(&self) -> Complex64 {
        mode_phase_tau(self)
    }

    pub fn derived(&self) -> DerivedMechanical {
        DerivedMechanical { damped_frequency: self.damped_frequency, tau: self.tau() }
    }
}

/// `τ = ω/Ω − iγ_m/(2Ω)`.
pub fn mode_phase_tau(mech: &MechanicalParams) -> Complex64 {
    Complex64::new(mech.damped_frequency / mech.bare_frequency, -0.5 * mech.damping / mech.bare_frequency)
}

/// Cavity resonance `ω_c`, energy decay rate `γ_c` and length `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    pub resonance: f64,
    pub decay: f64,
    pub length: f64,
}

impl CavityParams {
    pub fn new(resonance: f64, decay: f64, length: f64) -> Result<Self> {
        Ok(Self {
            resonance: positive("cavity_resonance", resonance)?,
            decay: positive("cavity_decay", decay)?,
            length: positive("cavity_length", length)?,
        })
    }

    /// Single-photon coupling `g₀ = ω_c / L` (rad/s per metre).
    pub fn g0(&self) -> f64 {
        self.resonance / self.length
    }

    pub fn with_decay(mut self, decay: f64) -> Result<Self> {
        self.decay = positive("cavity_decay", decay)?;
        Ok(self)
    }
}

/// Driving laser: angular frequency `ω₀` and power `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserDrive {
    pub frequency: f64,
    pub power: f64,
}

impl LaserDrive {
    pub fn new(frequency: f64, power: f64) -> Result<Self> {
        Ok(Self { frequency: positive("laser_frequency", frequency)?, power: nonnegative("laser_power", power)? })
    }

    /// Drive amplitude `E = sqrt(P γ_c / (ħ ω₀))`, in s⁻¹.
    pub fn amplitude(&self, cavity_decay: f64) -> f64 {
        (self.power * cavity_decay / (HBAR * self.frequency)).sqrt()
    }
}

/// Thermal state of the phonon bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermalEnv {
    /// Inverse temperature `β = 1/(k_B T)` in 1/J.
    Beta(f64),
    ZeroTemperature,
}

impl ThermalEnv {
    pub fn from_temperature(kelvin: f64) -> Result<Self> {
        if kelvin == 0.0 {
            return Ok(Self::ZeroTemperature);
        }
        Ok(Self::Beta(1.0 / (K_B * positive("temperature", kelvin)?)))
    }

    pub fn from_beta(beta: f64) -> Result<Self> {
        Ok(Self::Beta(positive("beta", beta)?))
    }

    /// Temperature in kelvin (0 for the zero-temperature variant).
    pub fn temperature(&self) -> f64 {
        match *self {
            Self::Beta(b) => 1.0 / (K_B * b),
            Self::ZeroTemperature => 0.0,
        }
    }

    /// `β`, or `None` at zero temperature.
    pub fn beta(&self) -> Option<f64> {
        match *self {
            Self::Beta(b) => Some(b),
            Self::ZeroTemperature => None,
        }
    }
}

/// Bose occupation `1/(e^{βħω} − 1)` for `ω > 0`.
pub fn planck_occupation(env: &ThermalEnv, omega: f64) -> f64 {
    match *env {
        ThermalEnv::ZeroTemperature => 0.0,
        ThermalEnv::Beta(beta) => 1.0 / (beta * HBAR * omega).exp_m1(),
    }
}

/// Complete parameter set of the driven optomechanical system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub mech: MechanicalParams,
    pub cavity: CavityParams,
    pub laser: LaserDrive,
    pub thermal: ThermalEnv,
}

impl SystemParams {
    pub fn new(mech: MechanicalParams, cavity: CavityParams, laser: LaserDrive, thermal: ThermalEnv) -> Self {
        Self { mech, cavity, laser, thermal }
    }

    /// Reference set: a 0.25 µg mirror at 10 MHz with Q = 10⁵ in a 0.5 mm
    /// cavity at 1064 nm driven with 50 mW, resonant laser (`ω₀ = ω_c`), 300 K
    /// bath and `γ_c = 5×10⁷ rad/s`. The cavity decay is usually overridden.
    pub fn preset_p0() -> Self {
        let mech = MechanicalParams::new(2.5e-10, 2.0 * PI * 1e7, 2.0 * PI * 1e2).expect("valid preset");
        let omega_c = 2.0 * PI * C_LIGHT / 1064e-9;
        let cavity = CavityParams::new(omega_c, 5e7, 5e-4).expect("valid preset");
        let laser = LaserDrive::new(omega_c, 5e-2).expect("valid preset");
        let thermal = ThermalEnv::from_temperature(300.0).expect("valid preset");
        Self { mech, cavity, laser, thermal }
    }

    pub fn with_cavity_decay(mut self, decay: f64) -> Result<Self> {
        self.cavity = self.cavity.with_decay(decay)?;
        Ok(self)
    }

    /// Bare detuning `Δ₀ = ω_c − ω₀`.
    pub fn bare_detuning(&self) -> f64 {
        self.cavity.resonance - self.laser.frequency
    }

    /// Drive amplitude `E` at the configured cavity decay.
    pub fn drive_amplitude(&self) -> f64 {
        self.laser.amplitude(self.cavity.decay)
    }

    /// Bath occupation at the damped frequency.
    pub fn thermal_occupation(&self) -> f64 {
        planck_occupation(&self.thermal, self.mech.damped_frequency())
    }
}
