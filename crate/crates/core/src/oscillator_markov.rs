//! Markovian master equation of the isolated damped oscillator: diffusion
//! coefficients, the Lindblad positivity margin and equilibrium moments.
//!
//! Diffusion coefficients are stored divided by `ħ`: `ħ·D_qq` is in m²/s,
//! `ħ·D_pp` in kg²·m²/s³ and `ħ·D_qp` in kg·m²/s². Hence `D_qq` is in 1/kg,
//! `D_pp` in kg/s² and `D_qp` in 1/s.

use crate::params::{MechanicalParams, HBAR};
use crate::{CoreError, Result};

/// Position, momentum and cross diffusion coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionCoefficients {
    pub d_qq: f64,
    pub d_pp: f64,
    pub d_qp: f64,
    /// `γ_m` the coefficients were built with.
    pub damping: f64,
}

impl DiffusionCoefficients {
    /// `D_qq D_pp − D_qp² − (γ_m/2)²`; nonnegative iff the generator is of Lindblad form.
    pub fn lindblad_slack(&self) -> f64 {
        let h = 0.5 * self.damping;
        self.d_qq * self.d_pp - self.d_qp * self.d_qp - h * h
    }
}

/// Second moments of the oscillator in equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumMoments {
    /// `⟨q²⟩ − ⟨q⟩²`, m²
    pub q2: f64,
    /// `⟨p²⟩ − ⟨p⟩²`, kg²·m²/s²
    pub p2: f64,
    /// `⟨{q,p}⟩/2 − ⟨q⟩⟨p⟩`, J·s
    pub qp_sym: f64,
    /// `⟨q⟩`, m
    pub mean_q: f64,
    /// `⟨p⟩`, kg·m/s
    pub mean_p: f64,
}

impl EquilibriumMoments {
    /// `q2·p2 − qp_sym²`, bounded below by `ħ²/4`.
    pub fn uncertainty_product(&self) -> f64 {
        self.q2 * self.p2 - self.qp_sym * self.qp_sym
    }
}

fn check_occupation(n: f64) -> Result<()> {
    if n.is_finite() && n >= 0.0 {
        Ok(())
    } else {
        Err(CoreError::Domain("occupation number must be finite and nonnegative"))
    }
}

/// Diffusion coefficients for bath occupation `n`.
pub fn diffusion_coefficients(mech: &MechanicalParams, n: f64) -> Result<DiffusionCoefficients> {
    check_occupation(n)?;
    let g = mech.damping();
    let w = mech.damped_frequency();
    let m = mech.mass();
    let om = mech.bare_frequency();
    let s = 2.0 * n + 1.0;
    Ok(DiffusionCoefficients {
        d_qq: g * s / (2.0 * m * w),
        d_pp: g * m * om * om * s / (2.0 * w),
        d_qp: g * g * s / (4.0 * w),
        damping: g,
    })
}

/// Closed form of the Lindblad slack, `(γ_m²/4)((2N+1)² − 1) = γ_m² N(N+1)`.
pub fn lindblad_slack_closed_form(mech: &MechanicalParams, n: f64) -> f64 {
    let g = mech.damping();
    g * g * n * (n + 1.0)
}

/// Equilibrium moments of the isolated oscillator with bath occupation `n`.
pub fn equilibrium_moments(mech: &MechanicalParams, n: f64) -> Result<EquilibriumMoments> {
    check_occupation(n)?;
    let g = mech.damping();
    let w = mech.damped_frequency();
    let m = mech.mass();
    let om = mech.bare_frequency();
    let s = 2.0 * n + 1.0;
    Ok(EquilibriumMoments {
        q2: HBAR * s / (2.0 * m * w),
        p2: m * HBAR * om * om * s / (2.0 * w),
        qp_sym: -HBAR * g * s / (4.0 * w),
        mean_q: 0.0,
        mean_p: 0.0,
    })
}

/// Mean of `H_m = p²/(2m) + mΩ²q²/2 + (γ_m/4){q,p}` in equilibrium, J.
pub fn mean_mechanical_energy_eq(mech: &MechanicalParams, n: f64) -> Result<f64> {
    let mo = equilibrium_moments(mech, n)?;
    let m = mech.mass();
    let om = mech.bare_frequency();
    Ok(mo.p2 / (2.0 * m) + 0.5 * m * om * om * mo.q2 + 0.5 * mech.damping() * mo.qp_sym)
}
