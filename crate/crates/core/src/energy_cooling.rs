//! Mean mechanical fluctuation energy `⟨H⟩ = ħω(N_rp + N_th + M_th)`, its
//! closed residue forms, the cooling factor `𝒞` and cooling maps.

use alloc::vec::Vec;

use crate::bath_spectrum::{effective_occupation, OccupationSpectrum};
use crate::fluctuation_spectra::{default_moment_config, spectral_mean, Spectra};
use crate::numerics::QuadratureConfig;
use crate::optomech_linear::{operating_point, OperatingPoint};
use crate::params::{SystemParams, HBAR};
use crate::pole_analysis::{poles_approximate, poles_numeric, PoleMethod, PoleSet};
use crate::Result;

/// How an [`EnergyBreakdown`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMethod {
    Quadrature,
    Residue,
}

/// Decomposition of the mean fluctuation energy in units of `ħω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub n_rp: f64,
    pub n_th: f64,
    pub m_th: f64,
    /// `𝒬`, when the mechanical damping `Γ_m` is known.
    pub q_factor: Option<f64>,
    /// `𝒦`, when the mechanical damping `Γ_m` is known.
    pub k_factor: Option<f64>,
    /// `𝒞 = (N_th + M_th)/(N_eff + ½)`
    pub cooling_factor: f64,
    /// `ħω(N_rp + N_th + M_th)`, J
    pub fluct_energy: f64,
    pub method: EnergyMethod,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.n_rp + self.n_th + self.m_th
    }
}

/// Energy breakdown by quadrature over the spectra; any occupation spectrum.
pub fn energy_quadrature(op: &OperatingPoint, spec: &OccupationSpectrum) -> Result<EnergyBreakdown> {
    energy_quadrature_with(op, spec, &default_moment_config())
}

/// [`energy_quadrature`] with explicit quadrature settings.
pub fn energy_quadrature_with(op: &OperatingPoint, spec: &OccupationSpectrum, cfg: &QuadratureConfig) -> Result<EnergyBreakdown> {
    let s = Spectra::new(op, spec);
    let cp = *s.char_poly();
    let (om, w) = (cp.bare_frequency, cp.damped_frequency);
    let (gm, gc, dl) = (cp.gamma_m, cp.gamma_c, cp.detuning);
    let g2 = op.coupling_sq();
    let a = dl * dl + 0.25 * gc * gc;

    let n_rp = spectral_mean(op, spec, |nu| (om * om + nu * nu) / (2.0 * w * om) * s.sq_rp(nu), cfg)?;
    let n_th = spectral_mean(op, spec, |nu| w / om * s.sq_th(nu), cfg)?;
    let m_th = if g2 * dl == 0.0 {
        0.0
    } else {
        let half = 0.5 * g2 * dl;
        let f = |nu: f64| {
            let plus = (half - 0.5 * nu * gc * gm + (w + nu) * (nu * nu - a)) * s.sym_occupation(nu);
            let minus = (half + 0.5 * nu * gc * gm + (w - nu) * (nu * nu - a)) * s.sym_occupation(-nu);
            g2 * gm * dl / (2.0 * cp.norm_sqr(nu)) * (plus + minus)
        };
        spectral_mean(op, spec, f, cfg)?
    };
    let n_eff = match spec.as_flat() {
        Some(n) => n,
        None => effective_occupation(&op.mech, spec)?,
    };
    let (q_factor, k_factor) = match poles_numeric(&cp) {
        Ok(p) => {
            let scale = p.gamma_m / (gm * (n_eff + 0.5));
            (Some(n_th * scale), Some(m_th * scale))
        }
        Err(_) => (None, None),
    };
    Ok(EnergyBreakdown {
        n_rp,
        n_th,
        m_th,
        q_factor,
        k_factor,
        cooling_factor: (n_th + m_th) / (n_eff + 0.5),
        fluct_energy: HBAR * w * (n_rp + n_th + m_th),
        method: EnergyMethod::Quadrature,
    })
}

/// `(1/2π)∫ n(ν²)/|d(ν)|² dν` for `n(x) = n₀ + n₁x + n₂x² + n₃x³`, evaluated in
/// closed form from the poles.
///
/// With `d = p_m p_c`, `p_x = ν² + iΓ_xν − M_x` and `M_x = |ν_x|²`, the integrand is
/// `n(x)/(q_m(x) q_c(x))` in `x = ν²` with `q_x = |p_x|²`. Splitting it into
/// partial fractions `(α_m x + β_m)/q_m + (α_c x + β_c)/q_c` and using
/// `(1/2π)∫dν/q_x = 1/(2Γ_x M_x)`, `(1/2π)∫ν²dν/q_x = 1/(2Γ_x)` gives
/// `[n₀(Γ_cΓ_m(Γ_c+Γ_m) + Γ_cM_c + Γ_mM_m)/(M_cM_m) + n₁(Γ_c+Γ_m)
///  + n₂(Γ_cM_m + Γ_mM_c) + n₃(Γ_cΓ_m(Γ_cM_m + Γ_mM_c) + Γ_cM_m² + Γ_mM_c²)] / (2Γ_cΓ_m D²)`
/// with `D² = (M_c − M_m)² + Γ_cΓ_m(M_c + M_m) + Γ_c²M_m + Γ_m²M_c`, which equals
/// `(Δ_eff² + ω_eff² + (Γ_m+Γ_c)²/4)² − 4ω_eff²Δ_eff²`.
pub fn residue_integral(poles: &PoleSet, n: [f64; 4]) -> f64 {
    let (gm, gc) = (poles.gamma_m, poles.gamma_c);
    let mm = poles.mech_pole().norm_sqr();
    let mc = poles.cavity_pole().norm_sqr();
    let d2 = (mc - mm) * (mc - mm) + gc * gm * (mc + mm) + gc * gc * mm + gm * gm * mc;
    let mixed = gc * mm + gm * mc;
    let num = n[0] * (gc * gm * (gc + gm) + gc * mc + gm * mm) / (mc * mm)
        + n[1] * (gc + gm)
        + n[2] * mixed
        + n[3] * (gc * gm * mixed + gc * mm * mm + gm * mc * mc);
    num / (2.0 * gc * gm * d2)
}

/// Energy breakdown from residue closed forms for a flat occupation `n_eff`,
/// using the supplied poles.
///
/// `N_th = (γ_m/Γ_m)𝒬(N_eff+½)` and `M_th = (γ_m/Γ_m)𝒦(N_eff+½)` with
/// `𝒬 = Γ_m (1/2π)∫(Ω²+ν²)|(ν+iγ_c/2)²−Δ²|²/|d|²`,
/// `𝒦 = Γ_m (G²Δ/2)(1/2π)∫(G²Δ − 2ω(Δ²+γ_c²/4) + 2ων²)/|d|²` and
/// `N_rp = (G²γ_c/4)(1/2π)∫(Ω²+ν²)(Δ²+γ_c²/4+ν²)/|d|²`, all through
/// [`residue_integral`].
pub fn energy_residue(op: &OperatingPoint, n_eff: f64, poles: &PoleSet) -> EnergyBreakdown {
    let cp = op.char_poly();
    let (om, w) = (cp.bare_frequency, cp.damped_frequency);
    let (gm, gc, dl) = (cp.gamma_m, cp.gamma_c, cp.detuning);
    let om2 = om * om;
    let g2 = op.coupling_sq();
    let a = dl * dl + 0.25 * gc * gc;
    let b = 0.25 * gc * gc - dl * dl;

    let q_factor = poles.gamma_m * residue_integral(poles, [om2 * a * a, a * a + 2.0 * om2 * b, om2 + 2.0 * b, 1.0]);
    let k_factor = if g2 * dl == 0.0 {
        0.0
    } else {
        poles.gamma_m * 0.5 * g2 * dl * residue_integral(poles, [g2 * dl - 2.0 * w * a, 2.0 * w, 0.0, 0.0])
    };
    let n_rp = 0.25 * g2 * gc * residue_integral(poles, [om2 * a, om2 + a, 1.0, 0.0]);
    let ratio = gm / poles.gamma_m;
    let n_th = ratio * q_factor * (n_eff + 0.5);
    let m_th = ratio * k_factor * (n_eff + 0.5);
    EnergyBreakdown {
        n_rp,
        n_th,
        m_th,
        q_factor: Some(q_factor),
        k_factor: Some(k_factor),
        cooling_factor: ratio * (q_factor + k_factor),
        fluct_energy: HBAR * w * (n_rp + n_th + m_th),
        method: EnergyMethod::Residue,
    }
}

/// `𝒞 = (γ_m/Γ_m)(𝒬 + 𝒦)` from the residue forms.
pub fn cooling_factor(op: &OperatingPoint, poles: &PoleSet) -> f64 {
    energy_residue(op, 0.0, poles).cooling_factor
}

/// Closed forms at `Δ = 0` for a flat occupation, in joules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantEnergy {
    /// `½mΩ²(⟨q²⟩ − ⟨q⟩²)`
    pub potential: f64,
    /// `⟨p²⟩/(2m)`
    pub kinetic: f64,
    /// `(γ_m/4)⟨{q,p}⟩`
    pub cross: f64,
    pub n_rp: f64,
    pub n_th: f64,
}

/// Energy terms at zero detuning; `op.detuning` is ignored.
pub fn resonant_energy(op: &OperatingPoint, n_eff: f64) -> ResonantEnergy {
    let gm = op.mech.damping();
    let gc = op.gamma_c;
    let om = op.mech.bare_frequency();
    let w = op.mech.damped_frequency();
    let g2 = op.coupling_sq();
    let lor = 0.25 * (gm + gc) * (gm + gc) + w * w;
    let th = HBAR * om * om * (2.0 * n_eff + 1.0) / (4.0 * w);
    ResonantEnergy {
        potential: th + HBAR * w * g2 * (2.0 * gm + gc) / (8.0 * gm * lor),
        kinetic: th + HBAR * w * g2 * gc / (8.0 * gm * lor),
        cross: -HBAR * gm * gm * (2.0 * n_eff + 1.0) / (8.0 * w),
        n_rp: g2 * (gm + gc) / (4.0 * gm * lor),
        n_th: n_eff + 0.5,
    }
}

/// One point of a cooling map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingMapRow {
    pub delta: f64,
    pub gamma_c: f64,
    pub cooling_factor: f64,
    pub n_rp: f64,
    pub n_th: f64,
    pub m_th: f64,
    pub stable: bool,
    /// `None` when no pole method succeeded or the point is unstable.
    pub pole_method: Option<PoleMethod>,
}

/// Residue breakdown at one `(Δ, γ_c)`, with approximate poles where they are
/// valid and numeric poles otherwise. Failures become NaN rows.
pub fn cooling_map_point(params: &SystemParams, n_eff: f64, delta: f64, gamma_c: f64) -> CoolingMapRow {
    let nan_row = |stable| CoolingMapRow {
        delta,
        gamma_c,
        cooling_factor: f64::NAN,
        n_rp: f64::NAN,
        n_th: f64::NAN,
        m_th: f64::NAN,
        stable,
        pole_method: None,
    };
    let Ok(p) = params.with_cavity_decay(gamma_c) else { return nan_row(false) };
    let op = operating_point(&p, delta);
    if !op.is_stable() {
        return nan_row(false);
    }
    let poles = match poles_approximate(&op.mech, gamma_c, delta, op.coupling) {
        Ok(ap) => ap.poles,
        Err(_) => match poles_numeric(&op.char_poly()) {
            Ok(p) => p,
            Err(_) => return nan_row(true),
        },
    };
    let e = energy_residue(&op, n_eff, &poles);
    CoolingMapRow {
        delta,
        gamma_c,
        cooling_factor: e.cooling_factor,
        n_rp: e.n_rp,
        n_th: e.n_th,
        m_th: e.m_th,
        stable: true,
        pole_method: Some(poles.method),
    }
}

/// Cooling map over `Δ × γ_c`, rows ordered `Δ`-major.
pub fn cooling_map(params: &SystemParams, spec: &OccupationSpectrum, deltas: &[f64], gammas: &[f64]) -> Result<Vec<CoolingMapRow>> {
    let n_eff = match spec.as_flat() {
        Some(n) => n,
        None => effective_occupation(&params.mech, spec)?,
    };
    let mut rows = Vec::with_capacity(deltas.len() * gammas.len());
    for &d in deltas {
        for &g in gammas {
            rows.push(cooling_map_point(params, n_eff, d, g));
        }
    }
    Ok(rows)
}
