//! Linearisation about the driven steady state: self-consistent detuning,
//! intracavity amplitude, effective coupling, drift and diffusion matrices,
//! Routh–Hurwitz stability and the characteristic polynomial `d(ν)`.
//!
//! The state vector is `w = (q̂, p̂, X, Y)` with `q̂ = sqrt(mΩ/ħ)(q − ⟨q⟩)`,
//! `p̂ = p/sqrt(mħΩ)` and `X`, `Y` the cavity quadratures measured relative to
//! the phase of the mean field `ζ`.
//!
//! # Diffusion matrix
//!
//! With `dw = A w dt − dQ`, the symmetrised noise increments are
//! `½⟨{dQ_i, dQ_j}⟩ = D_ij dt`. For a flat occupation `N` the thermal
//! quadratures `dQ₁ = c(τ dB† + τ̄ dB)`, `dQ₂ = ic(dB† − dB)`, `c² = γ_mΩ/(2ω)`,
//! together with `⟨dB dB†⟩ = (N+1)dt`, `⟨dB† dB⟩ = N dt` give
//! `D₁₁ = D₂₂ = γ_mΩ(2N+1)/(2ω)` and `D₁₂ = −γ_m²(2N+1)/(4ω)`
//! (using `τ̄ − τ = iγ_m/Ω`). The vacuum optical input gives `D₃₃ = D₄₄ = γ_c/2`
//! and the two inputs are uncorrelated.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bath_spectrum::OccupationSpectrum;
use crate::numerics::eigen::eigenvalues_real;
use crate::numerics::{lyapunov_steady, solve_real_cubic, LyapunovProblem, Mat};
use crate::params::{MechanicalParams, SystemParams, HBAR};
use crate::{CoreError, Result};
#[allow(unused_imports)] // only unused when a dependency links std
use num_traits::Float;

/// A real solution of the detuning cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningRoot {
    pub detuning: f64,
    /// The root reached continuously from `Δ = Δ₀` as the drive is ramped up from zero.
    pub primary: bool,
}

/// Real roots (ascending) of `mΩ²(Δ − Δ₀)(γ_c²/4 + Δ²) + ħg₀²E² = 0`.
pub fn self_consistent_detuning(params: &SystemParams, delta0: f64) -> Vec<DetuningRoot> {
    let m = params.mech.mass();
    let om = params.mech.bare_frequency();
    let gc = params.cavity.decay;
    let g0 = params.cavity.g0();
    let e = params.drive_amplitude();
    let k = HBAR * g0 * g0 * e * e / (m * om * om);
    detuning_roots(delta0, 0.25 * gc * gc, k)
}

/// Roots of `(Δ − Δ₀)(q + Δ²) + k = 0` with `k ≥ 0`, flagged as in
/// [`self_consistent_detuning`].
pub fn detuning_roots(delta0: f64, q: f64, k: f64) -> Vec<DetuningRoot> {
    let f = |d: f64| (d - delta0) * (q + d * d) + k;
    let df = |d: f64| (q + d * d) + 2.0 * d * (d - delta0);
    let mut roots = solve_real_cubic(-delta0, q, k - delta0 * q);
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let (fx, dfx) = (f(*r), df(*r));
            if fx == 0.0 || dfx == 0.0 {
                break;
            }
            let cand = *r - fx / dfx;
            if !(f(cand).abs() < fx.abs()) {
                break;
            }
            *r = cand;
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()));
    // h(Δ) = (Δ₀ − Δ)(q + Δ²) has a local maximum at Δ_a when Δ₀² > 3q; the
    // branch starting at Δ₀ survives while k ≤ h(Δ_a).
    let disc = delta0 * delta0 - 3.0 * q;
    let branch_alive = if delta0 > 0.0 && disc > 0.0 {
        let da = (delta0 + disc.sqrt()) / 3.0;
        k <= (delta0 - da) * (q + da * da)
    } else {
        true
    };
    let n = roots.len();
    roots.into_iter().enumerate().map(|(i, detuning)| DetuningRoot { detuning, primary: branch_alive && i + 1 == n }).collect()
}

/// Which Routh–Hurwitz inequality applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityCriterion {
    /// `Δ > 0`: `G²ωΔ < Ω²(γ_c²/4 + Δ²)`
    RedDetuned,
    /// `Δ < 0`: the second inequality
    BlueDetuned,
    /// `Δ = 0`: always stable
    Resonant,
}

/// Routh–Hurwitz verdict with both sides of the inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    pub criterion: StabilityCriterion,
    pub lhs: f64,
    pub rhs: f64,
}

impl StabilityReport {
    /// `lhs / rhs`; stable iff below one.
    pub fn margin(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Routh–Hurwitz stability of the linearised dynamics.
pub fn stability(mech: &MechanicalParams, gamma_c: f64, delta: f64, coupling: f64) -> StabilityReport {
    let om2 = mech.bare_frequency() * mech.bare_frequency();
    let w = mech.damped_frequency();
    let gm = mech.damping();
    let a = 0.25 * gamma_c * gamma_c + delta * delta;
    let lhs = coupling * coupling * w * delta.abs();
    if delta > 0.0 {
        let rhs = om2 * a;
        StabilityReport { stable: lhs < rhs, criterion: StabilityCriterion::RedDetuned, lhs, rhs }
    } else if delta < 0.0 {
        let s = gamma_c + gm;
        let rhs = gamma_c * gm / s * (gamma_c * om2 + gm * a + (om2 - a) * (om2 - a) / s);
        StabilityReport { stable: lhs < rhs, criterion: StabilityCriterion::BlueDetuned, lhs, rhs }
    } else {
        StabilityReport { stable: true, criterion: StabilityCriterion::Resonant, lhs: 0.0, rhs: f64::INFINITY }
    }
}

/// Linearisation data for one laser setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub mech: MechanicalParams,
    /// `γ_c`
    pub gamma_c: f64,
    /// Effective detuning `Δ`.
    pub detuning: f64,
    /// Mean intracavity amplitude `ζ` (square root of the photon number).
    pub cavity_amp: Complex64,
    /// Effective coupling `G`.
    pub coupling: f64,
    /// Static displacement `⟨q⟩`, m.
    pub mean_q_shift: f64,
    /// Drift matrix `A` acting on `(q̂, p̂, X, Y)`.
    pub dyn_matrix: [[f64; 4]; 4],
    pub stability: StabilityReport,
}

/// Operating point at effective detuning `Δ` for the drive in `params`.
pub fn operating_point(params: &SystemParams, delta: f64) -> OperatingPoint {
    let gc = params.cavity.decay;
    let e = params.drive_amplitude();
    let zeta = Complex64::new(0.0, -e) / Complex64::new(0.5 * gc, delta);
    OperatingPoint::assemble(params, delta, zeta)
}

impl OperatingPoint {
    /// Operating point with a prescribed coupling `G`; the intracavity
    /// amplitude is inferred from `G` and the cavity in `params`.
    pub fn from_coupling(params: &SystemParams, delta: f64, coupling: f64) -> Self {
        let gc = params.cavity.decay;
        let abs_zeta = coupling / (params.cavity.g0() * (2.0 * HBAR / (params.mech.mass() * params.mech.damped_frequency())).sqrt());
        let phase = Complex64::new(0.0, -1.0) * Complex64::new(0.5 * gc, -delta) / Complex64::new(0.5 * gc, delta).norm();
        Self::assemble(params, delta, phase * abs_zeta)
    }

    fn assemble(params: &SystemParams, delta: f64, zeta: Complex64) -> Self {
        let mech = params.mech;
        let gc = params.cavity.decay;
        let g0 = params.cavity.g0();
        let m = mech.mass();
        let w = mech.damped_frequency();
        let om = mech.bare_frequency();
        let coupling = g0 * zeta.norm() * (2.0 * HBAR / (m * w)).sqrt();
        let mean_q_shift = HBAR * g0 * zeta.norm_sqr() / (m * om * om);
        Self {
            mech,
            gamma_c: gc,
            detuning: delta,
            cavity_amp: zeta,
            coupling,
            mean_q_shift,
            dyn_matrix: drift_matrix(&mech, gc, delta, coupling),
            stability: stability(&mech, gc, delta, coupling),
        }
    }

    pub fn is_stable(&self) -> bool {
        self.stability.stable
    }

    /// `G²`
    pub fn coupling_sq(&self) -> f64 {
        self.coupling * self.coupling
    }

    pub fn char_poly(&self) -> CharPoly {
        char_poly(&self.mech, self.gamma_c, self.detuning, self.coupling)
    }

    /// Eigenvalues of the drift matrix.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        eigenvalues_real(&Mat::from_rows(self.dyn_matrix))
    }

    /// Diffusion matrix of `(q̂, p̂, X, Y)`; only defined for flat spectra.
    pub fn noise_matrix(&self, spec: &OccupationSpectrum) -> Result<[[f64; 4]; 4]> {
        let n = spec.as_flat().ok_or(CoreError::StructuredSpectrum)?;
        Ok(diffusion_matrix(&self.mech, self.gamma_c, n))
    }

    /// Stationary covariance of `(q̂, p̂, X, Y)` from the Lyapunov equation
    /// (flat spectra only).
    pub fn steady_covariance(&self, spec: &OccupationSpectrum) -> Result<[[f64; 4]; 4]> {
        let d = self.noise_matrix(spec)?;
        let sigma = lyapunov_steady(&LyapunovProblem { a: Mat::from_rows(self.dyn_matrix), d: Mat::from_rows(d) })?;
        Ok(sigma.to_array())
    }
}

/// Drift matrix `A` of `(q̂, p̂, X, Y)`.
pub fn drift_matrix(mech: &MechanicalParams, gamma_c: f64, delta: f64, coupling: f64) -> [[f64; 4]; 4] {
    let om = mech.bare_frequency();
    let x = coupling * (mech.damped_frequency() / om).sqrt();
    [[0.0, om, 0.0, 0.0], [-om, -mech.damping(), x, 0.0], [0.0, 0.0, -0.5 * gamma_c, delta], [x, 0.0, -delta, -0.5 * gamma_c]]
}

/// Diffusion matrix for a flat bath occupation `n` (see module docs).
pub fn diffusion_matrix(mech: &MechanicalParams, gamma_c: f64, n: f64) -> [[f64; 4]; 4] {
    let g = mech.damping();
    let w = mech.damped_frequency();
    let s = 2.0 * n + 1.0;
    let dqq = g * mech.bare_frequency() * s / (2.0 * w);
    let dqp = -g * g * s / (4.0 * w);
    let dc = 0.5 * gamma_c;
    [[dqq, dqp, 0.0, 0.0], [dqp, dqq, 0.0, 0.0], [0.0, 0.0, dc, 0.0], [0.0, 0.0, 0.0, dc]]
}

/// `d(ν) = ((ν + iγ_c/2)² − Δ²)((ν + iγ_m/2)² − ω²) − G²ωΔ = det(A + iν)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharPoly {
    pub gamma_m: f64,
    pub gamma_c: f64,
    pub bare_frequency: f64,
    pub damped_frequency: f64,
    pub detuning: f64,
    pub coupling: f64,
}

/// Characteristic polynomial of the drift matrix.
pub fn char_poly(mech: &MechanicalParams, gamma_c: f64, delta: f64, coupling: f64) -> CharPoly {
    CharPoly {
        gamma_m: mech.damping(),
        gamma_c,
        bare_frequency: mech.bare_frequency(),
        damped_frequency: mech.damped_frequency(),
        detuning: delta,
        coupling,
    }
}

impl CharPoly {
    /// `G²ωΔ`
    pub fn coupling_term(&self) -> f64 {
        self.coupling * self.coupling * self.damped_frequency * self.detuning
    }

    /// Evaluates `d(ν)` in factored form.
    pub fn eval(&self, nu: Complex64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        let hc = i * (0.5 * self.gamma_c);
        let cav = (nu - self.detuning + hc) * (nu + self.detuning + hc);
        let mech = (nu - self.bare_frequency) * (nu + self.bare_frequency) + i * self.gamma_m * nu;
        cav * mech - self.coupling_term()
    }

    /// `d(ν)` at real `ν`.
    pub fn eval_real(&self, nu: f64) -> Complex64 {
        self.eval(Complex64::new(nu, 0.0))
    }

    /// `|d(ν)|²` at real `ν`.
    pub fn norm_sqr(&self, nu: f64) -> f64 {
        self.eval_real(nu).norm_sqr()
    }

    /// Coefficients of `d` in ascending powers of `ν`.
    pub fn coefficients(&self) -> [Complex64; 5] {
        let om2 = self.bare_frequency * self.bare_frequency;
        let a = 0.25 * self.gamma_c * self.gamma_c + self.detuning * self.detuning;
        let (gc, gm) = (self.gamma_c, self.gamma_m);
        [
            Complex64::new(om2 * a - self.coupling_term(), 0.0),
            Complex64::new(0.0, -(gc * om2 + gm * a)),
            Complex64::new(-(om2 + a + gc * gm), 0.0),
            Complex64::new(0.0, gc + gm),
            Complex64::new(1.0, 0.0),
        ]
    }
}
