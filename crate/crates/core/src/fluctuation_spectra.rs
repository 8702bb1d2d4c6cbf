//! Symmetrised fluctuation spectra of the mirror in the hatted variables,
//! their moment integrals and an independent transfer-function evaluation.
//!
//! All spectra are dimensionless and normalised so that
//! `⟨q̂²⟩ = (1/2π)∫S_q dν`; SI moments carry the prefactors of
//! [`moment_integrals`].

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::bath_spectrum::OccupationSpectrum;
use crate::numerics::{integrate_real_line, peak_breakpoints, roots_quartic, QuadratureConfig};
use crate::optomech_linear::{CharPoly, OperatingPoint};
use crate::oscillator_markov::EquilibriumMoments;
use crate::params::HBAR;
use crate::table::{linspace, SpectrumTable};
use crate::{CoreError, Result};
#[allow(unused_imports)] // only unused when a dependency links std
use num_traits::Float;

/// Evaluator for all spectra at one operating point.
#[derive(Debug, Clone, Copy)]
pub struct Spectra<'a> {
    op: &'a OperatingPoint,
    spec: &'a OccupationSpectrum,
    cp: CharPoly,
}

impl<'a> Spectra<'a> {
    pub fn new(op: &'a OperatingPoint, spec: &'a OccupationSpectrum) -> Self {
        Self { op, spec, cp: op.char_poly() }
    }

    pub fn operating_point(&self) -> &OperatingPoint {
        self.op
    }

    pub fn occupation(&self) -> &OccupationSpectrum {
        self.spec
    }

    pub fn char_poly(&self) -> &CharPoly {
        &self.cp
    }

    /// `N(ν) + ½`
    pub fn sym_occupation(&self, nu: f64) -> f64 {
        self.spec.eval(nu) + 0.5
    }

    /// `R̂(ν)/(ħm)`
    fn rhat_scaled(&self, nu: f64) -> f64 {
        let gm = self.cp.gamma_m;
        let w = self.cp.damped_frequency;
        let q = 0.25 * gm * gm;
        gm / (2.0 * w) * ((q + (w + nu) * (w + nu)) * self.sym_occupation(nu) + (q + (w - nu) * (w - nu)) * self.sym_occupation(-nu))
    }

    /// Radiation-pressure part of `S_q`.
    pub fn sq_rp(&self, nu: f64) -> f64 {
        let c = &self.cp;
        let d2 = c.norm_sqr(nu);
        let g2 = c.coupling * c.coupling;
        c.bare_frequency * c.damped_frequency * g2 * c.gamma_c * (c.detuning * c.detuning + 0.25 * c.gamma_c * c.gamma_c + nu * nu)
            / (2.0 * d2)
    }

    /// Thermal part of `S_q`.
    pub fn sq_th(&self, nu: f64) -> f64 {
        let c = &self.cp;
        let q = 0.25 * c.gamma_c * c.gamma_c;
        let lor = (q + (nu - c.detuning) * (nu - c.detuning)) * (q + (nu + c.detuning) * (nu + c.detuning));
        c.bare_frequency * self.rhat_scaled(nu) * lor / c.norm_sqr(nu)
    }

    pub fn sq_total(&self, nu: f64) -> f64 {
        self.sq_rp(nu) + self.sq_th(nu)
    }

    fn p_factor(&self, nu: f64) -> Complex64 {
        let c = &self.cp;
        let om2 = c.bare_frequency * c.bare_frequency;
        let cav = Complex64::new(c.detuning * c.detuning, 0.0) + Complex64::new(0.5 * c.gamma_c, -nu).powi(2);
        Complex64::new(om2 + nu * c.damped_frequency, -0.5 * nu * c.gamma_m) * cav - c.coupling_term()
    }

    /// Thermal part of `S_p`.
    pub fn sp_th(&self, nu: f64) -> f64 {
        let c = &self.cp;
        let pre = c.gamma_m / (2.0 * c.damped_frequency * c.bare_frequency * c.norm_sqr(nu));
        pre * (self.p_factor(nu).norm_sqr() * self.sym_occupation(nu) + self.p_factor(-nu).norm_sqr() * self.sym_occupation(-nu))
    }

    /// Thermal part of the symmetrised cross spectrum `S_qp`; the
    /// radiation-pressure part vanishes identically.
    pub fn sqp_th(&self, nu: f64) -> f64 {
        let c = &self.cp;
        let (gm, gc, dl, w) = (c.gamma_m, c.gamma_c, c.detuning, c.damped_frequency);
        let a = dl * dl + 0.25 * gc * gc;
        let plus = 0.5 * gm * (a - nu * nu) - nu * gc * (w + nu);
        let minus = 0.5 * gm * (a - nu * nu) + nu * gc * (w - nu);
        let g2 = c.coupling * c.coupling;
        -gm / (2.0 * c.bare_frequency) * self.sq_th(nu)
            + gm * g2 * dl / (2.0 * c.norm_sqr(nu)) * (self.sym_occupation(nu) * plus + self.sym_occupation(-nu) * minus)
    }

    /// `S_p^th − S_q^th` from its own closed form.
    pub fn sp_minus_sq(&self, nu: f64) -> f64 {
        let c = &self.cp;
        let (gm, gc, dl, w) = (c.gamma_m, c.gamma_c, c.detuning, c.damped_frequency);
        let om2 = c.bare_frequency * c.bare_frequency;
        let g2 = c.coupling * c.coupling;
        let a = dl * dl + 0.25 * gc * gc;
        let common = 0.5 * g2 * dl + nu * nu * gm * gc / (2.0 * w);
        let plus = common + (om2 / w + nu) * (nu * nu - a);
        let minus = common + (om2 / w - nu) * (nu * nu - a);
        w * gm * g2 * dl / (c.bare_frequency * c.norm_sqr(nu)) * (self.sym_occupation(nu) * plus + self.sym_occupation(-nu) * minus)
    }

    /// `S_p = (ν²/Ω²)S_q^rp + S_p^th`
    pub fn sp_total(&self, nu: f64) -> f64 {
        let om = self.cp.bare_frequency;
        nu * nu / (om * om) * self.sq_rp(nu) + self.sp_th(nu)
    }

    /// Spectra rebuilt from the transfer functions of the input noises.
    pub fn transfer(&self, nu: f64) -> TransferSpectra {
        let c = transfer_coefficients(self.op, nu);
        let n = [self.sym_occupation(nu), self.sym_occupation(-nu), 0.5, 0.5];
        let mut out = TransferSpectra::default();
        for k in 0..4 {
            out.sq_th += if k < 2 { c.q[k].norm_sqr() * n[k] } else { 0.0 };
            out.sq_rp += if k >= 2 { c.q[k].norm_sqr() * n[k] } else { 0.0 };
            out.sp += c.p[k].norm_sqr() * n[k];
            out.sqp += (c.q[k] * c.p[k].conj()).re * n[k];
        }
        out.sq = out.sq_th + out.sq_rp;
        out
    }
}

/// Spectra assembled from transfer coefficients.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TransferSpectra {
    pub sq: f64,
    pub sq_rp: f64,
    pub sq_th: f64,
    pub sp: f64,
    pub sqp: f64,
}

/// Coefficients of `q̂(ν)` and `p̂(ν)` on the input modes, ordered as
/// `B_th(ν)`, `B_th(−ν)†`, `B_em(ω₀−ν)†`, `B_em(ω₀+ν)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferCoefficients {
    pub q: [Complex64; 4],
    pub p: [Complex64; 4],
}

/// Transfer coefficients at frequency `ν`.
pub fn transfer_coefficients(op: &OperatingPoint, nu: f64) -> TransferCoefficients {
    let cp = op.char_poly();
    let i = Complex64::new(0.0, 1.0);
    let (gm, gc, dl) = (cp.gamma_m, cp.gamma_c, cp.detuning);
    let (om, w) = (cp.bare_frequency, cp.damped_frequency);
    let g = op.coupling;
    let d = cp.eval_real(nu);
    let tau = op.mech.tau();
    let phase = if op.cavity_amp.norm() > 0.0 { op.cavity_amp / op.cavity_amp.norm() } else { Complex64::new(1.0, 0.0) };

    let cav_q = Complex64::new(dl * dl, 0.0) + Complex64::new(-0.5 * gc, nu).powi(2);
    let pre_q_th = cav_q / d * (gm * om / (2.0 * w)).sqrt();
    let q_th_nu = pre_q_th * (i * (nu + w) - 0.5 * gm) * tau.conj();
    let q_th_mnu = pre_q_th * (i * (nu - w) - 0.5 * gm) * tau;

    let em_lo = (i * (nu - dl) - 0.5 * gc) * phase;
    let em_hi = (i * (nu + dl) - 0.5 * gc) * phase.conj();
    let pre_q_rp = g / d * (w * om * gc / 2.0).sqrt();

    let cav_p = Complex64::new(dl * dl, 0.0) + Complex64::new(0.5 * gc, -nu).powi(2);
    let pre_p_th = gm.sqrt() / (d * (2.0 * w * om).sqrt());
    let gwd = g * g * w * dl;
    let p_th_mnu = pre_p_th * (cav_p * Complex64::new(om * om - nu * w, -0.5 * nu * gm) - gwd) * tau;
    let p_th_nu = pre_p_th * (cav_p * Complex64::new(om * om + nu * w, -0.5 * nu * gm) - gwd) * tau.conj();
    let pre_p_rp = -i * nu * g / d * (w * gc / (2.0 * om)).sqrt();

    TransferCoefficients {
        q: [q_th_nu, q_th_mnu, pre_q_rp * em_lo, pre_q_rp * em_hi],
        p: [p_th_nu, p_th_mnu, pre_p_rp * em_lo, pre_p_rp * em_hi],
    }
}

/// Spectra via the transfer-function route.
pub fn transfer_oracle(op: &OperatingPoint, spec: &OccupationSpectrum, nu: f64) -> TransferSpectra {
    Spectra::new(op, spec).transfer(nu)
}

pub fn sq_rp(op: &OperatingPoint, spec: &OccupationSpectrum, nu: f64) -> f64 {
    Spectra::new(op, spec).sq_rp(nu)
}

pub fn sq_th(op: &OperatingPoint, spec: &OccupationSpectrum, nu: f64) -> f64 {
    Spectra::new(op, spec).sq_th(nu)
}

pub fn sp_th(op: &OperatingPoint, spec: &OccupationSpectrum, nu: f64) -> f64 {
    Spectra::new(op, spec).sp_th(nu)
}

pub fn sqp_th(op: &OperatingPoint, spec: &OccupationSpectrum, nu: f64) -> f64 {
    Spectra::new(op, spec).sqp_th(nu)
}

pub fn sp_minus_sq(op: &OperatingPoint, spec: &OccupationSpectrum, nu: f64) -> f64 {
    Spectra::new(op, spec).sp_minus_sq(nu)
}

pub fn sp_total(op: &OperatingPoint, spec: &OccupationSpectrum, nu: f64) -> f64 {
    Spectra::new(op, spec).sp_total(nu)
}

/// Quadrature breakpoints around every zero of `d` (at `±Re ν_k`, pre-split on
/// the scale `|Im ν_k|`), at zero and at the occupation's kinks.
pub fn spectral_breakpoints(op: &OperatingPoint, spec: &OccupationSpectrum) -> Result<Vec<f64>> {
    let cp = op.char_poly();
    let roots = roots_quartic(cp.coefficients())?;
    let reach = 4.0 * roots.iter().map(|z| z.norm()).fold(cp.damped_frequency, f64::max);
    let mut bp = spec.characteristic_points();
    bp.push(0.0);
    for z in roots {
        peak_breakpoints(z.re, -z.im, reach, &mut bp);
    }
    let w = cp.damped_frequency;
    peak_breakpoints(w, 0.5 * cp.gamma_m, reach, &mut bp);
    peak_breakpoints(-w, 0.5 * cp.gamma_m, reach, &mut bp);
    Ok(bp)
}

/// `(1/2π)∫ f(ν) dν` with breakpoints from [`spectral_breakpoints`].
pub fn spectral_mean<F: Fn(f64) -> f64>(op: &OperatingPoint, spec: &OccupationSpectrum, f: F, cfg: &QuadratureConfig) -> Result<f64> {
    let bp = spectral_breakpoints(op, spec)?;
    Ok(integrate_real_line(f, &bp, cfg)?.value / (2.0 * PI))
}

/// Integrable spectral quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumColumn {
    SqRp,
    SqTh,
    SqTotal,
    SpTh,
    SpTotal,
    SqpTh,
    /// `ν²S_q`, whose integral does not exist.
    Nu2Sq,
}

/// `(1/2π)∫` of the chosen spectrum.
pub fn spectrum_integral(op: &OperatingPoint, spec: &OccupationSpectrum, column: SpectrumColumn, cfg: &QuadratureConfig) -> Result<f64> {
    let s = Spectra::new(op, spec);
    match column {
        SpectrumColumn::SqRp => spectral_mean(op, spec, |nu| s.sq_rp(nu), cfg),
        SpectrumColumn::SqTh => spectral_mean(op, spec, |nu| s.sq_th(nu), cfg),
        SpectrumColumn::SqTotal => spectral_mean(op, spec, |nu| s.sq_total(nu), cfg),
        SpectrumColumn::SpTh => spectral_mean(op, spec, |nu| s.sp_th(nu), cfg),
        SpectrumColumn::SpTotal => spectral_mean(op, spec, |nu| s.sp_total(nu), cfg),
        SpectrumColumn::SqpTh => spectral_mean(op, spec, |nu| s.sqp_th(nu), cfg),
        SpectrumColumn::Nu2Sq => Err(CoreError::Divergent("ν²S_q(ν) tends to a nonzero constant")),
    }
}

/// Quadrature settings used for moments and energies.
pub fn default_moment_config() -> QuadratureConfig {
    QuadratureConfig::default().with_rel_tol(1e-11).with_max_subdivisions(20_000)
}

/// Second moments of the mirror from quadrature of the spectra.
pub fn moment_integrals(op: &OperatingPoint, spec: &OccupationSpectrum) -> Result<EquilibriumMoments> {
    moment_integrals_with(op, spec, &default_moment_config())
}

/// [`moment_integrals`] with explicit quadrature settings.
pub fn moment_integrals_with(op: &OperatingPoint, spec: &OccupationSpectrum, cfg: &QuadratureConfig) -> Result<EquilibriumMoments> {
    let hat = hatted_moments(op, spec, cfg)?;
    let m = op.mech.mass();
    let om = op.mech.bare_frequency();
    Ok(EquilibriumMoments {
        q2: HBAR / (m * om) * hat.q2,
        p2: m * HBAR * om * hat.p2,
        qp_sym: HBAR * hat.qp,
        mean_q: op.mean_q_shift,
        mean_p: 0.0,
    })
}

/// Dimensionless second moments `⟨q̂²⟩`, `⟨p̂²⟩`, `⟨{q̂,p̂}⟩/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HattedMoments {
    pub q2: f64,
    pub p2: f64,
    pub qp: f64,
}

pub fn hatted_moments(op: &OperatingPoint, spec: &OccupationSpectrum, cfg: &QuadratureConfig) -> Result<HattedMoments> {
    Ok(HattedMoments {
        q2: spectrum_integral(op, spec, SpectrumColumn::SqTotal, cfg)?,
        p2: spectrum_integral(op, spec, SpectrumColumn::SpTotal, cfg)?,
        qp: spectrum_integral(op, spec, SpectrumColumn::SqpTh, cfg)?,
    })
}

/// Symmetric grid on `[−ν_max, ν_max]` with `n` uniform points plus log-dense
/// clusters within `5Γ` of each zero of `d`.
pub fn auto_grid(op: &OperatingPoint, nu_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(nu_max > 0.0) || n < 2 {
        return Err(CoreError::Domain("auto grid needs ν_max > 0 and n ≥ 2"));
    }
    let roots = roots_quartic(op.char_poly().coefficients())?;
    let mut grid = linspace(-nu_max, nu_max, n);
    const CLUSTER: usize = 24;
    for z in roots {
        let width = -2.0 * z.im;
        if !(width > 0.0) {
            continue;
        }
        for k in 0..CLUSTER {
            let off = 5.0 * width * (1e-3f64).powf(1.0 - k as f64 / (CLUSTER - 1) as f64);
            for x in [z.re - off, z.re + off, -z.re - off, -z.re + off] {
                if x.abs() <= nu_max {
                    grid.push(x);
                }
            }
        }
        for x in [z.re, -z.re] {
            if x.abs() <= nu_max {
                grid.push(x);
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * nu_max);
    Ok(grid)
}

/// Column names of [`spectrum_table`].
pub const SPECTRUM_COLUMNS: [&str; 6] = ["Sq_rp", "Sq_th", "Sp_th", "Sqp_th", "Sq_total", "Sp_total"];

/// Evaluates all spectra on `grid`.
pub fn spectrum_table(op: &OperatingPoint, spec: &OccupationSpectrum, grid: Vec<f64>) -> Result<SpectrumTable> {
    let s = Spectra::new(op, spec);
    let mut table = SpectrumTable::new(grid)?;
    for (i, name) in SPECTRUM_COLUMNS.iter().enumerate() {
        let col = table
            .grid()
            .iter()
            .map(|&nu| match i {
                0 => s.sq_rp(nu),
                1 => s.sq_th(nu),
                2 => s.sp_th(nu),
                3 => s.sqp_th(nu),
                4 => s.sq_total(nu),
                _ => s.sp_total(nu),
            })
            .collect();
        table.push_column(name, col)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optomech_linear::operating_point;
    use crate::oscillator_markov::equilibrium_moments;
    use crate::params::SystemParams;

    fn resonant() -> (OperatingPoint, OccupationSpectrum) {
        let p = SystemParams::preset_p0().with_cavity_decay(1e8).unwrap();
        (operating_point(&p, 0.0), OccupationSpectrum::flat(3.0).unwrap())
    }

    #[test]
    fn resonant_closed_forms() {
        let (op, spec) = resonant();
        let s = Spectra::new(&op, &spec);
        let (gm, gc) = (op.mech.damping(), op.gamma_c);
        let (om, w) = (op.mech.bare_frequency(), op.mech.damped_frequency());
        let g2 = op.coupling_sq();
        for k in 0..40 {
            let nu = (k as f64 - 19.5) * 0.11 * w;
            let lm = (nu - w) * (nu - w) + 0.25 * gm * gm;
            let lp = (nu + w) * (nu + w) + 0.25 * gm * gm;
            let rp = om * w * g2 * gc / (2.0 * (nu * nu + 0.25 * gc * gc) * lm * lp);
            let th = om * gm / (2.0 * w) * (3.5 / lm + 3.5 / lp);
            assert!((s.sq_rp(nu) - rp).abs() < 1e-12 * rp);
            assert!((s.sq_th(nu) - th).abs() < 1e-12 * th);
        }
    }

    #[test]
    fn difference_form_and_evenness() {
        let p = SystemParams::preset_p0().with_cavity_decay(8e7).unwrap();
        let op = operating_point(&p, 5e7);
        let spec = OccupationSpectrum::flat(2.0).unwrap();
        let s = Spectra::new(&op, &spec);
        for k in 0..50 {
            let nu = (k as f64 - 24.3) * 3.7e6;
            let diff = s.sp_th(nu) - s.sq_th(nu);
            let scale = s.sp_th(nu).max(s.sq_th(nu));
            assert!((diff - s.sp_minus_sq(nu)).abs() < 1e-11 * scale, "{nu}");
            for f in [Spectra::sq_total, Spectra::sp_total, Spectra::sqp_th] {
                let (a, b) = (f(&s, nu), f(&s, -nu));
                assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
            }
        }
    }

    #[test]
    fn transfer_matches_closed_forms() {
        let p = SystemParams::preset_p0().with_cavity_decay(8e7).unwrap();
        let op = operating_point(&p, 6e7);
        let spec = OccupationSpectrum::flat(7.0).unwrap();
        let s = Spectra::new(&op, &spec);
        for k in 0..60 {
            let nu = (k as f64 - 29.7) * 4.1e6;
            let t = s.transfer(nu);
            assert!((t.sq_rp - s.sq_rp(nu)).abs() < 1e-9 * s.sq_rp(nu));
            assert!((t.sq_th - s.sq_th(nu)).abs() < 1e-9 * s.sq_th(nu));
            assert!((t.sp - s.sp_total(nu)).abs() < 1e-9 * s.sp_total(nu));
            assert!((t.sqp - s.sqp_th(nu)).abs() < 1e-9 * s.sq_total(nu));
        }
    }

    #[test]
    fn decoupled_moments_match_markov() {
        let mut p = SystemParams::preset_p0();
        p.laser.power = 0.0;
        let op = operating_point(&p, 1e7);
        let spec = OccupationSpectrum::flat(4.0).unwrap();
        let m = moment_integrals(&op, &spec).unwrap();
        let eq = equilibrium_moments(&op.mech, 4.0).unwrap();
        assert!((m.q2 - eq.q2).abs() < 1e-8 * eq.q2);
        assert!((m.p2 - eq.p2).abs() < 1e-8 * eq.p2);
        assert!((m.qp_sym - eq.qp_sym).abs() < 1e-8 * eq.qp_sym.abs());
    }

    #[test]
    fn nu2_sq_diverges() {
        let (op, spec) = resonant();
        let r = spectrum_integral(&op, &spec, SpectrumColumn::Nu2Sq, &QuadratureConfig::default());
        assert!(matches!(r, Err(CoreError::Divergent(_))));
    }

    #[test]
    fn table_columns_and_grid() {
        let (op, spec) = resonant();
        let grid = auto_grid(&op, 2.0 * op.mech.damped_frequency(), 101).unwrap();
        assert!(grid.len() > 101);
        let t = spectrum_table(&op, &spec, grid).unwrap();
        assert!(t.is_symmetric(1e-9));
        assert_eq!(t.names().len(), 6);
        assert!(t.column("Sq_th").unwrap().iter().all(|v| *v >= 0.0));
    }
}
