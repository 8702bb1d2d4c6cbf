//! Homodyne and heterodyne spectra of the light leaving the cavity, split
//! into elastic (coherent) and inelastic (thermal plus radiation-pressure)
//! parts. Inelastic spectra are normalised to shot noise.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::bath_spectrum::OccupationSpectrum;
use crate::fluctuation_spectra::Spectra;
use crate::optomech_linear::OperatingPoint;
#[allow(unused_imports)] // only unused when a dependency links std
use num_traits::Float;

/// Output-field coefficients `(E_th, E_em, L)` at `(ν, θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneCoefficients {
    pub e_th: Complex64,
    pub e_em: Complex64,
    pub l: Complex64,
}

/// Evaluator for homodyne quantities at fixed local-oscillator phase `θ`.
#[derive(Debug, Clone, Copy)]
pub struct Homodyne<'a> {
    spectra: Spectra<'a>,
    theta: f64,
}

impl<'a> Homodyne<'a> {
    pub fn new(op: &'a OperatingPoint, spec: &'a OccupationSpectrum, theta: f64) -> Self {
        Self { spectra: Spectra::new(op, spec), theta }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Weight of `δ(ν)`: `8πγ_c|ζ|² sin²θ`.
    pub fn elastic_weight(&self) -> f64 {
        let op = self.spectra.operating_point();
        8.0 * PI * op.gamma_c * op.cavity_amp.norm_sqr() * self.theta.sin().powi(2)
    }

    pub fn coefficients(&self, nu: f64) -> HomodyneCoefficients {
        let op = self.spectra.operating_point();
        let cp = self.spectra.char_poly();
        let i = Complex64::new(0.0, 1.0);
        let (gm, gc, dl, w) = (cp.gamma_m, cp.gamma_c, cp.detuning, cp.damped_frequency);
        let g = op.coupling;
        let (s, c) = self.theta.sin_cos();
        let l = (Complex64::new(dl * s + 0.5 * gc * c, nu * c)) / cp.eval_real(-nu);
        let e_th = -g * (gm * gc).sqrt() * Complex64::new(0.5 * gm, nu + w) * l;
        let den = Complex64::new(0.5 * gc, nu - dl);
        let e_em = -den.conj() / den + i * w * gc * g * g * Complex64::from_polar(1.0, self.theta) * l / den;
        HomodyneCoefficients { e_th, e_em, l }
    }

    /// `2γ_cωG²[(γ_c/2 cosθ + Δ sinθ)² + ν²cos²θ] / (Ω(γ_c²/4+(Δ−ν)²)(γ_c²/4+(Δ+ν)²))`
    fn filter(&self, nu: f64) -> f64 {
        let cp = self.spectra.char_poly();
        let (s, c) = self.theta.sin_cos();
        let (gc, dl) = (cp.gamma_c, cp.detuning);
        let q = 0.25 * gc * gc;
        let x = 0.5 * gc * c + dl * s;
        2.0 * gc * cp.damped_frequency * cp.coupling * cp.coupling * (x * x + nu * nu * c * c)
            / (cp.bare_frequency * (q + (dl - nu) * (dl - nu)) * (q + (dl + nu) * (dl + nu)))
    }

    /// Thermal inelastic part.
    pub fn s_th(&self, nu: f64) -> f64 {
        self.filter(nu) * self.spectra.sq_th(nu)
    }

    /// Radiation-pressure inelastic part including shot noise and the
    /// interference term.
    pub fn s_rp(&self, nu: f64) -> f64 {
        let cp = self.spectra.char_poly();
        let (gc, dl, w) = (cp.gamma_c, cp.detuning, cp.damped_frequency);
        let g2 = cp.coupling * cp.coupling;
        let q = 0.25 * gc * gc;
        let lor = (q + (dl - nu) * (dl - nu)) * (q + (dl + nu) * (dl + nu));
        let t2 = 2.0 * self.theta;
        let inner = Complex64::new((q + nu * nu - dl * dl) * t2.sin() - dl * gc * t2.cos(), 2.0 * dl * nu);
        let tail = Complex64::new(q - nu * nu + dl * dl, -gc * nu);
        let interference = gc * w * g2 * (inner * tail / (cp.eval_real(nu) * lor)).re;
        1.0 + self.filter(nu) * self.spectra.sq_rp(nu) + interference
    }

    pub fn s_inel(&self, nu: f64) -> f64 {
        self.s_th(nu) + self.s_rp(nu)
    }

    /// `S_th` assembled from `|E_th(±ν)|²` and the bath occupation.
    pub fn s_th_assembled(&self, nu: f64) -> f64 {
        let (p, m) = (self.coefficients(nu), self.coefficients(-nu));
        p.e_th.norm_sqr() * self.spectra.sym_occupation(nu) + m.e_th.norm_sqr() * self.spectra.sym_occupation(-nu)
    }

    /// `S_rp` assembled as `(|E_em(ν)|² + |E_em(−ν)|²)/2`.
    pub fn s_rp_assembled(&self, nu: f64) -> f64 {
        0.5 * (self.coefficients(nu).e_em.norm_sqr() + self.coefficients(-nu).e_em.norm_sqr())
    }

    /// `|E_th(ν)|² − |E_th(−ν)|² + |E_em(ν)|² − |E_em(−ν)|²`, identically zero.
    pub fn commutator_defect(&self, nu: f64) -> f64 {
        let (p, m) = (self.coefficients(nu), self.coefficients(-nu));
        p.e_th.norm_sqr() - m.e_th.norm_sqr() + p.e_em.norm_sqr() - m.e_em.norm_sqr()
    }
}

/// Coefficients `(E_th, E_em, L)` at `(ν, θ)`.
pub fn homodyne_coefficients(op: &OperatingPoint, spec: &OccupationSpectrum, nu: f64, theta: f64) -> HomodyneCoefficients {
    Homodyne::new(op, spec, theta).coefficients(nu)
}

/// Tabulated homodyne spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct HomodyneResult {
    pub theta: f64,
    pub elastic_weight: f64,
    pub grid: Vec<f64>,
    pub s_th: Vec<f64>,
    pub s_rp: Vec<f64>,
    pub s_inel: Vec<f64>,
    /// Largest relative difference between the closed forms and the
    /// `|E|²` assembly over the grid.
    pub assembly_mismatch: f64,
}

/// Homodyne spectrum on `grid`, cross-checked against the `|E|²` assembly.
pub fn homodyne_spectrum(op: &OperatingPoint, spec: &OccupationSpectrum, theta: f64, grid: &[f64]) -> HomodyneResult {
    let h = Homodyne::new(op, spec, theta);
    let mut res = HomodyneResult {
        theta,
        elastic_weight: h.elastic_weight(),
        grid: grid.to_vec(),
        s_th: Vec::with_capacity(grid.len()),
        s_rp: Vec::with_capacity(grid.len()),
        s_inel: Vec::with_capacity(grid.len()),
        assembly_mismatch: 0.0,
    };
    for &nu in grid {
        let (th, rp) = (h.s_th(nu), h.s_rp(nu));
        let scale = th + rp;
        let err = ((th - h.s_th_assembled(nu)).abs() + (rp - h.s_rp_assembled(nu)).abs()) / scale;
        res.assembly_mismatch = res.assembly_mismatch.max(err);
        res.s_th.push(th);
        res.s_rp.push(rp);
        res.s_inel.push(th + rp);
    }
    res
}

/// Grid points where the inelastic homodyne spectrum is below shot noise.
pub fn squeezing_scan(op: &OperatingPoint, spec: &OccupationSpectrum, theta: f64, grid: &[f64]) -> Vec<(f64, f64)> {
    let h = Homodyne::new(op, spec, theta);
    grid.iter().map(|&nu| (nu, h.s_inel(nu))).filter(|&(_, s)| s < 1.0).collect()
}

/// High-temperature form of `S_inel(ν; 0)` with the interference term and
/// the radiation-pressure part dropped:
/// `γ_cγ_mG²(γ_c²/4 + ν²)(γ_m²/4 + (ω+ν)²)(N(ν)+½)/|d(ν)|² + (ν → −ν)`.
pub fn s_inel_thermal_limit(op: &OperatingPoint, spec: &OccupationSpectrum, nu: f64) -> f64 {
    let s = Spectra::new(op, spec);
    let cp = s.char_poly();
    let (gm, gc, w) = (cp.gamma_m, cp.gamma_c, cp.damped_frequency);
    let term = |x: f64| {
        gc * gm * op.coupling_sq() * (0.25 * gc * gc + x * x) * (0.25 * gm * gm + (w + x) * (w + x)) * s.sym_occupation(x) / cp.norm_sqr(x)
    };
    term(nu) + term(-nu)
}

/// Evaluator for the heterodyne spectrum; `μ` is the local-oscillator
/// frequency and `ν = μ − ω₀`.
#[derive(Debug, Clone, Copy)]
pub struct Heterodyne<'a> {
    spectra: Spectra<'a>,
    omega0: f64,
}

impl<'a> Heterodyne<'a> {
    pub fn new(op: &'a OperatingPoint, spec: &'a OccupationSpectrum, omega0: f64) -> Self {
        Self { spectra: Spectra::new(op, spec), omega0 }
    }

    fn lorentz(&self, nu: f64) -> f64 {
        let cp = self.spectra.char_poly();
        0.25 * cp.gamma_c * cp.gamma_c + (nu - cp.detuning) * (nu - cp.detuning)
    }

    fn ratio(&self, nu: f64) -> Complex64 {
        let cp = self.spectra.char_poly();
        Complex64::new(0.5 * cp.gamma_c, -(nu + cp.detuning)) / Complex64::new(0.5 * cp.gamma_c, nu - cp.detuning)
    }

    fn pref(&self) -> f64 {
        let cp = self.spectra.char_poly();
        cp.gamma_c * cp.damped_frequency * cp.coupling * cp.coupling
    }

    /// Thermal part at offset `ν = μ − ω₀`.
    pub fn sigma_th_offset(&self, nu: f64) -> f64 {
        let om = self.spectra.char_poly().bare_frequency;
        self.pref() * self.spectra.sq_th(nu) / (om * self.lorentz(nu))
    }

    /// Radiation-pressure part (shot noise, back-action and interference) at
    /// offset `ν`.
    pub fn sigma_rp_offset(&self, nu: f64) -> f64 {
        let cp = self.spectra.char_poly();
        let interference = (self.ratio(nu) * self.pref() / cp.eval_real(nu)).im;
        1.0 + self.pref() * self.spectra.sq_rp(nu) / (cp.bare_frequency * self.lorentz(nu)) - interference
    }

    /// The same quantity written as a squared modulus plus a positive term.
    pub fn sigma_rp_modulus_form(&self, nu: f64) -> f64 {
        let cp = self.spectra.char_poly();
        let d = cp.eval_real(nu);
        let a = Complex64::new(1.0, 0.0) + Complex64::new(0.0, 0.5 * self.pref()) / d * self.ratio(nu);
        a.norm_sqr() + self.pref() * self.pref() / (4.0 * d.norm_sqr())
    }

    pub fn sigma_th(&self, mu: f64) -> f64 {
        self.sigma_th_offset(mu - self.omega0)
    }

    pub fn sigma_rp(&self, mu: f64) -> f64 {
        self.sigma_rp_offset(mu - self.omega0)
    }

    pub fn sigma_inel(&self, mu: f64) -> f64 {
        let nu = mu - self.omega0;
        self.sigma_th_offset(nu) + self.sigma_rp_offset(nu)
    }

    /// Weight `4πγ_c|ζ|²` of the elastic line in the `κ → 0` limit.
    pub fn elastic_weight(&self) -> f64 {
        let op = self.spectra.operating_point();
        4.0 * PI * op.gamma_c * op.cavity_amp.norm_sqr()
    }

    /// Elastic line `γ_c|ζ|² κ/(κ²/4 + (μ−ω₀)²)` for detector bandwidth `κ`.
    pub fn sigma_el(&self, mu: f64, kappa: f64) -> f64 {
        let op = self.spectra.operating_point();
        let nu = mu - self.omega0;
        op.gamma_c * op.cavity_amp.norm_sqr() * kappa / (0.25 * kappa * kappa + nu * nu)
    }
}

/// Tabulated heterodyne spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct HeterodyneResult {
    /// Detector bandwidth; `None` is the `κ → 0` limit.
    pub kappa: Option<f64>,
    pub elastic_weight: f64,
    pub grid: Vec<f64>,
    /// Elastic lineshape, present for finite `κ`.
    pub sigma_el: Option<Vec<f64>>,
    pub sigma_rp: Vec<f64>,
    pub sigma_th: Vec<f64>,
    pub sigma_inel: Vec<f64>,
    /// Largest relative difference between the two radiation-pressure forms.
    pub modulus_form_mismatch: f64,
}

/// Heterodyne spectrum over local-oscillator frequencies `grid` (rad/s).
pub fn heterodyne_spectrum(
    op: &OperatingPoint,
    spec: &OccupationSpectrum,
    omega0: f64,
    grid: &[f64],
    kappa: Option<f64>,
) -> HeterodyneResult {
    let h = Heterodyne::new(op, spec, omega0);
    let mut res = HeterodyneResult {
        kappa,
        elastic_weight: h.elastic_weight(),
        grid: grid.to_vec(),
        sigma_el: kappa.map(|k| grid.iter().map(|&mu| h.sigma_el(mu, k)).collect()),
        sigma_rp: Vec::with_capacity(grid.len()),
        sigma_th: Vec::with_capacity(grid.len()),
        sigma_inel: Vec::with_capacity(grid.len()),
        modulus_form_mismatch: 0.0,
    };
    for &mu in grid {
        let nu = mu - omega0;
        let (th, rp) = (h.sigma_th_offset(nu), h.sigma_rp_offset(nu));
        res.modulus_form_mismatch = res.modulus_form_mismatch.max((rp - h.sigma_rp_modulus_form(nu)).abs() / rp);
        res.sigma_th.push(th);
        res.sigma_rp.push(rp);
        res.sigma_inel.push(th + rp);
    }
    res
}

/// Local maxima of `values` whose topographic prominence is at least
/// `rel_prominence` times the global maximum. Plateaus count once.
pub fn find_peaks(values: &[f64], rel_prominence: f64) -> Vec<usize> {
    let n = values.len();
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = rel_prominence * top;
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] {
                let h = values[i];
                let mut left_min = h;
                let mut k = i;
                while k > 0 {
                    k -= 1;
                    if values[k] > h {
                        break;
                    }
                    left_min = left_min.min(values[k]);
                }
                let mut right_min = h;
                let mut k = j;
                while k + 1 < n {
                    k += 1;
                    if values[k] > h {
                        break;
                    }
                    right_min = right_min.min(values[k]);
                }
                if h - left_min.max(right_min) >= threshold {
                    peaks.push((i + j) / 2);
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optomech_linear::operating_point;
    use crate::params::SystemParams;

    fn setup(delta: f64) -> (OperatingPoint, OccupationSpectrum) {
        let p = SystemParams::preset_p0().with_cavity_decay(9e7).unwrap();
        (operating_point(&p, delta), OccupationSpectrum::flat(3.0).unwrap())
    }

    #[test]
    fn closed_forms_match_assembly() {
        let (op, spec) = setup(4e7);
        for theta in [0.0, 0.4, -1.1, 2.5] {
            let h = Homodyne::new(&op, &spec, theta);
            for k in 0..40 {
                let nu = (k as f64 - 19.6) * 5.3e6;
                let (a, b) = (h.s_th(nu), h.s_th_assembled(nu));
                assert!((a - b).abs() < 1e-10 * a.max(1.0), "th {theta} {nu}: {a} {b}");
                let (a, b) = (h.s_rp(nu), h.s_rp_assembled(nu));
                assert!((a - b).abs() < 1e-10 * a, "rp {theta} {nu}: {a} {b}");
                let scale = h.coefficients(nu).e_th.norm_sqr() + h.coefficients(nu).e_em.norm_sqr();
                assert!(h.commutator_defect(nu).abs() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn resonant_quadrature_is_shot_noise() {
        let (op, spec) = setup(0.0);
        let h = Homodyne::new(&op, &spec, 0.5 * PI);
        for k in 0..20 {
            let nu = k as f64 * 1e7;
            assert!((h.s_inel(nu) - 1.0).abs() < 1e-12);
        }
        let p = SystemParams::preset_p0().with_cavity_decay(9e7).unwrap();
        let e = p.drive_amplitude();
        let w = h.elastic_weight();
        assert!((w - 32.0 * PI * e * e / 9e7).abs() < 1e-12 * w);
    }

    #[test]
    fn heterodyne_forms_agree_and_exceed_shot_noise() {
        let (op, spec) = setup(5e7);
        let h = Heterodyne::new(&op, &spec, 0.0);
        for k in 0..50 {
            let nu = (k as f64 - 24.5) * 4e6;
            let (a, b) = (h.sigma_rp_offset(nu), h.sigma_rp_modulus_form(nu));
            assert!((a - b).abs() < 1e-10 * a);
            assert!(h.sigma_inel(nu) > 1.0);
        }
    }

    #[test]
    fn high_temperature_limit() {
        let p = SystemParams::preset_p0().with_cavity_decay(9e7).unwrap();
        for delta in [0.0, 4e7] {
            let op = operating_point(&p, delta);
            for k in 1..40 {
                let nu = k as f64 * 1.7e6;
                let err = |n: f64| {
                    let spec = OccupationSpectrum::flat(n).unwrap();
                    let a = Homodyne::new(&op, &spec, 0.0).s_inel(nu);
                    (a - s_inel_thermal_limit(&op, &spec, nu)).abs() / a
                };
                let (e6, e7, e8) = (err(1e6), err(1e7), err(1e8));
                assert!(e7 < e6 / 8.0 && e8 < e7 / 8.0, "{delta} {nu}: {e6} {e7} {e8}");
                assert!(e8 < 2e-3);
            }
        }
    }

    #[test]
    fn sum_identity() {
        let (op, spec) = setup(5e7);
        let h = Heterodyne::new(&op, &spec, 0.0);
        for theta in [0.3, 1.2] {
            let a = Homodyne::new(&op, &spec, theta);
            let b = Homodyne::new(&op, &spec, theta + 0.5 * PI);
            for k in 0..30 {
                let nu = k as f64 * 3.3e6;
                let lhs = h.sigma_inel(nu) + h.sigma_inel(-nu);
                let rhs = a.s_inel(nu) + b.s_inel(nu);
                assert!((lhs - rhs).abs() < 1e-9 * rhs);
            }
        }
    }

    #[test]
    fn peaks_with_prominence() {
        let v = [0.0, 1.0, 0.0, 0.5, 0.4, 0.45, 0.0, 2.0, 2.0, 0.0];
        assert_eq!(find_peaks(&v, 0.01), alloc::vec![1, 3, 5, 7]);
        assert_eq!(find_peaks(&v, 0.1), alloc::vec![1, 3, 7]);
        assert_eq!(find_peaks(&v, 0.3), alloc::vec![1, 7]);
        assert_eq!(find_peaks(&v, 0.6), alloc::vec![7]);
    }
}
