//! Zeros of the characteristic polynomial written as
//! `d(ν) = (ν − ν_m)(ν + ν̄_m)(ν − ν_c)(ν + ν̄_c)` with
//! `ν_m = ω_eff − iΓ_m/2` and `ν_c = Δ_eff − iΓ_c/2`.
//!
//! Three routes are provided: a numeric quartic solve, the closed forms at
//! `Δ = ω`, and the weak-coupling approximation.

use num_complex::Complex64;

use crate::numerics::{bisect, roots_quartic};
use crate::optomech_linear::{operating_point, CharPoly};
use crate::params::{MechanicalParams, SystemParams};
use crate::{CoreError, Result};
#[allow(unused_imports)] // only unused when a dependency links std
use num_traits::Float;

/// How a [`PoleSet`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleMethod {
    ExactResonant,
    Approximate,
    Numeric,
}

impl PoleMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ExactResonant => "exact_resonant",
            Self::Approximate => "approximate",
            Self::Numeric => "numeric",
        }
    }
}

/// Closed-form branch at `Δ = ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonantBranch {
    /// `4G² < (γ_c − γ_m)²`: distinct damping rates, equal frequencies.
    DistinctDamping,
    /// `4G² > (γ_c − γ_m)²`: equal damping rates `(γ_c + γ_m)/2`, split frequencies.
    /// Which member of the pair is called mechanical is a convention: here
    /// `Δ_eff = sqrt(x₊)` and `ω_eff = sqrt(x₋)`.
    EqualDamping,
}

/// Effective damping rates and frequencies of the coupled modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleSet {
    pub gamma_m: f64,
    pub gamma_c: f64,
    pub omega_eff: f64,
    pub delta_eff: f64,
    pub method: PoleMethod,
    pub branch: Option<ResonantBranch>,
}

impl PoleSet {
    /// `ν_m = ω_eff − iΓ_m/2`
    pub fn mech_pole(&self) -> Complex64 {
        Complex64::new(self.omega_eff, -0.5 * self.gamma_m)
    }

    /// `ν_c = Δ_eff − iΓ_c/2`
    pub fn cavity_pole(&self) -> Complex64 {
        Complex64::new(self.delta_eff, -0.5 * self.gamma_c)
    }

    /// The four zeros `{ν_m, −ν̄_m, ν_c, −ν̄_c}`.
    pub fn roots(&self) -> [Complex64; 4] {
        let (m, c) = (self.mech_pole(), self.cavity_pole());
        [m, -m.conj(), c, -c.conj()]
    }

    /// Coefficients (ascending) of the monic quartic with these zeros.
    pub fn quartic_coefficients(&self) -> [Complex64; 5] {
        let mut c = [Complex64::new(0.0, 0.0); 5];
        c[0] = Complex64::new(1.0, 0.0);
        let mut deg = 0;
        for r in self.roots() {
            deg += 1;
            for k in (1..=deg).rev() {
                c[k] = c[k - 1] - r * c[k];
            }
            c[0] = -r * c[0];
        }
        c
    }

    /// Unordered pair of effective frequencies, ascending.
    pub fn frequency_pair(&self) -> (f64, f64) {
        if self.omega_eff <= self.delta_eff {
            (self.omega_eff, self.delta_eff)
        } else {
            (self.delta_eff, self.omega_eff)
        }
    }

    /// Relative residuals of the four real equations linking the pole data to
    /// the polynomial coefficients.
    pub fn system_residuals(&self, cp: &CharPoly) -> [f64; 4] {
        let om2 = cp.bare_frequency * cp.bare_frequency;
        let a = cp.detuning * cp.detuning + 0.25 * cp.gamma_c * cp.gamma_c;
        let (gm, gc) = (cp.gamma_m, cp.gamma_c);
        let nm = self.mech_pole().norm_sqr();
        let nc = self.cavity_pole().norm_sqr();
        let rel = |lhs: f64, rhs: f64, scale: f64| (lhs - rhs).abs() / scale;
        let s1 = gc + gm;
        let s2 = gc * om2 + gm * a;
        let s3 = om2 + a + gc * gm;
        let s4 = om2 * a;
        [
            rel(self.gamma_m + self.gamma_c, s1, s1),
            rel(self.gamma_c * nm + self.gamma_m * nc, s2, s2),
            rel(nm + nc + self.gamma_m * self.gamma_c, s3, s3),
            rel(nm * nc, s4 - cp.coupling_term(), s4),
        ]
    }
}

/// Numeric zeros of `d` from the companion matrix, paired as `{ν, −ν̄}`.
pub fn poles_numeric(cp: &CharPoly) -> Result<PoleSet> {
    let roots = if cp.coupling_term() == 0.0 { decoupled_roots(cp) } else { roots_quartic(cp.coefficients())? };
    let mut sorted = roots;
    sorted.sort_by(|a, b| b.re.partial_cmp(&a.re).expect("finite roots"));
    let scale = sorted.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let (p1, p2) = (sorted[0], sorted[1]);
    let (n1, n2) = (sorted[2], sorted[3]);
    let direct = (n1 + p1.conj()).norm().max((n2 + p2.conj()).norm());
    let crossed = (n2 + p1.conj()).norm().max((n1 + p2.conj()).norm());
    let (mismatch, partners) = if direct <= crossed { (direct, (n1, n2)) } else { (crossed, (n2, n1)) };
    if mismatch > 1e-8 * scale {
        return Err(CoreError::DegeneratePairing { mismatch: mismatch / scale });
    }
    let sym = |p: Complex64, n: Complex64| 0.5 * (p - n.conj());
    let pairs = [sym(p1, partners.0), sym(p2, partners.1)];
    let data = pairs.map(|z| (-2.0 * z.im, z.re.abs()));
    let w = cp.damped_frequency;
    let tie_tol = 1e-9 * (cp.gamma_c + cp.gamma_m);
    let d0 = (data[0].0 - cp.gamma_m).abs();
    let d1 = (data[1].0 - cp.gamma_m).abs();
    let mech_first = if (d0 - d1).abs() <= tie_tol { (data[0].1 - w).abs() <= (data[1].1 - w).abs() } else { d0 < d1 };
    let (m, c) = if mech_first { (data[0], data[1]) } else { (data[1], data[0]) };
    Ok(PoleSet { gamma_m: m.0, gamma_c: c.0, omega_eff: m.1, delta_eff: c.1, method: PoleMethod::Numeric, branch: None })
}

fn decoupled_roots(cp: &CharPoly) -> [Complex64; 4] {
    let m = Complex64::new(cp.damped_frequency, -0.5 * cp.gamma_m);
    let c = Complex64::new(cp.detuning.abs(), -0.5 * cp.gamma_c);
    [m, -m.conj(), c, -c.conj()]
}

/// Closed-form zeros at `Δ = ω`.
pub fn poles_exact_resonant(mech: &MechanicalParams, gamma_c: f64, coupling: f64) -> Result<PoleSet> {
    let gm = mech.damping();
    let w = mech.damped_frequency();
    let dl = gamma_c - gm;
    let g2 = coupling * coupling;
    let w2 = w * w;
    let a = w2 + dl * dl / 16.0;
    if 4.0 * g2 < dl * dl {
        if dl == 0.0 {
            return Err(CoreError::BranchCondition("sign convention undefined for γ_c = γ_m"));
        }
        let eps = dl.signum();
        let u2 = (a * a - g2 * w2).sqrt();
        let radicand = 0.25 * dl * dl - 2.0 * g2 * w2 / (u2 + a);
        let root = radicand.max(0.0).sqrt();
        let mean = 0.5 * (gamma_c + gm);
        let freq2 = w2 - g2 * w2 / (2.0 * (u2 + a));
        let freq = freq2.sqrt();
        Ok(PoleSet {
            gamma_m: mean - eps * root,
            gamma_c: mean + eps * root,
            omega_eff: freq,
            delta_eff: freq,
            method: PoleMethod::ExactResonant,
            branch: Some(ResonantBranch::DistinctDamping),
        })
    } else if 0.25 * w2 * dl * dl < g2 * w2 && g2 * w2 < a * a && w2 > dl * dl / 16.0 {
        let s = w * (g2 - 0.25 * dl * dl).sqrt();
        let base = w2 - dl * dl / 16.0;
        let mean = 0.5 * (gamma_c + gm);
        Ok(PoleSet {
            gamma_m: mean,
            gamma_c: mean,
            omega_eff: (base - s).sqrt(),
            delta_eff: (base + s).sqrt(),
            method: PoleMethod::ExactResonant,
            branch: Some(ResonantBranch::EqualDamping),
        })
    } else {
        Err(CoreError::BranchCondition("the four zeros at Δ = ω are not distinct"))
    }
}

/// Cavity damping `γ̄_c` at which `G² = (γ_c − γ_m)²/4` for `Δ = ω`, with `G`
/// following from the drive in `params`.
pub fn critical_cavity_decay(params: &SystemParams) -> Result<f64> {
    let gm = params.mech.damping();
    let w = params.mech.damped_frequency();
    let f = |gc: f64| -> f64 {
        let Ok(p) = params.with_cavity_decay(gc) else { return f64::NAN };
        let g = operating_point(&p, w).coupling;
        4.0 * g * g - (gc - gm) * (gc - gm)
    };
    let mut lo = gm.max(f64::MIN_POSITIVE) * (1.0 + 1e-9);
    if !(f(lo) > 0.0) {
        return Err(CoreError::Domain("coupling too weak for an equal-damping branch"));
    }
    let mut hi = 2.0 * lo;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(CoreError::Domain("no critical cavity damping found"));
        }
    }
    bisect(f, lo, hi, 1e-14)
}

/// Validity diagnostics of the weak-coupling approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproximationReport {
    /// `γ_m/γ_c`
    pub damping_ratio: f64,
    pub chi: f64,
    /// `|χ|·|1 − Δ²/ω² − γ_c²/(4ω²)|`
    pub third: f64,
    /// Whether `Δ²/ω² ≳ χ/(1−χ) + χ(1−2χ)δ²/(4ω²)` holds (`δ = γ_c − γ_m`).
    pub lower_consistent: bool,
    /// Whether `χ[Δ²/ω² + (1−χ)(1−2χ)δ²/(4ω²)] ≲ 1 − χ` holds.
    pub upper_consistent: bool,
}

/// Thresholds applied by [`poles_approximate`].
pub const MAX_DAMPING_RATIO: f64 = 0.01;
pub const MAX_CHI: f64 = 0.05;
pub const MAX_THIRD: f64 = 0.05;

/// Poles from the weak-coupling approximation together with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproximatePoles {
    pub poles: PoleSet,
    pub report: ApproximationReport,
}

/// `χ(Δ) = G²ωΔ / ((δ²/4 + (Δ−ω)²)(δ²/4 + (Δ+ω)²))`, `δ = γ_c − γ_m`.
pub fn chi(mech: &MechanicalParams, gamma_c: f64, delta: f64, coupling: f64) -> f64 {
    let w = mech.damped_frequency();
    let dl = gamma_c - mech.damping();
    let q = 0.25 * dl * dl;
    coupling * coupling * w * delta / ((q + (delta - w) * (delta - w)) * (q + (delta + w) * (delta + w)))
}

/// Weak-coupling poles; fails when any validity condition exceeds its threshold.
pub fn poles_approximate(mech: &MechanicalParams, gamma_c: f64, delta: f64, coupling: f64) -> Result<ApproximatePoles> {
    let gm = mech.damping();
    let w = mech.damped_frequency();
    let dl = gamma_c - gm;
    let x = chi(mech, gamma_c, delta, coupling);
    let w2 = w * w;
    let d2 = delta * delta;
    let third = x.abs() * (1.0 - d2 / w2 - gamma_c * gamma_c / (4.0 * w2)).abs();
    let r = dl * dl / (4.0 * w2);
    let report = ApproximationReport {
        damping_ratio: gm / gamma_c,
        chi: x,
        third,
        lower_consistent: d2 / w2 >= x / (1.0 - x) + x * (1.0 - 2.0 * x) * r,
        upper_consistent: x * (d2 / w2 + (1.0 - x) * (1.0 - 2.0 * x) * r) <= 1.0 - x,
    };
    if !(report.damping_ratio < MAX_DAMPING_RATIO) {
        return Err(CoreError::Validity { quantity: "gamma_m/gamma_c", value: report.damping_ratio, threshold: MAX_DAMPING_RATIO });
    }
    if !(x.abs() < MAX_CHI) {
        return Err(CoreError::Validity { quantity: "chi", value: x.abs(), threshold: MAX_CHI });
    }
    if !(third < MAX_THIRD) {
        return Err(CoreError::Validity { quantity: "third condition", value: third, threshold: MAX_THIRD });
    }
    let big_m = gm + x * dl;
    let big_c = gamma_c - x * dl;
    let den = big_c - big_m;
    if den == 0.0 {
        return Err(CoreError::Validity { quantity: "gamma_c - gamma_m (effective)", value: 0.0, threshold: 0.0 });
    }
    let cross = (gamma_c - big_c) * (big_c - gm) / 4.0;
    let delta_eff2 = (big_c - gm) / den * d2 - (gamma_c - big_c) / den * w2 - cross;
    let omega_eff2 = (big_c - gm) / den * w2 - (gamma_c - big_c) / den * d2 - cross;
    if delta_eff2 < 0.0 {
        return Err(CoreError::NegativeSquaredFrequency { name: "delta_eff^2", value: delta_eff2 });
    }
    if omega_eff2 < 0.0 {
        return Err(CoreError::NegativeSquaredFrequency { name: "omega_eff^2", value: omega_eff2 });
    }
    Ok(ApproximatePoles {
        poles: PoleSet {
            gamma_m: big_m,
            gamma_c: big_c,
            omega_eff: omega_eff2.sqrt(),
            delta_eff: delta_eff2.sqrt(),
            method: PoleMethod::Approximate,
            branch: None,
        },
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optomech_linear::char_poly;

    fn mech() -> MechanicalParams {
        SystemParams::preset_p0().mech
    }

    #[test]
    fn decoupled_numeric() {
        let m = mech();
        let cp = char_poly(&m, 3e7, 2e7, 0.0);
        let p = poles_numeric(&cp).unwrap();
        assert!((p.gamma_m - m.damping()).abs() < 1e-12 * m.damping());
        assert!((p.gamma_c - 3e7).abs() < 1e-6);
        assert!((p.omega_eff - m.damped_frequency()).abs() < 1e-6);
        assert!((p.delta_eff - 2e7).abs() < 1e-6);
    }

    #[test]
    fn quartic_coefficients_match() {
        let m = MechanicalParams::new(1.0, 1.0, 0.05).unwrap();
        let cp = char_poly(&m, 0.8, 1.2, 0.2);
        let p = poles_numeric(&cp).unwrap();
        let c0 = cp.coefficients();
        for (a, b) in p.quartic_coefficients().iter().zip(c0) {
            assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
        }
        assert!(p.system_residuals(&cp).iter().all(|r| *r < 1e-12));
    }

    #[test]
    fn exact_resonant_decoupled_limit() {
        let m = mech();
        let p = poles_exact_resonant(&m, 1e8, 1e-3).unwrap();
        assert!((p.gamma_c - 1e8).abs() / 1e8 < 1e-12);
        assert!((p.gamma_m - m.damping()).abs() / m.damping() < 1e-6);
    }

    #[test]
    fn exact_resonant_equal_rates_error() {
        let m = MechanicalParams::new(1.0, 1.0, 0.1).unwrap();
        assert!(matches!(poles_exact_resonant(&m, 0.1, 0.0), Err(CoreError::BranchCondition(_))));
    }

    #[test]
    fn exact_matches_numeric_both_branches() {
        let m = MechanicalParams::new(1.0, 1.0, 1e-3).unwrap();
        let w = m.damped_frequency();
        for (gc, g) in [(0.5, 0.1), (0.5, 0.3), (0.2, 0.05), (0.2, 0.15)] {
            let ex = poles_exact_resonant(&m, gc, g).unwrap();
            let nu = poles_numeric(&char_poly(&m, gc, w, g)).unwrap();
            let (a, b) = (ex.frequency_pair(), nu.frequency_pair());
            assert!((a.0 - b.0).abs() < 1e-9 * a.0 && (a.1 - b.1).abs() < 1e-9 * a.1);
            let (mut x, mut y) = ([ex.gamma_m, ex.gamma_c], [nu.gamma_m, nu.gamma_c]);
            x.sort_by(f64::total_cmp);
            y.sort_by(f64::total_cmp);
            assert!((x[0] - y[0]).abs() < 1e-9 * x[1] && (x[1] - y[1]).abs() < 1e-9 * x[1], "{ex:?} {nu:?}");
        }
    }

    #[test]
    fn approximate_resonant_detuning_keeps_gamma_m() {
        let m = mech();
        let p = poles_approximate(&m, 1e9, 0.0, 1e6).unwrap();
        assert_eq!(p.poles.gamma_m, m.damping());
        let red = poles_approximate(&m, 1e9, 3e8, 1e6).unwrap();
        assert!(red.poles.gamma_m > m.damping());
    }

    #[test]
    fn critical_decay_p0() {
        let gc = critical_cavity_decay(&SystemParams::preset_p0()).unwrap();
        assert!((gc - 4.123_773_8e7).abs() / gc < 1e-6, "{gc}");
    }
}
