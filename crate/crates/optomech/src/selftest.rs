//! Cross-method oracle suite run by `optomech selftest`.

use std::f64::consts::PI;

use optomech_core::bath_spectrum::OccupationSpectrum;
use optomech_core::detection::{Heterodyne, Homodyne};
use optomech_core::energy_cooling::{energy_quadrature, energy_residue};
use optomech_core::fluctuation_spectra::{default_moment_config, hatted_moments};
use optomech_core::optomech_linear::{operating_point, OperatingPoint};
use optomech_core::params::{CavityParams, LaserDrive, MechanicalParams, SystemParams, ThermalEnv};
use optomech_core::pole_analysis::{critical_cavity_decay, poles_exact_resonant, poles_numeric};

use crate::csv::fmt_e;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed error and the tolerance it was held to.
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &str, worst: f64, tolerance: f64) -> Self {
        Self { name: name.to_string(), passed: worst.is_finite() && worst <= tolerance, worst, tolerance }
    }

    fn failed(name: &str) -> Self {
        Self { name: name.to_string(), passed: false, worst: f64::NAN, tolerance: 0.0 }
    }

    pub fn line(&self) -> String {
        format!("{} {} worst={} tol={}", if self.passed { "PASS" } else { "FAIL" }, self.name, fmt_e(self.worst), fmt_e(self.tolerance))
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn unit_point(gm: f64, gc: f64, delta: f64, g: f64) -> OperatingPoint {
    let p = SystemParams::new(
        MechanicalParams::new(1e-12, 1.0, gm).expect("valid"),
        CavityParams::new(1e6, gc, 1e-3).expect("valid"),
        LaserDrive::new(1e6, 1e-3).expect("valid"),
        ThermalEnv::ZeroTemperature,
    );
    OperatingPoint::from_coupling(&p, delta, g)
}

/// Fixed, stable configurations `(γ_m, γ_c, Δ, G)` with `Ω = 1`.
const CASES: [(f64, f64, f64, f64); 6] = [
    (0.01, 0.5, 0.7, 0.05),
    (0.002, 0.2, 1.0, 0.03),
    (0.05, 1.5, -0.4, 0.1),
    (0.01, 0.8, 0.0, 0.3),
    (0.03, 2.0, 1.8, 0.25),
    (0.005, 0.1, 0.95, 0.01),
];

fn residue_vs_quadrature() -> Check {
    let mut worst: f64 = 0.0;
    for (gm, gc, d, g) in CASES {
        let op = unit_point(gm, gc, d, g);
        let n = 2.0;
        let Ok(q) = energy_quadrature(&op, &OccupationSpectrum::flat(n).expect("valid")) else {
            return Check::failed("residue_vs_quadrature");
        };
        let Ok(poles) = poles_numeric(&op.char_poly()) else { return Check::failed("residue_vs_quadrature") };
        let r = energy_residue(&op, n, &poles);
        worst = worst.max(rel(q.n_rp, r.n_rp)).max(rel(q.n_th, r.n_th)).max((q.m_th - r.m_th).abs() / q.n_th);
    }
    Check::new("residue_vs_quadrature", worst, 1e-6)
}

fn exact_vs_numeric_poles() -> Check {
    let base = SystemParams::preset_p0();
    let Ok(critical) = critical_cavity_decay(&base) else { return Check::failed("exact_vs_numeric_poles") };
    let mut worst: f64 = 0.0;
    for factor in [0.3, 0.7, 1.5, 4.0] {
        let Ok(p) = base.with_cavity_decay(factor * critical) else { return Check::failed("exact_vs_numeric_poles") };
        let op = operating_point(&p, p.mech.damped_frequency());
        let (Ok(e), Ok(n)) = (poles_exact_resonant(&p.mech, op.gamma_c, op.coupling), poles_numeric(&op.char_poly())) else {
            return Check::failed("exact_vs_numeric_poles");
        };
        let (e0, e1) = e.frequency_pair();
        let (n0, n1) = n.frequency_pair();
        let damping = rel(e.gamma_m.min(e.gamma_c), n.gamma_m.min(n.gamma_c));
        worst = worst.max(damping).max(rel(e0, n0)).max(rel(e1, n1));
    }
    Check::new("exact_vs_numeric_poles", worst, 1e-9)
}

fn lyapunov_vs_quadrature() -> Check {
    let cfg = default_moment_config();
    let spec = OccupationSpectrum::flat(1.5).expect("valid");
    let mut worst: f64 = 0.0;
    for (gm, gc, d, g) in CASES {
        let op = unit_point(gm, gc, d, g);
        let (Ok(sigma), Ok(hat)) = (op.steady_covariance(&spec), hatted_moments(&op, &spec, &cfg)) else {
            return Check::failed("lyapunov_vs_quadrature");
        };
        worst = worst.max(rel(sigma[0][0], hat.q2)).max(rel(sigma[1][1], hat.p2)).max((sigma[0][1] - hat.qp).abs() / hat.q2);
    }
    Check::new("lyapunov_vs_quadrature", worst, 1e-7)
}

fn commutator_identity() -> Check {
    let spec = OccupationSpectrum::flat(0.5).expect("valid");
    let mut worst: f64 = 0.0;
    for (gm, gc, d, g) in CASES {
        let op = unit_point(gm, gc, d, g);
        for theta in [0.0, 0.4, -1.3, 2.2] {
            let h = Homodyne::new(&op, &spec, theta);
            for k in 0..25 {
                let nu = -3.0 + 0.25 * k as f64;
                let c = h.coefficients(nu);
                let scale = c.e_th.norm_sqr() + c.e_em.norm_sqr();
                worst = worst.max(h.commutator_defect(nu).abs() / scale);
            }
        }
    }
    Check::new("ef0_identity", worst, 1e-10)
}

fn sum_identity() -> Check {
    let spec = OccupationSpectrum::flat(0.5).expect("valid");
    let mut worst: f64 = 0.0;
    for (gm, gc, d, g) in CASES {
        let op = unit_point(gm, gc, d, g);
        let het = Heterodyne::new(&op, &spec, 0.0);
        for theta in [0.3, 1.1, -0.7] {
            let a = Homodyne::new(&op, &spec, theta);
            let b = Homodyne::new(&op, &spec, theta + 0.5 * PI);
            for k in 0..25 {
                let nu = 0.12 * k as f64;
                let lhs = het.sigma_inel(nu) + het.sigma_inel(-nu);
                worst = worst.max(rel(lhs, a.s_inel(nu) + b.s_inel(nu)));
            }
        }
    }
    Check::new("heterodyne_homodyne_sum", worst, 1e-9)
}

/// Runs every check in a fixed order.
pub fn run() -> Vec<Check> {
    vec![residue_vs_quadrature(), exact_vs_numeric_poles(), lyapunov_vs_quadrature(), commutator_identity(), sum_identity()]
}
