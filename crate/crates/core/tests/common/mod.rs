#![allow(dead_code)]

use optomech_core::optomech_linear::{stability, OperatingPoint};
use optomech_core::params::{CavityParams, LaserDrive, MechanicalParams, SystemParams, ThermalEnv};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Dimensionless system with `Ω = 1`.
pub fn unit_system(gamma_m: f64, gamma_c: f64) -> SystemParams {
    SystemParams::new(
        MechanicalParams::new(1e-12, 1.0, gamma_m).unwrap(),
        CavityParams::new(1e6, gamma_c, 1e-3).unwrap(),
        LaserDrive::new(1e6, 1e-3).unwrap(),
        ThermalEnv::ZeroTemperature,
    )
}

/// Random stable operating point with `Ω = 1`; `G` is drawn below the
/// Routh–Hurwitz bound.
pub fn stable_draw(rng: &mut ChaCha8Rng) -> OperatingPoint {
    loop {
        let gm = 10f64.powf(rng.gen_range(-3.0..-1.0));
        let gc = 10f64.powf(rng.gen_range(-1.0..0.7));
        let delta = rng.gen_range(-2.0..2.0);
        let p = unit_system(gm, gc);
        let bound = stability(&p.mech, gc, delta, 1.0);
        let gmax = if delta == 0.0 { 1.0 } else { (bound.rhs / bound.lhs).sqrt().min(1.0) };
        let g = rng.gen_range(0.0..0.98) * gmax;
        let op = OperatingPoint::from_coupling(&p, delta, g);
        if op.is_stable() {
            return op;
        }
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}
