mod common;

use common::{rel, unit_system};
use num_complex::Complex64;
use optomech_core::bath_spectrum::{noise_spectrum, OccupationSpectrum};
use optomech_core::detection::Homodyne;
use optomech_core::fluctuation_spectra::Spectra;
use optomech_core::numerics::{determinant, eigen::eigenvalues_real, roots_quartic, Mat};
use optomech_core::optomech_linear::{char_poly, detuning_roots, drift_matrix, stability, OperatingPoint};
use optomech_core::params::MechanicalParams;
use proptest::prelude::*;

fn mech(gm: f64) -> MechanicalParams {
    MechanicalParams::new(1.0, 1.0, gm).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn routh_hurwitz_matches_roots(gm in 1e-3f64..0.2, gc in 0.05f64..5.0, delta in -3.0f64..3.0, g in 0.0f64..1.5) {
        let m = mech(gm);
        let r = stability(&m, gc, delta, g);
        prop_assume!((1.0 - r.margin()).abs() > 1e-6);
        let roots = roots_quartic(char_poly(&m, gc, delta, g).coefficients()).unwrap();
        let lower = roots.iter().all(|z| z.im < 0.0);
        prop_assert_eq!(r.stable, lower);
    }

    #[test]
    fn char_poly_is_determinant(gm in 1e-3f64..0.2, gc in 0.05f64..5.0, delta in -3.0f64..3.0, g in 0.0f64..1.5,
                                re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let m = mech(gm);
        let a = drift_matrix(&m, gc, delta, g);
        let nu = Complex64::new(re, im);
        let mut x = Mat::<Complex64>::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                x[(i, j)] = Complex64::new(a[i][j], 0.0);
            }
            x[(i, i)] += Complex64::i() * nu;
        }
        let cp = char_poly(&m, gc, delta, g);
        let d = cp.eval(nu);
        let scale = (1.0 + nu.norm()).powi(4);
        prop_assert!((determinant(&x) - d).norm() < 1e-10 * scale);
        prop_assert!((d.conj() - cp.eval(-nu.conj())).norm() < 1e-12 * scale);
    }

    #[test]
    fn vieta_reconstruction(gm in 1e-3f64..0.2, gc in 0.05f64..5.0, delta in -3.0f64..3.0, g in 0.0f64..1.5) {
        let cp = char_poly(&mech(gm), gc, delta, g);
        let c = cp.coefficients();
        let r = roots_quartic(c).unwrap();
        let mut e = [Complex64::new(0.0, 0.0); 5];
        e[0] = Complex64::new(1.0, 0.0);
        for (deg, z) in r.iter().enumerate() {
            for k in (1..=deg + 1).rev() {
                e[k] = e[k - 1] - z * e[k];
            }
            e[0] = -z * e[0];
        }
        let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for k in 0..5 {
            prop_assert!((e[k] - c[k]).norm() < 1e-9 * scale);
        }
    }

    #[test]
    fn decoupled_eigenvalues(gm in 1e-3f64..0.2, gc in 0.05f64..5.0, delta in -3.0f64..3.0) {
        let m = mech(gm);
        let ev = eigenvalues_real(&Mat::from_rows(drift_matrix(&m, gc, delta, 0.0))).unwrap();
        let want = [
            Complex64::new(-0.5 * gm, m.damped_frequency()),
            Complex64::new(-0.5 * gm, -m.damped_frequency()),
            Complex64::new(-0.5 * gc, delta),
            Complex64::new(-0.5 * gc, -delta),
        ];
        for w in want {
            prop_assert!(ev.iter().any(|z| (z - w).norm() < 1e-6));
        }
    }

    #[test]
    fn detuning_roots_solve_cubic(d0 in -5.0f64..5.0, gc in 0.1f64..3.0, k in 0.0f64..20.0) {
        let q = 0.25 * gc * gc;
        let roots = detuning_roots(d0, q, k);
        prop_assert!(!roots.is_empty());
        prop_assert!(roots.windows(2).all(|w| w[0].detuning < w[1].detuning));
        prop_assert!(roots.iter().filter(|r| r.primary).count() <= 1);
        for r in &roots {
            let res = (r.detuning - d0) * (q + r.detuning * r.detuning) + k;
            prop_assert!(res.abs() < 1e-9 * (q + d0 * d0) * d0.abs().max(1.0) + 1e-12 * k);
        }
    }

    #[test]
    fn noise_spectrum_even_and_bounded(n in 0.0f64..1e3, gm in 1e-3f64..0.5, nu in -10.0f64..10.0) {
        let m = mech(gm);
        let spec = OccupationSpectrum::flat(n).unwrap();
        let r = noise_spectrum(&m, &spec);
        prop_assert!(rel(r.eval(nu), r.eval(-nu)) < 1e-13);
        prop_assert!(r.eval(nu) >= r.commutator_bound(nu) * (1.0 - 1e-12));
    }

    #[test]
    fn spectra_nonnegative_and_even(seed_g in 0.0f64..0.98, gm in 1e-3f64..0.1, gc in 0.1f64..5.0, delta in -2.0f64..2.0,
                                    n in 0.0f64..50.0, nu in -5.0f64..5.0) {
        let p = unit_system(gm, gc);
        let r = stability(&p.mech, gc, delta, 1.0);
        let gmax = if delta == 0.0 { 1.0 } else { (r.rhs / r.lhs).sqrt().min(1.0) };
        let op = OperatingPoint::from_coupling(&p, delta, seed_g * gmax);
        let spec = OccupationSpectrum::flat(n).unwrap();
        let s = Spectra::new(&op, &spec);
        prop_assert!(s.sq_rp(nu) >= 0.0 && s.sq_th(nu) >= 0.0 && s.sp_th(nu) >= 0.0);
        prop_assert!(rel(s.sq_total(nu), s.sq_total(-nu)) < 1e-12);
        prop_assert!(rel(s.sp_total(nu), s.sp_total(-nu)) < 1e-12);
        prop_assert!((s.sqp_th(nu) - s.sqp_th(-nu)).abs() <= 1e-12 * s.sq_total(nu).max(s.sp_total(nu)));
        let t = s.transfer(nu);
        prop_assert!(rel(t.sq, s.sq_total(nu)) < 1e-9);
        prop_assert!(rel(t.sp, s.sp_total(nu)) < 1e-9);
        let h = Homodyne::new(&op, &spec, nu);
        let h2 = Homodyne::new(&op, &spec, nu + core::f64::consts::FRAC_PI_2);
        prop_assert!(h.s_inel(nu) * h2.s_inel(nu) >= 1.0 - 1e-12);
        prop_assert!(rel(h.s_inel(nu), h.s_inel(-nu)) < 1e-12);
        prop_assert!(h.s_th(nu) >= 0.0 && h.s_rp(nu) >= 0.0);
    }
}

#[test]
fn bistability_detected_by_raising_drive() {
    let (d0, q) = (3.0, 0.25);
    let mut k = 0.0;
    let mut seen = 1;
    while k < 50.0 {
        let n = detuning_roots(d0, q, k).len();
        if n == 3 {
            seen = 3;
            break;
        }
        k += 0.05;
    }
    assert_eq!(seen, 3);
    let roots = detuning_roots(d0, q, k);
    assert!(roots[2].primary);
}
