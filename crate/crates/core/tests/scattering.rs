use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use volcano_core::resonance::{refine_zero, zero_table};
use volcano_core::scattering::{
    amplitude, asymptotic_window, closed_form_phase_shifts, convention, phase_shift_numeric, s_hat,
    s_hat_real, unitarity_scan, CONVENTION_EVEN, CONVENTION_ODD,
};
use volcano_core::special::{hankel, HankelKind, RiemannPoint};
use volcano_core::{Error, Parity};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn order(parity: Parity) -> u32 {
    match parity {
        Parity::Even => 1,
        Parity::Odd => 2,
    }
}

/// Distance between two phases modulo pi.
fn mod_pi(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

fn closed_form_delta(parity: Parity, m: f64) -> f64 {
    let h = hankel(
        HankelKind::First,
        order(parity),
        &RiemannPoint::real(m).unwrap(),
    )
    .unwrap();
    m - 1.25 * PI - h.arg()
}

#[test]
fn unimodular_on_the_real_axis() {
    let grid: Vec<f64> = (0..500)
        .map(|i| 1e-3 + (50.0 - 1e-3) * i as f64 / 499.0)
        .collect();
    let worst = unitarity_scan(&grid).unwrap();
    println!("unitarity defect {worst:e}");
    assert!(worst < 1e-10);
    assert!((s_hat_real(Parity::Even, 3.0).unwrap().norm() - 1.0).abs() < 1e-12);
    let single = unitarity_scan(&[2.5]).unwrap();
    let direct = Parity::BOTH
        .iter()
        .map(|&p| (s_hat_real(p, 2.5).unwrap().norm() - 1.0).abs())
        .fold(0.0, f64::max);
    assert_eq!(single, direct);
}

#[test]
fn low_energy_limits() {
    let even = s_hat_real(Parity::Even, 1e-4).unwrap();
    let odd = s_hat_real(Parity::Odd, 1e-4).unwrap();
    assert!((even - c(0.0, 1.0)).norm() < 1e-3, "{even}");
    assert!((odd - c(0.0, -1.0)).norm() < 1e-3, "{odd}");
}

#[test]
fn continuous_in_the_mass() {
    let dm = 1e-2;
    for p in Parity::BOTH {
        let values: Vec<Complex64> = (10..5000)
            .map(|i| s_hat_real(p, i as f64 * dm).unwrap())
            .collect();
        for w in values.windows(3) {
            assert!((w[1] - w[0]).norm() < 3.0 * dm);
            assert!((w[2] - 2.0 * w[1] + w[0]).norm() < 1e-3);
        }
    }
}

#[test]
fn complex_masses_are_not_unimodular() {
    let m = RiemannPoint::from_complex(c(1.0, 0.3)).unwrap();
    for p in Parity::BOTH {
        let s = s_hat(p, &m).unwrap();
        println!("|s({p:?}, 1+0.3i)| = {}", s.norm());
        assert!((s.norm() - 1.0).abs() > 1e-3);
    }
}

#[test]
fn phase_shift_fits_the_closed_form() {
    for p in Parity::BOTH {
        for m in [0.5, 1.0, 2.0, 5.0] {
            let window = asymptotic_window(m, 2.5e-4, 4.0).unwrap();
            let fit = phase_shift_numeric(p, m, window).unwrap();
            let err = mod_pi(fit.delta, closed_form_delta(p, m));
            assert!(err < 1e-3, "{p:?} m={m} window {window:?} err {err:e}");
            assert!((fit.amplitude - (2.0 / PI).sqrt()).abs() < 1e-3);
        }
    }
}

#[test]
fn near_windows_carry_the_leading_phase_correction() {
    // At z in [20, 40] the 15/(8x) phase correction of H_2 is still ~3e-2.
    let fit = phase_shift_numeric(Parity::Odd, 2.0, (20.0, 40.0)).unwrap();
    let err = mod_pi(fit.delta, closed_form_delta(Parity::Odd, 2.0));
    println!("odd m=2 window [20, 40]: {err:e}");
    assert!(err > 1e-3 && err < 0.1);
}

#[test]
fn convention_constant_is_global() {
    for p in Parity::BOTH {
        let ratios: Vec<Complex64> = [0.5, 1.0, 2.0, 5.0]
            .iter()
            .map(|&m| {
                let window = asymptotic_window(m, 2.5e-4, 4.0).unwrap();
                let delta = phase_shift_numeric(p, m, window).unwrap().delta;
                s_hat_real(p, m).unwrap() / Complex64::from_polar(1.0, 2.0 * delta)
            })
            .collect();
        println!("{p:?} ratios {ratios:?}");
        for r in &ratios {
            assert!((r - convention(p)).norm() < 2e-3);
        }
    }
    assert_eq!((CONVENTION_EVEN, CONVENTION_ODD), (1.0, -1.0));
}

#[test]
fn tracked_phase_is_continuous() {
    let masses: Vec<f64> = (1..=1000).map(|i| i as f64 * 0.01).collect();
    for p in Parity::BOTH {
        let d = closed_form_phase_shifts(p, &masses).unwrap();
        for w in d.windows(2) {
            assert!((w[1] - w[0]).abs() < 0.05);
        }
        for (i, &m) in masses.iter().enumerate().step_by(97) {
            assert!(mod_pi(d[i], closed_form_delta(p, m)) < 1e-12);
            let s = s_hat_real(p, m).unwrap();
            let e = Complex64::from_polar(convention(p), 2.0 * d[i]);
            assert!((s - e).norm() < 1e-12);
        }
    }
}

#[test]
fn amplitudes_reduce_to_the_one_dimensional_matrices() {
    let a = amplitude(2.0, 1.0, Parity::Even).unwrap().value;
    let point = RiemannPoint::real(2.0).unwrap();
    let display = Complex64::from_polar(1.0, 4.0) / Complex64::i()
        * hankel(HankelKind::Second, 1, &point).unwrap()
        / hankel(HankelKind::First, 1, &point).unwrap();
    assert!((a - display).norm() < 1e-14);
    assert!((a.norm() - 1.0).abs() < 1e-12);
    assert!((a - s_hat_real(Parity::Even, 2.0).unwrap()).norm() < 1e-14);
    for p in Parity::BOTH {
        for (sigma, w) in [(1.5, 0.4), (3.0, -0.9), (0.2, 1.0)] {
            let x = sigma * f64::abs(w);
            let pos = amplitude(sigma, w, p).unwrap().value;
            let neg = amplitude(-sigma, w, p).unwrap().value;
            let s = s_hat_real(p, x).unwrap();
            assert!((pos - s).norm() < 1e-13);
            assert!((neg - 1.0 / s).norm() < 1e-13);
            assert!((neg.norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn amplitude_is_continuous_at_the_equator() {
    for p in Parity::BOTH {
        for sigma in [1.0, -1.0] {
            let limit = amplitude(sigma, 0.0, p).unwrap().value;
            let near = amplitude(sigma, 1e-6, p).unwrap().value;
            assert!((near - limit).norm() < 1e-4);
        }
    }
    assert!((amplitude(1.0, 0.0, Parity::Even).unwrap().value - c(0.0, 1.0)).norm() < 1e-15);
    assert!((amplitude(1.0, 0.0, Parity::Odd).unwrap().value - c(0.0, -1.0)).norm() < 1e-15);
}

fn first_zeros() -> Vec<(Parity, RiemannPoint)> {
    zero_table()
        .into_iter()
        .filter(|e| e.row == 1)
        .map(|e| {
            let z = refine_zero(e.nu, HankelKind::First, e.sheet, e.value).unwrap();
            let parity = if e.nu == 1 { Parity::Even } else { Parity::Odd };
            (parity, z.point().unwrap())
        })
        .collect()
}

fn offset(p: &RiemannPoint, d: Complex64) -> RiemannPoint {
    RiemannPoint::on_sheet(p.principal_value() + d, p.sheet_index()).unwrap()
}

#[test]
fn blow_up_at_first_zeros_is_a_simple_pole() {
    let zeros = first_zeros();
    assert_eq!(zeros.len(), 4);
    for (p, z) in zeros {
        for angle in [0.0, 1.0, 2.5, 4.0] {
            let dir = Complex64::from_polar(1.0, angle);
            let near = s_hat(p, &offset(&z, dir * 5e-4)).unwrap().norm();
            if z.sheet_index() == 0 {
                assert!(near > 1e3, "{p:?} {z:?}: {near}");
            }
            let scaled: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5]
                .iter()
                .map(|&d| s_hat(p, &offset(&z, dir * d)).unwrap().norm() * d)
                .collect();
            let (lo, hi) = scaled
                .iter()
                .fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
            assert!(hi / lo < 1.2, "{scaled:?}");
        }
        assert!(matches!(s_hat(p, &z), Err(Error::AtResonance { .. })));
    }
}

#[test]
fn inverse_is_smooth_across_a_zero() {
    let (p, z) = first_zeros()[0];
    let h = 1e-3;
    // Line through the zero, passing 1e-5 to its side.
    let inv: Vec<Complex64> = (-20..=20)
        .map(|k| {
            let d = c(k as f64 * h, 1e-5);
            1.0 / s_hat(p, &offset(&z, d)).unwrap()
        })
        .collect();
    let scale = inv.iter().fold(0.0, |a: f64, v| a.max(v.norm()));
    assert!(scale.is_finite() && scale < 1.0);
    for w in inv.windows(3) {
        assert!((w[2] - 2.0 * w[1] + w[0]).norm() < 1e-4 * scale.max(1e-2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn amplitudes_are_unimodular(sigma in -40.0f64..40.0, w in -1.0f64..1.0, odd in any::<bool>()) {
        prop_assume!(sigma.abs() > 1e-3);
        let p = if odd { Parity::Odd } else { Parity::Even };
        let a = amplitude(sigma, w, p).unwrap();
        prop_assert!((a.value.norm() - 1.0).abs() < 1e-10);
    }
}
