use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use volcano_core::fit::line_fit;
use volcano_core::resolvent::{
    apply_kernel, apply_shifted_operator, continuation_probe, kernel_core, kernel_parity,
    kernel_parity_on, resolvent_direct_solve, truncated_kernel_4d, ComplexProfile, ResolventQuery,
};
use volcano_core::resonance::refine_zero;
use volcano_core::special::{hankel, HankelKind, RiemannPoint};
use volcano_core::spectrum::uniform_grid;
use volcano_core::transform::HalfLineFunction;
use volcano_core::{Error, Parity};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn bump(center: f64, half_width: f64) -> impl Fn(f64) -> f64 {
    move |z| {
        let s = (z - center) / half_width;
        if s.abs() < 1.0 {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        } else {
            0.0
        }
    }
}

fn h(kind: HankelKind, nu: u32, x: Complex64) -> Complex64 {
    hankel(kind, nu, &RiemannPoint::from_complex(x).unwrap()).unwrap()
}

/// Fundamental solutions with `f1(0) = 0, f1'(0) = 1`, `f2(0) = 1,
/// f2'(0) = 0` and the constant `C` making `f2 + C f1` decay, written out
/// term by term.
struct Fundamental {
    m: Complex64,
}

impl Fundamental {
    fn f1(&self, z: f64) -> Complex64 {
        let (m, s) = (self.m, 1.0 + z);
        let (a, b) = (HankelKind::First, HankelKind::Second);
        c(0.0, -PI / 4.0) * s.sqrt() * (h(b, 2, m) * h(a, 2, m * s) - h(a, 2, m) * h(b, 2, m * s))
    }

    fn f2(&self, z: f64) -> Complex64 {
        let (m, s) = (self.m, 1.0 + z);
        let (a, b) = (HankelKind::First, HankelKind::Second);
        let p2 = m * h(b, 1, m) - 1.5 * h(b, 2, m);
        let p1 = m * h(a, 1, m) - 1.5 * h(a, 2, m);
        -c(0.0, -PI / 4.0) * s.sqrt() * (p2 * h(a, 2, m * s) - p1 * h(b, 2, m * s))
    }

    fn c(&self) -> Complex64 {
        let m = self.m;
        let a = HankelKind::First;
        (m * h(a, 1, m) - 1.5 * h(a, 2, m)) / h(a, 2, m)
    }

    fn kernel(&self, parity: Parity, z: f64, zp: f64) -> Complex64 {
        let (lo, hi) = (z.min(zp), z.max(zp));
        let decaying = self.f2(hi) + self.c() * self.f1(hi);
        match parity {
            Parity::Odd => self.f1(lo) * decaying,
            Parity::Even => -(self.f2(lo) - 1.5 * self.f1(lo)) * decaying / (1.5 + self.c()),
        }
    }
}

#[test]
fn kernels_match_the_fundamental_solution_construction() {
    for m in [c(1.0, 0.5), c(0.5, 1.0), c(-0.7, 0.4)] {
        let fund = Fundamental { m };
        for parity in Parity::BOTH {
            for (z, zp) in [(0.0, 2.0), (0.5, 0.5), (3.0, 1.0), (0.2, 6.0)] {
                let k = kernel_parity(&ResolventQuery {
                    m,
                    parity,
                    z,
                    z_prime: zp,
                })
                .unwrap();
                let oracle = fund.kernel(parity, z, zp);
                assert!(
                    (k - oracle).norm() < 1e-10 * oracle.norm().max(1e-3),
                    "{m} {parity:?} {z} {zp}: {k} {oracle}"
                );
            }
        }
    }
}

#[test]
fn boundary_conditions_in_the_first_argument() {
    let m = c(1.0, 1.0);
    let k = |p: Parity, z: f64| {
        kernel_parity(&ResolventQuery {
            m,
            parity: p,
            z,
            z_prime: 2.0,
        })
        .unwrap()
    };
    for zp in [0.0, 0.7, 2.0, 9.0] {
        let q = ResolventQuery {
            m,
            parity: Parity::Odd,
            z: 0.0,
            z_prime: zp,
        };
        assert_eq!(kernel_parity(&q).unwrap(), c(0.0, 0.0));
    }
    let step = 1e-3;
    let v: Vec<Complex64> = (0..5).map(|i| k(Parity::Even, i as f64 * step)).collect();
    let d = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * step);
    let robin = (d + 1.5 * v[0]).norm();
    println!("Robin residual {robin:e}");
    assert!(robin < 1e-5);
    // The order-2 bracket vanishes at z = 0 and cannot satisfy the Robin
    // condition.
    assert_eq!(kernel_core(m, 0.0, 2.0).unwrap(), c(0.0, 0.0));
}

#[test]
fn shared_kernel_decays_at_the_imaginary_rate() {
    let m = c(1.0, 0.5);
    let zs: Vec<f64> = (0..=68).map(|i| 3.0 + 0.25 * i as f64).collect();
    let logs: Vec<f64> = zs
        .iter()
        .map(|&zp| kernel_core(m, 1.0, zp).unwrap().norm().ln())
        .collect();
    let fit = line_fit(&zs, &logs).unwrap();
    assert!((fit.slope + 0.5).abs() < 0.05, "{}", fit.slope);
}

fn grid(dz: f64) -> Vec<f64> {
    uniform_grid(30.0, dz).unwrap()
}

fn source(dz: f64) -> HalfLineFunction {
    HalfLineFunction::from_fn(&grid(dz), bump(2.0, 1.5)).unwrap()
}

#[test]
fn green_property_and_direct_solve_agree() {
    for m in [c(1.0, 0.5), c(0.5, 1.0)] {
        for parity in Parity::BOTH {
            let mut errors = vec![];
            for dz in [0.04, 0.02, 0.01] {
                let f = source(dz);
                let u = apply_kernel(parity, m, &f).unwrap();
                let hu = apply_shifted_operator(parity, m, &u).unwrap();
                let target = ComplexProfile {
                    z_grid: f.z_grid.clone(),
                    values: f.values.iter().map(|&v| c(v, 0.0)).collect(),
                };
                let green = hu.relative_l2(&target).unwrap();
                let direct = resolvent_direct_solve(parity, m, &f).unwrap();
                let mutual = u.relative_l2(&direct).unwrap();
                errors.push((green, mutual));
            }
            println!("{m} {parity:?} {errors:?}");
            let (green, mutual) = errors[2];
            assert!(green < 1e-3 && mutual < 1e-3);
            for w in errors.windows(2) {
                assert!(w[0].1 / w[1].1 > 3.5, "mutual order {m} {parity:?}");
            }
        }
    }
}

#[test]
fn direct_solve_is_linear_and_guarded() {
    let f = source(0.02);
    let m = c(1.0, 0.5);
    for parity in Parity::BOTH {
        let a = resolvent_direct_solve(parity, m, &f).unwrap();
        let doubled =
            HalfLineFunction::new(f.z_grid.clone(), f.values.iter().map(|v| 2.0 * v).collect())
                .unwrap();
        let b = resolvent_direct_solve(parity, m, &doubled).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((2.0 * x - y).norm() <= 1e-13 * y.norm().max(1e-300));
        }
        let zero = HalfLineFunction::zeros(&f.z_grid).unwrap();
        let u = resolvent_direct_solve(parity, m, &zero).unwrap();
        assert!(u.values.iter().all(|v| *v == c(0.0, 0.0)));
    }
    assert!(matches!(
        resolvent_direct_solve(Parity::Even, c(1.0, 0.05), &f),
        Err(Error::Precondition(_))
    ));
    let short =
        HalfLineFunction::from_fn(&uniform_grid(10.0, 0.02).unwrap(), bump(2.0, 1.0)).unwrap();
    assert!(matches!(
        resolvent_direct_solve(Parity::Even, c(1.0, 0.5), &short),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn truncated_kernel_limits_and_decay() {
    let lambda = c(1.0, 0.8);
    assert_eq!(
        truncated_kernel_4d(lambda, 0.0, 1.0, 0.5, 1.0, true).unwrap(),
        c(0.0, 0.0)
    );
    let at_zero = truncated_kernel_4d(lambda, 2.0, 0.0, 0.5, 1.0, true).unwrap();
    let near = truncated_kernel_4d(lambda, 2.0, 1e-6, 0.5, 1.0, true).unwrap();
    assert!(at_zero.norm() > 0.0 && at_zero.re.is_finite());
    assert!((at_zero - near).norm() < 1e-9 * at_zero.norm());

    let zs: Vec<f64> = (0..12).map(|i| 2.0 + i as f64).collect();
    let logs: Vec<f64> = zs
        .iter()
        .map(|&zp| {
            truncated_kernel_4d(lambda, 2.0, 0.7, 0.5, zp, false)
                .unwrap()
                .norm()
                .ln()
        })
        .collect();
    let fit = line_fit(&zs, &logs).unwrap();
    println!("4-D kernel z' slope {}", fit.slope);
    assert!(fit.slope < 0.0);
    assert!(truncated_kernel_4d(c(1.0, -0.1), 2.0, 0.7, 0.5, 1.0, true).is_err());
}

#[test]
fn continuation_below_the_real_axis_is_finite_and_smooth() {
    // Semicircle m = 1 + 0.3 e^{i theta}, theta from pi/2 down to -pi/2.
    let path: Vec<RiemannPoint> = (0..=200)
        .map(|k| {
            let theta = PI / 2.0 - PI * k as f64 / 200.0;
            RiemannPoint::from_complex(c(1.0, 0.0) + Complex64::from_polar(0.3, theta)).unwrap()
        })
        .collect();
    let values = continuation_probe(Parity::Even, &path, 0.5, 2.0).unwrap();
    let scale = values.iter().fold(0.0, |a: f64, v| a.max(v.norm()));
    for w in values.windows(2) {
        assert!((w[1] - w[0]).norm() < 0.05 * scale);
    }
}

#[test]
fn continuation_blows_up_at_the_first_zero() {
    let zero = refine_zero(1, HankelKind::First, 0, c(-0.419, -0.577))
        .unwrap()
        .position;
    let dir = Complex64::from_polar(1.0, 0.3);
    let scaled: Vec<f64> = [1e-1, 3e-2, 1e-2, 3e-3]
        .iter()
        .map(|&d| {
            let p = RiemannPoint::from_complex(zero + dir * d).unwrap();
            continuation_probe(Parity::Even, &[p], 0.5, 2.0).unwrap()[0].norm() * d
        })
        .collect();
    let (lo, hi) = scaled
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo < 1.5, "{scaled:?}");
    let at = RiemannPoint::from_complex(zero + dir * 1e-4).unwrap();
    assert!(matches!(
        continuation_probe(Parity::Even, &[at], 0.5, 2.0),
        Err(Error::NearZero { .. })
    ));
    let exact = RiemannPoint::from_complex(zero).unwrap();
    assert!(matches!(
        kernel_parity_on(Parity::Even, &exact, 0.5, 2.0),
        Err(Error::AtResonance { .. })
    ));
}

#[test]
fn closed_loop_returns_to_its_start() {
    let center = c(2.0, -0.5);
    let start = RiemannPoint::from_complex(center + 0.3).unwrap();
    let mut path = vec![start];
    for k in 1..=64 {
        let next = center + Complex64::from_polar(0.3, 2.0 * PI * k as f64 / 64.0);
        let p = path.last().unwrap().track_to(next).unwrap();
        path.push(p);
    }
    let values = continuation_probe(Parity::Odd, &path, 1.0, 1.5).unwrap();
    assert!((values[0] - values[64]).norm() < 1e-8 * values[0].norm());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 5, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn green_property_for_random_masses(re in 0.2f64..2.0, im in 0.5f64..1.5, center in 1.5f64..4.0, odd in any::<bool>()) {
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let m = c(re, im);
        let f = HalfLineFunction::from_fn(&grid(0.02), bump(center, 1.2)).unwrap();
        let u = apply_kernel(parity, m, &f).unwrap();
        let hu = apply_shifted_operator(parity, m, &u).unwrap();
        let target = ComplexProfile { z_grid: f.z_grid.clone(), values: f.values.iter().map(|&v| c(v, 0.0)).collect() };
        prop_assert!(hu.relative_l2(&target).unwrap() < 1e-3);
    }
}
