//! Power series for `J_n` and the Neumann expansion of `Y_n`, integer `n`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::RiemannPoint;

const MAX_TERMS: usize = 200;
const REL_TOL: f64 = 1e-17;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Terms `(-z^2/4)^k (z/2)^n / (k! (n+k)!)` of the `J_n` series. Calls
/// `visit(k, term)` until the tail is negligible; returns false if the
/// term budget ran out first.
fn for_each_term(n: u32, z: Complex64, mut visit: impl FnMut(usize, Complex64) -> f64) -> bool {
    let half = z * 0.5;
    let q = -half * half;
    let mut term = half.powu(n) / factorial(n);
    for k in 0..MAX_TERMS {
        if k > 0 {
            term = term * q / (k as f64 * (n as f64 + k as f64));
        }
        let running = visit(k, term);
        if term.norm() <= REL_TOL * running && k > 0 {
            return true;
        }
        if term.norm() == 0.0 {
            return true;
        }
    }
    false
}

/// `J_n(z)` by direct summation. The flag reports convergence within the
/// term budget.
pub(crate) fn bessel_j_series(n: u32, z: Complex64) -> (Complex64, bool) {
    let mut sum = Complex64::new(0.0, 0.0);
    let converged = for_each_term(n, z, |_, t| {
        sum += t;
        sum.norm()
    });
    (sum, converged)
}

/// `Y_n(z)` with `log z` taken from the surface argument of `z`.
pub(crate) fn bessel_y_series(n: u32, z: &RiemannPoint) -> (Complex64, bool) {
    let zp = z.principal_value();
    let half = zp * 0.5;
    let mut j = Complex64::new(0.0, 0.0);
    let mut digamma_sum = Complex64::new(0.0, 0.0);
    // psi(k+1) + psi(n+k+1), updated incrementally through harmonic numbers.
    let mut harmonic_k = 0.0;
    let mut harmonic_nk: f64 = (1..=n).map(|i| 1.0 / f64::from(i)).sum();
    let converged = for_each_term(n, zp, |k, t| {
        if k > 0 {
            harmonic_k += 1.0 / k as f64;
            harmonic_nk += 1.0 / (n as f64 + k as f64);
        }
        let psi = -2.0 * EULER_GAMMA + harmonic_k + harmonic_nk;
        j += t;
        digamma_sum += t * psi;
        j.norm().max(digamma_sum.norm())
    });

    let log_half = z.ln() - std::f64::consts::LN_2;
    let mut finite_part = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let coeff = factorial(n - k - 1) / factorial(k);
        finite_part += half.powi(2 * k as i32 - n as i32) * coeff;
    }
    let y = (j * log_half * 2.0 - finite_part - digamma_sum) / PI;
    (y, converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Brute-force 50-term summation with explicit factorials.
    fn j_oracle(n: u32, x: f64) -> f64 {
        (0..50)
            .map(|k: u32| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * (x / 2.0).powi((n + 2 * k) as i32) / (factorial(k) * factorial(n + k))
            })
            .sum()
    }

    #[test]
    fn j_matches_brute_force() {
        for n in 0..=3 {
            for &x in &[0.1, 1.0, 2.5, 7.0] {
                let (v, ok) = bessel_j_series(n, Complex64::new(x, 0.0));
                assert!(ok);
                assert!((v.re - j_oracle(n, x)).abs() < 1e-13, "n={n} x={x}");
                assert_eq!(v.im, 0.0);
            }
        }
    }

    #[test]
    fn j_at_origin() {
        assert_eq!(
            bessel_j_series(0, Complex64::new(0.0, 0.0)).0,
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            bessel_j_series(1, Complex64::new(0.0, 0.0)).0,
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn y_small_argument_leading_terms() {
        // Y_1(x) ~ -2/(pi x), Y_2(x) ~ -4/(pi x^2)
        let x = 1e-6;
        let p = RiemannPoint::real(x).unwrap();
        let y1 = bessel_y_series(1, &p).0.re;
        let y2 = bessel_y_series(2, &p).0.re;
        assert!((x * y1 + 2.0 / PI).abs() < 1e-10);
        assert!((x * x * y2 + 4.0 / PI).abs() < 1e-10);
    }
}
