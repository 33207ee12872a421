//! Quadrature rules: Gauss-Legendre panels, trapezoid sums on sampled data,
//! and an adaptive Gauss-Kronrod (7/15) integrator for complex integrands.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Nodes and positive weights of a composite rule on one interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    /// Composite Gauss-Legendre rule with `per_panel` nodes on each panel
    /// `[breakpoints[i], breakpoints[i+1]]`.
    pub fn gauss_legendre_panels(breakpoints: &[f64], per_panel: usize) -> Result<Self> {
        check_breakpoints(breakpoints)?;
        let gl = legendre(per_panel)?;
        let mut nodes = Vec::with_capacity(per_panel * (breakpoints.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for pair in breakpoints.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            for &(x, w) in gl.as_node_weight_pairs() {
                nodes.push(a + half * (x + 1.0));
                weights.push(half * w);
            }
        }
        Ok(Self { nodes, weights })
    }

    /// Gauss-Legendre rule on `[0, b]` in the variable `s` with `m = b s^2`,
    /// for integrands that behave like powers of `sqrt(m)` near the origin.
    pub fn graded_origin_panel(b: f64, count: usize) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "panel end {b} must be positive"
            )));
        }
        let gl = legendre(count)?;
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for &(x, w) in gl.as_node_weight_pairs() {
            let s = 0.5 * (x + 1.0);
            nodes.push(b * s * s);
            weights.push(0.5 * w * 2.0 * b * s);
        }
        Ok(Self { nodes, weights })
    }

    /// The default KK-mass rule: 400 nodes on `[0, 20]`, eight panels of 50,
    /// the first one graded towards `m = 0`.
    pub fn default_mass_rule() -> Self {
        Self::mass_rule(20.0, 50).expect("static breakpoints are valid")
    }

    /// Eight-panel mass rule on `[0, m_max]` with `per_panel` nodes each.
    /// Breakpoints scale with `m_max`; the first panel is graded.
    pub fn mass_rule(m_max: f64, per_panel: usize) -> Result<Self> {
        const SHAPE: [f64; 9] = [0.0, 0.5, 1.0, 2.0, 4.0, 7.0, 10.0, 15.0, 20.0];
        let scale = m_max / 20.0;
        let breaks: Vec<f64> = SHAPE.iter().map(|b| b * scale).collect();
        let mut rule = Self::graded_origin_panel(breaks[1], per_panel)?;
        rule.extend(Self::gauss_legendre_panels(&breaks[1..], per_panel)?);
        Ok(rule)
    }

    pub fn extend(&mut self, other: Self) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Weighted sum of already-sampled values.
    pub fn sum(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

fn legendre(count: usize) -> Result<GaussLegendre> {
    let n = NonZeroUsize::new(count)
        .ok_or_else(|| Error::InvalidArgument("quadrature needs at least one node".into()))?;
    Ok(GaussLegendre::new(n))
}

fn check_breakpoints(breakpoints: &[f64]) -> Result<()> {
    if breakpoints.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two breakpoints".into(),
        ));
    }
    if breakpoints
        .windows(2)
        .any(|w| !(w[1] > w[0]) || !w[1].is_finite())
    {
        return Err(Error::InvalidArgument(
            "breakpoints must be finite and increasing".into(),
        ));
    }
    Ok(())
}

/// Trapezoid sum of uniformly spaced samples.
pub fn trapezoid(values: &[f64], dz: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dz * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Trapezoid sum with fourth-order Gregory end corrections, for samples
/// whose derivative does not vanish at the ends. Falls back to the plain
/// trapezoid below six samples.
pub fn gregory(values: &[f64], dz: f64) -> f64 {
    let n = values.len();
    if n < 6 {
        return trapezoid(values, dz);
    }
    const END: [f64; 3] = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
    let interior: f64 = values[3..n - 3].iter().sum();
    let ends: f64 = (0..3)
        .map(|k| END[k] * (values[k] + values[n - 1 - k]))
        .sum();
    dz * (interior + ends)
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Adaptive {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod(f: &mut impl FnMut(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let center = f(c);
    let mut kron = center * WGK[7];
    let mut gauss = center * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Globally adaptive G7/K15 quadrature of `f` over the panels given by
/// `breakpoints`. Bisects the worst interval until the summed error
/// estimate is below `max(abs_tol, rel_tol |I|)` or the interval budget
/// is spent.
pub fn adaptive_integrate(
    mut f: impl FnMut(f64) -> Complex64,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<Adaptive> {
    check_breakpoints(breakpoints)?;
    let mut intervals: Vec<(f64, f64, Complex64, f64)> = breakpoints
        .windows(2)
        .map(|w| {
            let (v, e) = kronrod(&mut f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let value: Complex64 = intervals.iter().map(|i| i.2).sum();
        let error: f64 = intervals.iter().map(|i| i.3).sum();
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Range("non-finite integrand".into()));
        }
        let target = abs_tol.max(rel_tol * value.norm());
        if error <= target || intervals.len() >= max_intervals {
            return Ok(Adaptive {
                value,
                error,
                converged: error <= target,
            });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one interval");
        let (a, b, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (v1, e1) = kronrod(&mut f, a, mid);
        let (v2, e2) = kronrod(&mut f, mid, b);
        intervals.push((a, mid, v1, e1));
        intervals.push((mid, b, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_weights_sum_to_length() {
        let rule = QuadRule::default_mass_rule();
        assert_eq!(rule.len(), 400);
        assert!((rule.weights.iter().sum::<f64>() - 20.0).abs() < 1e-12);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        assert!(rule.nodes.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn gregory_is_fourth_order() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let v: Vec<f64> = (0..=n).map(|i| (i as f64 * h).exp()).collect();
            (gregory(&v, h) - (1f64.exp() - 1.0)).abs()
        };
        let (e1, e2) = (err(20), err(40));
        assert!(e2 < 1e-7 && e1 / e2 > 12.0, "{e1} {e2}");
    }

    #[test]
    fn graded_panel_integrates_sqrt() {
        let rule = QuadRule::graded_origin_panel(0.5, 20).unwrap();
        let exact = 2.0 / 3.0 * 0.5f64.powf(1.5);
        assert!((rule.integrate(f64::sqrt) - exact).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_is_exact_for_lines() {
        let v: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 * 0.1 + 1.0).collect();
        assert!((trapezoid(&v, 0.1) - 2.0).abs() < 1e-14);
        assert_eq!(trapezoid(&[3.0], 0.1), 0.0);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // int_0^1 x^{-1/2} e^{ix} dx, reference from mpmath
        let r = adaptive_integrate(
            |x| Complex64::new(0.0, x).exp() / x.sqrt(),
            &[0.0, 1.0],
            1e-10,
            0.0,
            500,
        )
        .unwrap();
        assert!(r.converged);
        let reference = Complex64::new(1.809_048_475_130_67, 0.620_536_603_446_762_7);
        assert!((r.value - reference).norm() < 1e-9);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(QuadRule::gauss_legendre_panels(&[1.0, 0.0], 4).is_err());
        assert!(QuadRule::gauss_legendre_panels(&[0.0, 1.0], 0).is_err());
    }
}
