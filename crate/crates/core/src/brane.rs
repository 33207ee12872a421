//! Field values on and near the brane for data separable in `(|x|, z)`,
//! decay observables, and brane quasimodes.
//!
//! A separable term `g(|x|) h(z)` evolves mode by mode: the radial part is
//! expanded in three-dimensional plane waves `k`, the `z` part in the zero
//! mode and the continua `u_+-(z, m)`, and each pair oscillates at
//! `omega = sqrt(k^2 + m^2)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fit::{log_log_fit, LineFit};
use crate::quadrature::{trapezoid, QuadRule};
use crate::special::{hankel, HankelKind, RiemannPoint};
use crate::spectrum::{potential, MassColumn, ROBIN};
use crate::transform::HalfLineFunction;
use crate::{Error, Parity, Result};

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// Relative size of the quadrature tail above which a value carries a
/// warning.
pub const TAIL_WARNING: f64 = 1e-3;

/// Radial profile `g(r)` sampled at `r_i = i dr`, vanishing beyond the last
/// sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub dr: f64,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn from_fn(radius: f64, dr: f64, g: impl Fn(f64) -> f64) -> Result<Self> {
        if !(radius > 0.0 && dr > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(
                "radial profile needs positive radius and dr".into(),
            ));
        }
        let n = (radius / dr).round() as usize;
        let mut values: Vec<f64> = (0..=n).map(|i| g(i as f64 * dr)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite radial sample".into()));
        }
        values.push(0.0);
        Ok(Self { dr, values })
    }

    /// Largest radius with a nonzero sample.
    pub fn radius(&self) -> f64 {
        self.values
            .iter()
            .rposition(|v| *v != 0.0)
            .map_or(0.0, |i| i as f64 * self.dr)
    }

    /// Three-dimensional Fourier transform of the radial function,
    /// `sqrt(2/pi) k^{-1} int r sin(k r) g(r) dr`.
    pub fn transform(&self, k: f64) -> f64 {
        let samples: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let r = i as f64 * self.dr;
                if k == 0.0 {
                    r * r * g
                } else {
                    r * (k * r).sin() / k * g
                }
            })
            .collect();
        SQRT_2_OVER_PI * trapezoid(&samples, self.dr)
    }
}

/// Whether a term enters as position or velocity data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Position,
    Velocity,
}

/// Transverse profile `h(z)` of a separable term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ZProfile {
    /// Exactly `f0(|z|)`.
    ZeroMode,
    /// Samples on the grid `-L, ..., L`; zero beyond.
    Sampled { dz: f64, values: Vec<f64> },
}

impl ZProfile {
    pub fn from_fn(half_length: f64, dz: f64, h: impl Fn(f64) -> f64) -> Result<Self> {
        if !(half_length > 0.0 && dz > 0.0) {
            return Err(Error::InvalidArgument(
                "z profile needs positive length and dz".into(),
            ));
        }
        let n = (half_length / dz).round() as i64;
        let values: Vec<f64> = (-n..=n).map(|i| h(i as f64 * dz)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite z sample".into()));
        }
        Ok(ZProfile::Sampled { dz, values })
    }

    /// Largest |z| with a nonzero sample.
    pub fn extent(&self) -> f64 {
        match self {
            ZProfile::ZeroMode => f64::INFINITY,
            ZProfile::Sampled { dz, values } => {
                let mid = values.len() / 2;
                values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .fold(0.0, |a, (i, _)| a.max((i as f64 - mid as f64).abs() * dz))
            }
        }
    }

    fn value_at_zero(&self) -> f64 {
        match self {
            ZProfile::ZeroMode => 1.0,
            ZProfile::Sampled { values, .. } => values[values.len() / 2],
        }
    }

    fn half_lines(&self) -> Result<Option<(HalfLineFunction, HalfLineFunction)>> {
        let ZProfile::Sampled { dz, values } = self else {
            return Ok(None);
        };
        let n = values.len();
        if n < 5 || n % 2 == 0 {
            return Err(Error::InvalidArgument(
                "z profile needs an odd sample count >= 5".into(),
            ));
        }
        let mid = n / 2;
        let grid: Vec<f64> = (0..=mid).map(|k| k as f64 * dz).collect();
        let even = (0..=mid)
            .map(|k| 0.5 * (values[mid + k] + values[mid - k]))
            .collect();
        let odd = (0..=mid)
            .map(|k| 0.5 * (values[mid + k] - values[mid - k]))
            .collect();
        Ok(Some((
            HalfLineFunction::new(grid.clone(), even)?,
            HalfLineFunction::new(grid, odd)?,
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub radial: RadialProfile,
    pub z: ZProfile,
    pub slot: Slot,
}

/// Cauchy data `(Phi_0, Phi_1)` as a sum of separable terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableData {
    pub terms: Vec<SeparableTerm>,
}

impl SeparableData {
    /// `Phi_0(0, 0)`.
    pub fn position_at_origin(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.slot == Slot::Position)
            .map(|t| t.radial.values[0] * t.z.value_at_zero())
            .sum()
    }
}

/// Quadrature settings for the brane synthesis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BraneSettings {
    /// Plane-wave cutoff.
    pub k_max: f64,
    /// Mass cutoff of the continuum.
    pub m_max: f64,
    pub nodes_per_panel: usize,
    /// Panels are narrowed until `width * horizon` stays below this phase.
    pub max_phase_per_panel: f64,
    /// Largest `t + distance` the mass rule must resolve.
    pub horizon: f64,
}

impl Default for BraneSettings {
    fn default() -> Self {
        Self {
            k_max: 20.0,
            m_max: 8.0,
            nodes_per_panel: 40,
            max_phase_per_panel: 30.0,
            horizon: 20.0,
        }
    }
}

/// Gauss-Legendre panels on `[0, top]` whose width keeps the phase
/// `width * horizon` below the limit; at least ten panels.
fn phase_rule(top: f64, horizon: f64, max_phase: f64, per_panel: usize) -> Result<QuadRule> {
    let width = (top / 10.0).min(max_phase / horizon.max(1.0));
    let panels = (top / width).ceil() as usize;
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| top * i as f64 / panels as f64)
        .collect();
    QuadRule::gauss_legendre_panels(&breaks, per_panel)
}

/// Mass rule: phase-limited panels with the first one graded towards the
/// origin.
fn mass_rule(s: &BraneSettings) -> Result<QuadRule> {
    let base = phase_rule(s.m_max, s.horizon, s.max_phase_per_panel, s.nodes_per_panel)?;
    let width = s.m_max / (base.len() / s.nodes_per_panel) as f64;
    let mut rule = QuadRule::graded_origin_panel(width, s.nodes_per_panel)?;
    rule.extend(QuadRule {
        nodes: base.nodes[s.nodes_per_panel..].to_vec(),
        weights: base.weights[s.nodes_per_panel..].to_vec(),
    });
    Ok(rule)
}

/// Field value split into its zero-mode and continuum parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BraneValue {
    pub t: f64,
    pub graviton: f64,
    pub kk: f64,
    pub total: f64,
    pub warning: Option<String>,
}

#[derive(Clone, Debug)]
struct PreparedTerm {
    radial: RadialProfile,
    slot: Slot,
    zero_mode: f64,
    even: Vec<f64>,
    odd: Vec<f64>,
}

/// Time factor of one plane-wave/mass pair.
fn time_factor(slot: Slot, omega: f64, t: f64) -> f64 {
    match slot {
        Slot::Position => (omega * t).cos(),
        Slot::Velocity => {
            if omega == 0.0 {
                t
            } else {
                (omega * t).sin() / omega
            }
        }
    }
}

/// Precomputed transforms of separable data.
#[derive(Clone, Debug)]
pub struct BraneSynthesis {
    terms: Vec<PreparedTerm>,
    pub rule: QuadRule,
    pub settings: BraneSettings,
}

impl BraneSynthesis {
    pub fn new(data: &SeparableData, settings: &BraneSettings) -> Result<Self> {
        if data.terms.is_empty() {
            return Err(Error::InvalidArgument("separable data has no terms".into()));
        }
        let rule = mass_rule(settings)?;
        let columns: Vec<MassColumn> = rule
            .nodes
            .par_iter()
            .map(|&m| MassColumn::new(m))
            .collect::<Result<_>>()?;
        let mut terms = Vec::with_capacity(data.terms.len());
        for term in &data.terms {
            let (zero_mode, even, odd) = match term.z.half_lines()? {
                None => (1.0, vec![0.0; rule.len()], vec![0.0; rule.len()]),
                Some((e, o)) => {
                    // Exact norm int_R f0^2 = 1 with data vanishing beyond
                    // the grid; F_+ f0 = 0 makes F_+ of the raw even part the
                    // continuum coefficient.
                    let c = 2.0 * e.zero_mode_overlap();
                    let last = e
                        .values
                        .iter()
                        .zip(&o.values)
                        .rposition(|(a, b)| *a != 0.0 || *b != 0.0)
                        .unwrap_or(0);
                    let pairs: Vec<(f64, f64)> = columns
                        .par_iter()
                        .map(|col| {
                            let mut pe = vec![0.0; last + 1];
                            let mut po = vec![0.0; last + 1];
                            for i in 0..=last {
                                let (up, um) = col.eval_both(e.z_grid[i])?;
                                pe[i] = e.values[i] * up;
                                po[i] = o.values[i] * um;
                            }
                            let h = e.dz();
                            Ok((trapezoid(&pe, h), trapezoid(&po, h)))
                        })
                        .collect::<Result<_>>()?;
                    let (even, odd) = pairs.into_iter().unzip();
                    (c, even, odd)
                }
            };
            terms.push(PreparedTerm {
                radial: term.radial.clone(),
                slot: term.slot,
                zero_mode,
                even,
                odd,
            });
        }
        Ok(Self {
            terms,
            rule,
            settings: settings.clone(),
        })
    }

    fn k_rule(&self, horizon: f64) -> Result<QuadRule> {
        let s = &self.settings;
        phase_rule(s.k_max, horizon, s.max_phase_per_panel, s.nodes_per_panel)
    }

    fn transforms(&self, k: &QuadRule) -> Vec<Vec<f64>> {
        self.terms
            .iter()
            .map(|term| {
                k.nodes
                    .par_iter()
                    .map(|&kk| term.radial.transform(kk))
                    .collect()
            })
            .collect()
    }

    /// `sqrt(2/pi) sum_k w_k k^2 g^(k) T(omega t)` at `r = 0` for every
    /// mass node, per term.
    fn origin_kernels(&self, t: f64, k: &QuadRule, ghat: &[Vec<f64>]) -> Vec<Vec<f64>> {
        self.terms
            .iter()
            .zip(ghat)
            .map(|(term, gh)| {
                self.rule
                    .nodes
                    .par_iter()
                    .map(|&m| {
                        let s: f64 = k
                            .nodes
                            .iter()
                            .zip(&k.weights)
                            .zip(gh)
                            .map(|((&kk, &w), &g)| {
                                w * kk * kk * g * time_factor(term.slot, kk.hypot(m), t)
                            })
                            .sum();
                        SQRT_2_OVER_PI * s
                    })
                    .collect()
            })
            .collect()
    }

    /// Graviton field `sum_terms c f0(0) W(t, r; 0)` at radius `r` on the
    /// brane.
    fn graviton_at(&self, t: f64, r: f64, k: &QuadRule, ghat: &[Vec<f64>]) -> f64 {
        self.terms
            .iter()
            .zip(ghat)
            .filter(|(term, _)| term.zero_mode != 0.0)
            .map(|(term, gh)| {
                let s: f64 = k
                    .nodes
                    .iter()
                    .zip(&k.weights)
                    .zip(gh)
                    .map(|((&kk, &w), &g)| {
                        let sinc = if r == 0.0 {
                            1.0
                        } else {
                            (kk * r).sin() / (kk * r)
                        };
                        w * kk * kk * g * sinc * time_factor(term.slot, kk, t)
                    })
                    .sum();
                term.zero_mode * SQRT_2_OVER_PI * s
            })
            .sum()
    }

    /// `Phi(t, x = 0, z = 0)`.
    pub fn brane_field(&self, t: f64) -> Result<BraneValue> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument("t must be finite".into()));
        }
        let k = self.k_rule(t.abs())?;
        let ghat = self.transforms(&k);
        let graviton = self.graviton_at(t, 0.0, &k, &ghat);
        let kernels = self.origin_kernels(t, &k, &ghat);
        let u0: Vec<f64> = self
            .rule
            .nodes
            .par_iter()
            .map(|&m| crate::spectrum::u_plus(0.0, m))
            .collect::<Result<_>>()?;
        let mut kk = 0.0;
        for (term, w) in self.terms.iter().zip(&kernels) {
            for j in 0..self.rule.len() {
                kk += self.rule.weights[j] * term.even[j] * u0[j] * w[j];
            }
        }
        let total = graviton + kk;
        let tail = self.tail_estimate(&k, &ghat);
        let warning = (tail > TAIL_WARNING * total.abs()).then(|| {
            format!(
                "quadrature tail {tail:.2e} exceeds {TAIL_WARNING:.0e} of |value| {:.2e}",
                total.abs()
            )
        });
        Ok(BraneValue {
            t,
            graviton,
            kk,
            total,
            warning,
        })
    }

    /// Bound on what the `k` and `m` cutoffs discard: integrand size on the
    /// last panel times the cutoff.
    fn tail_estimate(&self, k: &QuadRule, ghat: &[Vec<f64>]) -> f64 {
        let s = &self.settings;
        let top_k = |gh: &Vec<f64>| {
            k.nodes
                .iter()
                .zip(gh)
                .filter(|(kk, _)| **kk >= 0.9 * s.k_max)
                .fold(0.0_f64, |a, (kk, g)| a.max((kk * kk * g).abs()))
        };
        let top_m = |c: &Vec<f64>| {
            self.rule
                .nodes
                .iter()
                .zip(c)
                .filter(|(m, _)| **m >= 0.9 * s.m_max)
                .fold(0.0_f64, |a, (_, v)| a.max(v.abs()))
        };
        self.terms
            .iter()
            .zip(ghat)
            .map(|(term, gh)| {
                let g_origin = term.radial.values[0].abs().max(1e-300);
                top_k(gh) * s.k_max + g_origin * (top_m(&term.even) + top_m(&term.odd)) * s.m_max
            })
            .sum()
    }

    /// `max_{r <= r_max} |graviton(t, r, z = 0)|` on a grid of spacing `dr`.
    pub fn graviton_brane_sup(&self, t: f64, r_max: f64, dr: f64) -> Result<f64> {
        if !(dr > 0.0 && r_max >= 0.0) {
            return Err(Error::InvalidArgument("need dr > 0 and r_max >= 0".into()));
        }
        let k = self.k_rule(t.abs() + r_max)?;
        let ghat = self.transforms(&k);
        let n = (r_max / dr).ceil() as usize;
        Ok((0..=n)
            .into_par_iter()
            .map(|i| self.graviton_at(t, i as f64 * dr, &k, &ghat).abs())
            .reduce(|| 0.0, f64::max))
    }

    /// Eigenfunction samples on `0 <= z <= z_max` for the continuum
    /// synthesis on the axis `x = 0`.
    pub fn axis_table(&self, z_max: f64, dz: f64) -> Result<AxisTable> {
        let n = (z_max / dz).ceil() as usize;
        let z_grid: Vec<f64> = (0..=n).map(|i| i as f64 * dz).collect();
        let need_odd = self.terms.iter().any(|t| t.odd.iter().any(|v| *v != 0.0));
        let nm = self.rule.len();
        let columns: Vec<MassColumn> = self
            .rule
            .nodes
            .par_iter()
            .map(|&m| MassColumn::new(m))
            .collect::<Result<_>>()?;
        let rows: Vec<(Vec<f64>, Vec<f64>)> = z_grid
            .par_iter()
            .map(|&z| {
                let mut e = Vec::with_capacity(nm);
                let mut o = Vec::with_capacity(if need_odd { nm } else { 0 });
                for col in &columns {
                    if need_odd {
                        let (a, b) = col.eval_both(z)?;
                        e.push(a);
                        o.push(b);
                    } else {
                        e.push(col.eval(Parity::Even, z)?);
                    }
                }
                Ok((e, o))
            })
            .collect::<Result<_>>()?;
        let (even, odd): (Vec<Vec<f64>>, Vec<Vec<f64>>) = rows.into_iter().unzip();
        Ok(AxisTable {
            z_grid,
            even: even.concat(),
            odd: odd.concat(),
        })
    }

    /// Continuum field `Phi_KK(t, x = 0, z)` on the table grid.
    pub fn kk_on_axis(&self, t: f64, table: &AxisTable) -> Result<Vec<f64>> {
        let k = self.k_rule(t.abs())?;
        let ghat = self.transforms(&k);
        let kernels = self.origin_kernels(t, &k, &ghat);
        let nm = self.rule.len();
        let mut ve = vec![0.0; nm];
        let mut vo = vec![0.0; nm];
        for (term, w) in self.terms.iter().zip(&kernels) {
            for j in 0..nm {
                ve[j] += self.rule.weights[j] * term.even[j] * w[j];
                vo[j] += self.rule.weights[j] * term.odd[j] * w[j];
            }
        }
        let has_odd = !table.odd.is_empty();
        Ok((0..table.z_grid.len())
            .into_par_iter()
            .map(|i| {
                let row = &table.even[i * nm..(i + 1) * nm];
                let mut s: f64 = row.iter().zip(&ve).map(|(a, b)| a * b).sum();
                if has_odd {
                    let row = &table.odd[i * nm..(i + 1) * nm];
                    s += row.iter().zip(&vo).map(|(a, b)| a * b).sum::<f64>();
                }
                s
            })
            .collect())
    }

    /// `max_z |Phi_KK(t, 0, z)|` over the table grid.
    pub fn kk_axis_sup(&self, t: f64, table: &AxisTable) -> Result<f64> {
        Ok(self
            .kk_on_axis(t, table)?
            .iter()
            .fold(0.0, |a, v| a.max(v.abs())))
    }
}

/// Row-major samples `u_+-(z_i, m_j)` for the axis synthesis.
#[derive(Clone, Debug)]
pub struct AxisTable {
    pub z_grid: Vec<f64>,
    even: Vec<f64>,
    odd: Vec<f64>,
}

/// `Phi(t, 0, 0)` with default settings.
pub fn brane_field(data: &SeparableData, t: f64) -> Result<BraneValue> {
    let settings = BraneSettings {
        horizon: t.abs().max(BraneSettings::default().horizon),
        ..BraneSettings::default()
    };
    BraneSynthesis::new(data, &settings)?.brane_field(t)
}

/// Least-squares slope of `log |value|` against `log t` on
/// `window.0 <= t <= window.1`.
pub fn decay_exponent_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<LineFit> {
    let (ts, vs): (Vec<f64>, Vec<f64>) = series
        .iter()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .map(|(t, v)| (*t, v.abs()))
        .unzip();
    if ts.len() < 10 {
        return Err(Error::Precondition(format!(
            "decay fit needs at least 10 points in the window, got {}",
            ts.len()
        )));
    }
    if vs.iter().any(|v| *v == 0.0) {
        return Err(Error::Precondition(
            "decay fit window contains a zero value".into(),
        ));
    }
    log_log_fit(&ts, &vs)
}

/// Separated solution `e^{i(lambda t + x.xi)} u(z)` attached to a Hankel zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quasimode {
    /// Order whose Hankel function vanishes at `zeta`: 1 gives the even
    /// profile, 2 the odd one.
    pub nu: u32,
    pub kind: HankelKind,
    pub zeta: RiemannPoint,
    /// `|omega_4|` in `(0, 1]`; the attached resonance is `zeta / omega_4`.
    pub omega4: f64,
}

impl Quasimode {
    pub fn new(nu: u32, kind: HankelKind, zeta: RiemannPoint, omega4: f64) -> Result<Self> {
        if !(nu == 1 || nu == 2) {
            return Err(Error::InvalidArgument(format!(
                "quasimode order must be 1 or 2, got {nu}"
            )));
        }
        if !(omega4 > 0.0 && omega4 <= 1.0) {
            return Err(Error::InvalidArgument("omega4 must lie in (0, 1]".into()));
        }
        Ok(Self {
            nu,
            kind,
            zeta,
            omega4,
        })
    }

    /// `lambda` with `lambda^2 = xi^2 + zeta^2`, principal root.
    pub fn lambda(&self, xi: f64) -> Complex64 {
        (xi * xi + self.zeta.principal_value().powi(2)).sqrt()
    }

    /// The resonance `zeta / omega_4` carried by the quasimode.
    pub fn resonance(&self) -> Result<RiemannPoint> {
        self.zeta.scale(1.0 / self.omega4)
    }
}

/// `sqrt(1+|z|) H_2^{(j)}(zeta (1+|z|))`, times `sign(z)` for the odd profile.
pub fn quasimode_profile(q: &Quasimode, z: f64) -> Result<Complex64> {
    let sign = match q.nu {
        1 => 1.0,
        _ => {
            if z == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            z.signum()
        }
    };
    let s = 1.0 + z.abs();
    Ok(hankel(q.kind, 2, &q.zeta.scale(s)?)? * (sign * s.sqrt()))
}

/// Brane condition defect of the profile from one-sided fourth-order
/// stencils with step `h`: `|u'(0+) + (3/2) u(0)|` for the even profile,
/// `|u(0+)|` extrapolated from `z > 0` for the odd one, relative to
/// `max |u|` on `[0, 1]`.
pub fn quasimode_boundary_residual(q: &Quasimode, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::InvalidArgument(
            "stencil step must lie in (0, 0.1]".into(),
        ));
    }
    let right = |k: usize| -> Result<Complex64> {
        let z = k as f64 * h;
        let s = 1.0 + z;
        Ok(hankel(q.kind, 2, &q.zeta.scale(s)?)? * s.sqrt())
    };
    let v: Vec<Complex64> = (0..5).map(right).collect::<Result<_>>()?;
    let defect = match q.nu {
        1 => {
            let d =
                (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
            (d + ROBIN * v[0]).norm()
        }
        _ => (4.0 * v[1] - 6.0 * v[2] + 4.0 * v[3] - v[4]).norm(),
    };
    let mut scale: f64 = 0.0;
    for k in 0..=20 {
        let z = k as f64 * 0.05;
        scale = scale.max((hankel(q.kind, 2, &q.zeta.scale(1.0 + z)?)? * (1.0 + z).sqrt()).norm());
    }
    Ok(defect / scale)
}

/// `max |(-lambda^2 + xi^2 + h) u| / max |u|` over the interior of a uniform
/// grid, with `h u = -u'' + V u` by three-point differences. Grid points at
/// `z = 0` and at the ends are skipped.
pub fn quasimode_residual(q: &Quasimode, xi: f64, z_grid: &[f64]) -> Result<f64> {
    if z_grid.len() < 3 {
        return Err(Error::InvalidArgument(
            "residual grid needs at least 3 points".into(),
        ));
    }
    let dz = z_grid[1] - z_grid[0];
    let u: Vec<Complex64> = z_grid
        .iter()
        .map(|&z| quasimode_profile(q, z))
        .collect::<Result<_>>()?;
    let lambda = q.lambda(xi);
    let shift = xi * xi - lambda * lambda;
    let mut worst: f64 = 0.0;
    for i in 1..z_grid.len() - 1 {
        let z = z_grid[i];
        // The three-point stencil must not straddle the brane.
        if z_grid[i - 1] * z_grid[i + 1] <= 0.0 {
            continue;
        }
        let d2 = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (dz * dz);
        let r = shift * u[i] - d2 + potential(z) * u[i];
        worst = worst.max(r.norm());
    }
    let scale = u.iter().fold(0.0, |a: f64, v| a.max(v.norm()));
    Ok(worst / scale)
}
