//! Zeros of `H^(j)_nu` (`nu = 1, 2`) on the principal sheet and its
//! neighbours: Newton refinement, argument-principle counting, seed sweeps
//! and the resonance rays `alpha z*`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::special::{hankel, hankel_derivative, hankel_on_sheet, HankelKind, RiemannPoint};
use crate::{Error, Result};

/// Seeds with `|H| >= BASIN` are refused by [`refine_zero`].
pub const BASIN: f64 = 0.5;

/// Newton stops once the step is below this, relative to `max(1, |z|)`.
const STEP_TOL: f64 = 1e-14;

/// Largest `|H|` accepted at the final iterate.
pub const RESIDUAL_ACCEPT: f64 = 1e-10;

/// Largest final Newton step accepted, relative to `max(1, |z|)`.
const REACH_ACCEPT: f64 = 1e-9;

const MAX_NEWTON: usize = 50;
const MAX_HALVINGS: usize = 30;

/// Closest approach of a zero to a counting contour.
pub const CONTOUR_CLEARANCE: f64 = 1e-3;

const MAX_JITTERS: usize = 3;

/// Imaginary part of the string zeros far from the origin on sheet 0.
pub fn string_asymptote(sheet: i64) -> Result<f64> {
    match sheet {
        0 => Ok(-0.5 * 2f64.ln()),
        -1 => Ok(0.5 * 1.5f64.ln()),
        other => Err(Error::InvalidArgument(format!(
            "string zeros are swept on sheets 0 and -1 of H^(1), got {other}"
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroSource {
    /// Started from a tabulated value.
    Seeded,
    /// Started from the asymptotic string formula.
    Swept,
}

/// A refined zero of `H^(kind)_nu` on `sheet`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub nu: u32,
    pub kind: HankelKind,
    pub sheet: i64,
    /// Principal projection of the zero.
    pub position: Complex64,
    /// `|H|` at `position`.
    pub residual: f64,
    /// `|H|` at `position` through the sheet relation or the conjugation
    /// identity instead of direct evaluation.
    pub check_residual: f64,
    /// `|H^(other kind)_nu|` at `position`.
    pub partner_modulus: f64,
    pub source: ZeroSource,
    pub steps: usize,
}

impl Resonance {
    pub fn point(&self) -> Result<RiemannPoint> {
        RiemannPoint::on_sheet(self.position, self.sheet)
    }
}

/// Independent evaluation of `H^(kind)_nu(z)`: the sheet relation off the
/// principal sheet, `conj(H^(other)(conj z))` on it.
fn reevaluate(kind: HankelKind, nu: u32, z: &RiemannPoint) -> Result<Complex64> {
    if z.sheet_index() != 0 {
        hankel_on_sheet(kind, nu, z)
    } else {
        Ok(hankel(kind.other(), nu, &z.conj())?.conj())
    }
}

/// Damped Newton iteration for a zero of `H^(kind)_nu` started at `seed`
/// lifted onto `sheet`. The step is halved while it increases `|H|`, and
/// the iterate is tracked continuously so that leaving the sheet is
/// reported rather than followed.
pub fn refine_zero(nu: u32, kind: HankelKind, sheet: i64, seed: Complex64) -> Result<Resonance> {
    refine_with_source(nu, kind, sheet, seed, ZeroSource::Seeded)
}

fn refine_with_source(
    nu: u32,
    kind: HankelKind,
    sheet: i64,
    seed: Complex64,
    source: ZeroSource,
) -> Result<Resonance> {
    if !(1..=2).contains(&nu) {
        return Err(Error::InvalidArgument(format!("order {nu} is not 1 or 2")));
    }
    let mut z = RiemannPoint::on_sheet(seed, sheet)?;
    let mut h = hankel(kind, nu, &z)?;
    if h.norm() >= BASIN {
        return Err(Error::Precondition(format!(
            "seed {seed} is outside the Newton basin (|H| = {:.3})",
            h.norm()
        )));
    }
    let mut steps = 0;
    let mut reach;
    loop {
        let delta = h / hankel_derivative(kind, nu, &z)?;
        reach = delta.norm();
        if reach <= STEP_TOL * z.modulus().max(1.0) || h.norm() == 0.0 {
            break;
        }
        if steps == MAX_NEWTON {
            return Err(Error::Divergence {
                residual: h.norm(),
                steps,
            });
        }
        steps += 1;
        let mut delta = delta;
        let mut halvings = 0;
        let (next, h_next) = loop {
            let cand = z.track_to(z.principal_value() - delta)?;
            let hc = hankel(kind, nu, &cand)?;
            if hc.norm() < h.norm() || halvings == MAX_HALVINGS {
                break (cand, hc);
            }
            delta *= 0.5;
            halvings += 1;
        };
        if next.sheet_index() != sheet {
            return Err(Error::SheetDrift {
                expected: sheet,
                found: next.sheet_index(),
            });
        }
        if h_next.norm() >= h.norm() {
            // Rounding level reached.
            break;
        }
        z = next;
        h = h_next;
    }
    // `|H|` alone is no test: `H^(1)` is exponentially small in the upper
    // half-plane. A zero also needs a short Newton step.
    if h.norm() >= RESIDUAL_ACCEPT || reach > REACH_ACCEPT * z.modulus().max(1.0) {
        return Err(Error::Divergence {
            residual: h.norm(),
            steps,
        });
    }
    Ok(Resonance {
        nu,
        kind,
        sheet,
        position: z.principal_value(),
        residual: h.norm(),
        check_residual: reevaluate(kind, nu, &z)?.norm(),
        partner_modulus: hankel(kind.other(), nu, &z)?.norm(),
        source,
        steps,
    })
}

/// Axis-aligned rectangle in the principal projection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Rect {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        let ok =
            re.0 < re.1 && im.0 < im.1 && [re.0, re.1, im.0, im.1].iter().all(|v| v.is_finite());
        if !ok {
            return Err(Error::InvalidArgument(
                "rectangle needs finite, ordered bounds".into(),
            ));
        }
        if re.0 <= 0.0 && re.1 >= 0.0 && im.0 <= 0.0 && im.1 >= 0.0 {
            return Err(Error::InvalidArgument(
                "rectangle must not contain the origin".into(),
            ));
        }
        Ok(Self { re, im })
    }

    /// Same rectangle with every side pushed out by `d`.
    pub fn expanded(&self, d: f64) -> Result<Self> {
        Self::new(
            (self.re.0 - d, self.re.1 + d),
            (self.im.0 - d, self.im.1 + d),
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.re.0 && z.re < self.re.1 && z.im > self.im.0 && z.im < self.im.1
    }

    fn corners(&self) -> [Complex64; 5] {
        let c = |x, y| Complex64::new(x, y);
        [
            c(self.re.0, self.im.0),
            c(self.re.1, self.im.0),
            c(self.re.1, self.im.1),
            c(self.re.0, self.im.1),
            c(self.re.0, self.im.0),
        ]
    }
}

struct Contour {
    nu: u32,
    kind: HankelKind,
}

/// Contour sample: surface point, `H`, and the Newton distance `|H/H'|`.
#[derive(Clone, Copy)]
struct Sample {
    z: RiemannPoint,
    h: Complex64,
    reach: f64,
}

impl Contour {
    fn eval(&self, z: RiemannPoint) -> Result<Sample> {
        let h = hankel(self.kind, self.nu, &z)?;
        let dh = hankel_derivative(self.kind, self.nu, &z)?;
        let reach = h.norm() / dh.norm();
        if reach < CONTOUR_CLEARANCE {
            return Err(Error::BoundaryZero { distance: reach });
        }
        Ok(Sample { z, h, reach })
    }

    /// Argument increment of `H` from `a` to `b`. Segments are bisected
    /// until they are shorter than half the Newton distance at either end
    /// and the increment is below `pi/4`, so no turn can be aliased.
    fn increment(&self, a: Sample, b: Sample, depth: usize) -> Result<f64> {
        let d = (b.h / a.h).arg();
        let length = (b.z.principal_value() - a.z.principal_value()).norm();
        if d.abs() < PI / 4.0 && length < 0.5 * a.reach.min(b.reach) {
            return Ok(d);
        }
        if depth == 40 {
            return Err(Error::Precondition(
                "contour sampling did not resolve the phase".into(),
            ));
        }
        let mid =
            self.eval(a.z.track_to((a.z.principal_value() + b.z.principal_value()) * 0.5)?)?;
        Ok(self.increment(a, mid, depth + 1)? + self.increment(mid, b, depth + 1)?)
    }

    fn winding(&self, rect: &Rect, sheet: i64) -> Result<i64> {
        const PER_SIDE: usize = 16;
        let corners = rect.corners();
        let mut p = self.eval(RiemannPoint::on_sheet(corners[0], sheet)?)?;
        let mut total = 0.0;
        for w in corners.windows(2) {
            for k in 1..=PER_SIDE {
                let target = w[0] + (w[1] - w[0]) * (k as f64 / PER_SIDE as f64);
                let q = self.eval(p.z.track_to(target)?)?;
                total += self.increment(p, q, 0)?;
                p = q;
            }
        }
        let turns = total / (2.0 * PI);
        let n = turns.round();
        if (turns - n).abs() > 1e-6 {
            return Err(Error::Precondition(format!(
                "winding number {turns} is not an integer"
            )));
        }
        Ok(n as i64)
    }
}

/// Number of zeros of `H^(kind)_nu` inside `rect`, lifted onto the surface
/// by continuation from its lower-left corner placed on `sheet`. A zero
/// closer than [`CONTOUR_CLEARANCE`] to the contour triggers up to three
/// outward jitters of the rectangle.
pub fn count_zeros_rectangle(nu: u32, kind: HankelKind, sheet: i64, rect: &Rect) -> Result<i64> {
    let contour = Contour { nu, kind };
    let mut last = None;
    for attempt in 0..=MAX_JITTERS {
        let r = rect.expanded(attempt as f64 * 2.7 * CONTOUR_CLEARANCE)?;
        match contour.winding(&r, sheet) {
            Err(e @ Error::BoundaryZero { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Tabulated zero of `H^(1)_nu` used as a seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub nu: u32,
    pub sheet: i64,
    pub row: usize,
    pub value: Complex64,
}

const SEED_TABLE: &str = include_str!("../data/hankel_zero_seeds.csv");

/// The 20 tabulated zeros of `H^(1)_1` and `H^(1)_2` on sheets 0 and -1.
pub fn zero_table() -> Vec<TableEntry> {
    SEED_TABLE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("nu,") && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let num = |i: usize| f[i].trim().parse::<f64>().expect("numeric seed table");
            TableEntry {
                nu: f[0].parse().expect("order"),
                sheet: f[1].parse().expect("sheet"),
                row: f[2].parse().expect("row"),
                value: Complex64::new(num(3), num(4)),
            }
        })
        .collect()
}

/// Zeros of `H^(1)` in the eye-shaped region (`|Re z| < nu`) come only from
/// the table. The string zeros are seeded at `(-x_n, asymptote)` (mirrored
/// for sheet -1), with `x_n = b - (4 nu^2 - 1)/(8 b)`,
/// `b = (n + nu/2 - 1/4) pi`.
fn sweep_seeds(nu: u32, sheet: i64, n_max: usize) -> Result<Vec<(Complex64, ZeroSource)>> {
    let asymptote = string_asymptote(sheet)?;
    let side = if sheet == 0 { -1.0 } else { 1.0 };
    let mut seeds: Vec<(Complex64, ZeroSource)> = zero_table()
        .into_iter()
        .filter(|e| e.nu == nu && e.sheet == sheet && e.value.re.abs() < nu as f64)
        .map(|e| (e.value, ZeroSource::Seeded))
        .collect();
    for n in 1..=n_max {
        let b = (n as f64 + nu as f64 / 2.0 - 0.25) * PI;
        let x = b - (4.0 * (nu * nu) as f64 - 1.0) / (8.0 * b);
        seeds.push((Complex64::new(side * x, asymptote), ZeroSource::Swept));
    }
    Ok(seeds)
}

/// Refines the eye-shaped zeros and the first `n_max` string zeros, then
/// checks by the argument principle that nothing was missed or found twice.
///
/// Kind 2 uses `H^(2)(z) = conj(H^(1)(conj z))`: its zeros on sheet `s` are
/// seeded from the conjugated kind-1 seeds of sheet `-s` and refined
/// directly.
pub fn seed_sweep(nu: u32, kind: HankelKind, sheet: i64, n_max: usize) -> Result<Vec<Resonance>> {
    if n_max > 12 {
        return Err(Error::InvalidArgument("n_max must be at most 12".into()));
    }
    let base_sheet = match kind {
        HankelKind::First => sheet,
        HankelKind::Second => -sheet,
    };
    let seeds = sweep_seeds(nu, base_sheet, n_max)?;
    let mut zeros: Vec<Resonance> = seeds
        .par_iter()
        .map(|&(s, src)| {
            let s = match kind {
                HankelKind::First => s,
                HankelKind::Second => s.conj(),
            };
            refine_with_source(nu, kind, sheet, s, src)
        })
        .collect::<Result<_>>()?;
    zeros.sort_by(|a, b| a.position.norm().total_cmp(&b.position.norm()));
    zeros.dedup_by(|a, b| (a.position - b.position).norm() < 1e-8);
    let rect = sweep_rectangle(&zeros)?;
    let counted = count_zeros_rectangle(nu, kind, sheet, &rect)?;
    if counted != zeros.len() as i64 {
        return Err(Error::CountMismatch {
            counted,
            listed: zeros.len(),
        });
    }
    Ok(zeros)
}

/// Rectangle around a swept family: half a string spacing beyond the
/// outermost zero, half a unit elsewhere, never reaching the real axis.
pub fn sweep_rectangle(zeros: &[Resonance]) -> Result<Rect> {
    if zeros.is_empty() {
        return Err(Error::Precondition("no zeros to enclose".into()));
    }
    let fold = |f: fn(f64, f64) -> f64, g: fn(&Complex64) -> f64, init: f64| {
        zeros.iter().map(|z| g(&z.position)).fold(init, f)
    };
    let (re_lo, re_hi) = (
        fold(f64::min, |z| z.re, f64::INFINITY),
        fold(f64::max, |z| z.re, f64::NEG_INFINITY),
    );
    let (im_lo, im_hi) = (
        fold(f64::min, |z| z.im, f64::INFINITY),
        fold(f64::max, |z| z.im, f64::NEG_INFINITY),
    );
    let lower = im_hi < 0.0;
    let (far_lo, far_hi) = if re_lo.abs() > re_hi.abs() {
        (PI / 2.0, 0.5)
    } else {
        (0.5, PI / 2.0)
    };
    let (im0, im1) = if lower {
        (im_lo - 0.5, (im_hi * 0.5).max(-0.05))
    } else {
        ((im_lo * 0.5).min(0.05), im_hi + 0.5)
    };
    Rect::new((re_lo - far_lo, re_hi + far_hi), (im0, im1))
}

/// Points of the resonance ray through `base`: `alpha z*` for a zero of
/// `H^(1)`, and `alpha (-w)` when `base` is a zero `w` of `H^(2)` (so that
/// `H^(2)(-z*) = 0`).
pub fn resonance_lattice(base: &Resonance, alphas: &[f64]) -> Result<Vec<Complex64>> {
    let z_star = match base.kind {
        HankelKind::First => base.position,
        HankelKind::Second => -base.position,
    };
    alphas
        .iter()
        .map(|&a| {
            if a >= 1.0 && a.is_finite() {
                Ok(z_star * a)
            } else {
                Err(Error::InvalidArgument(format!("alpha = {a} must be >= 1")))
            }
        })
        .collect()
}

/// One row of the resonance atlas JSON.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtlasEntry {
    pub nu: u32,
    pub kind: u32,
    pub sheet: i64,
    pub re: f64,
    pub im: f64,
    pub residual: f64,
}

impl From<&Resonance> for AtlasEntry {
    fn from(r: &Resonance) -> Self {
        Self {
            nu: r.nu,
            kind: r.kind.index(),
            sheet: r.sheet,
            re: r.position.re,
            im: r.position.im,
            residual: r.residual,
        }
    }
}
