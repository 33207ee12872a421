use rayon::prelude::*;

use super::GridField;
use crate::spectrum::{potential, ROBIN};
use crate::{Error, Result};

/// Largest accepted `dt / dz`.
pub const CFL_LIMIT: f64 = 0.9;

/// Leapfrog evolution of the even and odd half-line fields.
///
/// The even field carries the Robin condition through the ghost value
/// `u_{-1} = u_1 + 3 dz u_0`; the odd field is pinned to zero at `z = 0`.
/// Both vanish at the far end. Steps are taken with `dt = t_final / N`,
/// `N = ceil(t_final / (cfl dz))`, and the first step is a second-order
/// Taylor step from `(u, u_t)`.
pub fn fdtd_propagate(data: &GridField, xi: f64, t_final: f64, cfl: f64) -> Result<GridField> {
    let mut out = fdtd_snapshots(data, xi, &[t_final], cfl)?;
    Ok(out.pop().expect("one snapshot"))
}

/// Like [`fdtd_propagate`] for the largest of `times`, recording the field
/// at the step nearest each requested time.
pub fn fdtd_snapshots(
    data: &GridField,
    xi: f64,
    times: &[f64],
    cfl: f64,
) -> Result<Vec<GridField>> {
    if !(cfl > 0.0) || cfl > CFL_LIMIT {
        return Err(Error::Cfl {
            ratio: cfl,
            limit: CFL_LIMIT,
        });
    }
    let t_final = times.iter().copied().fold(0.0, f64::max);
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::InvalidArgument(
            "times and xi must be finite and >= 0".into(),
        ));
    }
    let required = data.support_radius() + t_final;
    if data.half_length() < required {
        return Err(Error::DomainTooShort {
            length: data.half_length(),
            required,
        });
    }
    let dz = data.dz();
    let steps = (t_final / (cfl * dz)).ceil().max(1.0) as usize;
    let dt = t_final.max(dz) / steps as f64;
    let mut wanted: Vec<(usize, usize)> = times
        .iter()
        .enumerate()
        .map(|(k, t)| (((t / dt).round() as usize).min(steps), k))
        .collect();
    wanted.sort_unstable();
    let grid = data.half_grid();
    let shift: Vec<f64> = grid.iter().map(|&z| potential(z) + xi * xi).collect();

    // Snapshot (step, u, u_t) of one parity at the requested steps.
    let run = |even: bool| -> Vec<(Vec<f64>, Vec<f64>)> {
        let u0 = data.split(&data.u, even);
        let v0 = data.split(&data.u_t, even);
        let stepper = Stepper::new(&shift, dz, even);
        let a0 = stepper.accel(&u0);
        let mut prev = u0.clone();
        let mut cur: Vec<f64> = (0..u0.len())
            .map(|i| u0[i] + dt * v0[i] + 0.5 * dt * dt * a0[i])
            .collect();
        stepper.pin(&mut cur);
        let mut out = Vec::with_capacity(wanted.len());
        let mut next_wanted = wanted.iter().map(|w| w.0).peekable();
        while next_wanted.peek() == Some(&0) {
            next_wanted.next();
            out.push((u0.clone(), v0.clone()));
        }
        for step in 1..=steps {
            let next = stepper.step(&prev, &cur, dt);
            while next_wanted.peek() == Some(&step) {
                next_wanted.next();
                let vel = next
                    .iter()
                    .zip(&prev)
                    .map(|(a, b)| (a - b) / (2.0 * dt))
                    .collect();
                out.push((cur.clone(), vel));
            }
            prev = std::mem::replace(&mut cur, next);
        }
        out
    };
    let (even, odd) = rayon::join(|| run(true), || run(false));
    let mut fields = vec![None; times.len()];
    for (((step, k), (ue, ve)), (uo, vo)) in wanted.iter().zip(even).zip(odd) {
        fields[*k] = Some(GridField::new(
            data.z_grid.clone(),
            GridField::combine(&ue, &uo),
            GridField::combine(&ve, &vo),
            data.time + *step as f64 * dt,
        )?);
    }
    Ok(fields
        .into_iter()
        .map(|f| f.expect("every time recorded"))
        .collect())
}

struct Stepper<'a> {
    shift: &'a [f64],
    inv_h2: f64,
    robin_ghost: Option<f64>,
}

impl<'a> Stepper<'a> {
    fn new(shift: &'a [f64], dz: f64, even: bool) -> Self {
        Self {
            shift,
            inv_h2: 1.0 / (dz * dz),
            robin_ghost: even.then_some(2.0 * ROBIN * dz),
        }
    }

    /// `-(h + xi^2) u` with the boundary rows.
    fn accel(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let mut a: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                if i == 0 || i == n - 1 {
                    return 0.0;
                }
                (u[i - 1] - 2.0 * u[i] + u[i + 1]) * self.inv_h2 - self.shift[i] * u[i]
            })
            .collect();
        if let Some(g) = self.robin_ghost {
            let ghost = u[1] + g * u[0];
            a[0] = (ghost - 2.0 * u[0] + u[1]) * self.inv_h2 - self.shift[0] * u[0];
        }
        a
    }

    fn pin(&self, u: &mut [f64]) {
        let n = u.len();
        u[n - 1] = 0.0;
        if self.robin_ghost.is_none() {
            u[0] = 0.0;
        }
    }

    fn step(&self, prev: &[f64], cur: &[f64], dt: f64) -> Vec<f64> {
        let a = self.accel(cur);
        let dt2 = dt * dt;
        let mut next: Vec<f64> = (0..cur.len())
            .map(|i| 2.0 * cur[i] - prev[i] + dt2 * a[i])
            .collect();
        self.pin(&mut next);
        next
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cfl_and_domain_guards() {
        let grid = GridField::symmetric_grid(10.0, 0.05).unwrap();
        let f =
            GridField::from_fns(grid, |z| if z.abs() < 2.0 { 1.0 } else { 0.0 }, |_| 0.0).unwrap();
        assert!(matches!(
            fdtd_propagate(&f, 0.0, 1.0, 0.95),
            Err(Error::Cfl { .. })
        ));
        assert!(matches!(
            fdtd_propagate(&f, 0.0, 9.0, 0.5),
            Err(Error::DomainTooShort { .. })
        ));
    }

    #[test]
    fn zero_data_stays_zero() {
        let grid = GridField::symmetric_grid(10.0, 0.05).unwrap();
        let f = GridField::from_fns(grid, |_| 0.0, |_| 0.0).unwrap();
        let g = fdtd_propagate(&f, 1.0, 5.0, 0.9).unwrap();
        assert!(g.u.iter().chain(&g.u_t).all(|v| *v == 0.0));
        assert_eq!(g.time, 5.0);
    }
}
