//! Manufactured Stokes-Fourier solution with constant viscosity.
//!
//! `u* = g(t) curl(sin^4(ax) sin^4(ay))`, `g(t) = A cos(2 pi t)`, `p* = 0`,
//! `theta* = e^{-t} sin^2(ax) sin^2(ay)`, `a = pi / L`. The forcing and the
//! heat source close the strong equations
//! `du/dt - div(mu Du) + grad p = f` and
//! `dtheta/dt - k Lap theta + u . grad theta = mu |Du|^2 + g`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};

use crate::error::{NsfError, Result};
use crate::galerkin::Trajectory;
use crate::law::ViscosityLaw;
use crate::quadrature::time_weights;
use crate::scenario::{manufactured_forcing, manufactured_velocity, ForcingPreset, Scenario};

use super::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    pub amp: f64,
    pub mu: f64,
    pub conductivity: f64,
    pub length: f64,
}

/// `sin^2(az)` and its first two derivatives, written out by hand.
fn sin2(a: f64, z: f64) -> [f64; 3] {
    let (s, c) = (a * z).sin_cos();
    [s * s, 2.0 * a * s * c, 2.0 * a * a * (c * c - s * s)]
}

/// `sin^4(az)` and its first three derivatives, written out by hand.
fn sin4(a: f64, z: f64) -> [f64; 4] {
    let (s, c) = (a * z).sin_cos();
    [
        s.powi(4),
        4.0 * a * s.powi(3) * c,
        4.0 * a * a * (3.0 * s * s * c * c - s.powi(4)),
        4.0 * a.powi(3) * (6.0 * s * c.powi(3) - 10.0 * s.powi(3) * c),
    ]
}

impl ManufacturedCase {
    pub fn new(amp: f64, mu: f64, conductivity: f64, length: f64) -> Self {
        Self { amp, mu, conductivity, length }
    }

    /// The case a manufactured scenario is built on.
    pub fn from_scenario(sc: &Scenario) -> Result<Self> {
        let amp = match sc.forcing {
            ForcingPreset::Manufactured(a) => a,
            other => return Err(NsfError::InvalidScenario(format!("forcing `{other}` is not manufactured"))),
        };
        let mu = match sc.viscosity {
            ViscosityLaw::Constant(v) => v,
            _ => return Err(NsfError::InvalidScenario("manufactured case needs a constant viscosity".into())),
        };
        Ok(Self::new(amp, mu, sc.conductivity, sc.length))
    }

    fn a(&self) -> f64 {
        PI / self.length
    }

    pub fn velocity(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        manufactured_velocity(self.amp, self.length, x, y, t)
    }

    pub fn forcing(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        manufactured_forcing(self.amp, self.mu, self.length, x, y, t)
    }

    /// Symmetric gradient `[D_xx, D_xy, D_yy]`.
    pub fn sym_grad(&self, x: f64, y: f64, t: f64) -> [f64; 3] {
        let a = self.a();
        let (sx, sy) = (sin4(a, x), sin4(a, y));
        let g = self.amp * (2.0 * PI * t).cos();
        [g * sx[1] * sy[1], 0.5 * g * (sx[0] * sy[2] - sx[2] * sy[0]), -g * sx[1] * sy[1]]
    }

    pub fn theta(&self, x: f64, y: f64, t: f64) -> f64 {
        let a = self.a();
        (-t).exp() * sin2(a, x)[0] * sin2(a, y)[0]
    }

    /// Heat source `g` closing the temperature equation.
    pub fn heat_source(&self, x: f64, y: f64, t: f64) -> f64 {
        let a = self.a();
        let (sx, sy) = (sin2(a, x), sin2(a, y));
        let e = (-t).exp();
        let th = e * sx[0] * sy[0];
        let lap = e * (sx[2] * sy[0] + sx[0] * sy[2]);
        let grad = [e * sx[1] * sy[0], e * sx[0] * sy[1]];
        let u = self.velocity(x, y, t);
        let d = self.sym_grad(x, y, t);
        let du_sq = d[0] * d[0] + d[2] * d[2] + 2.0 * d[1] * d[1];
        -th - self.conductivity * lap + u[0] * grad[0] + u[1] * grad[1] - self.mu * du_sq
    }

    /// Strong-form residuals `[momentum x, momentum y, continuity, heat]`
    /// with every derivative taken by Taylor arithmetic.
    pub fn strong_residual(&self, x: f64, y: f64, t: f64) -> [f64; 4] {
        let a = self.a();
        let fx = (Jet::variable(x) * a).sin().powi(4);
        let fy = (Jet::variable(y) * a).sin().powi(4);
        let ft = (Jet::variable(t) * (2.0 * PI)).cos() * self.amp;
        // psi derivative d^i_x d^j_y d^k_t
        let psi = |i: usize, j: usize, k: usize| fx.d(i) * fy.d(j) * ft.d(k);
        let u = [psi(0, 1, 0), -psi(1, 0, 0)];
        let ut = [psi(0, 1, 1), -psi(1, 0, 1)];
        // grad[i][j] = d_j u_i and its derivatives d_k d_j u_i
        let d_u = |i: usize, j: usize, k: usize| -> f64 {
            let (dx, dy) = (usize::from(j == 0) + usize::from(k == 0), usize::from(j == 1) + usize::from(k == 1));
            if i == 0 {
                psi(dx, dy + 1, 0)
            } else {
                -psi(dx + 1, dy, 0)
            }
        };
        let grad = |i: usize, j: usize| -> f64 {
            if i == 0 {
                psi(usize::from(j == 0), usize::from(j == 1) + 1, 0)
            } else {
                -psi(usize::from(j == 0) + 1, usize::from(j == 1), 0)
            }
        };
        let f = self.forcing(x, y, t);
        let mut res = [0.0; 4];
        for i in 0..2 {
            let div_d: f64 = (0..2).map(|j| 0.5 * (d_u(i, j, j) + d_u(j, i, j))).sum();
            res[i] = ut[i] - self.mu * div_d - f[i];
        }
        res[2] = grad(0, 0) + grad(1, 1);
        let du_sq: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (0.5 * (grad(i, j) + grad(j, i))).powi(2)).sum();
        let tx = (Jet::variable(x) * a).sin().powi(2);
        let ty = (Jet::variable(y) * a).sin().powi(2);
        let tt = (-Jet::variable(t)).exp();
        let th = |i: usize, j: usize, k: usize| tx.d(i) * ty.d(j) * tt.d(k);
        res[3] = th(0, 0, 1) - self.conductivity * (th(2, 0, 0) + th(0, 2, 0)) + u[0] * th(1, 0, 0) + u[1] * th(0, 1, 0)
            - self.mu * du_sq
            - self.heat_source(x, y, t);
        res
    }

    /// Largest strong residual over `samples` seeded random space-time points.
    pub fn max_residual(&self, samples: usize, seed: u64, horizon: f64) -> f64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                let (x, y, t) = (rng.gen_range(0.0..self.length), rng.gen_range(0.0..self.length), rng.gen_range(0.0..horizon));
                self.strong_residual(x, y, t).iter().fold(0.0f64, |m, r| m.max(r.abs()))
            })
            .fold(0.0, f64::max)
    }

    /// `||u - u*||_{L^2(Q_T)}` over the stored levels: Gauss in space,
    /// trapezoid in time.
    pub fn solution_error(&self, traj: &Trajectory) -> f64 {
        let model = &traj.model;
        let pts = model.domain.nodes();
        let end = *traj.times.last().unwrap_or(&0.0);
        time_weights(&traj.times, 0.0, end)
            .into_iter()
            .map(|(m, w)| {
                let vals = model.basis.eval_vector(&traj.velocity[m]);
                let t = traj.times[m];
                let err = nalgebra::DMatrix::from_fn(pts.len(), pts.len(), |i, j| {
                    let e = self.velocity(pts[i], pts[j], t);
                    (vals.u[0][(i, j)] - e[0]).powi(2) + (vals.u[1][(i, j)] - e[1]).powi(2)
                });
                w * model.basis.integrate(&err)
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_vanishes() {
        for (amp, mu, k, len) in [(1.0, 1.0, 0.1, 1.0), (0.3, 2.5, 0.7, 2.0)] {
            let case = ManufacturedCase::new(amp, mu, k, len);
            assert!(case.max_residual(200, 3, 0.5) < 1e-10);
        }
    }

    #[test]
    fn theta_nonnegative_and_case_from_scenario() {
        let case = ManufacturedCase::from_scenario(&Scenario::manufactured(4, 1e-3)).unwrap();
        assert_eq!(case.mu, 1.0);
        assert!(case.theta(0.3, 0.8, 0.2) >= 0.0);
        assert!(ManufacturedCase::from_scenario(&Scenario::benchmark()).is_err());
    }
}
