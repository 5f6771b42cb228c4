//! Space-time cut-off functions and parabolic cylinders.

use rand::Rng;

use crate::error::{NsfError, Result};

/// One-dimensional C^2 bump on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `(1 - s^2)^3`.
    Bump,
    /// 1 on `|s| <= 1/2`, quintic smoothstep down to 0 at `|s| = 1`.
    Plateau,
}

impl Profile {
    /// Value and first two derivatives at `s`.
    pub fn eval(self, s: f64) -> [f64; 3] {
        let a = s.abs();
        if a >= 1.0 {
            return [0.0; 3];
        }
        match self {
            Profile::Bump => {
                let q = 1.0 - s * s;
                [q * q * q, -6.0 * s * q * q, -6.0 * q * q + 24.0 * s * s * q]
            }
            Profile::Plateau => {
                if a <= 0.5 {
                    return [1.0, 0.0, 0.0];
                }
                let r = 2.0 * a - 1.0;
                let sg = s.signum();
                let v = 1.0 - (10.0 * r.powi(3) - 15.0 * r.powi(4) + 6.0 * r.powi(5));
                let d = -(30.0 * r * r - 60.0 * r.powi(3) + 30.0 * r.powi(4)) * 2.0 * sg;
                let dd = -(60.0 * r - 180.0 * r * r + 120.0 * r.powi(3)) * 4.0;
                [v, d, dd]
            }
        }
    }

    /// `sup |d^k/ds^k|` for `k = 0, 1, 2` by dense sampling.
    pub fn sup(self) -> [f64; 3] {
        let mut m = [0.0f64; 3];
        for i in 0..=20_000 {
            let s = -1.0 + i as f64 * 1e-4;
            let v = self.eval(s);
            for k in 0..3 {
                m[k] = m[k].max(v[k].abs());
            }
        }
        m
    }
}

/// `phi(x, y, t) = P((x-x0)/R) P((y-y0)/R) P((t-t0)/tau)`, supported in
/// `[x0 +- R]^2 x [t0 +- tau]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffTest {
    pub center: [f64; 2],
    pub radius: f64,
    pub t_center: f64,
    pub t_radius: f64,
    pub profile: Profile,
}

/// Cut-off values on a tensor grid at one time.
#[derive(Debug, Clone)]
pub struct CutoffValues {
    pub phi: nalgebra::DMatrix<f64>,
    pub grad: [nalgebra::DMatrix<f64>; 2],
    pub dt: nalgebra::DMatrix<f64>,
    pub lap: nalgebra::DMatrix<f64>,
}

impl CutoffTest {
    pub fn new(center: [f64; 2], radius: f64, t_center: f64, t_radius: f64, profile: Profile) -> Self {
        Self { center, radius, t_center, t_radius, profile }
    }

    /// Support must lie inside `(0, L)^2 x (0, T)` with a positive margin.
    pub fn check_support(&self, length: f64, horizon: f64) -> Result<()> {
        let [x0, y0] = self.center;
        let r = self.radius;
        let ok_space = x0 - r > 0.0 && y0 - r > 0.0 && x0 + r < length && y0 + r < length;
        let ok_time = self.t_center - self.t_radius > 0.0 && self.t_center + self.t_radius < horizon;
        if !(r > 0.0 && self.t_radius > 0.0 && ok_space && ok_time) {
            return Err(NsfError::Support(format!("{self:?} not compactly supported in the space-time domain")));
        }
        Ok(())
    }

    /// Random bump whose support sits inside the domain with margin 5%.
    pub fn random(rng: &mut impl Rng, length: f64, horizon: f64) -> Self {
        let r = length * rng.gen_range(0.12..0.3);
        let margin = 0.05 * length;
        let lo = r + margin;
        let hi = length - r - margin;
        let center = [rng.gen_range(lo..hi), rng.gen_range(lo..hi)];
        let tau = horizon * rng.gen_range(0.15..0.4);
        let tm = 0.02 * horizon;
        let t_center = rng.gen_range(tau + tm..horizon - tau - tm);
        Self::new(center, r, t_center, tau, Profile::Bump)
    }

    pub fn time_factor(&self, t: f64) -> [f64; 3] {
        let v = self.profile.eval((t - self.t_center) / self.t_radius);
        [v[0], v[1] / self.t_radius, v[2] / (self.t_radius * self.t_radius)]
    }

    pub fn space_factor(&self, x: f64, axis: usize) -> [f64; 3] {
        let r = self.radius;
        let v = self.profile.eval((x - self.center[axis]) / r);
        [v[0], v[1] / r, v[2] / (r * r)]
    }

    pub fn eval_grid(&self, xs: &[f64], ys: &[f64], t: f64) -> CutoffValues {
        let fx: Vec<[f64; 3]> = xs.iter().map(|&x| self.space_factor(x, 0)).collect();
        let fy: Vec<[f64; 3]> = ys.iter().map(|&y| self.space_factor(y, 1)).collect();
        let ft = self.time_factor(t);
        let m = |f: &dyn Fn(usize, usize) -> f64| nalgebra::DMatrix::from_fn(xs.len(), ys.len(), f);
        CutoffValues {
            phi: m(&|a, b| fx[a][0] * fy[b][0] * ft[0]),
            grad: [m(&|a, b| fx[a][1] * fy[b][0] * ft[0]), m(&|a, b| fx[a][0] * fy[b][1] * ft[0])],
            dt: m(&|a, b| fx[a][0] * fy[b][0] * ft[1]),
            lap: m(&|a, b| (fx[a][2] * fy[b][0] + fx[a][0] * fy[b][2]) * ft[0]),
        }
    }

    /// Spatial factor only (time factor 1, zero time derivative).
    pub fn eval_space(&self, xs: &[f64], ys: &[f64]) -> CutoffValues {
        let fx: Vec<[f64; 3]> = xs.iter().map(|&x| self.space_factor(x, 0)).collect();
        let fy: Vec<[f64; 3]> = ys.iter().map(|&y| self.space_factor(y, 1)).collect();
        let m = |f: &dyn Fn(usize, usize) -> f64| nalgebra::DMatrix::from_fn(xs.len(), ys.len(), f);
        CutoffValues {
            phi: m(&|a, b| fx[a][0] * fy[b][0]),
            grad: [m(&|a, b| fx[a][1] * fy[b][0]), m(&|a, b| fx[a][0] * fy[b][1])],
            dt: nalgebra::DMatrix::zeros(xs.len(), ys.len()),
            lap: m(&|a, b| fx[a][2] * fy[b][0] + fx[a][0] * fy[b][2]),
        }
    }

    pub fn value(&self, x: f64, y: f64, t: f64) -> f64 {
        self.space_factor(x, 0)[0] * self.space_factor(y, 1)[0] * self.time_factor(t)[0]
    }

    /// `[sup |grad phi| R, sup |d_t phi| tau, sup |Lap phi| R^2]`.
    pub fn scaled_bounds(&self) -> [f64; 3] {
        let s = self.profile.sup();
        [std::f64::consts::SQRT_2 * s[1] * s[0], s[1] * s[0] * s[0], 2.0 * s[2] * s[0]]
    }

    pub fn t_support(&self) -> (f64, f64) {
        (self.t_center - self.t_radius, self.t_center + self.t_radius)
    }
}

/// `Q(z0, R) = B(x0, R) x (t0 - R^2, t0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicCylinder {
    pub center: [f64; 2],
    pub t0: f64,
    pub radius: f64,
}

impl ParabolicCylinder {
    pub fn new(center: [f64; 2], t0: f64, radius: f64) -> Self {
        Self { center, t0, radius }
    }

    /// The doubled cylinder must be compactly contained in the domain.
    pub fn check(&self, length: f64, horizon: f64) -> Result<()> {
        let r2 = 2.0 * self.radius;
        let [x, y] = self.center;
        let ok = self.radius > 0.0
            && x - r2 > 0.0
            && y - r2 > 0.0
            && x + r2 < length
            && y + r2 < length
            && self.t0 - r2 * r2 > 0.0
            && self.t0 <= horizon;
        if ok {
            Ok(())
        } else {
            Err(NsfError::Precondition(format!("doubled cylinder {self:?} leaves the space-time domain")))
        }
    }

    pub fn doubled(&self) -> Self {
        Self { radius: 2.0 * self.radius, ..*self }
    }

    pub fn random(rng: &mut impl Rng, length: f64, horizon: f64) -> Self {
        let r = length * rng.gen_range(0.04..0.1);
        let m = 2.0 * r + 0.01 * length;
        let center = [rng.gen_range(m..length - m), rng.gen_range(m..length - m)];
        let t0 = rng.gen_range((4.0 * r * r + 0.01 * horizon).min(horizon)..=horizon);
        Self::new(center, t0, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_derivatives_match_differences() {
        for p in [Profile::Bump, Profile::Plateau] {
            for &s in &[-0.9, -0.6, -0.3, 0.2, 0.55, 0.8] {
                let h = 1e-5;
                let v = p.eval(s);
                let d = (p.eval(s + h)[0] - p.eval(s - h)[0]) / (2.0 * h);
                let dd = (p.eval(s + h)[1] - p.eval(s - h)[1]) / (2.0 * h);
                assert!((v[1] - d).abs() < 1e-7, "{p:?} {s}");
                assert!((v[2] - dd).abs() < 1e-6, "{p:?} {s}");
            }
        }
        assert_eq!(Profile::Plateau.eval(0.4)[0], 1.0);
    }

    #[test]
    fn support_checks() {
        let c = CutoffTest::new([0.5, 0.5], 0.2, 0.25, 0.1, Profile::Bump);
        assert!(c.check_support(1.0, 0.5).is_ok());
        assert!(c.check_support(1.0, 0.3).is_err());
        let q = ParabolicCylinder::new([0.5, 0.5], 0.4, 0.1);
        assert!(q.check(1.0, 0.5).is_ok());
        assert!(ParabolicCylinder::new([0.15, 0.5], 0.4, 0.1).check(1.0, 0.5).is_err());
    }
}
