//! Truncated univariate Taylor arithmetic (value and three derivatives),
//! used to differentiate closed-form fields independently of hand algebra.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [f64; 4]);

impl Jet {
    pub fn constant(c: f64) -> Self {
        Jet([c, 0.0, 0.0, 0.0])
    }

    pub fn variable(x: f64) -> Self {
        Jet([x, 1.0, 0.0, 0.0])
    }

    /// `k`-th derivative, `k <= 3`.
    pub fn d(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// Chain rule for `F(self)` given `[F, F', F'', F''']` at the value.
    fn compose(self, f: [f64; 4]) -> Self {
        let [_, u1, u2, u3] = self.0;
        Jet([
            f[0],
            f[1] * u1,
            f[2] * u1 * u1 + f[1] * u2,
            f[3] * u1 * u1 * u1 + 3.0 * f[2] * u1 * u2 + f[1] * u3,
        ])
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.0[0].sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.0[0].sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn exp(self) -> Self {
        let e = self.0[0].exp();
        self.compose([e; 4])
    }

    pub fn powi(self, n: u32) -> Self {
        (0..n).fold(Jet::constant(1.0), |acc, _| acc * self)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet(std::array::from_fn(|k| self.0[k] - o.0[k]))
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|v| -v))
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, a: f64) -> Jet {
        Jet(self.0.map(|v| v * a))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let (f, g) = (self.0, o.0);
        Jet([
            f[0] * g[0],
            f[1] * g[0] + f[0] * g[1],
            f[2] * g[0] + 2.0 * f[1] * g[1] + f[0] * g[2],
            f[3] * g[0] + 3.0 * f[2] * g[1] + 3.0 * f[1] * g[2] + f[0] * g[3],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_trig_derivatives() {
        let x = Jet::variable(0.7);
        let p = x.powi(3);
        let want = [0.343, 3.0 * 0.49, 6.0 * 0.7, 6.0];
        for k in 0..4 {
            assert!((p.d(k) - want[k]).abs() < 1e-14);
        }
        let s = (x * 2.0).sin();
        let (sv, cv) = 1.4f64.sin_cos();
        let want = [sv, 2.0 * cv, -4.0 * sv, -8.0 * cv];
        for k in 0..4 {
            assert!((s.d(k) - want[k]).abs() < 1e-14);
        }
        let e = (x * x).exp();
        let ev = 0.49f64.exp();
        assert!((e.d(2) - ev * (2.0 + 4.0 * 0.49)).abs() < 1e-13);
    }
}
