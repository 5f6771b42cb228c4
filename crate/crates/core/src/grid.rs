//! Auxiliary uniform node grid on `[0, L]^2` with cosine/sine series
//! transforms (DCT-I / DST-I). Grid functions are `(n+1) x (n+1)` matrices
//! with rows indexing `x`. A series is the trigonometric interpolant of a
//! grid function and can be differentiated exactly and evaluated anywhere.

use std::f64::consts::PI;

use nalgebra::DMatrix;

/// Cosine or sine expansion in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Cos,
    Sin,
}

/// Node-centered uniform grid with `n` intervals per direction.
#[derive(Debug, Clone)]
pub struct AuxGrid {
    n: usize,
    length: f64,
    nodes: Vec<f64>,
    trap: Vec<f64>,
    cos_fwd: DMatrix<f64>,
    cos_inv: DMatrix<f64>,
    sin_fwd: DMatrix<f64>,
    sin_inv: DMatrix<f64>,
}

impl AuxGrid {
    pub fn new(length: f64, n: usize) -> Self {
        assert!(n >= 2, "grid needs at least two intervals");
        let h = length / n as f64;
        let nodes: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let mut trap = vec![h; n + 1];
        trap[0] = 0.5 * h;
        trap[n] = 0.5 * h;
        let nf = n as f64;
        let cos_inv = DMatrix::from_fn(n + 1, n + 1, |i, k| (PI * (k * i) as f64 / nf).cos());
        let sin_inv = DMatrix::from_fn(n + 1, n + 1, |i, k| (PI * (k * i) as f64 / nf).sin());
        let cos_fwd = DMatrix::from_fn(n + 1, n + 1, |k, i| {
            let wi = if i == 0 || i == n { 0.5 } else { 1.0 };
            let norm = if k == 0 || k == n { nf } else { 0.5 * nf };
            wi * (PI * (k * i) as f64 / nf).cos() / norm
        });
        let sin_fwd = DMatrix::from_fn(n + 1, n + 1, |k, i| {
            if k == 0 || k == n || i == 0 || i == n {
                0.0
            } else {
                2.0 / nf * (PI * (k * i) as f64 / nf).sin()
            }
        });
        Self { n, length, nodes, trap, cos_fwd, cos_inv, sin_fwd, sin_inv }
    }

    /// Resolution used for a mollifier of radius `nu`: at least eight
    /// samples across the kernel support and four per highest basis mode.
    pub fn for_mollifier(length: f64, nu: f64, max_modes: usize) -> Self {
        let by_kernel = (4.0 * length / nu).ceil() as usize;
        let mut n = by_kernel.max(4 * max_modes).max(16);
        if n % 2 == 1 {
            n += 1;
        }
        Self::new(length, n)
    }

    pub fn intervals(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// One-dimensional trapezoid weights.
    pub fn trap(&self) -> &[f64] {
        &self.trap
    }

    /// Grid function multiplied by the tensor trapezoid weights.
    pub fn weigh(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(g.nrows(), g.ncols(), |a, b| self.trap[a] * self.trap[b] * g[(a, b)])
    }

    pub fn zeros(&self) -> DMatrix<f64> {
        DMatrix::zeros(self.n + 1, self.n + 1)
    }

    pub fn tabulate(&self, f: impl Fn(f64, f64) -> f64) -> DMatrix<f64> {
        DMatrix::from_fn(self.n + 1, self.n + 1, |a, b| f(self.nodes[a], self.nodes[b]))
    }

    /// Trapezoid-rule integral of a grid function.
    pub fn integrate(&self, g: &DMatrix<f64>) -> f64 {
        let mut total = 0.0;
        for a in 0..=self.n {
            let mut row = 0.0;
            for b in 0..=self.n {
                row += self.trap[b] * g[(a, b)];
            }
            total += self.trap[a] * row;
        }
        total
    }

    /// Trapezoid-weighted inner product.
    pub fn inner(&self, f: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
        self.integrate(&f.component_mul(g))
    }

    pub fn l2(&self, g: &DMatrix<f64>) -> f64 {
        self.inner(g, g).max(0.0).sqrt()
    }

    pub fn l1(&self, g: &DMatrix<f64>) -> f64 {
        self.integrate(&g.abs())
    }

    pub fn mean(&self, g: &DMatrix<f64>) -> f64 {
        self.integrate(g) / (self.length * self.length)
    }

    fn fwd(&self, p: Parity) -> &DMatrix<f64> {
        match p {
            Parity::Cos => &self.cos_fwd,
            Parity::Sin => &self.sin_fwd,
        }
    }

    fn inv(&self, p: Parity) -> &DMatrix<f64> {
        match p {
            Parity::Cos => &self.cos_inv,
            Parity::Sin => &self.sin_inv,
        }
    }

    /// Interpolating series of a grid function.
    pub fn forward(&self, values: &DMatrix<f64>, px: Parity, py: Parity) -> Series2D {
        let coeffs = self.fwd(px) * values * self.fwd(py).transpose();
        Series2D { px, py, coeffs, length: self.length }
    }

    /// Grid values of a series (must have this grid's mode count).
    pub fn inverse(&self, s: &Series2D) -> DMatrix<f64> {
        self.inv(s.px) * &s.coeffs * self.inv(s.py).transpose()
    }
}

/// Double trigonometric series `sum a_kl T_k(x) T_l(y)` with `k, l = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series2D {
    pub px: Parity,
    pub py: Parity,
    pub coeffs: DMatrix<f64>,
    pub length: f64,
}

/// `T_k(x)` for `k = 0..modes` at each point, or its derivative.
pub fn trig_table(points: &[f64], modes: usize, length: f64, parity: Parity, deriv: bool) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), modes, |a, k| {
        let kk = k as f64 * PI / length;
        let x = points[a];
        match (parity, deriv) {
            (Parity::Cos, false) => (kk * x).cos(),
            (Parity::Cos, true) => -kk * (kk * x).sin(),
            (Parity::Sin, false) => (kk * x).sin(),
            (Parity::Sin, true) => kk * (kk * x).cos(),
        }
    })
}

impl Series2D {
    pub fn zeros(n: usize, px: Parity, py: Parity, length: f64) -> Self {
        Self { px, py, coeffs: DMatrix::zeros(n + 1, n + 1), length }
    }

    pub fn modes(&self) -> usize {
        self.coeffs.nrows()
    }

    /// Values (or derivatives) on the tensor grid `xs x ys`.
    pub fn eval_tensor(&self, xs: &[f64], ys: &[f64], dx: bool, dy: bool) -> DMatrix<f64> {
        let tx = trig_table(xs, self.modes(), self.length, self.px, dx);
        let ty = trig_table(ys, self.modes(), self.length, self.py, dy);
        tx * &self.coeffs * ty.transpose()
    }

    pub fn eval_point(&self, x: f64, y: f64) -> f64 {
        self.eval_tensor(&[x], &[y], false, false)[(0, 0)]
    }

    /// Exact x-derivative as a series of the opposite parity.
    pub fn dx(&self) -> Series2D {
        let s = PI / self.length;
        let mut c = self.coeffs.clone();
        for k in 0..c.nrows() {
            let f = match self.px {
                Parity::Cos => -(k as f64) * s,
                Parity::Sin => k as f64 * s,
            };
            c.row_mut(k).scale_mut(f);
        }
        Series2D { px: flip(self.px), py: self.py, coeffs: c, length: self.length }
    }

    pub fn dy(&self) -> Series2D {
        let s = PI / self.length;
        let mut c = self.coeffs.clone();
        for l in 0..c.ncols() {
            let f = match self.py {
                Parity::Cos => -(l as f64) * s,
                Parity::Sin => l as f64 * s,
            };
            c.column_mut(l).scale_mut(f);
        }
        Series2D { px: self.px, py: flip(self.py), coeffs: c, length: self.length }
    }

    /// Laplacian eigenvalue `(pi/L)^2 (k^2 + l^2)` of mode `(k, l)`.
    pub fn eigenvalue(&self, k: usize, l: usize) -> f64 {
        let s = PI / self.length;
        s * s * ((k * k + l * l) as f64)
    }

    /// Exact integral of `T_k T_l` squared over the square, per mode.
    pub fn mode_norm_sq(&self, k: usize, l: usize) -> f64 {
        let one = |p: Parity, k: usize| match (p, k) {
            (Parity::Cos, 0) => self.length,
            (Parity::Sin, 0) => 0.0,
            _ => 0.5 * self.length,
        };
        one(self.px, k) * one(self.py, l)
    }

    /// Continuous L2 norm (modes are orthogonal on the square; the grid
    /// Nyquist mode is treated as a regular mode).
    pub fn l2(&self) -> f64 {
        let mut s = 0.0;
        for k in 0..self.modes() {
            for l in 0..self.modes() {
                s += self.coeffs[(k, l)].powi(2) * self.mode_norm_sq(k, l);
            }
        }
        s.sqrt()
    }

    pub fn scale(&self, a: f64) -> Series2D {
        Series2D { coeffs: &self.coeffs * a, ..self.clone() }
    }
}

fn flip(p: Parity) -> Parity {
    match p {
        Parity::Cos => Parity::Sin,
        Parity::Sin => Parity::Cos,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transforms_round_trip() {
        let g = AuxGrid::new(1.0, 12);
        let f = g.tabulate(|x, y| (x * 3.0).exp() * (1.0 + y * y));
        let s = g.forward(&f, Parity::Cos, Parity::Cos);
        assert!((g.inverse(&s) - &f).amax() < 1e-12);
        let f = g.tabulate(|x, y| (PI * x).sin() * x * (y + 1.0));
        let s = g.forward(&f, Parity::Sin, Parity::Cos);
        assert!((g.inverse(&s) - &f).amax() < 1e-12);
    }

    #[test]
    fn derivative_of_cosine_mode_is_exact() {
        let g = AuxGrid::new(2.0, 16);
        let f = g.tabulate(|x, y| (3.0 * PI * x / 2.0).cos() * (PI * y / 2.0).cos());
        let s = g.forward(&f, Parity::Cos, Parity::Cos);
        let d = s.dx();
        let v = d.eval_point(0.3, 0.7);
        let exact = -1.5 * PI * (1.5 * PI * 0.3).sin() * (PI * 0.35).cos();
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_mean_is_zeroth_coefficient() {
        let g = AuxGrid::new(1.5, 10);
        let f = g.tabulate(|x, y| x + y * y);
        let s = g.forward(&f, Parity::Cos, Parity::Cos);
        assert!((s.coeffs[(0, 0)] - g.mean(&f)).abs() < 1e-14);
    }
}
