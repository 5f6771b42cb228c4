//! Neumann-Laplace solves on the auxiliary grid: the penalised pressure
//! `eps Lap p = div u`, the divergence-free mollified transport field
//! `(chi u) * omega - grad h`, and the auxiliary potential `Lap eta = p - mean p`.
//!
//! Grid functions are expanded in cosine series (the Neumann eigenbasis),
//! so the Laplacian is inverted mode by mode.

use nalgebra::DMatrix;

use crate::basis::{ModeTable, VectorField};
use crate::error::{NsfError, Result};
use crate::grid::{trig_table, AuxGrid, Parity, Series2D};
use crate::mollifier::{mollify_field, BoundaryCutoff, Mollifier};

/// Spectral zero-flux Laplace solver on an [`AuxGrid`].
#[derive(Debug, Clone)]
pub struct NeumannSolver {
    grid: AuxGrid,
}

impl NeumannSolver {
    pub fn new(grid: AuxGrid) -> Self {
        Self { grid }
    }

    pub fn grid(&self) -> &AuxGrid {
        &self.grid
    }

    fn eig(&self, k: usize, l: usize) -> f64 {
        let s = std::f64::consts::PI / self.grid.length();
        s * s * ((k * k + l * l) as f64)
    }

    fn check_compatible(&self, rhs: &DMatrix<f64>) -> Result<()> {
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(NsfError::NonFinite { time: f64::NAN, what: "Neumann right-hand side".into() });
        }
        let mean = self.grid.integrate(rhs);
        let tol = 1e-8 * self.grid.l1(rhs);
        if mean.abs() > tol {
            return Err(NsfError::Incompatible { mean, tol });
        }
        Ok(())
    }

    /// Mean-zero `p` with `Lap p = rhs`, `dp/dn = 0`, as a cosine series.
    pub fn solve_series(&self, rhs: &DMatrix<f64>) -> Result<Series2D> {
        self.check_compatible(rhs)?;
        Ok(self.invert(self.grid.forward(rhs, Parity::Cos, Parity::Cos)))
    }

    fn invert(&self, mut s: Series2D) -> Series2D {
        let n = s.modes();
        for k in 0..n {
            for l in 0..n {
                s.coeffs[(k, l)] = if k + l == 0 { 0.0 } else { -s.coeffs[(k, l)] / self.eig(k, l) };
            }
        }
        s
    }

    pub fn solve(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.grid.inverse(&self.solve_series(rhs)?))
    }

    /// Grid values of the Laplacian of a cosine series.
    pub fn laplacian(&self, s: &Series2D) -> DMatrix<f64> {
        let mut c = s.clone();
        for k in 0..c.modes() {
            for l in 0..c.modes() {
                c.coeffs[(k, l)] *= -self.eig(k, l);
            }
        }
        self.grid.inverse(&c)
    }

    /// Laplacian of grid values `p` (interpolated by a cosine series).
    pub fn apply(&self, p: &DMatrix<f64>) -> DMatrix<f64> {
        self.laplacian(&self.grid.forward(p, Parity::Cos, Parity::Cos))
    }

    /// `||Lap p - rhs|| / ||rhs||` in the trapezoid norm.
    pub fn residual(&self, p: &DMatrix<f64>, rhs: &DMatrix<f64>) -> f64 {
        let r = self.apply(p) - rhs;
        let scale = self.grid.l2(rhs);
        if scale == 0.0 {
            self.grid.l2(&r)
        } else {
            self.grid.l2(&r) / scale
        }
    }

    /// Discrete Dirichlet energy `||grad p||^2` of a cosine series, in the
    /// norm induced by trapezoid weights (so that `-(p, Lap p) = ||grad p||^2`).
    pub fn grad_sq(&self, s: &Series2D) -> f64 {
        let n = s.modes();
        let len = self.grid.length();
        let w = |k: usize| if k == 0 || k + 1 == n { len } else { 0.5 * len };
        let mut e = 0.0;
        for k in 0..n {
            for l in 0..n {
                e += self.eig(k, l) * s.coeffs[(k, l)].powi(2) * w(k) * w(l);
            }
        }
        e
    }

    /// Squared `W^{2,2}` norm of a cosine series (value, gradient and Hessian).
    pub fn h2_sq(&self, s: &Series2D) -> f64 {
        let n = s.modes();
        let len = self.grid.length();
        let pi = std::f64::consts::PI / len;
        let w = |k: usize| if k == 0 || k + 1 == n { len } else { 0.5 * len };
        let mut e = 0.0;
        for k in 0..n {
            for l in 0..n {
                let (a, b) = ((k as f64 * pi).powi(2), (l as f64 * pi).powi(2));
                let weight = 1.0 + a + b + a * a + 2.0 * a * b + b * b;
                e += weight * s.coeffs[(k, l)].powi(2) * w(k) * w(l);
            }
        }
        e
    }
}

/// Values of trigonometric modes `0..modes` (and derivatives) at points.
#[derive(Debug, Clone)]
pub struct PointTables {
    cos: [DMatrix<f64>; 2],
    sin: [DMatrix<f64>; 2],
}

impl PointTables {
    pub fn new(points: &[f64], modes: usize, length: f64) -> Self {
        Self {
            cos: [
                trig_table(points, modes, length, Parity::Cos, false),
                trig_table(points, modes, length, Parity::Cos, true),
            ],
            sin: [
                trig_table(points, modes, length, Parity::Sin, false),
                trig_table(points, modes, length, Parity::Sin, true),
            ],
        }
    }

    pub fn get(&self, p: Parity, deriv: bool) -> &DMatrix<f64> {
        let t = match p {
            Parity::Cos => &self.cos,
            Parity::Sin => &self.sin,
        };
        &t[deriv as usize]
    }

    pub fn points(&self) -> usize {
        self.cos[0].nrows()
    }
}

/// Tensor evaluation of a series on the points `tx x ty`.
pub fn eval_series(tx: &PointTables, ty: &PointTables, s: &Series2D, dx: bool, dy: bool) -> DMatrix<f64> {
    tx.get(s.px, dx) * &s.coeffs * ty.get(s.py, dy).transpose()
}

/// Grid values of the divergence of a sine-basis vector field.
pub fn divergence_on_grid(u: &VectorField, grid: &AuxGrid) -> DMatrix<f64> {
    let t = ModeTable::sine(grid.nodes(), u.modes(), grid.length());
    ModeTable::eval_tensor(&t, &t, &u.x, true, false) + ModeTable::eval_tensor(&t, &t, &u.y, false, true)
}

/// Pressure from a sampled divergence: `eps Lap p = div`, mean zero.
pub fn pressure_from_divergence(solver: &NeumannSolver, div: &DMatrix<f64>, eps: f64) -> Result<Series2D> {
    if !(eps > 0.0) {
        return Err(NsfError::InvalidParameter(format!("penalty eps must be positive, got {eps}")));
    }
    Ok(solver.solve_series(div)?.scale(1.0 / eps))
}

/// The penalised pressure functional `F_eps(u)`.
pub fn pressure_f_eps(solver: &NeumannSolver, u: &VectorField, eps: f64) -> Result<Series2D> {
    pressure_from_divergence(solver, &divergence_on_grid(u, solver.grid()), eps)
}

/// A divergence-free field with vanishing normal component: `x` is a
/// sine-cosine series, `y` a cosine-sine series.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportField {
    pub x: Series2D,
    pub y: Series2D,
}

impl TransportField {
    pub fn zeros(n: usize, length: f64) -> Self {
        Self {
            x: Series2D::zeros(n, Parity::Sin, Parity::Cos, length),
            y: Series2D::zeros(n, Parity::Cos, Parity::Sin, length),
        }
    }

    /// Divergence as a cosine series (identically zero up to rounding).
    pub fn divergence(&self) -> Series2D {
        let dx = self.x.dx();
        let dy = self.y.dy();
        Series2D { coeffs: dx.coeffs + dy.coeffs, ..dx }
    }

    pub fn l2(&self) -> f64 {
        self.x.l2().hypot(self.y.l2())
    }

    pub fn eval(&self, tx: &PointTables, ty: &PointTables) -> [DMatrix<f64>; 2] {
        [eval_series(tx, ty, &self.x, false, false), eval_series(tx, ty, &self.y, false, false)]
    }

    pub fn eval_point(&self, x: f64, y: f64) -> [f64; 2] {
        [self.x.eval_point(x, y), self.y.eval_point(x, y)]
    }

    pub fn on_grid(&self, grid: &AuxGrid) -> [DMatrix<f64>; 2] {
        [grid.inverse(&self.x), grid.inverse(&self.y)]
    }
}

/// Remove the gradient part of grid samples `v` (which must vanish on the
/// boundary): returns `v - grad h` with `Lap h = div v`, `dh/dn = 0`.
pub fn helmholtz_from_grid(v: &[DMatrix<f64>; 2], grid: &AuxGrid) -> TransportField {
    let pi = std::f64::consts::PI / grid.length();
    let mut bx = grid.forward(&v[0], Parity::Sin, Parity::Cos);
    let mut by = grid.forward(&v[1], Parity::Cos, Parity::Sin);
    let n = bx.modes();
    for k in 0..n {
        for l in 0..n {
            if k + l == 0 {
                continue;
            }
            let (kk, ll) = (k as f64 * pi, l as f64 * pi);
            let d = kk * bx.coeffs[(k, l)] + ll * by.coeffs[(k, l)];
            let h = -d / (kk * kk + ll * ll);
            bx.coeffs[(k, l)] += kk * h;
            by.coeffs[(k, l)] += ll * h;
        }
    }
    TransportField { x: bx, y: by }
}

/// The mollified divergence-free transport field `M_nu(u)`.
pub fn helmholtz_mollify(
    u: &VectorField,
    mollifier: &Mollifier,
    chi: &BoundaryCutoff,
    solver: &NeumannSolver,
) -> Result<TransportField> {
    let v = mollify_field(u, mollifier, chi, solver.grid());
    if v.iter().any(|m| m.iter().any(|x| !x.is_finite())) {
        return Err(NsfError::NonFinite { time: f64::NAN, what: "mollified velocity".into() });
    }
    Ok(helmholtz_from_grid(&v, solver.grid()))
}

/// Auxiliary potential: `Lap eta = p - mean p`, zero flux, mean zero.
/// Returns `eta` on the grid and the ratio `||eta||_{2,2}^2 / ||p||_2^2`.
pub fn eta_eps(solver: &NeumannSolver, p: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let grid = solver.grid();
    let centred = p.add_scalar(-grid.mean(p));
    let s = solver.invert(grid.forward(&centred, Parity::Cos, Parity::Cos));
    let p_sq = grid.inner(p, p);
    let ratio = if p_sq > 0.0 { solver.h2_sq(&s) / p_sq } else { 0.0 };
    Ok((grid.inverse(&s), ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn solver(n: usize) -> NeumannSolver {
        NeumannSolver::new(AuxGrid::new(1.0, n))
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let s = solver(16);
        assert_eq!(s.solve(&s.grid().zeros()).unwrap().amax(), 0.0);
    }

    #[test]
    fn cosine_eigenfunction_exact() {
        let s = solver(32);
        let rhs = s.grid().tabulate(|x, _| (PI * x).cos());
        let p = s.solve(&rhs).unwrap();
        let exact = s.grid().tabulate(|x, _| -(PI * x).cos() / (PI * PI));
        assert!((p - exact).amax() < 1e-12);
    }

    #[test]
    fn incompatible_rhs_rejected() {
        let s = solver(16);
        let rhs = s.grid().tabulate(|x, y| 1.0 + x * y);
        assert!(matches!(s.solve(&rhs), Err(NsfError::Incompatible { .. })));
    }

    #[test]
    fn transport_field_is_divergence_free() {
        let g = AuxGrid::new(1.0, 24);
        let v = [
            g.tabulate(|x, y| (PI * x).sin().powi(2) * (3.0 * y).cos()),
            g.tabulate(|x, y| (PI * y).sin() * (x * 5.0).exp()),
        ];
        let m = helmholtz_from_grid(&v, &g);
        assert!(m.divergence().coeffs.amax() < 1e-12 * m.l2().max(1.0));
    }

    #[test]
    fn eta_of_constant_vanishes() {
        let s = solver(16);
        let (eta, _) = eta_eps(&s, &s.grid().tabulate(|_, _| 3.0)).unwrap();
        assert!(eta.amax() < 1e-14);
    }
}
