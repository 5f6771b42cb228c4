//! Compactly supported radial mollifier and the sharp boundary cut-off.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::basis::{ModeTable, VectorField};
use crate::error::{invalid, Result};
use crate::grid::AuxGrid;
use crate::quadrature::composite_gauss;

/// `omega(x) = C nu^-2 exp(-1 / (1 - |x|^2 / nu^2))` for `|x| < nu`, else 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    radius: f64,
    norm: f64,
}

fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

impl Mollifier {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid(format!("mollifier radius must be positive, got {radius}")));
        }
        // 2 pi int_0^1 bump(s) s ds, integrand is smooth and flat at s = 1
        let (s, w) = composite_gauss(0.0, 1.0, 64, 8);
        let radial: f64 = s.iter().zip(&w).map(|(&s, &w)| w * bump(s) * s).sum();
        Ok(Self { radius, norm: 1.0 / (2.0 * PI * radial) })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn kernel(&self, x: f64, y: f64) -> f64 {
        let r = (x * x + y * y).sqrt() / self.radius;
        self.norm * bump(r) / (self.radius * self.radius)
    }

    /// Normalized weights of the kernel sampled at lattice spacing `h`.
    /// Falls back to the identity stencil when the lattice cannot resolve
    /// the kernel.
    pub fn stencil(&self, h: f64) -> Vec<(isize, isize, f64)> {
        let r = (self.radius / h).floor() as isize;
        let mut out = Vec::new();
        for i in -r..=r {
            for j in -r..=r {
                let w = self.kernel(i as f64 * h, j as f64 * h);
                if w > 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        let total: f64 = out.iter().map(|t| t.2).sum();
        if total <= 0.0 {
            return vec![(0, 0, 1.0)];
        }
        for t in &mut out {
            t.2 /= total;
        }
        out
    }

    /// Discrete convolution of a grid function, extended by zero outside
    /// the grid.
    pub fn convolve_grid(&self, values: &DMatrix<f64>, grid: &AuxGrid) -> DMatrix<f64> {
        let st = self.stencil(grid.spacing());
        let n = values.nrows() as isize;
        DMatrix::from_fn(values.nrows(), values.ncols(), |a, b| {
            let mut s = 0.0;
            for &(i, j, w) in &st {
                let (p, q) = (a as isize - i, b as isize - j);
                if p >= 0 && q >= 0 && p < n && q < n {
                    s += w * values[(p as usize, q as usize)];
                }
            }
            s
        })
    }

    /// Pointwise convolution `(f * omega)(x, y)` on a lattice of spacing
    /// `nu / 4` with normalized weights.
    pub fn convolve_point(&self, f: impl Fn(f64, f64) -> f64, x: f64, y: f64) -> f64 {
        let h = self.radius / 4.0;
        self.stencil(h)
            .iter()
            .map(|&(i, j, w)| w * f(x - i as f64 * h, y - j as f64 * h))
            .sum()
    }
}

/// `chi = 0` within distance `2 nu` of the boundary, 1 elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCutoff {
    nu: f64,
    length: f64,
}

impl BoundaryCutoff {
    pub fn new(nu: f64, length: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(invalid("cut-off width must be positive"));
        }
        if nu >= length / 4.0 {
            return Err(invalid(format!("nu = {nu} >= L/4 = {}: the cut-off removes the whole domain", length / 4.0)));
        }
        Ok(Self { nu, length })
    }

    pub fn margin(&self) -> f64 {
        2.0 * self.nu
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let d = x.min(y).min(self.length - x).min(self.length - y);
        // grid nodes sitting exactly on the margin count as inside the band
        if d <= self.margin() * (1.0 + 1e-12) {
            0.0
        } else {
            1.0
        }
    }
}

/// Values of a sine-basis vector field on the auxiliary grid nodes.
pub fn field_on_grid(u: &VectorField, grid: &AuxGrid) -> [DMatrix<f64>; 2] {
    let t = ModeTable::sine(grid.nodes(), u.modes(), grid.length());
    [ModeTable::eval_tensor(&t, &t, &u.x, false, false), ModeTable::eval_tensor(&t, &t, &u.y, false, false)]
}

/// `(chi u) * omega` sampled on the auxiliary grid.
pub fn mollify_field(u: &VectorField, mollifier: &Mollifier, chi: &BoundaryCutoff, grid: &AuxGrid) -> [DMatrix<f64>; 2] {
    let vals = field_on_grid(u, grid);
    let mask = grid.tabulate(|x, y| chi.eval(x, y));
    let cut = |v: &DMatrix<f64>| mollifier.convolve_grid(&v.component_mul(&mask), grid);
    [cut(&vals[0]), cut(&vals[1])]
}
