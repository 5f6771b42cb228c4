//! Square domain `(0, L)^2` with a tensor-product composite Gauss rule.

use crate::error::{invalid, Result};
use crate::quadrature::composite_gauss;

/// Points per cell used when the quadrature is sized from a mode count.
pub const DEFAULT_ORDER: usize = 6;

/// The square `(0, L)^2` and its quadrature.
///
/// The 2D rule is the tensor product of one composite Gauss rule per
/// direction; node `(a, b)` sits at `(nodes[a], nodes[b])` with weight
/// `weights[a] * weights[b]`. Quadrature-point fields are stored as
/// `nq x nq` matrices with rows indexing `x` and columns indexing `y`.
#[derive(Debug, Clone)]
pub struct Domain2D {
    length: f64,
    cells: usize,
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Domain2D {
    /// Composite rule with `cells` cells per direction and `order` Gauss
    /// points per cell (exact for polynomials of degree `2*order - 1` per cell).
    pub fn new(length: f64, order: usize, cells: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(invalid(format!("domain length must be positive, got {length}")));
        }
        if order < 2 {
            return Err(invalid(format!("quadrature order must be >= 2, got {order}")));
        }
        if cells < 1 {
            return Err(invalid("need at least one quadrature cell"));
        }
        let (nodes, weights) = composite_gauss(0.0, length, cells, order);
        Ok(Self { length, cells, order, nodes, weights })
    }

    /// Quadrature sized so that products of sine modes up to `max_modes`
    /// (and smooth coefficients multiplying them) integrate to roughly
    /// machine precision: two cells per highest mode, `DEFAULT_ORDER` points each.
    pub fn for_modes(length: f64, max_modes: usize) -> Result<Self> {
        Self::new(length, DEFAULT_ORDER, (2 * max_modes).max(4))
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn area(&self) -> f64 {
        self.length * self.length
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// 1D nodes (shared by both directions).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Points per direction.
    pub fn nq(&self) -> usize {
        self.nodes.len()
    }

    /// Distance from `(x, y)` to the boundary of the square.
    pub fn dist_to_boundary(&self, x: f64, y: f64) -> f64 {
        x.min(self.length - x).min(y).min(self.length - y)
    }

    /// Integral of `f` over the square.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (a, &x) in self.nodes.iter().enumerate() {
            let mut row = 0.0;
            for (b, &y) in self.nodes.iter().enumerate() {
                row += self.weights[b] * f(x, y);
            }
            total += self.weights[a] * row;
        }
        total
    }

    /// Integral of a quadrature-point field.
    pub fn integrate_values(&self, values: &nalgebra::DMatrix<f64>) -> f64 {
        let mut total = 0.0;
        for a in 0..self.nq() {
            let mut row = 0.0;
            for b in 0..self.nq() {
                row += self.weights[b] * values[(a, b)];
            }
            total += self.weights[a] * row;
        }
        total
    }

    /// Tabulate `f` at the quadrature nodes.
    pub fn tabulate(&self, f: impl Fn(f64, f64) -> f64) -> nalgebra::DMatrix<f64> {
        let nq = self.nq();
        nalgebra::DMatrix::from_fn(nq, nq, |a, b| f(self.nodes[a], self.nodes[b]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn weights_sum_to_area() {
        let d = Domain2D::new(1.0, 4, 8).unwrap();
        let s: f64 = d.weights().iter().sum::<f64>().powi(2);
        assert!((s - 1.0).abs() < 1e-12);
        let d = Domain2D::new(2.5, 5, 3).unwrap();
        let s: f64 = d.weights().iter().sum::<f64>().powi(2);
        assert!((s - 6.25).abs() / 6.25 < 1e-12);
    }

    #[test]
    fn closed_form_integrals() {
        let d = Domain2D::new(1.0, 4, 8).unwrap();
        let v = d.integrate(|x, y| (PI * x).sin() * (PI * y).sin());
        assert!((v - 4.0 / (PI * PI)).abs() < 1e-10);
        let v = d.integrate(|x, y| x * x * y * y);
        assert!((v - 1.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn nodes_strictly_interior() {
        let d = Domain2D::for_modes(1.0, 8).unwrap();
        assert!(d.nodes().iter().all(|&x| x > 0.0 && x < 1.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Domain2D::new(0.0, 4, 2).is_err());
        assert!(Domain2D::new(-1.0, 4, 2).is_err());
        assert!(Domain2D::new(1.0, 1, 2).is_err());
    }
}
