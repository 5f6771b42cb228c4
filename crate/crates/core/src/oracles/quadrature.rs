//! Brute-force reference integrals over the square.

use crate::error::{NsfError, Result};
use crate::quadrature::composite_gauss;

/// Tensor composite Gauss rule (order 6) with `factor` times as many cells
/// per direction as the `base_cells` production rule.
pub fn oversampled_quadrature(f: impl Fn(f64, f64) -> f64, length: f64, base_cells: usize, factor: usize) -> Result<f64> {
    if factor < 4 {
        return Err(NsfError::Precondition(format!("oversampling factor must be at least 4, got {factor}")));
    }
    let (x, w) = composite_gauss(0.0, length, base_cells.max(1) * factor, 6);
    let mut total = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let mut row = 0.0;
        for (yj, wj) in x.iter().zip(&w) {
            row += wj * f(*xi, *yj);
        }
        total += wi * row;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_cases() {
        assert!((oversampled_quadrature(|_, _| 1.0, 2.0, 1, 4).unwrap() - 4.0).abs() < 1e-14);
        let v = oversampled_quadrature(|x, y| x.powi(5) * y.powi(3), 1.0, 1, 4).unwrap();
        assert!((v - 1.0 / 24.0).abs() < 1e-15);
        assert!(oversampled_quadrature(|_, _| 1.0, 1.0, 1, 2).is_err());
    }
}
