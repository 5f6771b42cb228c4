//! Dense references for the Neumann problem `Lap p = rhs`, `dp/dn = 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{NsfError, Result};
use crate::grid::AuxGrid;

/// Largest grid (intervals per side) the dense oracles accept.
pub const DENSE_MAX_INTERVALS: usize = 40;
/// Largest grid the finite-difference oracle accepts.
pub const FD_MAX_INTERVALS: usize = 48;

fn check_compatible(grid: &AuxGrid, rhs: &DMatrix<f64>) -> Result<()> {
    let mean = grid.integrate(rhs);
    let tol = 1e-8 * grid.l1(rhs);
    if mean.abs() > tol {
        return Err(NsfError::Incompatible { mean, tol });
    }
    Ok(())
}

/// One-dimensional cosine-collocation second-derivative matrix on the
/// nodes `x_j = j L / n`, assembled as `C diag(-(k pi / L)^2) C^{-1}` from
/// directly evaluated cosines.
fn cosine_d2(n: usize, length: f64) -> Result<DMatrix<f64>> {
    let w = std::f64::consts::PI / length;
    let c = DMatrix::from_fn(n + 1, n + 1, |j, k| (k as f64 * w * (j as f64 * length / n as f64)).cos());
    let cinv = c.clone().lu().try_inverse().ok_or_else(|| NsfError::LinearSolve("cosine collocation matrix is singular".into()))?;
    let lam = DMatrix::from_diagonal(&DVector::from_fn(n + 1, |k, _| -(k as f64 * w).powi(2)));
    Ok(c * lam * cinv)
}

/// Solve a bordered system `[A 1; w^T 0] [p; lambda] = [rhs; 0]`, where the
/// border fixes the trapezoid mean of `p` to zero.
fn bordered_solve(a: DMatrix<f64>, weights: &DVector<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let size = a.nrows();
    let mut big = DMatrix::zeros(size + 1, size + 1);
    big.view_mut((0, 0), (size, size)).copy_from(&a);
    for i in 0..size {
        big[(i, size)] = 1.0;
        big[(size, i)] = weights[i];
    }
    let (nr, nc) = rhs.shape();
    let mut b = DVector::zeros(size + 1);
    for i in 0..nr {
        for j in 0..nc {
            b[i * nc + j] = rhs[(i, j)];
        }
    }
    let sol = big.lu().solve(&b).ok_or_else(|| NsfError::LinearSolve("bordered Neumann matrix is singular".into()))?;
    Ok(DMatrix::from_fn(nr, nc, |i, j| sol[i * nc + j]))
}

fn kron_laplacian(d2: &DMatrix<f64>) -> DMatrix<f64> {
    let m = d2.nrows();
    let mut a = DMatrix::zeros(m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            let row = i * m + j;
            for k in 0..m {
                a[(row, k * m + j)] += d2[(i, k)];
                a[(row, i * m + k)] += d2[(j, k)];
            }
        }
    }
    a
}

fn trapezoid_weights(grid: &AuxGrid) -> DVector<f64> {
    let t = grid.trap();
    let m = t.len();
    DVector::from_fn(m * m, |r, _| t[r / m] * t[r % m])
}

/// Mean-zero collocation solution by dense LU; the discrete operator is the
/// one the spectral solver diagonalises, assembled without transforms.
pub fn dense_neumann_oracle(grid: &AuxGrid, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = grid.intervals();
    if n > DENSE_MAX_INTERVALS {
        return Err(NsfError::Precondition(format!("dense oracle limited to {DENSE_MAX_INTERVALS} intervals, got {n}")));
    }
    check_compatible(grid, rhs)?;
    let a = kron_laplacian(&cosine_d2(n, grid.length())?);
    bordered_solve(a, &trapezoid_weights(grid), rhs)
}

/// Second-order vertex-centred finite differences with reflected ghost
/// nodes; the rhs is made discretely compatible by removing its trapezoid
/// mean, and the solution has trapezoid mean zero.
pub fn finite_difference_neumann(grid: &AuxGrid, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = grid.intervals();
    if n > FD_MAX_INTERVALS {
        return Err(NsfError::Precondition(format!("dense oracle limited to {FD_MAX_INTERVALS} intervals, got {n}")));
    }
    let h = grid.spacing();
    let mut d2 = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        d2[(i, i)] = -2.0 / (h * h);
        let left = if i == 0 { 1 } else { i - 1 };
        let right = if i == n { n - 1 } else { i + 1 };
        d2[(i, left)] += 1.0 / (h * h);
        d2[(i, right)] += 1.0 / (h * h);
    }
    let mean = grid.mean(rhs);
    let shifted = rhs.map(|v| v - mean);
    bordered_solve(kron_laplacian(&d2), &trapezoid_weights(grid), &shifted)
}

/// Richardson extrapolation `(4 p_{h/2} - p_h) / 3` of the finite-difference
/// solutions for a smooth rhs, at the nodes of the coarse grid with `n`
/// intervals; the result is shifted to trapezoid mean zero on that grid.
pub fn richardson_neumann(length: f64, n: usize, rhs: impl Fn(f64, f64) -> f64) -> Result<DMatrix<f64>> {
    let coarse = AuxGrid::new(length, n);
    let fine = AuxGrid::new(length, 2 * n);
    let pc = finite_difference_neumann(&coarse, &coarse.tabulate(&rhs))?;
    let pf = finite_difference_neumann(&fine, &fine.tabulate(&rhs))?;
    let ext = DMatrix::from_fn(n + 1, n + 1, |i, j| (4.0 * pf[(2 * i, 2 * j)] - pc[(i, j)]) / 3.0);
    let mean = coarse.mean(&ext);
    Ok(ext.map(|v| v - mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_eigenfunction() {
        let g = AuxGrid::new(1.0, 12);
        assert_eq!(dense_neumann_oracle(&g, &g.zeros()).unwrap(), g.zeros());
        let w = std::f64::consts::PI;
        let rhs = g.tabulate(|x, y| (2.0 * w * x).cos() * (w * y).cos());
        let p = dense_neumann_oracle(&g, &rhs).unwrap();
        let exact = g.tabulate(|x, y| -(2.0 * w * x).cos() * (w * y).cos() / (5.0 * w * w));
        assert!((p - exact).amax() < 1e-10);
    }

    #[test]
    fn incompatible_rejected() {
        let g = AuxGrid::new(1.0, 8);
        let rhs = g.tabulate(|_, _| 1.0);
        assert!(matches!(dense_neumann_oracle(&g, &rhs), Err(NsfError::Incompatible { .. })));
    }

    #[test]
    fn richardson_self_converges() {
        let w = std::f64::consts::PI;
        let rhs = |x: f64, y: f64| (w * x).cos() * (2.0 * w * y).cos() + 0.3 * (3.0 * w * x).cos();
        let exact = |x: f64, y: f64| -(w * x).cos() * (2.0 * w * y).cos() / (5.0 * w * w) - 0.3 * (3.0 * w * x).cos() / (9.0 * w * w);
        let err = |n: usize| {
            let g = AuxGrid::new(1.0, n);
            (richardson_neumann(1.0, n, rhs).unwrap() - g.tabulate(exact)).amax()
        };
        let (e1, e2) = (err(8), err(16));
        assert!(e2 < 1e-4 && e1 / e2 > 10.0, "{e1} {e2}");
    }
}
