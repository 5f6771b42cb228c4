//! Restarted GMRES with right preconditioning for the implicit velocity solve.

use nalgebra::{DMatrix, DVector};

use crate::error::{NsfError, Result};

/// Solve `A x = b` with `A` given as a closure; `precond` approximates
/// `A^{-1}` and is applied on the right. Returns the solution and the
/// number of matrix-vector products.
pub fn gmres(
    apply: impl Fn(&DVector<f64>) -> DVector<f64>,
    precond: impl Fn(&DVector<f64>) -> DVector<f64>,
    b: &DVector<f64>,
    x0: DVector<f64>,
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<(DVector<f64>, usize)> {
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok((DVector::zeros(b.len()), 0));
    }
    let mut x = x0;
    let mut matvecs = 0;
    while matvecs < max_iter {
        let r = b - apply(&x);
        matvecs += 1;
        let beta = r.norm();
        if beta <= tol * bnorm {
            return Ok((x, matvecs));
        }
        let m = restart;
        let mut v: Vec<DVector<f64>> = vec![r / beta];
        let mut z: Vec<DVector<f64>> = Vec::with_capacity(m);
        let mut h = DMatrix::<f64>::zeros(m + 1, m);
        let mut g = DVector::<f64>::zeros(m + 1);
        g[0] = beta;
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut k_used = 0;
        for k in 0..m {
            let zk = precond(&v[k]);
            let mut w = apply(&zk);
            matvecs += 1;
            z.push(zk);
            for i in 0..=k {
                h[(i, k)] = w.dot(&v[i]);
                w.axpy(-h[(i, k)], &v[i], 1.0);
            }
            // second Gram-Schmidt pass for orthogonality at tight tolerances
            for i in 0..=k {
                let c = w.dot(&v[i]);
                h[(i, k)] += c;
                w.axpy(-c, &v[i], 1.0);
            }
            h[(k + 1, k)] = w.norm();
            for i in 0..k {
                let t = cs[i] * h[(i, k)] + sn[i] * h[(i + 1, k)];
                h[(i + 1, k)] = -sn[i] * h[(i, k)] + cs[i] * h[(i + 1, k)];
                h[(i, k)] = t;
            }
            let d = h[(k, k)].hypot(h[(k + 1, k)]);
            if d == 0.0 {
                return Err(NsfError::LinearSolve("GMRES breakdown".into()));
            }
            cs[k] = h[(k, k)] / d;
            sn[k] = h[(k + 1, k)] / d;
            let hk1 = h[(k + 1, k)];
            h[(k, k)] = d;
            h[(k + 1, k)] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            if g[k + 1].abs() <= tol * bnorm || matvecs >= max_iter {
                break;
            }
            v.push(w / hk1);
        }
        let mut y = DVector::<f64>::zeros(k_used);
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[(i, j)] * y[j];
            }
            y[i] = s / h[(i, i)];
        }
        for (i, zi) in z.iter().take(k_used).enumerate() {
            x.axpy(y[i], zi, 1.0);
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(NsfError::LinearSolve("GMRES produced non-finite iterate".into()));
        }
    }
    let res = (b - apply(&x)).norm();
    if res <= tol * bnorm * 10.0 {
        Ok((x, matvecs))
    } else {
        Err(NsfError::LinearSolve(format!("GMRES did not converge: relative residual {:e}", res / bnorm)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_nonsymmetric_system() {
        let n = 30;
        let a = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                4.0 + i as f64 * 0.1
            } else {
                ((i * 7 + j * 3) % 5) as f64 * 0.05 - 0.1
            }
        });
        let x_true = DVector::from_fn(n, |i, _| (i as f64).sin());
        let b = &a * &x_true;
        let (x, _) = gmres(|v| &a * v, |v| v.clone(), &b, DVector::zeros(n), 1e-13, 7, 2000).unwrap();
        assert!((x - x_true).amax() < 1e-11);
    }
}
