//! Gauss-Legendre rules and small quadrature helpers shared by the domain,
//! the verifiers and the oracles.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on `[a, b]` with `cells` equal cells.
pub fn composite_gauss(a: f64, b: f64, cells: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (xr, wr) = gauss_legendre(order);
    let h = (b - a) / cells as f64;
    let mut nodes = Vec::with_capacity(cells * order);
    let mut weights = Vec::with_capacity(cells * order);
    for c in 0..cells {
        let left = a + c as f64 * h;
        for (x, w) in xr.iter().zip(&wr) {
            nodes.push(left + 0.5 * h * (x + 1.0));
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

/// Weights `(step, weight)` such that `sum w * g(t_step)` is the exact
/// integral over `[a, b]` of the piecewise-linear interpolant of `g`
/// through the samples at `times`. This is the trapezoid rule with partial
/// end intervals.
pub fn time_weights(times: &[f64], a: f64, b: f64) -> Vec<(usize, f64)> {
    let mut w = vec![0.0; times.len()];
    if times.len() < 2 || b <= a {
        return Vec::new();
    }
    for s in 0..times.len() - 1 {
        let (t0, t1) = (times[s], times[s + 1]);
        let lo = a.max(t0);
        let hi = b.min(t1);
        if hi <= lo {
            continue;
        }
        let len = t1 - t0;
        // Integral of the two hat functions restricted to [lo, hi].
        let l0 = |t: f64| (t1 - t) / len;
        let l1 = |t: f64| (t - t0) / len;
        w[s] += 0.5 * (l0(lo) + l0(hi)) * (hi - lo);
        w[s + 1] += 0.5 * (l1(lo) + l1(hi)) * (hi - lo);
    }
    w.into_iter()
        .enumerate()
        .filter(|(_, x)| *x != 0.0)
        .collect()
}

/// Index of the stored time closest to `t`.
pub fn nearest_step(times: &[f64], t: f64) -> usize {
    let mut best = 0;
    for (i, &ti) in times.iter().enumerate() {
        if (ti - t).abs() < (times[best] - t).abs() {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials_exactly() {
        for order in 1..=12 {
            let (x, w) = gauss_legendre(order);
            for deg in 0..(2 * order) {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "order {order} deg {deg}");
            }
        }
    }

    #[test]
    fn time_weights_cover_partial_intervals() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let w = time_weights(&times, 0.05, 0.73);
        let total: f64 = w.iter().map(|(_, w)| w).sum();
        assert!((total - 0.68).abs() < 1e-14);
        // linear integrand integrates exactly
        let lin: f64 = w.iter().map(|&(i, w)| w * times[i]).sum();
        let exact = 0.5 * (0.73f64.powi(2) - 0.05f64.powi(2));
        assert!((lin - exact).abs() < 1e-14);
    }
}
