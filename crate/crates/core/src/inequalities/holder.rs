//! Mean-value probes on parabolic cylinders: the reverse Hoelder estimate
//! with fitted constants, and the higher-integrability ratio.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::cutoff::ParabolicCylinder;
use super::source::FieldSource;
use crate::error::{NsfError, Result};
use crate::quadrature::{composite_gauss, time_weights};

const RADIAL_CELLS: usize = 3;
const RADIAL_ORDER: usize = 6;
const ANGULAR: usize = 32;

/// Space-time integrals over one cylinder.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CylinderIntegrals {
    pub measure: f64,
    pub grad_sq: f64,
    /// `int |grad u|^{q}` for the requested exponent.
    pub grad_q: f64,
    pub u_sq: f64,
    pub u_cube: f64,
    pub u_fourth: f64,
    pub f_sq: f64,
    /// `int |f|^{s}` for the requested exponent.
    pub f_s: f64,
    pub p_sq: f64,
}

/// Polar Gauss nodes and weights on the disc `B(c, r)`.
pub fn disc_rule(center: [f64; 2], r: f64) -> (Vec<[f64; 2]>, Vec<f64>) {
    let (rho, wr) = composite_gauss(0.0, r, RADIAL_CELLS, RADIAL_ORDER);
    let mut pts = Vec::with_capacity(rho.len() * ANGULAR);
    let mut w = Vec::with_capacity(rho.len() * ANGULAR);
    for (ri, wi) in rho.iter().zip(&wr) {
        for k in 0..ANGULAR {
            let a = 2.0 * PI * (k as f64 + 0.5) / ANGULAR as f64;
            pts.push([center[0] + ri * a.cos(), center[1] + ri * a.sin()]);
            w.push(wi * ri * 2.0 * PI / ANGULAR as f64);
        }
    }
    (pts, w)
}

/// Integrate the probe quantities over `cyl`, with `|grad u|^q` and `|f|^s`.
pub fn cylinder_integrals(src: &dyn FieldSource, cyl: &ParabolicCylinder, q: f64, s: f64) -> CylinderIntegrals {
    let r = cyl.radius;
    let (pts, w) = disc_rule(cyl.center, r);
    let times = src.times();
    let mut out = CylinderIntegrals { measure: PI * r * r * r * r, ..Default::default() };
    for (m, wt) in time_weights(times, cyl.t0 - r * r, cyl.t0) {
        let smp = src.sample_points(m, &pts);
        let g2 = smp.grad_sq();
        let u2 = smp.speed_sq();
        let f2 = smp.forcing[0].component_mul(&smp.forcing[0]) + smp.forcing[1].component_mul(&smp.forcing[1]);
        for (i, wi) in w.iter().enumerate() {
            let ww = wi * wt;
            let (g, u, f, p) = (g2[i], u2[i], f2[i], smp.pressure[i]);
            out.grad_sq += ww * g;
            out.grad_q += ww * g.powf(0.5 * q);
            out.u_sq += ww * u;
            out.u_cube += ww * u.powf(1.5);
            out.u_fourth += ww * u * u;
            out.f_sq += ww * f;
            out.f_s += ww * f.powf(0.5 * s);
            out.p_sq += ww * p * p;
        }
    }
    out
}

/// Mean-value terms of the reverse estimate for one cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderTerms {
    pub cylinder: ParabolicCylinder,
    /// mean of `|grad u|^2` on `Q(R)`.
    pub lhs: f64,
    /// mean of `|grad u|^2` on `Q(2R)`.
    pub grad_2r: f64,
    /// `R^{-3}` mean `|u|^2`, `R^{-1}` mean `|u|^3`, mean `|f|^2` on `Q(2R)`.
    pub t: [f64; 3],
    /// `R` mean `|p|^2` on `Q(2R)`.
    pub pressure: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderFit {
    pub delta: f64,
    /// Smallest `(B1, B2, B3)` in the weighted sense; infinite if no finite fit.
    pub b: [f64; 3],
    pub terms: Vec<HolderTerms>,
    /// Per-cylinder slack `RHS - LHS` with the fitted constants.
    pub slack: Vec<f64>,
}

impl HolderFit {
    pub fn is_finite(&self) -> bool {
        self.b.iter().all(|v| v.is_finite())
    }
}

/// Least-cost nonnegative `b` with `t_i . b >= g_i` for every row,
/// minimizing `sum w_k b_k`, by enumeration of the polyhedron's vertices.
pub fn fit_constants(rows: &[[f64; 3]], g: &[f64], w: [f64; 3]) -> [f64; 3] {
    let active: Vec<usize> = (0..rows.len()).filter(|&i| g[i] > 0.0).collect();
    if active.is_empty() {
        return [0.0; 3];
    }
    // candidate planes: active constraints and the coordinate planes
    let mut planes: Vec<([f64; 3], f64)> = active.iter().map(|&i| (rows[i], g[i])).collect();
    for k in 0..3 {
        let mut e = [0.0; 3];
        e[k] = 1.0;
        planes.push((e, 0.0));
    }
    let feasible = |b: &[f64; 3]| {
        b.iter().all(|v| *v >= -1e-12 * (1.0 + v.abs()))
            && active.iter().all(|&i| {
                let lhs = rows[i][0] * b[0] + rows[i][1] * b[1] + rows[i][2] * b[2];
                lhs >= g[i] * (1.0 - 1e-10)
            })
    };
    let mut best = [f64::INFINITY; 3];
    let mut best_cost = f64::INFINITY;
    let np = planes.len();
    for a in 0..np {
        for b in a + 1..np {
            for c in b + 1..np {
                let (pa, pb, pc) = (planes[a].0, planes[b].0, planes[c].0);
                let m = Matrix3::new(pa[0], pa[1], pa[2], pb[0], pb[1], pb[2], pc[0], pc[1], pc[2]);
                let rhs = Vector3::new(planes[a].1, planes[b].1, planes[c].1);
                let Some(inv) = m.try_inverse() else { continue };
                let x = inv * rhs;
                let cand = [x[0].max(0.0), x[1].max(0.0), x[2].max(0.0)];
                if !cand.iter().all(|v| v.is_finite()) || !feasible(&cand) {
                    continue;
                }
                let cost = w[0] * cand[0] + w[1] * cand[1] + w[2] * cand[2];
                if cost < best_cost {
                    best_cost = cost;
                    best = cand;
                }
            }
        }
    }
    best
}

fn check_cylinders(src: &dyn FieldSource, cylinders: &[ParabolicCylinder]) -> Result<()> {
    for c in cylinders {
        c.check(src.length(), src.horizon())?;
    }
    Ok(())
}

/// Reverse-estimate terms on every cylinder and the fitted constants.
pub fn reverse_holder_probe(src: &dyn FieldSource, cylinders: &[ParabolicCylinder], delta: f64) -> Result<HolderFit> {
    if !(0.0..1.0).contains(&delta) {
        return Err(NsfError::Precondition(format!("delta must lie in [0, 1), got {delta}")));
    }
    check_cylinders(src, cylinders)?;
    let terms: Vec<HolderTerms> = cylinders
        .par_iter()
        .map(|c| {
            let r = c.radius;
            let small = cylinder_integrals(src, c, 2.0, 2.0);
            let big = cylinder_integrals(src, &c.doubled(), 2.0, 2.0);
            let mean = |v: f64| v / big.measure;
            HolderTerms {
                cylinder: *c,
                lhs: small.grad_sq / small.measure,
                grad_2r: mean(big.grad_sq),
                t: [mean(big.u_sq) / r.powi(3), mean(big.u_cube) / r, mean(big.f_sq)],
                pressure: r * mean(big.p_sq),
            }
        })
        .collect();
    let rows: Vec<[f64; 3]> = terms.iter().map(|t| t.t).collect();
    let g: Vec<f64> = terms.iter().map(|t| t.lhs - delta * t.grad_2r - t.pressure).collect();
    let n = rows.len().max(1) as f64;
    let mut w = [0.0; 3];
    for k in 0..3 {
        let m = rows.iter().map(|r| r[k]).sum::<f64>() / n;
        w[k] = if m > 0.0 { m } else { 1.0 };
    }
    let b = fit_constants(&rows, &g, w);
    let slack = terms
        .iter()
        .map(|t| delta * t.grad_2r + t.pressure + b[0] * t.t[0] + b[1] * t.t[1] + b[2] * t.t[2] - t.lhs)
        .collect();
    Ok(HolderFit { delta, b, terms, slack })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityReport {
    pub eps: f64,
    /// `(lhs, rhs, ratio)` per cylinder.
    pub per_cylinder: Vec<(f64, f64, f64)>,
    pub max_constant: f64,
}

/// Admissible exponents: `0 < eps < min{1/3, 1/4, eps0}` in two dimensions.
pub fn integrability_range(eps0: f64) -> f64 {
    (1.0f64 / 3.0).min(0.25).min(eps0)
}

/// Ratio `||grad u||_{2(1+eps), Q(R)}` over the sum of the lower-order norms
/// on `Q(2R)`; reports the largest ratio over the cylinders.
pub fn higher_integrability_probe(
    src: &dyn FieldSource,
    cylinders: &[ParabolicCylinder],
    eps: f64,
    eps0: f64,
) -> Result<IntegrabilityReport> {
    let top = integrability_range(eps0);
    if !(eps > 0.0 && eps < top) {
        return Err(NsfError::Precondition(format!("eps = {eps} outside the admissible range (0, {top})")));
    }
    check_cylinders(src, cylinders)?;
    let q = 2.0 * (1.0 + eps);
    let s = 2.0 * (1.0 + eps0);
    let per: Vec<(f64, f64, f64)> = cylinders
        .par_iter()
        .map(|c| {
            let small = cylinder_integrals(src, c, q, s);
            let big = cylinder_integrals(src, &c.doubled(), q, s);
            let lhs = small.grad_q.powf(1.0 / q);
            let rhs = big.grad_sq.sqrt() + big.u_fourth.powf(0.25) + big.f_s.powf(1.0 / s) + big.p_sq.sqrt().sqrt();
            let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
            (lhs, rhs, ratio)
        })
        .collect();
    let max_constant = per.iter().map(|p| p.2).fold(0.0, f64::max);
    Ok(IntegrabilityReport { eps, per_cylinder: per, max_constant })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_rule_integrates_polynomials() {
        let (p, w) = disc_rule([0.3, 0.4], 0.2);
        let area: f64 = w.iter().sum();
        assert!((area - PI * 0.04).abs() < 1e-13);
        let second: f64 = p.iter().zip(&w).map(|(q, w)| w * ((q[0] - 0.3).powi(2))).sum();
        assert!((second - PI * 0.2f64.powi(4) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn lp_fit_is_tight() {
        let rows = [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [1.0, 1.0, 0.0]];
        let g = [1.0, 1.0, 0.5];
        let b = fit_constants(&rows, &g, [1.0, 1.0, 1.0]);
        assert!((b[0] - 1.0).abs() < 1e-12 && (b[1] - 0.5).abs() < 1e-12 && b[2] == 0.0);
        assert_eq!(fit_constants(&rows, &[-1.0, 0.0, -2.0], [1.0; 3]), [0.0; 3]);
    }
}
