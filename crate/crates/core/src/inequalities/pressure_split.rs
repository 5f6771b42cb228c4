//! Splitting of the pressure into a convective part `p1` (sourced by
//! `u (x) M`) and the remainder `p2 = p - p1`.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::galerkin::Trajectory;
use crate::grid::{Parity, Series2D};
use crate::mollifier::field_on_grid;
use crate::quadrature::time_weights;

use super::source::TrajectorySource;

#[derive(Debug, Clone)]
pub struct PressureSplit {
    pub p1: Vec<Series2D>,
    pub p2: Vec<Series2D>,
    /// `||p1||_{(n+2)/n, Q_T}` (the exponent is 2 in two dimensions).
    pub p1_norm: f64,
    pub p2_norm: f64,
    pub p_norm: f64,
    /// `max_m ||p1 + p2 - p|| / ||p||` over time levels.
    pub consistency: f64,
    /// Relative distance between `p2` and the solution of its own weak
    /// equation (viscous and forcing terms only); report-only.
    pub p2_equation_gap: f64,
}

/// Mean-zero `p1` with `-<p1, Lap phi> = <u (x) M, D grad phi>` for all
/// zero-flux `phi`, from grid samples of `u` and `M`.
pub fn convective_pressure(traj: &Trajectory, src: &TrajectorySource, m: usize) -> Series2D {
    let model = &traj.model;
    let grid = model.grid();
    let len = model.scenario.length;
    let u = field_on_grid(&traj.velocity[m], grid);
    let mv = src.transport_field(m).on_grid(grid);
    let txx = u[0].component_mul(&mv[0]);
    let tyy = u[1].component_mul(&mv[1]);
    let txy = u[0].component_mul(&mv[1]) + u[1].component_mul(&mv[0]);
    let axx = grid.forward(&txx, Parity::Cos, Parity::Cos);
    let ayy = grid.forward(&tyy, Parity::Cos, Parity::Cos);
    let bxy = grid.forward(&txy, Parity::Sin, Parity::Sin);
    let mut p1 = Series2D::zeros(grid.intervals(), Parity::Cos, Parity::Cos, len);
    let pi = std::f64::consts::PI / len;
    for k in 0..p1.modes() {
        for l in 0..p1.modes() {
            if k + l == 0 {
                continue;
            }
            let (a, b) = (k as f64 * pi, l as f64 * pi);
            let num = -a * a * axx.coeffs[(k, l)] - b * b * ayy.coeffs[(k, l)] + a * b * bxy.coeffs[(k, l)];
            p1.coeffs[(k, l)] = num / (a * a + b * b);
        }
    }
    p1
}

/// Solution of `<p2, Lap phi> = (mu Du, D grad phi) - (f, grad phi)` in the
/// cosine basis, integrated at the quadrature nodes.
fn p2_from_equation(traj: &Trajectory, m: usize) -> Series2D {
    let model = &traj.model;
    let st = traj.state(m);
    let tab = &model.quad_tables;
    let b = &model.basis;
    let mu = model.viscosity_values(&st.temp.value);
    let f = model.forcing_values(traj.times[m]);
    let proj = |g: &DMatrix<f64>, px: Parity, py: Parity| tab.get(px, false).tr_mul(&b.weigh(g)) * tab.get(py, false);
    let cxx = proj(&mu.component_mul(&st.vel.sym(0, 0)), Parity::Cos, Parity::Cos);
    let cyy = proj(&mu.component_mul(&st.vel.sym(1, 1)), Parity::Cos, Parity::Cos);
    let sxy = proj(&mu.component_mul(&st.vel.sym(0, 1)), Parity::Sin, Parity::Sin);
    let fx = proj(&f[0], Parity::Sin, Parity::Cos);
    let fy = proj(&f[1], Parity::Cos, Parity::Sin);
    let len = model.scenario.length;
    let n = model.grid().intervals();
    let pi = std::f64::consts::PI / len;
    let norm = |k: usize| if k == 0 { len } else { 0.5 * len };
    let mut out = Series2D::zeros(n, Parity::Cos, Parity::Cos, len);
    for k in 0..=n {
        for l in 0..=n {
            if k + l == 0 {
                continue;
            }
            let (a, bb) = (k as f64 * pi, l as f64 * pi);
            let visc = -a * a * cxx[(k, l)] - bb * bb * cyy[(k, l)] + 2.0 * a * bb * sxy[(k, l)];
            let force = -a * fx[(k, l)] - bb * fy[(k, l)];
            let lam = a * a + bb * bb;
            out.coeffs[(k, l)] = -(visc - force) / (lam * norm(k) * norm(l));
        }
    }
    out
}

/// Split every stored pressure and report the space-time norms.
pub fn pressure_split(traj: &Trajectory) -> Result<PressureSplit> {
    let src = TrajectorySource::new(traj);
    let grid = traj.model.grid();
    let mut p1s = Vec::with_capacity(traj.len());
    let mut p2s = Vec::with_capacity(traj.len());
    let mut consistency = 0.0f64;
    let mut gap_num = 0.0;
    let mut gap_den = 0.0;
    let mut sq = [0.0f64; 3];
    let weights: Vec<f64> = {
        let mut w = vec![0.0; traj.len()];
        for (m, wt) in time_weights(&traj.times, 0.0, *traj.times.last().unwrap_or(&0.0)) {
            w[m] = wt;
        }
        w
    };
    for m in 0..traj.len() {
        let p = &traj.pressure[m];
        let p1 = convective_pressure(traj, &src, m);
        let p2 = Series2D { coeffs: &p.coeffs - &p1.coeffs, ..p.clone() };
        let (pv, p1v, p2v) = (grid.inverse(p), grid.inverse(&p1), grid.inverse(&p2));
        let pn = grid.l2(&pv);
        let resid = grid.l2(&(&p1v + &p2v - &pv));
        if pn > 0.0 {
            consistency = consistency.max(resid / pn);
        } else {
            consistency = consistency.max(resid);
        }
        let eq = grid.inverse(&p2_from_equation(traj, m));
        gap_num += weights[m] * grid.inner(&(&eq - &p2v), &(&eq - &p2v));
        gap_den += weights[m] * grid.inner(&p2v, &p2v);
        sq[0] += weights[m] * grid.inner(&p1v, &p1v);
        sq[1] += weights[m] * grid.inner(&p2v, &p2v);
        sq[2] += weights[m] * pn * pn;
        p1s.push(p1);
        p2s.push(p2);
    }
    Ok(PressureSplit {
        p1: p1s,
        p2: p2s,
        p1_norm: sq[0].sqrt(),
        p2_norm: sq[1].sqrt(),
        p_norm: sq[2].sqrt(),
        consistency,
        p2_equation_gap: if gap_den > 0.0 { (gap_num / gap_den).sqrt() } else { gap_num.sqrt() },
    })
}
