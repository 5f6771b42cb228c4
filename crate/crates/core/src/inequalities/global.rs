//! Global a-priori estimates evaluated on a computed trajectory.

use nalgebra::DMatrix;

use crate::galerkin::Trajectory;

use super::InequalityReport;

/// Per-level norms recomputed from the stored coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelNorms {
    pub u_sq: Vec<f64>,
    pub du_sq: Vec<f64>,
    pub theta_l1: Vec<f64>,
    pub theta_min: Vec<f64>,
    pub theta_max: Vec<f64>,
    pub forcing_sq: Vec<f64>,
}

pub fn level_norms(traj: &Trajectory) -> LevelNorms {
    let model = &traj.model;
    let b = &model.basis;
    let mut out = LevelNorms { u_sq: vec![], du_sq: vec![], theta_l1: vec![], theta_min: vec![], theta_max: vec![], forcing_sq: vec![] };
    for m in 0..traj.len() {
        let st = traj.state(m);
        let f = model.forcing_values(traj.times[m]);
        out.u_sq.push(st.u.l2_sq(b.length()));
        out.du_sq.push(b.integrate(&st.vel.du_sq()));
        out.theta_l1.push(b.integrate(&st.temp.value.abs()));
        out.theta_min.push(st.temp.value.min());
        out.theta_max.push(st.temp.value.max());
        out.forcing_sq.push(b.integrate(&(f[0].component_mul(&f[0]) + f[1].component_mul(&f[1]))));
    }
    out
}

/// Poincare-type constant `C_P = L^2 / (pi^2 mu_#)` for which
/// `(f, u) <= mu_# ||Du||^2 / 2 + C_P ||f||^2 / 2` on zero-trace fields.
pub fn poincare_constant(length: f64, mu_lower: f64) -> f64 {
    length * length / (std::f64::consts::PI.powi(2) * mu_lower)
}

/// Continuous initial data sampled on the production quadrature.
fn initial_norms(traj: &Trajectory) -> (f64, f64) {
    let model = &traj.model;
    let x = model.domain.nodes();
    let n = x.len();
    let u = DMatrix::from_fn(n, n, |i, j| {
        let v = model.scenario.u0_at(x[i], x[j]);
        v[0] * v[0] + v[1] * v[1]
    });
    let th = DMatrix::from_fn(n, n, |i, j| model.scenario.theta0_at(x[i], x[j]).abs());
    (model.basis.integrate(&u), model.basis.integrate(&th))
}

/// Energy estimate in the form the per-step argument yields, at every level
/// at once: `||u^m||^2 + mu_# dt sum_{k<=m} ||Du^k||^2 <= ||u_0||^2 +
/// C_P dt sum_{k<=m} ||f^k||^2`; the report carries the tightest level.
pub fn velocity_estimate(traj: &Trajectory, rel_tol: f64) -> InequalityReport {
    let sc = &traj.model.scenario;
    let norms = level_norms(traj);
    let dt = traj.dt();
    let mu = sc.viscosity.lower();
    let cp = poincare_constant(sc.length, mu);
    let (u0, _) = initial_norms(traj);
    let (mut diss, mut force) = (0.0, 0.0);
    let mut worst = (f64::INFINITY, 0.0, 0.0, 0usize);
    for m in 0..norms.u_sq.len() {
        if m > 0 {
            diss += dt * norms.du_sq[m];
            force += dt * norms.forcing_sq[m];
        }
        let (lhs, rhs) = (norms.u_sq[m] + mu * diss, u0 + cp * force);
        if rhs - lhs < worst.0 {
            worst = (rhs - lhs, lhs, rhs, m);
        }
    }
    let (_, lhs, rhs, m) = worst;
    InequalityReport::new("velocity_energy", lhs, rhs, lhs.abs() + rhs.abs(), rel_tol, format!("level={m};C_P={cp:e};mu_lower={mu:e}"))
}

/// The same estimate with the supremum and the full dissipation sum taken
/// separately; informational, since it exceeds `||u_0||^2` whenever the
/// supremum sits at `t = 0` and any energy is dissipated.
pub fn velocity_estimate_separated(traj: &Trajectory) -> InequalityReport {
    let sc = &traj.model.scenario;
    let norms = level_norms(traj);
    let dt = traj.dt();
    let mu = sc.viscosity.lower();
    let cp = poincare_constant(sc.length, mu);
    let sup = norms.u_sq.iter().copied().fold(0.0, f64::max);
    let diss: f64 = dt * norms.du_sq.iter().skip(1).sum::<f64>();
    let force: f64 = dt * norms.forcing_sq.iter().skip(1).sum::<f64>();
    let (u0, _) = initial_norms(traj);
    let (lhs, rhs) = (sup + mu * diss, u0 + cp * force);
    InequalityReport::new("velocity_energy_separated", lhs, rhs, lhs.abs() + rhs.abs(), 0.0, format!("C_P={cp:e};mu_lower={mu:e}"))
}

/// `sup_m ||theta^m||_1 <= mu^# || |Du|^2 ||_{1,Q_T} + T ||theta_0||_1 + |Q_T| / 2 + slack`.
pub fn temperature_estimate(traj: &Trajectory, slack: f64) -> InequalityReport {
    let sc = &traj.model.scenario;
    let norms = level_norms(traj);
    let dt = traj.dt();
    let sup = norms.theta_l1.iter().copied().fold(0.0, f64::max);
    let du: f64 = dt * norms.du_sq.iter().skip(1).sum::<f64>();
    let (_, th0) = initial_norms(traj);
    let t_end = *traj.times.last().unwrap_or(&0.0);
    let q = sc.length * sc.length * t_end;
    let rhs = sc.viscosity.upper() * du + t_end * th0 + 0.5 * q + slack;
    InequalityReport::new("temperature_l1", sup, rhs, sup.abs() + rhs.abs(), 0.0, format!("mu_upper={:e}", sc.viscosity.upper()))
}

/// Minimum-principle figures: `(min theta, max theta, violation)` over all
/// levels and quadrature nodes, where the violation is `max(0, -min)`.
pub fn minimum_principle(traj: &Trajectory) -> (f64, f64, f64) {
    let norms = level_norms(traj);
    let lo = norms.theta_min.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = norms.theta_max.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi, (-lo).max(0.0))
}
