//! Faedo-Galerkin system for velocity and temperature, integrated in time
//! by a first-order implicit-explicit scheme.
//!
//! Step `m -> m+1` (viscosity frozen at `theta^m`, transport field and
//! pressure taken from `u^m`):
//!
//! ```text
//! (u^{m+1} - u^m)/dt, w) + (mu(theta^m) Du^{m+1}, Dw) + c(M^m; u^{m+1}, w)
//!     = (p^m, div w) + (f(t_{m+1}), w)
//! (theta^{m+1} - theta^m)/dt, w) + k (grad theta^{m+1}, grad w)
//!     = (theta^m M^m, grad w) + (mu(theta^m) |Du^{m+1}|^2, w)
//! ```
//!
//! `c` is the skew-symmetric convective form, so `c(M; v, v) = 0` exactly and
//! the kinetic energy obeys a discrete energy inequality. The heat source is
//! exactly the viscous dissipation removed from the velocity.

mod gmres;
mod ledger;
mod model;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub use gmres::gmres;
pub use ledger::{EnergyLedger, LedgerRow};
pub use model::{Derived, GalerkinState, Model};

use crate::basis::{ScalarField, VectorField};
use crate::error::{NsfError, Result};
use crate::grid::Series2D;
use crate::scenario::Scenario;

/// Products of one time step.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub state: GalerkinState,
    /// Pressure `F_eps(u^m)` used in the step.
    pub pressure: Series2D,
    /// `mu(theta^m) |Du^{m+1}|^2` at the quadrature nodes.
    pub joule: DMatrix<f64>,
    /// Heat actually added to the temperature field, `int P_M(J)`.
    pub heat_injected: f64,
    /// `(p^m, div u^{m+1})` and `(f, u^{m+1})`.
    pub pressure_work: f64,
    pub forcing_work: f64,
    pub matvecs: usize,
}

fn viscous_diagonal(model: &Model, mu_bar: f64, dt: f64) -> VectorField {
    let s = &model.basis.velocity;
    let n = s.modes;
    let a = |j: usize| (j + 1) as f64 * std::f64::consts::PI / model.scenario.length;
    let mass = s.mode_mass();
    let x = DMatrix::from_fn(n, n, |j, l| mass / dt + mu_bar * mass * (a(j).powi(2) + 0.5 * a(l).powi(2)));
    let y = DMatrix::from_fn(n, n, |j, l| mass / dt + mu_bar * mass * (0.5 * a(j).powi(2) + a(l).powi(2)));
    VectorField { x, y }
}

/// Integral over the domain of every temperature mode.
fn mode_integrals(model: &Model) -> DMatrix<f64> {
    let n = model.basis.n_temp();
    let len = model.scenario.length;
    let one = |j: usize| {
        let k = (j + 1) as f64;
        if (j + 1) % 2 == 1 {
            2.0 * len / (k * std::f64::consts::PI)
        } else {
            0.0
        }
    };
    DMatrix::from_fn(n, n, |j, l| one(j) * one(l))
}

/// Advance one step of size `dt`.
pub fn step(model: &Model, state: &GalerkinState, dt: f64) -> Result<StepOutput> {
    if !(dt > 0.0) {
        return Err(NsfError::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let basis = &model.basis;
    let derived = model.derived(state)?;
    let t_new = state.time + dt;
    let mu = model.viscosity_values(&state.temp.value);
    let mass = basis.velocity.mode_mass();
    let n = basis.n_vel();

    let f = model.forcing_values(t_new);
    let nq = model.domain.nq();
    let z = || DMatrix::zeros(nq, nq);
    let fw = model.project_forms(&f, &[[z(), z()], [z(), z()]]);
    let pw = model.pressure_form(&derived.pressure);
    let rhs = VectorField {
        x: &state.u.x * (mass / dt) + &fw.x + &pw.x,
        y: &state.u.y * (mass / dt) + &fw.y + &pw.y,
    };
    let apply = |v: &DVector<f64>| {
        let field = VectorField::from_slice(n, v.as_slice());
        let vals = basis.eval_vector(&field);
        let op = model.operator_forms(&vals, &mu, &derived.transport_q);
        let out = field.scale(mass / dt).axpy(1.0, &op);
        DVector::from_vec(out.to_vec())
    };
    let diag = DVector::from_vec(viscous_diagonal(model, mu.mean(), dt).to_vec());
    let precond = |v: &DVector<f64>| v.component_div(&diag);
    let b = DVector::from_vec(rhs.to_vec());
    let x0 = DVector::from_vec(state.u.to_vec());
    let (sol, matvecs) = gmres(apply, precond, &b, x0, 1e-13, 60, 5000)?;
    let u_new = VectorField::from_slice(n, sol.as_slice());
    if u_new.to_vec().iter().any(|v| !v.is_finite()) {
        return Err(NsfError::NonFinite { time: t_new, what: "velocity coefficients".into() });
    }
    let vel_new = basis.eval_vector(&u_new);
    let joule = model.joule_values(&state.temp.value, &vel_new);

    let ts = &basis.temperature;
    let explicit = model.heat_explicit(&state.temp.value, &derived.transport_q, &joule);
    let joule_proj = ts.project_weighted(&basis.weigh(&joule), false, false);
    let tmass = ts.mode_mass();
    let k = model.scenario.conductivity;
    let m = ts.modes;
    let theta_new = ScalarField {
        coeffs: DMatrix::from_fn(m, m, |j, l| {
            (state.theta.coeffs[(j, l)] + dt * explicit.coeffs[(j, l)] / tmass)
                / (1.0 + dt * k * ts.eigenvalue(j + 1, l + 1))
        }),
    };
    if theta_new.coeffs.iter().any(|v| !v.is_finite()) {
        return Err(NsfError::NonFinite { time: t_new, what: "temperature coefficients".into() });
    }
    let heat_injected = joule_proj.component_mul(&mode_integrals(model)).sum() / tmass;
    let pressure_work = model.pressure_pairing(&derived.pressure, &u_new);
    let forcing_work = fw.x.dot(&u_new.x) + fw.y.dot(&u_new.y);
    let new_state = GalerkinState { time: t_new, u: u_new, theta: theta_new.clone(), vel: vel_new, temp: basis.eval_scalar(&theta_new) };
    Ok(StepOutput { state: new_state, pressure: derived.pressure, joule, heat_injected, pressure_work, forcing_work, matvecs })
}

/// Discrete solution history with its energy ledger.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub model: Arc<Model>,
    pub times: Vec<f64>,
    pub velocity: Vec<VectorField>,
    pub temperature: Vec<ScalarField>,
    /// `F_eps(u^m)` at every stored time.
    pub pressure: Vec<Series2D>,
    pub ledger: EnergyLedger,
    /// Minimum of the projected initial temperature over quadrature nodes.
    pub initial_min_theta: f64,
    /// Set when a step failed; the trajectory then ends at the last good state.
    pub failure: Option<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.model.scenario.dt
    }

    pub fn state(&self, m: usize) -> GalerkinState {
        self.model.state(self.times[m], self.velocity[m].clone(), self.temperature[m].clone())
    }

    /// Joule density `mu(theta^m)|Du^m|^2` at the quadrature nodes.
    pub fn joule_density(&self, m: usize) -> DMatrix<f64> {
        self.model.joule_density(&self.state(m))
    }

    pub fn final_state(&self) -> GalerkinState {
        self.state(self.len() - 1)
    }
}

/// Integrate a scenario to its horizon.
pub fn run(scenario: &Scenario) -> Result<Trajectory> {
    run_model(Arc::new(Model::new(scenario)?))
}

pub fn run_model(model: Arc<Model>) -> Result<Trajectory> {
    let sc = &model.scenario;
    let dt = sc.dt;
    let steps = sc.steps();
    let (mut state, initial_min_theta) = model.project_initial();
    let mut ledger = EnergyLedger::new(&model, &state);
    let mut traj = Trajectory {
        model: model.clone(),
        times: vec![0.0],
        velocity: vec![state.u.clone()],
        temperature: vec![state.theta.clone()],
        pressure: Vec::with_capacity(steps + 1),
        ledger: EnergyLedger::default(),
        initial_min_theta,
        failure: None,
    };
    let h = sc.length / (2.0 * sc.n_vel.max(sc.n_temp) as f64);
    let mut warned = false;
    for m in 0..steps {
        let out = match step(&model, &state, dt) {
            Ok(o) => o,
            Err(e) => {
                log::error!("step {m} failed: {e}");
                traj.failure = Some(e.to_string());
                break;
            }
        };
        let umax = out.state.vel.speed_sq().max().sqrt();
        if !warned && dt * umax > h {
            log::warn!("CFL heuristic exceeded at t = {}: dt |u|max / h = {:.3}", out.state.time, dt * umax / h);
            warned = true;
        }
        ledger.push(&model, &out, dt);
        state = out.state;
        // exact time grid, free of accumulated rounding
        state.time = (m + 1) as f64 * dt;
        traj.times.push(state.time);
        traj.velocity.push(state.u.clone());
        traj.temperature.push(state.theta.clone());
        traj.pressure.push(out.pressure);
    }
    match model.pressure(&state.u) {
        Ok(p) => traj.pressure.push(p),
        Err(e) => {
            traj.failure.get_or_insert(e.to_string());
            traj.pressure.push(Series2D::zeros(model.grid().intervals(), crate::grid::Parity::Cos, crate::grid::Parity::Cos, sc.length));
        }
    }
    traj.ledger = ledger;
    Ok(traj)
}
