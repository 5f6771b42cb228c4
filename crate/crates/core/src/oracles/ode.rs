//! Adaptive Dormand-Prince 5(4) integration and the frozen-coefficient
//! Galerkin system it is used on.

use nalgebra::{DMatrix, DVector};

use crate::basis::{ScalarField, VectorField};
use crate::error::{NsfError, Result};
use crate::galerkin::{GalerkinState, Model};

/// Largest mode count the reference accepts.
pub const ODE_MAX_MODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t0` to `t1` with mixed error control
/// `atol + rtol |y|`; fails when the step size collapses or `max_steps`
/// is exhausted (the usual symptom of stiffness).
pub fn dopri5(
    f: impl Fn(f64, &DVector<f64>) -> DVector<f64>,
    t0: f64,
    t1: f64,
    y0: &DVector<f64>,
    rtol: f64,
    atol: f64,
    max_steps: usize,
) -> Result<(DVector<f64>, OdeStats)> {
    let mut stats = OdeStats::default();
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((y0.clone(), stats));
    }
    if !(span > 0.0) {
        return Err(NsfError::InvalidParameter(format!("integration span must be forward, got [{t0}, {t1}]")));
    }
    let mut t = t0;
    let mut y = y0.clone();
    let mut h = 1e-3 * span;
    let mut k0 = f(t, &y);
    stats.evaluations += 1;
    while t < t1 {
        if stats.accepted + stats.rejected >= max_steps {
            return Err(NsfError::LinearSolve(format!("ODE reference exceeded {max_steps} steps at t = {t} (stiffness?)")));
        }
        if h < 1e-14 * t.abs().max(span) {
            return Err(NsfError::LinearSolve(format!("ODE reference step size underflow at t = {t} (stiffness?)")));
        }
        let h_step = h.min(t1 - t);
        let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
        k.push(k0.clone());
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[s][j] != 0.0 {
                    ys.axpy(h_step * A[s][j], kj, 1.0);
                }
            }
            k.push(f(t + C[s] * h_step, &ys));
            stats.evaluations += 1;
        }
        let mut y5 = y.clone();
        let mut err = DVector::zeros(y.len());
        for s in 0..7 {
            if B5[s] != 0.0 {
                y5.axpy(h_step * B5[s], &k[s], 1.0);
            }
            err.axpy(h_step * (B5[s] - B4[s]), &k[s], 1.0);
        }
        let norm = (err
            .iter()
            .zip(y.iter().zip(y5.iter()))
            .map(|(e, (a, b))| (e / (atol + rtol * a.abs().max(b.abs()))).powi(2))
            .sum::<f64>()
            / y.len().max(1) as f64)
            .sqrt();
        if !norm.is_finite() {
            return Err(NsfError::NonFinite { time: t, what: "ODE reference stage".into() });
        }
        if norm <= 1.0 {
            t = if h_step == t1 - t { t1 } else { t + h_step };
            y = y5;
            k0 = k.swap_remove(6);
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }
        let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        h = h_step * factor;
    }
    Ok((y, stats))
}

/// The Galerkin system with viscosity, transport field and pressure frozen
/// at a reference state; velocity and temperature evolve, and the Joule
/// source is `mu |Du|^2` of the current velocity.
pub struct FrozenSystem<'a> {
    model: &'a Model,
    mu: DMatrix<f64>,
    transport_q: [DMatrix<f64>; 2],
    pressure: VectorField,
}

impl<'a> FrozenSystem<'a> {
    pub fn new(model: &'a Model, state: &GalerkinState) -> Result<Self> {
        let (n, m) = (model.basis.n_vel(), model.basis.n_temp());
        if n > ODE_MAX_MODES || m > ODE_MAX_MODES {
            return Err(NsfError::Precondition(format!("ODE reference limited to {ODE_MAX_MODES} modes, got ({n}, {m})")));
        }
        let derived = model.derived(state)?;
        Ok(Self {
            model,
            mu: model.viscosity_values(&state.temp.value),
            transport_q: derived.transport_q,
            pressure: model.pressure_form(&derived.pressure),
        })
    }

    pub fn pack(&self, u: &VectorField, theta: &ScalarField) -> DVector<f64> {
        let mut v = u.to_vec();
        v.extend(theta.to_vec());
        DVector::from_vec(v)
    }

    pub fn unpack(&self, y: &DVector<f64>) -> (VectorField, ScalarField) {
        let n = self.model.basis.n_vel();
        let split = 2 * n * n;
        (
            VectorField::from_slice(n, &y.as_slice()[..split]),
            ScalarField::from_slice(self.model.basis.n_temp(), &y.as_slice()[split..]),
        )
    }

    pub fn rhs(&self, t: f64, y: &DVector<f64>) -> DVector<f64> {
        let model = self.model;
        let basis = &model.basis;
        let (u, theta) = self.unpack(y);
        let vals = basis.eval_vector(&u);
        let temp = basis.eval_scalar(&theta);
        let nq = model.domain.nq();
        let z = || DMatrix::zeros(nq, nq);
        let fw = model.project_forms(&model.forcing_values(t), &[[z(), z()], [z(), z()]]);
        let op = model.operator_forms(&vals, &self.mu, &self.transport_q);
        let mass = basis.velocity.mode_mass();
        let du = VectorField {
            x: (&fw.x + &self.pressure.x - &op.x) / mass,
            y: (&fw.y + &self.pressure.y - &op.y) / mass,
        };
        let joule = self.mu.component_mul(&vals.du_sq());
        let explicit = model.heat_explicit(&temp.value, &self.transport_q, &joule);
        let ts = &basis.temperature;
        let (tmass, k) = (ts.mode_mass(), model.scenario.conductivity);
        let dtheta = ScalarField {
            coeffs: DMatrix::from_fn(ts.modes, ts.modes, |j, l| {
                explicit.coeffs[(j, l)] / tmass - k * ts.eigenvalue(j + 1, l + 1) * theta.coeffs[(j, l)]
            }),
        };
        self.pack(&du, &dtheta)
    }
}

/// Integrate the frozen-coefficient system from `state` to `t1`.
pub fn ode_reference(model: &Model, state: &GalerkinState, t1: f64, rtol: f64) -> Result<(GalerkinState, OdeStats)> {
    let sys = FrozenSystem::new(model, state)?;
    let y0 = sys.pack(&state.u, &state.theta);
    let (y, stats) = dopri5(|t, y| sys.rhs(t, y), state.time, t1, &y0, rtol, rtol * 1e-2, 200_000)?;
    let (u, theta) = sys.unpack(&y);
    Ok((model.state(t1, u, theta), stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_oscillator() {
        let y0 = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        let (y, st) = dopri5(|_, y| DVector::from_vec(vec![-2.0 * y[0], y[2], -y[1]]), 0.0, 1.5, &y0, 1e-10, 1e-12, 100_000).unwrap();
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-10);
        assert!((y[1] - 1.5f64.cos()).abs() < 1e-9 && (y[2] + 1.5f64.sin()).abs() < 1e-9);
        assert!(st.accepted > 0);
    }

    #[test]
    fn step_budget_reported() {
        let y0 = DVector::from_vec(vec![1.0]);
        let r = dopri5(|_, y| y * -1e6, 0.0, 1.0, &y0, 1e-10, 1e-12, 50);
        assert!(r.is_err());
    }
}
