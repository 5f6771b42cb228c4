//! Per-step energy bookkeeping.

use super::model::{GalerkinState, Model};
use super::StepOutput;

/// Diagnostics at one time level; cumulative quantities sum over the steps
/// that produced the levels up to this one.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LedgerRow {
    pub time: f64,
    /// `1/2 ||u||^2`.
    pub kinetic: f64,
    /// `dt sum int mu(theta) |Du|^2`.
    pub dissipation: f64,
    /// `||Du||^2` at this level.
    pub du_sq: f64,
    /// `dt sum ||Du||^2`.
    pub du_sq_cum: f64,
    pub theta_l1: f64,
    /// Heat added to the temperature by the Joule source.
    pub joule_cum: f64,
    pub min_theta: f64,
    pub max_theta: f64,
    /// `dt sum eps ||grad p||^2`.
    pub pressure_penalty: f64,
    /// `dt sum (p, div u)` (pressure work on the new velocity).
    pub pressure_work: f64,
    /// `dt sum (f, u)`.
    pub forcing_work: f64,
    /// `||f||^2` at this level.
    pub forcing_sq: f64,
    /// `dt sum ||f||^2`.
    pub forcing_sq_cum: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger {
    pub rows: Vec<LedgerRow>,
}

fn level(model: &Model, state: &GalerkinState) -> LedgerRow {
    let b = &model.basis;
    let th = &state.temp.value;
    let f = model.forcing_values(state.time);
    LedgerRow {
        time: state.time,
        kinetic: 0.5 * state.u.l2_sq(b.length()),
        du_sq: b.integrate(&state.vel.du_sq()),
        theta_l1: b.integrate(&th.abs()),
        min_theta: th.min(),
        max_theta: th.max(),
        forcing_sq: b.integrate(&(f[0].component_mul(&f[0]) + f[1].component_mul(&f[1]))),
        ..LedgerRow::default()
    }
}

impl EnergyLedger {
    pub fn new(model: &Model, initial: &GalerkinState) -> Self {
        Self { rows: vec![level(model, initial)] }
    }

    pub fn push(&mut self, model: &Model, out: &StepOutput, dt: f64) {
        let prev = *self.rows.last().expect("ledger starts with the initial row");
        let mut row = level(model, &out.state);
        let b = &model.basis;
        row.dissipation = prev.dissipation + dt * b.integrate(&out.joule);
        row.du_sq_cum = prev.du_sq_cum + dt * row.du_sq;
        row.joule_cum = prev.joule_cum + dt * out.heat_injected;
        let penalty = model.scenario.eps * model.neumann.grad_sq(&out.pressure);
        row.pressure_penalty = prev.pressure_penalty + dt * penalty;
        row.pressure_work = prev.pressure_work + dt * out.pressure_work;
        row.forcing_work = prev.forcing_work + dt * out.forcing_work;
        row.forcing_sq_cum = prev.forcing_sq_cum + dt * row.forcing_sq;
        self.rows.push(row);
    }

    pub fn last(&self) -> &LedgerRow {
        self.rows.last().expect("non-empty ledger")
    }

    /// All entries finite and the cumulative dissipation nondecreasing.
    pub fn is_consistent(&self) -> bool {
        let finite = self.rows.iter().all(|r| {
            [r.time, r.kinetic, r.dissipation, r.theta_l1, r.joule_cum, r.min_theta, r.pressure_penalty]
                .iter()
                .all(|v| v.is_finite())
        });
        finite && self.rows.windows(2).all(|w| w[1].dissipation >= w[0].dissipation)
    }

    pub const CSV_HEADER: &'static str = "time,kinetic,dissipation,theta_l1,joule_cum,min_theta,pressure_penalty";

    /// Ledger as CSV with round-trip exact floats.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let vals = [r.time, r.kinetic, r.dissipation, r.theta_l1, r.joule_cum, r.min_theta, r.pressure_penalty];
            let cells: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}
