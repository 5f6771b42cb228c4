//! Conversions between trajectories and field dumps.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::basis::{ModeTable, ScalarField, VectorField};
use crate::galerkin::{EnergyLedger, Model, Trajectory};
use crate::grid::{Parity, Series2D};

use super::dump::FieldDump;
use crate::error::{NsfError, Result};

fn flatten(m: &DMatrix<f64>, out: &mut Vec<f64>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
}

fn slab(d: &FieldDump, t: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(d.nx as usize, d.ny as usize, d.slab(t, c))
}

fn dims(v: usize) -> u32 {
    u32::try_from(v).expect("dimension fits in u32")
}

/// Velocity coefficients, `(N, N, 2, nt)`.
pub fn velocity_dump(traj: &Trajectory) -> FieldDump {
    let n = traj.model.basis.n_vel();
    let mut data = Vec::new();
    for u in &traj.velocity {
        flatten(&u.x, &mut data);
        flatten(&u.y, &mut data);
    }
    FieldDump::new(dims(n), dims(n), 2, dims(traj.len()), data).expect("consistent sizes")
}

/// Temperature coefficients, `(M, M, 1, nt)`.
pub fn temperature_dump(traj: &Trajectory) -> FieldDump {
    let m = traj.model.basis.n_temp();
    let mut data = Vec::new();
    for th in &traj.temperature {
        flatten(&th.coeffs, &mut data);
    }
    FieldDump::new(dims(m), dims(m), 1, dims(traj.len()), data).expect("consistent sizes")
}

/// Cosine coefficients of the pressure on the auxiliary grid.
pub fn pressure_dump(traj: &Trajectory) -> FieldDump {
    let n = traj.model.grid().intervals() + 1;
    let mut data = Vec::new();
    for p in &traj.pressure {
        flatten(&p.coeffs, &mut data);
    }
    FieldDump::new(dims(n), dims(n), 1, dims(traj.pressure.len()), data).expect("consistent sizes")
}

/// Plot-grid samples with components `|u|`, `theta` and the Joule density
/// `mu(theta) |Du|^2` at `intervals + 1` equispaced nodes per direction.
pub fn snapshot_dump(traj: &Trajectory, intervals: usize) -> FieldDump {
    let model = &traj.model;
    let len = model.scenario.length;
    let x: Vec<f64> = (0..=intervals).map(|i| i as f64 * len / intervals as f64).collect();
    let tv = ModeTable::sine(&x, model.basis.n_vel(), len);
    let tt = ModeTable::sine(&x, model.basis.n_temp(), len);
    let mut data = Vec::new();
    for m in 0..traj.len() {
        let u = &traj.velocity[m];
        let ev = |c: &DMatrix<f64>, dx, dy| ModeTable::eval_tensor(&tv, &tv, c, dx, dy);
        let (ux, uy) = (ev(&u.x, false, false), ev(&u.y, false, false));
        let speed = (ux.component_mul(&ux) + uy.component_mul(&uy)).map(f64::sqrt);
        let theta = ModeTable::eval_tensor(&tt, &tt, &traj.temperature[m].coeffs, false, false);
        let (dxx, dyy) = (ev(&u.x, true, false), ev(&u.y, false, true));
        let dxy = (ev(&u.x, false, true) + ev(&u.y, true, false)) * 0.5;
        let du_sq = dxx.component_mul(&dxx) + dyy.component_mul(&dyy) + dxy.component_mul(&dxy) * 2.0;
        let joule = model.viscosity_values(&theta).component_mul(&du_sq);
        for f in [&speed, &theta, &joule] {
            flatten(f, &mut data);
        }
    }
    let n = dims(intervals + 1);
    FieldDump::new(n, n, 3, dims(traj.len()), data).expect("consistent sizes")
}

/// Rebuild a trajectory from coefficient dumps; times are `m dt`.
pub fn trajectory_from_dumps(model: Arc<Model>, vel: &FieldDump, temp: &FieldDump, pres: &FieldDump) -> Result<Trajectory> {
    let (n, m) = (model.basis.n_vel(), model.basis.n_temp());
    let g = model.grid().intervals() + 1;
    let check = |d: &FieldDump, nx: usize, c: u32, what: &str| {
        if d.nx as usize != nx || d.ny as usize != nx || d.components != c {
            Err(NsfError::Format(format!("{what} dump has shape ({}, {}, {}), expected ({nx}, {nx}, {c})", d.nx, d.ny, d.components)))
        } else {
            Ok(())
        }
    };
    check(vel, n, 2, "velocity")?;
    check(temp, m, 1, "temperature")?;
    check(pres, g, 1, "pressure")?;
    if vel.nt != temp.nt || vel.nt != pres.nt || vel.nt == 0 {
        return Err(NsfError::Format(format!("time levels disagree: {} / {} / {}", vel.nt, temp.nt, pres.nt)));
    }
    let nt = vel.nt as usize;
    let dt = model.scenario.dt;
    let len = model.scenario.length;
    let initial_min_theta = model.project_initial().1;
    Ok(Trajectory {
        times: (0..nt).map(|k| k as f64 * dt).collect(),
        velocity: (0..nt).map(|k| VectorField { x: slab(vel, k, 0), y: slab(vel, k, 1) }).collect(),
        temperature: (0..nt).map(|k| ScalarField { coeffs: slab(temp, k, 0) }).collect(),
        pressure: (0..nt).map(|k| Series2D { px: Parity::Cos, py: Parity::Cos, coeffs: slab(pres, k, 0), length: len }).collect(),
        ledger: EnergyLedger::default(),
        initial_min_theta,
        failure: None,
        model,
    })
}
