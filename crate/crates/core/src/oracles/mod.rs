//! Independent brute-force references: dense elliptic solves, oversampled
//! quadrature, high-order ODE integration and a manufactured solution.
//! They trade speed for transparency and are used to check the solver.

mod jet;
mod manufactured;
mod neumann;
mod ode;
mod quadrature;

pub use jet::Jet;
pub use manufactured::ManufacturedCase;
pub use neumann::{dense_neumann_oracle, finite_difference_neumann, richardson_neumann, DENSE_MAX_INTERVALS, FD_MAX_INTERVALS};
pub use ode::{dopri5, ode_reference, FrozenSystem, OdeStats, ODE_MAX_MODES};
pub use quadrature::oversampled_quadrature;

use nalgebra::DMatrix;

use crate::basis::VectorField;
use crate::error::Result;
use crate::grid::AuxGrid;

/// Divergence of a sine-basis velocity at the grid nodes, by direct
/// summation of the modes.
pub fn divergence_by_summation(u: &VectorField, grid: &AuxGrid) -> DMatrix<f64> {
    let n = u.modes();
    let w = std::f64::consts::PI / grid.length();
    let x = grid.nodes();
    DMatrix::from_fn(x.len(), x.len(), |a, b| {
        let mut total = 0.0;
        for j in 0..n {
            let kj = (j + 1) as f64 * w;
            for l in 0..n {
                let kl = (l + 1) as f64 * w;
                total += u.x[(j, l)] * kj * (kj * x[a]).cos() * (kl * x[b]).sin();
                total += u.y[(j, l)] * kl * (kj * x[a]).sin() * (kl * x[b]).cos();
            }
        }
        total
    })
}

/// Dense reference for the penalised pressure `eps Lap p = div u`.
pub fn dense_pressure_oracle(grid: &AuxGrid, u: &VectorField, eps: f64) -> Result<DMatrix<f64>> {
    Ok(dense_neumann_oracle(grid, &divergence_by_summation(u, grid))? / eps)
}
