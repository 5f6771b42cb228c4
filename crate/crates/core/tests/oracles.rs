//! Cross-checks of the solver against independent references.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nsf_core::basis::{ModeTable, ScalarField, VectorField};
use nsf_core::elliptic::NeumannSolver;
use nsf_core::galerkin::{step, Model};
use nsf_core::grid::AuxGrid;
use nsf_core::oracles::{ode_reference, oversampled_quadrature, richardson_neumann, ManufacturedCase};
use nsf_core::scenario::Scenario;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
}

fn state_vec(u: &VectorField, th: &ScalarField) -> Vec<f64> {
    let mut v = u.to_vec();
    v.extend(th.to_vec());
    v
}

#[test]
fn one_step_local_error_is_superlinear() {
    let sc = Scenario::random(3);
    let model = Arc::new(Model::new(&sc).unwrap());
    let (s0, _) = model.project_initial();
    let dts = [2e-3, 1e-3, 5e-4];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let one = step(&model, &s0, dt).unwrap().state;
            let (r, _) = ode_reference(&model, &s0, dt, 1e-11).unwrap();
            dist(&state_vec(&one.u, &one.theta), &state_vec(&r.u, &r.theta))
        })
        .collect();
    for k in 1..errs.len() {
        assert!(errs[k - 1] / errs[k] >= 1.9, "{errs:?}");
    }
}

#[test]
fn ode_reference_is_converged() {
    let sc = Scenario::benchmark().with_modes(4, 4);
    let model = Arc::new(Model::new(&sc).unwrap());
    let (s0, _) = model.project_initial();
    let (a, _) = ode_reference(&model, &s0, 0.01, 1e-9).unwrap();
    let (b, _) = ode_reference(&model, &s0, 0.01, 5e-10).unwrap();
    let (va, vb) = (state_vec(&a.u, &a.theta), state_vec(&b.u, &b.theta));
    let norm = va.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(dist(&va, &vb) <= 1e-8 * norm);
}

#[test]
fn frozen_heat_mode_decays_exponentially() {
    let sc = Scenario::zero().with_modes(4, 4);
    let model = Arc::new(Model::new(&sc).unwrap());
    let mut th = ScalarField::zeros(4);
    th.coeffs[(1, 0)] = 0.7;
    let s0 = model.state(0.0, VectorField::zeros(4), th);
    let t1 = 0.2;
    let (r, _) = ode_reference(&model, &s0, t1, 1e-10).unwrap();
    let lambda = model.basis.temperature.eigenvalue(2, 1);
    let exact = 0.7 * (-sc.conductivity * lambda * t1).exp();
    assert!((r.theta.coeffs[(1, 0)] - exact).abs() <= 1e-8 * exact);
    assert!(r.theta.coeffs.iter().enumerate().all(|(i, v)| i == 1 || v.abs() < 1e-12));
    assert!(r.u.to_vec().iter().all(|v| *v == 0.0));
}

#[test]
fn manufactured_forcing_closes_the_equations() {
    let case = ManufacturedCase::from_scenario(&Scenario::manufactured(8, 1e-3)).unwrap();
    assert!(case.max_residual(400, 7, 0.5) < 1e-10);
}

#[test]
fn production_quadrature_matches_oversampling() {
    let sc = Scenario::random(5);
    let model = Model::new(&sc).unwrap();
    let (n, m) = (model.basis.n_vel(), model.basis.n_temp());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut rnd = |k| DMatrix::from_fn(k, k, |_, _| rng.gen_range(-0.3..0.3));
    let u = VectorField { x: rnd(n), y: rnd(n) };
    let theta = ScalarField { coeffs: rnd(m) };
    let st = model.state(0.0, u.clone(), theta.clone());
    let production = model.basis.integrate(&model.joule_density(&st));
    let len = sc.length;
    let density = |x: f64, y: f64| {
        let (tx, ty) = (ModeTable::sine(&[x], n, len), ModeTable::sine(&[y], n, len));
        let e = |c: &DMatrix<f64>, dx, dy| ModeTable::eval_tensor(&tx, &ty, c, dx, dy)[(0, 0)];
        let (dxx, dyy) = (e(&u.x, true, false), e(&u.y, false, true));
        let dxy = 0.5 * (e(&u.x, false, true) + e(&u.y, true, false));
        sc.viscosity.eval(theta.value_at(len, x, y)) * (dxx * dxx + dyy * dyy + 2.0 * dxy * dxy)
    };
    let reference = oversampled_quadrature(density, len, model.domain.cells(), 4).unwrap();
    assert!((production - reference).abs() <= 1e-6 * reference.abs(), "{production} vs {reference}");
}

#[test]
fn spectral_neumann_agrees_with_finite_differences() {
    let w = std::f64::consts::PI;
    let f = |x: f64, y: f64| (w * x).cos() * (2.0 * w * y).cos() + 0.5 * (3.0 * w * y).cos() * (w * x).cos();
    let grid = AuxGrid::new(1.0, 16);
    let spectral = NeumannSolver::new(grid.clone()).solve(&grid.tabulate(f)).unwrap();
    let reference = richardson_neumann(1.0, 16, f).unwrap();
    assert!((&spectral - &reference).amax() <= 1e-3 * spectral.amax(), "{}", (&spectral - &reference).amax());
}
