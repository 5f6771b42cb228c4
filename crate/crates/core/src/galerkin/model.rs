//! Discretized problem: basis, auxiliary grid, elliptic solvers, and the
//! Galerkin forms of the momentum and heat equations.

use nalgebra::DMatrix;

use crate::basis::{Basis, ModeTable, ScalarField, ScalarValues, VectorField, VectorValues};
use crate::domain::Domain2D;
use crate::elliptic::{helmholtz_mollify, pressure_f_eps, NeumannSolver, PointTables, TransportField};
use crate::error::Result;
use crate::grid::{AuxGrid, Series2D};
use crate::mollifier::{BoundaryCutoff, Mollifier};
use crate::scenario::Scenario;

/// Immutable discretization of a [`Scenario`].
#[derive(Debug, Clone)]
pub struct Model {
    pub scenario: Scenario,
    pub domain: Domain2D,
    pub basis: Basis,
    pub neumann: NeumannSolver,
    pub mollifier: Mollifier,
    pub cutoff: BoundaryCutoff,
    /// Trigonometric tables of auxiliary-grid series at the quadrature nodes.
    pub quad_tables: PointTables,
    /// Velocity sine modes at the auxiliary grid nodes.
    pub grid_modes: ModeTable,
}

/// Coefficients at one time level with quadrature-point caches.
#[derive(Debug, Clone)]
pub struct GalerkinState {
    pub time: f64,
    pub u: VectorField,
    pub theta: ScalarField,
    pub vel: VectorValues,
    pub temp: ScalarValues,
}

impl GalerkinState {
    pub fn new(basis: &Basis, time: f64, u: VectorField, theta: ScalarField) -> Self {
        let vel = basis.eval_vector(&u);
        let temp = basis.eval_scalar(&theta);
        Self { time, u, theta, vel, temp }
    }

    /// Largest deviation between the caches and a fresh evaluation.
    pub fn cache_error(&self, basis: &Basis) -> f64 {
        let fresh = Self::new(basis, self.time, self.u.clone(), self.theta.clone());
        let mut e = (&fresh.temp.value - &self.temp.value).amax();
        for i in 0..2 {
            e = e.max((&fresh.vel.u[i] - &self.vel.u[i]).amax());
            e = e.max((&fresh.temp.grad[i] - &self.temp.grad[i]).amax());
            for j in 0..2 {
                e = e.max((&fresh.vel.grad[i][j] - &self.vel.grad[i][j]).amax());
            }
        }
        e
    }
}

/// Explicit fields derived from a state: pressure and transport velocity.
#[derive(Debug, Clone)]
pub struct Derived {
    pub pressure: Series2D,
    pub transport: TransportField,
    /// Transport velocity at the quadrature nodes (zero when convection is off).
    pub transport_q: [DMatrix<f64>; 2],
}

impl Model {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        let domain = scenario.domain()?;
        let basis = Basis::new(&domain, scenario.n_vel, scenario.n_temp)?;
        let max_modes = scenario.n_vel.max(scenario.n_temp);
        let grid = AuxGrid::for_mollifier(scenario.length, scenario.nu, max_modes);
        let quad_tables = PointTables::new(domain.nodes(), grid.intervals() + 1, scenario.length);
        let grid_modes = ModeTable::sine(grid.nodes(), scenario.n_vel, scenario.length);
        Ok(Self {
            scenario: scenario.clone(),
            mollifier: Mollifier::new(scenario.nu)?,
            cutoff: BoundaryCutoff::new(scenario.nu, scenario.length)?,
            neumann: NeumannSolver::new(grid),
            domain,
            basis,
            quad_tables,
            grid_modes,
        })
    }

    pub fn grid(&self) -> &AuxGrid {
        self.neumann.grid()
    }

    pub fn state(&self, time: f64, u: VectorField, theta: ScalarField) -> GalerkinState {
        GalerkinState::new(&self.basis, time, u, theta)
    }

    /// Initial state: L2 projection of `u0` and of the mollified `theta0`
    /// (extended by zero outside the domain). Also returns the minimum of
    /// the projected temperature over the quadrature nodes.
    pub fn project_initial(&self) -> (GalerkinState, f64) {
        let sc = &self.scenario;
        let ux = self.domain.tabulate(|x, y| sc.u0_at(x, y)[0]);
        let uy = self.domain.tabulate(|x, y| sc.u0_at(x, y)[1]);
        let u = self.basis.project_vector(&ux, &uy);
        let len = sc.length;
        let ext = |x: f64, y: f64| {
            if (0.0..=len).contains(&x) && (0.0..=len).contains(&y) {
                sc.theta0_at(x, y)
            } else {
                0.0
            }
        };
        let th = self.domain.tabulate(|x, y| self.mollifier.convolve_point(ext, x, y));
        let theta = self.basis.project_scalar(&th);
        let state = self.state(0.0, u, theta);
        let min = state.temp.value.min();
        if min < 0.0 {
            log::info!("projected initial temperature dips to {min:e}");
        }
        (state, min)
    }

    pub fn pressure(&self, u: &VectorField) -> Result<Series2D> {
        pressure_f_eps(&self.neumann, u, self.scenario.eps)
    }

    pub fn transport(&self, u: &VectorField) -> Result<TransportField> {
        helmholtz_mollify(u, &self.mollifier, &self.cutoff, &self.neumann)
    }

    pub fn derived(&self, state: &GalerkinState) -> Result<Derived> {
        let pressure = self.pressure(&state.u)?;
        let (transport, transport_q) = if self.scenario.convection {
            let t = self.transport(&state.u)?;
            let q = t.eval(&self.quad_tables, &self.quad_tables);
            (t, q)
        } else {
            let n = self.grid().intervals();
            let nq = self.domain.nq();
            (TransportField::zeros(n, self.scenario.length), [DMatrix::zeros(nq, nq), DMatrix::zeros(nq, nq)])
        };
        Ok(Derived { pressure, transport, transport_q })
    }

    pub fn viscosity_values(&self, theta: &DMatrix<f64>) -> DMatrix<f64> {
        theta.map(|s| self.scenario.viscosity.eval(s))
    }

    /// `mu(theta)|Du|^2` at the quadrature nodes for the given fields.
    pub fn joule_values(&self, theta: &DMatrix<f64>, vel: &VectorValues) -> DMatrix<f64> {
        self.viscosity_values(theta).component_mul(&vel.du_sq())
    }

    /// Joule density of a state.
    pub fn joule_density(&self, state: &GalerkinState) -> DMatrix<f64> {
        self.joule_values(&state.temp.value, &state.vel)
    }

    /// Forcing at the quadrature nodes.
    pub fn forcing_values(&self, t: f64) -> [DMatrix<f64>; 2] {
        let sc = &self.scenario;
        [
            self.domain.tabulate(|x, y| sc.forcing_at(x, y, t)[0]),
            self.domain.tabulate(|x, y| sc.forcing_at(x, y, t)[1]),
        ]
    }

    /// `sum_i (val_i, w_i) + sum_ij (flux_ij, d_j w_i)` for every velocity mode.
    pub fn project_forms(&self, val: &[DMatrix<f64>; 2], flux: &[[DMatrix<f64>; 2]; 2]) -> VectorField {
        let s = &self.basis.velocity;
        let b = &self.basis;
        let comp = |i: usize| {
            s.project_weighted(&b.weigh(&val[i]), false, false)
                + s.project_weighted(&b.weigh(&flux[i][0]), true, false)
                + s.project_weighted(&b.weigh(&flux[i][1]), false, true)
        };
        VectorField { x: comp(0), y: comp(1) }
    }

    /// `(p, div w)` for every velocity mode, in the auxiliary-grid trapezoid
    /// inner product used by the pressure solve.
    pub fn pressure_form(&self, pressure: &Series2D) -> VectorField {
        let grid = self.grid();
        let pw = grid.weigh(&grid.inverse(pressure));
        let t = &self.grid_modes;
        VectorField {
            x: ModeTable::project_tensor(t, t, &pw, true, false),
            y: ModeTable::project_tensor(t, t, &pw, false, true),
        }
    }

    /// Grid values of `div u` paired with `p` in the same inner product.
    pub fn pressure_pairing(&self, pressure: &Series2D, u: &VectorField) -> f64 {
        let f = self.pressure_form(pressure);
        f.x.dot(&u.x) + f.y.dot(&u.y)
    }

    /// Viscous plus skew-convective form applied to `v`, with viscosity
    /// values `mu` and transport `m` at the quadrature nodes:
    /// `(mu Dv, Dw) + 1/2 [((m.grad) v, w) - ((m.grad) w, v)]`.
    pub fn operator_forms(&self, v: &VectorValues, mu: &DMatrix<f64>, m: &[DMatrix<f64>; 2]) -> VectorField {
        let conv = |i: usize| (m[0].component_mul(&v.grad[i][0]) + m[1].component_mul(&v.grad[i][1])) * 0.5;
        let flux = |i: usize, j: usize| mu.component_mul(&v.sym(i, j)) - m[j].component_mul(&v.u[i]) * 0.5;
        self.project_forms(&[conv(0), conv(1)], &[[flux(0, 0), flux(0, 1)], [flux(1, 0), flux(1, 1)]])
    }

    /// Skew-convective form alone.
    pub fn convective_form(&self, v: &VectorValues, m: &[DMatrix<f64>; 2]) -> VectorField {
        let nq = self.domain.nq();
        self.operator_forms(v, &DMatrix::zeros(nq, nq), m)
    }

    /// Right-hand side of the velocity ODE (before applying the inverse mass):
    /// `-(mu Du, Dw) - c(M; u, w) + (p, div w) + (f, w)`, where the
    /// skew-symmetric `c` equals `-(M (x) u, grad w)` for divergence-free `M`.
    pub fn assemble_momentum(&self, state: &GalerkinState, derived: &Derived) -> VectorField {
        let mu = self.viscosity_values(&state.temp.value);
        let op = self.operator_forms(&state.vel, &mu, &derived.transport_q);
        let f = self.forcing_values(state.time);
        let nq = self.domain.nq();
        let z = || DMatrix::zeros(nq, nq);
        let fw = self.project_forms(&f, &[[z(), z()], [z(), z()]]);
        let pw = self.pressure_form(&derived.pressure);
        VectorField { x: fw.x + pw.x - op.x, y: fw.y + pw.y - op.y }
    }

    /// Right-hand side of the temperature ODE (before the inverse mass):
    /// `(theta M, grad w) - k (grad theta, grad w) + (mu |Du|^2, w)`.
    pub fn assemble_heat(&self, state: &GalerkinState, derived: &Derived) -> ScalarField {
        let th = &state.temp;
        let joule = self.joule_density(state);
        let mut rhs = self.heat_explicit(&th.value, &derived.transport_q, &joule);
        let s = &self.basis.temperature;
        let k = self.scenario.conductivity;
        for j in 0..s.modes {
            for l in 0..s.modes {
                rhs.coeffs[(j, l)] -= k * s.eigenvalue(j + 1, l + 1) * s.mode_mass() * state.theta.coeffs[(j, l)];
            }
        }
        rhs
    }

    /// Explicit heat terms `(theta M, grad w) + (J, w)`.
    pub fn heat_explicit(&self, theta: &DMatrix<f64>, m: &[DMatrix<f64>; 2], joule: &DMatrix<f64>) -> ScalarField {
        let s = &self.basis.temperature;
        let b = &self.basis;
        let coeffs = s.project_weighted(&b.weigh(joule), false, false)
            + s.project_weighted(&b.weigh(&theta.component_mul(&m[0])), true, false)
            + s.project_weighted(&b.weigh(&theta.component_mul(&m[1])), false, true);
        ScalarField { coeffs }
    }
}
