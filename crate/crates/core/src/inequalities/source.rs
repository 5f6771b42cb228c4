//! Uniform access to solution fields for the verifiers: a discrete
//! [`Trajectory`] or analytic closures.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::basis::ModeTable;
use crate::elliptic::{PointTables, TransportField};
use crate::grid::Series2D;
use crate::galerkin::Trajectory;
use crate::law::ViscosityLaw;

/// Fields at a set of points. For tensor grids the matrices are
/// `nx x ny`; for scattered points they are `npts x 1`.
#[derive(Debug, Clone)]
pub struct Sample {
    pub u: [DMatrix<f64>; 2],
    /// `grad[i][j] = d_j u_i`.
    pub grad: [[DMatrix<f64>; 2]; 2],
    pub theta: DMatrix<f64>,
    pub grad_theta: [DMatrix<f64>; 2],
    pub pressure: DMatrix<f64>,
    /// Velocity that transports momentum and heat (the mollified field
    /// for discrete solutions).
    pub transport: [DMatrix<f64>; 2],
    pub forcing: [DMatrix<f64>; 2],
    pub mu: DMatrix<f64>,
}

impl Sample {
    pub fn sym(&self, i: usize, j: usize) -> DMatrix<f64> {
        (&self.grad[i][j] + &self.grad[j][i]) * 0.5
    }

    pub fn du_sq(&self) -> DMatrix<f64> {
        let d01 = self.sym(0, 1);
        self.grad[0][0].component_mul(&self.grad[0][0])
            + self.grad[1][1].component_mul(&self.grad[1][1])
            + d01.component_mul(&d01) * 2.0
    }

    pub fn grad_sq(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.theta.nrows(), self.theta.ncols());
        for i in 0..2 {
            for j in 0..2 {
                s += self.grad[i][j].component_mul(&self.grad[i][j]);
            }
        }
        s
    }

    pub fn speed_sq(&self) -> DMatrix<f64> {
        self.u[0].component_mul(&self.u[0]) + self.u[1].component_mul(&self.u[1])
    }

    pub fn joule(&self) -> DMatrix<f64> {
        self.mu.component_mul(&self.du_sq())
    }
}

/// Time-indexed solution fields.
pub trait FieldSource: Sync {
    fn times(&self) -> &[f64];
    fn length(&self) -> f64;
    fn horizon(&self) -> f64;
    fn conductivity(&self) -> f64;
    /// Fields at time index `m` on the tensor grid `xs x ys`.
    fn sample_grid(&self, m: usize, xs: &[f64], ys: &[f64]) -> Sample;
    /// Fields at time index `m` at scattered points.
    fn sample_points(&self, m: usize, pts: &[[f64; 2]]) -> Sample;
}

/// Discrete solution as a [`FieldSource`], caching transport fields.
pub struct TrajectorySource<'a> {
    pub traj: &'a Trajectory,
    transport: Vec<OnceLock<TransportField>>,
}

impl<'a> TrajectorySource<'a> {
    pub fn new(traj: &'a Trajectory) -> Self {
        Self { traj, transport: (0..traj.len()).map(|_| OnceLock::new()).collect() }
    }

    pub fn transport_field(&self, m: usize) -> &TransportField {
        self.transport[m].get_or_init(|| {
            let model = &self.traj.model;
            if model.scenario.convection {
                model.transport(&self.traj.velocity[m]).unwrap_or_else(|_| {
                    TransportField::zeros(model.grid().intervals(), model.scenario.length)
                })
            } else {
                TransportField::zeros(model.grid().intervals(), model.scenario.length)
            }
        })
    }

    /// Shared evaluation; `combine(tx, c, ty)` is either the tensor product
    /// `tx c ty^T` or its row-wise diagonal for scattered points.
    fn sample_with(
        &self,
        m: usize,
        xs: &[f64],
        ys: &[f64],
        combine: &dyn Fn(&DMatrix<f64>, &DMatrix<f64>, &DMatrix<f64>) -> DMatrix<f64>,
        points: &[(f64, f64)],
        shape: (usize, usize),
    ) -> Sample {
        let model = &self.traj.model;
        let sc = &model.scenario;
        let n_aux = model.grid().intervals() + 1;
        let (vx, vy) = (ModeTable::sine(xs, sc.n_vel, sc.length), ModeTable::sine(ys, sc.n_vel, sc.length));
        let (sx, sy) = (ModeTable::sine(xs, sc.n_temp, sc.length), ModeTable::sine(ys, sc.n_temp, sc.length));
        let (px, py) = (PointTables::new(xs, n_aux, sc.length), PointTables::new(ys, n_aux, sc.length));
        let pick = |t: &ModeTable, d: bool| if d { t.derivs.clone() } else { t.values.clone() };
        let u = &self.traj.velocity[m];
        let th = &self.traj.temperature[m];
        let ev = |tx: &ModeTable, ty: &ModeTable, c: &DMatrix<f64>, dx: bool, dy: bool| combine(&pick(tx, dx), c, &pick(ty, dy));
        let series = |s: &Series2D| combine(px.get(s.px, false), &s.coeffs, py.get(s.py, false));
        let uvals = [ev(&vx, &vy, &u.x, false, false), ev(&vx, &vy, &u.y, false, false)];
        let grad = [
            [ev(&vx, &vy, &u.x, true, false), ev(&vx, &vy, &u.x, false, true)],
            [ev(&vx, &vy, &u.y, true, false), ev(&vx, &vy, &u.y, false, true)],
        ];
        let theta = ev(&sx, &sy, &th.coeffs, false, false);
        let grad_theta = [ev(&sx, &sy, &th.coeffs, true, false), ev(&sx, &sy, &th.coeffs, false, true)];
        let pressure = series(&self.traj.pressure[m]);
        let tr = self.transport_field(m);
        let transport = [series(&tr.x), series(&tr.y)];
        let t = self.traj.times[m];
        let f_at = |i: usize| DMatrix::from_fn(shape.0, shape.1, |a, b| {
            let (x, y) = points[a * shape.1 + b];
            sc.forcing_at(x, y, t)[i]
        });
        let forcing = [f_at(0), f_at(1)];
        let mu = theta.map(|s| sc.viscosity.eval(s));
        Sample { u: uvals, grad, theta, grad_theta, pressure, transport, forcing, mu }
    }
}

fn tensor(tx: &DMatrix<f64>, c: &DMatrix<f64>, ty: &DMatrix<f64>) -> DMatrix<f64> {
    tx * c * ty.transpose()
}

fn scattered(tx: &DMatrix<f64>, c: &DMatrix<f64>, ty: &DMatrix<f64>) -> DMatrix<f64> {
    let left = tx * c;
    DMatrix::from_fn(tx.nrows(), 1, |i, _| left.row(i).dot(&ty.row(i)))
}

impl FieldSource for TrajectorySource<'_> {
    fn times(&self) -> &[f64] {
        &self.traj.times
    }

    fn length(&self) -> f64 {
        self.traj.model.scenario.length
    }

    fn horizon(&self) -> f64 {
        self.traj.model.scenario.horizon
    }

    fn conductivity(&self) -> f64 {
        self.traj.model.scenario.conductivity
    }

    fn sample_grid(&self, m: usize, xs: &[f64], ys: &[f64]) -> Sample {
        let pts: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
        self.sample_with(m, xs, ys, &tensor, &pts, (xs.len(), ys.len()))
    }

    fn sample_points(&self, m: usize, pts: &[[f64; 2]]) -> Sample {
        let xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p[1]).collect();
        let list: Vec<(f64, f64)> = pts.iter().map(|p| (p[0], p[1])).collect();
        self.sample_with(m, &xs, &ys, &scattered, &list, (pts.len(), 1))
    }
}

type VelocityFn = dyn Fn(f64, f64, f64) -> ([f64; 2], [[f64; 2]; 2]) + Sync;
type ScalarFn = dyn Fn(f64, f64, f64) -> (f64, [f64; 2]) + Sync;
type PlainFn = dyn Fn(f64, f64, f64) -> f64 + Sync;
type VecFn = dyn Fn(f64, f64, f64) -> [f64; 2] + Sync;

/// Closed-form fields sampled at given times.
pub struct AnalyticSource {
    pub times: Vec<f64>,
    pub length: f64,
    pub horizon: f64,
    pub conductivity: f64,
    pub viscosity: ViscosityLaw,
    /// Velocity and its Jacobian `J[i][j] = d_j u_i`.
    pub velocity: Box<VelocityFn>,
    pub temperature: Box<ScalarFn>,
    pub pressure: Box<PlainFn>,
    pub forcing: Box<VecFn>,
}

impl AnalyticSource {
    /// Everything zero on `(0, L)^2 x (0, T)` with uniform steps.
    pub fn zero(length: f64, horizon: f64, steps: usize) -> Self {
        Self {
            times: (0..=steps).map(|m| horizon * m as f64 / steps as f64).collect(),
            length,
            horizon,
            conductivity: 0.1,
            viscosity: ViscosityLaw::Default,
            velocity: Box::new(|_, _, _| ([0.0; 2], [[0.0; 2]; 2])),
            temperature: Box::new(|_, _, _| (0.0, [0.0; 2])),
            pressure: Box::new(|_, _, _| 0.0),
            forcing: Box::new(|_, _, _| [0.0; 2]),
        }
    }

    fn sample_at(&self, t: f64, pts: &[(f64, f64)], shape: (usize, usize)) -> Sample {
        let vel: Vec<_> = pts.iter().map(|&(x, y)| (self.velocity)(x, y, t)).collect();
        let tem: Vec<_> = pts.iter().map(|&(x, y)| (self.temperature)(x, y, t)).collect();
        let m = |f: &dyn Fn(usize) -> f64| DMatrix::from_fn(shape.0, shape.1, |a, b| f(a * shape.1 + b));
        let u = [m(&|i| vel[i].0[0]), m(&|i| vel[i].0[1])];
        let grad = [
            [m(&|i| vel[i].1[0][0]), m(&|i| vel[i].1[0][1])],
            [m(&|i| vel[i].1[1][0]), m(&|i| vel[i].1[1][1])],
        ];
        let theta = m(&|i| tem[i].0);
        let grad_theta = [m(&|i| tem[i].1[0]), m(&|i| tem[i].1[1])];
        let pressure = m(&|i| (self.pressure)(pts[i].0, pts[i].1, t));
        let forcing = [
            m(&|i| (self.forcing)(pts[i].0, pts[i].1, t)[0]),
            m(&|i| (self.forcing)(pts[i].0, pts[i].1, t)[1]),
        ];
        let mu = theta.map(|s| self.viscosity.eval(s));
        Sample { transport: u.clone(), u, grad, theta, grad_theta, pressure, forcing, mu }
    }
}

impl FieldSource for AnalyticSource {
    fn times(&self) -> &[f64] {
        &self.times
    }

    fn length(&self) -> f64 {
        self.length
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn conductivity(&self) -> f64 {
        self.conductivity
    }

    fn sample_grid(&self, m: usize, xs: &[f64], ys: &[f64]) -> Sample {
        let pts: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
        self.sample_at(self.times[m], &pts, (xs.len(), ys.len()))
    }

    fn sample_points(&self, m: usize, pts: &[[f64; 2]]) -> Sample {
        let list: Vec<(f64, f64)> = pts.iter().map(|p| (p[0], p[1])).collect();
        self.sample_at(self.times[m], &list, (pts.len(), 1))
    }
}
