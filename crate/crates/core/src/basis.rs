//! Zero-trace tensor-product sine bases and fields expanded in them.
//!
//! Mode `(j, l)` (1-based) is `sin(j pi x / L) sin(l pi y / L)`. A scalar
//! field stores its coefficients as an `n x n` matrix whose entry
//! `(j-1, l-1)` multiplies mode `(j, l)`; a vector field stores one such
//! matrix per component. All evaluations and projections use sum
//! factorization: `values = Tx C Ty^T`, `projection = Tx^T (W . G) Ty`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::domain::Domain2D;
use crate::error::{NsfError, Result};

/// Values and first derivatives of `sin(k pi x / L)`, `k = 1..=modes`, at a
/// set of points (one row per point).
#[derive(Debug, Clone)]
pub struct ModeTable {
    pub values: DMatrix<f64>,
    pub derivs: DMatrix<f64>,
}

impl ModeTable {
    pub fn sine(points: &[f64], modes: usize, length: f64) -> Self {
        let np = points.len();
        let mut values = DMatrix::zeros(np, modes);
        let mut derivs = DMatrix::zeros(np, modes);
        for (a, &x) in points.iter().enumerate() {
            for k in 0..modes {
                let kk = (k + 1) as f64 * PI / length;
                values[(a, k)] = (kk * x).sin();
                derivs[(a, k)] = kk * (kk * x).cos();
            }
        }
        Self { values, derivs }
    }

    pub fn modes(&self) -> usize {
        self.values.ncols()
    }

    fn pick(&self, deriv: bool) -> &DMatrix<f64> {
        if deriv {
            &self.derivs
        } else {
            &self.values
        }
    }

    /// Tensor evaluation `Tx C Ty^T`, differentiated in x and/or y.
    pub fn eval_tensor(tx: &ModeTable, ty: &ModeTable, coeffs: &DMatrix<f64>, dx: bool, dy: bool) -> DMatrix<f64> {
        let left = tx.pick(dx) * coeffs;
        left * ty.pick(dy).transpose()
    }

    /// Adjoint of [`ModeTable::eval_tensor`]: `Tx^T G Ty` for pre-weighted `G`.
    pub fn project_tensor(tx: &ModeTable, ty: &ModeTable, gw: &DMatrix<f64>, dx: bool, dy: bool) -> DMatrix<f64> {
        tx.pick(dx).tr_mul(gw) * ty.pick(dy)
    }
}

/// Apply the tensor quadrature weights to a quadrature-point field.
pub fn weighted(values: &DMatrix<f64>, weights: &[f64]) -> DMatrix<f64> {
    let mut out = values.clone();
    for a in 0..out.nrows() {
        for b in 0..out.ncols() {
            out[(a, b)] *= weights[a] * weights[b];
        }
    }
    out
}

/// Sine basis evaluated at the quadrature nodes of a [`Domain2D`].
#[derive(Debug, Clone)]
pub struct SineSpace {
    pub modes: usize,
    pub table: ModeTable,
    /// 1D mass matrix `(s_j, s_k)` on `(0, L)`.
    pub mass_1d: DMatrix<f64>,
    length: f64,
}

impl SineSpace {
    fn new(domain: &Domain2D, modes: usize) -> Self {
        let table = ModeTable::sine(domain.nodes(), modes, domain.length());
        let w = DMatrix::from_diagonal(&DVector::from_column_slice(domain.weights()));
        let mass_1d = table.values.transpose() * &w * &table.values;
        Self { modes, table, mass_1d, length: domain.length() }
    }

    /// Values of `sum C_jl s_j(x) s_l(y)` (or a derivative) at the nodes.
    pub fn eval(&self, coeffs: &DMatrix<f64>, dx: bool, dy: bool) -> DMatrix<f64> {
        ModeTable::eval_tensor(&self.table, &self.table, coeffs, dx, dy)
    }

    /// `(g, d^a/dx d^b/dy phi_jl)` for every mode, from pre-weighted values.
    pub fn project_weighted(&self, gw: &DMatrix<f64>, dx: bool, dy: bool) -> DMatrix<f64> {
        self.table.pick(dx).transpose() * gw * self.table.pick(dy)
    }

    /// Exact 2D mass of every mode: `(L/2)^2`.
    pub fn mode_mass(&self) -> f64 {
        0.25 * self.length * self.length
    }

    /// Laplacian eigenvalue `pi^2 (j^2 + l^2) / L^2` of mode `(j, l)` (1-based).
    pub fn eigenvalue(&self, j: usize, l: usize) -> f64 {
        let s = PI / self.length;
        s * s * ((j * j + l * l) as f64)
    }
}

/// Velocity (`N` modes per direction, per component) and temperature
/// (`M` modes per direction) bases on a domain.
#[derive(Debug, Clone)]
pub struct Basis {
    pub velocity: SineSpace,
    pub temperature: SineSpace,
    weights: Vec<f64>,
    length: f64,
}

/// Gauss error indicator `(K h)^(2q) (q!)^4 / ((2q+1) ((2q)!)^3)` for the
/// highest product frequency `K` of `modes` sine modes.
fn aliasing_indicator(domain: &Domain2D, modes: usize) -> f64 {
    let q = domain.order() as i32;
    let h = domain.length() / domain.cells() as f64;
    let k = 2.0 * modes as f64 * PI / domain.length();
    let fact = |n: i32| (1..=n).fold(1.0f64, |acc, i| acc * i as f64);
    (k * h).powi(2 * q) * fact(q).powi(4) / ((2 * q + 1) as f64 * fact(2 * q).powi(3))
}

impl Basis {
    pub fn new(domain: &Domain2D, n_vel: usize, n_temp: usize) -> Result<Self> {
        if n_vel < 1 || n_temp < 1 {
            return Err(NsfError::InvalidParameter(format!(
                "mode counts must be >= 1, got N = {n_vel}, M = {n_temp}"
            )));
        }
        let modes = n_vel.max(n_temp);
        if aliasing_indicator(domain, modes) > 1e-6 {
            // Smallest cell count that passes with the domain's order.
            let mut cells = domain.cells();
            while cells < 100_000 {
                cells += 1;
                let probe = Domain2D::new(domain.length(), domain.order(), cells)?;
                if aliasing_indicator(&probe, modes) <= 1e-6 {
                    break;
                }
            }
            return Err(NsfError::Aliasing { modes, needed: cells * domain.order(), have: domain.nq() });
        }
        Ok(Self {
            velocity: SineSpace::new(domain, n_vel),
            temperature: SineSpace::new(domain, n_temp),
            weights: domain.weights().to_vec(),
            length: domain.length(),
        })
    }

    pub fn n_vel(&self) -> usize {
        self.velocity.modes
    }

    pub fn n_temp(&self) -> usize {
        self.temperature.modes
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weigh(&self, values: &DMatrix<f64>) -> DMatrix<f64> {
        weighted(values, &self.weights)
    }

    pub fn integrate(&self, values: &DMatrix<f64>) -> f64 {
        let mut total = 0.0;
        for a in 0..values.nrows() {
            for b in 0..values.ncols() {
                total += self.weights[a] * self.weights[b] * values[(a, b)];
            }
        }
        total
    }

    pub fn zero_scalar(&self) -> ScalarField {
        ScalarField::zeros(self.n_temp())
    }

    pub fn zero_vector(&self) -> VectorField {
        VectorField::zeros(self.n_vel())
    }

    /// Values and gradient of a temperature-space field at the nodes.
    pub fn eval_scalar(&self, f: &ScalarField) -> ScalarValues {
        let s = &self.temperature;
        ScalarValues {
            value: s.eval(&f.coeffs, false, false),
            grad: [s.eval(&f.coeffs, true, false), s.eval(&f.coeffs, false, true)],
        }
    }

    /// Values and Jacobian of a velocity-space field at the nodes.
    pub fn eval_vector(&self, u: &VectorField) -> VectorValues {
        let s = &self.velocity;
        let comp = |c: &DMatrix<f64>| (s.eval(c, false, false), s.eval(c, true, false), s.eval(c, false, true));
        let (ux, uxx, uxy) = comp(&u.x);
        let (uy, uyx, uyy) = comp(&u.y);
        VectorValues { u: [ux, uy], grad: [[uxx, uxy], [uyx, uyy]] }
    }

    /// L2 projection of quadrature-point values onto the temperature space.
    pub fn project_scalar(&self, values: &DMatrix<f64>) -> ScalarField {
        let s = &self.temperature;
        let rhs = s.project_weighted(&self.weigh(values), false, false);
        ScalarField { coeffs: rhs / s.mode_mass() }
    }

    /// L2 projection of quadrature-point values onto the velocity space.
    pub fn project_vector(&self, vx: &DMatrix<f64>, vy: &DMatrix<f64>) -> VectorField {
        let s = &self.velocity;
        let m = s.mode_mass();
        VectorField {
            x: s.project_weighted(&self.weigh(vx), false, false) / m,
            y: s.project_weighted(&self.weigh(vy), false, false) / m,
        }
    }
}

/// Coefficients of a scalar field in a sine space.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub coeffs: DMatrix<f64>,
}

impl ScalarField {
    pub fn zeros(modes: usize) -> Self {
        Self { coeffs: DMatrix::zeros(modes, modes) }
    }

    pub fn modes(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coeffs.as_slice().to_vec()
    }

    pub fn from_slice(modes: usize, data: &[f64]) -> Self {
        Self { coeffs: DMatrix::from_column_slice(modes, modes, data) }
    }

    /// Exact L2 norm squared on the square (orthogonal modes of mass `(L/2)^2`).
    pub fn l2_sq(&self, length: f64) -> f64 {
        0.25 * length * length * self.coeffs.norm_squared()
    }

    /// Point evaluation.
    pub fn value_at(&self, length: f64, x: f64, y: f64) -> f64 {
        let n = self.modes();
        let sx: Vec<f64> = (1..=n).map(|j| (j as f64 * PI * x / length).sin()).collect();
        let sy: Vec<f64> = (1..=n).map(|l| (l as f64 * PI * y / length).sin()).collect();
        let mut v = 0.0;
        for j in 0..n {
            for l in 0..n {
                v += self.coeffs[(j, l)] * sx[j] * sy[l];
            }
        }
        v
    }
}

/// Coefficients of a vector field, one sine expansion per component.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
}

impl VectorField {
    pub fn zeros(modes: usize) -> Self {
        Self { x: DMatrix::zeros(modes, modes), y: DMatrix::zeros(modes, modes) }
    }

    pub fn modes(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim(&self) -> usize {
        2 * self.modes() * self.modes()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.x.as_slice().to_vec();
        v.extend_from_slice(self.y.as_slice());
        v
    }

    pub fn from_slice(modes: usize, data: &[f64]) -> Self {
        let n2 = modes * modes;
        assert_eq!(data.len(), 2 * n2, "coefficient length mismatch");
        Self {
            x: DMatrix::from_column_slice(modes, modes, &data[..n2]),
            y: DMatrix::from_column_slice(modes, modes, &data[n2..]),
        }
    }

    pub fn l2_sq(&self, length: f64) -> f64 {
        0.25 * length * length * (self.x.norm_squared() + self.y.norm_squared())
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { x: &self.x * a, y: &self.y * a }
    }

    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        Self { x: &self.x + &other.x * a, y: &self.y + &other.y * a }
    }
}

/// Temperature-like field sampled at quadrature nodes.
#[derive(Debug, Clone)]
pub struct ScalarValues {
    pub value: DMatrix<f64>,
    pub grad: [DMatrix<f64>; 2],
}

/// Velocity-like field sampled at quadrature nodes; `grad[i][j] = d_j u_i`.
#[derive(Debug, Clone)]
pub struct VectorValues {
    pub u: [DMatrix<f64>; 2],
    pub grad: [[DMatrix<f64>; 2]; 2],
}

impl VectorValues {
    /// Symmetric gradient component `D_ij = (d_j u_i + d_i u_j) / 2`.
    pub fn sym(&self, i: usize, j: usize) -> DMatrix<f64> {
        (&self.grad[i][j] + &self.grad[j][i]) * 0.5
    }

    pub fn div(&self) -> DMatrix<f64> {
        &self.grad[0][0] + &self.grad[1][1]
    }

    /// `|Du|^2 = D:D` pointwise.
    pub fn du_sq(&self) -> DMatrix<f64> {
        let dxy = self.sym(0, 1);
        self.grad[0][0].component_mul(&self.grad[0][0])
            + self.grad[1][1].component_mul(&self.grad[1][1])
            + dxy.component_mul(&dxy) * 2.0
    }

    /// `|grad u|^2` pointwise.
    pub fn grad_sq(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.u[0].nrows(), self.u[0].ncols());
        for i in 0..2 {
            for j in 0..2 {
                out += self.grad[i][j].component_mul(&self.grad[i][j]);
            }
        }
        out
    }

    pub fn speed_sq(&self) -> DMatrix<f64> {
        self.u[0].component_mul(&self.u[0]) + self.u[1].component_mul(&self.u[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_mode_vanishes_on_boundary() {
        let f = ScalarField { coeffs: DMatrix::from_element(1, 1, 1.0) };
        for t in [0.0, 0.13, 0.5, 0.77, 1.0] {
            for (x, y) in [(0.0, t), (1.0, t), (t, 0.0), (t, 1.0)] {
                assert!(f.value_at(1.0, x, y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn every_mode_vanishes_on_boundary() {
        let mut coeffs = DMatrix::zeros(8, 8);
        for j in 0..8 {
            for l in 0..8 {
                coeffs[(j, l)] = 1.0 / ((j + l + 1) as f64);
            }
        }
        let f = ScalarField { coeffs };
        for i in 0..=20 {
            let t = i as f64 / 20.0 * 2.0;
            for (x, y) in [(0.0, t), (2.0, t), (t, 0.0), (t, 2.0)] {
                assert!(f.value_at(2.0, x, y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mass_matrix_matches_sine_orthogonality() {
        // Analytic oracle: int_0^L sin(j pi x/L) sin(k pi x/L) dx = L/2 delta_jk.
        for length in [1.0, 2.0] {
            let d = Domain2D::for_modes(length, 4).unwrap();
            let b = Basis::new(&d, 4, 4).unwrap();
            let m = &b.temperature.mass_1d;
            for j in 0..4 {
                for k in 0..4 {
                    let exact = if j == k { length / 2.0 } else { 0.0 };
                    assert!((m[(j, k)] - exact).abs() < 1e-13);
                }
            }
            // 2D mode mass is the product of the 1D entries.
            let mm = m[(2, 2)] * m[(1, 1)];
            assert!((mm - (length / 2.0).powi(2)).abs() < 1e-12);
            assert!(m.clone().symmetric_eigenvalues().min() > 0.0);
        }
    }

    #[test]
    fn center_gradient_of_mode_11_vanishes() {
        let d = Domain2D::new(1.0, 6, 5).unwrap();
        let b = Basis::new(&d, 1, 1).unwrap();
        // Center (0.5, 0.5) is a node: 5 cells, odd order 3 would put it there;
        // evaluate directly instead.
        let tx = ModeTable::sine(&[0.5], 1, 1.0);
        let c = DMatrix::from_element(1, 1, 1.0);
        let gx = ModeTable::eval_tensor(&tx, &tx, &c, true, false);
        let gy = ModeTable::eval_tensor(&tx, &tx, &c, false, true);
        assert!(gx[(0, 0)].abs() < 1e-15 && gy[(0, 0)].abs() < 1e-15);
        assert_eq!(b.n_vel(), 1);
    }

    #[test]
    fn aliasing_guard_rejects_coarse_rule() {
        let d = Domain2D::new(1.0, 2, 2).unwrap();
        assert!(matches!(Basis::new(&d, 16, 16), Err(NsfError::Aliasing { .. })));
    }

    #[test]
    fn projection_is_idempotent() {
        let d = Domain2D::for_modes(1.0, 6).unwrap();
        let b = Basis::new(&d, 6, 6).unwrap();
        let vals = d.tabulate(|x, y| x * (1.0 - x) * y.sin() * (3.0 * x * y).cos());
        let p1 = b.project_scalar(&vals);
        let p2 = b.project_scalar(&b.eval_scalar(&p1).value);
        assert!((&p1.coeffs - &p2.coeffs).amax() < 1e-12);
    }

    proptest! {
        #[test]
        fn evaluation_is_linear(seed in 0u64..1000, alpha in -3.0f64..3.0) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let d = Domain2D::for_modes(1.0, 3).unwrap();
            let b = Basis::new(&d, 3, 3).unwrap();
            let a = VectorField::from_slice(3, &(0..18).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
            let c = VectorField::from_slice(3, &(0..18).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
            let lhs = b.eval_vector(&c.axpy(alpha, &a));
            let ea = b.eval_vector(&a);
            let ec = b.eval_vector(&c);
            for i in 0..2 {
                let diff = &lhs.u[i] - (&ec.u[i] + &ea.u[i] * alpha);
                prop_assert!(diff.amax() < 1e-12);
                for j in 0..2 {
                    let diff = &lhs.grad[i][j] - (&ec.grad[i][j] + &ea.grad[i][j] * alpha);
                    prop_assert!(diff.amax() < 1e-11);
                }
            }
        }
    }
}
