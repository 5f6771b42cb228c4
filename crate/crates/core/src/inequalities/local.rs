//! Local energy inequalities for velocity and temperature, and the
//! localized Korn estimate, integrated over `Omega x (0, t)` against a
//! compactly supported cut-off.

use nalgebra::DMatrix;

use super::cutoff::{CutoffTest, CutoffValues};
use super::source::{FieldSource, Sample};
use super::InequalityReport;
use crate::error::{NsfError, Result};
use crate::quadrature::composite_gauss;

/// Gauss cells per direction on the cut-off support.
pub const LOCAL_CELLS: usize = 6;
const LOCAL_ORDER: usize = 6;
const TIME_ORDER: usize = 8;
/// Smallest admissible `1 + theta` on the support of the test function.
pub const MIN_ONE_PLUS_THETA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default)]
struct Quad {
    c0: f64,
    c1: [f64; 2],
    c2: f64,
}

impl Quad {
    fn at(&self, a: [f64; 2]) -> f64 {
        self.c0 + self.c1[0] * a[0] + self.c1[1] * a[1] + self.c2 * (a[0] * a[0] + a[1] * a[1])
    }
}

#[derive(Debug, Clone, Default)]
struct HeatTerms {
    final_term: f64,
    diffusion: f64,
    transport: f64,
    joule: f64,
}

/// Accumulated integrals for one cut-off and end time, from which every
/// check is evaluated without resampling.
#[derive(Debug, Clone)]
pub struct LocalSweep {
    pub cutoff: CutoffTest,
    pub t: f64,
    visc_lhs: f64,
    final_kin: Quad,
    visc: Quad,
    trans: Quad,
    press: Quad,
    force: Quad,
    mean_num: [f64; 2],
    mean_den: f64,
    zetas: Vec<f64>,
    e2: Vec<HeatTerms>,
    xis: Vec<f64>,
    e3: Vec<HeatTerms>,
    korn: [f64; 3],
}

/// Time weights of one stored level: integrals of its piecewise-linear hat
/// against `T`, `T^2`, `T T'` and `T'`, where `T` is the cut-off time factor.
#[derive(Debug, Clone, Copy, Default)]
struct LevelWeights {
    t: f64,
    t2: f64,
    tdt: f64,
    dt: f64,
}

impl LevelWeights {
    fn is_zero(&self) -> bool {
        self.t == 0.0 && self.t2 == 0.0 && self.tdt == 0.0 && self.dt == 0.0
    }
}

/// The fields are piecewise linear in time between stored levels; the
/// cut-off time factor is integrated exactly up to Gauss accuracy, so that
/// e.g. `sum_m w_m(T') = T(b) - T(a)` to rounding.
fn level_weights(times: &[f64], phi: &CutoffTest, a: f64, b: f64) -> Vec<LevelWeights> {
    let mut w = vec![LevelWeights::default(); times.len()];
    for s in 0..times.len().saturating_sub(1) {
        let (t0, t1) = (times[s], times[s + 1]);
        let (lo, hi) = (a.max(t0), b.min(t1));
        if hi <= lo {
            continue;
        }
        let (nodes, weights) = composite_gauss(lo, hi, 1, TIME_ORDER);
        for (&t, &g) in nodes.iter().zip(&weights) {
            let [v, d, _] = phi.time_factor(t);
            let l1 = (t - t0) / (t1 - t0);
            for (idx, hat) in [(s, 1.0 - l1), (s + 1, l1)] {
                let e = &mut w[idx];
                let gh = g * hat;
                e.t += gh * v;
                e.t2 += gh * v * v;
                e.tdt += gh * v * d;
                e.dt += gh * d;
            }
        }
    }
    w
}

fn integral(w: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    w.component_mul(g).sum()
}

impl LocalSweep {
    /// Sample the fields at every stored time in the support of `phi` up to
    /// time index `t_index` and accumulate all integrals.
    pub fn run(src: &dyn FieldSource, phi: &CutoffTest, t_index: usize, zetas: &[f64], xis: &[f64]) -> Result<Self> {
        phi.check_support(src.length(), src.horizon())?;
        if let Some(z) = zetas.iter().find(|z| !(**z > 0.0)) {
            return Err(NsfError::Precondition(format!("zeta must be positive, got {z}")));
        }
        if let Some(x) = xis.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
            return Err(NsfError::Precondition(format!("xi must lie in (0, 1), got {x}")));
        }
        let times = src.times();
        if t_index >= times.len() {
            return Err(NsfError::Precondition(format!("time index {t_index} out of range")));
        }
        let t = times[t_index];
        let r = phi.radius;
        let (xs, wx) = composite_gauss(phi.center[0] - r, phi.center[0] + r, LOCAL_CELLS, LOCAL_ORDER);
        let (ys, wy) = composite_gauss(phi.center[1] - r, phi.center[1] + r, LOCAL_CELLS, LOCAL_ORDER);
        let w2 = DMatrix::from_fn(xs.len(), ys.len(), |a, b| wx[a] * wy[b]);
        let mut s = Self {
            cutoff: *phi,
            t,
            visc_lhs: 0.0,
            final_kin: Quad::default(),
            visc: Quad::default(),
            trans: Quad::default(),
            press: Quad::default(),
            force: Quad::default(),
            mean_num: [0.0; 2],
            mean_den: 0.0,
            zetas: zetas.to_vec(),
            e2: vec![HeatTerms::default(); zetas.len()],
            xis: xis.to_vec(),
            e3: vec![HeatTerms::default(); xis.len()],
            korn: [0.0; 3],
        };
        let k = src.conductivity();
        let (lo, hi) = phi.t_support();
        let (lo, hi) = (lo.max(0.0), hi.min(t));
        if hi > lo {
            let space = phi.eval_space(&xs, &ys);
            for (m, lw) in level_weights(&times[..=t_index], phi, lo, hi).into_iter().enumerate() {
                if lw.is_zero() {
                    continue;
                }
                let sample = src.sample_grid(m, &xs, &ys);
                s.accumulate(&sample, &space, &w2, lw, k)?;
            }
        }
        let sample = src.sample_grid(t_index, &xs, &ys);
        let cut = phi.eval_grid(&xs, &ys, t);
        s.accumulate_final(&sample, &cut, &w2)?;
        Ok(s)
    }

    fn check_theta(&self, sample: &Sample, cut: &CutoffValues) -> Result<()> {
        if self.xis.is_empty() {
            return Ok(());
        }
        for (th, ph) in sample.theta.iter().zip(cut.phi.iter()) {
            if *ph > 0.0 && 1.0 + th < MIN_ONE_PLUS_THETA {
                return Err(NsfError::Precondition(format!("1 + theta = {} on the cut-off support", 1.0 + th)));
            }
        }
        Ok(())
    }

    /// `c` holds the spatial factor of the cut-off only; the time factor
    /// enters through the level weights `lw`.
    fn accumulate(&mut self, s: &Sample, c: &CutoffValues, w: &DMatrix<f64>, lw: LevelWeights, k: f64) -> Result<()> {
        if c.phi.min() < 0.0 {
            return Err(NsfError::Support("test function must be nonnegative".into()));
        }
        self.check_theta(s, c)?;
        let phi = &c.phi;
        let phi2 = phi.component_mul(phi);
        let w_t = w * lw.t;
        let w_t2 = w * lw.t2;
        let du2 = s.du_sq();
        let joule = s.mu.component_mul(&du2);
        self.visc_lhs += integral(&w_t2, &joule.component_mul(&phi2));

        let m_grad = s.transport[0].component_mul(&c.grad[0]) + s.transport[1].component_mul(&c.grad[1]);
        let u2 = s.speed_sq();
        // viscous cross term: -2 mu phi D_ij (u_i - a_i) d_j phi
        let dphi = |i: usize| s.sym(i, 0).component_mul(&c.grad[0]) + s.sym(i, 1).component_mul(&c.grad[1]);
        let mphi = s.mu.component_mul(phi);
        let g = [mphi.component_mul(&dphi(0)), mphi.component_mul(&dphi(1))];
        self.visc.c0 += -2.0 * integral(&w_t2, &(g[0].component_mul(&s.u[0]) + g[1].component_mul(&s.u[1])));
        for i in 0..2 {
            self.visc.c1[i] += 2.0 * integral(&w_t2, &g[i]);
        }
        // phi (d_t phi + M . grad phi), with the time factors folded into the weights
        let pk = (phi2.component_mul(w) * lw.tdt) + phi.component_mul(&m_grad).component_mul(&w_t2);
        self.trans.c0 += u2.dot(&pk);
        for i in 0..2 {
            self.trans.c1[i] += -2.0 * s.u[i].dot(&pk);
        }
        self.trans.c2 += pk.sum();
        let pp = s.pressure.component_mul(phi) * 2.0;
        let pg = [pp.component_mul(&c.grad[0]), pp.component_mul(&c.grad[1])];
        self.press.c0 += integral(&w_t2, &(pg[0].component_mul(&s.u[0]) + pg[1].component_mul(&s.u[1])));
        for i in 0..2 {
            self.press.c1[i] += -integral(&w_t2, &pg[i]);
        }
        let fp = [s.forcing[0].component_mul(&phi2), s.forcing[1].component_mul(&phi2)];
        self.force.c0 += integral(&w_t2, &(fp[0].component_mul(&s.u[0]) + fp[1].component_mul(&s.u[1])));
        for i in 0..2 {
            self.force.c1[i] += -integral(&w_t2, &fp[i]);
            self.mean_num[i] += integral(&w_t2, &s.u[i].component_mul(&phi2));
        }
        self.mean_den += integral(&w_t2, &phi2);

        // temperature: L psi = d_t psi + k Lap psi + M . grad psi
        let lpsi = phi.component_mul(w) * lw.dt + (&c.lap * k + &m_grad).component_mul(&w_t);
        let gt2 = s.grad_theta[0].component_mul(&s.grad_theta[0]) + s.grad_theta[1].component_mul(&s.grad_theta[1]);
        let th = &s.theta;
        for (i, &zeta) in self.zetas.iter().enumerate() {
            let root = th.map(|v| (zeta + v * v).sqrt());
            let e = &mut self.e2[i];
            e.diffusion += zeta * k * integral(&w_t, &gt2.zip_map(&root, |g, r| g / (r * r * r)).component_mul(phi));
            e.transport += root.dot(&lpsi);
            e.joule += integral(&w_t, &joule.component_mul(&th.zip_map(&root, |v, r| v / r)).component_mul(phi));
        }
        for (i, &xi) in self.xis.iter().enumerate() {
            let e = &mut self.e3[i];
            let one = th.map(|v| (1.0 + v).max(MIN_ONE_PLUS_THETA));
            e.diffusion += xi * k * integral(&w_t, &gt2.zip_map(&one, |g, o| g * o.powf(-xi - 1.0)).component_mul(phi));
            e.joule += integral(&w_t, &joule.zip_map(&one, |j, o| j * o.powf(-xi)).component_mul(phi));
            e.transport += one.map(|o| o.powf(1.0 - xi)).dot(&lpsi);
        }

        let gphi2 = c.grad[0].component_mul(&c.grad[0]) + c.grad[1].component_mul(&c.grad[1]);
        self.korn[0] += integral(&w_t2, &s.grad_sq().component_mul(&phi2));
        self.korn[1] += 2.0 * integral(&w_t2, &du2.component_mul(&phi2));
        self.korn[2] += 4.0 * integral(&w_t2, &gphi2.component_mul(&u2));
        Ok(())
    }

    fn accumulate_final(&mut self, s: &Sample, c: &CutoffValues, w: &DMatrix<f64>) -> Result<()> {
        self.check_theta(s, c)?;
        let phi2 = c.phi.component_mul(&c.phi);
        self.final_kin.c0 += 0.5 * integral(w, &s.speed_sq().component_mul(&phi2));
        for i in 0..2 {
            self.final_kin.c1[i] += -integral(w, &s.u[i].component_mul(&phi2));
        }
        self.final_kin.c2 += 0.5 * integral(w, &phi2);
        let th = &s.theta;
        for (i, &zeta) in self.zetas.iter().enumerate() {
            self.e2[i].final_term = integral(w, &th.map(|v| (zeta + v * v).sqrt()).component_mul(&c.phi));
        }
        for (i, &xi) in self.xis.iter().enumerate() {
            self.e3[i].final_term =
                integral(w, &th.map(|v| (1.0 + v).max(MIN_ONE_PLUS_THETA).powf(1.0 - xi)).component_mul(&c.phi));
        }
        Ok(())
    }

    /// Space-time `phi^2`-weighted mean velocity on the support.
    pub fn local_mean(&self) -> [f64; 2] {
        if self.mean_den > 0.0 {
            [self.mean_num[0] / self.mean_den, self.mean_num[1] / self.mean_den]
        } else {
            [0.0; 2]
        }
    }

    fn meta(&self) -> String {
        let c = &self.cutoff;
        format!(
            "x0={:.6};y0={:.6};R={:.6};t0={:.6};tau={:.6};t={:.6}",
            c.center[0], c.center[1], c.radius, c.t_center, c.t_radius, self.t
        )
    }

    /// Velocity inequality for the constant vector `a`.
    pub fn e1(&self, a: [f64; 2], rel_tol: f64) -> InequalityReport {
        let terms = [self.visc.at(a), self.trans.at(a), self.press.at(a), self.force.at(a)];
        let lhs = self.final_kin.at(a) + self.visc_lhs;
        let rhs: f64 = terms.iter().sum();
        let scale = self.final_kin.at(a).abs() + self.visc_lhs.abs() + terms.iter().map(|v| v.abs()).sum::<f64>();
        InequalityReport::new("e1", lhs, rhs, scale, rel_tol, format!("{};a=({:.6e},{:.6e})", self.meta(), a[0], a[1]))
    }

    /// Temperature inequality with parameter `zetas[i]`.
    pub fn e2(&self, i: usize, rel_tol: f64) -> InequalityReport {
        let e = &self.e2[i];
        let lhs = e.final_term + e.diffusion;
        let rhs = e.transport + e.joule;
        let scale = e.final_term.abs() + e.diffusion.abs() + e.transport.abs() + e.joule.abs();
        let first = e.final_term;
        InequalityReport::new("e2", lhs, rhs, scale, rel_tol, format!("{};zeta={:e};first_term={first:.16e}", self.meta(), self.zetas[i]))
    }

    /// Temperature inequality with parameter `xis[i]`.
    pub fn e3(&self, i: usize, rel_tol: f64) -> InequalityReport {
        let e = &self.e3[i];
        let xi = self.xis[i];
        let lhs = e.diffusion + e.joule;
        let rhs = (e.final_term - e.transport) / (1.0 - xi);
        let scale = e.diffusion.abs() + e.joule.abs() + (e.final_term.abs() + e.transport.abs()) / (1.0 - xi);
        InequalityReport::new("e3", lhs, rhs, scale, rel_tol, format!("{};xi={xi}", self.meta()))
    }

    /// Localized Korn estimate over `Omega x (0, t)`.
    pub fn korn(&self, rel_tol: f64) -> InequalityReport {
        let [lhs, a, b] = self.korn;
        InequalityReport::new("korn", lhs, a + b, lhs.abs() + a.abs() + b.abs(), rel_tol, self.meta())
    }
}

pub fn check_e1(src: &dyn FieldSource, phi: &CutoffTest, a: [f64; 2], t_index: usize, rel_tol: f64) -> Result<InequalityReport> {
    Ok(LocalSweep::run(src, phi, t_index, &[], &[])?.e1(a, rel_tol))
}

pub fn check_e2(src: &dyn FieldSource, psi: &CutoffTest, zeta: f64, t_index: usize, rel_tol: f64) -> Result<InequalityReport> {
    Ok(LocalSweep::run(src, psi, t_index, &[zeta], &[])?.e2(0, rel_tol))
}

pub fn check_e3(src: &dyn FieldSource, psi: &CutoffTest, xi: f64, t_index: usize, rel_tol: f64) -> Result<InequalityReport> {
    Ok(LocalSweep::run(src, psi, t_index, &[], &[xi])?.e3(0, rel_tol))
}

pub fn check_korn(src: &dyn FieldSource, phi: &CutoffTest, t_index: usize, rel_tol: f64) -> Result<InequalityReport> {
    Ok(LocalSweep::run(src, phi, t_index, &[], &[])?.korn(rel_tol))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::inequalities::cutoff::Profile;
    use crate::inequalities::source::AnalyticSource;
    use crate::law::ViscosityLaw;

    fn bump() -> CutoffTest {
        CutoffTest::new([0.45, 0.55], 0.3, 0.5, 0.3, Profile::Bump)
    }

    fn rel(r: &InequalityReport) -> f64 {
        r.residual / r.scale.max(1e-300)
    }

    #[test]
    fn zero_fields_give_identities() {
        let src = AnalyticSource::zero(1.0, 1.0, 100);
        let s = LocalSweep::run(&src, &bump(), 70, &[1.0, 0.01], &[0.25, 0.75]).unwrap();
        assert!(rel(&s.e1([0.3, -0.2], 0.0)).abs() < 1e-12);
        for i in 0..2 {
            assert!(rel(&s.e2(i, 0.0)).abs() < 1e-12, "{:?}", s.e2(i, 0.0));
            assert!(rel(&s.e3(i, 0.0)).abs() < 1e-12, "{:?}", s.e3(i, 0.0));
        }
        assert_eq!(s.korn(0.0).residual, 0.0);
    }

    /// Smooth solutions satisfy the local balances with equality, up to the
    /// piecewise-linear time interpolation.
    #[test]
    fn heat_decay_is_an_equality() {
        let (k, a) = (0.1, PI);
        let mut src = AnalyticSource::zero(1.0, 1.0, 400);
        src.conductivity = k;
        src.temperature = Box::new(move |x, y, t| {
            let g = 0.5 * (-2.0 * k * a * a * t).exp();
            let (sx, cx) = (a * x).sin_cos();
            let (sy, cy) = (a * y).sin_cos();
            (1.0 + g * cx * cy, [-a * g * sx * cy, -a * g * cx * sy])
        });
        let s = LocalSweep::run(&src, &bump(), 280, &[1.0, 0.1, 0.01], &[0.25, 0.5, 0.75]).unwrap();
        for i in 0..3 {
            assert!(rel(&s.e2(i, 0.0)).abs() < 1e-5, "{:?}", s.e2(i, 0.0));
            assert!(rel(&s.e3(i, 0.0)).abs() < 1e-5, "{:?}", s.e3(i, 0.0));
        }
    }

    /// Decaying Taylor-Green vortex: the convective term is a gradient and
    /// balances the pressure.
    #[test]
    fn taylor_green_is_an_equality() {
        let (mu, a) = (0.5, PI);
        let mut src = AnalyticSource::zero(1.0, 1.0, 400);
        src.viscosity = ViscosityLaw::Constant(mu);
        let g = move |t: f64| (-mu * a * a * t).exp();
        src.velocity = Box::new(move |x, y, t| {
            let (sx, cx) = (a * x).sin_cos();
            let (sy, cy) = (a * y).sin_cos();
            let v = g(t);
            ([v * sx * cy, -v * cx * sy], [[a * v * cx * cy, -a * v * sx * sy], [a * v * sx * sy, -a * v * cx * cy]])
        });
        src.pressure = Box::new(move |x, y, t| 0.25 * g(t) * g(t) * ((2.0 * a * x).cos() + (2.0 * a * y).cos()));
        let s = LocalSweep::run(&src, &bump(), 280, &[], &[]).unwrap();
        for av in [[0.0, 0.0], s.local_mean(), [0.4, -0.1]] {
            assert!(rel(&s.e1(av, 0.0)).abs() < 1e-5, "{:?}", s.e1(av, 0.0));
        }
        assert!(s.korn(0.0).pass);
    }

    #[test]
    fn first_term_grows_with_zeta() {
        let mut src = AnalyticSource::zero(1.0, 1.0, 50);
        src.temperature = Box::new(|x, y, _| (x - y, [1.0, -1.0]));
        let s = LocalSweep::run(&src, &bump(), 25, &[0.01, 0.1, 1.0], &[]).unwrap();
        let f: Vec<f64> = s.e2.iter().map(|e| e.final_term).collect();
        assert!(f[0] < f[1] && f[1] < f[2], "{f:?}");
    }
}
