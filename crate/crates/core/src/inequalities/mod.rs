//! Discrete certification of the a-priori estimates and the local energy
//! inequalities on computed (or analytic) fields.

mod cutoff;
mod global;
mod holder;
mod local;
mod pressure_split;
mod source;
mod verify;

use rand::SeedableRng;
use rayon::prelude::*;

pub use cutoff::{CutoffTest, CutoffValues, ParabolicCylinder, Profile};
pub use global::{level_norms, minimum_principle, poincare_constant, temperature_estimate, velocity_estimate, velocity_estimate_separated, LevelNorms};
pub use holder::{
    cylinder_integrals, disc_rule, fit_constants, higher_integrability_probe, integrability_range,
    reverse_holder_probe, CylinderIntegrals, HolderFit, HolderTerms, IntegrabilityReport,
};
pub use local::{check_e1, check_e2, check_e3, check_korn, LocalSweep, LOCAL_CELLS, MIN_ONE_PLUS_THETA};
pub use pressure_split::{convective_pressure, pressure_split, PressureSplit};
pub use verify::{verify_trajectory, VerifyOutcome, VerifyPlan, FROZEN_TOLERANCES, KORN_REL_TOL, MIN_PRINCIPLE_REL, SPLIT_REL_TOL, VELOCITY_REL_TOL, TEMPERATURE_SLACK};
pub use source::{AnalyticSource, FieldSource, Sample, TrajectorySource};

use crate::error::Result;
use crate::quadrature::nearest_step;

/// Outcome of one inequality check.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub residual: f64,
    /// Absolute tolerance: relative tolerance times `scale`.
    pub tolerance: f64,
    /// Sum of the magnitudes of all integral terms.
    pub scale: f64,
    pub pass: bool,
    pub meta: String,
}

impl InequalityReport {
    pub fn new(id: &str, lhs: f64, rhs: f64, scale: f64, rel_tol: f64, meta: String) -> Self {
        let residual = rhs - lhs;
        let tolerance = rel_tol * scale;
        Self { id: id.into(), lhs, rhs, residual, tolerance, scale, pass: residual >= -tolerance, meta }
    }

    /// Residual relative to the term scale (0 when every term vanishes).
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            0.0
        }
    }

    pub const CSV_HEADER: &'static str = "id,lhs,rhs,residual,tolerance,scale,pass,meta";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            self.id, self.lhs, self.rhs, self.residual, self.tolerance, self.scale, self.pass, self.meta
        )
    }
}

/// Cut-offs and cylinders drawn, in that order, from one generator seeded
/// with `seed`.
pub fn sample_tests(seed: u64, cutoffs: usize, cylinders: usize, length: f64, horizon: f64) -> (Vec<CutoffTest>, Vec<ParabolicCylinder>) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let c = (0..cutoffs).map(|_| CutoffTest::random(&mut rng, length, horizon)).collect();
    let q = (0..cylinders).map(|_| ParabolicCylinder::random(&mut rng, length, horizon)).collect();
    (c, q)
}

/// Time index at which a cut-off's inequalities are evaluated: the stored
/// time nearest to three quarters through its support.
pub fn check_time_index(times: &[f64], cutoff: &CutoffTest) -> usize {
    nearest_step(times, cutoff.t_center + 0.5 * cutoff.t_radius)
}

/// Parameters of a batch of local checks.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCheckPlan {
    pub zetas: Vec<f64>,
    pub xis: Vec<f64>,
    /// Relative tolerances for e1, e2, e3 and Korn.
    pub tol: [f64; 4],
}

/// Run e1 (with `a = 0` and the local mean), e2, e3 and Korn on every
/// cut-off, in parallel; reports come back in a deterministic order.
pub fn run_local_checks(src: &dyn FieldSource, cutoffs: &[CutoffTest], plan: &LocalCheckPlan) -> Result<Vec<InequalityReport>> {
    let per: Vec<Result<Vec<InequalityReport>>> = cutoffs
        .par_iter()
        .map(|c| {
            let m = check_time_index(src.times(), c);
            let sweep = LocalSweep::run(src, c, m, &plan.zetas, &plan.xis)?;
            let mut out = vec![sweep.e1([0.0; 2], plan.tol[0]), sweep.e1(sweep.local_mean(), plan.tol[0])];
            out.extend((0..plan.zetas.len()).map(|i| sweep.e2(i, plan.tol[1])));
            out.extend((0..plan.xis.len()).map(|i| sweep.e3(i, plan.tol[2])));
            out.push(sweep.korn(plan.tol[3]));
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in per {
        all.extend(r?);
    }
    Ok(all)
}
