//! One-call verification of a trajectory against every check.

use super::*;
use crate::galerkin::Trajectory;

/// Relative tolerances for e1, e2, e3 and Korn, frozen by running the
/// benchmark at `N = M = 8` and `16` and taking three times the worst
/// negative relative residual of the refined run.
pub const FROZEN_TOLERANCES: [f64; 4] = [2.0e-2, 5.7e-3, 7.2e-4, KORN_REL_TOL];
pub const KORN_REL_TOL: f64 = 1e-12;
pub const VELOCITY_REL_TOL: f64 = 1e-8;
pub const TEMPERATURE_SLACK: f64 = 1e-6;
/// `min theta >= -MIN_PRINCIPLE_REL * max theta`.
pub const MIN_PRINCIPLE_REL: f64 = 1e-4;
/// `||p1 + p2 - p|| <= SPLIT_REL_TOL ||p||`.
pub const SPLIT_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyPlan {
    pub cutoffs: usize,
    pub cylinders: usize,
    pub zetas: Vec<f64>,
    pub xis: Vec<f64>,
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    pub tol: [f64; 4],
}

impl Default for VerifyPlan {
    fn default() -> Self {
        Self {
            cutoffs: 32,
            cylinders: 64,
            zetas: vec![1.0, 0.1, 0.01],
            xis: vec![0.25, 0.5, 0.75],
            eps: 0.1,
            delta: 0.5,
            seed: 1,
            tol: FROZEN_TOLERANCES,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    /// Asserted checks, each with a pass flag.
    pub reports: Vec<InequalityReport>,
    pub holder: HolderFit,
    pub integrability: IntegrabilityReport,
    pub split: PressureSplit,
}

impl VerifyOutcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.reports.iter().filter(|r| !r.pass).count()
    }
}

/// Run the local, global, integrability and pressure checks.
pub fn verify_trajectory(traj: &Trajectory, plan: &VerifyPlan) -> Result<VerifyOutcome> {
    let sc = &traj.model.scenario;
    let horizon = *traj.times.last().unwrap_or(&0.0);
    let (cutoffs, cylinders) = sample_tests(plan.seed, plan.cutoffs, plan.cylinders, sc.length, horizon);
    let src = TrajectorySource::new(traj);
    let local = LocalCheckPlan { zetas: plan.zetas.clone(), xis: plan.xis.clone(), tol: plan.tol };
    let mut reports = run_local_checks(&src, &cutoffs, &local)?;
    reports.push(velocity_estimate(traj, VELOCITY_REL_TOL));
    reports.push(temperature_estimate(traj, TEMPERATURE_SLACK));
    let (lo, hi, _) = minimum_principle(traj);
    // lhs = -min, rhs = margin: passes when min >= -rel max
    reports.push(InequalityReport::new("minimum_principle", -lo, MIN_PRINCIPLE_REL * hi.max(0.0), 0.0, 0.0, format!("min={lo:e};max={hi:e}")));
    let holder = reverse_holder_probe(&src, &cylinders, plan.delta)?;
    reports.push(InequalityReport::new("holder_finite", 0.0, if holder.is_finite() { 0.0 } else { -1.0 }, 0.0, 0.0, format!("B={:?}", holder.b)));
    let integrability = higher_integrability_probe(&src, &cylinders, plan.eps, sc.eps0)?;
    let c = integrability.max_constant;
    reports.push(InequalityReport::new("integrability_finite", 0.0, if c.is_finite() { 0.0 } else { -1.0 }, 0.0, 0.0, format!("C={c:e};eps={}", plan.eps)));
    let split = pressure_split(traj)?;
    reports.push(InequalityReport::new(
        "pressure_split",
        split.consistency,
        SPLIT_REL_TOL,
        0.0,
        0.0,
        format!("p1_norm={:e};p2_norm={:e};p_norm={:e};p2_equation_gap={:e}", split.p1_norm, split.p2_norm, split.p_norm, split.p2_equation_gap),
    ));
    Ok(VerifyOutcome { reports, holder, integrability, split })
}
