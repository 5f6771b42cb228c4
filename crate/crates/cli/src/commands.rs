//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use nsf_core::basis::ModeTable;
use nsf_core::domain::Domain2D;
use nsf_core::galerkin::{self, step, Model, Trajectory};
use nsf_core::grid::AuxGrid;
use nsf_core::elliptic::NeumannSolver;
use nsf_core::inequalities::{velocity_estimate_separated, verify_trajectory, InequalityReport, VerifyPlan, FROZEN_TOLERANCES};
use nsf_core::io::{self, csv::slab_csv, FieldDump};
use nsf_core::oracles;
use nsf_core::scenario::Scenario;
use nsf_core::NsfError;

use crate::outputs;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        Self { code: 1, message: msg.into() }
    }
}

impl From<NsfError> for CliError {
    fn from(e: NsfError) -> Self {
        let code = match e {
            NsfError::LinearSolve(_) | NsfError::NonFinite { .. } => 2,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn solver_failure(traj: &Trajectory) -> CliResult {
    match &traj.failure {
        Some(f) => Err(CliError { code: 2, message: format!("solver failed after {} levels: {f}", traj.len()) }),
        None => Ok(()),
    }
}

pub fn run(scenario: &Path, out: &Path, plot_grid: usize) -> CliResult {
    let sc = io::load_scenario(scenario)?;
    let traj = galerkin::run(&sc)?;
    outputs::write_run(&traj, out, plot_grid)?;
    let last = traj.ledger.last();
    println!(
        "levels={} t={:.6e} kinetic={:.6e} dissipation={:.6e} theta_l1={:.6e} min_theta={:.6e}",
        traj.len(),
        last.time,
        last.kinetic,
        last.dissipation,
        last.theta_l1,
        last.min_theta
    );
    solver_failure(&traj)
}

pub struct VerifyArgs {
    pub cutoffs: usize,
    pub cylinders: usize,
    pub zeta: Vec<f64>,
    pub xi: Vec<f64>,
    pub eps: f64,
    pub delta: f64,
    pub seed: Option<u64>,
}

fn reports_csv(reports: &[InequalityReport]) -> String {
    let mut s = format!("{}\n", InequalityReport::CSV_HEADER);
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

pub fn verify(dir: &Path, args: VerifyArgs) -> CliResult {
    let traj = outputs::load_run(dir)?;
    let seed = args.seed.unwrap_or(traj.model.scenario.seed);
    let plan = VerifyPlan {
        cutoffs: args.cutoffs,
        cylinders: args.cylinders,
        zetas: args.zeta,
        xis: args.xi,
        eps: args.eps,
        delta: args.delta,
        seed,
        tol: FROZEN_TOLERANCES,
    };
    let out = verify_trajectory(&traj, &plan)?;
    std::fs::write(dir.join("checks.csv"), reports_csv(&out.reports))?;
    let mut holder = String::from("t0,x,y,radius,lhs,grad_2r,t1,t2,t3,pressure,slack\n");
    for (t, slack) in out.holder.terms.iter().zip(&out.holder.slack) {
        let c = &t.cylinder;
        let vals = [c.t0, c.center[0], c.center[1], c.radius, t.lhs, t.grad_2r, t.t[0], t.t[1], t.t[2], t.pressure, *slack];
        let cells: Vec<String> = vals.iter().map(|v| io::csv::fmt_f64(*v)).collect();
        holder.push_str(&cells.join(","));
        holder.push('\n');
    }
    std::fs::write(dir.join("holder.csv"), holder)?;
    let separated = velocity_estimate_separated(&traj);
    let mut s = String::from("# nsf verify summary\n");
    let _ = writeln!(s, "seed = {seed}");
    let _ = writeln!(s, "cutoffs = {}\ncylinders = {}", plan.cutoffs, plan.cylinders);
    let _ = writeln!(s, "zeta = {:?}\nxi = {:?}\neps = {:?}\ndelta = {:?}", plan.zetas, plan.xis, plan.eps, plan.delta);
    let _ = writeln!(s, "tolerances.e1_e2_e3_korn = {:?}", plan.tol);
    let _ = writeln!(s, "checks = {}\nfailures = {}", out.reports.len(), out.failures());
    let worst = |id: &str| out.reports.iter().filter(|r| r.id == id).map(InequalityReport::relative).fold(f64::INFINITY, f64::min);
    for id in ["e1", "e2", "e3", "korn"] {
        let _ = writeln!(s, "worst_relative_residual.{id} = {:e}", worst(id));
    }
    let _ = writeln!(s, "holder.delta = {:?}\nholder.B = {:?}", out.holder.delta, out.holder.b);
    let _ = writeln!(s, "integrability.eps = {:?}\nintegrability.C = {:e}", out.integrability.eps, out.integrability.max_constant);
    let sp = &out.split;
    let _ = writeln!(s, "pressure.p1_norm = {:e}\npressure.p2_norm = {:e}\npressure.p_norm = {:e}", sp.p1_norm, sp.p2_norm, sp.p_norm);
    let _ = writeln!(s, "pressure.consistency = {:e}\npressure.p2_equation_gap = {:e}", sp.consistency, sp.p2_equation_gap);
    let _ = writeln!(s, "info.velocity_energy_separated = lhs {:e}, rhs {:e} (not asserted)", separated.lhs, separated.rhs);
    let _ = writeln!(s, "result = {}", if out.all_pass() { "pass" } else { "fail" });
    std::fs::write(dir.join("summary.txt"), &s)?;
    print!("{s}");
    if out.all_pass() {
        Ok(())
    } else {
        Err(CliError { code: 3, message: format!("{} of {} checks failed (see checks.csv)", out.failures(), out.reports.len()) })
    }
}

fn with_value(base: &Scenario, key: &str, raw: &str) -> Result<Scenario, CliError> {
    let mut s = base.clone();
    let float = || raw.trim().parse::<f64>().map_err(|e| CliError::input(format!("bad {key} value '{raw}': {e}")));
    let int = || raw.trim().parse::<usize>().map_err(|e| CliError::input(format!("bad {key} value '{raw}': {e}")));
    match key {
        "nu" => s.nu = float()?,
        "eps" => s.eps = float()?,
        "dt" => s.dt = float()?,
        "N" => s.n_vel = int()?,
        "M" => s.n_temp = int()?,
        _ => return Err(CliError::input(format!("unknown sweep parameter {key}"))),
    }
    s.validate()?;
    Ok(s)
}

/// Final velocity and temperature sampled at common Gauss nodes.
fn final_fields(traj: &Trajectory, nodes: &[f64]) -> [DMatrix<f64>; 3] {
    let len = traj.model.scenario.length;
    let st = traj.final_state();
    let tv = ModeTable::sine(nodes, st.u.modes(), len);
    let tt = ModeTable::sine(nodes, st.theta.modes(), len);
    [
        ModeTable::eval_tensor(&tv, &tv, &st.u.x, false, false),
        ModeTable::eval_tensor(&tv, &tv, &st.u.y, false, false),
        ModeTable::eval_tensor(&tt, &tt, &st.theta.coeffs, false, false),
    ]
}

pub fn sweep(scenario: &Path, key: &str, values: &[String], out: &Path) -> CliResult {
    let base = io::load_scenario(scenario)?;
    let scenarios: Vec<Scenario> = values.iter().map(|v| with_value(&base, key, v)).collect::<Result<_, _>>()?;
    std::fs::create_dir_all(out)?;
    let runs: Vec<Result<Trajectory, CliError>> = scenarios
        .par_iter()
        .enumerate()
        .map(|(k, sc)| {
            let traj = galerkin::run(sc)?;
            outputs::write_run(&traj, &out.join(format!("run_{k:02}")), 16)?;
            solver_failure(&traj)?;
            Ok(traj)
        })
        .collect();
    let runs: Vec<Trajectory> = runs.into_iter().collect::<Result<_, _>>()?;
    let modes = scenarios.iter().map(|s| s.n_vel.max(s.n_temp)).max().unwrap_or(1);
    let dom = Domain2D::for_modes(base.length, modes)?;
    let w = dom.weights();
    let integrate = |g: &DMatrix<f64>| -> f64 { (0..g.nrows()).map(|i| (0..g.ncols()).map(|j| w[i] * w[j] * g[(i, j)]).sum::<f64>()).sum() };
    let fields: Vec<[DMatrix<f64>; 3]> = runs.iter().map(|t| final_fields(t, dom.nodes())).collect();
    let mut table = String::from("index,param,value,next_value,u_l2_diff,theta_l1_diff\n");
    for k in 0..fields.len().saturating_sub(1) {
        let (a, b) = (&fields[k], &fields[k + 1]);
        let du = (&a[0] - &b[0]).map(|v| v * v) + (&a[1] - &b[1]).map(|v| v * v);
        let dth = (&a[2] - &b[2]).abs();
        let _ = writeln!(
            table,
            "{k},{key},{},{},{},{}",
            values[k].trim(),
            values[k + 1].trim(),
            io::csv::fmt_f64(integrate(&du).max(0.0).sqrt()),
            io::csv::fmt_f64(integrate(&dth))
        );
    }
    std::fs::write(out.join("sweep.csv"), &table)?;
    print!("{table}");
    Ok(())
}

pub fn export_plots(dir: &Path, every: usize) -> CliResult {
    if every == 0 {
        return Err(CliError::input("--every must be positive"));
    }
    let dump = FieldDump::read(&dir.join(outputs::FIELDS))?;
    let sc = io::load_scenario(&dir.join(outputs::SCENARIO))?;
    if dump.components != 3 {
        return Err(CliError::input(format!("{} has {} components, expected 3", outputs::FIELDS, dump.components)));
    }
    let plots = dir.join("plots");
    std::fs::create_dir_all(&plots)?;
    let mut index = String::from("level,time,u_mag,theta,joule\n");
    let ny = dump.ny as usize;
    for m in (0..dump.nt as usize).step_by(every) {
        let names = [format!("u_mag_{m:05}.csv"), format!("theta_{m:05}.csv"), format!("joule_{m:05}.csv")];
        for (c, name) in names.iter().enumerate() {
            std::fs::write(plots.join(name), slab_csv(dump.slab(m, c), ny))?;
        }
        let _ = writeln!(index, "{m},{},{},{},{}", io::csv::fmt_f64(m as f64 * sc.dt), names[0], names[1], names[2]);
    }
    std::fs::write(plots.join("index.csv"), index)?;
    Ok(())
}

fn oracle_neumann(seed: u64, size: usize) -> CliResult {
    let n = size.clamp(4, oracles::DENSE_MAX_INTERVALS);
    let grid = AuxGrid::new(1.0, n);
    let solver = NeumannSolver::new(grid.clone());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    println!("sample,relative_difference");
    for k in 0..20 {
        let raw = grid.tabulate(|_, _| 0.0).map(|_| rng.gen_range(-1.0..1.0));
        let mean = grid.mean(&raw);
        let rhs = raw.map(|v| v - mean);
        let p = solver.solve(&rhs)?;
        let q = oracles::dense_neumann_oracle(&grid, &rhs)?;
        println!("{k},{:e}", (&p - &q).norm() / q.norm());
    }
    let w = std::f64::consts::PI;
    let smooth = |x: f64, y: f64| (w * x).cos() * (2.0 * w * y).cos() + 0.5 * (3.0 * w * y).cos() * (w * x).cos();
    let coarse = AuxGrid::new(1.0, 16);
    let reference = oracles::richardson_neumann(1.0, 16, smooth)?;
    let spectral = NeumannSolver::new(AuxGrid::new(1.0, 16)).solve(&coarse.tabulate(smooth))?;
    println!("richardson_vs_spectral_max,{:e}", (reference - spectral).amax());
    Ok(())
}

fn oracle_quadrature(seed: u64) -> CliResult {
    let sc = Scenario::random(seed);
    let model = Model::new(&sc)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = model.basis.n_vel();
    let m = model.basis.n_temp();
    let u = nsf_core::basis::VectorField {
        x: DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.3..0.3)),
        y: DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.3..0.3)),
    };
    let theta = nsf_core::basis::ScalarField { coeffs: DMatrix::from_fn(m, m, |_, _| rng.gen_range(-0.3..0.3)) };
    let st = model.state(0.0, u.clone(), theta.clone());
    let production = model.basis.integrate(&model.joule_density(&st));
    let len = sc.length;
    let density = |x: f64, y: f64| {
        let t = ModeTable::sine(&[x], n, len);
        let ty = ModeTable::sine(&[y], n, len);
        let e = |c: &DMatrix<f64>, dx, dy| ModeTable::eval_tensor(&t, &ty, c, dx, dy)[(0, 0)];
        let (dxx, dyy, dxy) = (e(&u.x, true, false), e(&u.y, false, true), 0.5 * (e(&u.x, false, true) + e(&u.y, true, false)));
        sc.viscosity.eval(theta.value_at(len, x, y)) * (dxx * dxx + dyy * dyy + 2.0 * dxy * dxy)
    };
    let cells = model.domain.cells();
    let q4 = oracles::oversampled_quadrature(density, len, cells, 4)?;
    let q8 = oracles::oversampled_quadrature(density, len, cells, 8)?;
    println!("production,{production:.16e}\nfactor4,{q4:.16e}\nfactor8,{q8:.16e}\nself_check,{:e}", (q4 - q8).abs());
    Ok(())
}

fn oracle_ode(size: usize) -> CliResult {
    let modes = size.clamp(1, oracles::ODE_MAX_MODES);
    let sc = Scenario::benchmark().with_modes(modes, modes);
    let model = Arc::new(Model::new(&sc)?);
    let (s0, _) = model.project_initial();
    let t1 = 10.0 * sc.dt;
    let (a, stats) = oracles::ode_reference(&model, &s0, t1, 1e-10)?;
    let (b, _) = oracles::ode_reference(&model, &s0, t1, 5e-11)?;
    let diff = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    println!("modes,{modes}\nt_end,{t1:e}\naccepted_steps,{}\nrejected_steps,{}", stats.accepted, stats.rejected);
    println!("u_norm,{:e}\ntolerance_halving_difference,{:e}", a.u.to_vec().iter().map(|v| v * v).sum::<f64>().sqrt(), diff(&a.u.to_vec(), &b.u.to_vec()));
    let one = step(&model, &s0, sc.dt)?;
    let (r1, _) = oracles::ode_reference(&model, &s0, sc.dt, 1e-10)?;
    println!("one_step_difference,{:e}", diff(&one.state.u.to_vec(), &r1.u.to_vec()));
    Ok(())
}

fn oracle_manufactured(size: usize) -> CliResult {
    let n = size.max(2);
    let case = oracles::ManufacturedCase::from_scenario(&Scenario::manufactured(n, 1e-3))?;
    println!("strong_residual_max,{:e}", case.max_residual(500, 1, 0.5));
    println!("N,dt,error");
    let dts = [4e-3, 2e-3, 1e-3];
    let errs: Vec<Result<f64, CliError>> = dts
        .par_iter()
        .map(|dt| {
            let traj = galerkin::run(&Scenario::manufactured(n, *dt))?;
            solver_failure(&traj)?;
            Ok(case.solution_error(&traj))
        })
        .collect();
    let errs: Vec<f64> = errs.into_iter().collect::<Result<_, _>>()?;
    for (dt, e) in dts.iter().zip(&errs) {
        println!("{n},{dt:e},{e:e}");
    }
    for k in 1..errs.len() {
        println!("order_{k},{:.4}", (errs[k - 1] / errs[k]).log2());
    }
    Ok(())
}

pub fn oracle(name: &str, seed: u64, size: Option<usize>) -> CliResult {
    match name {
        "neumann" => oracle_neumann(seed, size.unwrap_or(16)),
        "quadrature" => oracle_quadrature(seed),
        "ode" => oracle_ode(size.unwrap_or(4)),
        "manufactured" => oracle_manufactured(size.unwrap_or(8)),
        _ => Err(CliError::input(format!("unknown oracle {name}"))),
    }
}
