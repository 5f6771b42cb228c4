//! Layout of a run directory.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use nsf_core::galerkin::{Model, Trajectory};
use nsf_core::inequalities::poincare_constant;
use nsf_core::io::{self, FieldDump};
use nsf_core::Result;

pub const SCENARIO: &str = "scenario.txt";
pub const VELOCITY: &str = "velocity.nsf";
pub const TEMPERATURE: &str = "temperature.nsf";
pub const PRESSURE: &str = "pressure.nsf";
pub const FIELDS: &str = "fields.nsf";
pub const LEDGER: &str = "ledger.csv";
pub const MANIFEST: &str = "manifest.txt";

fn file_line(dir: &Path, name: &str) -> Result<String> {
    let bytes = std::fs::read(dir.join(name))?;
    Ok(format!("file.{name} = {} bytes, fnv1a {:#018x}\n", bytes.len(), io::fnv1a64(&bytes)))
}

/// Manifest: resolved parameters, derived discretization sizes, outcome
/// and checksums of every output file; no timestamps, so reruns are
/// byte-identical.
fn manifest(traj: &Trajectory, dir: &Path, files: &[&str]) -> Result<String> {
    let model = &traj.model;
    let sc = &model.scenario;
    let mut s = String::from("# nsf run manifest\n");
    let _ = writeln!(s, "version = {}", env!("CARGO_PKG_VERSION"));
    for line in io::serialize_scenario(sc).lines().filter(|l| l.contains('=')) {
        let _ = writeln!(s, "scenario.{line}");
    }
    let _ = writeln!(s, "derived.steps = {}", sc.steps());
    let _ = writeln!(s, "derived.levels_written = {}", traj.len());
    let _ = writeln!(s, "derived.quadrature = order {} x {} cells per direction", model.domain.order(), model.domain.cells());
    let _ = writeln!(s, "derived.aux_grid_intervals = {}", model.grid().intervals());
    let _ = writeln!(s, "derived.mu_lower = {:?}", sc.viscosity.lower());
    let _ = writeln!(s, "derived.mu_upper = {:?}", sc.viscosity.upper());
    let _ = writeln!(s, "derived.poincare_constant = {:?}", poincare_constant(sc.length, sc.viscosity.lower()));
    let _ = writeln!(s, "status = {}", traj.failure.as_deref().map_or("complete".to_string(), |f| format!("failed: {f}")));
    for f in files {
        s.push_str(&file_line(dir, f)?);
    }
    Ok(s)
}

/// Write every artifact of a run into `dir`.
pub fn write_run(traj: &Trajectory, dir: &Path, plot_grid: usize) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(SCENARIO), io::serialize_scenario(&traj.model.scenario))?;
    io::velocity_dump(traj).write(&dir.join(VELOCITY))?;
    io::temperature_dump(traj).write(&dir.join(TEMPERATURE))?;
    io::pressure_dump(traj).write(&dir.join(PRESSURE))?;
    io::snapshot_dump(traj, plot_grid.max(1)).write(&dir.join(FIELDS))?;
    std::fs::write(dir.join(LEDGER), traj.ledger.to_csv())?;
    let text = manifest(traj, dir, &[SCENARIO, VELOCITY, TEMPERATURE, PRESSURE, FIELDS, LEDGER])?;
    std::fs::write(dir.join(MANIFEST), text)?;
    Ok(())
}

/// Rebuild the trajectory stored in `dir`.
pub fn load_run(dir: &Path) -> Result<Trajectory> {
    let sc = io::load_scenario(&dir.join(SCENARIO))?;
    let model = Arc::new(Model::new(&sc)?);
    let vel = FieldDump::read(&dir.join(VELOCITY))?;
    let temp = FieldDump::read(&dir.join(TEMPERATURE))?;
    let pres = FieldDump::read(&dir.join(PRESSURE))?;
    io::trajectory_from_dumps(model, &vel, &temp, &pres)
}
