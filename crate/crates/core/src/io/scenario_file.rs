//! Line-based scenario files:
//!
//! ```text
//! [domain]          L, T
//! [physics]         k, mu
//! [discretization]  eps, nu, N, M, dt
//! [data]            f, u0, theta0, eps0
//! [run]             seed, convection
//! ```
//!
//! `key = value` pairs, `#` comments. Keys left out take the benchmark
//! value; unknown or repeated keys are errors.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{NsfError, Result};
use crate::scenario::Scenario;

const SECTIONS: [(&str, &[&str]); 5] = [
    ("domain", &["L", "T"]),
    ("physics", &["k", "mu"]),
    ("discretization", &["eps", "nu", "N", "M", "dt"]),
    ("data", &["f", "u0", "theta0", "eps0"]),
    ("run", &["seed", "convection"]),
];

fn perr(line: usize, msg: impl Into<String>) -> NsfError {
    NsfError::Parse { line, msg: msg.into() }
}

fn float(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|e| perr(line, format!("{key}: {e}")))?;
    if !x.is_finite() {
        return Err(perr(line, format!("{key} must be finite")));
    }
    Ok(x)
}

fn assign(s: &mut Scenario, line: usize, key: &str, v: &str) -> Result<()> {
    let int = |v: &str| v.parse::<u64>().map_err(|e| perr(line, format!("{key}: {e}")));
    let preset = |e: String| perr(line, format!("{key}: {e}"));
    match key {
        "L" => s.length = float(line, key, v)?,
        "T" => s.horizon = float(line, key, v)?,
        "k" => s.conductivity = float(line, key, v)?,
        "mu" => s.viscosity = v.parse().map_err(preset)?,
        "eps" => s.eps = float(line, key, v)?,
        "nu" => s.nu = float(line, key, v)?,
        "N" => s.n_vel = int(v)? as usize,
        "M" => s.n_temp = int(v)? as usize,
        "dt" => s.dt = float(line, key, v)?,
        "f" => s.forcing = v.parse().map_err(preset)?,
        "u0" => s.u0 = v.parse().map_err(preset)?,
        "theta0" => s.theta0 = v.parse().map_err(preset)?,
        "eps0" => s.eps0 = float(line, key, v)?,
        "seed" => s.seed = int(v)?,
        "convection" => s.convection = v.parse().map_err(|_| perr(line, format!("{key}: expected true or false, got '{v}'")))?,
        _ => unreachable!("key table and assignment out of sync"),
    }
    Ok(())
}

/// Parse without validating the data assumptions.
pub fn parse_scenario_unchecked(text: &str) -> Result<Scenario> {
    let mut s = Scenario::benchmark();
    let mut section: Option<&(&str, &[&str])> = None;
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| perr(line, "unterminated section header"))?.trim();
            section = Some(SECTIONS.iter().find(|(n, _)| *n == name).ok_or_else(|| perr(line, format!("unknown section [{name}]")))?);
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| perr(line, format!("expected `key = value`, got '{body}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let (sname, keys) = section.ok_or_else(|| perr(line, format!("key '{key}' outside any section")))?;
        if !keys.contains(&key) {
            return Err(perr(line, format!("unknown key '{key}' in section [{sname}]")));
        }
        if !seen.insert(key.to_string()) {
            return Err(perr(line, format!("duplicate key '{key}'")));
        }
        assign(&mut s, line, key, value)?;
    }
    Ok(s)
}

/// Parse and validate a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let s = parse_scenario_unchecked(text)?;
    s.validate()?;
    Ok(s)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

/// Canonical text; floats use the shortest representation that parses back
/// to the same value.
pub fn serialize_scenario(s: &Scenario) -> String {
    format!(
        "[domain]\nL = {:?}\nT = {:?}\n\n[physics]\nk = {:?}\nmu = {}\n\n[discretization]\neps = {:?}\nnu = {:?}\nN = {}\nM = {}\ndt = {:?}\n\n[data]\nf = {}\nu0 = {}\ntheta0 = {}\neps0 = {:?}\n\n[run]\nseed = {}\nconvection = {}\n",
        s.length, s.horizon, s.conductivity, s.viscosity, s.eps, s.nu, s.n_vel, s.n_temp, s.dt, s.forcing, s.u0, s.theta0, s.eps0, s.seed, s.convection
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_defaults() {
        for s in [Scenario::benchmark(), Scenario::zero(), Scenario::manufactured(4, 2e-3), Scenario::random(9)] {
            assert_eq!(parse_scenario(&serialize_scenario(&s)).unwrap(), s);
        }
        let s = parse_scenario("# tiny\n[discretization]\nN = 4\nM = 4 # comment\n").unwrap();
        assert_eq!((s.n_vel, s.n_temp, s.dt), (4, 4, 1e-3));
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_scenario("[domain]\nL = 1\nbogus = 3\n").unwrap_err();
        assert!(matches!(e, NsfError::Parse { line: 3, .. }), "{e}");
        assert!(matches!(parse_scenario("[domain]\nN = 4\n"), Err(NsfError::Parse { line: 2, .. })));
        assert!(matches!(parse_scenario("L = 1\n"), Err(NsfError::Parse { line: 1, .. })));
        assert!(matches!(parse_scenario("[domain]\nL = 1\nL = 2\n"), Err(NsfError::Parse { line: 3, .. })));
        assert!(matches!(parse_scenario("[physics]\nmu = quadratic\n"), Err(NsfError::Parse { line: 2, .. })));
        assert!(matches!(parse_scenario("[physics]\nk = -1\n"), Err(NsfError::InvalidScenario(_) | NsfError::InvalidParameter(_))));
    }
}
