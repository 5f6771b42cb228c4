//! Problem data, discretization parameters and their validation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};

use crate::domain::Domain2D;
use crate::error::{invalid, NsfError, Result};
use crate::law::ViscosityLaw;

/// Body force presets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForcingPreset {
    Zero,
    /// `amp e^{-t} (sin(a x) sin(2a y), -sin(2a x) sin(a y))`, `a = pi / L`.
    DecayingTwoMode(f64),
    /// Forcing that makes [`manufactured_velocity`] an exact Stokes solution.
    Manufactured(f64),
}

/// Initial velocity presets (all divergence-free with zero trace).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VelocityPreset {
    Zero,
    /// Curl of `amp [s1(x)^2 s1(y)^2 + s2(x)^2 s2(y)^2 / 2]`, `sk = sin(k pi . / L)`.
    Swirl(f64),
    Manufactured(f64),
}

/// Initial temperature presets (nonnegative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemperaturePreset {
    Zero,
    /// `amp sin(pi x / L) sin(pi y / L)`.
    Bump(f64),
}

fn parse_amp(name: &str, rest: &[&str]) -> std::result::Result<f64, String> {
    match rest {
        [a] => a.parse::<f64>().map_err(|e| format!("bad amplitude for {name}: {e}")),
        _ => Err(format!("{name} expects exactly one amplitude")),
    }
}

impl fmt::Display for ForcingPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "zero"),
            Self::DecayingTwoMode(a) => write!(f, "decaying_two_mode {a:?}"),
            Self::Manufactured(a) => write!(f, "manufactured {a:?}"),
        }
    }
}

impl FromStr for ForcingPreset {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        match parts.split_first() {
            Some((&"zero", [])) => Ok(Self::Zero),
            Some((&"decaying_two_mode", r)) => Ok(Self::DecayingTwoMode(parse_amp("decaying_two_mode", r)?)),
            Some((&"manufactured", r)) => Ok(Self::Manufactured(parse_amp("manufactured", r)?)),
            _ => Err(format!("unknown forcing preset '{s}'")),
        }
    }
}

impl fmt::Display for VelocityPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "zero"),
            Self::Swirl(a) => write!(f, "swirl {a:?}"),
            Self::Manufactured(a) => write!(f, "manufactured {a:?}"),
        }
    }
}

impl FromStr for VelocityPreset {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        match parts.split_first() {
            Some((&"zero", [])) => Ok(Self::Zero),
            Some((&"swirl", r)) => Ok(Self::Swirl(parse_amp("swirl", r)?)),
            Some((&"manufactured", r)) => Ok(Self::Manufactured(parse_amp("manufactured", r)?)),
            _ => Err(format!("unknown velocity preset '{s}'")),
        }
    }
}

impl fmt::Display for TemperaturePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "zero"),
            Self::Bump(a) => write!(f, "bump {a:?}"),
        }
    }
}

impl FromStr for TemperaturePreset {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        match parts.split_first() {
            Some((&"zero", [])) => Ok(Self::Zero),
            Some((&"bump", r)) => Ok(Self::Bump(parse_amp("bump", r)?)),
            _ => Err(format!("unknown temperature preset '{s}'")),
        }
    }
}

impl fmt::Display for ViscosityLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Default => write!(f, "default"),
            Self::Constant(m) => write!(f, "constant {m:?}"),
        }
    }
}

impl FromStr for ViscosityLaw {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        match parts.split_first() {
            Some((&"default", [])) => Ok(Self::Default),
            Some((&"constant", r)) => Ok(Self::Constant(parse_amp("constant", r)?)),
            _ => Err(format!("unknown viscosity law '{s}'")),
        }
    }
}

/// `sin^4(a z)` and its first three derivatives.
fn sin4(a: f64, z: f64) -> [f64; 4] {
    let (s, c) = (a * z).sin_cos();
    [
        s.powi(4),
        4.0 * a * s.powi(3) * c,
        4.0 * a * a * (3.0 * s * s * c * c - s.powi(4)),
        4.0 * a.powi(3) * (6.0 * s * c.powi(3) - 10.0 * s.powi(3) * c),
    ]
}

/// Time profile of the manufactured solution and its derivative.
pub fn manufactured_profile(t: f64) -> (f64, f64) {
    let w = 2.0 * PI;
    ((w * t).cos(), -w * (w * t).sin())
}

/// Manufactured velocity: `g(t) curl(sin^4(ax) sin^4(ay))`, `a = pi / L`.
pub fn manufactured_velocity(amp: f64, length: f64, x: f64, y: f64, t: f64) -> [f64; 2] {
    let a = PI / length;
    let (sx, sy) = (sin4(a, x), sin4(a, y));
    let g = amp * manufactured_profile(t).0;
    [g * sx[0] * sy[1], -g * sx[1] * sy[0]]
}

/// Forcing `f = du/dt - (mu/2) Lap u` for the manufactured velocity.
pub fn manufactured_forcing(amp: f64, mu: f64, length: f64, x: f64, y: f64, t: f64) -> [f64; 2] {
    let a = PI / length;
    let (sx, sy) = (sin4(a, x), sin4(a, y));
    let (g, dg) = manufactured_profile(t);
    let (g, dg) = (amp * g, amp * dg);
    let ux = sx[0] * sy[1];
    let uy = -sx[1] * sy[0];
    let lap_x = sx[2] * sy[1] + sx[0] * sy[3];
    let lap_y = -(sx[3] * sy[0] + sx[1] * sy[2]);
    [dg * ux - 0.5 * mu * g * lap_x, dg * uy - 0.5 * mu * g * lap_y]
}

/// Complete problem description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub length: f64,
    pub horizon: f64,
    pub conductivity: f64,
    pub viscosity: ViscosityLaw,
    pub forcing: ForcingPreset,
    /// Integrability margin of the forcing: `f` in `L^{2(1+eps0)}`.
    pub eps0: f64,
    pub u0: VelocityPreset,
    pub theta0: TemperaturePreset,
    pub eps: f64,
    pub nu: f64,
    pub n_vel: usize,
    pub n_temp: usize,
    pub dt: f64,
    pub seed: u64,
    /// Switch for the convective terms (off only for Stokes-limit runs).
    pub convection: bool,
}

impl Scenario {
    /// Benchmark: swirl, nonnegative bump, decaying two-mode force.
    pub fn benchmark() -> Self {
        Self {
            length: 1.0,
            horizon: 0.5,
            conductivity: 0.1,
            viscosity: ViscosityLaw::Default,
            forcing: ForcingPreset::DecayingTwoMode(1.0),
            eps0: 0.25,
            u0: VelocityPreset::Swirl(0.5),
            theta0: TemperaturePreset::Bump(0.5),
            eps: 1e-2,
            nu: 0.05,
            n_vel: 8,
            n_temp: 8,
            dt: 1e-3,
            seed: 1,
            convection: true,
        }
    }

    /// All data zero.
    pub fn zero() -> Self {
        Self {
            forcing: ForcingPreset::Zero,
            u0: VelocityPreset::Zero,
            theta0: TemperaturePreset::Zero,
            ..Self::benchmark()
        }
    }

    /// Constant-viscosity Stokes problem with a known exact velocity.
    pub fn manufactured(n: usize, dt: f64) -> Self {
        Self {
            viscosity: ViscosityLaw::Constant(1.0),
            forcing: ForcingPreset::Manufactured(1.0),
            u0: VelocityPreset::Manufactured(1.0),
            theta0: TemperaturePreset::Zero,
            n_vel: n,
            n_temp: n,
            dt,
            convection: false,
            ..Self::benchmark()
        }
    }

    /// Random small benchmark-like scenario drawn from `seed`.
    pub fn random(seed: u64) -> Self {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Self {
            conductivity: rng.gen_range(0.05..0.2),
            forcing: ForcingPreset::DecayingTwoMode(rng.gen_range(0.0..2.0)),
            u0: VelocityPreset::Swirl(rng.gen_range(0.1..0.8)),
            theta0: TemperaturePreset::Bump(rng.gen_range(0.0..0.8)),
            n_vel: 6,
            n_temp: 6,
            dt: 2e-3,
            seed,
            ..Self::benchmark()
        }
    }

    pub fn with_modes(mut self, n_vel: usize, n_temp: usize) -> Self {
        self.n_vel = n_vel;
        self.n_temp = n_temp;
        self
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn domain(&self) -> Result<Domain2D> {
        Domain2D::for_modes(self.length, self.n_vel.max(self.n_temp))
    }

    pub fn u0_at(&self, x: f64, y: f64) -> [f64; 2] {
        let a = PI / self.length;
        match self.u0 {
            VelocityPreset::Zero => [0.0, 0.0],
            VelocityPreset::Swirl(amp) => {
                // psi = amp [sin^2(ax) sin^2(ay) + sin^2(2ax) sin^2(2ay) / 2], u = (psi_y, -psi_x)
                let s = |k: f64, z: f64| (k * a * z).sin().powi(2);
                let ds = |k: f64, z: f64| k * a * (2.0 * k * a * z).sin();
                [
                    amp * (s(1.0, x) * ds(1.0, y) + 0.5 * s(2.0, x) * ds(2.0, y)),
                    -amp * (ds(1.0, x) * s(1.0, y) + 0.5 * ds(2.0, x) * s(2.0, y)),
                ]
            }
            VelocityPreset::Manufactured(amp) => manufactured_velocity(amp, self.length, x, y, 0.0),
        }
    }

    pub fn theta0_at(&self, x: f64, y: f64) -> f64 {
        let a = PI / self.length;
        match self.theta0 {
            TemperaturePreset::Zero => 0.0,
            TemperaturePreset::Bump(amp) => amp * (a * x).sin() * (a * y).sin(),
        }
    }

    pub fn forcing_at(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        let a = PI / self.length;
        match self.forcing {
            ForcingPreset::Zero => [0.0, 0.0],
            ForcingPreset::DecayingTwoMode(amp) => {
                let g = amp * (-t).exp();
                [g * (a * x).sin() * (2.0 * a * y).sin(), -g * (2.0 * a * x).sin() * (a * y).sin()]
            }
            ForcingPreset::Manufactured(amp) => {
                manufactured_forcing(amp, self.viscosity.lower(), self.length, x, y, t)
            }
        }
    }

    /// `||f||_{p, Q_T}` by tensor Gauss quadrature in space and time.
    pub fn forcing_norm(&self, p: f64) -> f64 {
        let d = Domain2D::new(self.length, 6, 8).expect("valid domain");
        let (ts, wt) = crate::quadrature::composite_gauss(0.0, self.horizon, 16, 6);
        let mut total = 0.0;
        for (t, w) in ts.iter().zip(&wt) {
            total += w * d.integrate(|x, y| {
                let f = self.forcing_at(x, y, *t);
                (f[0] * f[0] + f[1] * f[1]).sqrt().powf(p)
            });
        }
        total.powf(1.0 / p)
    }

    /// Parameter ranges and data assumptions (nonnegative initial
    /// temperature, divergence-free zero-trace initial velocity, forcing in
    /// `L^{2(1+eps0)}`).
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("L", self.length),
            ("T", self.horizon),
            ("k", self.conductivity),
            ("eps", self.eps),
            ("nu", self.nu),
            ("dt", self.dt),
            ("eps0", self.eps0),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.n_vel == 0 || self.n_temp == 0 {
            return Err(invalid("N and M must be at least 1"));
        }
        if self.nu >= self.length / 4.0 {
            return Err(invalid(format!("nu = {} must be below L/4", self.nu)));
        }
        let steps = self.horizon / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(invalid(format!("T = {} is not a whole number of steps dt = {}", self.horizon, self.dt)));
        }
        self.viscosity.validate(10_000, self.seed)?;
        if let ForcingPreset::Manufactured(_) = self.forcing {
            if !self.viscosity.is_constant() || self.convection {
                return Err(NsfError::InvalidScenario(
                    "manufactured forcing requires constant viscosity and convection off".into(),
                ));
            }
        }
        let probe: Vec<f64> = (0..=40).map(|i| self.length * i as f64 / 40.0).collect();
        let h = 1e-5 * self.length;
        let mut scale = 0.0f64;
        let mut div_max = 0.0f64;
        for &x in &probe {
            for &y in &probe {
                let th = self.theta0_at(x, y);
                if th < 0.0 {
                    return Err(NsfError::InvalidScenario(format!("initial temperature negative at ({x}, {y})")));
                }
                let u = self.u0_at(x, y);
                scale = scale.max(u[0].abs()).max(u[1].abs());
                let on_edge = x == 0.0 || y == 0.0 || x == self.length || y == self.length;
                if on_edge && (u[0].abs() > 1e-12 || u[1].abs() > 1e-12) {
                    return Err(NsfError::InvalidScenario(format!("initial velocity nonzero on boundary at ({x}, {y})")));
                }
                let (xc, yc) = (x.clamp(h, self.length - h), y.clamp(h, self.length - h));
                let div = (self.u0_at(xc + h, yc)[0] - self.u0_at(xc - h, yc)[0]
                    + self.u0_at(xc, yc + h)[1]
                    - self.u0_at(xc, yc - h)[1])
                    / (2.0 * h);
                div_max = div_max.max(div.abs());
            }
        }
        if div_max > 1e-6 * (1.0 + scale / self.length) {
            return Err(NsfError::InvalidScenario(format!("initial velocity not divergence-free (|div| = {div_max:e})")));
        }
        let fnorm = self.forcing_norm(2.0 * (1.0 + self.eps0));
        if !fnorm.is_finite() {
            return Err(NsfError::InvalidScenario("forcing norm not finite".into()));
        }
        if self.dt > self.eps {
            log::warn!("dt = {} exceeds eps = {}: explicit pressure coupling may be unstable", self.dt, self.eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        Scenario::benchmark().validate().unwrap();
        Scenario::zero().validate().unwrap();
        Scenario::manufactured(4, 1e-3).validate().unwrap();
        for s in 0..5 {
            Scenario::random(s).validate().unwrap();
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut s = Scenario::benchmark();
        s.nu = 0.3;
        assert!(s.validate().is_err());
        let mut s = Scenario::benchmark();
        s.theta0 = TemperaturePreset::Bump(-1.0);
        assert!(matches!(s.validate(), Err(NsfError::InvalidScenario(_))));
        let mut s = Scenario::manufactured(4, 1e-3);
        s.convection = true;
        assert!(s.validate().is_err());
    }

    #[test]
    fn preset_tokens_round_trip() {
        for f in [ForcingPreset::Zero, ForcingPreset::DecayingTwoMode(0.1), ForcingPreset::Manufactured(2.5)] {
            assert_eq!(f.to_string().parse::<ForcingPreset>().unwrap(), f);
        }
        let law = ViscosityLaw::Constant(0.1 + 0.2);
        assert_eq!(law.to_string().parse::<ViscosityLaw>().unwrap(), law);
    }
}
