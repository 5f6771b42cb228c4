//! Temperature-dependent viscosity laws.

use crate::error::{invalid, Result};

/// Bounded continuous viscosity `mu_lo <= mu(s) <= mu_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViscosityLaw {
    /// `mu(s) = 1 + 1 / (1 + s^2)`, bounds `[1, 2]`.
    Default,
    Constant(f64),
}

impl ViscosityLaw {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            ViscosityLaw::Default => 1.0 + 1.0 / (1.0 + s * s),
            ViscosityLaw::Constant(m) => m,
        }
    }

    pub fn lower(&self) -> f64 {
        match *self {
            ViscosityLaw::Default => 1.0,
            ViscosityLaw::Constant(m) => m,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            ViscosityLaw::Default => 2.0,
            ViscosityLaw::Constant(m) => m,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ViscosityLaw::Constant(_))
    }

    /// Check the declared bounds on `samples` uniform draws from `[-1e6, 1e6]`
    /// plus a fine grid near the origin, and a slope bound on that grid.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<()> {
        use rand::{Rng, SeedableRng};
        let (lo, hi) = (self.lower(), self.upper());
        if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
            return Err(invalid(format!("viscosity bounds must satisfy 0 < lo <= hi, got [{lo}, {hi}]")));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let check = |s: f64| {
            let m = self.eval(s);
            if !(m >= lo && m <= hi) {
                return Err(invalid(format!("mu({s}) = {m} outside [{lo}, {hi}]")));
            }
            Ok(())
        };
        for _ in 0..samples {
            check(rng.gen_range(-1e6..1e6))?;
        }
        let h = 1e-3;
        let mut prev = self.eval(-10.0);
        for i in 1..=20_000 {
            let s = -10.0 + i as f64 * h;
            check(s)?;
            let m = self.eval(s);
            if ((m - prev) / h).abs() > 1e3 {
                return Err(invalid(format!("viscosity law not continuous near s = {s}")));
            }
            prev = m;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_law_respects_bounds() {
        let law = ViscosityLaw::Default;
        law.validate(10_000, 7).unwrap();
        assert_eq!(law.eval(0.0), 2.0);
        assert!((law.eval(1e6) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn bad_constant_rejected() {
        assert!(ViscosityLaw::Constant(0.0).validate(10, 1).is_err());
        assert!(ViscosityLaw::Constant(0.7).validate(100, 1).is_ok());
    }
}
