//! Galerkin solver and verification toolkit for a heat-conducting,
//! temperature-dependent-viscosity incompressible fluid on a square, with
//! penalised pressure and mollified convection.

pub mod basis;
pub mod domain;
pub mod elliptic;
pub mod error;
pub mod galerkin;
pub mod grid;
pub mod inequalities;
pub mod io;
pub mod law;
pub mod mollifier;
pub mod oracles;
pub mod quadrature;
pub mod scenario;

pub use error::{NsfError, Result};
