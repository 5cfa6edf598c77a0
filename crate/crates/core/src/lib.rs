//! Minimal and biharmonic isotropy orbits of compact symmetric spaces.
//!
//! The orbit `Ad(K)H` of a unit vector `H` in the fundamental chamber is
//! described entirely by the restricted root system `Σ` with multiplicities
//! `m(λ)`. This crate builds such root systems exactly ([`rootsys`],
//! [`catalog`]), enumerates the chamber cells ([`chamber`]), evaluates tension
//! and bitension vectors ([`orbitgeom`]), solves for minimal and biharmonic
//! orbits ([`solver`]) and handles the two-factor product construction
//! ([`products`]).
//!
//! Geometry is generic over [`Real`] (`f32` or `f64`); root data stays in
//! exact [`Rational`] coordinates. The `*64` / `*32` aliases below fix the
//! scalar type.

pub mod catalog;
pub mod chamber;
pub mod error;
pub mod linalg;
pub mod orbitgeom;
pub mod products;
mod realized;
pub mod rootsys;
pub mod scalar;
pub mod solver;

pub use chamber::{cells, point_from_coordinates, vanishing_roots, Cell, CellPoint};
pub use error::{Error, Result};
pub use orbitgeom::{Classification, OrbitReport};
pub use realized::Realized;
pub use rootsys::{build_irreducible, direct_sum, validate, Family, LengthClass, RootSystem};
pub use scalar::{Rational, Real};
pub use solver::{SolveResult, SolveStatus, SolverOptions};

pub type Realized64 = Realized<f64>;
pub type Realized32 = Realized<f32>;
pub type CellPoint64 = CellPoint<f64>;
pub type CellPoint32 = CellPoint<f32>;
pub type OrbitReport64 = OrbitReport<f64>;
pub type OrbitReport32 = OrbitReport<f32>;
pub type SolveResult64 = SolveResult<f64>;
