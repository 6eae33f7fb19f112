//! Linearly stabilized time integration for stiff nonlinear PDEs.
//!
//! A stiff right-hand side `F(u)` is split as `N(u) + g(u)` with
//! `g(u) = p L u` for a simple linear operator `L`; `N` is advanced explicitly
//! and `g` implicitly (IMEX multistep, Richardson-extrapolated SBDF1) or
//! exactly (exponential Runge-Kutta). The stability lab computes, for each
//! scheme, the range of the ratio `pbar` that makes the split unconditionally
//! stable.

pub mod error;
pub mod fft;
pub mod grid;
pub mod harness;
pub mod linsolve;
pub mod operators;
pub mod problems;
pub mod scheme;
pub mod stability;
pub mod steppers;

pub use error::{Error, Result};
pub use grid::{BoundaryData, BoundaryKind, Field, Grid};
pub use scheme::Scheme;
