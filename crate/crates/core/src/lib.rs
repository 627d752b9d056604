//! Numerical toolkit for parameter-elliptic boundary value problems on the
//! half-space: symbol algebra, ellipticity and Shapiro–Lopatinskii checks,
//! parameter-dependent Sobolev norms on a periodic surrogate, exact per-mode
//! model solvers, and the Cahn–Hilliard dynamic boundary resolvent.

pub mod cahn_hilliard;
pub mod ellipticity;
pub mod error;
pub mod halfspace;
pub mod io;
pub mod rng;
pub mod sobolev;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;
