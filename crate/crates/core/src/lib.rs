//! Joint operator norms, best approximation from diagonal subspaces,
//! Birkhoff-James orthogonality and one-sided derivatives for tuples of
//! finite-dimensional operators between ℓ_p spaces.

pub mod approx;
pub mod config;
pub mod derivatives;
pub mod error;
pub mod linops;
pub mod io;
pub mod normcalc;
pub mod report;
pub mod spaces;
pub mod theorems;

pub use config::Config;
pub use error::{Error, Result};
pub use linops::{DiagonalAction, Matrix, Operator, OperatorTuple};
pub use spaces::{Exponent, Field, LpSpace, Vector, C64};
