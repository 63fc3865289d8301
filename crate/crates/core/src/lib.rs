//! Finite-field gadgets, grouped graph reductions and exact oracles for
//! gap-amplified clique problems.

pub mod cnf;
pub mod error;
pub mod expander;
pub mod ff;
pub mod grouped;
pub mod ldt;
pub mod oracles;
pub mod pihchain;
pub mod rmcsp;
pub mod scalar;
pub mod vectorsum;

pub use error::{Error, Result};
pub use scalar::{fraction_to_f64, Fraction, Real};
