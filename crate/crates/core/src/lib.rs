//! Milnor operations on `H*((Z/p)^k; F_p)` and non-liftability certificates
//! for the Brown-Peterson tower.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod milnor;
pub mod obstruction;
pub mod steenrod;

pub use algebra::{Context, Degree, Element, Monomial};
pub use error::{Error, Result};
