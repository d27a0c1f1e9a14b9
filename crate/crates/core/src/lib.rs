pub mod approximation;
pub mod cli;
pub mod corpus;
pub mod equivariant;
pub mod error;
pub mod git;
pub mod group;
pub mod hilbert;
pub mod linalg;
pub mod monomial;
pub mod problem;
pub mod quotient;
pub mod rational;
pub mod selftest;
pub mod stability;

pub use error::{Error, Result};
