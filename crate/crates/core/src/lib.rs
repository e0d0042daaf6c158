//! Reverse triangle inequalities in complex inner product spaces: bound
//! evaluators, certificate checking, generators and a command-line front end.

pub mod bounds;
pub mod certify;
pub mod cli;
pub mod error;
pub mod generators;
pub mod linalg;

pub use bounds::{Theorem, TheoremParams, VectorFamily};
pub use certify::{evaluate, BoundCertificate, Instance, Status};
pub use error::{Error, Result};
pub use linalg::{ComplexScalar, FiniteVector, OrthonormalFrame};
