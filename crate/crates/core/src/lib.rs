//! Exact linear algebra for multifiltered vector spaces, their Rees modules,
//! bigraded complexes and the bundles built from them.

pub mod audit;
pub mod complex;
pub mod connection;
pub mod degree;
pub mod error;
pub mod favb;
pub mod graded;
pub mod io;
pub mod matrix;
pub mod models;
pub mod multifilt;
pub mod report;
pub mod scalar;
pub mod subspace;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::Scalar;
pub use subspace::Subspace;
