//! Exact computations on jet bundles `J^p(R^n, R^q)` for transversality:
//! jet coordinates and their order, the minimal non-singular submatrix
//! `M*`, the matrix `M_{a,V}(z)` whose rank stratifies the fiber
//! `F^{p+1}_p(a)`, and certificates that the determinant equations cutting
//! out a stratum have independent differentials.

pub mod error;
pub mod experiments;
pub mod fredholm;
pub mod jet;
pub mod linalg;
pub mod multiindex;
pub mod rational;
pub mod strata;
pub mod suite;

pub use error::{Error, Result};
