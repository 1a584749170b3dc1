//! Exact rational linear algebra: matrices, fraction-free elimination, and
//! the minimal non-singular submatrix `M*`.

mod elimination;
mod matrix;
mod mstar;
mod pattern;

pub use elimination::{det, nullspace, rank, IncrementalBasis};
pub use matrix::RationalMatrix;
pub use mstar::{
    brute_force_minimal, h_construction, hv_construction, minimal_submatrix,
    spanning_characterization, v_construction, vh_construction, BRUTE_FORCE_LIMIT,
};
pub use pattern::{preorder_cols, preorder_rows, SubmatrixPattern};
