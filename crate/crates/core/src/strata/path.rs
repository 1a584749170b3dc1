use crate::error::{precondition, Result};
use crate::linalg::SubmatrixPattern;

/// Couples along the top row, then down the last column, of the block of
/// rows and columns of a `rows × cols` matrix that `mstar` leaves out.
///
/// The result is non-decreasing in both coordinates and has
/// `|rows| + |cols| − 1` entries (0-based indices into the full matrix).
pub fn staircase_path(
    mstar: &SubmatrixPattern,
    rows: usize,
    cols: usize,
) -> Result<Vec<(usize, usize)>> {
    if !mstar.fits(rows, cols) {
        return Err(precondition("M* pattern does not fit the matrix shape"));
    }
    let hat = mstar.complement(rows, cols);
    let (Some(&first_row), Some(&last_col)) = (hat.rows().first(), hat.cols().last()) else {
        return Err(precondition(
            "the complement of M* is empty: the matrix has full rank in that direction, so the point lies in no stratum",
        ));
    };
    let mut path: Vec<(usize, usize)> = hat.cols().iter().map(|&j| (first_row, j)).collect();
    path.extend(hat.rows()[1..].iter().map(|&i| (i, last_col)));
    Ok(path)
}
