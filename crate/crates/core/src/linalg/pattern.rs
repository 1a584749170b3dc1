use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

/// Row and column index sets of a submatrix, both strictly increasing.
///
/// Indices are 0-based in memory and 1-based in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SubmatrixPattern {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

fn strictly_increasing(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl SubmatrixPattern {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if !strictly_increasing(&rows) || !strictly_increasing(&cols) {
            return Err(invalid("pattern indices must be strictly increasing"));
        }
        Ok(SubmatrixPattern { rows, cols })
    }

    /// From 1-based index lists.
    pub fn from_one_based(rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.contains(&0) || cols.contains(&0) {
            return Err(invalid("1-based pattern contains index 0"));
        }
        Self::new(
            rows.iter().map(|i| i - 1).collect(),
            cols.iter().map(|j| j - 1).collect(),
        )
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The whole `rows × cols` matrix.
    pub fn full(rows: usize, cols: usize) -> Self {
        SubmatrixPattern {
            rows: (0..rows).collect(),
            cols: (0..cols).collect(),
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn rows_one_based(&self) -> Vec<usize> {
        self.rows.iter().map(|i| i + 1).collect()
    }

    pub fn cols_one_based(&self) -> Vec<usize> {
        self.cols.iter().map(|j| j + 1).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() && self.cols.is_empty()
    }

    pub fn fits(&self, rows: usize, cols: usize) -> bool {
        self.rows.last().is_none_or(|&i| i < rows) && self.cols.last().is_none_or(|&j| j < cols)
    }

    /// Rows and columns of a `rows × cols` matrix not used by this pattern.
    pub fn complement(&self, rows: usize, cols: usize) -> Self {
        SubmatrixPattern {
            rows: (0..rows).filter(|i| !self.rows.contains(i)).collect(),
            cols: (0..cols).filter(|j| !self.cols.contains(j)).collect(),
        }
    }

    /// This pattern with one extra row and column inserted in order.
    pub fn bordered(&self, row: usize, col: usize) -> Self {
        let mut rows = self.rows.clone();
        let mut cols = self.cols.clone();
        if let Err(pos) = rows.binary_search(&row) {
            rows.insert(pos, row);
        }
        if let Err(pos) = cols.binary_search(&col) {
            cols.insert(pos, col);
        }
        SubmatrixPattern { rows, cols }
    }
}

fn dominated(first: &[usize], second: &[usize]) -> bool {
    first.len() <= second.len() && first.iter().zip(second).all(|(a, b)| a <= b)
}

/// `N1 ≼_R N2`: `N1` has no more rows and its k-th row index never exceeds
/// that of `N2`.
pub fn preorder_rows(n1: &SubmatrixPattern, n2: &SubmatrixPattern) -> bool {
    dominated(&n1.rows, &n2.rows)
}

/// `N1 ≼_C N2`, the column analogue of [`preorder_rows`].
pub fn preorder_cols(n1: &SubmatrixPattern, n2: &SubmatrixPattern) -> bool {
    dominated(&n1.cols, &n2.cols)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternRepr {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Serialize for SubmatrixPattern {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        PatternRepr {
            rows: self.rows_one_based(),
            cols: self.cols_one_based(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SubmatrixPattern {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = PatternRepr::deserialize(de)?;
        SubmatrixPattern::from_one_based(&repr.rows, &repr.cols).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: &[usize]) -> SubmatrixPattern {
        SubmatrixPattern::from_one_based(r, &[]).unwrap()
    }

    #[test]
    fn preorder_examples() {
        assert!(preorder_rows(&rows(&[1, 3]), &rows(&[2, 3])));
        assert!(!preorder_rows(&rows(&[2]), &rows(&[1, 5])));
        let n = SubmatrixPattern::from_one_based(&[2, 4], &[1, 3]).unwrap();
        assert!(preorder_rows(&n, &n));
        assert!(preorder_cols(&n, &n));
        assert!(!preorder_rows(&rows(&[1, 2]), &rows(&[1])));
    }

    #[test]
    fn rejects_unsorted() {
        assert!(SubmatrixPattern::new(vec![2, 1], vec![]).is_err());
        assert!(SubmatrixPattern::new(vec![1, 1], vec![]).is_err());
        assert!(SubmatrixPattern::from_one_based(&[0], &[]).is_err());
    }

    #[test]
    fn complement_and_border() {
        let p = SubmatrixPattern::from_one_based(&[1, 3], &[2]).unwrap();
        let c = p.complement(4, 3);
        assert_eq!(c.rows_one_based(), vec![2, 4]);
        assert_eq!(c.cols_one_based(), vec![1, 3]);
        let b = p.bordered(1, 0);
        assert_eq!(b.rows_one_based(), vec![1, 2, 3]);
        assert_eq!(b.cols_one_based(), vec![1, 2]);
        assert!(p.fits(3, 2));
        assert!(!p.fits(2, 2));
    }

    #[test]
    fn json_is_one_based() {
        let p = SubmatrixPattern::new(vec![0], vec![0, 2]).unwrap();
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"rows":[1],"cols":[1,3]}"#
        );
        let back: SubmatrixPattern = serde_json::from_str(r#"{"rows":[1],"cols":[1,3]}"#).unwrap();
        assert_eq!(back, p);
    }
}
