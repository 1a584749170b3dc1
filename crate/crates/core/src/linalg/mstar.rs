//! The minimal non-singular submatrix `M*`.
//!
//! `V(M)` keeps every row that is independent of the rows above it, `H(M)`
//! every column independent of the columns to its left. Iterating the two
//! in either order gives the same square pattern of size `rank M`, which is
//! the common minimum of the row and column preorders among all submatrices
//! of full rank.

use crate::error::{Error, Result};

use super::{
    preorder_cols, preorder_rows, rank, IncrementalBasis, RationalMatrix, SubmatrixPattern,
};

/// Largest side accepted by [`brute_force_minimal`].
pub const BRUTE_FORCE_LIMIT: usize = 7;

fn greedy_independent(vectors: impl Iterator<Item = Vec<crate::rational::Rational>>) -> Vec<usize> {
    let mut basis = IncrementalBasis::new();
    vectors
        .enumerate()
        .filter_map(|(k, v)| basis.insert(&v).then_some(k))
        .collect()
}

/// All columns; the rows independent of the rows above them.
pub fn v_construction(m: &RationalMatrix) -> SubmatrixPattern {
    let rows = greedy_independent((0..m.rows()).map(|i| m.row(i).to_vec()));
    SubmatrixPattern::new(rows, (0..m.cols()).collect()).expect("greedy rows are increasing")
}

/// All rows; the columns independent of the columns to their left.
pub fn h_construction(m: &RationalMatrix) -> SubmatrixPattern {
    let cols = greedy_independent((0..m.cols()).map(|j| m.column(j)));
    SubmatrixPattern::new((0..m.rows()).collect(), cols).expect("greedy columns are increasing")
}

/// Applies `inner` to the submatrix selected by `outer`, mapping the
/// resulting indices back to `m`.
fn compose(
    m: &RationalMatrix,
    outer: &SubmatrixPattern,
    inner: fn(&RationalMatrix) -> SubmatrixPattern,
) -> SubmatrixPattern {
    let sub = m.submatrix(outer);
    let local = inner(&sub);
    SubmatrixPattern::new(
        local.rows().iter().map(|&i| outer.rows()[i]).collect(),
        local.cols().iter().map(|&j| outer.cols()[j]).collect(),
    )
    .expect("composition preserves order")
}

/// `HV(M)`: columns chosen inside the rows chosen by `V`.
pub fn hv_construction(m: &RationalMatrix) -> SubmatrixPattern {
    compose(m, &v_construction(m), h_construction)
}

/// `VH(M)`.
pub fn vh_construction(m: &RationalMatrix) -> SubmatrixPattern {
    compose(m, &h_construction(m), v_construction)
}

/// `M* = HV(M)`. Also computes `VH(M)` and panics if the two differ,
/// which can only come from an arithmetic bug.
pub fn minimal_submatrix(m: &RationalMatrix) -> SubmatrixPattern {
    let hv = hv_construction(m);
    let vh = vh_construction(m);
    assert_eq!(hv, vh, "HV(M) and VH(M) disagree for\n{m}");
    hv
}

/// Independent characterization of `M*` through prefix ranks: row `i` is
/// selected iff it raises the rank of the rows above it, and likewise for
/// columns. Uses elimination on each prefix rather than the greedy basis.
pub fn spanning_characterization(m: &RationalMatrix) -> SubmatrixPattern {
    let prefix_rank = |rows: usize, cols: usize| {
        rank(&m.select(
            &(0..rows).collect::<Vec<_>>(),
            &(0..cols).collect::<Vec<_>>(),
        ))
    };
    let rows = (0..m.rows())
        .filter(|&i| prefix_rank(i + 1, m.cols()) > prefix_rank(i, m.cols()))
        .collect();
    let cols = (0..m.cols())
        .filter(|&j| prefix_rank(m.rows(), j + 1) > prefix_rank(m.rows(), j))
        .collect();
    SubmatrixPattern::new(rows, cols).expect("filtered indices are increasing")
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exhaustive search for the common `≼_R`/`≼_C` minimum among the
/// non-singular square submatrices of size `rank M`. Refuses matrices
/// larger than [`BRUTE_FORCE_LIMIT`] on either side.
///
/// Larger singular submatrices of rank `rank M` are not candidates: the
/// minimum is in general not `≼_R` below them (see the tests).
pub fn brute_force_minimal(m: &RationalMatrix) -> Result<SubmatrixPattern> {
    if m.rows() > BRUTE_FORCE_LIMIT || m.cols() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            rows: m.rows(),
            cols: m.cols(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let target = rank(m);
    let mut candidates = Vec::new();
    for rows in subsets(m.rows(), target) {
        for cols in subsets(m.cols(), target) {
            if rank(&m.select(&rows, &cols)) == target {
                candidates
                    .push(SubmatrixPattern::new(rows.clone(), cols).expect("subsets are sorted"));
            }
        }
    }
    let minima: Vec<&SubmatrixPattern> = candidates
        .iter()
        .filter(|n| {
            candidates
                .iter()
                .all(|other| preorder_rows(n, other) && preorder_cols(n, other))
        })
        .collect();
    match minima.as_slice() {
        [unique] => Ok((*unique).clone()),
        [] => Err(Error::Invariant("no common minimal submatrix".into())),
        _ => Err(Error::Invariant(format!(
            "{} common minimal submatrices",
            minima.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det;
    use num_traits::Zero;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64(rows)
    }

    fn pat(rows: &[usize], cols: &[usize]) -> SubmatrixPattern {
        SubmatrixPattern::from_one_based(rows, cols).unwrap()
    }

    #[test]
    fn v_examples() {
        assert_eq!(
            v_construction(&m(&[&[1, 2], &[2, 4], &[0, 1]])).rows_one_based(),
            vec![1, 3]
        );
        assert!(v_construction(&RationalMatrix::zeros(3, 2))
            .rows()
            .is_empty());
        assert_eq!(
            v_construction(&RationalMatrix::identity(3)).rows_one_based(),
            vec![1, 2, 3]
        );
    }

    #[test]
    fn h_is_transposed_v() {
        let a = m(&[&[1, 2], &[2, 4], &[0, 1]]).transpose();
        assert_eq!(h_construction(&a).cols_one_based(), vec![1, 3]);
        assert_eq!(h_construction(&a).rows_one_based(), vec![1, 2]);
        assert!(h_construction(&RationalMatrix::zeros(2, 3))
            .cols()
            .is_empty());
        assert_eq!(
            h_construction(&RationalMatrix::identity(3)).cols_one_based(),
            vec![1, 2, 3]
        );
    }

    #[test]
    fn mstar_examples() {
        let cases: [(RationalMatrix, SubmatrixPattern); 3] = [
            (m(&[&[1, 2], &[2, 4]]), pat(&[1], &[1])),
            (m(&[&[0, 1], &[1, 0]]), pat(&[1, 2], &[1, 2])),
            (
                m(&[&[0, 0, 1], &[0, 0, 2], &[1, 0, 3]]),
                pat(&[1, 3], &[1, 3]),
            ),
        ];
        for (a, expected) in cases {
            assert_eq!(minimal_submatrix(&a), expected);
            assert_eq!(brute_force_minimal(&a).unwrap(), expected);
            assert_eq!(spanning_characterization(&a), expected);
        }
    }

    #[test]
    fn brute_force_small_cases() {
        assert_eq!(brute_force_minimal(&m(&[&[5]])).unwrap(), pat(&[1], &[1]));
        assert_eq!(
            brute_force_minimal(&m(&[&[0]])).unwrap(),
            SubmatrixPattern::empty()
        );
        assert_eq!(minimal_submatrix(&m(&[&[0]])), SubmatrixPattern::empty());
        assert_eq!(
            minimal_submatrix(&RationalMatrix::zeros(0, 0)),
            SubmatrixPattern::empty()
        );
        let big = RationalMatrix::zeros(8, 2);
        assert!(matches!(
            brute_force_minimal(&big),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn larger_singular_submatrix_is_not_dominated() {
        // rank 2, M* = {1,3}x{1,3}; the whole 3x3 matrix also has rank 2
        // but its second row index is 2 < 3.
        let a = m(&[&[0, 0, 1], &[0, 0, 2], &[1, 0, 3]]);
        let whole = SubmatrixPattern::full(3, 3);
        assert_eq!(rank(&a), 2);
        assert!(!preorder_rows(&minimal_submatrix(&a), &whole));
    }

    mod props {
        use super::*;
        use crate::rational::int;
        use proptest::prelude::*;

        fn sized() -> impl Strategy<Value = RationalMatrix> {
            (1usize..=5, 1usize..=6).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-3i64..=3, r * c)
                    .prop_map(move |v| RationalMatrix::from_fn(r, c, |i, j| int(v[i * c + j])))
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]
            #[test]
            fn greedy_matches_oracles(a in sized()) {
                let star = minimal_submatrix(&a);
                prop_assert_eq!(&star, &brute_force_minimal(&a).unwrap());
                prop_assert_eq!(&star, &spanning_characterization(&a));
                prop_assert!(star.is_square());
                prop_assert_eq!(star.rows().len(), rank(&a));
                prop_assert!(!det(&a.submatrix(&star)).unwrap().is_zero());
            }
        }
    }
}
