//! Fraction-free elimination over the integers, applied to rational
//! matrices after clearing denominators row by row.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::rational::{self, Rational};

use super::RationalMatrix;

/// Scales each row by the lcm of its denominators. Returns the integer
/// matrix (row-major, as rows) and the product of the scale factors.
fn integerize(m: &RationalMatrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale_product = BigInt::one();
    let rows = (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            let ints = row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
            scale_product *= &lcm;
            ints
        })
        .collect();
    (rows, scale_product)
}

/// Bareiss echelon reduction in place. Returns the rank and the parity of
/// the row swaps performed.
fn bareiss(a: &mut [Vec<BigInt>], cols: usize) -> (usize, bool) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut odd_swaps = false;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        if pivot != rank {
            a.swap(pivot, rank);
            odd_swaps = !odd_swaps;
        }
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot_val = pivot_row[col].clone();
        for row in tail.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..cols {
                let v = &pivot_val * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot_val;
        rank += 1;
    }
    (rank, odd_swaps)
}

/// Exact rank over the rationals.
pub fn rank(m: &RationalMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let (mut a, _) = integerize(m);
    bareiss(&mut a, m.cols()).0
}

/// Exact determinant; the empty matrix has determinant 1.
pub fn det(m: &RationalMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(invalid(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let size = m.rows();
    if size == 0 {
        return Ok(rational::one());
    }
    let (mut a, scale) = integerize(m);
    let (rank, odd_swaps) = bareiss(&mut a, size);
    if rank < size {
        return Ok(rational::zero());
    }
    let mut d = a[size - 1][size - 1].clone();
    if odd_swaps {
        d = -d;
    }
    Ok(Rational::new(d, scale))
}

/// A basis of the right null space `{x : M x = 0}`, one vector per free
/// column of the reduced row echelon form.
pub fn nullspace(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    let cols = m.cols();
    let mut a = m.to_rows();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][col].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &factor * pv;
            }
        }
        pivots.push(col);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![rational::zero(); cols];
            v[free] = rational::one();
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[k][free].clone();
            }
            v
        })
        .collect()
}

/// Greedy row basis: vectors are reduced against previously accepted ones.
#[derive(Debug, Clone, Default)]
pub struct IncrementalBasis {
    // (pivot position, normalized vector)
    rows: Vec<(usize, Vec<Rational>)>,
}

impl IncrementalBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let factor = v[*pivot].clone();
            for (x, b) in v.iter_mut().zip(row) {
                *x -= &factor * b;
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v` when it is outside the current span; returns whether it was added.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let mut v = self.reduce(v);
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        // keep earlier rows reduced at the new pivot so `reduce` stays one pass
        for (_, row) in self.rows.iter_mut() {
            if !row[pivot].is_zero() {
                let factor = row[pivot].clone();
                for (x, b) in row.iter_mut().zip(&v) {
                    *x -= &factor * b;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64(rows)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&RationalMatrix::zeros(0, 0)), 0);
        assert_eq!(rank(&m(&[&[0, 1], &[1, 0], &[1, 1]])), 2);
        assert_eq!(rank(&RationalMatrix::zeros(3, 4)), 0);
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&RationalMatrix::identity(3)).unwrap(), int(1));
        assert_eq!(det(&m(&[&[1, 2], &[2, 4]])).unwrap(), int(0));
        assert_eq!(det(&m(&[&[2, 1], &[1, 1]])).unwrap(), int(1));
        assert_eq!(det(&RationalMatrix::zeros(0, 0)).unwrap(), int(1));
        assert!(det(&m(&[&[1, 2]])).is_err());
    }

    #[test]
    fn det_with_swaps_and_fractions() {
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])).unwrap(), int(-1));
        let a = RationalMatrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(1, 4), ratio(1, 5)],
        ])
        .unwrap();
        // 1/10 - 1/12 = 1/60
        assert_eq!(det(&a).unwrap(), ratio(1, 60));
        let b = m(&[&[0, 0, 1], &[0, 2, 3], &[4, 5, 6]]);
        assert_eq!(det(&b).unwrap(), int(-8));
    }

    /// Leibniz expansion, used as an independent determinant oracle.
    fn leibniz(a: &RationalMatrix) -> Rational {
        fn perms(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(k - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, k - 1);
                    out.push(q);
                }
            }
            out
        }
        let size = a.rows();
        perms(size)
            .into_iter()
            .map(|p| {
                let inversions = (0..size)
                    .flat_map(|i| (i + 1..size).map(move |j| (i, j)))
                    .filter(|&(i, j)| p[i] > p[j])
                    .count();
                let prod = (0..size).fold(rational::one(), |acc, i| acc * a.get(i, p[i]));
                if inversions % 2 == 0 {
                    prod
                } else {
                    -prod
                }
            })
            .fold(rational::zero(), |acc, t| acc + t)
    }

    #[test]
    fn nullspace_is_kernel() {
        let a = m(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let basis = nullspace(&a);
        assert_eq!(basis.len(), 4 - rank(&a));
        for v in &basis {
            let col = RationalMatrix::from_columns(4, std::slice::from_ref(v)).unwrap();
            assert!(a.mul(&col).unwrap().is_zero());
        }
        assert_eq!(nullspace(&RationalMatrix::identity(3)).len(), 0);
        assert_eq!(nullspace(&RationalMatrix::zeros(2, 3)).len(), 3);
    }

    #[test]
    fn incremental_basis_tracks_span() {
        let mut b = IncrementalBasis::new();
        assert!(b.insert(&[int(1), int(2), int(0)]));
        assert!(!b.insert(&[int(2), int(4), int(0)]));
        assert!(b.insert(&[int(0), int(1), int(1)]));
        assert!(b.contains(&[int(1), int(3), int(1)]));
        assert!(!b.contains(&[int(0), int(0), int(1)]));
        assert!(!b.insert(&[int(0), int(0), int(0)]));
        assert_eq!(b.len(), 2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
            proptest::collection::vec(-3i64..=3, rows * cols)
                .prop_map(move |v| RationalMatrix::from_fn(rows, cols, |i, j| int(v[i * cols + j])))
        }

        fn sized() -> impl Strategy<Value = RationalMatrix> {
            (0usize..=5, 0usize..=6).prop_flat_map(|(r, c)| matrix(r, c))
        }

        proptest! {
            #[test]
            fn rank_of_transpose(a in sized()) {
                prop_assert_eq!(rank(&a), rank(&a.transpose()));
            }

            #[test]
            fn det_matches_leibniz(a in (0usize..=4).prop_flat_map(|k| matrix(k, k))) {
                prop_assert_eq!(det(&a).unwrap(), leibniz(&a));
            }

            #[test]
            fn det_multiplicative(a in matrix(3, 3), b in matrix(3, 3)) {
                let ab = a.mul(&b).unwrap();
                prop_assert_eq!(det(&ab).unwrap(), det(&a).unwrap() * det(&b).unwrap());
            }

            #[test]
            fn incremental_rank_agrees(a in sized()) {
                let mut basis = IncrementalBasis::new();
                for i in 0..a.rows() {
                    basis.insert(a.row(i));
                }
                prop_assert_eq!(basis.len(), rank(&a));
            }
        }
    }
}
