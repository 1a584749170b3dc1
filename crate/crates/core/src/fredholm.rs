//! Finite-dimensional model of the restricted projection `k = π|_K`, where
//! `K = ker l` for a surjective linear map `l: F × X → R^c`, and the
//! codimension bookkeeping for images and preimages of rectifiable sets.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, mismatch, precondition, Result};
use crate::linalg::{nullspace, rank, RationalMatrix};
use crate::rational;

/// `l: F × X → R^c` as a `c × (f_dim + n)` matrix, F-block first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSetup {
    pub f_dim: usize,
    pub n: usize,
    pub c: usize,
    #[serde(rename = "L")]
    pub l: RationalMatrix,
}

impl LinearSetup {
    pub fn new(f_dim: usize, n: usize, c: usize, l: RationalMatrix) -> Result<Self> {
        if l.rows() != c || l.cols() != f_dim + n {
            return Err(mismatch(format!(
                "L is {}x{}, expected {c}x{}",
                l.rows(),
                l.cols(),
                f_dim + n
            )));
        }
        Ok(LinearSetup { f_dim, n, c, l })
    }

    /// `l_0 = l|_{0 × X}`.
    pub fn restricted_to_x(&self) -> RationalMatrix {
        let rows: Vec<usize> = (0..self.c).collect();
        let cols: Vec<usize> = (self.f_dim..self.f_dim + self.n).collect();
        self.l.select(&rows, &cols)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub ker_dim: usize,
    pub coker_dim: usize,
    pub index: i64,
    pub k_onto: bool,
    pub l0_onto: bool,
    /// `dim ker l_0`, computed separately from `ker_dim`.
    pub l0_ker_dim: usize,
}

/// Kernel, cokernel and index of `k: K → F`, `(f, x) ↦ f`.
pub fn fredholm_index(setup: &LinearSetup) -> Result<IndexReport> {
    let LinearSetup { f_dim, n, c, .. } = *setup;
    if setup.l.rows() != c || setup.l.cols() != f_dim + n {
        return Err(mismatch("L does not have shape c x (f_dim + n)"));
    }
    if rank(&setup.l) != c {
        return Err(precondition("l is not surjective: rank L < c"));
    }
    let kernel = nullspace(&setup.l);
    // image of K under the projection onto F, and K ∩ (0 × X)
    let (range_dim, ker_dim) = if kernel.is_empty() {
        (0, 0)
    } else {
        let basis = RationalMatrix::from_rows(kernel)?;
        let f_cols: Vec<usize> = (0..f_dim).collect();
        let all_rows: Vec<usize> = (0..basis.rows()).collect();
        let range_dim = rank(&basis.select(&all_rows, &f_cols));
        (range_dim, basis.rows() - range_dim)
    };
    let coker_dim = f_dim - range_dim;
    let l0 = setup.restricted_to_x();
    let l0_rank = rank(&l0);
    let report = IndexReport {
        ker_dim,
        coker_dim,
        index: ker_dim as i64 - coker_dim as i64,
        k_onto: coker_dim == 0,
        l0_onto: l0_rank == c,
        l0_ker_dim: n - l0_rank,
    };
    if report.index != n as i64 - c as i64
        || report.k_onto != report.l0_onto
        || report.ker_dim != report.l0_ker_dim
    {
        return Err(crate::Error::Invariant(format!(
            "inconsistent Fredholm data {report:?}"
        )));
    }
    Ok(report)
}

/// Codimension of the image of a codimension-`d` set under a Fredholm map
/// of index `i`; needs `d ≥ i + 1`.
pub fn codim_pushforward(d: i64, i: i64) -> Result<i64> {
    if d < i + 1 {
        return Err(precondition(format!(
            "pushforward needs d >= i + 1, got d = {d}, i = {i}"
        )));
    }
    Ok(d - i)
}

/// Codimension of the preimage of a codimension-`d` set under a map whose
/// differential has cokernel of dimension at most `k`; needs `k ≤ d − 1`.
pub fn codim_pullback(d: i64, k: i64) -> Result<i64> {
    if k < 0 {
        return Err(invalid("corank bound must be non-negative"));
    }
    if k >= d {
        return Err(precondition(format!(
            "pullback needs k <= d - 1, got d = {d}, k = {k}"
        )));
    }
    Ok(d - k)
}

/// Codimension of the set of maps whose `n`-dimensional jet image meets a
/// codimension-`d` set; needs `n < d`.
pub fn codim_jet_avoidance(d: i64, n: i64) -> Result<i64> {
    if n >= d {
        return Err(precondition(format!(
            "jet avoidance needs n < d, got d = {d}, n = {n}"
        )));
    }
    Ok(d - n)
}

/// A random surjective `l` whose X-block has a randomly chosen rank, so
/// that both `l_0` onto and not onto occur.
pub fn random_surjective_setup(
    rng: &mut impl Rng,
    f_dim: usize,
    n: usize,
    c: usize,
) -> Result<LinearSetup> {
    if c == 0 || c > f_dim + n {
        return Err(invalid(format!("need 1 <= c <= f_dim + n, got c = {c}")));
    }
    let entry = |rng: &mut dyn RngCore| rational::int(rng.random_range(-3..=3));
    loop {
        let min_rank = c.saturating_sub(f_dim);
        let x_rank = rng.random_range(min_rank..=c.min(n));
        // L_X = A·B with A: c × x_rank, B: x_rank × n
        let a = RationalMatrix::from_fn(c, x_rank, |_, _| entry(rng));
        let b = RationalMatrix::from_fn(x_rank, n, |_, _| entry(rng));
        let lx = a.mul(&b)?;
        let lf = RationalMatrix::from_fn(c, f_dim, |_, _| entry(rng));
        let l = RationalMatrix::from_fn(c, f_dim + n, |i, j| {
            if j < f_dim {
                lf.get(i, j).clone()
            } else {
                lx.get(i, j - f_dim).clone()
            }
        });
        if rank(&l) == c {
            return LinearSetup::new(f_dim, n, c, l);
        }
    }
}
