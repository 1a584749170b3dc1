//! Multi-indices, jet coordinates `y^s_α`, and jet-bundle dimension counts.
//!
//! Coordinates of one level are ordered so that `y^s_α` precedes
//! `y^{s'}_{α'}` when `s > s'`, or when `s = s'` and `α` is
//! lexicographically greater than `α'`. Every ordered list of coordinates
//! in this crate follows that rule.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A multi-index `α = (α_1, …, α_n)` with non-negative entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("a multi-index needs at least one entry"));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n.max(1)])
    }

    /// The unit multi-index `δ_j` (1-based axis).
    pub fn delta(n: usize, axis: usize) -> Result<Self> {
        MultiIndex::zero(n).add_delta(axis)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α| = Σ α_h`.
    pub fn length(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    /// `α + δ_j` for a 1-based axis `j`.
    pub fn add_delta(&self, axis: usize) -> Result<Self> {
        self.check_axis(axis)?;
        let mut entries = self.0.clone();
        entries[axis - 1] += 1;
        Ok(MultiIndex(entries))
    }

    /// `α − δ_j`; fails when `α_j = 0`.
    pub fn sub_delta(&self, axis: usize) -> Result<Self> {
        self.check_axis(axis)?;
        let mut entries = self.0.clone();
        if entries[axis - 1] == 0 {
            return Err(invalid(format!("entry {axis} of {self} is zero")));
        }
        entries[axis - 1] -= 1;
        Ok(MultiIndex(entries))
    }

    /// `α!` as a product of factorials.
    pub fn factorial(&self) -> num_bigint::BigInt {
        let mut acc = num_bigint::BigInt::from(1u32);
        for &a in &self.0 {
            for k in 2..=a {
                acc *= k;
            }
        }
        acc
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis == 0 || axis > self.0.len() {
            return Err(invalid(format!(
                "axis {axis} out of range 1..={}",
                self.0.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// A jet coordinate `y^s_α`, `s` being 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JetCoordinate {
    #[serde(rename = "s")]
    pub component: usize,
    #[serde(rename = "alpha")]
    pub index: MultiIndex,
}

impl JetCoordinate {
    pub fn new(component: usize, index: MultiIndex) -> Self {
        JetCoordinate { component, index }
    }

    /// The `"s,α_1,…,α_n"` key used by the jet and polynomial file formats.
    pub fn key(&self) -> String {
        let mut key = self.component.to_string();
        for a in self.index.entries() {
            key.push(',');
            key.push_str(&a.to_string());
        }
        key
    }

    pub fn parse_key(key: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "`{key}` is not a coordinate key of the form s,a1,...,an"
            ))
        };
        let mut parts = key.split(',').map(|p| p.trim().parse::<u32>());
        let s = parts.next().ok_or_else(bad)?.map_err(|_| bad())? as usize;
        let entries = parts
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        if s == 0 || entries.is_empty() {
            return Err(bad());
        }
        Ok(JetCoordinate::new(s, MultiIndex(entries)))
    }
}

impl fmt::Display for JetCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^{}_{}", self.component, self.index)
    }
}

/// Outcome of comparing two coordinates of the same level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordOrder {
    Precedes,
    Equal,
    Follows,
}

/// Total order on coordinates; `Less` means "strictly precedes".
///
/// Callers are expected to pass coordinates with the same `n` and `|α|`;
/// see [`compare_coordinates`] for the checked form.
pub fn coordinate_cmp(c1: &JetCoordinate, c2: &JetCoordinate) -> Ordering {
    c2.component
        .cmp(&c1.component)
        .then_with(|| c2.index.entries().cmp(c1.index.entries()))
}

pub fn compare_coordinates(c1: &JetCoordinate, c2: &JetCoordinate) -> Result<CoordOrder> {
    if c1.index.dim() != c2.index.dim() {
        return Err(invalid(format!(
            "multi-indices of different dimension: {} vs {}",
            c1.index, c2.index
        )));
    }
    if c1.index.length() != c2.index.length() {
        return Err(invalid(format!(
            "multi-indices of different length: {} vs {}",
            c1.index, c2.index
        )));
    }
    Ok(match coordinate_cmp(c1, c2) {
        Ordering::Less => CoordOrder::Precedes,
        Ordering::Equal => CoordOrder::Equal,
        Ordering::Greater => CoordOrder::Follows,
    })
}

/// All `α ∈ N^n` with `|α| = length`, lexicographically greatest first.
pub fn enumerate_multiindices(n: usize, length: usize) -> Vec<MultiIndex> {
    fn fill(prefix: &mut Vec<u32>, slots: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=remaining).rev() {
            prefix.push(first);
            fill(prefix, slots - 1, remaining - first, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    fill(&mut Vec::with_capacity(n), n, length as u32, &mut out);
    out
}

/// The coordinates `y^s_α`, `|α| = level`, in precedence order.
pub fn level_coordinates(n: usize, q: usize, level: usize) -> Vec<JetCoordinate> {
    let alphas = enumerate_multiindices(n, level);
    (1..=q)
        .rev()
        .flat_map(|s| alphas.iter().map(move |a| JetCoordinate::new(s, a.clone())))
        .collect()
}

/// Checked binomial coefficient.
pub fn binomial(n: usize, k: usize) -> Result<usize> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| overflow(n, k))?
            / (i as u128 + 1);
    }
    usize::try_from(acc).map_err(|_| overflow(n, k))
}

fn overflow(n: usize, k: usize) -> Error {
    Error::InvalidInput(format!("arithmetic overflow computing C({n},{k})"))
}

/// Dimensions of `J^p(R^n, R^q)` and of the fibers `F^k_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetDims {
    pub n: usize,
    pub q: usize,
    pub p: usize,
    pub dim_jet: usize,
    /// `dim F^k_{k-1}` for `k = 0..=p+1`, with `dim F^0_{-1} = q`.
    pub dim_fiber: Vec<usize>,
}

impl JetDims {
    /// `dim J^{p-1}`; equals `n` when `p = 0`.
    pub fn dim_jet_below(&self) -> usize {
        self.dim_jet - self.dim_fiber[self.p]
    }

    /// `dim F^p_{p-1}`, the number of rows of the bottom block.
    pub fn dim_top_fiber(&self) -> usize {
        self.dim_fiber[self.p]
    }

    /// `dim F^{p+1}_p`, the number of fiber variables `z`.
    pub fn dim_next_fiber(&self) -> usize {
        self.dim_fiber[self.p + 1]
    }

    /// Number of `y` values in a p-jet, `q·C(n+p, n)`.
    pub fn jet_value_count(&self) -> usize {
        self.dim_jet - self.n
    }
}

pub fn jet_dims(n: usize, q: usize, p: usize) -> Result<JetDims> {
    if n == 0 || q == 0 {
        return Err(invalid("jet dimensions need n >= 1 and q >= 1"));
    }
    let mut dim_fiber = Vec::with_capacity(p + 2);
    for k in 0..=p + 1 {
        let count = binomial(n + k - 1, k)?
            .checked_mul(q)
            .ok_or_else(|| invalid("arithmetic overflow in fiber dimension"))?;
        dim_fiber.push(count);
    }
    let mut dim_jet = n;
    for d in &dim_fiber[..=p] {
        dim_jet = dim_jet
            .checked_add(*d)
            .ok_or_else(|| invalid("arithmetic overflow in jet dimension"))?;
    }
    Ok(JetDims {
        n,
        q,
        p,
        dim_jet,
        dim_fiber,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn coord(s: usize, v: &[u32]) -> JetCoordinate {
        JetCoordinate::new(s, mi(v))
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_multiindices(1, 3), vec![mi(&[3])]);
        assert_eq!(enumerate_multiindices(2, 0), vec![mi(&[0, 0])]);
        assert_eq!(
            enumerate_multiindices(2, 2),
            vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]
        );
    }

    #[test]
    fn enumerate_matches_exhaustive_sort() {
        // Oracle: every vector in the box, filtered by length, sorted by the comparator.
        for n in 1..=3usize {
            for len in 0..=4u32 {
                let mut all = Vec::new();
                let total = (len as usize + 1).pow(n as u32);
                for code in 0..total {
                    let mut c = code;
                    let mut v = Vec::new();
                    for _ in 0..n {
                        v.push((c % (len as usize + 1)) as u32);
                        c /= len as usize + 1;
                    }
                    if v.iter().sum::<u32>() == len {
                        all.push(coord(1, &v));
                    }
                }
                all.sort_by(coordinate_cmp);
                let expected: Vec<MultiIndex> = all.into_iter().map(|c| c.index).collect();
                assert_eq!(enumerate_multiindices(n, len as usize), expected);
            }
        }
    }

    #[test]
    fn compare_examples() {
        assert_eq!(
            compare_coordinates(&coord(2, &[1, 0]), &coord(1, &[1, 0])).unwrap(),
            CoordOrder::Precedes
        );
        assert_eq!(
            compare_coordinates(&coord(1, &[2, 0]), &coord(1, &[1, 1])).unwrap(),
            CoordOrder::Precedes
        );
        let c = coord(3, &[0, 1, 1]);
        assert_eq!(compare_coordinates(&c, &c).unwrap(), CoordOrder::Equal);
        assert_eq!(
            compare_coordinates(&coord(1, &[0, 2]), &coord(1, &[1, 1])).unwrap(),
            CoordOrder::Follows
        );
    }

    #[test]
    fn compare_rejects_mismatch() {
        assert!(compare_coordinates(&coord(1, &[1, 0]), &coord(1, &[1])).is_err());
        assert!(compare_coordinates(&coord(1, &[1, 0]), &coord(1, &[1, 1])).is_err());
    }

    #[test]
    fn strict_total_order_exhaustive() {
        for n in 1..=3 {
            for len in 0..=3 {
                let coords: Vec<_> = (1..=3).flat_map(|q| level_coordinates(n, q, len)).collect();
                let mut uniq = coords.clone();
                uniq.dedup();
                for a in &uniq {
                    for b in &uniq {
                        let ab = compare_coordinates(a, b).unwrap();
                        let ba = compare_coordinates(b, a).unwrap();
                        assert_eq!(ab == CoordOrder::Equal, a == b);
                        match ab {
                            CoordOrder::Precedes => assert_eq!(ba, CoordOrder::Follows),
                            CoordOrder::Follows => assert_eq!(ba, CoordOrder::Precedes),
                            CoordOrder::Equal => assert_eq!(ba, CoordOrder::Equal),
                        }
                        for c in &uniq {
                            if ab == CoordOrder::Precedes
                                && compare_coordinates(b, c).unwrap() == CoordOrder::Precedes
                            {
                                assert_eq!(
                                    compare_coordinates(a, c).unwrap(),
                                    CoordOrder::Precedes
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn enumerate_counts() {
        for n in 1..=5 {
            for len in 0..=6 {
                assert_eq!(
                    enumerate_multiindices(n, len).len(),
                    binomial(n + len - 1, len).unwrap()
                );
            }
        }
    }

    #[test]
    fn dims_examples() {
        let d = jet_dims(1, 1, 1).unwrap();
        assert_eq!(d.dim_jet, 3);
        assert_eq!(d.dim_fiber[2], 1);
        assert_eq!(jet_dims(2, 1, 1).unwrap().dim_jet, 5);
        let d = jet_dims(2, 3, 0).unwrap();
        assert_eq!(d.dim_jet, 5);
        assert_eq!(d.dim_fiber[1], 6);
        assert_eq!(d.dim_jet_below(), 2);
    }

    #[test]
    fn dims_match_coordinate_counts() {
        for n in 1..=4 {
            for q in 1..=4 {
                for p in 0..=4 {
                    let d = jet_dims(n, q, p).unwrap();
                    let counted: usize = n
                        + (0..=p)
                            .map(|k| level_coordinates(n, q, k).len())
                            .sum::<usize>();
                    assert_eq!(d.dim_jet, counted);
                    assert_eq!(d.dim_jet, n + q * binomial(n + p, n).unwrap());
                    let next = jet_dims(n, q, p + 1).unwrap();
                    assert_eq!(
                        next.dim_jet,
                        d.dim_jet + q * binomial(n + p, n - 1).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn dims_reject_zero_and_overflow() {
        assert!(jet_dims(0, 1, 1).is_err());
        assert!(jet_dims(1, 0, 1).is_err());
        assert!(jet_dims(60, 60, 60).is_err());
    }

    #[test]
    fn add_delta_examples() {
        assert_eq!(mi(&[0, 0]).add_delta(1).unwrap(), mi(&[1, 0]));
        assert_eq!(mi(&[1, 2]).add_delta(2).unwrap(), mi(&[1, 3]));
        assert_eq!(mi(&[3]).add_delta(1).unwrap(), mi(&[4]));
        assert!(mi(&[3]).add_delta(2).is_err());
        assert!(mi(&[3]).add_delta(0).is_err());
    }

    #[test]
    fn coordinate_keys_round_trip() {
        let c = coord(2, &[1, 0, 3]);
        assert_eq!(c.key(), "2,1,0,3");
        assert_eq!(JetCoordinate::parse_key("2, 1,0,3").unwrap(), c);
        assert!(JetCoordinate::parse_key("0,1").is_err());
        assert!(JetCoordinate::parse_key("2").is_err());
    }

    #[test]
    fn json_shape() {
        let c = coord(2, &[1, 0]);
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"s":2,"alpha":[1,0]}"#
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn delta_round_trip(entries in proptest::collection::vec(0u32..6, 1..5), axis_seed in 0usize..100) {
                let alpha = MultiIndex::new(entries).unwrap();
                let axis = axis_seed % alpha.dim() + 1;
                let up = alpha.add_delta(axis).unwrap();
                prop_assert_eq!(up.length(), alpha.length() + 1);
                prop_assert_eq!(up.sub_delta(axis).unwrap(), alpha);
            }
        }
    }
}
