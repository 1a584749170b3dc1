//! The matrix `M_{a,V}(z)`, rank strata `Z^r_{a,V}` of the fiber, and
//! certificates for the determinant systems that cut them out.
//!
//! Row layout of `M_{a,V}(z)`: the chart basis of `T_a J^p` (x-block, then
//! `y^s_α` levels `0..=p`). The first `dim J^{p-1}` rows do not depend on
//! `z`; the last `dim F^p_{p-1}` rows form, on the frame columns, the block
//! `B(z)` whose cell `(i, j)` is the fiber variable `y^{s(i)}_{α(i)+δ_j}`.

mod path;
mod verify;
mod witness;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, mismatch, precondition, Result};
use crate::jet::{jet_frame, CoordinateLayout, FiberPoint, Jet, TangentSubspace};
use crate::linalg::{rank, RationalMatrix};
use crate::multiindex::{jet_dims, level_coordinates, JetCoordinate, JetDims};
use crate::rational::{self, Rational};

pub use path::staircase_path;
pub use verify::{verify_core, Check, VerificationReport};
pub use witness::{degenerate_witness, random_instance, rotate_basis};

/// A triple `(a, V, z0)`: the input of [`verify_core`].
///
/// Construction checks shapes and `codim V ≥ 1`; the transversality
/// hypothesis is checked by the operations that need it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumInstance {
    pub jet: Jet,
    pub v: TangentSubspace,
    pub z0: FiberPoint,
}

impl StratumInstance {
    pub fn new(jet: Jet, v: TangentSubspace, z0: FiberPoint) -> Result<Self> {
        check_shapes(&jet, &v, Some(&z0))?;
        Ok(StratumInstance { jet, v, z0 })
    }

    pub fn dims(&self) -> &JetDims {
        self.jet.dims()
    }

    /// `c = dim J^p − dim V`.
    pub fn codim(&self) -> usize {
        self.dims().dim_jet - self.v.dim()
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    jet: Jet,
    #[serde(rename = "V", with = "rational::serde_rows")]
    v: Vec<Vec<Rational>>,
    z0: FiberPoint,
}

/// `{"jet": …, "V": [[…], …], "z0": …}`. Other top-level fields are ignored,
/// so command output carrying an instance can be read back.
impl Serialize for StratumInstance {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceRepr {
            jet: self.jet.clone(),
            v: self.v.basis().to_vec(),
            z0: self.z0.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for StratumInstance {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = InstanceRepr::deserialize(de)?;
        let v = TangentSubspace::new(repr.jet.dims().dim_jet, repr.v).map_err(D::Error::custom)?;
        StratumInstance::new(repr.jet, v, repr.z0).map_err(D::Error::custom)
    }
}

fn check_shapes(a: &Jet, v: &TangentSubspace, z: Option<&FiberPoint>) -> Result<()> {
    let d = a.dims();
    if v.ambient_dim() != d.dim_jet {
        return Err(mismatch(format!(
            "V lives in dimension {}, but dim J^p = {}",
            v.ambient_dim(),
            d.dim_jet
        )));
    }
    if v.dim() >= d.dim_jet {
        return Err(invalid("V must have codimension at least 1"));
    }
    if let Some(z) = z {
        if (z.n(), z.q(), z.p()) != (d.n, d.q, d.p) {
            return Err(mismatch(format!(
                "fiber point is over (n,q,p) = ({},{},{}), jet is ({},{},{})",
                z.n(),
                z.q(),
                z.p(),
                d.n,
                d.q,
                d.p
            )));
        }
    }
    Ok(())
}

/// `M_{a,V}(z)`: columns are the basis of `V` followed by the frame
/// `∂_{x_j} j^p_x f_z`.
pub fn assemble_m(a: &Jet, v: &TangentSubspace, z: &FiberPoint) -> Result<RationalMatrix> {
    check_shapes(a, v, Some(z))?;
    let mut columns: Vec<Vec<Rational>> = v.basis().to_vec();
    columns.extend(jet_frame(a, z)?);
    RationalMatrix::from_columns(a.dims().dim_jet, &columns)
}

/// Whether `π(V) + E^{p-1}(a)` fills `T J^{p-1}`, i.e. the first
/// `dim J^{p-1}` rows of `M_{a,V}` are independent.
pub fn check_hypothesis(a: &Jet, v: &TangentSubspace) -> Result<bool> {
    check_shapes(a, v, None)?;
    let d = a.dims();
    let z = FiberPoint::zero(d.n, d.q, d.p)?;
    let m = assemble_m(a, v, &z)?;
    let top: Vec<usize> = (0..d.dim_jet_below()).collect();
    let all_cols: Vec<usize> = (0..m.cols()).collect();
    Ok(rank(&m.select(&top, &all_cols)) == d.dim_jet_below())
}

/// Rank of `M_{a,V}(z)` and whether `z` lies in `Z_{a,V}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub rank: usize,
    pub in_z: bool,
}

pub fn classify(a: &Jet, v: &TangentSubspace, z: &FiberPoint) -> Result<Classification> {
    if !check_hypothesis(a, v)? {
        return Err(precondition(
            "pi(V) + E^{p-1}(a) does not fill T J^{p-1}; strata are only classified under this hypothesis",
        ));
    }
    let r = rank(&assemble_m(a, v, z)?);
    Ok(Classification {
        rank: r,
        in_z: r < a.dims().dim_jet,
    })
}

/// Number of independent minor equations for the stratum of rank `r`:
/// `n + 1 − c + 2(dim J^p − 1 − r)`.
pub fn theta(n: usize, q: usize, p: usize, c: usize, r: usize) -> Result<usize> {
    let d = jet_dims(n, q, p)?;
    if c == 0 || c >= d.dim_jet {
        return Err(invalid(format!(
            "codimension c = {c} must lie in 1..{}",
            d.dim_jet
        )));
    }
    let m = d.dim_jet - c;
    if r < m || r >= d.dim_jet || r > m + n {
        return Err(invalid(format!(
            "rank r = {r} outside the stratum range {m}..={} (and r <= m + n = {})",
            d.dim_jet - 1,
            m + n
        )));
    }
    // equals (dim J^p − r) + (m + n − r) − 1, which is non-negative here
    Ok((d.dim_jet - r) + (m + n - r) - 1)
}

/// Maps cells of the bottom-right block `B` to fiber variables.
#[derive(Debug, Clone)]
pub struct CellVariableMap {
    top_rows: usize,
    m: usize,
    n: usize,
    row_coords: Vec<JetCoordinate>,
    fiber: CoordinateLayout,
}

impl CellVariableMap {
    pub fn new(dims: &JetDims, m: usize) -> Self {
        CellVariableMap {
            top_rows: dims.dim_jet_below(),
            m,
            n: dims.n,
            row_coords: level_coordinates(dims.n, dims.q, dims.p),
            fiber: CoordinateLayout::new(dims.n, dims.q, dims.p + 1..=dims.p + 1),
        }
    }

    pub fn in_block(&self, i: usize, j: usize) -> bool {
        i >= self.top_rows
            && i < self.top_rows + self.row_coords.len()
            && j >= self.m
            && j < self.m + self.n
    }

    /// `z_{[i,j]}` for 0-based matrix cell `(i, j)`, if the cell is in `B`.
    pub fn coordinate(&self, i: usize, j: usize) -> Option<JetCoordinate> {
        if !self.in_block(i, j) {
            return None;
        }
        let c = &self.row_coords[i - self.top_rows];
        let index = c
            .index
            .add_delta(j - self.m + 1)
            .expect("frame column within 1..=n");
        Some(JetCoordinate::new(c.component, index))
    }

    /// Position of `z_{[i,j]}` among the fiber coordinates.
    pub fn variable(&self, i: usize, j: usize) -> Option<usize> {
        self.coordinate(i, j).and_then(|c| self.fiber.position(&c))
    }

    pub fn variable_count(&self) -> usize {
        self.fiber.len()
    }

    pub fn rows(&self) -> std::ops::Range<usize> {
        self.top_rows..self.top_rows + self.row_coords.len()
    }

    pub fn cols(&self) -> std::ops::Range<usize> {
        self.m..self.m + self.n
    }
}

/// The unit vector of length `len` at `k`.
pub(crate) fn unit(len: usize, k: usize) -> Vec<Rational> {
    let mut v = vec![rational::zero(); len];
    v[k] = rational::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn fiber1(t: i64) -> FiberPoint {
        FiberPoint::from_values(1, 1, 1, ints(&[t])).unwrap()
    }

    #[test]
    fn instance_json_round_trip() {
        let w = degenerate_witness(2, 1, 1, 1).unwrap();
        let text = serde_json::to_string(&w).unwrap();
        let back: StratumInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["command"] = "witness".into();
        assert_eq!(
            serde_json::from_value::<StratumInstance>(v.clone()).unwrap(),
            w
        );
        v["V"] = serde_json::json!([["1", "0"]]);
        assert!(serde_json::from_value::<StratumInstance>(v).is_err());
    }

    #[test]
    fn assemble_single_direction() {
        let a = Jet::zero(1, 1, 1).unwrap();
        let v = TangentSubspace::new(3, vec![ints(&[0, 1, 0])]).unwrap();
        let m = assemble_m(&a, &v, &fiber1(7)).unwrap();
        assert_eq!(m, RationalMatrix::from_i64(&[&[0, 1], &[1, 0], &[0, 7]]));
        let m0 = assemble_m(&a, &v, &fiber1(0)).unwrap();
        assert_eq!(m0, RationalMatrix::from_i64(&[&[0, 1], &[1, 0], &[0, 0]]));
        assert!(check_hypothesis(&a, &v).unwrap());
    }

    #[test]
    fn assemble_bottom_block_two_variables() {
        let a = Jet::zero(2, 1, 1).unwrap();
        let basis = (0..4).map(|k| unit(5, k)).collect();
        let v = TangentSubspace::new(5, basis).unwrap();
        // z = (y20, y11, y02) = (2, 3, 5)
        let z = FiberPoint::from_values(2, 1, 1, ints(&[2, 3, 5])).unwrap();
        let m = assemble_m(&a, &v, &z).unwrap();
        // bottom rows are y_(1,0), y_(0,1); frame columns are 5 and 6
        assert_eq!(
            m.select(&[3, 4], &[4, 5]),
            RationalMatrix::from_i64(&[&[2, 3], &[3, 5]])
        );
        let cells = CellVariableMap::new(a.dims(), 4);
        assert_eq!(cells.variable(3, 5), Some(1));
        assert_eq!(cells.variable(4, 4), Some(1));
        assert_eq!(cells.variable(3, 4), Some(0));
        assert_eq!(cells.variable(4, 5), Some(2));
        assert_eq!(cells.variable(2, 4), None);
        assert_eq!(cells.variable(3, 3), None);
    }

    #[test]
    fn assemble_rejects_mismatch() {
        let a = Jet::zero(1, 1, 1).unwrap();
        let v = TangentSubspace::new(3, vec![ints(&[0, 1, 0])]).unwrap();
        let z = FiberPoint::zero(2, 1, 1).unwrap();
        assert!(assemble_m(&a, &v, &z).is_err());
        let v4 = TangentSubspace::new(4, vec![ints(&[0, 1, 0, 0])]).unwrap();
        assert!(assemble_m(&a, &v4, &fiber1(0)).is_err());
        let full = TangentSubspace::new(3, (0..3).map(|k| unit(3, k)).collect()).unwrap();
        assert!(StratumInstance::new(a, full, fiber1(0)).is_err());
    }

    #[test]
    fn hypothesis_examples() {
        // p = 2, n = q = 1: T J^1 has (x, y, y'); V only in the bottom block
        let a = Jet::zero(1, 1, 2).unwrap();
        let v = TangentSubspace::new(4, vec![unit(4, 3)]).unwrap();
        assert!(!check_hypothesis(&a, &v).unwrap());
        // p = 0: the frame x-block is the identity, so any V passes
        let a = Jet::zero(2, 1, 0).unwrap();
        let v = TangentSubspace::new(3, vec![unit(3, 2)]).unwrap();
        assert!(check_hypothesis(&a, &v).unwrap());
        let v = TangentSubspace::new(3, vec![unit(3, 0)]).unwrap();
        assert!(check_hypothesis(&a, &v).unwrap());
    }

    #[test]
    fn classify_closed_form_instance() {
        let a = Jet::zero(1, 1, 1).unwrap();
        let v = TangentSubspace::new(3, vec![unit(3, 0), unit(3, 1)]).unwrap();
        assert_eq!(
            classify(&a, &v, &fiber1(1)).unwrap(),
            Classification {
                rank: 3,
                in_z: false
            }
        );
        assert_eq!(
            classify(&a, &v, &fiber1(0)).unwrap(),
            Classification {
                rank: 2,
                in_z: true
            }
        );
        assert_eq!(classify(&a, &v, &fiber1(-5)).unwrap().rank, 3);
    }

    #[test]
    fn classify_requires_hypothesis() {
        let a = Jet::zero(1, 1, 2).unwrap();
        let v = TangentSubspace::new(4, vec![unit(4, 3)]).unwrap();
        let z = FiberPoint::zero(1, 1, 2).unwrap();
        assert!(matches!(
            classify(&a, &v, &z),
            Err(crate::Error::Precondition(_))
        ));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(2, 1, 1, 1, 4).unwrap(), 2);
        assert_eq!(theta(1, 1, 1, 1, 2).unwrap(), 1);
        // r = dim J^p − 1 with c = n gives the minimum count 1
        for (n, q, p) in [(1, 1, 1), (2, 1, 1), (2, 2, 2), (3, 1, 2)] {
            let d = jet_dims(n, q, p).unwrap();
            assert_eq!(theta(n, q, p, n, d.dim_jet - 1).unwrap(), 1);
        }
        assert!(theta(2, 1, 1, 1, 5).is_err());
        assert!(theta(2, 1, 1, 1, 3).is_err());
        assert!(theta(2, 1, 1, 0, 4).is_err());
    }

    #[test]
    fn theta_is_semi_perimeter() {
        for n in 1..=3 {
            for q in 1..=2 {
                for p in 0..=2 {
                    let d = jet_dims(n, q, p).unwrap();
                    for c in 1..d.dim_jet {
                        let m = d.dim_jet - c;
                        for r in m..d.dim_jet.min(m + n + 1) {
                            let formula =
                                n as i64 + 1 - c as i64 + 2 * (d.dim_jet as i64 - 1 - r as i64);
                            assert_eq!(theta(n, q, p, c, r).unwrap() as i64, formula);
                        }
                    }
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn top_rows_do_not_depend_on_z(
                (n, q, p) in (1usize..=2, 1usize..=2, 0usize..=2),
                seed in proptest::collection::vec(-5i64..=5, 64),
            ) {
                let d = jet_dims(n, q, p).unwrap();
                let take = |off: usize, len: usize| -> Vec<Rational> {
                    (0..len).map(|k| int(seed[(off + k) % seed.len()])).collect()
                };
                let a = Jet::from_values(n, q, p, take(0, d.jet_value_count())).unwrap();
                let v = TangentSubspace::new(d.dim_jet, vec![unit(d.dim_jet, d.dim_jet - 1)]).unwrap();
                let z1 = FiberPoint::from_values(n, q, p, take(7, d.dim_next_fiber())).unwrap();
                let z2 = FiberPoint::from_values(n, q, p, take(19, d.dim_next_fiber())).unwrap();
                let m1 = assemble_m(&a, &v, &z1).unwrap();
                let m2 = assemble_m(&a, &v, &z2).unwrap();
                for i in 0..d.dim_jet_below() {
                    prop_assert_eq!(m1.row(i), m2.row(i));
                }
                // and the bottom-right block is exactly z read through the cell map
                let cells = CellVariableMap::new(&d, v.dim());
                for i in cells.rows() {
                    for j in cells.cols() {
                        let var = cells.variable(i, j).unwrap();
                        prop_assert_eq!(m1.get(i, j), &z1.values()[var]);
                    }
                }
            }
        }
    }
}
