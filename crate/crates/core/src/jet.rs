//! Polynomial representatives of jets at the chart origin, prolongation,
//! and the tangent vectors `e_j(a)` and `∂_{x_j} j^p_x f_z`.
//!
//! Tangent vectors of `J^p` are written in the chart basis: the `n`
//! x-directions first, then the `y^s_α` directions level by level
//! (`|α| = 0, 1, …, p`), each level in coordinate precedence order.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::{rank, RationalMatrix};
use crate::multiindex::{jet_dims, level_coordinates, JetCoordinate, JetDims, MultiIndex};
use crate::rational::{self, Rational};

/// Ordered coordinates `y^s_α` for a range of levels, with reverse lookup.
#[derive(Debug, Clone)]
pub struct CoordinateLayout {
    coords: Vec<JetCoordinate>,
    index: HashMap<JetCoordinate, usize>,
}

impl CoordinateLayout {
    pub fn new(n: usize, q: usize, levels: std::ops::RangeInclusive<usize>) -> Self {
        let coords: Vec<JetCoordinate> = levels.flat_map(|k| level_coordinates(n, q, k)).collect();
        let index = coords
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, c)| (c, k))
            .collect();
        CoordinateLayout { coords, index }
    }

    pub fn empty() -> Self {
        CoordinateLayout {
            coords: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn coords(&self) -> &[JetCoordinate] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn position(&self, c: &JetCoordinate) -> Option<usize> {
        self.index.get(c).copied()
    }
}

/// `f^s(x) = Σ c^s_α x^α`, so that `∂_α f^s(0) = α!·c^s_α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialMap {
    n: usize,
    q: usize,
    degree: usize,
    coeffs: BTreeMap<(usize, MultiIndex), Rational>,
}

impl PolynomialMap {
    pub fn new(n: usize, q: usize, degree: usize) -> Result<Self> {
        if n == 0 || q == 0 {
            return Err(invalid("polynomial maps need n >= 1 and q >= 1"));
        }
        Ok(PolynomialMap {
            n,
            q,
            degree,
            coeffs: BTreeMap::new(),
        })
    }

    /// Convenience constructor from `(s, α, c)` triples with integer data.
    pub fn from_terms(
        n: usize,
        q: usize,
        degree: usize,
        terms: &[(usize, &[u32], Rational)],
    ) -> Result<Self> {
        let mut f = Self::new(n, q, degree)?;
        for (s, alpha, c) in terms {
            f.set_coefficient(*s, MultiIndex::new(alpha.to_vec())?, c.clone())?;
        }
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn check(&self, s: usize, alpha: &MultiIndex) -> Result<()> {
        if s == 0 || s > self.q {
            return Err(invalid(format!(
                "component {s} out of range 1..={}",
                self.q
            )));
        }
        if alpha.dim() != self.n {
            return Err(mismatch(format!(
                "multi-index {alpha} is not in N^{}",
                self.n
            )));
        }
        if alpha.length() > self.degree {
            return Err(invalid(format!(
                "monomial {alpha} exceeds the degree bound {}",
                self.degree
            )));
        }
        Ok(())
    }

    pub fn set_coefficient(&mut self, s: usize, alpha: MultiIndex, value: Rational) -> Result<()> {
        self.check(s, &alpha)?;
        if value.is_zero() {
            self.coeffs.remove(&(s, alpha));
        } else {
            self.coeffs.insert((s, alpha), value);
        }
        Ok(())
    }

    pub fn coefficient(&self, s: usize, alpha: &MultiIndex) -> Rational {
        self.coeffs
            .get(&(s, alpha.clone()))
            .cloned()
            .unwrap_or_else(rational::zero)
    }

    /// Non-zero terms `((s, α), c)` in a stable order.
    pub fn terms(&self) -> impl Iterator<Item = (&(usize, MultiIndex), &Rational)> {
        self.coeffs.iter()
    }

    /// Highest `|α|` with a non-zero coefficient (0 for the zero map).
    pub fn actual_degree(&self) -> usize {
        self.coeffs
            .keys()
            .map(|(_, a)| a.length())
            .max()
            .unwrap_or(0)
    }

    /// `∂_α f^s(point)`, computed exactly from the monomials.
    pub fn derivative_at(
        &self,
        s: usize,
        alpha: &MultiIndex,
        point: &[Rational],
    ) -> Result<Rational> {
        if point.len() != self.n {
            return Err(mismatch(format!(
                "point has {} coordinates, expected {}",
                point.len(),
                self.n
            )));
        }
        if alpha.dim() != self.n {
            return Err(mismatch(format!(
                "multi-index {alpha} is not in N^{}",
                self.n
            )));
        }
        let mut total = rational::zero();
        for ((t, beta), c) in &self.coeffs {
            if *t != s {
                continue;
            }
            let mut term = c.clone();
            let mut dominated = true;
            for ((&b, &a), x) in beta.entries().iter().zip(alpha.entries()).zip(point) {
                if b < a {
                    dominated = false;
                    break;
                }
                // falling factorial b (b-1) ... (b-a+1)
                for k in 0..a {
                    term *= Rational::from_integer((b - k).into());
                }
                for _ in 0..b - a {
                    term *= x;
                }
            }
            if dominated {
                total += term;
            }
        }
        Ok(total)
    }

    /// `self + t·other`, with the larger degree bound.
    pub fn add_scaled(&self, other: &PolynomialMap, t: &Rational) -> Result<PolynomialMap> {
        if self.n != other.n || self.q != other.q {
            return Err(mismatch("polynomial maps of different shapes"));
        }
        let mut out = self.clone();
        out.degree = self.degree.max(other.degree);
        for ((s, alpha), c) in &other.coeffs {
            let v = out.coefficient(*s, alpha) + c * t;
            out.set_coefficient(*s, alpha.clone(), v)?;
        }
        Ok(out)
    }
}

/// A p-jet at the chart origin: values `y^s_α = ∂_α f^s(0)`, `|α| ≤ p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jet {
    dims: JetDims,
    values: Vec<Rational>,
}

/// A point `z` of the fiber `F^{p+1}_p`: values `y^s_α`, `|α| = p+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberPoint {
    n: usize,
    q: usize,
    p: usize,
    values: Vec<Rational>,
}

impl Jet {
    pub fn zero(n: usize, q: usize, p: usize) -> Result<Self> {
        let dims = jet_dims(n, q, p)?;
        let values = vec![rational::zero(); dims.jet_value_count()];
        Ok(Jet { dims, values })
    }

    /// Values listed in layout order (levels ascending, precedence order within).
    pub fn from_values(n: usize, q: usize, p: usize, values: Vec<Rational>) -> Result<Self> {
        let dims = jet_dims(n, q, p)?;
        if values.len() != dims.jet_value_count() {
            return Err(mismatch(format!(
                "a {p}-jet of R^{n} -> R^{q} has {} values, got {}",
                dims.jet_value_count(),
                values.len()
            )));
        }
        Ok(Jet { dims, values })
    }

    pub fn dims(&self) -> &JetDims {
        &self.dims
    }

    pub fn layout(&self) -> CoordinateLayout {
        CoordinateLayout::new(self.dims.n, self.dims.q, 0..=self.dims.p)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, c: &JetCoordinate) -> Result<&Rational> {
        let pos = self
            .layout()
            .position(c)
            .ok_or_else(|| invalid(format!("{c} is not a coordinate of this jet")))?;
        Ok(&self.values[pos])
    }

    pub fn set_value(&mut self, c: &JetCoordinate, v: Rational) -> Result<()> {
        let pos = self
            .layout()
            .position(c)
            .ok_or_else(|| invalid(format!("{c} is not a coordinate of this jet")))?;
        self.values[pos] = v;
        Ok(())
    }
}

impl FiberPoint {
    pub fn zero(n: usize, q: usize, p: usize) -> Result<Self> {
        let len = jet_dims(n, q, p)?.dim_next_fiber();
        Ok(FiberPoint {
            n,
            q,
            p,
            values: vec![rational::zero(); len],
        })
    }

    /// Values listed in precedence order of the level-`p+1` coordinates.
    pub fn from_values(n: usize, q: usize, p: usize, values: Vec<Rational>) -> Result<Self> {
        let len = jet_dims(n, q, p)?.dim_next_fiber();
        if values.len() != len {
            return Err(mismatch(format!(
                "F^{}_{p} of R^{n} -> R^{q} has dimension {len}, got {} values",
                p + 1,
                values.len()
            )));
        }
        Ok(FiberPoint { n, q, p, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// The jet order `p` this fiber sits over.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn layout(&self) -> CoordinateLayout {
        CoordinateLayout::new(self.n, self.q, self.p + 1..=self.p + 1)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, c: &JetCoordinate) -> Result<&Rational> {
        let pos = self
            .layout()
            .position(c)
            .ok_or_else(|| invalid(format!("{c} is not a fiber coordinate")))?;
        Ok(&self.values[pos])
    }
}

/// The p-jet of `f` at the origin.
pub fn prolong(f: &PolynomialMap, p: usize) -> Result<Jet> {
    if f.degree < p {
        return Err(Error::InsufficientDegree {
            degree: f.degree,
            required: p,
        });
    }
    let layout = CoordinateLayout::new(f.n, f.q, 0..=p);
    let values = layout
        .coords()
        .iter()
        .map(|c| f.coefficient(c.component, &c.index) * Rational::from_integer(c.index.factorial()))
        .collect();
    Jet::from_values(f.n, f.q, p, values)
}

/// `(j^p_0 f, order-(p+1) derivatives of f at 0)`.
pub fn split_jet_and_fiber(f: &PolynomialMap, p: usize) -> Result<(Jet, FiberPoint)> {
    if f.degree < p + 1 {
        return Err(Error::InsufficientDegree {
            degree: f.degree,
            required: p + 1,
        });
    }
    let jet = prolong(f, p)?;
    let layout = CoordinateLayout::new(f.n, f.q, p + 1..=p + 1);
    let values = layout
        .coords()
        .iter()
        .map(|c| f.coefficient(c.component, &c.index) * Rational::from_integer(c.index.factorial()))
        .collect();
    Ok((jet, FiberPoint::from_values(f.n, f.q, p, values)?))
}

/// The degree-`p+1` polynomial whose `(p+1)`-jet at 0 is `(a, z)`.
pub fn reassemble(a: &Jet, z: &FiberPoint) -> Result<PolynomialMap> {
    let d = a.dims();
    if (d.n, d.q, d.p) != (z.n, z.q, z.p) {
        return Err(mismatch("jet and fiber point have different (n, q, p)"));
    }
    let mut f = PolynomialMap::new(d.n, d.q, d.p + 1)?;
    let pairs = a
        .layout()
        .coords
        .into_iter()
        .zip(a.values.iter())
        .chain(z.layout().coords.into_iter().zip(z.values.iter()));
    for (c, v) in pairs {
        let coefficient = v / Rational::from_integer(c.index.factorial());
        f.set_coefficient(c.component, c.index, coefficient)?;
    }
    Ok(f)
}

/// `e_j(a) = ∂_{x_j} j^{p-1}_x f`, as vectors of `T J^{p-1}`.
///
/// The x-block is `δ_j`; the entry at `y^s_α` (`|α| ≤ p−1`) is
/// `y^s_{α+δ_j}` read from `a`. For `p = 0` these are the chart
/// directions of `X`.
pub fn e_vectors(a: &Jet) -> Vec<Vec<Rational>> {
    let d = a.dims();
    let below = if d.p == 0 {
        CoordinateLayout::empty()
    } else {
        CoordinateLayout::new(d.n, d.q, 0..=d.p - 1)
    };
    let full = a.layout();
    (1..=d.n)
        .map(|j| {
            let mut v = vec![rational::zero(); d.n + below.len()];
            v[j - 1] = rational::one();
            for (k, c) in below.coords().iter().enumerate() {
                let shifted =
                    JetCoordinate::new(c.component, c.index.add_delta(j).expect("axis in range"));
                let pos = full
                    .position(&shifted)
                    .expect("shifted coordinate within the jet");
                v[d.n + k] = a.values[pos].clone();
            }
            v
        })
        .collect()
}

/// The frame `∂_{x_j} j^p_x f_z`, `j = 1..n`, spanning `E^p(a, z)`.
///
/// Each vector is `e_j(a)` followed by the block `(y^s_{α+δ_j})_{|α|=p}`
/// read from `z`.
pub fn jet_frame(a: &Jet, z: &FiberPoint) -> Result<Vec<Vec<Rational>>> {
    let d = a.dims();
    if (d.n, d.q, d.p) != (z.n, z.q, z.p) {
        return Err(mismatch("jet and fiber point have different (n, q, p)"));
    }
    let top = CoordinateLayout::new(d.n, d.q, d.p..=d.p);
    let fiber = z.layout();
    let frame = e_vectors(a)
        .into_iter()
        .enumerate()
        .map(|(jm1, mut v)| {
            for c in top.coords() {
                let shifted = JetCoordinate::new(
                    c.component,
                    c.index.add_delta(jm1 + 1).expect("axis in range"),
                );
                let pos = fiber
                    .position(&shifted)
                    .expect("shifted coordinate is a fiber coordinate");
                v.push(z.values[pos].clone());
            }
            v
        })
        .collect();
    Ok(frame)
}

/// A linear subspace `V ⊂ T_a J^p` given by a basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentSubspace {
    basis: Vec<Vec<Rational>>,
}

impl TangentSubspace {
    /// Checks that the vectors have length `dim_jet` and are independent.
    pub fn new(dim_jet: usize, basis: Vec<Vec<Rational>>) -> Result<Self> {
        if basis.is_empty() {
            return Err(invalid(
                "a tangent subspace needs at least one basis vector",
            ));
        }
        if let Some((k, v)) = basis.iter().enumerate().find(|(_, v)| v.len() != dim_jet) {
            return Err(mismatch(format!(
                "basis vector {} has {} entries, expected dim J^p = {dim_jet}",
                k + 1,
                v.len()
            )));
        }
        let stacked = RationalMatrix::from_rows(basis.clone())?;
        if rank(&stacked) != basis.len() {
            return Err(invalid("basis vectors of V are linearly dependent"));
        }
        Ok(TangentSubspace { basis })
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis[0].len()
    }
}

// ---------------------------------------------------------------------------
// JSON: {"n":…, "q":…, "p":…, "values": {"s,a1,…,an": "num/den", …}}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValuesRepr {
    n: usize,
    q: usize,
    #[serde(default)]
    p: Option<usize>,
    #[serde(default)]
    degree: Option<usize>,
    values: BTreeMap<String, String>,
}

fn read_values(
    values: &BTreeMap<String, String>,
    n: usize,
    q: usize,
    accept: impl Fn(usize) -> bool,
) -> Result<Vec<(JetCoordinate, Rational)>> {
    values
        .iter()
        .map(|(key, text)| {
            let c = JetCoordinate::parse_key(key)?;
            if c.component > q || c.index.dim() != n {
                return Err(invalid(format!(
                    "key `{key}` does not fit n = {n}, q = {q}"
                )));
            }
            if !accept(c.index.length()) {
                return Err(invalid(format!(
                    "key `{key}` has an order outside this object"
                )));
            }
            let v = rational::parse(text).map_err(|e| invalid(format!("value of `{key}`: {e}")))?;
            Ok((c, v))
        })
        .collect()
}

fn write_values<S: Serializer>(
    ser: S,
    header: &[(&str, usize)],
    layout: &CoordinateLayout,
    values: &[Rational],
) -> std::result::Result<S::Ok, S::Error> {
    struct Values<'a>(&'a CoordinateLayout, &'a [Rational]);
    impl Serialize for Values<'_> {
        fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
            let mut map = ser.serialize_map(Some(self.1.len()))?;
            for (c, v) in self.0.coords().iter().zip(self.1) {
                map.serialize_entry(&c.key(), &rational::format(v))?;
            }
            map.end()
        }
    }
    let mut map = ser.serialize_map(Some(header.len() + 1))?;
    for (k, v) in header {
        map.serialize_entry(k, v)?;
    }
    map.serialize_entry("values", &Values(layout, values))?;
    map.end()
}

impl Serialize for Jet {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let d = &self.dims;
        write_values(
            ser,
            &[("n", d.n), ("q", d.q), ("p", d.p)],
            &self.layout(),
            &self.values,
        )
    }
}

impl<'de> Deserialize<'de> for Jet {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ValuesRepr::deserialize(de)?;
        let p = repr.p.ok_or_else(|| D::Error::missing_field("p"))?;
        if repr.degree.is_some() {
            return Err(D::Error::unknown_field(
                "degree",
                &["n", "q", "p", "values"],
            ));
        }
        let mut jet = Jet::zero(repr.n, repr.q, p).map_err(D::Error::custom)?;
        for (c, v) in
            read_values(&repr.values, repr.n, repr.q, |l| l <= p).map_err(D::Error::custom)?
        {
            jet.set_value(&c, v).map_err(D::Error::custom)?;
        }
        Ok(jet)
    }
}

impl Serialize for FiberPoint {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        write_values(
            ser,
            &[("n", self.n), ("q", self.q), ("p", self.p)],
            &self.layout(),
            &self.values,
        )
    }
}

impl<'de> Deserialize<'de> for FiberPoint {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ValuesRepr::deserialize(de)?;
        let p = repr.p.ok_or_else(|| D::Error::missing_field("p"))?;
        if repr.degree.is_some() {
            return Err(D::Error::unknown_field(
                "degree",
                &["n", "q", "p", "values"],
            ));
        }
        let mut z = FiberPoint::zero(repr.n, repr.q, p).map_err(D::Error::custom)?;
        let layout = z.layout();
        for (c, v) in
            read_values(&repr.values, repr.n, repr.q, |l| l == p + 1).map_err(D::Error::custom)?
        {
            let pos = layout.position(&c).expect("validated fiber coordinate");
            z.values[pos] = v;
        }
        Ok(z)
    }
}

impl Serialize for PolynomialMap {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let layout = CoordinateLayout::new(self.n, self.q, 0..=self.degree);
        let (coords, values): (Vec<_>, Vec<_>) = layout
            .coords()
            .iter()
            .filter_map(|c| {
                let v = self.coefficient(c.component, &c.index);
                (!v.is_zero()).then(|| (c.clone(), v))
            })
            .unzip();
        let nonzero = CoordinateLayout {
            index: HashMap::new(),
            coords,
        };
        write_values(
            ser,
            &[("n", self.n), ("q", self.q), ("degree", self.degree)],
            &nonzero,
            &values,
        )
    }
}

impl<'de> Deserialize<'de> for PolynomialMap {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ValuesRepr::deserialize(de)?;
        let degree = repr
            .degree
            .ok_or_else(|| D::Error::missing_field("degree"))?;
        if repr.p.is_some() {
            return Err(D::Error::unknown_field(
                "p",
                &["n", "q", "degree", "values"],
            ));
        }
        let mut f = PolynomialMap::new(repr.n, repr.q, degree).map_err(D::Error::custom)?;
        for (c, v) in
            read_values(&repr.values, repr.n, repr.q, |l| l <= degree).map_err(D::Error::custom)?
        {
            f.set_coefficient(c.component, c.index, v)
                .map_err(D::Error::custom)?;
        }
        Ok(f)
    }
}
