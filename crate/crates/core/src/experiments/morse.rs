//! Morse classification of critical points of scalar polynomials, and a
//! probe along a line of linear perturbations.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{invalid, mismatch, precondition, Error, Result};
use crate::jet::{FiberPoint, Jet, PolynomialMap, TangentSubspace};
use crate::linalg::{det, RationalMatrix};
use crate::multiindex::{level_coordinates, MultiIndex};
use crate::rational::{self, Rational};
use crate::strata::StratumInstance;

use super::roots::UPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MorseClass {
    Regular,
    MorseCritical,
    DegenerateCritical,
}

fn check_scalar(f: &PolynomialMap) -> Result<()> {
    if f.q() != 1 {
        return Err(invalid(format!(
            "expected a scalar function, got q = {}",
            f.q()
        )));
    }
    if f.degree() < 2 {
        return Err(Error::InsufficientDegree {
            degree: f.degree(),
            required: 2,
        });
    }
    Ok(())
}

fn gradient(f: &PolynomialMap, x: &[Rational]) -> Result<Vec<Rational>> {
    (1..=f.n())
        .map(|j| f.derivative_at(1, &MultiIndex::delta(f.n(), j)?, x))
        .collect()
}

fn hessian(f: &PolynomialMap, x: &[Rational]) -> Result<RationalMatrix> {
    let n = f.n();
    let mut h = RationalMatrix::zeros(n, n);
    for i in 1..=n {
        for j in 1..=n {
            let alpha = MultiIndex::delta(n, i)?.add_delta(j)?;
            h.set(i - 1, j - 1, f.derivative_at(1, &alpha, x)?);
        }
    }
    Ok(h)
}

pub fn morse_classify(f: &PolynomialMap, x: &[Rational]) -> Result<MorseClass> {
    check_scalar(f)?;
    if x.len() != f.n() {
        return Err(mismatch(format!(
            "point has {} coordinates, expected {}",
            x.len(),
            f.n()
        )));
    }
    if gradient(f, x)?.iter().any(|g| !g.is_zero()) {
        return Ok(MorseClass::Regular);
    }
    Ok(if det(&hessian(f, x)?)?.is_zero() {
        MorseClass::DegenerateCritical
    } else {
        MorseClass::MorseCritical
    })
}

/// At a critical point `x`: `a = j¹f(x)`, `V` = the x-directions and the
/// `y` direction (tangent to `{df = 0}`), `z0` = the second derivatives.
/// Then `z0 ∈ Z_{a,V}` exactly when the Hessian is singular.
pub fn critical_jet_instance(f: &PolynomialMap, x: &[Rational]) -> Result<StratumInstance> {
    check_scalar(f)?;
    if morse_classify(f, x)? == MorseClass::Regular {
        return Err(precondition("the point is not critical"));
    }
    let n = f.n();
    let mut jet = Jet::zero(n, 1, 1)?;
    for level in 0..=1 {
        for c in level_coordinates(n, 1, level) {
            let v = f.derivative_at(1, &c.index, x)?;
            jet.set_value(&c, v)?;
        }
    }
    let dim_jet = jet.dims().dim_jet;
    let basis = (0..=n)
        .map(|k| {
            let mut e = vec![rational::zero(); dim_jet];
            e[k] = rational::one();
            e
        })
        .collect();
    let z0 = level_coordinates(n, 1, 2)
        .iter()
        .map(|c| f.derivative_at(1, &c.index, x))
        .collect::<Result<Vec<_>>>()?;
    StratumInstance::new(
        jet,
        TangentSubspace::new(dim_jet, basis)?,
        FiberPoint::from_values(n, 1, 1, z0)?,
    )
}

// ---------------------------------------------------------------------------
// Exact critical points for n ≤ 2.

/// Coefficients `(i, j) ↦ c` of `x1^i x2^j`.
type Poly2 = BTreeMap<(u32, u32), Rational>;

fn partial2(f: &PolynomialMap, axis: usize) -> Poly2 {
    let mut out = Poly2::new();
    for ((_, alpha), c) in f.terms() {
        let e = alpha.entries();
        let (i, j) = (e[0], e[1]);
        let (k, key) = if axis == 1 {
            (i, (i.wrapping_sub(1), j))
        } else {
            (j, (i, j.wrapping_sub(1)))
        };
        if k > 0 {
            *out.entry(key).or_insert_with(rational::zero) += c * rational::int(k.into());
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn x2_degree(p: &Poly2) -> Option<u32> {
    p.keys().map(|&(_, j)| j).max()
}

/// `p(x1, ·)` as a polynomial in `x2`.
fn at_x1(p: &Poly2, x1: &Rational) -> UPoly {
    let len = x2_degree(p).map_or(0, |d| d as usize + 1);
    let mut coeffs = vec![rational::zero(); len];
    for (&(i, j), c) in p {
        let mut term = c.clone();
        for _ in 0..i {
            term *= x1;
        }
        coeffs[j as usize] += term;
    }
    UPoly::new(coeffs)
}

/// Coefficient list in `x2`, leading term first, padded to the formal degree.
fn formal(p: &Poly2, x1: &Rational, degree: u32) -> Vec<Rational> {
    let u = at_x1(p, x1);
    (0..=degree)
        .rev()
        .map(|k| {
            u.coeffs()
                .get(k as usize)
                .cloned()
                .unwrap_or_else(rational::zero)
        })
        .collect()
}

/// Sylvester resultant in `x2` for the formal degrees, at a fixed `x1`.
fn resultant_at(p1: &Poly2, d1: u32, p2: &Poly2, d2: u32, x1: &Rational) -> Result<Rational> {
    let size = (d1 + d2) as usize;
    let (c1, c2) = (formal(p1, x1, d1), formal(p2, x1, d2));
    let mut s = RationalMatrix::zeros(size, size);
    for row in 0..d2 as usize {
        for (k, c) in c1.iter().enumerate() {
            s.set(row, row + k, c.clone());
        }
    }
    for row in 0..d1 as usize {
        for (k, c) in c2.iter().enumerate() {
            s.set(d2 as usize + row, row + k, c.clone());
        }
    }
    det(&s)
}

fn univariate_x1(p: &Poly2) -> UPoly {
    at_x1(
        &p.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        &rational::zero(),
    )
}

fn non_isolated() -> Error {
    Error::Unsupported("the critical set is not a finite set of points".into())
}

/// All rational critical points of a scalar polynomial, in lexicographic
/// order. Supports `n = 1` with degree ≤ 4 and `n = 2` with degree ≤ 3.
pub fn rational_critical_points(f: &PolynomialMap) -> Result<Vec<Vec<Rational>>> {
    check_scalar(f)?;
    let deg = f.actual_degree();
    match f.n() {
        1 => {
            if deg > 4 {
                return Err(Error::Unsupported(format!(
                    "exact critical points in one variable need degree <= 4, got {deg}"
                )));
            }
            let mut coeffs = vec![rational::zero(); deg.max(1)];
            for ((_, alpha), c) in f.terms() {
                let k = alpha.entries()[0];
                if k > 0 {
                    coeffs[k as usize - 1] += c * rational::int(k.into());
                }
            }
            let derivative = UPoly::new(coeffs);
            if derivative.is_zero() {
                return Err(non_isolated());
            }
            Ok(derivative
                .rational_roots()?
                .into_iter()
                .map(|x| vec![x])
                .collect())
        }
        2 => {
            if deg > 3 {
                return Err(Error::Unsupported(format!(
                    "exact critical points in two variables need degree <= 3, got {deg}"
                )));
            }
            let (p1, p2) = (partial2(f, 1), partial2(f, 2));
            let (d1, d2) = match (x2_degree(&p1), x2_degree(&p2)) {
                (None, None) => return Err(non_isolated()),
                (None, Some(_)) | (Some(_), None) => {
                    let other = if p1.is_empty() { &p2 } else { &p1 };
                    if other.len() == 1 && other.contains_key(&(0, 0)) {
                        return Ok(Vec::new());
                    }
                    return Err(non_isolated());
                }
                (Some(d1), Some(d2)) => (d1, d2),
            };
            if d1 == 0 && d2 == 0 {
                let g = univariate_x1(&p1).gcd(&univariate_x1(&p2));
                return if g.degree() == Some(0) {
                    Ok(Vec::new())
                } else {
                    Err(non_isolated())
                };
            }
            // entries have degree ≤ 2 in x1 and the matrix is at most 4×4
            let samples: Vec<(Rational, Rational)> = (0..9)
                .map(|k| {
                    let x1 = rational::int(k);
                    resultant_at(&p1, d1, &p2, d2, &x1).map(|r| (x1, r))
                })
                .collect::<Result<_>>()?;
            let res = UPoly::interpolate(&samples);
            if res.is_zero() {
                return Err(non_isolated());
            }
            let mut points = Vec::new();
            for x1 in res.rational_roots()? {
                let g = at_x1(&p1, &x1).gcd(&at_x1(&p2, &x1));
                if g.is_zero() {
                    return Err(non_isolated());
                }
                for x2 in g.rational_roots()? {
                    points.push(vec![x1.clone(), x2]);
                }
            }
            points.sort();
            Ok(points)
        }
        n => Err(Error::Unsupported(format!(
            "exact critical points are only computed for n <= 2, got n = {n}"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalPoint {
    #[serde(with = "rational::serde_vec")]
    pub point: Vec<Rational>,
    pub class: MorseClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeStep {
    #[serde(with = "rational::serde_string")]
    pub t: Rational,
    pub critical_points: Vec<CriticalPoint>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub steps: Vec<ProbeStep>,
    pub total: usize,
    pub degenerate_count: usize,
}

/// The grid `−1, −1/2, …, −1/K, 1/K, …, 1` with `K = steps / 2`, and `0`
/// in the middle when `include_zero` is set.
fn probe_grid(steps: usize, include_zero: bool) -> Result<Vec<Rational>> {
    if steps == 0 || !steps.is_multiple_of(2) {
        return Err(invalid(format!(
            "steps must be a positive even number, got {steps}"
        )));
    }
    let k = steps as i64 / 2;
    let mut grid: Vec<Rational> = (1..=k).map(|j| rational::ratio(-1, j)).collect();
    if include_zero {
        grid.push(rational::zero());
    }
    grid.extend((1..=k).rev().map(|j| rational::ratio(1, j)));
    Ok(grid)
}

/// Classifies every rational critical point of `f + t·ℓ` over the grid,
/// where `ℓ(x) = Σ direction_j x_j`.
pub fn morse_perturbation_probe(
    f: &PolynomialMap,
    x_star: &[Rational],
    direction: &[Rational],
    steps: usize,
    include_zero: bool,
) -> Result<ProbeReport> {
    if morse_classify(f, x_star)? != MorseClass::DegenerateCritical {
        return Err(precondition(
            "the probe needs a degenerate critical point to start from",
        ));
    }
    if direction.len() != f.n() {
        return Err(mismatch(format!(
            "linear functional has {} coefficients, expected {}",
            direction.len(),
            f.n()
        )));
    }
    let mut ell = PolynomialMap::new(f.n(), 1, f.degree())?;
    for (j, c) in direction.iter().enumerate() {
        ell.set_coefficient(1, MultiIndex::delta(f.n(), j + 1)?, c.clone())?;
    }
    let steps = probe_grid(steps, include_zero)?
        .into_iter()
        .map(|t| {
            let g = f.add_scaled(&ell, &t)?;
            let critical_points = rational_critical_points(&g)?
                .into_iter()
                .map(|point| {
                    let class = morse_classify(&g, &point)?;
                    Ok(CriticalPoint { point, class })
                })
                .collect::<Result<Vec<_>>>()?;
            let degenerate = critical_points
                .iter()
                .any(|c| c.class == MorseClass::DegenerateCritical);
            Ok(ProbeStep {
                t,
                critical_points,
                degenerate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport {
        total: steps.len(),
        degenerate_count: steps.iter().filter(|s| s.degenerate).count(),
        steps,
    })
}
