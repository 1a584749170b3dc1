//! Univariate polynomials over Q: gcd, interpolation and rational roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Dense coefficients, constant term first, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly(Vec<Rational>);

/// Divisor enumeration is by trial division; larger coefficients are refused.
const MAX_ROOT_COEFFICIENT: u64 = 1 << 40;

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(rational::zero(), |acc, c| acc * x + c)
    }

    fn monic(&self) -> Self {
        match self.0.last() {
            None => UPoly::zero(),
            Some(lead) => UPoly(self.0.iter().map(|c| c / lead).collect()),
        }
    }

    fn rem(&self, divisor: &UPoly) -> UPoly {
        let d = divisor.degree().expect("division by the zero polynomial");
        let mut r = self.0.clone();
        let lead = divisor.0[d].clone();
        while r.len() > d && !r.is_empty() {
            let shift = r.len() - 1 - d;
            let factor = r.last().expect("non-empty") / &lead;
            for (k, c) in divisor.0.iter().enumerate() {
                r[shift + k] -= &factor * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        UPoly::new(r)
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// The polynomial of degree `< points.len()` through the given points.
    pub fn interpolate(points: &[(Rational, Rational)]) -> UPoly {
        let mut total = vec![rational::zero(); points.len()];
        for (k, (xk, yk)) in points.iter().enumerate() {
            // basis polynomial Π_{l≠k} (x − x_l) / (x_k − x_l)
            let mut basis = vec![rational::one()];
            let mut denom = rational::one();
            for (l, (xl, _)) in points.iter().enumerate() {
                if l == k {
                    continue;
                }
                let mut next = vec![rational::zero(); basis.len() + 1];
                for (d, c) in basis.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= c * xl;
                }
                basis = next;
                denom *= xk - xl;
            }
            let scale = yk / denom;
            for (t, c) in total.iter_mut().zip(&basis) {
                *t += c * &scale;
            }
        }
        UPoly::new(total)
    }

    /// All distinct rational roots, in increasing order.
    pub fn rational_roots(&self) -> Result<Vec<Rational>> {
        if self.is_zero() {
            return Err(Error::Unsupported(
                "every number is a root of the zero polynomial".into(),
            ));
        }
        // integer coefficients with the same roots
        let lcm = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let mut roots = Vec::new();
        if ints[0].is_zero() {
            roots.push(rational::zero());
            let shift = ints
                .iter()
                .position(|c| !c.is_zero())
                .expect("non-zero polynomial");
            ints.drain(..shift);
        }
        if ints.len() > 1 {
            let constant = ints[0].abs();
            let lead = ints.last().expect("non-empty").abs();
            let numerators = divisors(&constant)?;
            let denominators = divisors(&lead)?;
            let poly = UPoly::new(ints.iter().cloned().map(Rational::from_integer).collect());
            for p in &numerators {
                for q in &denominators {
                    for sign in [1, -1] {
                        let x = Rational::new(p * sign, q.clone());
                        if poly.eval(&x).is_zero() && !roots.contains(&x) {
                            roots.push(x);
                        }
                    }
                }
            }
        }
        roots.sort();
        Ok(roots)
    }
}

fn divisors(value: &BigInt) -> Result<Vec<BigInt>> {
    if value > &BigInt::from(MAX_ROOT_COEFFICIENT) {
        return Err(Error::Unsupported(format!(
            "coefficient {value} is too large for rational root enumeration"
        )));
    }
    let v: u64 = value.try_into().expect("bounded above");
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v.is_multiple_of(d) {
            out.push(BigInt::from(d));
            if d * d != v {
                out.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn p(v: &[i64]) -> UPoly {
        UPoly::new(v.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn roots_of_small_polynomials() {
        // (2x - 1)(x + 3) x = 2x^3 + 5x^2 - 3x
        assert_eq!(
            p(&[0, -3, 5, 2]).rational_roots().unwrap(),
            vec![int(-3), int(0), ratio(1, 2)]
        );
        assert_eq!(p(&[2, 0, 1]).rational_roots().unwrap(), vec![]);
        assert_eq!(p(&[-2, 0, 1]).rational_roots().unwrap(), vec![]);
        assert_eq!(p(&[0, 0, 0, 4]).rational_roots().unwrap(), vec![int(0)]);
        assert_eq!(p(&[7]).rational_roots().unwrap(), vec![]);
        assert!(UPoly::zero().rational_roots().is_err());
        // 3x^2 - 1/3 has roots ±1/3
        let q = UPoly::new(vec![ratio(-1, 3), int(0), int(3)]);
        assert_eq!(q.rational_roots().unwrap(), vec![ratio(-1, 3), ratio(1, 3)]);
    }

    #[test]
    fn gcd_and_interpolation() {
        // (x-1)(x-2) and (x-1)(x+5)
        let a = p(&[2, -3, 1]);
        let b = p(&[-5, 4, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        assert_eq!(a.gcd(&UPoly::zero()), a);
        assert_eq!(p(&[1, 1]).gcd(&p(&[2, 1])), p(&[1]));
        let pts: Vec<_> = (0..5).map(|k| (int(k), a.eval(&int(k)))).collect();
        assert_eq!(UPoly::interpolate(&pts), a);
    }
}
