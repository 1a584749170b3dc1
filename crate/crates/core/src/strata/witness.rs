//! Constructions of points in `Z_{a,V}` for exercising the certificate.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::jet::{jet_frame, FiberPoint, Jet, TangentSubspace};
use crate::linalg::{nullspace, rank, RationalMatrix};
use crate::multiindex::jet_dims;
use crate::rational::{self, Rational};

use super::{unit, StratumInstance};

/// `a = 0`, `z0 = 0`, and `V` spanned by every chart direction of
/// `T J^{p-1}` plus the first `dim F^p_{p-1} − c` directions of the bottom
/// block. Then `dim V = dim J^p − c` and `rank M(z0) = dim V < dim J^p`.
pub fn degenerate_witness(n: usize, q: usize, p: usize, c: usize) -> Result<StratumInstance> {
    let d = jet_dims(n, q, p)?;
    if p == 0 {
        return Err(invalid("degenerate witnesses need p >= 1"));
    }
    if c == 0 || c > n {
        return Err(invalid(format!("codimension c = {c} must lie in 1..={n}")));
    }
    if c > d.dim_top_fiber() {
        return Err(invalid(format!(
            "codimension c = {c} exceeds dim F^p_(p-1) = {}",
            d.dim_top_fiber()
        )));
    }
    let covered = d.dim_jet - c;
    let basis = (0..covered).map(|k| unit(d.dim_jet, k)).collect();
    StratumInstance::new(
        Jet::zero(n, q, p)?,
        TangentSubspace::new(d.dim_jet, basis)?,
        FiberPoint::zero(n, q, p)?,
    )
}

fn small(rng: &mut impl Rng, bound: i64) -> Rational {
    rational::int(rng.random_range(-bound..=bound))
}

/// The same subspace with basis `U·basis` for a random unimodular integer
/// matrix `U` (a product of elementary row operations and swaps).
pub fn rotate_basis(inst: &StratumInstance, rng: &mut impl Rng) -> Result<StratumInstance> {
    let mut basis = inst.v.basis().to_vec();
    let m = basis.len();
    if m > 1 {
        for _ in 0..3 * m {
            let i = rng.random_range(0..m);
            let j = rng.random_range(0..m);
            if i == j {
                basis.swap(i, (i + 1) % m);
                continue;
            }
            let factor = small(rng, 2);
            let src = basis[j].clone();
            for (x, y) in basis[i].iter_mut().zip(&src) {
                *x += &factor * y;
            }
        }
    }
    if rng.random_bool(0.5) {
        for x in basis[0].iter_mut() {
            *x = -x.clone();
        }
    }
    StratumInstance::new(
        inst.jet.clone(),
        TangentSubspace::new(inst.v.ambient_dim(), basis)?,
        inst.z0.clone(),
    )
}

fn random_combination(rng: &mut impl Rng, vectors: &[Vec<Rational>], len: usize) -> Vec<Rational> {
    let mut out = vec![rational::zero(); len];
    for v in vectors {
        let k = small(rng, 2);
        for (x, y) in out.iter_mut().zip(v) {
            *x += &k * y;
        }
    }
    out
}

/// A random point of some stratum `Z^r_{a,V}` with `codim V = c`.
///
/// `a` and `z0` have small random integer coordinates. The bottom-block
/// parts of `V` and of the frame are confined to a hyperplane `ker φ` of
/// `F^p_{p-1}`, with `φ` vanishing on the columns of `B(z0)`, which forces
/// `rank M(z0) < dim J^p` while letting `r` range over the whole stratum
/// range.
pub fn random_instance(
    n: usize,
    q: usize,
    p: usize,
    c: usize,
    rng: &mut impl Rng,
) -> Result<StratumInstance> {
    let d = jet_dims(n, q, p)?;
    let top = d.dim_jet_below();
    let bottom = d.dim_top_fiber();
    if c == 0 || c > bottom {
        return Err(invalid(format!(
            "codimension c = {c} must lie in 1..={bottom}"
        )));
    }
    let a = Jet::from_values(
        n,
        q,
        p,
        (0..d.jet_value_count()).map(|_| small(rng, 2)).collect(),
    )?;

    // z0 with rank B(z0) < dim F^p_{p-1}; zero entries make that likely when
    // the block is square or tall-and-thin, and the fallback z0 = 0 always works.
    let mut z0 = FiberPoint::zero(n, q, p)?;
    for _ in 0..32 {
        let values = (0..d.dim_next_fiber())
            .map(|_| {
                if rng.random_bool(0.3) {
                    rational::zero()
                } else {
                    small(rng, 2)
                }
            })
            .collect();
        let candidate = FiberPoint::from_values(n, q, p, values)?;
        if rank(&bottom_block(&a, &candidate, top)?) < bottom {
            z0 = candidate;
            break;
        }
    }
    let block = bottom_block(&a, &z0, top)?;
    // φ with φ·B(z0) = 0, then a basis of ker φ
    let phi = nullspace(&block.transpose())
        .into_iter()
        .next()
        .expect("B(z0) has deficient row rank");
    let phi_row = RationalMatrix::from_rows(vec![phi])?;
    let hyperplane = nullspace(&phi_row);

    let b = bottom - c;
    let mut basis: Vec<Vec<Rational>> = Vec::with_capacity(top + b);
    for k in 0..top {
        let mut v = unit(d.dim_jet, k);
        if rng.random_bool(0.5) {
            let w = random_combination(rng, &hyperplane, bottom);
            v[top..].clone_from_slice(&w);
        }
        basis.push(v);
    }
    // b independent directions inside ker φ
    let mut bottoms: Vec<Vec<Rational>> = Vec::new();
    let mut guard = 0;
    while bottoms.len() < b {
        guard += 1;
        let w = if guard > 64 {
            hyperplane[bottoms.len()].clone()
        } else {
            random_combination(rng, &hyperplane, bottom)
        };
        let mut trial = bottoms.clone();
        trial.push(w.clone());
        if rank(&RationalMatrix::from_rows(trial)?) == bottoms.len() + 1 {
            bottoms.push(w);
        } else if guard > 64 + bottom {
            bottoms = hyperplane[..b].to_vec();
        }
    }
    for w in bottoms {
        let mut v = vec![rational::zero(); top];
        v.extend(w);
        basis.push(v);
    }
    StratumInstance::new(a, TangentSubspace::new(d.dim_jet, basis)?, z0)
}

/// The frame's bottom block `B(z)` (rows of level `p`, one column per axis).
fn bottom_block(a: &Jet, z: &FiberPoint, top: usize) -> Result<RationalMatrix> {
    let frame = jet_frame(a, z)?;
    let rows = frame[0].len() - top;
    let columns: Vec<Vec<Rational>> = frame.into_iter().map(|v| v[top..].to_vec()).collect();
    RationalMatrix::from_columns(rows, &columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata::{check_hypothesis, classify, verify_core};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn witness_examples() {
        let w = degenerate_witness(1, 1, 1, 1).unwrap();
        assert_eq!(w.v.basis(), &[unit(3, 0), unit(3, 1)]);
        let cls = classify(&w.jet, &w.v, &w.z0).unwrap();
        assert_eq!((cls.rank, cls.in_z), (2, true));

        let w = degenerate_witness(2, 1, 1, 1).unwrap();
        assert_eq!(w.v.dim(), 4);
        let cls = classify(&w.jet, &w.v, &w.z0).unwrap();
        assert_eq!((cls.rank, cls.in_z), (4, true));

        let w = degenerate_witness(2, 1, 1, 2).unwrap();
        assert_eq!(w.v.dim(), 3);
        assert_eq!(classify(&w.jet, &w.v, &w.z0).unwrap().rank, 3);
    }

    #[test]
    fn witness_rejects_infeasible() {
        assert!(degenerate_witness(1, 1, 0, 1).is_err());
        assert!(degenerate_witness(2, 1, 1, 0).is_err());
        assert!(degenerate_witness(2, 1, 1, 3).is_err());
    }

    #[test]
    fn witness_two_dimensional_passes_with_min_count() {
        let report = verify_core(&degenerate_witness(2, 1, 1, 1).unwrap()).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.theta, 2);
    }

    #[test]
    fn rotation_keeps_subspace_and_verdict() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = degenerate_witness(2, 2, 1, 2).unwrap();
        let base = verify_core(&w).unwrap();
        for _ in 0..5 {
            let rotated = rotate_basis(&w, &mut rng).unwrap();
            let stacked = RationalMatrix::from_rows(
                w.v.basis()
                    .iter()
                    .chain(rotated.v.basis())
                    .cloned()
                    .collect(),
            )
            .unwrap();
            assert_eq!(rank(&stacked), w.v.dim());
            let report = verify_core(&rotated).unwrap();
            assert_eq!(
                (report.passed, report.rank, report.theta),
                (base.passed, base.rank, base.theta)
            );
        }
    }

    #[test]
    fn random_instances_are_in_a_stratum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, q, p) in [(1, 1, 1), (2, 1, 1), (1, 2, 2), (2, 2, 1)] {
            for c in 1..=n {
                let inst = random_instance(n, q, p, c, &mut rng).unwrap();
                assert!(check_hypothesis(&inst.jet, &inst.v).unwrap());
                assert!(classify(&inst.jet, &inst.v, &inst.z0).unwrap().in_z);
                assert_eq!(inst.codim(), c);
            }
        }
    }
}
