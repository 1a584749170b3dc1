//! Exact certificate that the minors along the staircase path have
//! independent differentials at `z0`.
//!
//! For each path couple `(i_t, j_t)` let `G_t(z) = det M*_{#(i_t,j_t)}(z)`,
//! the minor obtained by bordering `M*` with row `i_t` and column `j_t`.
//! `∂G_t/∂y` at `z0` is the sum of the cofactors of every cell of that
//! minor carrying the variable `y`. In path order the Jacobian block is
//! lower triangular with `±det M*(z0)` on the diagonal.

use num_traits::Zero;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{precondition, Result};
use crate::linalg::{det, minimal_submatrix, rank, RationalMatrix, SubmatrixPattern};
use crate::multiindex::JetCoordinate;
use crate::rational::{self, Rational};

use super::{
    assemble_m, check_hypothesis, staircase_path, theta, CellVariableMap, StratumInstance,
};

/// A property checked by [`verify_core`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Rows and columns outside `M*` all fall in the block `B`.
    ComplementInBlock,
    /// Every bordered minor vanishes at `z0`.
    VanishingMinors,
    /// Path couples carry pairwise distinct fiber variables.
    DistinctPathVariables,
    /// Path count equals `θ`.
    SemiPerimeter,
    /// Diagonal of the Jacobian block is `±det M*(z0)`.
    Diagonal,
    /// Entries above the diagonal vanish.
    UpperTriangleZero,
    /// The Jacobian in all fiber variables has rank `θ`.
    JacobianRank,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub q: usize,
    pub p: usize,
    pub m: usize,
    pub c: usize,
    pub rank: usize,
    pub theta: usize,
    pub mstar: SubmatrixPattern,
    #[serde(with = "rational::serde_string")]
    pub mstar_det: Rational,
    pub complement: SubmatrixPattern,
    /// 0-based `(row, column)` couples; serialized 1-based.
    #[serde(serialize_with = "one_based_couples")]
    pub path: Vec<(usize, usize)>,
    pub path_variables: Vec<JetCoordinate>,
    pub jacobian_block: RationalMatrix,
    pub jacobian_rank: usize,
    pub complement_in_block_ok: bool,
    pub vanishing_minors_ok: bool,
    pub distinct_variables_ok: bool,
    pub semi_perimeter_ok: bool,
    pub diagonal_ok: bool,
    pub uppertriangle_zero_ok: bool,
    pub failures: Vec<Check>,
    pub passed: bool,
}

fn one_based_couples<S: Serializer>(
    path: &[(usize, usize)],
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = ser.serialize_seq(Some(path.len()))?;
    for (i, j) in path {
        seq.serialize_element(&[i + 1, j + 1])?;
    }
    seq.end()
}

/// `∂ det N / ∂ y` at the entries of `m`, summed over the cells of `N`
/// that carry fiber variable `y`, for every variable at once.
fn minor_gradient(
    m: &RationalMatrix,
    minor: &SubmatrixPattern,
    cells: &CellVariableMap,
) -> Vec<Rational> {
    let mut grad = vec![rational::zero(); cells.variable_count()];
    for (a, &h) in minor.rows().iter().enumerate() {
        for (b, &k) in minor.cols().iter().enumerate() {
            let Some(var) = cells.variable(h, k) else {
                continue;
            };
            let rows: Vec<usize> = minor.rows().iter().copied().filter(|&x| x != h).collect();
            let cols: Vec<usize> = minor.cols().iter().copied().filter(|&x| x != k).collect();
            let cofactor = det(&m.select(&rows, &cols)).expect("square minor");
            if (a + b) % 2 == 0 {
                grad[var] += cofactor;
            } else {
                grad[var] -= cofactor;
            }
        }
    }
    grad
}

/// Verifies, in exact arithmetic, that the stratum through `z0` is cut
/// out near `z0` by `θ` minor equations with independent differentials.
///
/// Fails with a precondition error when the hypothesis on `(a, V)` does not
/// hold or when `z0` is not in `Z_{a,V}`; a transverse point has no
/// stratum to certify.
pub fn verify_core(inst: &StratumInstance) -> Result<VerificationReport> {
    let d = inst.dims().clone();
    if !check_hypothesis(&inst.jet, &inst.v)? {
        return Err(precondition("pi(V) + E^{p-1}(a) does not fill T J^{p-1}"));
    }
    let m0 = assemble_m(&inst.jet, &inst.v, &inst.z0)?;
    let r = rank(&m0);
    if r >= d.dim_jet {
        return Err(precondition(format!(
            "z0 is transverse: rank M(z0) = {r} = dim J^p, so z0 lies in no stratum"
        )));
    }
    let m = inst.v.dim();
    let c = inst.codim();
    let expected_theta = theta(d.n, d.q, d.p, c, r)?;

    let mstar = minimal_submatrix(&m0);
    let mstar_det = det(&m0.submatrix(&mstar))?;
    let complement = mstar.complement(m0.rows(), m0.cols());
    let path = staircase_path(&mstar, m0.rows(), m0.cols())?;
    let cells = CellVariableMap::new(&d, m);

    let complement_in_block_ok = complement
        .rows()
        .iter()
        .all(|&i| complement.cols().iter().all(|&j| cells.in_block(i, j)));

    let vanishing_minors_ok = complement.rows().iter().all(|&i| {
        complement.cols().iter().all(|&j| {
            det(&m0.submatrix(&mstar.bordered(i, j)))
                .expect("bordered minor is square")
                .is_zero()
        })
    });

    let path_vars: Vec<Option<usize>> = path.iter().map(|&(i, j)| cells.variable(i, j)).collect();
    let distinct_variables_ok = path_vars.iter().all(Option::is_some)
        && (0..path_vars.len())
            .all(|s| (s + 1..path_vars.len()).all(|t| path_vars[s] != path_vars[t]));
    let path_variables: Vec<JetCoordinate> = path
        .iter()
        .filter_map(|&(i, j)| cells.coordinate(i, j))
        .collect();

    let semi_perimeter_ok = path.len() == expected_theta;

    let jacobian: Vec<Vec<Rational>> = path
        .iter()
        .map(|&(i, j)| minor_gradient(&m0, &mstar.bordered(i, j), &cells))
        .collect();
    let theta_count = path.len();
    let jacobian_block =
        RationalMatrix::from_fn(theta_count, theta_count, |t, u| match path_vars[u] {
            Some(var) => jacobian[t][var].clone(),
            None => rational::zero(),
        });
    let diagonal_ok = !mstar_det.is_zero()
        && (0..theta_count).all(|t| {
            let entry = jacobian_block.get(t, t);
            *entry == mstar_det || *entry == -mstar_det.clone()
        });
    let uppertriangle_zero_ok =
        (0..theta_count).all(|t| (t + 1..theta_count).all(|u| jacobian_block.get(t, u).is_zero()));
    let jacobian_rank = if jacobian.is_empty() {
        0
    } else {
        rank(&RationalMatrix::from_rows(jacobian)?)
    };

    let mut failures = Vec::new();
    for (ok, check) in [
        (complement_in_block_ok, Check::ComplementInBlock),
        (vanishing_minors_ok, Check::VanishingMinors),
        (distinct_variables_ok, Check::DistinctPathVariables),
        (semi_perimeter_ok, Check::SemiPerimeter),
        (diagonal_ok, Check::Diagonal),
        (uppertriangle_zero_ok, Check::UpperTriangleZero),
        (jacobian_rank == expected_theta, Check::JacobianRank),
    ] {
        if !ok {
            failures.push(check);
        }
    }

    Ok(VerificationReport {
        n: d.n,
        q: d.q,
        p: d.p,
        m,
        c,
        rank: r,
        theta: expected_theta,
        mstar,
        mstar_det,
        complement,
        path,
        path_variables,
        jacobian_block,
        jacobian_rank,
        complement_in_block_ok,
        vanishing_minors_ok,
        distinct_variables_ok,
        semi_perimeter_ok,
        diagonal_ok,
        uppertriangle_zero_ok,
        passed: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{FiberPoint, Jet, TangentSubspace};
    use crate::rational::int;
    use crate::strata::unit;

    fn closed_form(t: i64) -> StratumInstance {
        let a = Jet::zero(1, 1, 1).unwrap();
        let v = TangentSubspace::new(3, vec![unit(3, 0), unit(3, 1)]).unwrap();
        let z = FiberPoint::from_values(1, 1, 1, vec![int(t)]).unwrap();
        StratumInstance::new(a, v, z).unwrap()
    }

    #[test]
    fn closed_form_instance_passes() {
        let report = verify_core(&closed_form(0)).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!((report.rank, report.c, report.theta), (2, 1, 1));
        assert_eq!(report.mstar.rows_one_based(), vec![1, 2]);
        assert_eq!(report.mstar.cols_one_based(), vec![1, 2]);
        assert_eq!(report.path, vec![(2, 2)]);
        // G_1 = det [[1,0,1],[0,1,0],[0,0,y'']] = y'', and det M* = 1
        assert_eq!(report.mstar_det, int(1));
        assert_eq!(report.jacobian_block, RationalMatrix::from_i64(&[&[1]]));
        assert_eq!(report.path_variables[0].key(), "1,2");
    }

    #[test]
    fn transverse_point_is_refused() {
        assert!(matches!(
            verify_core(&closed_form(3)),
            Err(crate::Error::Precondition(_))
        ));
    }

    #[test]
    fn symbolic_minor_oracle() {
        // Oracle: G(t) = det M(t) for the closed-form instance, a polynomial
        // of degree 1 in t; its slope from two exact evaluations is dG/dt.
        let m_at = |t: i64| {
            assemble_m(&closed_form(t).jet, &closed_form(t).v, &closed_form(t).z0).unwrap()
        };
        let slope = det(&m_at(1)).unwrap() - det(&m_at(0)).unwrap();
        let report = verify_core(&closed_form(0)).unwrap();
        assert_eq!(report.jacobian_block.get(0, 0), &slope);
    }

    #[test]
    fn report_json_shape() {
        let report = verify_core(&closed_form(0)).unwrap();
        let value = serde_json::to_value(&report).unwrap();
        assert_eq!(value["path"], serde_json::json!([[3, 3]]));
        assert_eq!(
            value["mstar"],
            serde_json::json!({"rows": [1, 2], "cols": [1, 2]})
        );
        assert_eq!(
            value["jacobian_block"]["entries"],
            serde_json::json!([["1"]])
        );
        assert_eq!(value["passed"], serde_json::json!(true));
        assert_eq!(value["failures"], serde_json::json!([]));
    }
}
