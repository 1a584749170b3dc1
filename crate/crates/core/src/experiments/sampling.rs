//! Uniform integer-box sampling of the fiber `F^{p+1}_p`, classified
//! against `Z_{a,V}`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, precondition, Error, Result};
use crate::jet::{FiberPoint, Jet, TangentSubspace};
use crate::linalg::rank;
use crate::rational::{self, Rational};
use crate::strata::{assemble_m, check_hypothesis, degenerate_witness};

/// Samples per RNG stream. Stream `k` covers samples `k·CHUNK ..`.
const CHUNK: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleTarget {
    /// The degenerate witness of [`degenerate_witness`].
    Witness {
        n: usize,
        q: usize,
        p: usize,
        c: usize,
    },
    Explicit {
        jet: Jet,
        v: TangentSubspace,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleConfig {
    pub target: SampleTarget,
    pub count: u64,
    /// Every fiber coordinate is drawn uniformly from `[-bound, bound]`.
    pub bound: u64,
    pub seed: u64,
    /// Replaces the first sample.
    pub planted: Option<FiberPoint>,
}

impl SampleConfig {
    pub fn witness(
        n: usize,
        q: usize,
        p: usize,
        c: usize,
        count: u64,
        bound: u64,
        seed: u64,
    ) -> Self {
        SampleConfig {
            target: SampleTarget::Witness { n, q, p, c },
            count,
            bound,
            seed,
            planted: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(invalid("count must be at least 1"));
        }
        if self.bound == 0 || self.bound > i64::MAX as u64 / 2 {
            return Err(invalid(format!("bound must lie in 1..={}", i64::MAX / 2)));
        }
        Ok(())
    }

    fn resolve(&self) -> Result<(Jet, TangentSubspace)> {
        match &self.target {
            SampleTarget::Witness { n, q, p, c } => {
                let inst = degenerate_witness(*n, *q, *p, *c)?;
                Ok((inst.jet, inst.v))
            }
            SampleTarget::Explicit { jet, v } => Ok((jet.clone(), v.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub n: usize,
    pub q: usize,
    pub p: usize,
    pub m: usize,
    pub dim_jet: usize,
    #[serde(serialize_with = "as_string")]
    pub seed: u64,
    pub bound: u64,
    pub total: u64,
    pub hits_in_z: u64,
    pub hit_fraction: f64,
    /// Rank of `M_{a,V}(z)` to number of samples.
    pub rank_histogram: BTreeMap<usize, u64>,
}

fn as_string<S: Serializer>(v: &u64, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&v.to_string())
}

/// Draws `count` fiber points and classifies each by the rank of
/// `M_{a,V}(z)`. The result does not depend on `jobs`.
pub fn sample_fiber(cfg: &SampleConfig, jobs: usize) -> Result<SampleReport> {
    cfg.validate()?;
    let (jet, v) = cfg.resolve()?;
    if !check_hypothesis(&jet, &v)? {
        return Err(precondition(
            "pi(V) + E^{p-1}(a) does not fill T J^{p-1}; sampling needs the transversality hypothesis",
        ));
    }
    let d = jet.dims().clone();
    if let Some(z) = &cfg.planted {
        if (z.n(), z.q(), z.p()) != (d.n, d.q, d.p) {
            return Err(invalid(
                "planted fiber point does not match the instance shape",
            ));
        }
    }
    let chunks: Vec<u64> = (0..cfg.count.div_ceil(CHUNK)).collect();
    let run = |&k: &u64| -> Result<BTreeMap<usize, u64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k);
        let bound = cfg.bound as i64;
        let len = CHUNK.min(cfg.count - k * CHUNK);
        let mut hist = BTreeMap::new();
        for i in 0..len {
            let values: Vec<Rational> = (0..d.dim_next_fiber())
                .map(|_| rational::int(rng.random_range(-bound..=bound)))
                .collect();
            let z = match &cfg.planted {
                Some(z) if k == 0 && i == 0 => z.clone(),
                _ => FiberPoint::from_values(d.n, d.q, d.p, values)?,
            };
            *hist.entry(rank(&assemble_m(&jet, &v, &z)?)).or_insert(0) += 1;
        }
        Ok(hist)
    };
    let parts: Vec<Result<BTreeMap<usize, u64>>> = if jobs <= 1 {
        chunks.iter().map(run).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(|| chunks.par_iter().map(run).collect())
    };
    let mut rank_histogram = BTreeMap::new();
    for part in parts {
        for (r, k) in part? {
            *rank_histogram.entry(r).or_insert(0) += k;
        }
    }
    let hits_in_z: u64 = rank_histogram.range(..d.dim_jet).map(|(_, k)| k).sum();
    Ok(SampleReport {
        n: d.n,
        q: d.q,
        p: d.p,
        m: v.dim(),
        dim_jet: d.dim_jet,
        seed: cfg.seed,
        bound: cfg.bound,
        total: cfg.count,
        hits_in_z,
        hit_fraction: hits_in_z as f64 / cfg.count as f64,
        rank_histogram,
    })
}

// ---------------------------------------------------------------------------
// JSON: {"n","q","p","c"} or {"jet","V"}, plus "count", "bound", "seed"
// (decimal string) and an optional "planted" fiber point.

fn default_count() -> u64 {
    10_000
}

fn default_bound() -> u64 {
    100
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    jet: Option<Jet>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    v: Option<Vec<Vec<String>>>,
    #[serde(default = "default_count")]
    count: u64,
    #[serde(default = "default_bound")]
    bound: u64,
    seed: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    planted: Option<FiberPoint>,
}

impl Serialize for SampleConfig {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut repr = ConfigRepr {
            n: None,
            q: None,
            p: None,
            c: None,
            jet: None,
            v: None,
            count: self.count,
            bound: self.bound,
            seed: self.seed.to_string(),
            planted: self.planted.clone(),
        };
        match &self.target {
            SampleTarget::Witness { n, q, p, c } => {
                (repr.n, repr.q, repr.p, repr.c) = (Some(*n), Some(*q), Some(*p), Some(*c));
            }
            SampleTarget::Explicit { jet, v } => {
                repr.jet = Some(jet.clone());
                repr.v = Some(
                    v.basis()
                        .iter()
                        .map(|row| row.iter().map(rational::format).collect())
                        .collect(),
                );
            }
        }
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SampleConfig {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ConfigRepr::deserialize(de)?;
        let seed = repr.seed.parse::<u64>().map_err(|_| {
            D::Error::custom(format!(
                "seed `{}` is not a 64-bit unsigned integer",
                repr.seed
            ))
        })?;
        let target = match (repr.n, repr.q, repr.p, repr.c, repr.jet, repr.v) {
            (Some(n), Some(q), Some(p), Some(c), None, None) => {
                SampleTarget::Witness { n, q, p, c }
            }
            (None, None, None, None, Some(jet), Some(rows)) => {
                let basis = rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|t| rational::parse(t))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(D::Error::custom)?;
                let v =
                    TangentSubspace::new(jet.dims().dim_jet, basis).map_err(D::Error::custom)?;
                SampleTarget::Explicit { jet, v }
            }
            _ => {
                return Err(D::Error::custom(
                    "give either all of n, q, p, c or both jet and V",
                ))
            }
        };
        let cfg = SampleConfig {
            target,
            count: repr.count,
            bound: repr.bound,
            seed,
            planted: repr.planted,
        };
        cfg.validate().map_err(D::Error::custom)?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_instance_hits_the_hyperplane() {
        // n = q = p = 1, V = span{x, y}: rank drops exactly when y'' = 0
        let cfg = SampleConfig::witness(1, 1, 1, 1, 4000, 10, 7);
        let r = sample_fiber(&cfg, 1).unwrap();
        assert_eq!(r.total, 4000);
        assert_eq!(r.rank_histogram.values().sum::<u64>(), 4000);
        assert_eq!(r.rank_histogram.get(&2).copied().unwrap_or(0), r.hits_in_z);
        // expected 4000/21 ≈ 190, sd ≈ 13.5
        assert!(
            (r.hits_in_z as f64 - 4000.0 / 21.0).abs() < 4.0 * 13.5,
            "{}",
            r.hits_in_z
        );
    }

    #[test]
    fn independent_of_jobs_and_deterministic() {
        let cfg = SampleConfig::witness(2, 1, 1, 1, 3000, 3, 11);
        let a = sample_fiber(&cfg, 1).unwrap();
        let b = sample_fiber(&cfg, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(a.rank_histogram.keys().all(|&r| r >= a.m && r <= a.dim_jet));
    }

    #[test]
    fn full_codimension_rarely_hits() {
        let cfg = SampleConfig::witness(2, 1, 2, 2, 2000, 100, 3);
        let r = sample_fiber(&cfg, 2).unwrap();
        assert!(r.hit_fraction <= 1e-2, "{}", r.hit_fraction);
    }

    #[test]
    fn planted_witness_is_a_hit() {
        let inst = degenerate_witness(2, 2, 1, 2).unwrap();
        let mut cfg = SampleConfig::witness(2, 2, 1, 2, 1, 100, 0);
        cfg.planted = Some(inst.z0);
        let r = sample_fiber(&cfg, 1).unwrap();
        assert_eq!((r.total, r.hits_in_z), (1, 1));
    }

    #[test]
    fn config_json() {
        let cfg: SampleConfig =
            serde_json::from_str(r#"{"n":1,"q":1,"p":1,"c":1,"seed":"18446744073709551615"}"#)
                .unwrap();
        assert_eq!((cfg.count, cfg.bound, cfg.seed), (10_000, 100, u64::MAX));
        let back: SampleConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(serde_json::from_str::<SampleConfig>(r#"{"n":1,"q":1,"p":1,"seed":"1"}"#).is_err());
        assert!(serde_json::from_str::<SampleConfig>(
            r#"{"n":1,"q":1,"p":1,"c":1,"seed":"1","count":0}"#
        )
        .is_err());
        assert!(
            serde_json::from_str::<SampleConfig>(r#"{"n":1,"q":1,"p":1,"c":1,"seed":"-1"}"#)
                .is_err()
        );
        let explicit = r#"{"jet":{"n":1,"q":1,"p":1,"values":{}},"V":[["1","0","0"],["0","1","0"]],"seed":"5","count":10}"#;
        let cfg: SampleConfig = serde_json::from_str(explicit).unwrap();
        assert_eq!(sample_fiber(&cfg, 1).unwrap().total, 10);
    }

    #[test]
    fn hypothesis_failure_is_an_error() {
        // V = span{y'} misses the x and y directions of T J^0
        let cfg: SampleConfig = serde_json::from_str(
            r#"{"jet":{"n":1,"q":1,"p":1,"values":{}},"V":[["0","0","1"]],"seed":"5","count":10}"#,
        )
        .unwrap();
        assert!(matches!(sample_fiber(&cfg, 1), Err(Error::Precondition(_))));
    }
}
