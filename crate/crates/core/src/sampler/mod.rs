//! Uniform sampling of compatible parameter vectors by hit-and-run over the
//! polytope of a constraint system with `epsilon` fixed.
//!
//! Chains use ChaCha20 seeded from the 64-bit seed, one stream per chain.

mod polytope;

pub use polytope::Polytope;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elicitation::ConstraintSystem;
use crate::error::{Error, Result};
use crate::lp::{max_epsilon, LpConfig, LpStatus};
use crate::scalar::{dot, Scalar};

const CHORD_MIN: f64 = 1e-12;
const DIRECTION_RETRIES: usize = 100;
/// Feasibility bound every emitted sample must meet.
pub const SAMPLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub sample_count: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    /// Value `epsilon` is fixed to while sampling.
    pub delta_strict: f64,
    /// Independent chains; samples are split evenly and concatenated in chain order.
    pub chains: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            sample_count: 100_000,
            burn_in: 1000,
            thinning: 1,
            seed: 0,
            delta_strict: 0.0,
            chains: 1,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 || self.thinning == 0 || self.chains == 0 {
            return Err(Error::validation(
                "sample_count, thinning and chains must be at least 1",
            ));
        }
        if !self.delta_strict.is_finite() || self.delta_strict < 0.0 {
            return Err(Error::validation(
                "delta_strict must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

/// Reduced polytope plus a strictly interior start point.
#[derive(Debug, Clone)]
pub struct SamplingDomain<T> {
    pub polytope: Polytope<T>,
    pub start: Vec<T>,
    pub epsilon_star: T,
    pub names: Vec<String>,
}

/// Fixes `epsilon = delta_strict`, removes the equalities and finds the start
/// point halfway between the max-epsilon vertex and the Chebyshev centre.
pub fn build_polytope<T: Scalar>(
    system: &ConstraintSystem<T>,
    delta_strict: T,
    lp: &LpConfig<T>,
) -> Result<SamplingDomain<T>> {
    let system = system.deduplicated();
    let outcome = max_epsilon(&system, lp)?;
    if outcome.status != LpStatus::Optimal
        || outcome.epsilon_star < delta_strict - lp.feasibility_tol
    {
        return Err(Error::Infeasible {
            epsilon: outcome.epsilon_star.as_f64(),
        });
    }
    let rows = system.fix_epsilon(delta_strict);
    let polytope = Polytope::from_rows(&rows, system.index().params(), lp.feasibility_tol)?;
    if polytope.dim() == 0 {
        return Err(Error::Sampler("compatible set is a single point".into()));
    }
    let vertex = polytope.project(outcome.params());
    let (centre, radius) = polytope.chebyshev_center(lp.feasibility_tol)?;
    if radius <= T::lit(CHORD_MIN) {
        return Err(Error::Sampler(format!(
            "compatible set has empty interior (inscribed radius {radius})"
        )));
    }
    let half = T::lit(0.5);
    let start = vertex
        .iter()
        .zip(&centre)
        .map(|(&v, &c)| (v + c) * half)
        .collect();
    let mut names = system.index().names();
    names.pop();
    Ok(SamplingDomain {
        polytope,
        start,
        epsilon_star: outcome.epsilon_star,
        names,
    })
}

/// Parameter vectors, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch<T> {
    names: Vec<String>,
    data: Vec<T>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    columns: Vec<String>,
    rows: usize,
    dtype: String,
    layout: String,
}

impl<T: Scalar> SampleBatch<T> {
    pub fn new(names: Vec<String>, data: Vec<T>) -> Result<Self> {
        if names.is_empty() || !data.len().is_multiple_of(names.len()) {
            return Err(Error::validation("sample data does not fill whole rows"));
        }
        Ok(SampleBatch { names, data })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> usize {
        self.names.len()
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[T] {
        let c = self.columns();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.data.chunks_exact(self.columns())
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// The first `k` columns of every row.
    pub fn leading_columns(&self, k: usize) -> Self {
        let data = self.rows().flat_map(|r| r[..k].iter().copied()).collect();
        SampleBatch {
            names: self.names[..k].to_vec(),
            data,
        }
    }

    /// Rows appended in order.
    pub fn concat(batches: Vec<Self>) -> Result<Self> {
        let mut it = batches.into_iter();
        let mut first = it
            .next()
            .ok_or_else(|| Error::validation("no batches to concatenate"))?;
        for b in it {
            if b.names != first.names {
                return Err(Error::validation("batches have different columns"));
            }
            first.data.extend(b.data);
        }
        Ok(first)
    }

    /// Writes row-major little-endian f64 values to `path` and a JSON
    /// sidecar with the column names next to it.
    pub fn dump(&self, path: &Path) -> Result<PathBuf> {
        let mut w = BufWriter::new(File::create(path)?);
        for v in &self.data {
            w.write_all(&v.as_f64().to_le_bytes())?;
        }
        w.flush()?;
        let sidecar = sidecar_path(path);
        let meta = Sidecar {
            columns: self.names.clone(),
            rows: self.len(),
            dtype: "f64le".into(),
            layout: "row-major".into(),
        };
        std::fs::write(&sidecar, serde_json::to_string_pretty(&meta)?)?;
        Ok(sidecar)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let meta: Sidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
        let mut bytes = Vec::new();
        BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
        if bytes.len() != meta.rows * meta.columns.len() * 8 {
            return Err(Error::validation(
                "sample dump size disagrees with its sidecar",
            ));
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| T::lit(f64::from_le_bytes(c.try_into().expect("8-byte chunk"))))
            .collect();
        SampleBatch::new(meta.columns, data)
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// One hit-and-run chain from `start`, recording `count` points.
pub fn run_chain<T: Scalar>(
    poly: &Polytope<T>,
    start: &[T],
    count: usize,
    burn_in: usize,
    thinning: usize,
    rng: &mut ChaCha20Rng,
) -> Result<Vec<T>> {
    let d = poly.dim();
    let rows = poly.inequality_count();
    let mut y = start.to_vec();
    let mut slack: Vec<T> = (0..rows)
        .map(|i| poly.rhs(i) - dot(poly.row(i), &y))
        .collect();
    let mut u = vec![T::zero(); d];
    let mut au = vec![T::zero(); rows];
    let mut out = vec![T::zero(); count * poly.full_dim()];
    let total = burn_in + count * thinning;
    let chord_min = T::lit(CHORD_MIN);
    let mut recorded = 0;
    for step in 0..total {
        let mut chord = None;
        for _ in 0..DIRECTION_RETRIES {
            let mut norm = T::zero();
            for v in u.iter_mut() {
                *v = T::standard_normal(rng);
                norm += *v * *v;
            }
            let norm = norm.sqrt();
            if norm == T::zero() {
                continue;
            }
            for v in u.iter_mut() {
                *v /= norm;
            }
            let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
            for i in 0..rows {
                let a = dot(poly.row(i), &u);
                au[i] = a;
                let s = slack[i].max(T::zero());
                if a > T::zero() {
                    hi = hi.min(s / a);
                } else if a < T::zero() {
                    lo = lo.max(s / a);
                }
            }
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Sampler("polytope is unbounded".into()));
            }
            if hi - lo >= chord_min {
                chord = Some((lo, hi));
                break;
            }
        }
        let (lo, hi) = chord.ok_or_else(|| {
            Error::Sampler(format!("empty chord after {DIRECTION_RETRIES} directions"))
        })?;
        let t = lo + (hi - lo) * T::unit_uniform(rng);
        for (yv, &uv) in y.iter_mut().zip(&u) {
            *yv += t * uv;
        }
        for (s, &a) in slack.iter_mut().zip(&au) {
            *s -= t * a;
        }
        if step >= burn_in && (step - burn_in).is_multiple_of(thinning) {
            let full = poly.full_dim();
            poly.lift_into(&y, &mut out[recorded * full..(recorded + 1) * full]);
            recorded += 1;
        }
    }
    debug_assert_eq!(recorded, count);
    Ok(out)
}

/// Runs `cfg.chains` chains (in parallel) and checks every sample against the
/// system with `epsilon = delta_strict`.
pub fn hit_and_run<T: Scalar>(
    system: &ConstraintSystem<T>,
    domain: &SamplingDomain<T>,
    cfg: &SamplerConfig,
) -> Result<SampleBatch<T>> {
    cfg.validate()?;
    let chains = cfg.chains;
    let per_chain: Vec<usize> = (0..chains)
        .map(|c| cfg.sample_count / chains + usize::from(c < cfg.sample_count % chains))
        .collect();
    let parts: Vec<Vec<T>> = per_chain
        .par_iter()
        .enumerate()
        .map(|(c, &count)| {
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c as u64);
            run_chain(
                &domain.polytope,
                &domain.start,
                count,
                cfg.burn_in,
                cfg.thinning,
                &mut rng,
            )
        })
        .collect::<Result<_>>()?;
    let data: Vec<T> = parts.into_iter().flatten().collect();
    let batch = SampleBatch::new(domain.names.clone(), data)?;

    let delta = T::lit(cfg.delta_strict);
    let tol = T::lit(SAMPLE_TOL);
    let rows = system.deduplicated().fix_epsilon(delta);
    let worst = batch
        .rows()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|x| {
            rows.iter()
                .map(|r| r.violation(x))
                .fold(T::zero(), |a, b| a.max(b))
        })
        .reduce(T::zero, |a, b| a.max(b));
    if worst > tol {
        return Err(Error::Sampler(format!("sample violates a row by {worst}")));
    }
    Ok(batch)
}

/// `build_polytope` followed by `hit_and_run`.
pub fn sample<T: Scalar>(
    system: &ConstraintSystem<T>,
    cfg: &SamplerConfig,
    lp: &LpConfig<T>,
) -> Result<SampleBatch<T>> {
    cfg.validate()?;
    let domain = build_polytope(system, T::lit(cfg.delta_strict), lp)?;
    hit_and_run(system, &domain, cfg)
}
