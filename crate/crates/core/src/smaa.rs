//! Monte-Carlo acceptability statistics over a batch of compatible parameters.

use rayon::prelude::*;
use serde::Serialize;

use crate::bipolar::{BicapacityParams, BipolarPreferences, ParamLayout};
use crate::elicitation::ConstraintSystem;
use crate::error::{Error, Result};
use crate::lp::{exact_ror, LpConfig, RorPair};
use crate::model::PerformanceTable;
use crate::promethee::{
    compare_p1, ranks_from_net, FlowTriple, PairRelation, PreferenceDegrees, FLOW_EQ_TOL,
};
use crate::sampler::{SampleBatch, SAMPLE_TOL};
use crate::scalar::Scalar;

/// Samples handled per work unit; partial sums are combined in unit order.
const CHUNK: usize = 1024;
/// Tolerance for the partition identities of the frequency matrices.
pub const FREQUENCY_TOL: f64 = 1e-12;
/// Largest magnitude accepted in the interaction columns of a classical batch.
const CLASSICAL_ZERO: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Bipolar,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Classical => "classical",
            Mode::Bipolar => "bipolar",
        })
    }
}

type Counts = Vec<Vec<u64>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmaaResults<T> {
    pub mode: Mode,
    pub alternatives: Vec<String>,
    pub parameter_names: Vec<String>,
    pub sample_count: usize,
    /// `rank_counts[i][r]`: samples placing alternative `i` at rank `r + 1`.
    pub rank_counts: Counts,
    pub p1_pref: Counts,
    pub p1_indiff: Counts,
    pub p1_incomp: Counts,
    pub p2_pref: Counts,
    pub p2_indiff: Counts,
    /// Mean parameters over samples ranking the alternative first.
    pub central_weights: Vec<Option<Vec<T>>>,
    pub barycenter: Vec<T>,
    pub ror_necessary_approx: Vec<Vec<bool>>,
    pub ror_possible_approx: Vec<Vec<bool>>,
    /// Largest `|net - (positive - negative)|` seen.
    pub max_flow_identity_residual: f64,
    /// Largest `|sum net|` seen.
    pub max_net_sum: f64,
}

struct Partial<T> {
    m: usize,
    rank: Vec<u64>,
    p1_pref: Vec<u64>,
    p1_indiff: Vec<u64>,
    p1_incomp: Vec<u64>,
    p2_pref: Vec<u64>,
    p2_indiff: Vec<u64>,
    first_sum: Vec<Vec<T>>,
    total: Vec<T>,
    identity: f64,
    net_sum: f64,
}

impl<T: Scalar> Partial<T> {
    fn new(m: usize, cols: usize) -> Self {
        Partial {
            m,
            rank: vec![0; m * m],
            p1_pref: vec![0; m * m],
            p1_indiff: vec![0; m * m],
            p1_incomp: vec![0; m * m],
            p2_pref: vec![0; m * m],
            p2_indiff: vec![0; m * m],
            first_sum: vec![vec![T::zero(); cols]; m],
            total: vec![T::zero(); cols],
            identity: 0.0,
            net_sum: 0.0,
        }
    }

    fn record(&mut self, x: &[T], flows: &[FlowTriple<T>], ranks: &mut [usize], tol: T) {
        let m = self.m;
        let net: Vec<T> = flows.iter().map(|f| f.net).collect();
        ranks_from_net(&net, tol, ranks);
        let mut sum = T::zero();
        for (i, f) in flows.iter().enumerate() {
            sum += f.net;
            let r = (f.net - (f.positive - f.negative)).abs().as_f64();
            self.identity = self.identity.max(r);
            self.rank[i * m + ranks[i] - 1] += 1;
            if ranks[i] == 1 {
                for (s, &v) in self.first_sum[i].iter_mut().zip(x) {
                    *s += v;
                }
            }
            for j in (0..m).filter(|&j| j != i) {
                match compare_p1(&flows[i], &flows[j], tol) {
                    PairRelation::Preferred => self.p1_pref[i * m + j] += 1,
                    PairRelation::Indifferent => self.p1_indiff[i * m + j] += 1,
                    PairRelation::Incomparable => self.p1_incomp[i * m + j] += 1,
                    PairRelation::Dispreferred | PairRelation::Same => {}
                }
                let d = net[i] - net[j];
                if d > tol {
                    self.p2_pref[i * m + j] += 1;
                } else if d.abs() <= tol {
                    self.p2_indiff[i * m + j] += 1;
                }
            }
        }
        self.net_sum = self.net_sum.max(sum.abs().as_f64());
        for (s, &v) in self.total.iter_mut().zip(x) {
            *s += v;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        let add = |a: &mut Vec<u64>, b: &[u64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.rank, &other.rank);
        add(&mut self.p1_pref, &other.p1_pref);
        add(&mut self.p1_indiff, &other.p1_indiff);
        add(&mut self.p1_incomp, &other.p1_incomp);
        add(&mut self.p2_pref, &other.p2_pref);
        add(&mut self.p2_indiff, &other.p2_indiff);
        for (a, b) in self.first_sum.iter_mut().zip(&other.first_sum) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += *y);
        }
        self.total
            .iter_mut()
            .zip(&other.total)
            .for_each(|(x, y)| *x += *y);
        self.identity = self.identity.max(other.identity);
        self.net_sum = self.net_sum.max(other.net_sum);
        self
    }
}

enum Evaluator<T> {
    Classical {
        degrees: PreferenceDegrees<T>,
        n: usize,
    },
    Bipolar {
        prefs: BipolarPreferences<T>,
        n: usize,
    },
}

impl<T: Scalar> Evaluator<T> {
    fn flows(&self, x: &[T]) -> Vec<FlowTriple<T>> {
        match self {
            Evaluator::Classical { degrees, n } => degrees.flows(&x[..*n]),
            Evaluator::Bipolar { prefs, n } => {
                let p = BicapacityParams::from_values_unchecked(*n, x.to_vec())
                    .expect("layout checked");
                prefs.flows(&p)
            }
        }
    }
}

fn check_layout<T: Scalar>(
    table: &PerformanceTable<T>,
    batch: &SampleBatch<T>,
    mode: Mode,
) -> Result<()> {
    let n = table.n();
    let full = ParamLayout::new(n).len();
    let cols = batch.columns();
    match mode {
        Mode::Bipolar if cols == full => Ok(()),
        Mode::Classical if cols == n => Ok(()),
        Mode::Classical if cols == full => {
            let zero = T::lit(CLASSICAL_ZERO);
            if batch.rows().all(|r| r[n..].iter().all(|v| v.abs() <= zero)) {
                Ok(())
            } else {
                Err(Error::validation(
                    "classical aggregation over samples with non-zero interactions",
                ))
            }
        }
        _ => Err(Error::validation(format!(
            "{mode} aggregation needs {} columns, batch has {cols}",
            if mode == Mode::Classical { n } else { full }
        ))),
    }
}

/// Evaluates every sample and accumulates the frequency matrices.
pub fn aggregate<T: Scalar>(
    table: &PerformanceTable<T>,
    batch: &SampleBatch<T>,
    mode: Mode,
) -> Result<SmaaResults<T>> {
    if batch.is_empty() {
        return Err(Error::validation("empty sample batch"));
    }
    check_layout(table, batch, mode)?;
    let m = table.m();
    let n = table.n();
    let cols = batch.columns();
    let eval = match mode {
        Mode::Classical => Evaluator::Classical {
            degrees: PreferenceDegrees::new(table),
            n,
        },
        Mode::Bipolar => Evaluator::Bipolar {
            prefs: BipolarPreferences::new(table),
            n,
        },
    };
    let tol = T::tol(FLOW_EQ_TOL);
    let data = batch.as_slice();
    let partials: Vec<Partial<T>> = data
        .par_chunks(CHUNK * cols)
        .map(|chunk| {
            let mut p = Partial::new(m, cols);
            let mut ranks = vec![0; m];
            for x in chunk.chunks_exact(cols) {
                let flows = eval.flows(x);
                p.record(x, &flows, &mut ranks, tol);
            }
            p
        })
        .collect();
    let acc = partials
        .into_iter()
        .reduce(Partial::merge)
        .expect("non-empty batch");

    let s = batch.len();
    let matrix = |v: &[u64]| v.chunks(m).map(<[u64]>::to_vec).collect::<Counts>();
    let inv = T::one() / T::lit(s as f64);
    let central_weights = (0..m)
        .map(|i| {
            let first = acc.rank[i * m];
            (first > 0).then(|| {
                let k = T::one() / T::lit(first as f64);
                acc.first_sum[i].iter().map(|&v| v * k).collect()
            })
        })
        .collect();
    let barycenter = acc.total.iter().map(|&v| v * inv).collect();
    let mut necessary = vec![vec![true; m]; m];
    let mut possible = vec![vec![true; m]; m];
    for i in 0..m {
        for j in (0..m).filter(|&j| j != i) {
            let (pref, ind) = (acc.p2_pref[i * m + j], acc.p2_indiff[i * m + j]);
            let freq = (pref + ind) as f64 / s as f64;
            necessary[i][j] = (freq - 1.0).abs() <= FREQUENCY_TOL;
            possible[i][j] = pref > 0 || ind > 0;
        }
    }
    let results = SmaaResults {
        mode,
        alternatives: table.alternatives().to_vec(),
        parameter_names: batch.names().to_vec(),
        sample_count: s,
        rank_counts: matrix(&acc.rank),
        p1_pref: matrix(&acc.p1_pref),
        p1_indiff: matrix(&acc.p1_indiff),
        p1_incomp: matrix(&acc.p1_incomp),
        p2_pref: matrix(&acc.p2_pref),
        p2_indiff: matrix(&acc.p2_indiff),
        central_weights,
        barycenter,
        ror_necessary_approx: necessary,
        ror_possible_approx: possible,
        max_flow_identity_residual: acc.identity,
        max_net_sum: acc.net_sum,
    };
    results.check_invariants(None, 0.0)?;
    Ok(results)
}

impl<T: Scalar> SmaaResults<T> {
    pub fn m(&self) -> usize {
        self.alternatives.len()
    }

    pub fn fraction(&self, count: u64) -> f64 {
        count as f64 / self.sample_count as f64
    }

    /// `b_i^r` as a fraction; `rank` is one-based.
    pub fn rank_acceptability(&self, i: usize, rank: usize) -> f64 {
        self.fraction(self.rank_counts[i][rank - 1])
    }

    pub fn fractions(&self, counts: &Counts) -> Vec<Vec<f64>> {
        counts
            .iter()
            .map(|r| r.iter().map(|&c| self.fraction(c)).collect())
            .collect()
    }

    /// Structural identities of the estimates; with a system, also checks
    /// that the barycenter and central weights satisfy its rows with
    /// `epsilon = delta`.
    pub fn check_invariants(&self, system: Option<&ConstraintSystem<T>>, delta: f64) -> Result<()> {
        let m = self.m();
        let s = self.sample_count as u64;
        let fail = |what: String| Err(Error::Validation(format!("SMAA invariant: {what}")));
        for i in 0..m {
            if self.rank_counts[i].iter().sum::<u64>() != s {
                return fail(format!("rank row {i} does not sum to one"));
            }
            for j in (0..m).filter(|&j| j != i) {
                let p1 = self.p1_pref[i][j]
                    + self.p1_pref[j][i]
                    + self.p1_indiff[i][j]
                    + self.p1_incomp[i][j];
                if p1 != s {
                    return fail(format!(
                        "PROMETHEE I frequencies for ({i},{j}) do not partition"
                    ));
                }
                if self.p1_indiff[i][j] != self.p1_indiff[j][i]
                    || self.p1_incomp[i][j] != self.p1_incomp[j][i]
                {
                    return fail(format!("PROMETHEE I symmetry broken at ({i},{j})"));
                }
                if self.p2_pref[i][j] + self.p2_pref[j][i] + self.p2_indiff[i][j] != s {
                    return fail(format!(
                        "PROMETHEE II frequencies for ({i},{j}) do not partition"
                    ));
                }
                if self.ror_necessary_approx[i][j] && !self.ror_possible_approx[i][j] {
                    return fail(format!(
                        "approximate necessary without possible at ({i},{j})"
                    ));
                }
            }
            if (self.central_weights[i].is_some()) != (self.rank_counts[i][0] > 0) {
                return fail(format!(
                    "central weights of {i} disagree with first-rank count"
                ));
            }
        }
        if self.max_flow_identity_residual > FLOW_EQ_TOL || self.max_net_sum > FLOW_EQ_TOL {
            return fail(format!(
                "flow identities off by {} / {}",
                self.max_flow_identity_residual, self.max_net_sum
            ));
        }
        if let Some(sys) = system {
            let full = sys.index().params();
            let tol = T::lit(SAMPLE_TOL);
            let rows = sys.deduplicated().fix_epsilon(T::lit(delta));
            let points =
                std::iter::once(&self.barycenter).chain(self.central_weights.iter().flatten());
            for p in points {
                let mut x = p.clone();
                x.resize(full, T::zero());
                if let Some(r) = rows.iter().find(|r| r.violation(&x) > tol) {
                    return fail(format!("mean parameters violate {}", r.provenance));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RorDiscrepancy {
    /// Exactly necessary, yet some sample ranks the pair the other way.
    NecessaryNotApprox,
    /// Some sample prefers the pair, yet it is not exactly possible.
    ApproxNotPossible,
    /// Sampled as always preferred or tied but not exactly necessary (permitted).
    ApproxNecessaryOnly,
    /// Exactly possible but never sampled (permitted).
    PossibleNotSampled,
}

impl RorDiscrepancy {
    /// Whether this kind contradicts a required implication.
    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            RorDiscrepancy::NecessaryNotApprox | RorDiscrepancy::ApproxNotPossible
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RorEntry {
    pub a: usize,
    pub b: usize,
    pub kind: RorDiscrepancy,
}

#[derive(Debug, Clone, Serialize)]
pub struct RorReport {
    pub exact: Vec<Vec<RorPair>>,
    pub entries: Vec<RorEntry>,
}

impl RorReport {
    pub fn violations(&self) -> impl Iterator<Item = &RorEntry> {
        self.entries.iter().filter(|e| e.kind.is_violation())
    }
}

/// Runs the exact pair LPs and compares them with the sampled frequencies.
pub fn validate_against_exact_ror<T: Scalar>(
    results: &SmaaResults<T>,
    system: &ConstraintSystem<T>,
    table: &PerformanceTable<T>,
    cfg: &LpConfig<T>,
) -> Result<RorReport> {
    let exact = exact_ror(system, table, cfg)?;
    let m = results.m();
    let mut entries = Vec::new();
    for a in 0..m {
        for b in (0..m).filter(|&b| b != a) {
            let e = exact[a][b];
            let mut push = |kind| entries.push(RorEntry { a, b, kind });
            if e.necessary && !results.ror_necessary_approx[a][b] {
                push(RorDiscrepancy::NecessaryNotApprox);
            }
            if results.p2_pref[a][b] > 0 && !e.possible {
                push(RorDiscrepancy::ApproxNotPossible);
            }
            if results.ror_necessary_approx[a][b] && !e.necessary {
                push(RorDiscrepancy::ApproxNecessaryOnly);
            }
            if e.possible && !results.ror_possible_approx[a][b] {
                push(RorDiscrepancy::PossibleNotSampled);
            }
        }
    }
    Ok(RorReport { exact, entries })
}
