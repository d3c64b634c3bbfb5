//! Classical PROMETHEE I and II for a fixed weight vector.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PerformanceTable;
use crate::scalar::Scalar;

/// Tolerance under which two flows are treated as equal.
pub const FLOW_EQ_TOL: f64 = 1e-9;

/// Piecewise-linear preference degree of a difference `d` given thresholds
/// `q <= p`. With `q == p` this is the usual 0/1 step, 1 iff `d > q`.
pub fn preference_degree<T: Scalar>(d: T, q: T, p: T) -> T {
    if d <= q {
        T::zero()
    } else if d >= p {
        T::one()
    } else {
        (d - q) / (p - q)
    }
}

/// Non-negative criterion weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector<T>(Vec<T>);

impl<T: Scalar> WeightVector<T> {
    pub fn new(w: Vec<T>) -> Result<Self> {
        if w.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::validation("weights must be finite and non-negative"));
        }
        let sum: T = w.iter().copied().sum();
        if (sum - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::validation(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(WeightVector(w))
    }

    pub fn equal(n: usize) -> Self {
        WeightVector(vec![T::one() / T::lit(n as f64); n])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Positive, negative and net flow of one alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowTriple<T> {
    pub positive: T,
    pub negative: T,
    pub net: T,
}

impl<T: Scalar> FlowTriple<T> {
    pub fn new(positive: T, negative: T) -> Self {
        FlowTriple {
            positive,
            negative,
            net: positive - negative,
        }
    }
}

/// Per-criterion preference degrees `P_j(a, b)` for every ordered pair,
/// computed once from the table's thresholds.
#[derive(Debug, Clone)]
pub struct PreferenceDegrees<T> {
    m: usize,
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> PreferenceDegrees<T> {
    pub fn new(table: &PerformanceTable<T>) -> Self {
        let (m, n) = (table.m(), table.n());
        let mut data = Vec::with_capacity(m * m * n);
        for a in 0..m {
            for b in 0..m {
                for (j, c) in table.criteria().iter().enumerate() {
                    data.push(preference_degree(
                        table.difference_unchecked(j, a, b),
                        c.q,
                        c.p,
                    ));
                }
            }
        }
        PreferenceDegrees { m, n, data }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `[P_1(a,b), ..., P_n(a,b)]`.
    pub fn pair(&self, a: usize, b: usize) -> &[T] {
        let start = (a * self.m + b) * self.n;
        &self.data[start..start + self.n]
    }

    /// `pi(a, b) = sum_j w_j P_j(a, b)`.
    pub fn aggregated(&self, w: &[T], a: usize, b: usize) -> T {
        crate::scalar::dot(w, self.pair(a, b))
    }

    /// Dense `m x m` matrix of `pi(a, b)`, row-major.
    pub fn pi_matrix(&self, w: &[T]) -> Vec<T> {
        let m = self.m;
        let mut pi = vec![T::zero(); m * m];
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    pi[a * m + b] = self.aggregated(w, a, b);
                }
            }
        }
        pi
    }

    pub fn flows(&self, w: &[T]) -> Vec<FlowTriple<T>> {
        flows_from_pi(&self.pi_matrix(w), self.m)
    }
}

fn flows_from_pi<T: Scalar>(pi: &[T], m: usize) -> Vec<FlowTriple<T>> {
    let scale = T::one() / T::lit((m - 1) as f64);
    (0..m)
        .map(|a| {
            let mut plus = T::zero();
            let mut minus = T::zero();
            for b in (0..m).filter(|&b| b != a) {
                plus += pi[a * m + b];
                minus += pi[b * m + a];
            }
            FlowTriple::new(plus * scale, minus * scale)
        })
        .collect()
}

pub fn aggregated_preference<T: Scalar>(
    table: &PerformanceTable<T>,
    w: &WeightVector<T>,
    a: usize,
    b: usize,
) -> Result<T> {
    check_weights(table, w)?;
    table
        .criteria()
        .iter()
        .zip(w.as_slice())
        .enumerate()
        .try_fold(T::zero(), |acc, (j, (c, &wj))| {
            Ok(acc + wj * preference_degree(table.difference(j, a, b)?, c.q, c.p))
        })
}

pub fn classical_flows<T: Scalar>(
    table: &PerformanceTable<T>,
    w: &WeightVector<T>,
) -> Result<Vec<FlowTriple<T>>> {
    check_weights(table, w)?;
    Ok(PreferenceDegrees::new(table).flows(w.as_slice()))
}

fn check_weights<T: Scalar>(table: &PerformanceTable<T>, w: &WeightVector<T>) -> Result<()> {
    if w.len() != table.n() {
        return Err(Error::validation(format!(
            "weight vector has {} entries for {} criteria",
            w.len(),
            table.n()
        )));
    }
    Ok(())
}

/// Outcome of comparing `a` (row) with `b` (column).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRelation {
    /// `a` is preferred to `b`.
    Preferred,
    /// `b` is preferred to `a`.
    Dispreferred,
    Indifferent,
    Incomparable,
    /// Diagonal entry.
    Same,
}

/// PROMETHEE I partial preorder as a full `m x m` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Promethee1Relation {
    m: usize,
    rel: Vec<PairRelation>,
}

impl Promethee1Relation {
    pub fn get(&self, a: usize, b: usize) -> PairRelation {
        self.rel[a * self.m + b]
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

pub(crate) fn compare_p1<T: Scalar>(
    fa: &FlowTriple<T>,
    fb: &FlowTriple<T>,
    tol: T,
) -> PairRelation {
    let plus = fa.positive - fb.positive;
    let minus = fa.negative - fb.negative;
    let plus_eq = plus.abs() <= tol;
    let minus_eq = minus.abs() <= tol;
    if plus_eq && minus_eq {
        return PairRelation::Indifferent;
    }
    // at least one side is strict here
    if plus >= -tol && minus <= tol {
        PairRelation::Preferred
    } else if plus <= tol && minus >= -tol {
        PairRelation::Dispreferred
    } else {
        PairRelation::Incomparable
    }
}

pub fn promethee1_relation<T: Scalar>(flows: &[FlowTriple<T>]) -> Promethee1Relation {
    let m = flows.len();
    let tol = T::tol(FLOW_EQ_TOL);
    let mut rel = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            rel.push(if a == b {
                PairRelation::Same
            } else {
                compare_p1(&flows[a], &flows[b], tol)
            });
        }
    }
    Promethee1Relation { m, rel }
}

/// PROMETHEE II complete preorder by net flow.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranking {
    /// 1-based rank of each alternative; tied alternatives share the better rank.
    pub ranks: Vec<usize>,
    /// Alternatives by decreasing net flow (index order among ties).
    pub order: Vec<usize>,
}

pub(crate) fn ranks_from_net<T: Scalar>(net: &[T], tol: T, out: &mut [usize]) {
    for (i, r) in out.iter_mut().enumerate() {
        *r = 1 + net.iter().filter(|&&nk| nk > net[i] + tol).count();
    }
}

pub fn promethee2_relation<T: Scalar>(flows: &[FlowTriple<T>]) -> Ranking {
    let net: Vec<T> = flows.iter().map(|f| f.net).collect();
    let mut ranks = vec![0; net.len()];
    ranks_from_net(&net, T::tol(FLOW_EQ_TOL), &mut ranks);
    let mut order: Vec<usize> = (0..net.len()).collect();
    order.sort_by(|&a, &b| ranks[a].cmp(&ranks[b]).then(a.cmp(&b)));
    Ranking { ranks, order }
}

impl Ranking {
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.ranks[a] < self.ranks[b]
    }

    pub fn indifferent(&self, a: usize, b: usize) -> bool {
        self.ranks[a] == self.ranks[b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::students;
    use crate::model::{Criterion, Direction};
    use proptest::prelude::*;

    fn ft(p: f64, n: f64) -> FlowTriple<f64> {
        FlowTriple::new(p, n)
    }

    #[test]
    fn degree_branches() {
        assert_eq!(preference_degree(2.0, 1.0, 3.0), 0.5);
        assert_eq!(preference_degree(0.0, 0.0, 2.0), 0.0);
        assert_eq!(preference_degree(0.0, 1.5, 2.0), 0.0);
        assert_eq!(preference_degree(4.0, 0.0, 0.0), 1.0);
        assert_eq!(preference_degree(0.0, 0.0, 0.0), 0.0);
        assert_eq!(preference_degree(1e-12, 0.0, 0.0), 1.0);
        assert_eq!(preference_degree(5.0, 1.0, 3.0), 1.0);
    }

    #[test]
    fn aggregated_on_students() {
        let t = students::<f64>();
        let w = WeightVector::equal(3);
        // s3 beats s2 on M and P
        let pi = aggregated_preference(&t, &w, 2, 1).unwrap();
        assert!((pi - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(aggregated_preference(&t, &w, 4, 4).unwrap(), 0.0);
    }

    #[test]
    fn all_criteria_preferred_gives_unit_pi() {
        let w = WeightVector::new(vec![0.2, 0.5, 0.3]).unwrap();
        let d = PerformanceTable::<f64>::new(
            vec![
                Criterion::usual("a"),
                Criterion::usual("b"),
                Criterion::usual("c"),
            ],
            vec!["x".into(), "y".into()],
            vec![vec![2.0, 2.0, 2.0], vec![1.0, 1.0, 1.0]],
        )
        .unwrap();
        assert!((aggregated_preference(&d, &w, 0, 1).unwrap() - 1.0).abs() < 1e-15);
        let flows = classical_flows(&d, &w).unwrap();
        assert!((flows[0].positive - 1.0).abs() < 1e-15);
        assert_eq!(flows[0].negative, 0.0);
    }

    #[test]
    fn identical_alternatives_have_zero_flows() {
        let d = PerformanceTable::new(
            vec![
                Criterion::new("a", Direction::Maximize, 0.5, 1.0),
                Criterion::usual("b"),
            ],
            vec!["x".into(), "y".into()],
            vec![vec![3.0, 4.0], vec![3.0, 4.0]],
        )
        .unwrap();
        let flows = classical_flows(&d, &WeightVector::equal(2)).unwrap();
        for f in flows {
            assert_eq!((f.positive, f.negative, f.net), (0.0, 0.0, 0.0));
        }
    }

    /// Net flows of the student table under equal weights, tabulated by
    /// hand-rolled pairwise counting of sign wins.
    #[test]
    fn students_equal_weights_against_pairwise_tabulation() {
        let t = students::<f64>();
        let g = t.evaluations();
        let mut oracle = [0.0f64; 8];
        for a in 0..8 {
            let mut wins = 0i32;
            let mut losses = 0i32;
            for b in 0..8 {
                for j in 0..3 {
                    if g[a][j] > g[b][j] {
                        wins += 1;
                    }
                    if g[a][j] < g[b][j] {
                        losses += 1;
                    }
                }
            }
            oracle[a] = (wins - losses) as f64 / 3.0 / 7.0;
        }
        let flows = classical_flows(&t, &WeightVector::equal(3)).unwrap();
        for (f, o) in flows.iter().zip(oracle) {
            assert!((f.net - o).abs() < 1e-12, "{} vs {}", f.net, o);
        }
        let ranking = promethee2_relation(&flows);
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(ranking.prefers(a, b), oracle[a] > oracle[b] + 1e-9);
            }
        }
    }

    #[test]
    fn promethee1_shapes() {
        let rel = promethee1_relation(&[ft(0.6, 0.2), ft(0.4, 0.3)]);
        assert_eq!(rel.get(0, 1), PairRelation::Preferred);
        assert_eq!(rel.get(1, 0), PairRelation::Dispreferred);
        assert_eq!(rel.get(0, 0), PairRelation::Same);
        let rel = promethee1_relation(&[ft(0.5, 0.3), ft(0.5, 0.3)]);
        assert_eq!(rel.get(0, 1), PairRelation::Indifferent);
        let rel = promethee1_relation(&[ft(0.6, 0.4), ft(0.5, 0.2)]);
        assert_eq!(rel.get(0, 1), PairRelation::Incomparable);
        assert_eq!(rel.get(1, 0), PairRelation::Incomparable);
        // one equality, one strict
        let rel = promethee1_relation(&[ft(0.5, 0.2), ft(0.5, 0.3)]);
        assert_eq!(rel.get(0, 1), PairRelation::Preferred);
    }

    #[test]
    fn promethee2_shapes() {
        let r = promethee2_relation(&[ft(0.3, 0.0), ft(0.1, 0.0), ft(0.0, 0.4)]);
        assert_eq!(r.ranks, vec![1, 2, 3]);
        assert_eq!(r.order, vec![0, 1, 2]);
        let r = promethee2_relation(&[ft(0.2, 0.1), ft(0.3, 0.2), ft(0.1, 0.0)]);
        assert_eq!(r.ranks, vec![1, 1, 1]);
        let r = promethee2_relation(&[ft(0.0, 0.1), ft(0.3, 0.0), ft(0.3, 0.0)]);
        assert_eq!(r.ranks, vec![3, 1, 1]);
    }

    #[test]
    fn single_precision_flows() {
        let t = students::<f32>();
        let flows = classical_flows(&t, &WeightVector::equal(3)).unwrap();
        let sum: f32 = flows.iter().map(|f| f.net).sum();
        assert!(sum.abs() < 1e-5);
    }

    fn weights() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.001f64..1.0, 3).prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn flows_sum_to_zero(w in weights(), q in 0.0f64..2.0, extra in 0.0f64..3.0) {
            let t = students::<f64>().with_thresholds(q, q + extra).unwrap();
            let flows = classical_flows(&t, &WeightVector::new(w).unwrap()).unwrap();
            let total: f64 = flows.iter().map(|f| f.net).sum();
            prop_assert!(total.abs() < 1e-9);
            for f in &flows {
                prop_assert!((f.net - (f.positive - f.negative)).abs() < 1e-12);
            }
        }

        #[test]
        fn degree_is_non_decreasing(q in 0.0f64..3.0, extra in 0.0f64..3.0) {
            let p = q + extra;
            let mut prev = 0.0;
            for k in -100..=100 {
                let v = preference_degree(k as f64 * 0.07, q, p);
                prop_assert!(v >= prev && (0.0..=1.0).contains(&v));
                prev = v;
            }
        }

        #[test]
        fn translation_invariance(w in weights(), shift in -50.0f64..50.0, j in 0usize..3) {
            let t = students::<f64>().with_thresholds(0.5, 2.0).unwrap();
            let mut rows = t.evaluations().to_vec();
            for r in rows.iter_mut() { r[j] += shift; }
            let shifted = PerformanceTable::new(t.criteria().to_vec(), t.alternatives().to_vec(), rows).unwrap();
            let w = WeightVector::new(w).unwrap();
            let f1 = classical_flows(&t, &w).unwrap();
            let f2 = classical_flows(&shifted, &w).unwrap();
            for (a, b) in f1.iter().zip(&f2) {
                prop_assert!((a.net - b.net).abs() < 1e-9);
                prop_assert!((a.positive - b.positive).abs() < 1e-9);
            }
        }

        #[test]
        fn p1_preference_implies_net_order(w in weights()) {
            let t = students::<f64>().with_thresholds(0.0, 3.0).unwrap();
            let flows = classical_flows(&t, &WeightVector::new(w).unwrap()).unwrap();
            let rel = promethee1_relation(&flows);
            for a in 0..8 {
                for b in 0..8 {
                    if rel.get(a, b) == PairRelation::Preferred {
                        prop_assert!(flows[a].net > flows[b].net - 2e-9);
                        prop_assert_ne!(rel.get(b, a), PairRelation::Preferred);
                    }
                    if matches!(rel.get(a, b), PairRelation::Indifferent | PairRelation::Incomparable) {
                        prop_assert_eq!(rel.get(a, b), rel.get(b, a));
                    }
                }
            }
        }
    }
}
