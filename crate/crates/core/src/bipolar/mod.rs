//! Bipolar PROMETHEE: signed per-criterion preferences aggregated by the
//! bipolar Choquet integral of a symmetric 2-additive bicapacity.

mod general;
mod params;

pub use general::{choquet_definitional, GeneralBicapacity};
pub use params::{
    BicapacityParams, MonotonicityCondition, MonotonicityFamily, ParamLayout, ParamSymbol,
    DEFAULT_MAX_CRITERIA,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PerformanceTable;
use crate::promethee::{
    promethee1_relation, promethee2_relation, FlowTriple, PreferenceDegrees, Promethee1Relation,
    Ranking,
};
use crate::scalar::Scalar;

/// `x_j = P_j(a,b)` when positive, otherwise `-P_j(b,a)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BipolarPreferenceVector<T>(pub Vec<T>);

impl<T: Scalar> BipolarPreferenceVector<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        BipolarPreferenceVector(self.0.iter().map(|&v| -v).collect())
    }
}

pub fn bipolar_preference_vector<T: Scalar>(
    table: &PerformanceTable<T>,
    a: usize,
    b: usize,
) -> Result<BipolarPreferenceVector<T>> {
    for idx in [a, b] {
        if idx >= table.m() {
            return Err(Error::IndexOutOfRange {
                what: "alternative",
                index: idx,
                len: table.m(),
            });
        }
    }
    let degrees = PreferenceDegrees::new(table);
    Ok(BipolarPreferenceVector(signed_pair(&degrees, a, b)))
}

fn signed_pair<T: Scalar>(degrees: &PreferenceDegrees<T>, a: usize, b: usize) -> Vec<T> {
    degrees
        .pair(a, b)
        .iter()
        .zip(degrees.pair(b, a))
        .map(|(&ab, &ba)| if ab > T::zero() { ab } else { -ba })
        .collect()
}

/// Bipolar preference vectors for every ordered pair of a table.
#[derive(Debug, Clone)]
pub struct BipolarPreferences<T> {
    m: usize,
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> BipolarPreferences<T> {
    pub fn new(table: &PerformanceTable<T>) -> Self {
        Self::from_degrees(&PreferenceDegrees::new(table))
    }

    pub fn from_degrees(degrees: &PreferenceDegrees<T>) -> Self {
        let (m, n) = (degrees.m(), degrees.n());
        let mut data = Vec::with_capacity(m * m * n);
        for a in 0..m {
            for b in 0..m {
                data.extend(signed_pair(degrees, a, b));
            }
        }
        BipolarPreferences { m, n, data }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vector(&self, a: usize, b: usize) -> &[T] {
        let start = (a * self.m + b) * self.n;
        &self.data[start..start + self.n]
    }

    /// Bipolar positive, negative and net flows.
    pub fn flows(&self, params: &BicapacityParams<T>) -> Vec<FlowTriple<T>> {
        let m = self.m;
        let scale = T::one() / T::lit((m - 1) as f64);
        (0..m)
            .map(|a| {
                let (mut plus, mut minus, mut net) = (T::zero(), T::zero(), T::zero());
                for b in (0..m).filter(|&b| b != a) {
                    let ch = choquet_2additive(self.vector(a, b), params);
                    plus += ch.positive;
                    minus += ch.negative;
                    net += ch.total;
                }
                FlowTriple {
                    positive: plus * scale,
                    negative: minus * scale,
                    net: net * scale,
                }
            })
            .collect()
    }
}

/// The three bipolar Choquet integrals of one preference vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChoquetValue<T> {
    /// `ChB`, the comprehensive preference.
    pub total: T,
    /// `ChB+`, reasons in favour.
    pub positive: T,
    /// `ChB-`, reasons against.
    pub negative: T,
}

/// Closed-form bipolar Choquet integral for a 2-additive decomposable bicapacity.
///
/// Pair interactions are summed over unordered pairs; opposing-power terms
/// over ordered pairs with `x_j > 0 > x_k`.
pub fn choquet_2additive<T: Scalar>(x: &[T], params: &BicapacityParams<T>) -> ChoquetValue<T> {
    let n = x.len();
    debug_assert_eq!(n, params.n());
    let zero = T::zero();
    let mut positive = zero;
    let mut negative = zero;
    for j in 0..n {
        let xj = x[j];
        if xj > zero {
            positive += params.a(j) * xj;
        } else if xj < zero {
            negative -= params.a(j) * xj;
        }
        for k in j + 1..n {
            let xk = x[k];
            if xj > zero && xk > zero {
                positive += params.pair(j, k) * xj.min(xk);
            } else if xj < zero && xk < zero {
                negative -= params.pair(j, k) * xj.max(xk);
            }
        }
        if xj > zero {
            for k in (0..n).filter(|&k| k != j && x[k] < zero) {
                let xk = x[k];
                positive += params.opp_plus(j, k) * xj.min(-xk);
                negative -= params.opp_minus(j, k) * (-xj).max(xk);
            }
        }
    }
    ChoquetValue {
        total: positive - negative,
        positive,
        negative,
    }
}

/// Linear coefficients of `ChB+` and `ChB-` in the parameters for a fixed
/// preference vector: entry `i` is the integral with parameter `i` set to one
/// and every other parameter zero.
pub fn choquet_coefficients<T: Scalar>(x: &[T]) -> (Vec<T>, Vec<T>) {
    let n = x.len();
    let len = ParamLayout::new(n).len();
    let mut unit = vec![T::zero(); len];
    let mut pos = Vec::with_capacity(len);
    let mut neg = Vec::with_capacity(len);
    for i in 0..len {
        unit[i] = T::one();
        let p = BicapacityParams::from_values_unchecked(n, unit.clone())
            .expect("layout length matches");
        let ch = choquet_2additive(x, &p);
        pos.push(ch.positive);
        neg.push(ch.negative);
        unit[i] = T::zero();
    }
    (pos, neg)
}

pub fn bipolar_flows<T: Scalar>(
    table: &PerformanceTable<T>,
    params: &BicapacityParams<T>,
) -> Result<Vec<FlowTriple<T>>> {
    if params.n() != table.n() {
        return Err(Error::validation(format!(
            "parameters for {} criteria, table has {}",
            params.n(),
            table.n()
        )));
    }
    Ok(BipolarPreferences::new(table).flows(params))
}

/// Bipolar PROMETHEE I: the classical rule applied to bipolar flows.
pub fn bipolar_promethee1_relation<T: Scalar>(flows: &[FlowTriple<T>]) -> Promethee1Relation {
    promethee1_relation(flows)
}

/// Bipolar PROMETHEE II: ranking by bipolar net flow.
pub fn bipolar_promethee2_relation<T: Scalar>(flows: &[FlowTriple<T>]) -> Ranking {
    promethee2_relation(flows)
}
