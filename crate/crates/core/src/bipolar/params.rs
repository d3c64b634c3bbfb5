//! Parameters of a symmetric 2-additive decomposable bicapacity.
//!
//! Column layout for `n` criteria, `(3n^2 - n) / 2` columns in total:
//!
//! * `a_j` for `j = 1..n`,
//! * `a_jk` for unordered pairs `j < k`, lexicographic,
//! * `a+_{j|k}` for ordered pairs `j != k`, lexicographic.
//!
//! The negative-side terms are never stored: `a-_j = a_j`, `a-_jk = a_jk`
//! and `a-_{j|k} = a+_{k|j}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest criteria count for which monotonicity is enumerated by default.
pub const DEFAULT_MAX_CRITERIA: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamSymbol {
    Weight(usize),
    Interaction(usize, usize),
    Opposing(usize, usize),
}

impl fmt::Display for ParamSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ParamSymbol::Weight(j) => write!(f, "a_{}", j + 1),
            ParamSymbol::Interaction(j, k) => write!(f, "a_{},{}", j + 1, k + 1),
            ParamSymbol::Opposing(j, k) => write!(f, "a+_{}|{}", j + 1, k + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamLayout {
    n: usize,
}

impl ParamLayout {
    pub fn new(n: usize) -> Self {
        ParamLayout { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        (3 * self.n * self.n - self.n) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn pair_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn weight(&self, j: usize) -> usize {
        debug_assert!(j < self.n);
        j
    }

    /// Column of `a_jk`; symmetric in its arguments.
    pub fn interaction(&self, j: usize, k: usize) -> usize {
        debug_assert!(j != k && j < self.n && k < self.n);
        let (j, k) = if j < k { (j, k) } else { (k, j) };
        self.n + j * (2 * self.n - j - 1) / 2 + (k - j - 1)
    }

    /// Column of `a+_{j|k}`.
    pub fn opposing(&self, j: usize, k: usize) -> usize {
        debug_assert!(j != k && j < self.n && k < self.n);
        let k_rank = if k < j { k } else { k - 1 };
        self.n + self.pair_count() + j * (self.n - 1) + k_rank
    }

    pub fn symbol(&self, col: usize) -> ParamSymbol {
        let n = self.n;
        if col < n {
            return ParamSymbol::Weight(col);
        }
        let mut rest = col - n;
        if rest < self.pair_count() {
            for j in 0..n {
                let row = n - j - 1;
                if rest < row {
                    return ParamSymbol::Interaction(j, j + 1 + rest);
                }
                rest -= row;
            }
        }
        rest -= self.pair_count();
        let j = rest / (n - 1);
        let k_rank = rest % (n - 1);
        ParamSymbol::Opposing(j, if k_rank < j { k_rank } else { k_rank + 1 })
    }

    pub fn symbols(&self) -> impl Iterator<Item = ParamSymbol> + '_ {
        (0..self.len()).map(|c| self.symbol(c))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |j| (j + 1..n).map(move |k| (j, k)))
    }

    pub fn ordered_pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |j| (0..n).filter(move |&k| k != j).map(move |k| (j, k)))
    }

    /// Every monotonicity condition over disjoint coalitions, both families.
    pub fn monotonicity_conditions(&self) -> Vec<MonotonicityCondition> {
        let mut out = Vec::new();
        for family in [MonotonicityFamily::Positive, MonotonicityFamily::Negative] {
            for j in 0..self.n {
                let others: Vec<usize> = (0..self.n).filter(|&k| k != j).collect();
                let total = 3usize.pow(others.len() as u32);
                for code in 0..total {
                    let (mut c, mut d, mut rest) = (0u32, 0u32, code);
                    for &k in &others {
                        match rest % 3 {
                            1 => c |= 1 << k,
                            2 => d |= 1 << k,
                            _ => {}
                        }
                        rest /= 3;
                    }
                    out.push(MonotonicityCondition { family, j, c, d });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonotonicityFamily {
    /// `a_j + sum_{k in C} a_jk + sum_{k in D} a+_{j|k} >= 0`, `j` joining the supporting side.
    Positive,
    /// `a_j + sum_{k in D} a_jk + sum_{h in C} a-_{h|j} >= 0`, `j` joining the opposing side.
    Negative,
}

/// One enumerated monotonicity inequality; `c` and `d` are coalition bitmasks
/// not containing `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonotonicityCondition {
    pub family: MonotonicityFamily,
    pub j: usize,
    pub c: u32,
    pub d: u32,
}

impl MonotonicityCondition {
    /// Columns entering the left-hand side, each with coefficient one.
    pub fn columns(&self, layout: &ParamLayout) -> Vec<usize> {
        let (same, opposed) = match self.family {
            MonotonicityFamily::Positive => (self.c, self.d),
            MonotonicityFamily::Negative => (self.d, self.c),
        };
        let mut cols = vec![layout.weight(self.j)];
        for k in 0..layout.n() {
            if same >> k & 1 == 1 {
                cols.push(layout.interaction(self.j, k));
            }
        }
        for k in 0..layout.n() {
            // a-_{k|j} = a+_{j|k}
            if opposed >> k & 1 == 1 {
                cols.push(layout.opposing(self.j, k));
            }
        }
        cols
    }
}

impl fmt::Display for MonotonicityCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |mask: u32| {
            (0..32)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| (k + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let fam = match self.family {
            MonotonicityFamily::Positive => "+",
            MonotonicityFamily::Negative => "-",
        };
        write!(
            f,
            "monotonicity{fam} j={} C={{{}}} D={{{}}}",
            self.j + 1,
            set(self.c),
            set(self.d)
        )
    }
}

/// Values of the `(3n^2 - n) / 2` free parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BicapacityParams<T> {
    layout: ParamLayout,
    values: Vec<T>,
}

impl<T: Scalar> BicapacityParams<T> {
    /// Validated construction.
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        let p = Self::from_values_unchecked(n, values)?;
        p.validate(T::tol(1e-10), DEFAULT_MAX_CRITERIA)?;
        Ok(p)
    }

    /// Checks only the length.
    pub fn from_values_unchecked(n: usize, values: Vec<T>) -> Result<Self> {
        let layout = ParamLayout::new(n);
        if values.len() != layout.len() {
            return Err(Error::validation(format!(
                "{} criteria need {} parameters, got {}",
                n,
                layout.len(),
                values.len()
            )));
        }
        Ok(BicapacityParams { layout, values })
    }

    /// The additive special case: `a_j = w_j`, every interaction zero.
    pub fn from_weights(w: &[T]) -> Self {
        let layout = ParamLayout::new(w.len());
        let mut values = vec![T::zero(); layout.len()];
        values[..w.len()].copy_from_slice(w);
        BicapacityParams { layout, values }
    }

    pub fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn a(&self, j: usize) -> T {
        self.values[self.layout.weight(j)]
    }

    pub fn pair(&self, j: usize, k: usize) -> T {
        self.values[self.layout.interaction(j, k)]
    }

    pub fn opp_plus(&self, j: usize, k: usize) -> T {
        self.values[self.layout.opposing(j, k)]
    }

    /// `a-_{j|k}`, read through the symmetry `a-_{j|k} = a+_{k|j}`.
    pub fn opp_minus(&self, j: usize, k: usize) -> T {
        self.opp_plus(k, j)
    }

    /// Checks sign, boundary and every enumerated monotonicity condition.
    pub fn validate(&self, tol: T, max_criteria: usize) -> Result<()> {
        let n = self.n();
        if n > max_criteria {
            return Err(Error::CapacityExceeded {
                n,
                cap: max_criteria,
            });
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::validation(format!("non-finite parameter {v}")));
        }
        for j in 0..n {
            if self.a(j) < -tol {
                return Err(Error::validation(format!(
                    "a_{} = {} < 0",
                    j + 1,
                    self.a(j)
                )));
            }
        }
        for (j, k) in self.layout.ordered_pairs() {
            if self.opp_plus(j, k) > tol {
                return Err(Error::validation(format!(
                    "a+_{}|{} = {} > 0",
                    j + 1,
                    k + 1,
                    self.opp_plus(j, k)
                )));
            }
        }
        let boundary: T = self.values[..n + self.layout.pair_count()]
            .iter()
            .copied()
            .sum();
        if (boundary - T::one()).abs() > tol {
            return Err(Error::validation(format!(
                "boundary condition: weights and interactions sum to {boundary}"
            )));
        }
        for cond in self.layout.monotonicity_conditions() {
            let lhs: T = cond
                .columns(&self.layout)
                .iter()
                .map(|&c| self.values[c])
                .sum();
            if lhs < -tol {
                return Err(Error::validation(format!("{cond} violated: {lhs}")));
            }
        }
        Ok(())
    }
}

struct LayoutMap<'a, T> {
    keys: Vec<(String, usize)>,
    values: &'a [T],
}

impl<T: Serialize> Serialize for LayoutMap<'_, T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.keys.len()))?;
        for (key, col) in &self.keys {
            map.serialize_entry(key, &self.values[*col])?;
        }
        map.end()
    }
}

impl<T: Scalar + Serialize> Serialize for BicapacityParams<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let l = &self.layout;
        let pairs = LayoutMap {
            keys: l
                .pairs()
                .map(|(j, k)| (format!("{},{}", j + 1, k + 1), l.interaction(j, k)))
                .collect(),
            values: &self.values,
        };
        let opp = LayoutMap {
            keys: l
                .ordered_pairs()
                .map(|(j, k)| (format!("{}|{}", j + 1, k + 1), l.opposing(j, k)))
                .collect(),
            values: &self.values,
        };
        let mut st = s.serialize_struct("BicapacityParams", 3)?;
        st.serialize_field("a", &self.values[..l.n()])?;
        st.serialize_field("a_pair", &pairs)?;
        st.serialize_field("a_opp_plus", &opp)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct RawParams<T> {
    a: Vec<T>,
    #[serde(default)]
    a_pair: BTreeMap<String, T>,
    #[serde(default)]
    a_opp_plus: BTreeMap<String, T>,
}

fn parse_key(key: &str, sep: char, n: usize) -> Option<(usize, usize)> {
    let (j, k) = key.split_once(sep)?;
    let j: usize = j.trim().parse().ok()?;
    let k: usize = k.trim().parse().ok()?;
    (j >= 1 && k >= 1 && j <= n && k <= n && j != k).then(|| (j - 1, k - 1))
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for BicapacityParams<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawParams::<T>::deserialize(d)?;
        let n = raw.a.len();
        if n < 2 {
            return Err(de::Error::custom("need at least two criteria"));
        }
        let layout = ParamLayout::new(n);
        let mut values = vec![T::zero(); layout.len()];
        values[..n].copy_from_slice(&raw.a);
        for (key, v) in raw.a_pair {
            let (j, k) = parse_key(&key, ',', n)
                .ok_or_else(|| de::Error::custom(format!("bad interaction key `{key}`")))?;
            values[layout.interaction(j, k)] = v;
        }
        for (key, v) in raw.a_opp_plus {
            let (j, k) = parse_key(&key, '|', n)
                .ok_or_else(|| de::Error::custom(format!("bad opposing-power key `{key}`")))?;
            values[layout.opposing(j, k)] = v;
        }
        Ok(BicapacityParams { layout, values })
    }
}
