//! Criteria, thresholds and the alternatives-by-criteria performance table.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[serde(alias = "max")]
    Maximize,
    #[serde(alias = "min")]
    Minimize,
}

/// One criterion with its indifference (`q`) and preference (`p`) thresholds.
///
/// `q == p` selects the usual criterion: any strictly positive difference
/// above `q` is a full preference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct Criterion<T> {
    pub name: String,
    pub direction: Direction,
    #[serde(default)]
    pub q: T,
    #[serde(default)]
    pub p: T,
}

impl<T: Scalar> Criterion<T> {
    pub fn new(name: impl Into<String>, direction: Direction, q: T, p: T) -> Self {
        Criterion {
            name: name.into(),
            direction,
            q,
            p,
        }
    }

    /// A maximized criterion with `q = p = 0`.
    pub fn usual(name: impl Into<String>) -> Self {
        Criterion::new(name, Direction::Maximize, T::zero(), T::zero())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.q.is_finite() || !self.p.is_finite() {
            return Err(Error::validation(format!(
                "criterion `{}`: thresholds must be finite",
                self.name
            )));
        }
        if self.q < T::zero() || self.p < self.q {
            return Err(Error::validation(format!(
                "criterion `{}`: thresholds must satisfy 0 <= q <= p (q = {}, p = {})",
                self.name, self.q, self.p
            )));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
struct RawTable<T> {
    criteria: Vec<Criterion<T>>,
    alternatives: Vec<String>,
    evaluations: Vec<Vec<T>>,
}

/// Evaluations `g_j(a)` of `m` alternatives on `n` criteria.
///
/// Immutable once built; every accessor is `&self`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerformanceTable<T> {
    criteria: Vec<Criterion<T>>,
    alternatives: Vec<String>,
    evaluations: Vec<Vec<T>>,
}

impl<T: Scalar> PerformanceTable<T> {
    pub fn new(
        criteria: Vec<Criterion<T>>,
        alternatives: Vec<String>,
        evaluations: Vec<Vec<T>>,
    ) -> Result<Self> {
        let n = criteria.len();
        let m = alternatives.len();
        if m < 2 {
            return Err(Error::validation(format!(
                "need at least 2 alternatives, got {m}"
            )));
        }
        if n < 2 {
            return Err(Error::validation(format!(
                "need at least 2 criteria, got {n}"
            )));
        }
        for c in &criteria {
            c.validate()?;
        }
        let mut seen = HashSet::new();
        for label in &alternatives {
            if !seen.insert(label.as_str()) {
                return Err(Error::validation(format!(
                    "duplicate alternative label `{label}`"
                )));
            }
        }
        let mut seen = HashSet::new();
        for c in &criteria {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::validation(format!(
                    "duplicate criterion name `{}`",
                    c.name
                )));
            }
        }
        if evaluations.len() != m {
            return Err(Error::validation(format!(
                "evaluation matrix has {} rows for {m} alternatives",
                evaluations.len()
            )));
        }
        for (row, label) in evaluations.iter().zip(&alternatives) {
            if row.len() != n {
                return Err(Error::validation(format!(
                    "alternative `{label}` has {} evaluations, expected {n}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::validation(format!(
                    "alternative `{label}` has non-finite evaluation {v}"
                )));
            }
        }
        Ok(PerformanceTable {
            criteria,
            alternatives,
            evaluations,
        })
    }

    pub fn criteria(&self) -> &[Criterion<T>] {
        &self.criteria
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn evaluations(&self) -> &[Vec<T>] {
        &self.evaluations
    }

    /// Number of alternatives.
    pub fn m(&self) -> usize {
        self.alternatives.len()
    }

    /// Number of criteria.
    pub fn n(&self) -> usize {
        self.criteria.len()
    }

    pub fn alternative_index(&self, label: &str) -> Option<usize> {
        self.alternatives.iter().position(|a| a == label)
    }

    pub fn criterion_index(&self, name: &str) -> Option<usize> {
        self.criteria.iter().position(|c| c.name == name)
    }

    pub fn evaluation(&self, a: usize, j: usize) -> Result<T> {
        self.check_alt(a)?;
        self.check_criterion(j)?;
        Ok(self.evaluations[a][j])
    }

    /// Signed advantage of `a` over `b` on criterion `j`, oriented so that
    /// larger is always better for `a`.
    pub fn difference(&self, j: usize, a: usize, b: usize) -> Result<T> {
        self.check_criterion(j)?;
        self.check_alt(a)?;
        self.check_alt(b)?;
        Ok(self.difference_unchecked(j, a, b))
    }

    pub(crate) fn difference_unchecked(&self, j: usize, a: usize, b: usize) -> T {
        let d = self.evaluations[a][j] - self.evaluations[b][j];
        match self.criteria[j].direction {
            Direction::Maximize => d,
            Direction::Minimize => -d,
        }
    }

    fn check_alt(&self, a: usize) -> Result<()> {
        if a >= self.m() {
            return Err(Error::IndexOutOfRange {
                what: "alternative",
                index: a,
                len: self.m(),
            });
        }
        Ok(())
    }

    fn check_criterion(&self, j: usize) -> Result<()> {
        if j >= self.n() {
            return Err(Error::IndexOutOfRange {
                what: "criterion",
                index: j,
                len: self.n(),
            });
        }
        Ok(())
    }

    /// Same table in another scalar type.
    pub fn cast<U: Scalar>(&self) -> PerformanceTable<U> {
        let conv = |v: T| U::lit(v.as_f64());
        PerformanceTable {
            criteria: self
                .criteria
                .iter()
                .map(|c| Criterion::new(c.name.clone(), c.direction, conv(c.q), conv(c.p)))
                .collect(),
            alternatives: self.alternatives.clone(),
            evaluations: self
                .evaluations
                .iter()
                .map(|r| r.iter().map(|&v| conv(v)).collect())
                .collect(),
        }
    }

    /// Replaces every criterion's thresholds.
    pub fn with_thresholds(&self, q: T, p: T) -> Result<Self> {
        let criteria = self
            .criteria
            .iter()
            .map(|c| Criterion::new(c.name.clone(), c.direction, q, p))
            .collect();
        PerformanceTable::new(
            criteria,
            self.alternatives.clone(),
            self.evaluations.clone(),
        )
    }
}

impl<T: Scalar + for<'de> Deserialize<'de>> PerformanceTable<T> {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: RawTable<T> = serde_json::from_str(s)?;
        PerformanceTable::new(raw.criteria, raw.alternatives, raw.evaluations)
    }
}

impl<T: Scalar + Serialize> PerformanceTable<T> {
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl<T: Scalar> PerformanceTable<T> {
    /// Reads an evaluation matrix from CSV: header row holds the criterion
    /// names (first cell labels the alternative column), each following row
    /// is `label, g_1, ..., g_n`.
    ///
    /// Criteria default to maximized usual criteria unless `criteria` is
    /// given, in which case they are matched to the header by name.
    pub fn from_csv_reader<R: Read>(
        reader: R,
        criteria: Option<Vec<Criterion<T>>>,
    ) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        let names: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        let criteria = match criteria {
            None => names.iter().map(Criterion::usual).collect(),
            Some(given) => names
                .iter()
                .map(|name| {
                    given
                        .iter()
                        .find(|c| &c.name == name)
                        .cloned()
                        .ok_or_else(|| {
                            Error::validation(format!(
                                "CSV column `{name}` has no criterion definition"
                            ))
                        })
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let mut alternatives = Vec::new();
        let mut evaluations = Vec::new();
        for (row_no, record) in rdr.records().enumerate() {
            let record = record?;
            let mut fields = record.iter();
            let label = fields.next().ok_or_else(|| {
                Error::validation(format!("CSV row {}: empty record", row_no + 2))
            })?;
            alternatives.push(label.to_owned());
            let row = fields
                .map(|f| {
                    f.parse::<f64>().map(T::lit).map_err(|_| {
                        Error::validation(format!("CSV row {}: `{f}` is not a number", row_no + 2))
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            evaluations.push(row);
        }
        PerformanceTable::new(criteria, alternatives, evaluations)
    }
}

impl PerformanceTable<f64> {
    /// Loads a `.json` problem file or a `.csv` evaluation matrix.
    pub fn load(path: &Path) -> Result<Self> {
        let is_csv = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv {
            PerformanceTable::from_csv_reader(std::fs::File::open(path)?, None)
        } else {
            PerformanceTable::from_json_str(&std::fs::read_to_string(path)?)
        }
    }
}
