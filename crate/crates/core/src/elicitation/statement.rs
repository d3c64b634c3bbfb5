use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PerformanceTable;
use crate::scalar::Scalar;

/// Strict preference or indifference between two objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "P")]
    Preferred,
    #[serde(rename = "I")]
    Indifferent,
}

/// Strictly greater or equal, for criterion importance and interaction strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Magnitude {
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "=")]
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InteractionSign {
    #[serde(rename = "+")]
    Synergy,
    #[serde(rename = "-")]
    Redundancy,
    #[serde(rename = "0")]
    None,
}

/// Which index the two opposing-power terms share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpposingVariant {
    /// `a+_{j|k} < a+_{j|h}`: `g_k` opposes the supporting `g_j` more than `g_h` does.
    #[serde(rename = "a")]
    SharedSupporter,
    /// `a+_{j|k} < a+_{h|k}`: the opposing `g_k` weighs more against `g_j` than against `g_h`.
    #[serde(rename = "b")]
    SharedOpponent,
}

/// One decision-maker assertion, with zero-based alternative and criterion indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreferenceStatement {
    LocalPair {
        a: usize,
        b: usize,
        kind: Comparison,
    },
    GlobalP1 {
        a: usize,
        b: usize,
        kind: Comparison,
    },
    GlobalP2 {
        a: usize,
        b: usize,
        kind: Comparison,
    },
    Intensity {
        first: (usize, usize),
        second: (usize, usize),
        kind: Comparison,
    },
    CriterionImportance {
        j: usize,
        k: usize,
        kind: Magnitude,
    },
    InteractionSign {
        j: usize,
        k: usize,
        sign: InteractionSign,
    },
    InteractionMagnitude {
        first: (usize, usize),
        second: (usize, usize),
        kind: Magnitude,
        signs: (InteractionSign, InteractionSign),
    },
    OpposingPower {
        variant: OpposingVariant,
        j: usize,
        k: usize,
        h: usize,
    },
}

impl PreferenceStatement {
    /// Checks index ranges and distinctness against a problem with `m`
    /// alternatives and `n` criteria.
    pub fn check(&self, m: usize, n: usize) -> std::result::Result<(), String> {
        let alt = |i: usize| {
            if i < m {
                Ok(())
            } else {
                Err(format!("alternative index {i} out of range ({m})"))
            }
        };
        let crit = |j: usize| {
            if j < n {
                Ok(())
            } else {
                Err(format!("criterion index {j} out of range ({n})"))
            }
        };
        let distinct = |x: usize, y: usize, what: &str| {
            if x != y {
                Ok(())
            } else {
                Err(format!("{what} must be distinct"))
            }
        };
        let unordered = |p: (usize, usize)| (p.0.min(p.1), p.0.max(p.1));
        match *self {
            PreferenceStatement::LocalPair { a, b, .. }
            | PreferenceStatement::GlobalP1 { a, b, .. }
            | PreferenceStatement::GlobalP2 { a, b, .. } => {
                alt(a)?;
                alt(b)?;
                distinct(a, b, "alternatives")
            }
            PreferenceStatement::Intensity { first, second, .. } => {
                for i in [first.0, first.1, second.0, second.1] {
                    alt(i)?;
                }
                if first == second {
                    return Err("the two pairs must differ".into());
                }
                Ok(())
            }
            PreferenceStatement::CriterionImportance { j, k, .. } => {
                crit(j)?;
                crit(k)?;
                distinct(j, k, "criteria")
            }
            PreferenceStatement::InteractionSign { j, k, .. } => {
                crit(j)?;
                crit(k)?;
                distinct(j, k, "criteria")
            }
            PreferenceStatement::InteractionMagnitude {
                first,
                second,
                signs,
                ..
            } => {
                for j in [first.0, first.1, second.0, second.1] {
                    crit(j)?;
                }
                distinct(first.0, first.1, "criteria in a pair")?;
                distinct(second.0, second.1, "criteria in a pair")?;
                if unordered(first) == unordered(second) {
                    return Err("the two criteria pairs must differ".into());
                }
                if signs.0 == InteractionSign::None || signs.1 == InteractionSign::None {
                    return Err("interaction magnitude needs signs + or -".into());
                }
                Ok(())
            }
            PreferenceStatement::OpposingPower { j, k, h, .. } => {
                for i in [j, k, h] {
                    crit(i)?;
                }
                if j == k || j == h || k == h {
                    return Err("opposing-power indices must be distinct".into());
                }
                Ok(())
            }
        }
    }

    /// Short human-readable rendering using the table's labels.
    pub fn describe<T: Scalar>(&self, table: &PerformanceTable<T>) -> String {
        let alt = |i: usize| {
            table
                .alternatives()
                .get(i)
                .map_or("?", String::as_str)
                .to_string()
        };
        let crit = |j: usize| {
            table
                .criteria()
                .get(j)
                .map_or("?", |c| c.name.as_str())
                .to_string()
        };
        let rel = |k: Comparison| match k {
            Comparison::Preferred => "P",
            Comparison::Indifferent => "I",
        };
        let mag = |k: Magnitude| match k {
            Magnitude::Greater => ">",
            Magnitude::Equal => "=",
        };
        let sign = |s: InteractionSign| match s {
            InteractionSign::Synergy => "+",
            InteractionSign::Redundancy => "-",
            InteractionSign::None => "0",
        };
        match *self {
            PreferenceStatement::LocalPair { a, b, kind } => {
                format!("local {} {} {}", alt(a), rel(kind), alt(b))
            }
            PreferenceStatement::GlobalP1 { a, b, kind } => {
                format!("promethee-I {} {} {}", alt(a), rel(kind), alt(b))
            }
            PreferenceStatement::GlobalP2 { a, b, kind } => {
                format!("promethee-II {} {} {}", alt(a), rel(kind), alt(b))
            }
            PreferenceStatement::Intensity {
                first,
                second,
                kind,
            } => format!(
                "intensity ({},{}) {} ({},{})",
                alt(first.0),
                alt(first.1),
                rel(kind),
                alt(second.0),
                alt(second.1)
            ),
            PreferenceStatement::CriterionImportance { j, k, kind } => {
                format!("importance {} {} {}", crit(j), mag(kind), crit(k))
            }
            PreferenceStatement::InteractionSign { j, k, sign: s } => {
                format!("interaction {},{} {}", crit(j), crit(k), sign(s))
            }
            PreferenceStatement::InteractionMagnitude {
                first,
                second,
                kind,
                signs,
            } => format!(
                "|interaction {},{} ({})| {} |interaction {},{} ({})|",
                crit(first.0),
                crit(first.1),
                sign(signs.0),
                mag(kind),
                crit(second.0),
                crit(second.1),
                sign(signs.1)
            ),
            PreferenceStatement::OpposingPower { variant, j, k, h } => match variant {
                OpposingVariant::SharedSupporter => {
                    format!("opposing {}|{} < {}|{}", crit(j), crit(k), crit(j), crit(h))
                }
                OpposingVariant::SharedOpponent => {
                    format!("opposing {}|{} < {}|{}", crit(j), crit(k), crit(h), crit(k))
                }
            },
        }
    }
}

/// A criterion named either by its name or by its one-based position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CriterionRef {
    Position(usize),
    Name(String),
}

impl fmt::Display for CriterionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriterionRef::Position(p) => write!(f, "{p}"),
            CriterionRef::Name(s) => f.write_str(s),
        }
    }
}

/// The label-based wire form of a statement, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StatementSpec {
    LocalPair {
        a: String,
        b: String,
        kind: Comparison,
    },
    GlobalP1 {
        a: String,
        b: String,
        kind: Comparison,
    },
    GlobalP2 {
        a: String,
        b: String,
        kind: Comparison,
    },
    Intensity {
        pair1: [String; 2],
        pair2: [String; 2],
        kind: Comparison,
    },
    CriterionImportance {
        j: CriterionRef,
        k: CriterionRef,
        kind: Magnitude,
    },
    InteractionSign {
        j: CriterionRef,
        k: CriterionRef,
        sign: InteractionSign,
    },
    InteractionMagnitude {
        pair1: [CriterionRef; 2],
        pair2: [CriterionRef; 2],
        kind: Magnitude,
        signs: [InteractionSign; 2],
    },
    OpposingPower {
        variant: OpposingVariant,
        j: CriterionRef,
        k: CriterionRef,
        h: CriterionRef,
    },
}

impl StatementSpec {
    /// Resolves labels against `table`; `statement` is the one-based position
    /// reported in errors.
    pub fn resolve<T: Scalar>(
        &self,
        table: &PerformanceTable<T>,
        statement: usize,
    ) -> Result<PreferenceStatement> {
        let alt = |label: &String| {
            table
                .alternative_index(label)
                .ok_or_else(|| Error::UnknownAlternative {
                    statement,
                    label: label.clone(),
                })
        };
        let crit = |r: &CriterionRef| {
            let idx = match r {
                CriterionRef::Position(p) if (1..=table.n()).contains(p) => Some(p - 1),
                CriterionRef::Position(_) => None,
                CriterionRef::Name(name) => table.criterion_index(name),
            };
            idx.ok_or_else(|| Error::UnknownCriterion {
                statement,
                name: r.to_string(),
            })
        };
        let resolved = match self {
            StatementSpec::LocalPair { a, b, kind } => PreferenceStatement::LocalPair {
                a: alt(a)?,
                b: alt(b)?,
                kind: *kind,
            },
            StatementSpec::GlobalP1 { a, b, kind } => PreferenceStatement::GlobalP1 {
                a: alt(a)?,
                b: alt(b)?,
                kind: *kind,
            },
            StatementSpec::GlobalP2 { a, b, kind } => PreferenceStatement::GlobalP2 {
                a: alt(a)?,
                b: alt(b)?,
                kind: *kind,
            },
            StatementSpec::Intensity { pair1, pair2, kind } => PreferenceStatement::Intensity {
                first: (alt(&pair1[0])?, alt(&pair1[1])?),
                second: (alt(&pair2[0])?, alt(&pair2[1])?),
                kind: *kind,
            },
            StatementSpec::CriterionImportance { j, k, kind } => {
                PreferenceStatement::CriterionImportance {
                    j: crit(j)?,
                    k: crit(k)?,
                    kind: *kind,
                }
            }
            StatementSpec::InteractionSign { j, k, sign } => PreferenceStatement::InteractionSign {
                j: crit(j)?,
                k: crit(k)?,
                sign: *sign,
            },
            StatementSpec::InteractionMagnitude {
                pair1,
                pair2,
                kind,
                signs,
            } => PreferenceStatement::InteractionMagnitude {
                first: (crit(&pair1[0])?, crit(&pair1[1])?),
                second: (crit(&pair2[0])?, crit(&pair2[1])?),
                kind: *kind,
                signs: (signs[0], signs[1]),
            },
            StatementSpec::OpposingPower { variant, j, k, h } => {
                PreferenceStatement::OpposingPower {
                    variant: *variant,
                    j: crit(j)?,
                    k: crit(k)?,
                    h: crit(h)?,
                }
            }
        };
        resolved
            .check(table.m(), table.n())
            .map_err(|message| Error::Statement { statement, message })?;
        Ok(resolved)
    }
}

/// Reads a JSON-lines statement file. Blank lines and lines starting with `#`
/// are skipped; errors report the one-based line number.
pub fn read_statements<T: Scalar, R: BufRead>(
    reader: R,
    table: &PerformanceTable<T>,
) -> Result<Vec<PreferenceStatement>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let spec: StatementSpec = serde_json::from_str(trimmed).map_err(|source| Error::Parse {
            line: idx + 1,
            source,
        })?;
        out.push(spec.resolve(table, idx + 1)?);
    }
    Ok(out)
}

pub fn load_statements<T: Scalar>(
    path: &std::path::Path,
    table: &PerformanceTable<T>,
) -> Result<Vec<PreferenceStatement>> {
    let file = std::fs::File::open(path)?;
    read_statements(std::io::BufReader::new(file), table)
}
