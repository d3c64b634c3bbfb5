//! Compatibility LPs (maximize `epsilon` over a constraint system) and exact
//! necessary/possible pair tests.

mod simplex;

pub use simplex::{Constraint, LinearProgram, SimplexResult, SimplexStatus};

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::elicitation::{ConstraintSystem, FlowCoefficients, Provenance, Relation, Row};
use crate::error::Result;
use crate::model::PerformanceTable;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpConfig<T> {
    pub feasibility_tol: T,
    /// Upper bound on `epsilon`, keeping the problem bounded.
    pub epsilon_cap: T,
    /// Smallest `epsilon` counted as strictly positive in pair tests.
    pub epsilon_min: T,
}

impl<T: Scalar> Default for LpConfig<T> {
    fn default() -> Self {
        LpConfig {
            feasibility_tol: T::tol(1e-8),
            epsilon_cap: T::one(),
            epsilon_min: T::tol(1e-6),
        }
    }
}

pub type LpStatus = SimplexStatus;

#[derive(Debug, Clone, Serialize)]
pub struct LpOutcome<T> {
    pub status: LpStatus,
    /// Negative infinity when infeasible.
    pub epsilon_star: T,
    /// Parameter values followed by `epsilon`.
    pub solution: Vec<T>,
    /// Sum of artificials at the end of phase one; zero when feasible.
    pub phase1_objective: T,
    /// System rows tight at the optimum, or violated at the phase-one
    /// optimum when infeasible. Indices refer to the input system.
    pub binding: Vec<usize>,
}

impl<T: Scalar> LpOutcome<T> {
    pub fn params(&self) -> &[T] {
        &self.solution[..self.solution.len() - 1]
    }

    /// Feasible with `epsilon* > threshold`.
    pub fn is_compatible(&self, threshold: T) -> bool {
        self.status == LpStatus::Optimal && self.epsilon_star > threshold
    }
}

/// Maximizes `epsilon` subject to the system, with `epsilon` free and capped.
pub fn max_epsilon<T: Scalar>(
    system: &ConstraintSystem<T>,
    cfg: &LpConfig<T>,
) -> Result<LpOutcome<T>> {
    max_epsilon_with(system, &[], cfg)
}

/// As [`max_epsilon`] with extra rows appended; their indices in `binding`
/// continue after the system's rows.
pub fn max_epsilon_with<T: Scalar>(
    system: &ConstraintSystem<T>,
    extra: &[Row<T>],
    cfg: &LpConfig<T>,
) -> Result<LpOutcome<T>> {
    let cols = system.columns();
    let eps = system.index().epsilon();
    let all: Vec<&Row<T>> = system.rows().iter().chain(extra).collect();

    let mut seen = HashSet::new();
    let mut kept = Vec::new();
    for (i, r) in all.iter().enumerate() {
        let key = (
            r.coeffs
                .iter()
                .map(|c| c.as_f64().to_bits())
                .collect::<Vec<_>>(),
            r.relation,
            r.rhs.as_f64().to_bits(),
        );
        if seen.insert(key) {
            kept.push(i);
        }
    }

    let mut objective = vec![T::zero(); cols];
    objective[eps] = T::one();
    let mut lp = LinearProgram::new(objective);
    lp.free = vec![true; cols];
    for &i in &kept {
        lp.add(all[i].coeffs.clone(), all[i].relation, all[i].rhs);
    }
    let mut cap = vec![T::zero(); cols];
    cap[eps] = T::one();
    lp.add(cap, Relation::Le, cfg.epsilon_cap);

    let res = lp.solve(cfg.feasibility_tol)?;
    let binding = match res.status {
        LpStatus::Infeasible => kept
            .iter()
            .zip(&res.artificial_active)
            .filter(|(_, &a)| a)
            .map(|(&i, _)| i)
            .collect(),
        _ => kept
            .iter()
            .copied()
            .filter(|&i| {
                let r = all[i];
                (r.lhs(&res.x) - r.rhs).abs() <= cfg.feasibility_tol
            })
            .collect(),
    };
    let epsilon_star = match res.status {
        LpStatus::Infeasible => T::neg_infinity(),
        _ => res.x[eps],
    };
    Ok(LpOutcome {
        status: res.status,
        epsilon_star,
        solution: res.x,
        phase1_objective: res.phase1_objective,
        binding,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RorPair {
    pub necessary: bool,
    pub possible: bool,
}

fn net_row<T: Scalar>(
    flows: &FlowCoefficients<T>,
    a: usize,
    b: usize,
    rhs: T,
    what: &str,
) -> Row<T> {
    let mut coeffs = flows.net_difference(a, b);
    coeffs.push(T::zero());
    Row {
        coeffs,
        relation: Relation::Ge,
        rhs,
        provenance: Provenance::Query(what.to_string()),
    }
}

/// Exact pair test: `possible` when some compatible parameters (with
/// `epsilon >= epsilon_min`) give `Phi(i) >= Phi(j)`; `necessary` when none
/// give `Phi(j) >= Phi(i) + epsilon_min`.
pub fn exact_ror_pair<T: Scalar>(
    system: &ConstraintSystem<T>,
    flows: &FlowCoefficients<T>,
    i: usize,
    j: usize,
    cfg: &LpConfig<T>,
) -> Result<RorPair> {
    if i == j {
        return Ok(RorPair {
            necessary: true,
            possible: true,
        });
    }
    let possible = max_epsilon_with(system, &[net_row(flows, i, j, T::zero(), "possible")], cfg)?
        .is_compatible(cfg.epsilon_min - cfg.feasibility_tol);
    let counter = max_epsilon_with(
        system,
        &[net_row(flows, j, i, cfg.epsilon_min, "necessary")],
        cfg,
    )?;
    Ok(RorPair {
        necessary: !counter.is_compatible(cfg.epsilon_min - cfg.feasibility_tol),
        possible,
    })
}

/// Every ordered pair, solved in parallel.
pub fn exact_ror<T: Scalar>(
    system: &ConstraintSystem<T>,
    table: &PerformanceTable<T>,
    cfg: &LpConfig<T>,
) -> Result<Vec<Vec<RorPair>>> {
    let flows = FlowCoefficients::new(table);
    let m = table.m();
    let system = system.deduplicated();
    let cells: Vec<RorPair> = (0..m * m)
        .into_par_iter()
        .map(|c| exact_ror_pair(&system, &flows, c / m, c % m, cfg))
        .collect::<Result<_>>()?;
    Ok(cells.chunks(m).map(<[RorPair]>::to_vec).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipolar::testing::random_params;
    use crate::bipolar::{bipolar_flows, BicapacityParams};
    use crate::elicitation::{compile, Comparison, Magnitude, PreferenceStatement};
    use crate::model::fixtures::students;
    use crate::model::Criterion;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_criteria() -> PerformanceTable<f64> {
        PerformanceTable::new(
            vec![Criterion::usual("g1"), Criterion::usual("g2")],
            vec!["x".into(), "y".into()],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap()
    }

    fn scenario2() -> Vec<PreferenceStatement> {
        vec![
            PreferenceStatement::Intensity {
                first: (0, 1),
                second: (2, 3),
                kind: Comparison::Preferred,
            },
            PreferenceStatement::Intensity {
                first: (6, 7),
                second: (4, 5),
                kind: Comparison::Preferred,
            },
        ]
    }

    #[test]
    fn one_dimensional_maximum() {
        let st = [PreferenceStatement::CriterionImportance {
            j: 0,
            k: 1,
            kind: Magnitude::Greater,
        }];
        let sys = compile(&st, &two_criteria()).unwrap().restrict_classical();
        let out = max_epsilon(&sys, &LpConfig::default()).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.epsilon_star - 1.0).abs() < 1e-9);
        assert!((out.params()[0] - 1.0).abs() < 1e-9 && out.params()[1].abs() < 1e-9);
    }

    #[test]
    fn contradictory_importance_gives_zero() {
        let st = [
            PreferenceStatement::CriterionImportance {
                j: 0,
                k: 1,
                kind: Magnitude::Greater,
            },
            PreferenceStatement::CriterionImportance {
                j: 1,
                k: 0,
                kind: Magnitude::Greater,
            },
        ];
        let sys = compile(&st, &two_criteria()).unwrap().restrict_classical();
        let out = max_epsilon(&sys, &LpConfig::default()).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!(out.epsilon_star.abs() < 1e-9);
        assert!(!out.is_compatible(0.0));
        // both strict rows are tight at the optimum
        assert!(out.binding.contains(&0) && out.binding.contains(&1));
    }

    #[test]
    fn contradictory_equalities_are_infeasible() {
        let t = two_criteria();
        let mut sys = compile(&[], &t).unwrap().restrict_classical();
        let cols = sys.columns();
        let mut row = vec![0.0; cols];
        row[0] = 1.0;
        sys.push(Row {
            coeffs: row,
            relation: Relation::Eq,
            rhs: 2.0,
            provenance: Provenance::Query("a_1 = 2".into()),
        })
        .unwrap();
        let out = max_epsilon(&sys, &LpConfig::default()).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
        assert_eq!(out.epsilon_star, f64::NEG_INFINITY);
        assert!(out.phase1_objective > 1e-8);
        assert!(!out.binding.is_empty());
    }

    #[test]
    fn scenario_one_is_classically_compatible() {
        let t = students::<f64>();
        let st = [
            PreferenceStatement::LocalPair {
                a: 6,
                b: 1,
                kind: Comparison::Preferred,
            },
            PreferenceStatement::LocalPair {
                a: 4,
                b: 5,
                kind: Comparison::Preferred,
            },
        ];
        let sys = compile(&st, &t).unwrap();
        let cfg = LpConfig::default();
        let classical = max_epsilon(&sys.restrict_classical(), &cfg).unwrap();
        assert!(classical.is_compatible(0.0));
        let bipolar = max_epsilon(&sys, &cfg).unwrap();
        assert!(bipolar.epsilon_star >= classical.epsilon_star - 1e-9);
        assert!(BicapacityParams::new(3, bipolar.params().to_vec()).is_ok());
    }

    #[test]
    fn scenario_two_frozen_optima() {
        // Reference optima from an independent LP solver run on the same rows.
        let cfg = LpConfig::default();
        for (q, p, classical_want, bipolar_want) in [
            (0.0, 0.0, 0.0, 0.0),
            (0.0, 3.0, 0.0, 1.0 / 9.0),
            (1.0, 3.0, 0.0, 1.0 / 6.0),
            (0.5, 2.5, 0.0, 0.125),
        ] {
            let t = students::<f64>().with_thresholds(q, p).unwrap();
            let sys = compile(&scenario2(), &t).unwrap();
            let e1 = max_epsilon(&sys.restrict_classical(), &cfg)
                .unwrap()
                .epsilon_star;
            let e2 = max_epsilon(&sys, &cfg).unwrap().epsilon_star;
            assert!((e1 - classical_want).abs() < 1e-9, "q={q} p={p}: e1={e1}");
            assert!((e2 - bipolar_want).abs() < 1e-9, "q={q} p={p}: e2={e2}");
        }
    }

    #[test]
    fn solution_is_a_valid_bicapacity() {
        let t = students::<f64>().with_thresholds(1.0, 3.0).unwrap();
        let out = max_epsilon(&compile(&scenario2(), &t).unwrap(), &LpConfig::default()).unwrap();
        BicapacityParams::new(3, out.params().to_vec()).unwrap();
    }

    #[test]
    fn deterministic_optimum() {
        let t = students::<f64>().with_thresholds(0.0, 3.0).unwrap();
        let sys = compile(&scenario2(), &t).unwrap();
        let a = max_epsilon(&sys, &LpConfig::default()).unwrap();
        let b = max_epsilon(&sys, &LpConfig::default()).unwrap();
        assert_eq!(a.epsilon_star, b.epsilon_star);
        assert_eq!(a.solution, b.solution);
    }

    #[test]
    fn ror_on_dominance() {
        let t = PerformanceTable::new(
            students::<f64>().criteria().to_vec(),
            vec!["x".into(), "y".into(), "z".into()],
            vec![
                vec![3.0, 3.0, 3.0],
                vec![1.0, 1.0, 1.0],
                vec![2.0, 0.0, 4.0],
            ],
        )
        .unwrap();
        let sys = compile(&[], &t).unwrap();
        let ror = exact_ror(&sys, &t, &LpConfig::default()).unwrap();
        assert_eq!(
            ror[0][1],
            RorPair {
                necessary: true,
                possible: true
            }
        );
        assert_eq!(
            ror[1][0],
            RorPair {
                necessary: false,
                possible: false
            }
        );
        assert!(ror[2][2].necessary && ror[2][2].possible);
        for i in 0..3 {
            for j in 0..3 {
                assert!(!ror[i][j].necessary || ror[i][j].possible);
            }
        }
        // random valid parameters never reverse the dominance
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let f = bipolar_flows(&t, &random_params(&mut rng, 3)).unwrap();
            assert!(f[0].net >= f[1].net);
        }
    }

    proptest! {
        #[test]
        fn strong_duality(
            c in prop::collection::vec(0.0f64..2.0, 3),
            a in prop::collection::vec(0.05f64..2.0, 9),
            b in prop::collection::vec(0.5f64..3.0, 3),
        ) {
            // primal: max c.x, A x <= b, x >= 0; dual: min b.y, A^T y >= c, y >= 0
            let mut primal = LinearProgram::new(c.clone());
            for i in 0..3 {
                primal.add(a[i * 3..i * 3 + 3].to_vec(), Relation::Le, b[i]);
            }
            let mut dual = LinearProgram::new(b.iter().map(|v| -v).collect());
            for j in 0..3 {
                dual.add((0..3).map(|i| a[i * 3 + j]).collect(), Relation::Ge, c[j]);
            }
            let p = primal.solve(1e-10).unwrap();
            let d = dual.solve(1e-10).unwrap();
            prop_assert_eq!(p.status, LpStatus::Optimal);
            prop_assert_eq!(d.status, LpStatus::Optimal);
            prop_assert!((p.objective + d.objective).abs() < 1e-7);
        }
    }
}
