//! Translation of preference statements and structural bicapacity conditions
//! into a dense linear system over the parameters and one `epsilon` column.

mod statement;

pub use statement::{
    load_statements, read_statements, Comparison, CriterionRef, InteractionSign, Magnitude,
    OpposingVariant, PreferenceStatement, StatementSpec,
};

use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::bipolar::{
    choquet_coefficients, BipolarPreferences, MonotonicityCondition, ParamLayout, ParamSymbol,
    DEFAULT_MAX_CRITERIA,
};
use crate::error::{Error, Result};
use crate::model::PerformanceTable;
use crate::scalar::Scalar;

/// Column map: the parameter layout followed by `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableIndex {
    layout: ParamLayout,
}

impl VariableIndex {
    pub fn new(n: usize) -> Self {
        VariableIndex {
            layout: ParamLayout::new(n),
        }
    }

    pub fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    pub fn params(&self) -> usize {
        self.layout.len()
    }

    pub fn columns(&self) -> usize {
        self.layout.len() + 1
    }

    pub fn epsilon(&self) -> usize {
        self.layout.len()
    }

    pub fn names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.layout.symbols().map(|s| s.to_string()).collect();
        names.push("epsilon".into());
        names
    }

    pub fn symbol(&self, col: usize) -> Option<ParamSymbol> {
        (col < self.params()).then(|| self.layout.symbol(col))
    }
}

impl Serialize for VariableIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.names().serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// Where a row came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// The one-based statement position and its rendering.
    Statement {
        index: usize,
        text: String,
    },
    Boundary,
    WeightSign {
        j: usize,
    },
    OpposingSign {
        j: usize,
        k: usize,
    },
    Monotonicity(MonotonicityCondition),
    Classical {
        column: usize,
    },
    Query(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Statement { index, text } => write!(f, "statement {index}: {text}"),
            Provenance::Boundary => f.write_str("boundary: sum a_j + sum a_jk = 1"),
            Provenance::WeightSign { j } => write!(f, "sign: a_{} >= 0", j + 1),
            Provenance::OpposingSign { j, k } => write!(f, "sign: a+_{}|{} <= 0", j + 1, k + 1),
            Provenance::Monotonicity(c) => write!(f, "{c}"),
            Provenance::Classical { column } => write!(f, "classical: column {column} = 0"),
            Provenance::Query(s) => f.write_str(s),
        }
    }
}

impl Serialize for Provenance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `coeffs . x  (<= | = | >=)  rhs` over all columns including `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
    pub provenance: Provenance,
}

impl<T: Scalar> Row<T> {
    pub fn lhs(&self, x: &[T]) -> T {
        crate::scalar::dot(&self.coeffs, x)
    }

    /// Signed violation; zero when satisfied.
    pub fn violation(&self, x: &[T]) -> T {
        let gap = self.lhs(x) - self.rhs;
        match self.relation {
            Relation::Le => gap.max(T::zero()),
            Relation::Ge => (-gap).max(T::zero()),
            Relation::Eq => gap.abs(),
        }
    }

    pub fn uses_epsilon(&self, eps_col: usize) -> bool {
        self.coeffs[eps_col] != T::zero()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstraintSystem<T> {
    index: VariableIndex,
    rows: Vec<Row<T>>,
    classical: bool,
}

impl<T: Scalar> ConstraintSystem<T> {
    pub fn new(n: usize) -> Self {
        ConstraintSystem {
            index: VariableIndex::new(n),
            rows: Vec::new(),
            classical: false,
        }
    }

    pub fn index(&self) -> &VariableIndex {
        &self.index
    }

    pub fn rows(&self) -> &[Row<T>] {
        &self.rows
    }

    pub fn columns(&self) -> usize {
        self.index.columns()
    }

    /// Whether interaction and opposing-power columns are pinned to zero.
    pub fn is_classical(&self) -> bool {
        self.classical
    }

    pub fn push(&mut self, row: Row<T>) -> Result<()> {
        if row.coeffs.len() != self.columns() {
            return Err(Error::validation(format!(
                "row has {} coefficients, system has {} columns",
                row.coeffs.len(),
                self.columns()
            )));
        }
        if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite row: {}",
                row.provenance
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Adds a row whose parameter part is `params` and whose epsilon
    /// coefficient is `eps`.
    pub fn push_params(
        &mut self,
        params: &[T],
        eps: T,
        relation: Relation,
        rhs: T,
        provenance: Provenance,
    ) -> Result<()> {
        let mut coeffs = params.to_vec();
        coeffs.push(eps);
        self.push(Row {
            coeffs,
            relation,
            rhs,
            provenance,
        })
    }

    /// Largest row violation at `x` (all columns, epsilon included).
    pub fn max_violation(&self, x: &[T]) -> T {
        self.rows
            .iter()
            .map(|r| r.violation(x))
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn is_satisfied(&self, x: &[T], tol: T) -> bool {
        self.rows.iter().all(|r| r.violation(x) <= tol)
    }

    /// Checks a parameter vector with epsilon fixed to `eps`.
    pub fn is_satisfied_params(&self, params: &[T], eps: T, tol: T) -> bool {
        let mut x = params.to_vec();
        x.push(eps);
        self.is_satisfied(&x, tol)
    }

    /// Copy keeping only the first of any bit-identical rows.
    pub fn deduplicated(&self) -> Self {
        let mut seen = HashSet::new();
        let rows = self
            .rows
            .iter()
            .filter(|r| {
                let key = (
                    r.coeffs
                        .iter()
                        .map(|c| c.as_f64().to_bits())
                        .collect::<Vec<_>>(),
                    r.relation,
                    r.rhs.as_f64().to_bits(),
                );
                seen.insert(key)
            })
            .cloned()
            .collect();
        ConstraintSystem {
            index: self.index,
            rows,
            classical: self.classical,
        }
    }

    /// Copy with every interaction and opposing-power column pinned to zero.
    pub fn restrict_classical(&self) -> Self {
        let mut out = self.clone();
        if out.classical {
            return out;
        }
        let n = self.index.layout().n();
        for col in n..self.index.params() {
            let mut unit = vec![T::zero(); self.columns()];
            unit[col] = T::one();
            out.rows.push(Row {
                coeffs: unit,
                relation: Relation::Eq,
                rhs: T::zero(),
                provenance: Provenance::Classical { column: col },
            });
        }
        out.classical = true;
        out
    }

    /// Same rows with the epsilon column removed and `eps` moved to the
    /// right-hand side.
    pub fn fix_epsilon(&self, eps: T) -> Vec<Row<T>> {
        let e = self.index.epsilon();
        self.rows
            .iter()
            .map(|r| {
                let mut coeffs = r.coeffs.clone();
                let c = coeffs.remove(e);
                Row {
                    coeffs,
                    relation: r.relation,
                    rhs: r.rhs - c * eps,
                    provenance: r.provenance.clone(),
                }
            })
            .collect()
    }
}

/// Linear forms of the bipolar flows and local Choquet values in the
/// parameters, for one performance table.
#[derive(Debug, Clone)]
pub struct FlowCoefficients<T> {
    m: usize,
    prefs: BipolarPreferences<T>,
    positive: Vec<Vec<T>>,
    negative: Vec<Vec<T>>,
}

impl<T: Scalar> FlowCoefficients<T> {
    pub fn new(table: &PerformanceTable<T>) -> Self {
        let prefs = BipolarPreferences::new(table);
        let m = prefs.m();
        let len = ParamLayout::new(prefs.n()).len();
        let scale = T::one() / T::lit((m - 1) as f64);
        let mut positive = vec![vec![T::zero(); len]; m];
        let mut negative = vec![vec![T::zero(); len]; m];
        for a in 0..m {
            for b in (0..m).filter(|&b| b != a) {
                let (p, q) = choquet_coefficients(prefs.vector(a, b));
                for i in 0..len {
                    positive[a][i] += p[i] * scale;
                    negative[a][i] += q[i] * scale;
                }
            }
        }
        FlowCoefficients {
            m,
            prefs,
            positive,
            negative,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn positive(&self, a: usize) -> &[T] {
        &self.positive[a]
    }

    pub fn negative(&self, a: usize) -> &[T] {
        &self.negative[a]
    }

    pub fn net(&self, a: usize) -> Vec<T> {
        sub(&self.positive[a], &self.negative[a])
    }

    /// Coefficients of `Phi(a) - Phi(b)`.
    pub fn net_difference(&self, a: usize, b: usize) -> Vec<T> {
        sub(&self.net(a), &self.net(b))
    }

    /// Coefficients of `ChB(P^B(a, b))`.
    pub fn local(&self, a: usize, b: usize) -> Vec<T> {
        let (p, q) = choquet_coefficients(self.prefs.vector(a, b));
        sub(&p, &q)
    }
}

fn sub<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

/// `compile_with_cap` at the default enumeration cap.
pub fn compile<T: Scalar>(
    statements: &[PreferenceStatement],
    table: &PerformanceTable<T>,
) -> Result<ConstraintSystem<T>> {
    compile_with_cap(statements, table, DEFAULT_MAX_CRITERIA)
}

/// Builds the full system: statement rows in input order, then the boundary,
/// sign and monotonicity rows.
pub fn compile_with_cap<T: Scalar>(
    statements: &[PreferenceStatement],
    table: &PerformanceTable<T>,
    max_criteria: usize,
) -> Result<ConstraintSystem<T>> {
    let n = table.n();
    if n > max_criteria {
        return Err(Error::CapacityExceeded {
            n,
            cap: max_criteria,
        });
    }
    let mut sys = ConstraintSystem::new(n);
    let flows = FlowCoefficients::new(table);
    for (pos, st) in statements.iter().enumerate() {
        let index = pos + 1;
        st.check(table.m(), n).map_err(|message| Error::Statement {
            statement: index,
            message,
        })?;
        let prov = Provenance::Statement {
            index,
            text: st.describe(table),
        };
        compile_statement(&mut sys, &flows, st, prov)?;
    }
    push_structural(&mut sys)?;
    Ok(sys)
}

fn compile_statement<T: Scalar>(
    sys: &mut ConstraintSystem<T>,
    flows: &FlowCoefficients<T>,
    st: &PreferenceStatement,
    prov: Provenance,
) -> Result<()> {
    let (zero, one) = (T::zero(), T::one());
    let layout = *sys.index().layout();
    let unit = |cols: &[(usize, T)]| {
        let mut v = vec![zero; layout.len()];
        for &(c, s) in cols {
            v[c] += s;
        }
        v
    };
    // `expr >= epsilon` or `expr = 0`
    let strict_or_equal = |sys: &mut ConstraintSystem<T>, expr: Vec<T>, strict: bool| {
        if strict {
            sys.push_params(&expr, -one, Relation::Ge, zero, prov.clone())
        } else {
            sys.push_params(&expr, zero, Relation::Eq, zero, prov.clone())
        }
    };
    match *st {
        PreferenceStatement::LocalPair { a, b, kind } => {
            strict_or_equal(sys, flows.local(a, b), kind == Comparison::Preferred)
        }
        PreferenceStatement::GlobalP1 { a, b, kind } => {
            let plus = sub(flows.positive(a), flows.positive(b));
            let minus = sub(flows.negative(a), flows.negative(b));
            match kind {
                Comparison::Preferred => {
                    sys.push_params(&plus, zero, Relation::Ge, zero, prov.clone())?;
                    sys.push_params(&minus, zero, Relation::Le, zero, prov.clone())?;
                    strict_or_equal(sys, flows.net_difference(a, b), true)
                }
                Comparison::Indifferent => {
                    sys.push_params(&plus, zero, Relation::Eq, zero, prov.clone())?;
                    sys.push_params(&minus, zero, Relation::Eq, zero, prov.clone())
                }
            }
        }
        PreferenceStatement::GlobalP2 { a, b, kind } => strict_or_equal(
            sys,
            flows.net_difference(a, b),
            kind == Comparison::Preferred,
        ),
        PreferenceStatement::Intensity {
            first,
            second,
            kind,
        } => {
            let expr = sub(
                &flows.local(first.0, first.1),
                &flows.local(second.0, second.1),
            );
            strict_or_equal(sys, expr, kind == Comparison::Preferred)
        }
        PreferenceStatement::CriterionImportance { j, k, kind } => {
            let expr = unit(&[(layout.weight(j), one), (layout.weight(k), -one)]);
            strict_or_equal(sys, expr, kind == Magnitude::Greater)
        }
        PreferenceStatement::InteractionSign { j, k, sign } => {
            let col = layout.interaction(j, k);
            match sign {
                InteractionSign::Synergy => strict_or_equal(sys, unit(&[(col, one)]), true),
                InteractionSign::Redundancy => strict_or_equal(sys, unit(&[(col, -one)]), true),
                InteractionSign::None => strict_or_equal(sys, unit(&[(col, one)]), false),
            }
        }
        PreferenceStatement::InteractionMagnitude {
            first,
            second,
            kind,
            signs,
        } => {
            // |a| = a for synergy, -a for redundancy
            let abs_sign = |s: InteractionSign| {
                if s == InteractionSign::Redundancy {
                    -one
                } else {
                    one
                }
            };
            let c1 = layout.interaction(first.0, first.1);
            let c2 = layout.interaction(second.0, second.1);
            let (s1, s2) = (abs_sign(signs.0), abs_sign(signs.1));
            match kind {
                Magnitude::Greater => strict_or_equal(sys, unit(&[(c1, s1), (c2, -s2)]), true),
                Magnitude::Equal => {
                    // same sign: a_jk = a_pq; mixed: a_jk = -a_pq
                    let expr = unit(&[(c1, one), (c2, -(s1 * s2))]);
                    strict_or_equal(sys, expr, false)
                }
            }
        }
        PreferenceStatement::OpposingPower { variant, j, k, h } => {
            let other = match variant {
                OpposingVariant::SharedSupporter => layout.opposing(j, h),
                OpposingVariant::SharedOpponent => layout.opposing(h, k),
            };
            // a+_{j|k} - other <= -epsilon
            let expr = unit(&[(layout.opposing(j, k), -one), (other, one)]);
            strict_or_equal(sys, expr, true)
        }
    }
}

fn push_structural<T: Scalar>(sys: &mut ConstraintSystem<T>) -> Result<()> {
    let (zero, one) = (T::zero(), T::one());
    let layout = *sys.index().layout();
    let n = layout.n();
    let len = layout.len();

    let mut boundary = vec![zero; len];
    for v in boundary.iter_mut().take(n + layout.pair_count()) {
        *v = one;
    }
    sys.push_params(&boundary, zero, Relation::Eq, one, Provenance::Boundary)?;

    for j in 0..n {
        let mut row = vec![zero; len];
        row[layout.weight(j)] = one;
        sys.push_params(&row, zero, Relation::Ge, zero, Provenance::WeightSign { j })?;
    }
    for (j, k) in layout.ordered_pairs() {
        let mut row = vec![zero; len];
        row[layout.opposing(j, k)] = one;
        sys.push_params(
            &row,
            zero,
            Relation::Le,
            zero,
            Provenance::OpposingSign { j, k },
        )?;
    }
    for cond in layout.monotonicity_conditions() {
        let mut row = vec![zero; len];
        for col in cond.columns(&layout) {
            row[col] += one;
        }
        sys.push_params(
            &row,
            zero,
            Relation::Ge,
            zero,
            Provenance::Monotonicity(cond),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipolar::testing::random_params;
    use crate::bipolar::{bipolar_flows, choquet_2additive, BicapacityParams};
    use crate::model::fixtures::students;
    use crate::promethee::{classical_flows, WeightVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scenario1() -> Vec<PreferenceStatement> {
        vec![
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
        ]
    }

    #[test]
    fn empty_system_shape() {
        let t = students::<f64>();
        let sys = compile(&[], &t).unwrap();
        assert_eq!(sys.columns(), 13);
        // boundary + 3 signs + 6 opposing signs + 2 * 3 * 9 monotonicity
        assert_eq!(sys.rows().len(), 1 + 3 + 6 + 54);
        let dedup = sys.deduplicated();
        assert!(dedup.rows().len() < sys.rows().len());
        assert!(matches!(sys.rows()[0].provenance, Provenance::Boundary));
    }

    #[test]
    fn scenario_rows_come_first() {
        let t = students::<f64>();
        let sys = compile(&scenario1(), &t).unwrap();
        assert_eq!(sys.rows().len(), 2 + 64);
        for row in &sys.rows()[..2] {
            assert_eq!(row.relation, Relation::Ge);
            assert_eq!(row.coeffs[12], -1.0);
        }
        assert_eq!(
            sys.rows()[0].provenance.to_string(),
            "statement 1: local s7 P s2"
        );
    }

    #[test]
    fn criterion_importance_row() {
        let t = students::<f64>();
        let st = [PreferenceStatement::CriterionImportance {
            j: 0,
            k: 1,
            kind: Magnitude::Greater,
        }];
        let sys = compile(&st, &t).unwrap();
        let r = &sys.rows()[0];
        let mut want = vec![0.0; 13];
        want[0] = 1.0;
        want[1] = -1.0;
        want[12] = -1.0;
        assert_eq!(r.coeffs, want);
        assert_eq!((r.relation, r.rhs), (Relation::Ge, 0.0));
    }

    #[test]
    fn interaction_and_opposing_rows() {
        let t = students::<f64>();
        let l = ParamLayout::new(3);
        let st = [
            PreferenceStatement::InteractionMagnitude {
                first: (0, 1),
                second: (2, 1),
                kind: Magnitude::Greater,
                signs: (InteractionSign::Synergy, InteractionSign::Redundancy),
            },
            PreferenceStatement::InteractionMagnitude {
                first: (0, 1),
                second: (0, 2),
                kind: Magnitude::Equal,
                signs: (InteractionSign::Redundancy, InteractionSign::Redundancy),
            },
            PreferenceStatement::OpposingPower {
                variant: OpposingVariant::SharedOpponent,
                j: 0,
                k: 1,
                h: 2,
            },
            PreferenceStatement::InteractionSign {
                j: 2,
                k: 0,
                sign: InteractionSign::Redundancy,
            },
        ];
        let sys = compile(&st, &t).unwrap();
        let r = &sys.rows()[0].coeffs;
        assert_eq!((r[l.interaction(0, 1)], r[l.interaction(1, 2)]), (1.0, 1.0));
        let r = &sys.rows()[1].coeffs;
        assert_eq!(
            (r[l.interaction(0, 1)], r[l.interaction(0, 2)], r[12]),
            (1.0, -1.0, 0.0)
        );
        let r = &sys.rows()[2];
        assert_eq!(r.coeffs[l.opposing(0, 1)], -1.0);
        assert_eq!(r.coeffs[l.opposing(2, 1)], 1.0);
        assert_eq!(r.relation, Relation::Ge);
        let r = &sys.rows()[3].coeffs;
        assert_eq!((r[l.interaction(0, 2)], r[12]), (-1.0, -1.0));
    }

    #[test]
    fn capacity_is_enforced() {
        let t = students::<f64>();
        assert!(matches!(
            compile_with_cap(&[], &t, 2),
            Err(Error::CapacityExceeded { n: 3, cap: 2 })
        ));
    }

    #[test]
    fn out_of_range_statement_is_rejected() {
        let t = students::<f64>();
        let st = [PreferenceStatement::GlobalP2 {
            a: 0,
            b: 8,
            kind: Comparison::Preferred,
        }];
        assert!(matches!(
            compile(&st, &t),
            Err(Error::Statement { statement: 1, .. })
        ));
    }

    #[test]
    fn compile_is_deterministic() {
        let t = students::<f64>().with_thresholds(0.5, 2.5).unwrap();
        let st = vec![
            PreferenceStatement::Intensity {
                first: (0, 1),
                second: (2, 3),
                kind: Comparison::Preferred,
            },
            PreferenceStatement::GlobalP1 {
                a: 2,
                b: 5,
                kind: Comparison::Preferred,
            },
        ];
        let a = compile(&st, &t).unwrap();
        let b = compile(&st, &t).unwrap();
        assert_eq!(a.rows(), b.rows());
    }

    #[test]
    fn valid_params_satisfy_structural_rows() {
        let t = students::<f64>();
        let sys = compile(&[], &t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let p = random_params(&mut rng, 3);
            assert!(sys.is_satisfied_params(p.values(), 0.0, 1e-12));
        }
    }

    #[test]
    fn rows_agree_with_finite_differences() {
        let t = students::<f64>().with_thresholds(0.0, 3.0).unwrap();
        let flows = FlowCoefficients::new(&t);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = 1e-6;
        for _ in 0..10 {
            let base = random_params(&mut rng, 3).into_values();
            let (a, b) = (rng.random_range(0..8), rng.random_range(0..8));
            let eval_net = |v: &[f64]| {
                let p = BicapacityParams::from_values_unchecked(3, v.to_vec()).unwrap();
                let f = bipolar_flows(&t, &p).unwrap();
                f[a].net - f[b].net
            };
            let prefs = BipolarPreferences::new(&t);
            let eval_local = |v: &[f64]| {
                let p = BicapacityParams::from_values_unchecked(3, v.to_vec()).unwrap();
                choquet_2additive(prefs.vector(a, b), &p).total
            };
            let net = flows.net_difference(a, b);
            let local = flows.local(a, b);
            for i in 0..base.len() {
                let mut up = base.clone();
                up[i] += h;
                let mut down = base.clone();
                down[i] -= h;
                let d_net = (eval_net(&up) - eval_net(&down)) / (2.0 * h);
                let d_local = (eval_local(&up) - eval_local(&down)) / (2.0 * h);
                assert!((d_net - net[i]).abs() < 1e-8, "net column {i}");
                assert!((d_local - local[i]).abs() < 1e-8, "local column {i}");
            }
            let dot: f64 = net.iter().zip(&base).map(|(c, v)| c * v).sum();
            assert!((dot - eval_net(&base)).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_restriction_matches_promethee_flows() {
        let t = students::<f64>();
        let st = [PreferenceStatement::GlobalP2 {
            a: 2,
            b: 6,
            kind: Comparison::Preferred,
        }];
        let sys = compile(&st, &t).unwrap().restrict_classical();
        assert!(sys.is_classical());
        assert_eq!(sys.rows().len(), 1 + 64 + 9);
        let row = &sys.rows()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.01..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let w: Vec<f64> = raw.iter().map(|v| v / s).collect();
            let flows = classical_flows(&t, &WeightVector::new(w.clone()).unwrap()).unwrap();
            let mut x = BicapacityParams::from_weights(&w).into_values();
            x.push(0.0);
            let direct = flows[2].net - flows[6].net;
            assert!((row.lhs(&x) - direct).abs() < 1e-12);
            assert!(sys.rows()[1..].iter().all(|r| r.violation(&x) < 1e-12));
        }
    }

    #[test]
    fn fixing_epsilon_moves_it_to_rhs() {
        let t = students::<f64>();
        let sys = compile(&scenario1(), &t).unwrap();
        let rows = sys.fix_epsilon(0.25);
        assert_eq!(rows[0].coeffs.len(), 12);
        assert_eq!(rows[0].rhs, 0.25);
        assert_eq!(rows[2].rhs, 1.0);
    }
}
