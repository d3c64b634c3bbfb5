//! Dense two-phase tableau simplex.

use crate::elicitation::Relation;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

/// `maximize objective . x` subject to the constraints; variables flagged
/// `free` are unrestricted, the others are non-negative.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
    pub free: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimplexStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct SimplexResult<T> {
    pub status: SimplexStatus,
    pub x: Vec<T>,
    pub objective: T,
    /// Sum of artificial variables at the end of phase one.
    pub phase1_objective: T,
    /// Constraints whose artificial variable stayed positive after phase one.
    pub artificial_active: Vec<bool>,
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

struct Tableau<T> {
    rows: usize,
    cols: usize,
    a: Vec<T>,
    b: Vec<T>,
    basis: Vec<usize>,
    cost: Vec<T>,
    value: T,
    barred: Vec<bool>,
    bland: bool,
    pivot_tol: T,
}

enum Step {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn at(&self, r: usize, c: usize) -> T {
        self.a[r * self.cols + c]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let cols = self.cols;
        let p = self.at(r, c);
        let inv = T::one() / p;
        for v in &mut self.a[r * cols..(r + 1) * cols] {
            *v *= inv;
        }
        self.b[r] *= inv;
        let (pivot_row, rb) = (self.a[r * cols..(r + 1) * cols].to_vec(), self.b[r]);
        for i in (0..self.rows).filter(|&i| i != r) {
            let f = self.a[i * cols + c];
            if f != T::zero() {
                for (v, &pr) in self.a[i * cols..(i + 1) * cols].iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                self.a[i * cols + c] = T::zero();
                self.b[i] -= f * rb;
                if self.b[i] < T::zero() && self.b[i] > -self.pivot_tol {
                    self.b[i] = T::zero();
                }
            }
        }
        let f = self.cost[c];
        if f != T::zero() {
            for (v, &pr) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            self.cost[c] = T::zero();
            self.value += f * rb;
        }
        self.basis[r] = c;
    }

    fn entering(&self, opt_tol: T) -> Option<usize> {
        let candidates = (0..self.cols).filter(|&j| !self.barred[j] && self.cost[j] > opt_tol);
        if self.bland {
            candidates.into_iter().next()
        } else {
            candidates.fold(None, |best: Option<usize>, j| match best {
                Some(b) if self.cost[b] >= self.cost[j] => Some(b),
                _ => Some(j),
            })
        }
    }

    fn leaving(&self, c: usize) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if a <= self.pivot_tol {
                continue;
            }
            let ratio = self.b[i] / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let tie = (ratio - br).abs() <= self.pivot_tol;
                    let better = if tie {
                        if self.bland {
                            self.basis[i] < self.basis[bi]
                        } else {
                            a > self.at(bi, c)
                        }
                    } else {
                        ratio < br
                    };
                    if better {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn run(&mut self, opt_tol: T, max_iter: usize) -> Result<Step> {
        let mut streak = 0;
        for _ in 0..max_iter {
            let Some(c) = self.entering(opt_tol) else {
                return Ok(Step::Optimal);
            };
            let Some(r) = self.leaving(c) else {
                return Ok(Step::Unbounded);
            };
            if self.b[r] <= self.pivot_tol {
                streak += 1;
                if streak > DEGENERATE_STREAK {
                    self.bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(r, c);
        }
        Err(Error::Numerical(format!(
            "simplex exceeded {max_iter} iterations"
        )))
    }

    /// Replaces the cost row by `c`, priced out against the current basis.
    fn set_costs(&mut self, c: &[T]) {
        self.cost = c.to_vec();
        self.value = T::zero();
        for r in 0..self.rows {
            let cb = c[self.basis[r]];
            if cb != T::zero() {
                for j in 0..self.cols {
                    let v = self.at(r, j);
                    self.cost[j] -= cb * v;
                }
                self.value += cb * self.b[r];
            }
        }
        for r in 0..self.rows {
            self.cost[self.basis[r]] = T::zero();
        }
    }
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(objective: Vec<T>) -> Self {
        let free = vec![false; objective.len()];
        LinearProgram {
            objective,
            constraints: Vec::new(),
            free,
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) {
        debug_assert_eq!(coeffs.len(), self.vars());
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Solves with `tol` as the feasibility and optimality tolerance.
    pub fn solve(&self, tol: T) -> Result<SimplexResult<T>> {
        let nv = self.vars();
        if self.free.len() != nv || self.constraints.iter().any(|c| c.coeffs.len() != nv) {
            return Err(Error::validation("linear program dimensions disagree"));
        }
        let (zero, one) = (T::zero(), T::one());
        let pivot_tol = T::tol(1e-11);
        let opt_tol = tol * T::lit(1e-2);

        // structural columns, free variables split into x+ and x-
        let mut split = Vec::with_capacity(nv);
        let mut ns = 0;
        for &f in &self.free {
            split.push(ns);
            ns += if f { 2 } else { 1 };
        }
        let m = self.constraints.len();
        let mut relations = Vec::with_capacity(m);
        let mut n_aux = 0;
        let mut n_art = 0;
        for c in &self.constraints {
            let rel = if c.rhs < zero {
                match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                }
            } else {
                c.relation
            };
            if rel != Relation::Eq {
                n_aux += 1;
            }
            if rel != Relation::Le {
                n_art += 1;
            }
            relations.push(rel);
        }
        let cols = ns + n_aux + n_art;
        let art_start = ns + n_aux;
        let mut t = Tableau {
            rows: m,
            cols,
            a: vec![zero; m * cols],
            b: vec![zero; m],
            basis: vec![0; m],
            cost: vec![zero; cols],
            value: zero,
            barred: vec![false; cols],
            bland: false,
            pivot_tol,
        };
        let mut art_of_row = vec![None; m];
        let (mut aux, mut art) = (ns, art_start);
        for (i, c) in self.constraints.iter().enumerate() {
            let s = if c.rhs < zero { -one } else { one };
            for (v, &coef) in c.coeffs.iter().enumerate() {
                t.a[i * cols + split[v]] = s * coef;
                if self.free[v] {
                    t.a[i * cols + split[v] + 1] = -s * coef;
                }
            }
            t.b[i] = s * c.rhs;
            match relations[i] {
                Relation::Le => {
                    t.a[i * cols + aux] = one;
                    t.basis[i] = aux;
                    aux += 1;
                }
                Relation::Ge => {
                    t.a[i * cols + aux] = -one;
                    aux += 1;
                    t.a[i * cols + art] = one;
                    t.basis[i] = art;
                    art_of_row[i] = Some(art);
                    art += 1;
                }
                Relation::Eq => {
                    t.a[i * cols + art] = one;
                    t.basis[i] = art;
                    art_of_row[i] = Some(art);
                    art += 1;
                }
            }
        }
        let max_iter = 200 * (m + cols) + 1000;

        // phase one: maximize -sum(artificials)
        let mut phase1 = vec![zero; cols];
        for v in &mut phase1[art_start..] {
            *v = -one;
        }
        t.set_costs(&phase1);
        t.run(opt_tol, max_iter)?;
        let phase1_objective = (-t.value).max(zero);
        let artificial_active: Vec<bool> = (0..m)
            .map(|i| match art_of_row[i] {
                Some(col) => (0..m).any(|r| t.basis[r] == col && t.b[r] > tol),
                None => false,
            })
            .collect();

        let extract = |t: &Tableau<T>| {
            let mut vals = vec![zero; cols];
            for r in 0..m {
                vals[t.basis[r]] = t.b[r];
            }
            (0..nv)
                .map(|v| {
                    let p = vals[split[v]];
                    if self.free[v] {
                        p - vals[split[v] + 1]
                    } else {
                        p
                    }
                })
                .collect::<Vec<T>>()
        };

        if phase1_objective > tol {
            let x = extract(&t);
            return Ok(SimplexResult {
                status: SimplexStatus::Infeasible,
                objective: crate::scalar::dot(&self.objective, &x),
                x,
                phase1_objective,
                artificial_active,
            });
        }

        // drive zero-level artificials out of the basis where possible
        for r in 0..m {
            if t.basis[r] >= art_start {
                if let Some(c) = (0..art_start).find(|&c| t.at(r, c).abs() > pivot_tol) {
                    t.pivot(r, c);
                }
            }
        }
        for v in &mut t.barred[art_start..] {
            *v = true;
        }

        // phase two
        let mut cost = vec![zero; cols];
        for (v, &c) in self.objective.iter().enumerate() {
            cost[split[v]] = c;
            if self.free[v] {
                cost[split[v] + 1] = -c;
            }
        }
        t.set_costs(&cost);
        t.bland = false;
        let status = match t.run(opt_tol, max_iter)? {
            Step::Optimal => SimplexStatus::Optimal,
            Step::Unbounded => SimplexStatus::Unbounded,
        };
        let x = extract(&t);
        Ok(SimplexResult {
            status,
            objective: crate::scalar::dot(&self.objective, &x),
            x,
            phase1_objective,
            artificial_active,
        })
    }
}
