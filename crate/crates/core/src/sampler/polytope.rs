use crate::elicitation::{Relation, Row};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus};
use crate::scalar::{dot, Scalar};

/// `{ x = offset + N y : A y <= b }` with orthonormal `N` spanning the null
/// space of the equality rows and unit-norm rows of `A`.
#[derive(Debug, Clone)]
pub struct Polytope<T> {
    full_dim: usize,
    dim: usize,
    offset: Vec<T>,
    /// `full_dim x dim`, row-major.
    basis: Vec<T>,
    /// `rows x dim`, row-major.
    a: Vec<T>,
    b: Vec<T>,
}

/// Householder QR with column pivoting of a `rows x cols` row-major matrix.
/// Returns the full orthogonal `Q` (row-major), `R` (row-major, `rows x cols`),
/// the column permutation and the numerical rank.
fn qr_pivoted<T: Scalar>(
    mat: &[T],
    rows: usize,
    cols: usize,
    tol: T,
) -> (Vec<T>, Vec<T>, Vec<usize>, usize) {
    let mut r = mat.to_vec();
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut reflectors: Vec<Vec<T>> = Vec::new();
    let steps = rows.min(cols);
    let mut rank = 0;
    let scale = r
        .iter()
        .fold(T::zero(), |m, v| m.max(v.abs()))
        .max(T::one());
    for i in 0..steps {
        // pivot on the largest remaining column norm
        let norm = |r: &[T], c: usize| {
            (i..rows)
                .map(|k| r[k * cols + c] * r[k * cols + c])
                .sum::<T>()
                .sqrt()
        };
        let (best, best_norm) = (i..cols)
            .map(|c| (c, norm(&r, c)))
            .fold((i, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_norm <= tol * scale {
            break;
        }
        if best != i {
            for k in 0..rows {
                r.swap(k * cols + i, k * cols + best);
            }
            perm.swap(i, best);
        }
        let alpha = if r[i * cols + i] > T::zero() {
            -best_norm
        } else {
            best_norm
        };
        let mut v: Vec<T> = (i..rows).map(|k| r[k * cols + i]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
        if vnorm > T::zero() {
            for x in &mut v {
                *x /= vnorm;
            }
            for c in i..cols {
                let s = (i..rows).map(|k| v[k - i] * r[k * cols + c]).sum::<T>();
                let two_s = s + s;
                for k in i..rows {
                    r[k * cols + c] -= two_s * v[k - i];
                }
            }
        }
        reflectors.push(v);
        rank += 1;
    }
    // Q = H_0 H_1 ... applied to the identity
    let mut q = vec![T::zero(); rows * rows];
    for k in 0..rows {
        q[k * rows + k] = T::one();
    }
    for (i, v) in reflectors.iter().enumerate().rev() {
        for c in 0..rows {
            let s = (i..rows).map(|k| v[k - i] * q[k * rows + c]).sum::<T>();
            let two_s = s + s;
            for k in i..rows {
                q[k * rows + c] -= two_s * v[k - i];
            }
        }
    }
    (q, r, perm, rank)
}

impl<T: Scalar> Polytope<T> {
    /// Builds the reduced polytope from rows over `full_dim` columns.
    pub fn from_rows(rows: &[Row<T>], full_dim: usize, tol: T) -> Result<Self> {
        let eq: Vec<&Row<T>> = rows.iter().filter(|r| r.relation == Relation::Eq).collect();
        let k = eq.len();
        let p = full_dim;

        // E^T is p x k
        let mut et = vec![T::zero(); p * k];
        for (j, row) in eq.iter().enumerate() {
            for i in 0..p {
                et[i * k + j] = row.coeffs[i];
            }
        }
        let (q, r, perm, rank) = qr_pivoted(&et, p, k, T::tol(1e-12));

        // R_1^T z = (P^T f)_{1..rank}, forward substitution
        let mut z = vec![T::zero(); p];
        for i in 0..rank {
            let mut s = eq[perm[i]].rhs;
            for (l, zl) in z.iter().enumerate().take(i) {
                s -= r[l * k + i] * *zl;
            }
            z[i] = s / r[i * k + i];
        }
        let offset: Vec<T> = (0..p)
            .map(|i| (0..p).map(|c| q[i * p + c] * z[c]).sum())
            .collect();
        for row in &eq {
            if (row.lhs(&offset) - row.rhs).abs() > tol {
                return Err(Error::Infeasible {
                    epsilon: f64::NEG_INFINITY,
                });
            }
        }

        let dim = p - rank;
        let mut basis = vec![T::zero(); p * dim];
        for i in 0..p {
            for c in 0..dim {
                basis[i * dim + c] = q[i * p + rank + c];
            }
        }

        let mut a = Vec::new();
        let mut b = Vec::new();
        for row in rows.iter().filter(|r| r.relation != Relation::Eq) {
            let s = if row.relation == Relation::Le {
                T::one()
            } else {
                -T::one()
            };
            let reduced: Vec<T> = (0..dim)
                .map(|c| (0..p).map(|i| s * row.coeffs[i] * basis[i * dim + c]).sum())
                .collect();
            let rhs = s * row.rhs - s * row.lhs(&offset);
            let norm = reduced.iter().map(|v| *v * *v).sum::<T>().sqrt();
            if norm <= T::tol(1e-12) {
                if rhs < -tol {
                    return Err(Error::Infeasible {
                        epsilon: f64::NEG_INFINITY,
                    });
                }
                continue;
            }
            a.extend(reduced.iter().map(|v| *v / norm));
            b.push(rhs / norm);
        }
        Ok(Polytope {
            full_dim: p,
            dim,
            offset,
            basis,
            a,
            b,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    pub fn inequality_count(&self) -> usize {
        self.b.len()
    }

    pub(crate) fn row(&self, i: usize) -> &[T] {
        &self.a[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn rhs(&self, i: usize) -> T {
        self.b[i]
    }

    pub fn lift(&self, y: &[T]) -> Vec<T> {
        let mut x = self.offset.clone();
        self.lift_into(y, &mut x);
        x
    }

    pub(crate) fn lift_into(&self, y: &[T], out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.offset[i] + dot(&self.basis[i * self.dim..(i + 1) * self.dim], y);
        }
    }

    /// Reduced coordinates of a point satisfying the equalities.
    pub fn project(&self, x: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|c| {
                (0..self.full_dim)
                    .map(|i| self.basis[i * self.dim + c] * (x[i] - self.offset[i]))
                    .sum()
            })
            .collect()
    }

    /// Smallest slack `b_i - a_i . y` over all rows.
    pub fn min_slack(&self, y: &[T]) -> T {
        (0..self.b.len())
            .map(|i| self.b[i] - dot(self.row(i), y))
            .fold(T::infinity(), |m, s| m.min(s))
    }

    /// Centre and radius of the largest inscribed ball.
    pub fn chebyshev_center(&self, tol: T) -> Result<(Vec<T>, T)> {
        let d = self.dim;
        let mut objective = vec![T::zero(); d + 1];
        objective[d] = T::one();
        let mut lp = LinearProgram::new(objective);
        lp.free = vec![true; d + 1];
        lp.free[d] = false;
        for i in 0..self.b.len() {
            let mut c = self.row(i).to_vec();
            c.push(T::one());
            lp.add(c, Relation::Le, self.b[i]);
        }
        let mut cap = vec![T::zero(); d + 1];
        cap[d] = T::one();
        lp.add(cap, Relation::Le, T::lit(1e3));
        let res = lp.solve(tol)?;
        if res.status != LpStatus::Optimal {
            return Err(Error::Sampler(format!(
                "no inscribed ball ({:?})",
                res.status
            )));
        }
        let r = res.x[d];
        let mut y = res.x;
        y.truncate(d);
        Ok((y, r))
    }
}
