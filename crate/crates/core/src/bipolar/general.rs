use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{BicapacityParams, ChoquetValue};

/// A decomposed bicapacity `mu = mu+ - mu-` stored densely on every disjoint
/// pair `(C, D)`, keyed by `C | D << n`.
#[derive(Debug, Clone)]
pub struct GeneralBicapacity<T> {
    n: usize,
    plus: Vec<T>,
    minus: Vec<T>,
}

impl<T: Scalar> GeneralBicapacity<T> {
    fn key(&self, c: u32, d: u32) -> usize {
        (c as usize) | ((d as usize) << self.n)
    }

    fn disjoint_pairs(n: usize) -> impl Iterator<Item = (u32, u32)> {
        let full = (1u32 << n) - 1;
        (0..=full).flat_map(move |c| {
            let rest = full & !c;
            // all submasks of `rest`, including the empty set
            let mut subs = Vec::new();
            let mut d = rest;
            loop {
                subs.push(d);
                if d == 0 {
                    break;
                }
                d = (d - 1) & rest;
            }
            subs.into_iter().map(move |d| (c, d))
        })
    }

    /// Expands the 2-additive decomposition.
    pub fn from_two_additive(params: &BicapacityParams<T>) -> Self {
        let n = params.n();
        let size = 1usize << (2 * n);
        let mut out = GeneralBicapacity {
            n,
            plus: vec![T::zero(); size],
            minus: vec![T::zero(); size],
        };
        for (c, d) in Self::disjoint_pairs(n) {
            let in_c = |j: usize| c >> j & 1 == 1;
            let in_d = |j: usize| d >> j & 1 == 1;
            let (mut plus, mut minus) = (T::zero(), T::zero());
            for j in 0..n {
                if in_c(j) {
                    plus += params.a(j);
                }
                if in_d(j) {
                    minus += params.a(j);
                }
                for k in j + 1..n {
                    if in_c(j) && in_c(k) {
                        plus += params.pair(j, k);
                    }
                    if in_d(j) && in_d(k) {
                        minus += params.pair(j, k);
                    }
                }
                for k in (0..n).filter(|&k| in_d(k)) {
                    if in_c(j) {
                        plus += params.opp_plus(j, k);
                        minus += params.opp_minus(j, k);
                    }
                }
            }
            let key = out.key(c, d);
            out.plus[key] = plus;
            out.minus[key] = minus;
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu_plus(&self, c: u32, d: u32) -> T {
        self.plus[self.key(c, d)]
    }

    pub fn mu_minus(&self, c: u32, d: u32) -> T {
        self.minus[self.key(c, d)]
    }

    pub fn mu(&self, c: u32, d: u32) -> T {
        self.mu_plus(c, d) - self.mu_minus(c, d)
    }

    /// Boundary conditions plus monotonicity along every elementary step.
    pub fn validate(&self, tol: T) -> Result<()> {
        let n = self.n;
        let full = (1u32 << n) - 1;
        let fail = |what: String| Err(Error::validation(what));
        if (self.mu_plus(full, 0) - T::one()).abs() > tol {
            return fail("mu+(J, {}) != 1".into());
        }
        if (self.mu_minus(0, full) - T::one()).abs() > tol {
            return fail("mu-({}, J) != 1".into());
        }
        for b in 0..=full {
            if self.mu_plus(0, b).abs() > tol || self.mu_minus(b, 0).abs() > tol {
                return fail(format!("boundary violated at B={b:#b}"));
            }
        }
        for (c, d) in Self::disjoint_pairs(n) {
            for j in 0..n {
                let bit = 1u32 << j;
                if (c | d) & bit == 0 {
                    // growing C raises mu+ and lowers mu-; growing D the reverse
                    let grow_c = self.mu_plus(c | bit, d) - self.mu_plus(c, d);
                    let grow_c_minus = self.mu_minus(c, d) - self.mu_minus(c | bit, d);
                    let grow_d = self.mu_minus(c, d | bit) - self.mu_minus(c, d);
                    let grow_d_plus = self.mu_plus(c, d) - self.mu_plus(c, d | bit);
                    if grow_c < -tol || grow_c_minus < -tol || grow_d < -tol || grow_d_plus < -tol {
                        return fail(format!(
                            "monotonicity violated at C={c:#b} D={d:#b} j={}",
                            j + 1
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The bipolar Choquet integral evaluated level by level from the stored
/// bicapacity.
pub fn choquet_definitional<T: Scalar>(x: &[T], mu: &GeneralBicapacity<T>) -> ChoquetValue<T> {
    debug_assert_eq!(x.len(), mu.n());
    let mut levels: Vec<T> = x
        .iter()
        .map(|v| v.abs())
        .filter(|v| *v > T::zero())
        .collect();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite preference"));
    levels.dedup();
    let (mut positive, mut negative) = (T::zero(), T::zero());
    let mut prev = T::zero();
    for level in levels {
        let (mut c, mut d) = (0u32, 0u32);
        for (j, &v) in x.iter().enumerate() {
            if v >= level {
                c |= 1 << j;
            } else if -v >= level {
                d |= 1 << j;
            }
        }
        let step = level - prev;
        positive += step * mu.mu_plus(c, d);
        negative += step * mu.mu_minus(c, d);
        prev = level;
    }
    ChoquetValue {
        total: positive - negative,
        positive,
        negative,
    }
}

#[cfg(test)]
mod tests {
    use super::super::testing::{random_params, random_x};
    use super::super::{choquet_2additive, ParamLayout};
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn disjoint_pair_count_is_three_to_the_n() {
        for n in 1..=5 {
            assert_eq!(
                GeneralBicapacity::<f64>::disjoint_pairs(n).count(),
                3usize.pow(n as u32)
            );
        }
    }

    #[test]
    fn expansion_of_valid_params_is_a_bicapacity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=5 {
            for _ in 0..20 {
                let p = random_params(&mut rng, n);
                GeneralBicapacity::from_two_additive(&p)
                    .validate(1e-12)
                    .unwrap();
            }
        }
    }

    #[test]
    fn negative_single_weight_fails_validation() {
        let l = ParamLayout::new(2);
        let mut v = vec![0.0f64; l.len()];
        v[0] = 1.2;
        v[1] = -0.2;
        let p = BicapacityParams::from_values_unchecked(2, v).unwrap();
        assert!(GeneralBicapacity::from_two_additive(&p)
            .validate(1e-12)
            .is_err());
    }

    #[test]
    fn zero_vector_integrates_to_zero() {
        let p = BicapacityParams::<f64>::from_weights(&[0.5, 0.5]);
        let ch = choquet_definitional(&[0.0, 0.0], &GeneralBicapacity::from_two_additive(&p));
        assert_eq!((ch.total, ch.positive, ch.negative), (0.0, 0.0, 0.0));
    }

    proptest! {
        #[test]
        fn closed_form_matches_definition(seed in any::<u64>(), n in 2usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_params(&mut rng, n);
            let mu = GeneralBicapacity::from_two_additive(&p);
            for _ in 0..8 {
                let x = random_x(&mut rng, n);
                let a = choquet_2additive(&x, &p);
                let b = choquet_definitional(&x, &mu);
                prop_assert!((a.positive - b.positive).abs() < 1e-12);
                prop_assert!((a.negative - b.negative).abs() < 1e-12);
                prop_assert!((a.total - b.total).abs() < 1e-12);
            }
        }

        #[test]
        fn relabelling_tied_criteria_is_harmless(seed in any::<u64>(), n in 2usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_params(&mut rng, n);
            let layout = *p.layout();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.rotate_left(1);
            let mut v = vec![0.0; layout.len()];
            for j in 0..n {
                v[layout.weight(perm[j])] = p.a(j);
            }
            for (j, k) in layout.pairs() {
                v[layout.interaction(perm[j], perm[k])] = p.pair(j, k);
            }
            for (j, k) in layout.ordered_pairs() {
                v[layout.opposing(perm[j], perm[k])] = p.opp_plus(j, k);
            }
            let q = BicapacityParams::new(n, v).unwrap();
            let mu = GeneralBicapacity::from_two_additive(&q);
            for _ in 0..8 {
                // a coarse grid forces equal magnitudes
                let x: Vec<f64> = (0..n).map(|_| f64::from(rand::Rng::random_range(&mut rng, -2i32..=2)) / 2.0).collect();
                let mut y = vec![0.0; n];
                for j in 0..n {
                    y[perm[j]] = x[j];
                }
                let a = choquet_2additive(&x, &p);
                let b = choquet_definitional(&y, &mu);
                prop_assert!((a.total - b.total).abs() < 1e-12);
                prop_assert!((a.positive - b.positive).abs() < 1e-12);
            }
        }
    }
}
