//! The basis probability `P(t)`: the chance that `t` independent uniform
//! nonzero vectors of `F_2^t` form a basis, its limit `c`, and bounds for
//! non-uniform draws.
//!
//! All `P(t)` work is exact. Floating point appears only in the sampling
//! estimator and in [`lemma23_value`].

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rayon::prelude::*;

use crate::error::{invalid, out_of_regime, Result};
use crate::gf2::XorBasis;
use crate::seed::{self, domain};

pub type ExactRational = BigRational;

const MAX_T: usize = 64;
/// Largest `t` for which [`basis_probability`] enumerates all ordered tuples.
pub const MAX_EXACT_T: usize = 4;
const MC_BATCH: u64 = 1 << 16;

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

/// `P(t)` for any `t >= 1`, without the public range check.
pub(crate) fn p_unchecked(t: usize) -> BigRational {
    let space = pow2(t);
    let nonzero = &space - 1;
    let num = (1..t).fold(BigInt::one(), |acc, i| acc * (&space - pow2(i)));
    let den = num_traits::pow(nonzero, t - 1);
    BigRational::new(num, den)
}

/// `P(t) = prod_{i=1}^{t-1} (2^t - 2^i) / (2^t - 1)`, exactly.
pub fn p_exact(t: usize) -> Result<BigRational> {
    if !(1..=MAX_T).contains(&t) {
        return Err(invalid(format!("t must be in 1..={MAX_T}, got {t}")));
    }
    Ok(p_unchecked(t))
}

/// `((2^t - 2) / (2^t - 1))^(t-1)`, the factor relating `P(t)` to `P(t-1)`
/// and the maximum of the single-vector sum bounded by [`lemma23_value`].
pub fn step_factor(t: usize) -> BigRational {
    let space = pow2(t);
    let base = BigRational::new(&space - 2, &space - 1);
    num_traits::pow(base, t.saturating_sub(1))
}

/// Checks `P(t) = ((2^t - 2)/(2^t - 1))^(t-1) P(t-1)` as exact rationals.
pub fn p_recurrence_check(t: usize) -> Result<bool> {
    if !(2..=MAX_T).contains(&t) {
        return Err(invalid(format!("t must be in 2..={MAX_T}, got {t}")));
    }
    Ok(p_unchecked(t) == step_factor(t) * p_unchecked(t - 1))
}

/// Bracket `[P(T) (1 - 2T/2^T), P(T)]` around `c`.
///
/// The tail `prod_{s > T} (1 - 1/(2^s - 1))^(s-1)` is at least
/// `1 - sum_{s > T} s/2^s = 1 - (T + 2)/2^T`, which is at least
/// `1 - 2T/2^T` once `T >= 2`.
pub fn certified_interval(truncation: usize) -> Result<(BigRational, BigRational)> {
    if truncation < 2 {
        return Err(invalid("certified interval needs T >= 2"));
    }
    let upper = p_unchecked(truncation);
    let slack = BigRational::new(BigInt::from(2 * truncation), pow2(truncation));
    let lower = &upper * (BigRational::one() - slack);
    Ok((lower, upper))
}

#[derive(Clone, Debug)]
pub struct LimitConstant {
    pub digits: usize,
    pub truncation: usize,
    pub lower: BigRational,
    pub upper: BigRational,
    /// `c` rounded to `digits` places; both interval ends round to it unless
    /// the truncation cap was reached first.
    pub decimal: String,
}

/// `c = lim P(t) = inf P(t)` to `digits` decimal places. Uses the smallest
/// truncation whose certified interval is narrower than `10^-digits` and
/// whose ends round to the same decimal.
pub fn limit_constant(digits: usize) -> Result<LimitConstant> {
    if !(1..=30).contains(&digits) {
        return Err(invalid(format!("digits must be in 1..=30, got {digits}")));
    }
    let tolerance = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits));
    let mut truncation = 2;
    loop {
        let (lower, upper) = certified_interval(truncation)?;
        let decimal = to_decimal(&upper, digits);
        let agreed = to_decimal(&lower, digits) == decimal || truncation >= MAX_T;
        if &upper - &lower < tolerance && agreed {
            return Ok(LimitConstant { digits, truncation, lower, upper, decimal });
        }
        truncation += 1;
    }
}

/// `c` as a float, from `P(64)`; the truncation error is below `2^-57`.
pub fn limit_f64() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| p_unchecked(64).to_f64().expect("P(64) is finite"))
}

/// Rounds half away from zero to `digits` places.
pub fn to_decimal(x: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = x.abs() * BigRational::from_integer(scale.clone());
    let rounded = (scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
}

/// A probability distribution on the nonzero vectors of `F_2^t`, indexed by
/// the vectors' integer values in increasing order (entry `v - 1` is `p_v`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexPoint {
    t: usize,
    probs: Vec<BigRational>,
}

impl SimplexPoint {
    pub fn new(t: usize, probs: Vec<BigRational>) -> Result<Self> {
        if !(1..=20).contains(&t) {
            return Err(invalid(format!("t must be in 1..=20, got {t}")));
        }
        if probs.len() != (1 << t) - 1 {
            return Err(invalid(format!("expected {} entries, got {}", (1 << t) - 1, probs.len())));
        }
        if probs.iter().any(|p| p.is_negative()) {
            return Err(invalid("probabilities must be non-negative"));
        }
        let total: BigRational = probs.iter().sum();
        if !total.is_one() {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(SimplexPoint { t, probs })
    }

    pub fn uniform(t: usize) -> Result<Self> {
        Self::from_weights(t, &vec![1; (1usize << t.min(20)) - 1])
    }

    /// Normalizes non-negative integer weights.
    pub fn from_weights(t: usize, weights: &[u64]) -> Result<Self> {
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(invalid("weights must not all be zero"));
        }
        let probs = weights.iter().map(|&w| BigRational::new(w.into(), total.into())).collect();
        Self::new(t, probs)
    }

    pub fn point_mass(t: usize, vector: u64) -> Result<Self> {
        if vector == 0 || vector >= 1 << t {
            return Err(invalid(format!("{vector} is not a nonzero vector of F_2^{t}")));
        }
        let mut weights = vec![0; (1 << t) - 1];
        weights[vector as usize - 1] = 1;
        Self::from_weights(t, &weights)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn prob(&self, vector: u64) -> &BigRational {
        &self.probs[vector as usize - 1]
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.to_f64().unwrap_or(0.0)).collect()
    }
}

/// Exact probability that `t` i.i.d. draws from `dist` form a basis of
/// `F_2^t`. Sums the weight of every ordered basis; `t <= 4`.
pub fn basis_probability(dist: &SimplexPoint) -> Result<BigRational> {
    let t = dist.t;
    if t > MAX_EXACT_T {
        return Err(out_of_regime(format!(
            "exact enumeration supports t <= {MAX_EXACT_T}, got {t}; use monte_carlo_basis_probability"
        )));
    }
    // Work with integer numerators over a common denominator.
    let denom = dist.probs.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
    let support: Vec<(u64, BigInt)> = (1..1u64 << t)
        .map(|v| (v, dist.prob(v)))
        .filter(|(_, p)| !p.is_zero())
        .map(|(v, p)| (v, p.numer() * (&denom / p.denom())))
        .collect();
    let mut basis = XorBasis::new();
    let total = sum_ordered_bases(&support, t, &mut basis, &BigInt::one());
    Ok(BigRational::new(total, num_traits::pow(denom, t)))
}

fn sum_ordered_bases(support: &[(u64, BigInt)], remaining: usize, basis: &mut XorBasis, weight: &BigInt) -> BigInt {
    if remaining == 0 {
        return weight.clone();
    }
    let mut total = BigInt::zero();
    for (v, p) in support {
        if let Some(pivot) = basis.insert(*v) {
            total += sum_ordered_bases(support, remaining - 1, basis, &(weight * p));
            basis.remove(pivot);
        }
    }
    total
}

/// Sampling estimate of [`basis_probability`], for any `t <= 20`.
///
/// Samples are split into fixed batches, each drawing from its own stream, so
/// the estimate depends only on `(dist, samples, seed)`.
pub fn monte_carlo_basis_probability(dist: &SimplexPoint, samples: u64, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let t = dist.t;
    let sampler = WeightedIndex::new(dist.to_f64()).map_err(|e| invalid(e.to_string()))?;
    let batches = samples.div_ceil(MC_BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed::rng_for(seed, seed::stream_id(domain::MONTE_CARLO, 0, b));
            let count = MC_BATCH.min(samples - b * MC_BATCH);
            (0..count)
                .filter(|_| {
                    let mut basis = XorBasis::new();
                    (0..t).all(|_| basis.insert(sampler.sample(&mut rng) as u64 + 1).is_some())
                })
                .count() as u64
        })
        .sum();
    Ok(hits as f64 / samples as f64)
}

/// `sum_v p_v (1 - p_v)^(t-1)`.
pub fn lemma23_value(dist: &SimplexPoint) -> f64 {
    dist.to_f64().iter().map(|&p| p * (1.0 - p).powi(dist.t as i32 - 1)).sum()
}

/// [`lemma23_value`] evaluated in exact arithmetic.
pub fn lemma23_value_exact(dist: &SimplexPoint) -> BigRational {
    dist.probs
        .iter()
        .map(|p| p * num_traits::pow(BigRational::one() - p, dist.t - 1))
        .sum()
}
