//! Extremal quantities bounding `L(d)`, the least `L` admitting
//! positive-density `(d, L, n)`-codes.
//!
//! - `B(k, d)`: the most nonsingular `k x k` column submatrices a `k x d`
//!   matrix over GF(2) can have, and `B(d) = max_k B(k, d)`. `B(d)` bounds
//!   `L(d)` from above through the layered construction.
//! - `g(d)`: the best edge count of a complete `(k+1)`-class `k`-uniform
//!   hypergraph on `d` vertices, a lower bound for `L(d)`.
//! - `t2(d) + t3(d)`: the earlier lower bound, kept for comparison.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::basisprob::p_unchecked;
use crate::codes::binomial;
use crate::error::{invalid, out_of_regime, Result};
use crate::gf2::{for_each_independent_subset, GF2Matrix};

/// Cap on the number of column multisets [`bkd_bruteforce`] will visit.
pub const BKD_SEARCH_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct BkdResult {
    pub k: usize,
    pub d: usize,
    pub value: u64,
    pub witness: GF2Matrix,
}

/// Multisets of extra columns visited for `(k, d)`: after a row change of
/// basis any maximizer contains the identity, so only the other `d - k`
/// columns vary over the `2^k - 1` nonzero vectors.
pub fn bkd_search_size(k: usize, d: usize) -> Option<u64> {
    if k == 0 || k > d || k > 20 {
        return None;
    }
    let kinds = (1u64 << k) - 1;
    let extra = (d - k) as u64;
    // C(kinds - 1 + extra, extra), saturating.
    let mut acc: u128 = 1;
    for i in 0..extra {
        acc = acc * (kinds - 1 + extra - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Some(u64::MAX);
        }
    }
    Some(acc as u64)
}

pub fn bkd_in_regime(k: usize, d: usize) -> bool {
    d <= 64 && bkd_search_size(k, d).is_some_and(|s| s <= BKD_SEARCH_LIMIT)
}

/// Exact `B(k, d)` with a witness matrix.
///
/// Zero columns never help, and left-multiplying by an invertible matrix
/// preserves which column subsets are nonsingular, so it suffices to search
/// matrices `[I_k | X]` with `X` a multiset of `d - k` nonzero columns. The
/// first maximizer in the enumeration order is returned.
pub fn bkd_bruteforce(k: usize, d: usize) -> Result<BkdResult> {
    if k == 0 || k > d {
        return Err(invalid(format!("need 1 <= k <= d, got k={k}, d={d}")));
    }
    if !bkd_in_regime(k, d) {
        return Err(out_of_regime(format!(
            "B({k},{d}) search would visit {} multisets, limit {BKD_SEARCH_LIMIT}",
            bkd_search_size(k, d).map_or_else(|| "too many".into(), |s| s.to_string())
        )));
    }
    let top = (1u64 << k) - 1;
    let mut columns: Vec<u64> = (0..k).map(|i| 1u64 << i).collect();
    columns.resize(d, 1);
    let mut best_value = 0u64;
    let mut best = columns.clone();
    loop {
        let mut count = 0u64;
        for_each_independent_subset(&columns, k, |_| count += 1);
        if count > best_value {
            best_value = count;
            best.clone_from(&columns);
        }
        // Next non-decreasing sequence in columns[k..].
        let Some(pos) = (k..d).rev().find(|&i| columns[i] < top) else {
            break;
        };
        let next = columns[pos] + 1;
        columns[pos..].iter_mut().for_each(|c| *c = next);
    }
    Ok(BkdResult { k, d, value: best_value, witness: GF2Matrix::from_column_bits(k, best)? })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BkdBounds {
    pub k: usize,
    pub d: usize,
    /// `ceil(P(k) C(d, k))`: a random matrix with uniform nonzero columns
    /// achieves this on average.
    pub plausibility_lower: u64,
    /// `floor(P(k) d^k / k!)`, valid for `d >= k^2`.
    pub part3_upper: Option<u64>,
    /// `floor(d B(k-1, d-1) / k)` by double counting, for `k >= 2`.
    pub part4_upper: Option<u64>,
    /// `floor(B(k, d') C(d, k) / C(d', k))` from the largest computable
    /// `d' < d`, since `B(k, d) / C(d, k)` is non-increasing in `d`.
    pub monotone_upper: Option<u64>,
    pub monotone_from: Option<usize>,
}

pub fn bkd_bounds(k: usize, d: usize) -> Result<BkdBounds> {
    if k == 0 || k > d {
        return Err(invalid(format!("need 1 <= k <= d, got k={k}, d={d}")));
    }
    if k > 64 {
        return Err(invalid("k above 64 is not supported"));
    }
    let p = p_unchecked(k);
    let choose = BigRational::from_integer(binom_big(d, k));
    let plausibility_lower = (&p * &choose).ceil().to_integer().to_u64().unwrap_or(u64::MAX);

    let part3_upper = (d >= k * k).then(|| {
        let dk = num_traits::pow(BigInt::from(d), k);
        let fact = (1..=k).fold(BigInt::from(1), |acc, i| acc * i);
        (&p * BigRational::new(dk, fact)).floor().to_integer().to_u64().unwrap_or(u64::MAX)
    });

    let part4_upper = if k >= 2 {
        bkd_bruteforce(k - 1, d - 1).ok().map(|b| d as u64 * b.value / k as u64)
    } else {
        None
    };

    let monotone = (k..d).rev().find(|&dp| bkd_in_regime(k, dp)).map(|dp| {
        let b = bkd_bruteforce(k, dp).expect("in regime");
        let scaled = BigInt::from(b.value) * binom_big(d, k);
        let (q, _) = scaled.div_rem(&binom_big(dp, k));
        (q.to_u64().unwrap_or(u64::MAX), dp)
    });

    Ok(BkdBounds {
        k,
        d,
        plausibility_lower,
        part3_upper,
        part4_upper,
        monotone_upper: monotone.map(|m| m.0),
        monotone_from: monotone.map(|m| m.1),
    })
}

fn binom_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

/// Largest `d` for which [`b_max`] is computed.
pub const B_MAX_LIMIT: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct BMax {
    pub d: usize,
    pub value: u64,
    pub argmax_k: usize,
    pub witness: GF2Matrix,
}

/// `B(d)`, maximizing over `k <= d/2` only since `B(k, d) = B(d - k, d)`.
/// Ties go to the smaller `k`.
pub fn b_max(d: usize) -> Result<BMax> {
    if d == 0 || d > B_MAX_LIMIT {
        return Err(out_of_regime(format!("B(d) is computed for 1 <= d <= {B_MAX_LIMIT}, got {d}")));
    }
    let mut best: Option<BkdResult> = None;
    for k in 1..=(d / 2).max(1) {
        let r = bkd_bruteforce(k, d)?;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one k");
    Ok(BMax { d, value: best.value, argmax_k: best.k, witness: best.witness })
}

// ---------------------------------------------------------------------------
// g(d)
// ---------------------------------------------------------------------------

/// A partition `d = a_1 + ... + a_{k+1}` with non-increasing parts; at most
/// the final part is zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub d: usize,
    pub parts: Vec<u64>,
}

impl Partition {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(invalid("a partition into k+1 classes needs at least two parts"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid("parts must be non-increasing"));
        }
        let d = parts.iter().sum::<u64>() as usize;
        Ok(Partition { d, parts })
    }

    /// `sum_i prod_{j != i} a_j`.
    pub fn value(&self) -> u128 {
        edge_count_expression(&self.parts)
    }
}

/// `sum_i prod_{j != i} a_j`: the number of edges of the complete
/// `(len-1)`-uniform hypergraph with one vertex class per entry.
pub fn edge_count_expression(parts: &[u64]) -> u128 {
    let m = parts.len();
    let mut suffix = vec![1u128; m + 1];
    for i in (0..m).rev() {
        suffix[i] = suffix[i + 1] * parts[i] as u128;
    }
    let mut prefix = 1u128;
    let mut total = 0u128;
    for i in 0..m {
        total += prefix * suffix[i + 1];
        prefix *= parts[i] as u128;
    }
    total
}

pub const G_LIMIT: usize = 60;

#[derive(Clone, Debug, Serialize)]
pub struct GResult {
    pub d: usize,
    pub value: u128,
    pub best: Partition,
}

/// Exact `g(d)` over all partitions. A partition may carry one zero part; two
/// or more zero parts make every term vanish. Ties go to the
/// lexicographically largest part list.
pub fn g_partition(d: usize) -> Result<GResult> {
    if !(2..=G_LIMIT).contains(&d) {
        return Err(invalid(format!("g(d) is computed for 2 <= d <= {G_LIMIT}, got {d}")));
    }
    let mut best_value = 0u128;
    let mut best_parts: Vec<u64> = Vec::new();
    let mut consider = |parts: &[u64], value: u128| {
        if value > best_value || (value == best_value && parts > best_parts.as_slice()) {
            best_value = value;
            best_parts = parts.to_vec();
        }
    };
    let mut buf = Vec::with_capacity(d + 1);
    for_each_partition(d as u64, d as u64, &mut buf, &mut |parts| {
        if parts.len() >= 2 {
            consider(parts, edge_count_expression(parts));
        }
        let product = parts.iter().map(|&a| a as u128).product();
        let mut with_zero = parts.to_vec();
        with_zero.push(0);
        consider(&with_zero, product);
    });
    Ok(GResult { d, value: best_value, best: Partition { d, parts: best_parts } })
}

/// Visits every partition of `rest` into positive non-increasing parts no
/// larger than `max`.
fn for_each_partition(rest: u64, max: u64, buf: &mut Vec<u64>, visit: &mut impl FnMut(&[u64])) {
    if rest == 0 {
        visit(buf);
        return;
    }
    for part in (1..=max.min(rest)).rev() {
        buf.push(part);
        for_each_partition(rest - part, part, buf, visit);
        buf.pop();
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormCheck {
    pub d: usize,
    pub g_value: u128,
    /// `d * 3^((d-6)/3)`, the value of the all-threes partition.
    pub closed_form: u128,
    pub holds: bool,
    pub all_threes_attains_max: bool,
    pub best: Partition,
}

/// Compares `g(d)` with `d 3^((d-6)/3)` for `d` divisible by 3.
pub fn g_closed_form_check(d: usize) -> Result<ClosedFormCheck> {
    if !d.is_multiple_of(3) || !(3..=G_LIMIT).contains(&d) {
        return Err(invalid(format!("need d divisible by 3 with 3 <= d <= {G_LIMIT}, got {d}")));
    }
    let g = g_partition(d)?;
    let threes = vec![3u64; d / 3];
    let all_threes = if threes.len() >= 2 { edge_count_expression(&threes) } else { 3 };
    // d * 3^((d-6)/3) = (d/3) * 3^(d/3 - 1); for d = 3 this is 1 * 3^0.
    let closed_form = (d / 3) as u128 * 3u128.pow((d / 3 - 1) as u32);
    Ok(ClosedFormCheck {
        d,
        g_value: g.value,
        closed_form,
        holds: g.value >= closed_form,
        all_threes_attains_max: all_threes == g.value,
        best: g.best,
    })
}

// ---------------------------------------------------------------------------
// Lower bound t2(d) + t3(d) and the bounds table
// ---------------------------------------------------------------------------

/// `t2(d) + t3(d)`. For `d = 1` the `t3` formula gives `4/3`; its floor 1 is
/// used.
pub fn jt_lower_bound(d: usize) -> Result<u128> {
    if d == 0 || d > 240 {
        return Err(invalid(format!("need 1 <= d <= 240, got {d}")));
    }
    let t2 = if d.div_ceil(3) % 2 == 1 { 0 } else { 1 };
    let t3 = match d % 3 {
        0 => 3u128.pow((d / 3) as u32),
        1 if d == 1 => 1,
        1 => 4 * 3u128.pow(((d - 4) / 3) as u32),
        _ => 2 * 3u128.pow(((d - 2) / 3) as u32),
    };
    Ok(t2 + t3)
}

pub const TABLE_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LdBoundsRow {
    pub d: usize,
    pub jt_lower: u128,
    pub g_lower: Option<u128>,
    pub g_partition: Option<Vec<u64>>,
    pub construction_upper: Option<u64>,
    /// Best available lower bound.
    pub lower: u128,
    /// Set when the bounds meet.
    pub exact: Option<u128>,
}

pub fn ld_bounds_table(d_max: usize) -> Result<Vec<LdBoundsRow>> {
    if d_max == 0 || d_max > TABLE_LIMIT {
        return Err(out_of_regime(format!("table covers 1 <= d <= {TABLE_LIMIT}, got {d_max}")));
    }
    (1..=d_max)
        .map(|d| {
            let jt_lower = jt_lower_bound(d)?;
            let g = (d >= 2).then(|| g_partition(d)).transpose()?;
            let construction_upper = (d <= B_MAX_LIMIT).then(|| b_max(d)).transpose()?.map(|b| b.value);
            let lower = jt_lower.max(g.as_ref().map_or(1, |g| g.value));
            let exact = construction_upper.filter(|&u| u as u128 == lower).map(|u| u as u128);
            Ok(LdBoundsRow {
                d,
                jt_lower,
                g_lower: g.as_ref().map(|g| g.value),
                g_partition: g.map(|g| g.best.parts),
                construction_upper,
                lower,
                exact,
            })
        })
        .collect()
}

/// `C(d, floor(d/2))`, the trivial upper bound on `L(d)`.
pub fn central_binomial(d: usize) -> u64 {
    binomial(d, d / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::count_nonsingular_submatrices;

    #[test]
    fn bkd_reference_values() {
        for (k, d, v) in [(2, 4, 5), (2, 5, 8), (3, 6, 16), (3, 7, 28)] {
            let r = bkd_bruteforce(k, d).unwrap();
            assert_eq!(r.value, v, "B({k},{d})");
            assert_eq!(count_nonsingular_submatrices(&r.witness).unwrap(), v);
            assert!(r.witness.columns().all(|c| !c.is_zero()));
        }
    }

    #[test]
    fn bkd_edges() {
        assert_eq!(bkd_bruteforce(1, 5).unwrap().value, 5);
        assert_eq!(bkd_bruteforce(5, 5).unwrap().value, 1);
        assert!(bkd_bruteforce(0, 3).is_err());
        assert!(bkd_bruteforce(4, 3).is_err());
        assert!(matches!(bkd_bruteforce(8, 20), Err(crate::Error::OutOfRegime(_))));
        assert_eq!(bkd_search_size(3, 7), Some(binomial(10, 4)));
    }

    #[test]
    fn bounds_examples() {
        let b = bkd_bounds(3, 6).unwrap();
        assert_eq!(b.part4_upper, Some(16));
        let b = bkd_bounds(3, 7).unwrap();
        assert_eq!(b.part4_upper, Some(28));
        let b = bkd_bounds(2, 9).unwrap();
        assert!(b.part3_upper.unwrap() >= bkd_bruteforce(2, 9).unwrap().value);
        assert_eq!(bkd_bounds(1, 4).unwrap().part4_upper, None);
        assert!(bkd_bounds(2, 3).unwrap().part3_upper.is_none());
    }

    #[test]
    fn b_max_values() {
        assert_eq!(b_max(5).unwrap().value, 8);
        assert_eq!(b_max(6).unwrap().value, 16);
        assert_eq!(b_max(7).unwrap().value, 28);
        assert_eq!(b_max(1).unwrap().value, 1);
        assert_eq!(b_max(4).unwrap().argmax_k, 2);
        assert!(b_max(9).is_err());
    }

    #[test]
    fn g_examples() {
        let g = g_partition(2).unwrap();
        assert_eq!((g.value, g.best.parts.clone()), (2, vec![2, 0]));
        let g = g_partition(5).unwrap();
        assert_eq!((g.value, g.best.parts.clone()), (8, vec![2, 2, 1]));
        let g = g_partition(10).unwrap();
        assert_eq!((g.value, g.best.parts.clone()), (80, vec![2, 2, 2, 2, 2]));
        assert!(g_partition(1).is_err());
        assert!(g_partition(61).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let c = g_closed_form_check(9).unwrap();
        assert!(c.holds);
        assert_eq!((c.g_value, c.closed_form), (48, 27));
        assert!(!c.all_threes_attains_max);
        assert_eq!(c.best.parts, vec![2, 2, 2, 2, 1]);
        let c = g_closed_form_check(6).unwrap();
        assert_eq!((c.g_value, c.closed_form), (12, 6));
        assert!(g_closed_form_check(7).is_err());
    }

    #[test]
    fn jt_examples() {
        let got: Vec<u128> = (5..=10).map(|d| jt_lower_bound(d).unwrap()).collect();
        assert_eq!(got, vec![7, 10, 12, 18, 27, 37]);
        assert_eq!(jt_lower_bound(1).unwrap(), 1);
        assert_eq!(jt_lower_bound(4).unwrap(), 5);
        assert!(jt_lower_bound(0).is_err());
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![3]).is_err());
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(Partition::new(vec![2, 2, 1]).unwrap().value(), 8);
        assert_eq!(edge_count_expression(&[2, 0]), 2);
        assert_eq!(edge_count_expression(&[2, 0, 0]), 0);
    }
}
