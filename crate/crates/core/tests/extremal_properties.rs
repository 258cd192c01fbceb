use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use hypercube_codes::basisprob::{self, SimplexPoint};
use hypercube_codes::extremal;
use hypercube_codes::regression;

#[test]
fn p_is_decreasing_to_forty() {
    let values: Vec<BigRational> = (1..=40).map(|t| basisprob::p_exact(t).unwrap()).collect();
    for (t, w) in values.windows(2).enumerate() {
        assert!(w[1] < w[0], "P({}) >= P({})", t + 2, t + 1);
    }
}

#[test]
fn p_forty_frozen_to_six_places() {
    assert_eq!(basisprob::to_decimal(&basisprob::p_exact(40).unwrap(), 6), "0.288788");
}

#[test]
fn limit_agrees_with_euler_product() {
    // prod_{i>=1} (1 - 2^-i) converges to the same constant.
    let euler: f64 = (1..=80).map(|i| 1.0 - (-(i as f64)).exp2()).product();
    assert!((basisprob::limit_f64() - euler).abs() < 1e-14);
    let lc = basisprob::limit_constant(10).unwrap();
    assert_eq!(lc.decimal, format!("{euler:.10}"));
    assert!(lc.lower.to_f64().unwrap() <= euler && euler <= lc.upper.to_f64().unwrap());
}

#[test]
fn uniform_distribution_attains_p() {
    for t in 1..=4 {
        let u = SimplexPoint::uniform(t).unwrap();
        assert_eq!(basisprob::basis_probability(&u).unwrap(), basisprob::p_exact(t).unwrap());
    }
}

/// Double loop over ordered pairs, for t = 2.
#[test]
fn basis_probability_matches_pair_oracle() {
    let weights = [3u64, 5, 11];
    let dist = SimplexPoint::from_weights(2, &weights).unwrap();
    let total: u64 = weights.iter().sum();
    let mut oracle = BigRational::from_integer(0.into());
    for a in 1..4u64 {
        for b in 1..4u64 {
            if a != b {
                oracle += BigRational::new(BigInt::from(weights[a as usize - 1] * weights[b as usize - 1]), BigInt::from(total * total));
            }
        }
    }
    assert_eq!(basisprob::basis_probability(&dist).unwrap(), oracle);
}

#[test]
fn monte_carlo_is_deterministic_and_close() {
    let dist = SimplexPoint::from_weights(4, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]).unwrap();
    let exact = basisprob::basis_probability(&dist).unwrap().to_f64().unwrap();
    let a = basisprob::monte_carlo_basis_probability(&dist, 400_000, 7).unwrap();
    let b = basisprob::monte_carlo_basis_probability(&dist, 400_000, 7).unwrap();
    assert_eq!(a, b);
    // Five standard errors.
    let se = (exact * (1.0 - exact) / 400_000.0).sqrt();
    assert!((a - exact).abs() < 5.0 * se, "estimate {a}, exact {exact}");
}

#[test]
fn g_closed_form_for_multiples_of_three() {
    for d in (6..=30).step_by(3) {
        let check = extremal::g_closed_form_check(d).unwrap();
        assert!(check.holds, "d={d}: g={} below closed form {}", check.g_value, check.closed_form);
    }
}

#[test]
fn bkd_monotone_and_plausibility_bounds_hold() {
    for d in 2..=7 {
        for k in 1..d {
            let value = extremal::bkd_bruteforce(k, d).unwrap().value;
            let bounds = extremal::bkd_bounds(k, d).unwrap();
            assert!(bounds.plausibility_lower <= value, "({k},{d})");
            for upper in [bounds.part3_upper, bounds.part4_upper, bounds.monotone_upper].into_iter().flatten() {
                assert!(value <= upper, "({k},{d}): {value} > {upper}");
            }
            assert!(value <= binom(d, k));
        }
    }
}

fn binom(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[test]
fn layers_four_apart_fit_under_eight() {
    // B(0, 5) is taken as 1: the empty submatrix.
    let b = |k: usize| if k == 0 || k == 5 { 1 } else { extremal::bkd_bruteforce(k, 5).unwrap().value };
    for k in 0..=5 {
        for j in k + 4..=5 {
            assert!(b(k) + b(j) <= 8, "B({k},5) + B({j},5) = {}", b(k) + b(j));
        }
    }
}

#[test]
fn bounds_table_rows_are_consistent() {
    let rows = extremal::ld_bounds_table(extremal::TABLE_LIMIT).unwrap();
    for row in &rows {
        assert!(row.lower >= row.jt_lower);
        if let Some(g) = row.g_lower {
            assert!(row.lower >= g);
        }
        if let Some(u) = row.construction_upper {
            assert!(row.lower <= u as u128, "d={}: lower {} above upper {u}", row.d, row.lower);
            assert!(u <= extremal::central_binomial(row.d));
        }
    }
    let exact: Vec<Option<u128>> = rows.iter().take(5).map(|r| r.exact).collect();
    assert_eq!(exact, [Some(1), Some(2), Some(3), Some(5), Some(8)]);
}

#[test]
fn regression_manifest_matches() {
    let mismatches = regression::check_all().unwrap();
    assert!(mismatches.is_empty(), "{mismatches:?}");
}

fn distribution(t: usize) -> impl Strategy<Value = SimplexPoint> {
    prop::collection::vec(0u64..50, (1 << t) - 1)
        .prop_filter("some mass", |w| w.iter().any(|&x| x > 0))
        .prop_map(move |w| SimplexPoint::from_weights(t, &w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn basis_probability_never_exceeds_p(dist in (2usize..=4).prop_flat_map(distribution)) {
        let t = dist.t();
        let value = basisprob::basis_probability(&dist).unwrap();
        prop_assert!(value <= basisprob::p_exact(t).unwrap());
        prop_assert!(basisprob::lemma23_value_exact(&dist) <= basisprob::step_factor(t));
        let float = basisprob::lemma23_value(&dist);
        prop_assert!((float - basisprob::lemma23_value_exact(&dist).to_f64().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn point_mass_never_spans(t in 2usize..=4, v in 1u64..16) {
        prop_assume!(v < 1 << t);
        let dist = SimplexPoint::point_mass(t, v).unwrap();
        prop_assert_eq!(basisprob::basis_probability(&dist).unwrap(), BigRational::from_integer(0.into()));
        prop_assert!(basisprob::lemma23_value_exact(&dist) < BigRational::one());
    }

    #[test]
    fn g_dominates_every_partition(parts in prop::collection::vec(1u64..6, 2..6)) {
        let d: u64 = parts.iter().sum();
        prop_assume!(d >= 2);
        let g = extremal::g_partition(d as usize).unwrap().value;
        prop_assert!(extremal::edge_count_expression(&parts) <= g);
    }
}
