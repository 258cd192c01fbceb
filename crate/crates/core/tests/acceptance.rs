//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//! Each criterion also has a wall-clock budget.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypercube_codes::basisprob::{self, SimplexPoint};
use hypercube_codes::codes::{self, Code, RetryPolicy};
use hypercube_codes::cube;
use hypercube_codes::extremal::{self, Partition};
use hypercube_codes::gf2::{self, GF2Matrix};
use hypercube_codes::hypergraph;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Plain Gaussian elimination, kept separate from the library.
fn oracle_rank(vectors: &[u64]) -> usize {
    let mut rows = vectors.to_vec();
    let mut rank = 0;
    for bit in 0..64 {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i] >> bit & 1 == 1 {
                rows[i] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

fn c1_exact_constants() -> Outcome {
    let mut out = Vec::new();
    for t in [2usize, 3] {
        let nonzero = (1u64 << t) - 1;
        let total = nonzero.pow(t as u32);
        let mut bases = 0u64;
        for mut idx in 0..total {
            let mut tuple = Vec::with_capacity(t);
            for _ in 0..t {
                tuple.push(idx % nonzero + 1);
                idx /= nonzero;
            }
            if oracle_rank(&tuple) == t {
                bases += 1;
            }
        }
        let oracle = BigRational::new(bases.into(), total.into());
        let exact = basisprob::p_exact(t).map_err(err)?;
        ensure(exact == oracle, || format!("P({t}) = {exact}, enumeration gives {oracle}"))?;
        out.push(format!("P({t})={exact}"));
    }
    ensure(out == ["P(2)=2/3", "P(3)=24/49"], || format!("unexpected values {out:?}"))?;
    Ok(out.join(" "))
}

fn c2_limit_constant() -> Outcome {
    let (lower, upper) = basisprob::certified_interval(40).map_err(err)?;
    let width = (&upper - &lower).to_f64().unwrap();
    ensure(width < 1e-6, || format!("width {width:e} at T=40"))?;
    // Every point of the interval rounds to 0.29 at two places.
    let lo = BigRational::new(285.into(), 1000.into());
    let hi = BigRational::new(295.into(), 1000.into());
    ensure(lower >= lo && upper < hi, || "interval leaves [0.285, 0.295)".into())?;
    Ok(format!(
        "c in [{}, {}], width {width:.2e}",
        basisprob::to_decimal(&lower, 12),
        basisprob::to_decimal(&upper, 12)
    ))
}

fn c3_recurrence() -> Outcome {
    for t in 2..=40 {
        ensure(basisprob::p_recurrence_check(t).map_err(err)?, || format!("recurrence fails at t={t}"))?;
    }
    Ok("t = 2..40 exact".into())
}

/// `B(k, d)` by trying every `k x d` matrix, zero columns included.
fn oracle_bkd(k: usize, d: usize) -> u64 {
    let subsets: Vec<Vec<usize>> = (0..1u32 << d)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..d).filter(|&j| m >> j & 1 == 1).collect())
        .collect();
    let q = 1u64 << k;
    let mut best = 0;
    let mut cols = vec![0u64; d];
    for mut idx in 0..q.pow(d as u32) {
        for c in cols.iter_mut() {
            *c = idx % q;
            idx /= q;
        }
        let count = subsets
            .iter()
            .filter(|s| oracle_rank(&s.iter().map(|&j| cols[j]).collect::<Vec<_>>()) == k)
            .count() as u64;
        best = best.max(count);
    }
    best
}

fn c4_bkd() -> Outcome {
    for (k, d, want) in [(2, 4, 5), (2, 5, 8), (3, 6, 16), (3, 7, 28)] {
        let r = extremal::bkd_bruteforce(k, d).map_err(err)?;
        ensure(r.value == want, || format!("B({k},{d}) = {}, expected {want}", r.value))?;
        let witness = gf2::count_nonsingular_submatrices(&r.witness).map_err(err)?;
        ensure(witness == want, || format!("B({k},{d}) witness realizes {witness}"))?;
        let oracle = oracle_bkd(k, d);
        ensure(oracle == want, || format!("B({k},{d}) full enumeration gives {oracle}"))?;
    }
    for d in 2..=7 {
        for k in 1..d {
            let a = extremal::bkd_bruteforce(k, d).map_err(err)?.value;
            let b = extremal::bkd_bruteforce(d - k, d).map_err(err)?.value;
            ensure(a == b, || format!("B({k},{d}) = {a} but B({},{d}) = {b}", d - k))?;
        }
    }
    for (k, d, want) in [(3, 6, 16), (3, 7, 28)] {
        let part4 = extremal::bkd_bounds(k, d).map_err(err)?.part4_upper;
        ensure(part4 == Some(want), || format!("double-counting bound at ({k},{d}) is {part4:?}"))?;
    }
    Ok("B(2,4)=5 B(2,5)=8 B(3,6)=16 B(3,7)=28; symmetric for k<d<=7; double-counting bound tight".into())
}

/// `g(d)` over every composition of `d` into at least two positive parts,
/// plus compositions with a single zero part appended.
fn oracle_g(d: usize) -> u128 {
    let mut best = 0u128;
    for cuts in 0u32..1 << (d - 1) {
        let mut parts = Vec::new();
        let mut run = 1u128;
        for i in 0..d - 1 {
            if cuts >> i & 1 == 1 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        // Sum over i of the product of all parts except part i.
        let value = |p: &[u128]| -> u128 {
            (0..p.len()).map(|i| p.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &a)| a).product::<u128>()).sum()
        };
        if parts.len() >= 2 {
            best = best.max(value(&parts));
        }
        parts.push(0);
        best = best.max(value(&parts));
    }
    best
}

fn c5_g() -> Outcome {
    let want = [8u128, 12, 20, 32, 48, 80];
    for (d, &w) in (5..=10).zip(&want) {
        let g = extremal::g_partition(d).map_err(err)?;
        ensure(g.value == w, || format!("g({d}) = {}, expected {w}", g.value))?;
        let check = Partition::new(g.best.parts.clone()).map_err(err)?;
        ensure(check.d == d && check.value() == w, || format!("g({d}) witness {:?} invalid", g.best.parts))?;
    }
    for d in 2..=20 {
        let g = extremal::g_partition(d).map_err(err)?.value;
        let o = oracle_g(d);
        ensure(g == o, || format!("g({d}) = {g}, composition oracle {o}"))?;
    }
    Ok("g(5..10) = 8,12,20,32,48,80; oracle agrees for d <= 20".into())
}

fn c6_jt() -> Outcome {
    let got: Vec<u128> = (5..=10).map(extremal::jt_lower_bound).collect::<Result<_, _>>().map_err(err)?;
    ensure(got == [7, 10, 12, 18, 27, 37], || format!("got {got:?}"))?;
    Ok(format!("{got:?}"))
}

fn c7_small_max_codes() -> Outcome {
    let mut sizes = Vec::new();
    for n in 2..=4usize {
        let r = cube::max_code_search(n, 2, 3).map_err(err)?;
        let want = (1usize << (n + 1)).div_ceil(3);
        ensure(r.certified && r.max_size == want, || format!("n={n}: {} (certified {}), expected {want}", r.max_size, r.certified))?;
        let scan = cube::max_subcube_count(&r.witness, 2).map_err(err)?;
        ensure(r.witness.len() == want && scan.max_count <= 3, || format!("n={n}: witness fails the scan"))?;
        sizes.push(want);
    }
    Ok(format!("max sizes for n=2,3,4: {sizes:?}"))
}

fn c8_construction() -> Outcome {
    let n = 14;
    let c = basisprob::limit_f64();
    let floor = 0.5 * c / 6.0;
    let mut tried = Vec::new();
    for seed in 0..32u64 {
        let layers = codes::build_eil_layers(n, seed).map_err(err)?;
        let eil = codes::eil_code(&layers, RetryPolicy::default()).map_err(err)?;
        let sub = codes::best_residue_subcode(&eil.code, 6).map_err(err)?;
        let scan = cube::max_subcube_count(&sub.code, 5).map_err(err)?;
        let density = sub.code.density();
        if scan.max_count <= 8 && density > floor {
            return Ok(format!(
                "seed {seed}: residue {} subcode, {} words, density {density:.4} > {floor:.4}, max count {}",
                sub.residue,
                sub.code.len(),
                scan.max_count
            ));
        }
        tried.push((seed, scan.max_count, density));
    }
    Err(format!("no seed in 0..32 works: {tried:?}"))
}

fn c9_mod3() -> Outcome {
    let n = 12;
    let best = codes::best_residue_subcode(&Code::full(n).map_err(err)?, 3).map_err(err)?;
    for r in 0..3 {
        let size = codes::mod_weight_code(n, 3, r).map_err(err)?.len();
        ensure(size <= best.code.len(), || format!("residue {r} has {size} words, more than the chosen class"))?;
    }
    let scan = cube::max_subcube_count(&best.code, 3).map_err(err)?;
    ensure(scan.max_count <= 3, || format!("max count {}", scan.max_count))?;
    let density = best.code.density();
    let floor = 1.0 / 3.0 - 2.0 / 4096.0;
    ensure(density >= floor, || format!("density {density} < {floor}"))?;
    Ok(format!("residue {}: {} words, density {density:.5}, max count {}", best.residue, best.code.len(), scan.max_count))
}

fn c10_lagrangians() -> Outcome {
    let mut values = Vec::new();
    let targets = [
        (1usize, 1.0),
        (2, 1.0 / 3.0),
        (3, basisprob::p_exact(3).map_err(err)?.to_f64().unwrap() / 6.0),
    ];
    for (t, target) in targets {
        let h = hypergraph::basis_hypergraph(t).map_err(err)?;
        let l = hypergraph::lagrangian(&h, 16, 1e-15, 0).map_err(err)?;
        ensure((l.value - target).abs() < 1e-6, || format!("lambda(B_{t}) = {}, expected {target}", l.value))?;
        values.push(format!("lambda(B_{t})={:.9}", l.value));
    }
    ensure((targets[2].1 - 4.0 / 49.0).abs() < 1e-15, || "P(3)/3! != 4/49".into())?;
    Ok(values.join(" "))
}

fn random_distribution(rng: &mut ChaCha8Rng, t: usize) -> SimplexPoint {
    loop {
        let weights: Vec<u64> = (1..1u64 << t)
            .map(|_| if rng.gen_bool(0.2) { 0 } else { rng.gen_range(1..=1000) })
            .collect();
        if weights.iter().any(|&w| w > 0) {
            return SimplexPoint::from_weights(t, &weights).unwrap();
        }
    }
}

fn c11_distribution_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut closest = Vec::new();
    for t in [2usize, 3, 4] {
        let p = basisprob::p_exact(t).map_err(err)?;
        let step = basisprob::step_factor(t);
        let mut max_ratio = 0.0f64;
        for i in 0..1000 {
            let dist = random_distribution(&mut rng, t);
            let value = basisprob::basis_probability(&dist).map_err(err)?;
            ensure(value <= p, || format!("t={t} sample {i}: {value} > P({t})"))?;
            let sum = basisprob::lemma23_value_exact(&dist);
            ensure(sum <= step, || format!("t={t} sample {i}: weighted sum {sum} exceeds the step factor"))?;
            max_ratio = max_ratio.max((value / &p).to_f64().unwrap());
        }
        closest.push(format!("t={t}: max ratio {max_ratio:.4}"));
    }
    Ok(closest.join(", "))
}

/// Whether some `t` vectors of `F_2^m` have every `s` of them independent,
/// decided algebraically: the Plotkin bound when it already excludes the
/// parity-check code, otherwise a search over column sets.
fn algebraic_configuration_exists(m: usize, s: usize, t: usize) -> Result<bool, String> {
    let dmin = (s + 1) as u64;
    if t > m {
        if let Ok(bound) = gf2::plotkin_bound(t as u64, dmin) {
            if (1u64 << (t - m)) > bound {
                return Ok(false);
            }
        }
    }
    // With s >= 2 the columns are distinct and nonzero.
    let vectors: Vec<u64> = (1..1u64 << m).collect();
    if t > vectors.len() {
        return Ok(false);
    }
    let mut found = None;
    let mut subset = Vec::new();
    choose(&vectors, t, 0, &mut subset, &mut |cols| {
        if found.is_none() && every_s_independent(cols, s) {
            found = Some(cols.to_vec());
        }
        found.is_some()
    });
    let Some(cols) = found else {
        return Ok(false);
    };
    let h = GF2Matrix::from_column_bits(m, cols).map_err(err)?;
    let code = gf2::code_from_parity_check(&h).map_err(err)?;
    if code.len() >= 2 {
        let d = gf2::min_distance(&code).map_err(err)?;
        ensure(d as u64 >= dmin, || format!("parity-check code has distance {d} < {dmin}"))?;
    }
    Ok(true)
}

fn every_s_independent(cols: &[u64], s: usize) -> bool {
    let mut all = true;
    let mut subset = Vec::new();
    choose(cols, s, 0, &mut subset, &mut |sub| {
        all = oracle_rank(sub) == s;
        !all
    });
    all
}

/// Calls `visit` on each `k`-subset in order; stops once it returns true.
fn choose(items: &[u64], k: usize, start: usize, buf: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64]) -> bool) -> bool {
    if buf.len() == k {
        return visit(buf);
    }
    for i in start..items.len() {
        if items.len() - i < k - buf.len() {
            break;
        }
        buf.push(items[i]);
        let stop = choose(items, k, i + 1, buf, visit);
        buf.pop();
        if stop {
            return true;
        }
    }
    false
}

fn c12_forbidden_configurations() -> Outcome {
    let (r, k) = (3usize, 1usize);
    let big = hypergraph::lin_indep_hypergraph(r, k).map_err(err)?;
    let mut pairs = Vec::new();
    for (s, ts) in [(2usize, 3..=8usize), (3, 4..=9)] {
        for t in ts {
            let small = hypergraph::d_r(r, s, t).map_err(err)?;
            let copy = hypergraph::contains_copy(&big, &small).map_err(err)?;
            if let Some(map) = &copy {
                for e in small.edges() {
                    let image: Vec<usize> = e.iter().map(|&v| map[v]).collect();
                    ensure(big.has_edge(&image), || format!("D({s},{t}) map sends {e:?} to a non-edge"))?;
                }
            }
            let algebraic = algebraic_configuration_exists(k + s, s, t)?;
            ensure(copy.is_some() == algebraic, || {
                format!("D_{r}({s},{t}): copy search says {}, algebra says {algebraic}", copy.is_some())
            })?;
            pairs.push(format!("({s},{t}):{}", if algebraic { "present" } else { "absent" }));
        }
    }
    Ok(pairs.join(" "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "exact P(2), P(3) vs enumeration", Duration::from_secs(1), c1_exact_constants),
        (2, "certified interval for c", Duration::from_secs(1), c2_limit_constant),
        (3, "P(t) recurrence", Duration::from_secs(1), c3_recurrence),
        (4, "B(k,d) values, symmetry, tight bound", Duration::from_secs(120), c4_bkd),
        (5, "g(d) values and oracle", Duration::from_secs(10), c5_g),
        (6, "prior lower bounds", Duration::from_secs(1), c6_jt),
        (7, "small (2,3,n) maximum codes", Duration::from_secs(60), c7_small_max_codes),
        (8, "layered construction at n=14", Duration::from_secs(120), c8_construction),
        (9, "mod-3 weight code at n=12", Duration::from_secs(60), c9_mod3),
        (10, "basis hypergraph Lagrangians", Duration::from_secs(30), c10_lagrangians),
        (11, "distribution bounds, 10^3 samples per t", Duration::from_secs(60), c11_distribution_bounds),
        (12, "forbidden configurations vs algebra", Duration::from_secs(120), c12_forbidden_configurations),
    ];
    let mut failures = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= budget {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS [{elapsed:.2?}] {name}: {detail}"),
            Err(why) => {
                failures += 1;
                println!("criterion {id:>2} FAIL [{elapsed:.2?}] {name}: {why}");
            }
        }
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
