//! Subcubes of `Q_n` and exhaustive verification of `(d, L, n)`-codes.
//!
//! A `d`-subcube is a set `I` of `d` free coordinates plus a base word that
//! is zero on `I`; its vertices are the `2^d` words agreeing with the base
//! outside `I`. Canonical order: free sets in colex order (increasing mask
//! value), then bases in increasing integer order.
//!
//! Scans bucket the codewords by their projection outside `I`, one free set
//! at a time, so each free set costs one sort of the code. Work is split by
//! free set and merged in canonical order, so results never depend on the
//! number of threads.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::codes::{binomial, Code};
use crate::error::{invalid, out_of_regime, Result};
use crate::gf2::{bits_to_string, low_mask, BitIter, BitWord, MAX_LEN};

/// Most subcubes a single enumeration or scan may cover.
pub const SCAN_LIMIT: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Subcube {
    n: usize,
    free: u64,
    base: u64,
}

impl Subcube {
    pub fn new(n: usize, free: u64, base: u64) -> Result<Self> {
        if n > MAX_LEN {
            return Err(invalid(format!("length {n} exceeds {MAX_LEN}")));
        }
        if (free | base) & !low_mask(n) != 0 {
            return Err(invalid(format!("free set or base reaches beyond length {n}")));
        }
        if free & base != 0 {
            return Err(invalid("base must be zero on the free coordinates"));
        }
        Ok(Subcube { n, free, base })
    }

    pub fn from_indices(n: usize, free: &[usize], base: u64) -> Result<Self> {
        Self::new(n, mask_from_indices(n, free)?, base)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.free.count_ones() as usize
    }

    pub fn free_mask(&self) -> u64 {
        self.free
    }

    pub fn free_indices(&self) -> Vec<usize> {
        BitIter(self.free).collect()
    }

    pub fn base(&self) -> BitWord {
        BitWord::truncated(self.base, self.n)
    }

    pub fn contains_bits(&self, w: u64) -> bool {
        w & !self.free == self.base
    }

    pub fn vertices(&self) -> impl Iterator<Item = u64> + '_ {
        (0..1u64 << self.dim()).map(move |j| self.base | deposit(j, self.free))
    }
}

impl Serialize for Subcube {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            free: Vec<usize>,
            base: String,
        }
        Repr { free: self.free_indices(), base: bits_to_string(self.base, self.n) }.serialize(serializer)
    }
}

pub fn mask_from_indices(n: usize, indices: &[usize]) -> Result<u64> {
    let mut mask = 0u64;
    for &i in indices {
        if i >= n {
            return Err(invalid(format!("coordinate {i} out of range for length {n}")));
        }
        if mask & 1 << i != 0 {
            return Err(invalid(format!("coordinate {i} repeated")));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

/// Scatters the low bits of `value` onto the set bits of `mask`, lowest
/// first.
pub fn deposit(mut value: u64, mask: u64) -> u64 {
    let mut out = 0;
    for bit in BitIter(mask) {
        if value == 0 {
            break;
        }
        out |= (value & 1) << bit;
        value >>= 1;
    }
    out
}

/// The `rank`-th `d`-subset of `[n]` in colex order, as a mask.
pub fn colex_unrank(mut rank: u64, n: usize, d: usize) -> u64 {
    let mut mask = 0;
    let mut hi = n;
    for size in (1..=d).rev() {
        let mut c = size - 1;
        while c + 1 < hi && binomial(c + 1, size) <= rank {
            c += 1;
        }
        rank -= binomial(c, size);
        mask |= 1 << c;
        hi = c;
    }
    mask
}

/// Index-addressable stream of all `d`-subcubes of `Q_n` in canonical order.
#[derive(Clone, Copy, Debug)]
pub struct SubcubeEnumerator {
    n: usize,
    d: usize,
    free_sets: u64,
    bases: u64,
}

impl SubcubeEnumerator {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if d > n {
            return Err(invalid(format!("subcube dimension {d} exceeds length {n}")));
        }
        if n >= MAX_LEN {
            return Err(out_of_regime(format!("length {n} too large to enumerate")));
        }
        let free_sets = binomial(n, d);
        let bases = 1u64 << (n - d);
        if free_sets.checked_mul(bases).is_none_or(|t| t > SCAN_LIMIT) {
            return Err(out_of_regime(format!("C({n},{d}) * 2^{} subcubes exceeds {SCAN_LIMIT}", n - d)));
        }
        Ok(SubcubeEnumerator { n, d, free_sets, bases })
    }

    pub fn len(&self) -> u64 {
        self.free_sets * self.bases
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn free_set_count(&self) -> u64 {
        self.free_sets
    }

    pub fn bases_per_free_set(&self) -> u64 {
        self.bases
    }

    pub fn free_set(&self, index: u64) -> u64 {
        colex_unrank(index, self.n, self.d)
    }

    pub fn get(&self, index: u64) -> Option<Subcube> {
        if index >= self.len() {
            return None;
        }
        let free = self.free_set(index / self.bases);
        let base = deposit(index % self.bases, !free & low_mask(self.n));
        Some(Subcube { n: self.n, free, base })
    }

    /// Subcubes with indices in `range`, in order.
    pub fn range(&self, range: std::ops::Range<u64>) -> impl Iterator<Item = Subcube> + '_ {
        range.filter_map(move |i| self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = Subcube> + '_ {
        let n = self.n;
        let bases = self.bases;
        (0..self.free_sets).flat_map(move |f| {
            let free = self.free_set(f);
            let rest = !free & low_mask(n);
            (0..bases).map(move |j| Subcube { n, free, base: deposit(j, rest) })
        })
    }
}

pub fn enumerate_subcubes(n: usize, d: usize) -> Result<SubcubeEnumerator> {
    SubcubeEnumerator::new(n, d)
}

fn check_len(code: &Code, n: usize) -> Result<()> {
    if code.n() != n {
        return Err(invalid(format!("code has length {}, subcube lives in Q_{n}", code.n())));
    }
    Ok(())
}

/// Codewords inside `s`, by direct scan.
pub fn subcube_count(code: &Code, s: &Subcube) -> Result<usize> {
    check_len(code, s.n)?;
    Ok(code.as_bits().iter().filter(|&&w| s.contains_bits(w)).count())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub d: usize,
    pub max_count: u64,
    /// First subcube in canonical order attaining `max_count`.
    pub witness: Subcube,
    /// Number of codewords -> number of subcubes holding that many.
    pub histogram: BTreeMap<u64, u64>,
}

impl VerificationReport {
    /// Whether the scanned code is a `(d, limit, n)`-code.
    pub fn is_code(&self, limit: u64) -> bool {
        self.max_count <= limit
    }

    pub fn total_subcubes(&self) -> u64 {
        self.histogram.values().sum()
    }
}

struct FreeSetScan {
    max: u64,
    witness_base: u64,
    histogram: BTreeMap<u64, u64>,
}

/// Sorted projections of the code outside `free`, run-length encoded.
fn projection_runs(words: &[u64], free: u64) -> Vec<(u64, u64)> {
    let mut keys: Vec<u64> = words.iter().map(|w| w & !free).collect();
    keys.sort_unstable();
    let mut runs: Vec<(u64, u64)> = Vec::new();
    for k in keys {
        match runs.last_mut() {
            Some((key, count)) if *key == k => *count += 1,
            _ => runs.push((k, 1)),
        }
    }
    runs
}

/// Exact maximum number of codewords in a `d`-subcube, with witness and the
/// full histogram.
pub fn max_subcube_count(code: &Code, d: usize) -> Result<VerificationReport> {
    let n = code.n();
    let cubes = SubcubeEnumerator::new(n, d)?;
    let words = code.as_bits();
    let scans: Vec<FreeSetScan> = (0..cubes.free_set_count())
        .into_par_iter()
        .map(|f| {
            let free = cubes.free_set(f);
            let runs = projection_runs(words, free);
            let mut histogram = BTreeMap::new();
            let empty = cubes.bases_per_free_set() - runs.len() as u64;
            if empty > 0 {
                histogram.insert(0, empty);
            }
            let (mut max, mut witness_base) = (0, 0);
            for &(key, count) in &runs {
                *histogram.entry(count).or_insert(0) += 1;
                if count > max {
                    max = count;
                    witness_base = key;
                }
            }
            FreeSetScan { max, witness_base, histogram }
        })
        .collect();

    let mut histogram = BTreeMap::new();
    let mut best: Option<(u64, u64, u64)> = None;
    for (f, scan) in scans.iter().enumerate() {
        for (&k, &v) in &scan.histogram {
            *histogram.entry(k).or_insert(0) += v;
        }
        if best.is_none_or(|(m, _, _)| scan.max > m) {
            best = Some((scan.max, f as u64, scan.witness_base));
        }
    }
    let (max_count, f, base) = best.expect("at least one free set");
    Ok(VerificationReport {
        n,
        d,
        max_count,
        witness: Subcube { n, free: cubes.free_set(f), base },
        histogram,
    })
}

/// Codewords agreeing with `w` outside the `erased` coordinates.
pub fn erasure_list_size(code: &Code, w: BitWord, erased: u64) -> Result<usize> {
    check_len(code, w.len())?;
    if erased & !low_mask(code.n()) != 0 {
        return Err(invalid("erased coordinates out of range"));
    }
    if !code.contains(w) {
        return Err(invalid(format!("{w} is not a codeword")));
    }
    let keep = !erased;
    Ok(code.as_bits().iter().filter(|&&c| (c ^ w.bits()) & keep == 0).count())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HittingReport {
    pub hits_all: bool,
    /// First subcube in canonical order containing no element of the set.
    pub missed: Option<Subcube>,
}

/// Whether `set` meets every `d`-subcube.
pub fn verify_hitting(set: &Code, d: usize) -> Result<HittingReport> {
    let n = set.n();
    let cubes = SubcubeEnumerator::new(n, d)?;
    let words = set.as_bits();
    let first_miss = (0..cubes.free_set_count())
        .into_par_iter()
        .find_map_first(|f| {
            let free = cubes.free_set(f);
            let rest = !free & low_mask(n);
            let runs = projection_runs(words, free);
            if runs.len() as u64 == cubes.bases_per_free_set() {
                return None;
            }
            // Projections ascend with the compressed base index.
            let j = runs
                .iter()
                .enumerate()
                .find(|&(j, &(key, _))| deposit(j as u64, rest) != key)
                .map_or(runs.len() as u64, |(j, _)| j as u64);
            Some(Subcube { n, free, base: deposit(j, rest) })
        });
    Ok(HittingReport { hits_all: first_miss.is_none(), missed: first_miss })
}

// ---------------------------------------------------------------------------
// Maximum code search
// ---------------------------------------------------------------------------

/// Largest `n` searched by trying every vertex subset.
pub const EXHAUSTIVE_LIMIT: usize = 4;
/// Largest `n` accepted by the branch-and-bound search.
pub const BRANCH_LIMIT: usize = 6;
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct MaxCodeResult {
    pub n: usize,
    pub d: usize,
    pub limit: u64,
    /// Exact maximum when `certified`, otherwise the best size found.
    pub max_size: usize,
    /// Proven upper bound; equals `max_size` when certified.
    pub upper_bound: usize,
    pub certified: bool,
    pub nodes: u64,
    #[serde(serialize_with = "serialize_code")]
    pub witness: Code,
}

fn serialize_code<S: Serializer>(code: &Code, s: S) -> std::result::Result<S::Ok, S::Error> {
    code.to_strings().serialize(s)
}

/// Vertex masks (over the `2^n` vertices) of every `d`-subcube, grouped by
/// free set.
fn cube_masks(n: usize, d: usize) -> Result<Vec<Vec<u64>>> {
    let cubes = SubcubeEnumerator::new(n, d)?;
    Ok((0..cubes.free_set_count())
        .map(|f| {
            cubes
                .range(f * cubes.bases_per_free_set()..(f + 1) * cubes.bases_per_free_set())
                .map(|s| s.vertices().fold(0u64, |m, v| m | 1 << v))
                .collect()
        })
        .collect())
}

fn mask_to_code(n: usize, mask: u64) -> Result<Code> {
    Code::from_bits(n, BitIter(mask).map(|v| v as u64))
}

/// Largest `(d, limit, n)`-code. Every vertex subset is tried for
/// `n <= 4`; `n = 5, 6` use [`max_code_branch_and_bound`] with the default
/// node budget.
pub fn max_code_search(n: usize, d: usize, limit: u64) -> Result<MaxCodeResult> {
    if n <= EXHAUSTIVE_LIMIT {
        max_code_exhaustive(n, d, limit)
    } else {
        max_code_branch_and_bound(n, d, limit, DEFAULT_NODE_BUDGET)
    }
}

/// Tries all `2^(2^n)` vertex subsets; returns the numerically smallest
/// largest subset as witness.
pub fn max_code_exhaustive(n: usize, d: usize, limit: u64) -> Result<MaxCodeResult> {
    if n > EXHAUSTIVE_LIMIT {
        return Err(out_of_regime(format!("exhaustive search needs n <= {EXHAUSTIVE_LIMIT}, got {n}")));
    }
    let cubes: Vec<u64> = cube_masks(n, d)?.concat();
    let subsets = 1u64 << (1u64 << n);
    let mut best = (0u32, 0u64);
    for s in 0..subsets {
        let size = s.count_ones();
        if size > best.0 && cubes.iter().all(|c| (c & s).count_ones() as u64 <= limit) {
            best = (size, s);
        }
    }
    Ok(MaxCodeResult {
        n,
        d,
        limit,
        max_size: best.0 as usize,
        upper_bound: best.0 as usize,
        certified: true,
        nodes: subsets,
        witness: mask_to_code(n, best.1)?,
    })
}

struct Search<'a> {
    order: Vec<usize>,
    partitions: &'a [Vec<u64>],
    cubes_of: Vec<Vec<(usize, usize)>>,
    counts: Vec<Vec<u64>>,
    limit: u64,
    best_size: usize,
    best_mask: u64,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    /// Upper bound on how many more vertices from `remaining` can be added:
    /// the tightest, over free sets, of the per-partition-cube slack.
    fn bound(&self, remaining: u64) -> usize {
        self.partitions
            .iter()
            .enumerate()
            .map(|(f, cubes)| {
                cubes
                    .iter()
                    .zip(&self.counts[f])
                    .map(|(&c, &used)| ((c & remaining).count_ones() as u64).min(self.limit - used) as usize)
                    .sum::<usize>()
            })
            .min()
            .unwrap_or(remaining.count_ones() as usize)
    }

    fn can_add(&self, v: usize) -> bool {
        self.cubes_of[v].iter().all(|&(f, c)| self.counts[f][c] < self.limit)
    }

    fn set(&mut self, v: usize, add: bool) {
        for &(f, c) in &self.cubes_of[v] {
            if add {
                self.counts[f][c] += 1;
            } else {
                self.counts[f][c] -= 1;
            }
        }
    }

    fn dfs(&mut self, pos: usize, chosen: u64, size: usize, remaining: u64) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if size > self.best_size {
            self.best_size = size;
            self.best_mask = chosen;
        }
        if pos == self.order.len() || size + self.bound(remaining) <= self.best_size {
            return;
        }
        let v = self.order[pos];
        let rest = remaining & !(1 << v);
        if self.can_add(v) {
            self.set(v, true);
            self.dfs(pos + 1, chosen | 1 << v, size + 1, rest);
            self.set(v, false);
        }
        self.dfs(pos + 1, chosen, size, rest);
    }
}

/// Branch and bound over vertices in order of weight. Vertex 0 is forced
/// into the code (any nonempty code can be translated to contain it). If
/// `node_budget` runs out the best code found is returned with
/// `certified = false`.
pub fn max_code_branch_and_bound(n: usize, d: usize, limit: u64, node_budget: u64) -> Result<MaxCodeResult> {
    if n > BRANCH_LIMIT {
        return Err(out_of_regime(format!("branch and bound needs n <= {BRANCH_LIMIT}, got {n}")));
    }
    let partitions = cube_masks(n, d)?;
    let vertices = 1usize << n;
    let mut cubes_of = vec![Vec::new(); vertices];
    for (f, cubes) in partitions.iter().enumerate() {
        for (c, &mask) in cubes.iter().enumerate() {
            for v in BitIter(mask) {
                cubes_of[v].push((f, c));
            }
        }
    }
    let mut order: Vec<usize> = (0..vertices).collect();
    order.sort_by_key(|&v| (v.count_ones(), v));
    let all = low_mask(vertices);
    let mut search = Search {
        order,
        counts: partitions.iter().map(|c| vec![0; c.len()]).collect(),
        partitions: &partitions,
        cubes_of,
        limit,
        best_size: 0,
        best_mask: 0,
        nodes: 0,
        budget: node_budget,
        exhausted: false,
    };
    let root_bound = search.bound(all);
    if limit > 0 {
        search.set(0, true);
        search.dfs(1, 1, 1, all & !1);
    }
    let certified = !search.exhausted;
    Ok(MaxCodeResult {
        n,
        d,
        limit,
        max_size: search.best_size,
        upper_bound: if certified { search.best_size } else { root_bound },
        certified,
        nodes: search.nodes,
        witness: mask_to_code(n, search.best_mask)?,
    })
}
