//! Code constructions and the code file format.
//!
//! The central construction is the layered random-linear code: for every
//! weight `r` each coordinate gets a random nonzero label in `F_2^r`, and a
//! weight-`r` word is kept iff the labels on its support form a basis.
//! Keeping only the weights in one residue class modulo `d + 1` then yields a
//! code with at most `B(d)` words in any `d`-subcube.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::basisprob;
use crate::error::{invalid, out_of_regime, Error, Result};
use crate::gf2::{self, bits_to_string, low_mask, BitWord, MAX_LEN};
use crate::seed::{self, domain};

/// Longest code that is ever enumerated word by word.
pub const MAX_ENUM_LEN: usize = 24;

/// A set of binary words of common length `n`, kept sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Code {
    n: usize,
    words: Vec<u64>,
}

impl Code {
    pub fn empty(n: usize) -> Result<Self> {
        Self::from_bits(n, std::iter::empty())
    }

    pub fn from_bits(n: usize, words: impl IntoIterator<Item = u64>) -> Result<Self> {
        if n > MAX_LEN {
            return Err(invalid(format!("code length {n} exceeds {MAX_LEN}")));
        }
        let mut words: Vec<u64> = words.into_iter().collect();
        if let Some(w) = words.iter().find(|&&w| w & !low_mask(n) != 0) {
            return Err(invalid(format!("word {w:#x} is longer than {n}")));
        }
        words.sort_unstable();
        words.dedup();
        Ok(Code { n, words })
    }

    pub fn from_words(n: usize, words: &[BitWord]) -> Result<Self> {
        if let Some(w) = words.iter().find(|w| w.len() != n) {
            return Err(invalid(format!("word {w} does not have length {n}")));
        }
        Self::from_bits(n, words.iter().map(|w| w.bits()))
    }

    pub fn from_strs(n: usize, words: &[&str]) -> Result<Self> {
        let words = words.iter().map(|s| s.parse()).collect::<Result<Vec<BitWord>>>()?;
        Self::from_words(n, &words)
    }

    /// Every vertex of `Q_n`.
    pub fn full(n: usize) -> Result<Self> {
        require_enumerable(n)?;
        Ok(Code { n, words: (0..1u64 << n).collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Sorted packed words.
    pub fn as_bits(&self) -> &[u64] {
        &self.words
    }

    pub fn words(&self) -> impl Iterator<Item = BitWord> + '_ {
        self.words.iter().map(|&w| BitWord::truncated(w, self.n))
    }

    pub fn contains(&self, w: BitWord) -> bool {
        w.len() == self.n && self.words.binary_search(&w.bits()).is_ok()
    }

    pub fn contains_bits(&self, w: u64) -> bool {
        self.words.binary_search(&w).is_ok()
    }

    /// `|C| / 2^n`.
    pub fn density(&self) -> f64 {
        self.words.len() as f64 / (self.n as f64).exp2()
    }

    pub fn complement(&self) -> Result<Code> {
        require_enumerable(self.n)?;
        let words = (0..1u64 << self.n).filter(|w| !self.contains_bits(*w)).collect();
        Ok(Code { n: self.n, words })
    }

    pub fn filter(&self, keep: impl Fn(u64) -> bool) -> Code {
        Code { n: self.n, words: self.words.iter().copied().filter(|&w| keep(w)).collect() }
    }

    pub fn union(&self, other: &Code) -> Result<Code> {
        if self.n != other.n {
            return Err(invalid(format!("cannot join codes of length {} and {}", self.n, other.n)));
        }
        Code::from_bits(self.n, self.words.iter().chain(&other.words).copied())
    }

    /// Number of codewords of each weight `0..=n`.
    pub fn weight_distribution(&self) -> Vec<usize> {
        let mut dist = vec![0; self.n + 1];
        for w in &self.words {
            dist[w.count_ones() as usize] += 1;
        }
        dist
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.words.iter().map(|&w| bits_to_string(w, self.n)).collect()
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Code(n={}, {:?})", self.n, self.to_strings())
    }
}

pub(crate) fn require_enumerable(n: usize) -> Result<()> {
    if n > MAX_ENUM_LEN {
        return Err(out_of_regime(format!("length {n} exceeds enumeration limit {MAX_ENUM_LEN}")));
    }
    Ok(())
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

// ---------------------------------------------------------------------------
// Layered random-linear construction
// ---------------------------------------------------------------------------

/// Random nonzero labels in `F_2^r` for the `n` coordinates, used by layer `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerAssignment {
    pub n: usize,
    pub r: usize,
    pub vectors: Vec<BitWord>,
}

impl LayerAssignment {
    pub fn new(n: usize, r: usize, vectors: Vec<BitWord>) -> Result<Self> {
        if vectors.len() != n {
            return Err(invalid(format!("expected {n} labels, got {}", vectors.len())));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != r || v.is_zero()) {
            return Err(invalid(format!("label {v} is not a nonzero vector of length {r}")));
        }
        Ok(LayerAssignment { n, r, vectors })
    }

    fn draw(n: usize, r: usize, master_seed: u64, attempt: u32) -> Self {
        let mut rng = seed::rng_for(master_seed, seed::stream_id(domain::EIL_LAYER, r as u64, attempt as u64));
        let vectors = (0..n).map(|_| BitWord::truncated(rng.gen_range(1..=low_mask(r)), r)).collect();
        LayerAssignment { n, r, vectors }
    }

    /// Weight-`r` words whose support labels form a basis of `F_2^r`.
    pub fn basis_words(&self) -> Vec<u64> {
        let labels: Vec<u64> = self.vectors.iter().map(|v| v.bits()).collect();
        let mut out = Vec::new();
        gf2::for_each_independent_subset(&labels, self.r, |mask| out.push(mask));
        out
    }
}

/// Labels for every layer `1..=n`, drawn from one master seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EilLayers {
    pub n: usize,
    pub seed: u64,
    pub layers: BTreeMap<usize, LayerAssignment>,
}

pub fn build_eil_layers(n: usize, seed: u64) -> Result<EilLayers> {
    require_enumerable(n)?;
    let layers = (1..=n).map(|r| (r, LayerAssignment::draw(n, r, seed, 0))).collect();
    Ok(EilLayers { n, seed, layers })
}

#[derive(Clone, Copy, Debug)]
pub struct RetryPolicy {
    /// Redraws allowed per layer after the initial draw.
    pub max_retries: u32,
    /// Fail instead of keeping the best draw when a layer stays at or below
    /// `c * C(n, r)`.
    pub strict: bool,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_retries: 64, strict: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerReport {
    pub r: usize,
    pub size: usize,
    pub threshold: f64,
    /// Draw index that was kept; 0 is the original draw.
    pub attempt: u32,
    pub attempts_tried: u32,
    pub meets_threshold: bool,
}

#[derive(Clone, Debug)]
pub struct EilCode {
    pub code: Code,
    /// The labels actually used, after retries.
    pub layers: EilLayers,
    pub reports: Vec<LayerReport>,
}

impl EilCode {
    pub fn shortfall_layers(&self) -> Vec<usize> {
        self.reports.iter().filter(|r| !r.meets_threshold).map(|r| r.r).collect()
    }
}

/// Assembles `C_0 ∪ C_1 ∪ ... ∪ C_n`, redrawing any layer with
/// `|C_r| <= c * C(n, r)` from a derived stream.
pub fn eil_code(layers: &EilLayers, policy: RetryPolicy) -> Result<EilCode> {
    let n = layers.n;
    let c = basisprob::limit_f64();
    let outcomes: Vec<(LayerAssignment, Vec<u64>, LayerReport)> = layers
        .layers
        .par_iter()
        .map(|(&r, first)| {
            let threshold = c * binomial(n, r) as f64;
            let mut best = (first.clone(), first.basis_words(), 0u32);
            let mut tried = 1;
            let mut attempt = 0;
            while (best.1.len() as f64) <= threshold && attempt < policy.max_retries {
                attempt += 1;
                tried += 1;
                let candidate = LayerAssignment::draw(n, r, layers.seed, attempt);
                let words = candidate.basis_words();
                if words.len() > best.1.len() {
                    best = (candidate, words, attempt);
                }
            }
            let report = LayerReport {
                r,
                size: best.1.len(),
                threshold,
                attempt: best.2,
                attempts_tried: tried,
                meets_threshold: best.1.len() as f64 > threshold,
            };
            (best.0, best.1, report)
        })
        .collect();

    let mut words = vec![0u64];
    let mut used = BTreeMap::new();
    let mut reports = Vec::new();
    for (assignment, layer_words, report) in outcomes {
        if policy.strict && !report.meets_threshold {
            return Err(Error::ConstructionFailure(format!(
                "layer {} reached only {} words, needs more than {:.3} after {} draws",
                report.r, report.size, report.threshold, report.attempts_tried
            )));
        }
        if !report.meets_threshold {
            log::warn!("layer {} kept {} words, below threshold {:.3}", report.r, report.size, report.threshold);
        }
        words.extend(layer_words);
        used.insert(assignment.r, assignment);
        reports.push(report);
    }
    let code = Code::from_bits(n, words)?;
    Ok(EilCode { code, layers: EilLayers { n, seed: layers.seed, layers: used }, reports })
}

// ---------------------------------------------------------------------------
// Weight-residue codes
// ---------------------------------------------------------------------------

fn check_residue(modulus: usize, residue: usize) -> Result<()> {
    if modulus == 0 {
        return Err(invalid("modulus must be at least 1"));
    }
    if residue >= modulus {
        return Err(invalid(format!("residue {residue} not below modulus {modulus}")));
    }
    Ok(())
}

/// Codewords whose weight is `residue` modulo `modulus`.
pub fn residue_subcode(code: &Code, modulus: usize, residue: usize) -> Result<Code> {
    check_residue(modulus, residue)?;
    Ok(code.filter(|w| w.count_ones() as usize % modulus == residue))
}

#[derive(Clone, Debug)]
pub struct ResidueSubcode {
    pub code: Code,
    pub residue: usize,
}

/// The largest weight-residue class; ties go to the smallest residue.
pub fn best_residue_subcode(code: &Code, modulus: usize) -> Result<ResidueSubcode> {
    check_residue(modulus, 0)?;
    let mut sizes = vec![0usize; modulus];
    for w in code.as_bits() {
        sizes[w.count_ones() as usize % modulus] += 1;
    }
    let residue = (0..modulus).fold(0, |best, i| if sizes[i] > sizes[best] { i } else { best });
    Ok(ResidueSubcode { code: residue_subcode(code, modulus, residue)?, residue })
}

/// All words of length `n` with weight `residue` modulo `modulus`.
pub fn mod_weight_code(n: usize, modulus: usize, residue: usize) -> Result<Code> {
    check_residue(modulus, residue)?;
    require_enumerable(n)?;
    Ok(Code { n, words: (0..1u64 << n).filter(|w| w.count_ones() as usize % modulus == residue).collect() })
}

// ---------------------------------------------------------------------------
// Hitting sets
// ---------------------------------------------------------------------------

/// Subcube dimension `2k + 3 ceil(log2 k)` that the hitting-set construction
/// targets, with `k` clamped to at least 2 so the logarithm is positive.
pub fn hitting_dimension(k: usize) -> usize {
    let k2 = k.max(2);
    let log = usize::BITS - (k2 - 1).leading_zeros();
    2 * k + 3 * log as usize
}

/// Exact probability that `r` independent uniform nonzero vectors of
/// `F_2^(r+k)` are linearly dependent.
pub fn expected_dependent_fraction(r: usize, k: usize) -> BigRational {
    let m = r + k;
    let space = BigInt::one() << m;
    let nonzero: BigInt = &space - 1u32;
    let mut independent = BigRational::one();
    for i in 1..r {
        let avail = &space - (BigInt::one() << i);
        independent *= BigRational::new(avail, nonzero.clone());
    }
    BigRational::one() - independent
}

#[derive(Clone, Debug, Serialize)]
pub struct HittingLayer {
    pub r: usize,
    pub total: u64,
    pub dependent: u64,
    pub included_entirely: bool,
}

#[derive(Clone, Debug)]
pub struct HittingSet {
    pub n: usize,
    pub k: usize,
    pub set: Code,
    /// Layers `r < small_layer_cutoff` are included entirely.
    pub small_layer_cutoff: usize,
    pub target_density: f64,
    pub meets_target: bool,
    pub layers: Vec<HittingLayer>,
}

/// Vertex set built layer by layer: each coordinate gets a random nonzero
/// label in `F_2^(r+k)` and a weight-`r` word is included iff its support
/// labels are dependent. The lowest layers are then taken whole, as many as
/// fit under the density target `2^-k`.
pub fn hitting_set(n: usize, k: usize, seed: u64) -> Result<HittingSet> {
    if n > 20 || n + k > MAX_ENUM_LEN {
        return Err(out_of_regime(format!("hitting set needs n <= 20 and n + k <= {MAX_ENUM_LEN}")));
    }
    let dependent: Vec<Vec<u64>> = (0..=n)
        .into_par_iter()
        .map(|r| {
            if r == 0 {
                return Vec::new();
            }
            let width = r + k;
            let mut rng = seed::rng_for(seed, seed::stream_id(domain::HITTING_LAYER, r as u64, 0));
            let labels: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=low_mask(width))).collect();
            let mut independent = Vec::new();
            gf2::for_each_independent_subset(&labels, r, |mask| independent.push(mask));
            independent.sort_unstable();
            words_of_weight(n, r).filter(|w| independent.binary_search(w).is_err()).collect()
        })
        .collect();

    let total = (n as f64).exp2();
    let target = (-(k as f64)).exp2();
    let density_with = |cutoff: usize| -> f64 {
        let count: u64 = (0..=n)
            .map(|r| if r < cutoff { binomial(n, r) } else { dependent[r].len() as u64 })
            .sum();
        count as f64 / total
    };
    let cutoff = (0..=n + 1).rev().find(|&c| density_with(c) < target).unwrap_or(0);
    let meets_target = density_with(cutoff) < target;
    if !meets_target {
        log::warn!("hitting set density {:.4} misses target {:.4}", density_with(0), target);
    }

    let mut words = Vec::new();
    let mut layers = Vec::new();
    for (r, dep) in dependent.iter().enumerate() {
        let whole = r < cutoff;
        if whole {
            words.extend(words_of_weight(n, r));
        } else {
            words.extend_from_slice(dep);
        }
        layers.push(HittingLayer { r, total: binomial(n, r), dependent: dep.len() as u64, included_entirely: whole });
    }
    Ok(HittingSet {
        n,
        k,
        set: Code::from_bits(n, words)?,
        small_layer_cutoff: cutoff,
        target_density: target,
        meets_target,
        layers,
    })
}

/// Words of length `n` and weight `r` in increasing order (Gosper's hack).
pub fn words_of_weight(n: usize, r: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let first = if r > n { limit } else { low_mask(r) };
    std::iter::successors(Some(first), move |&x| {
        if x == 0 {
            return None;
        }
        let c = x & x.wrapping_neg();
        let s = x + c;
        let next = (((x ^ s) >> 2) / c) | s;
        Some(next)
    })
    .take_while(move |&x| x < limit)
    .take(if r == 0 { 1 } else { usize::MAX })
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// Writes `n=<int>` followed by one word per line, coordinate 1 leftmost.
pub fn write_code(mut out: impl Write, code: &Code) -> std::io::Result<()> {
    writeln!(out, "n={}", code.n)?;
    for w in code.as_bits() {
        writeln!(out, "{}", bits_to_string(*w, code.n))?;
    }
    Ok(())
}

pub fn save_code(path: impl AsRef<Path>, code: &Code) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_code(&mut out, code)?;
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct LoadedCode {
    pub code: Code,
    /// Repeated lines that were collapsed.
    pub duplicates: usize,
}

pub fn read_code(input: impl BufRead) -> Result<LoadedCode> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
    let header = header?;
    let n: usize = header
        .trim_end()
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse { line: 1, message: format!("expected `n=<int>`, got {header:?}") })?;
    if n > MAX_LEN {
        return Err(Error::Parse { line: 1, message: format!("length {n} exceeds {MAX_LEN}") });
    }
    let mut words = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: i + 1, message };
        if line.len() != n {
            return Err(parse_err(format!("word {line:?} does not have length {n}")));
        }
        words.push(gf2::parse_bits(line).map_err(|e| parse_err(e.to_string()))?);
    }
    let raw = words.len();
    let code = Code::from_bits(n, words)?;
    Ok(LoadedCode { duplicates: raw - code.len(), code })
}

pub fn load_code(path: impl AsRef<Path>) -> Result<Code> {
    let path = path.as_ref();
    let loaded = read_code(BufReader::new(File::open(path)?))?;
    if loaded.duplicates > 0 {
        log::warn!("{}: collapsed {} duplicate words", path.display(), loaded.duplicates);
    }
    Ok(loaded.code)
}
