//! Linear algebra over GF(2) on bit-packed words.
//!
//! Vectors are at most [`MAX_LEN`] bits long and live in a single `u64`:
//! coordinate `i` (0-based) is bit `i`. When a word is rendered as a string,
//! the leftmost character is coordinate 0.
//!
//! Matrices are stored column-major, one packed `u64` per column, so a
//! `k x d` matrix needs `k <= 64`. Operations that work on rows (transpose,
//! orthogonal complement, parity-check kernels) additionally need `d <= 64`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::codes::Code;
use crate::error::{invalid, out_of_regime, Error, Result};

/// Widest supported vector. Every quantity this crate computes stays far
/// below it; widening means replacing the `u64` payload.
pub const MAX_LEN: usize = 64;

/// Largest kernel dimension [`code_from_parity_check`] will materialize.
pub const MAX_KERNEL_DIM: usize = 26;

#[inline]
pub fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// A binary vector of length at most 64.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitWord {
    bits: u64,
    len: u8,
}

impl BitWord {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len > MAX_LEN {
            return Err(invalid(format!("word length {len} exceeds {MAX_LEN}")));
        }
        if bits & !low_mask(len) != 0 {
            return Err(invalid(format!("bits {bits:#x} set beyond length {len}")));
        }
        Ok(BitWord { bits, len: len as u8 })
    }

    /// Masks off anything above `len`.
    pub fn truncated(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_LEN);
        BitWord { bits: bits & low_mask(len), len: len as u8 }
    }

    pub fn zero(len: usize) -> Self {
        Self::truncated(0, len)
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    pub fn get(self, i: usize) -> bool {
        i < self.len() && (self.bits >> i) & 1 == 1
    }

    pub fn support(self) -> impl Iterator<Item = usize> {
        BitIter(self.bits)
    }

    pub fn distance(self, other: BitWord) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    /// Inner product under the standard bilinear form.
    pub fn dot(self, other: BitWord) -> bool {
        (self.bits & other.bits).count_ones() & 1 == 1
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bits_to_string(self.bits, self.len()))
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = parse_bits(s)?;
        BitWord::new(bits, s.len())
    }
}

impl Serialize for BitWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub fn bits_to_string(bits: u64, len: usize) -> String {
    (0..len).map(|i| if (bits >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

pub(crate) fn parse_bits(s: &str) -> Result<u64> {
    if s.len() > MAX_LEN {
        return Err(invalid(format!("word length {} exceeds {MAX_LEN}", s.len())));
    }
    s.bytes().enumerate().try_fold(0u64, |acc, (i, b)| match b {
        b'0' => Ok(acc),
        b'1' => Ok(acc | 1 << i),
        _ => Err(invalid(format!("unexpected character {:?} in bit string", b as char))),
    })
}

/// Iterates the positions of set bits, lowest first.
#[derive(Clone)]
pub struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// An echelon basis keyed by lowest set bit, supporting LIFO removal.
///
/// `slots[p]`, when nonzero, holds a vector whose lowest set bit is `p`.
/// Reducing by it clears bit `p` and only touches higher bits, so reduction
/// always terminates within 64 steps.
#[derive(Clone)]
pub struct XorBasis {
    slots: [u64; 64],
    rank: usize,
}

impl Default for XorBasis {
    fn default() -> Self {
        XorBasis { slots: [0; 64], rank: 0 }
    }
}

impl XorBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn reduce(&self, mut v: u64) -> u64 {
        while v != 0 {
            let p = v.trailing_zeros() as usize;
            if self.slots[p] == 0 {
                return v;
            }
            v ^= self.slots[p];
        }
        0
    }

    /// Inserts `v` if it is independent of the current span; returns the
    /// pivot it occupies.
    pub fn insert(&mut self, v: u64) -> Option<usize> {
        let r = self.reduce(v);
        if r == 0 {
            return None;
        }
        let p = r.trailing_zeros() as usize;
        self.slots[p] = r;
        self.rank += 1;
        Some(p)
    }

    /// Undoes the most recent successful [`insert`](Self::insert).
    pub fn remove(&mut self, pivot: usize) {
        debug_assert!(self.slots[pivot] != 0);
        self.slots[pivot] = 0;
        self.rank -= 1;
    }
}

/// Rank of a list of packed vectors.
pub fn rank_of(vectors: impl IntoIterator<Item = u64>) -> usize {
    let mut basis = XorBasis::new();
    for v in vectors {
        basis.insert(v);
        if basis.rank() == 64 {
            break;
        }
    }
    basis.rank()
}

/// Calls `visit` with the index mask of every `size`-subset of `vectors`
/// that is linearly independent. Subsets are visited in lexicographic order
/// of their index lists. Dependent prefixes are pruned.
pub fn for_each_independent_subset(vectors: &[u64], size: usize, mut visit: impl FnMut(u64)) {
    assert!(vectors.len() <= 64, "at most 64 vectors");
    if size > vectors.len() {
        return;
    }
    let mut basis = XorBasis::new();
    walk_independent(vectors, size, 0, 0, &mut basis, &mut visit);
}

fn walk_independent(
    vectors: &[u64],
    remaining: usize,
    start: usize,
    chosen: u64,
    basis: &mut XorBasis,
    visit: &mut impl FnMut(u64),
) {
    if remaining == 0 {
        visit(chosen);
        return;
    }
    for i in start..=vectors.len() - remaining {
        if let Some(p) = basis.insert(vectors[i]) {
            walk_independent(vectors, remaining - 1, i + 1, chosen | 1 << i, basis, visit);
            basis.remove(p);
        }
    }
}

/// A `rows x cols` matrix over GF(2), stored by columns.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    rows: usize,
    columns: Vec<u64>,
}

impl GF2Matrix {
    pub fn from_column_bits(rows: usize, columns: Vec<u64>) -> Result<Self> {
        if rows > MAX_LEN {
            return Err(invalid(format!("{rows} rows exceeds {MAX_LEN}")));
        }
        if let Some(c) = columns.iter().find(|&&c| c & !low_mask(rows) != 0) {
            return Err(invalid(format!("column {c:#x} has bits beyond row {rows}")));
        }
        Ok(GF2Matrix { rows, columns })
    }

    pub fn from_columns(rows: usize, columns: &[BitWord]) -> Result<Self> {
        if let Some(c) = columns.iter().find(|c| c.len() != rows) {
            return Err(invalid(format!("column {c} does not have length {rows}")));
        }
        Self::from_column_bits(rows, columns.iter().map(|c| c.bits()).collect())
    }

    /// Builds from columns written as bit strings, e.g. `["01", "10", "11"]`.
    pub fn from_column_strs(columns: &[&str]) -> Result<Self> {
        let words = columns.iter().map(|s| s.parse()).collect::<Result<Vec<BitWord>>>()?;
        let rows = words.first().map_or(0, |w| w.len());
        Self::from_columns(rows, &words)
    }

    pub fn from_rows(cols: usize, rows: &[BitWord]) -> Result<Self> {
        if cols > MAX_LEN {
            return Err(invalid(format!("{cols} columns exceeds {MAX_LEN} for row construction")));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(invalid(format!("row {r} does not have length {cols}")));
        }
        let row_bits: Vec<u64> = rows.iter().map(|r| r.bits()).collect();
        Self::from_column_bits(rows.len(), transpose_bits(&row_bits, cols))
    }

    pub fn identity(k: usize) -> Self {
        GF2Matrix { rows: k, columns: (0..k).map(|i| 1u64 << i).collect() }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows <= MAX_LEN);
        GF2Matrix { rows, columns: vec![0; cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> BitWord {
        BitWord::truncated(self.columns[j], self.rows)
    }

    pub fn columns(&self) -> impl Iterator<Item = BitWord> + '_ {
        self.columns.iter().map(|&c| BitWord::truncated(c, self.rows))
    }

    pub fn column_bits(&self) -> &[u64] {
        &self.columns
    }

    fn require_narrow(&self, what: &str) -> Result<()> {
        if self.cols() > MAX_LEN {
            return Err(invalid(format!("{what} needs at most {MAX_LEN} columns, got {}", self.cols())));
        }
        Ok(())
    }

    /// Rows packed into words of length `cols`. Needs `cols <= 64`.
    pub fn row_bits(&self) -> Result<Vec<u64>> {
        self.require_narrow("row access")?;
        Ok(transpose_bits(&self.columns, self.rows))
    }

    pub fn row(&self, i: usize) -> Result<BitWord> {
        Ok(BitWord::truncated(self.row_bits()?[i], self.cols()))
    }

    pub fn transpose(&self) -> Result<GF2Matrix> {
        Ok(GF2Matrix { rows: self.cols(), columns: self.row_bits()? })
    }

    pub fn select_columns(&self, indices: &[usize]) -> GF2Matrix {
        GF2Matrix { rows: self.rows, columns: indices.iter().map(|&j| self.columns[j]).collect() }
    }

    /// `M * x^T` for `x` of length `cols`.
    pub fn mul_vec(&self, x: BitWord) -> BitWord {
        let acc = x.support().filter(|&j| j < self.cols()).fold(0u64, |acc, j| acc ^ self.columns[j]);
        BitWord::truncated(acc, self.rows)
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GF2Matrix")
            .field("rows", &self.rows)
            .field("columns", &self.columns().map(|c| c.to_string()).collect::<Vec<_>>())
            .finish()
    }
}

impl Serialize for GF2Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            columns: Vec<String>,
        }
        Repr { rows: self.rows, cols: self.cols(), columns: self.columns().map(|c| c.to_string()).collect() }
            .serialize(serializer)
    }
}

/// Transposes `vectors` (each `width` bits wide) into `width` words of
/// `vectors.len()` bits.
fn transpose_bits(vectors: &[u64], width: usize) -> Vec<u64> {
    debug_assert!(vectors.len() <= 64);
    (0..width)
        .map(|bit| {
            vectors.iter().enumerate().fold(0u64, |acc, (i, &v)| acc | ((v >> bit) & 1) << i)
        })
        .collect()
}

/// Dimension of the column span.
pub fn rank(m: &GF2Matrix) -> usize {
    rank_of(m.columns.iter().copied())
}

/// True iff `vectors` are `t` linearly independent vectors of length `t`.
pub fn is_basis(vectors: &[BitWord]) -> Result<bool> {
    let t = vectors.len();
    if let Some(v) = vectors.iter().find(|v| v.len() != t) {
        return Err(invalid(format!("vector {v} has length {} but {t} vectors were given", v.len())));
    }
    Ok(rank_of(vectors.iter().map(|v| v.bits())) == t)
}

/// Reduced row echelon form of `rows` (each `width` bits wide). Returns the
/// nonzero reduced rows and their pivot columns, pivots ascending.
fn rref(rows: &[u64], width: usize) -> (Vec<u64>, Vec<usize>) {
    let mut rows: Vec<u64> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..width {
        let bit = 1u64 << col;
        let Some(found) = (next..rows.len()).find(|&i| rows[i] & bit != 0) else {
            continue;
        };
        rows.swap(next, found);
        let pivot_row = rows[next];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next && *row & bit != 0 {
                *row ^= pivot_row;
            }
        }
        pivots.push(col);
        next += 1;
    }
    rows.truncate(next);
    (rows, pivots)
}

/// Basis of `{x : <row, x> = 0 for every row}` in `F_2^width`, one vector per
/// non-pivot column in ascending order.
fn nullspace_basis(rows: &[u64], width: usize) -> Vec<u64> {
    let (reduced, pivots) = rref(rows, width);
    let pivot_mask = pivots.iter().fold(0u64, |m, &p| m | 1 << p);
    (0..width)
        .filter(|&f| pivot_mask & 1 << f == 0)
        .map(|f| {
            let mut x = 1u64 << f;
            for (row, &p) in reduced.iter().zip(&pivots) {
                if row & 1 << f != 0 {
                    x |= 1 << p;
                }
            }
            x
        })
        .collect()
}

/// The `(d-k) x d` matrix whose rows span the space orthogonal to the row
/// space of the full-row-rank `k x d` matrix `m`.
pub fn orthogonal_complement(m: &GF2Matrix) -> Result<GF2Matrix> {
    let rows = m.row_bits()?;
    let width = m.cols();
    if rank(m) != m.rows() {
        return Err(invalid(format!(
            "orthogonal complement needs full row rank, got rank {} for {} rows",
            rank(m),
            m.rows()
        )));
    }
    let basis = nullspace_basis(&rows, width);
    let words: Vec<BitWord> = basis.iter().map(|&b| BitWord::truncated(b, width)).collect();
    GF2Matrix::from_rows(width, &words)
}

/// Number of `rows`-subsets of columns that form a nonsingular square
/// submatrix.
pub fn count_nonsingular_submatrices(m: &GF2Matrix) -> Result<u64> {
    if m.rows() > m.cols() {
        return Err(invalid(format!("{} rows exceed {} columns", m.rows(), m.cols())));
    }
    if m.cols() > MAX_LEN {
        return Err(out_of_regime(format!("{} columns exceeds {MAX_LEN}", m.cols())));
    }
    let mut count = 0u64;
    for_each_independent_subset(&m.columns, m.rows(), |_| count += 1);
    Ok(count)
}

/// The binary linear code `{x : A x^T = 0}` of length `A.cols()`.
pub fn code_from_parity_check(a: &GF2Matrix) -> Result<Code> {
    let t = a.cols();
    let rows = a.row_bits()?;
    let basis = nullspace_basis(&rows, t);
    if basis.len() > MAX_KERNEL_DIM {
        return Err(out_of_regime(format!(
            "kernel dimension {} exceeds {MAX_KERNEL_DIM}",
            basis.len()
        )));
    }
    Code::from_bits(t, span(&basis))
}

/// All `2^len` elements of the span of `basis`, in Gray-code order.
pub fn span(basis: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(1 << basis.len());
    let mut cur = 0u64;
    out.push(cur);
    for i in 1u64..(1 << basis.len()) {
        cur ^= basis[i.trailing_zeros() as usize];
        out.push(cur);
    }
    out
}

/// Minimum Hamming distance over distinct pairs of codewords.
pub fn min_distance(code: &Code) -> Result<u32> {
    let words = code.as_bits();
    if words.len() < 2 {
        return Err(invalid(format!("minimum distance needs two codewords, got {}", words.len())));
    }
    let mut best = u32::MAX;
    for (i, &a) in words.iter().enumerate() {
        for &b in &words[i + 1..] {
            best = best.min((a ^ b).count_ones());
        }
    }
    Ok(best)
}

/// Classical Plotkin upper bound on the size of a binary code with the given
/// length and minimum distance.
pub fn plotkin_bound(length: u64, dmin: u64) -> Result<u64> {
    if dmin == 0 {
        return Err(invalid("minimum distance must be positive"));
    }
    if dmin.is_multiple_of(2) {
        if 2 * dmin <= length {
            return Err(out_of_regime(format!("Plotkin needs 2d > n, got d={dmin}, n={length}")));
        }
        Ok(2 * (dmin / (2 * dmin - length)))
    } else {
        if 2 * dmin < length {
            return Err(out_of_regime(format!("Plotkin needs 2d+1 > n, got d={dmin}, n={length}")));
        }
        Ok(2 * ((dmin + 1) / (2 * dmin + 1 - length)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(cols: &[&str]) -> GF2Matrix {
        GF2Matrix::from_column_strs(cols).unwrap()
    }

    fn w(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    #[test]
    fn bitword_rejects_stray_bits() {
        assert!(BitWord::new(0b100, 2).is_err());
        assert!(BitWord::new(0, 65).is_err());
        assert_eq!(BitWord::new(u64::MAX, 64).unwrap().weight(), 64);
        assert_eq!(w("0110").bits(), 0b0110);
        assert_eq!(w("1000").bits(), 1);
        assert_eq!(w("1101").to_string(), "1101");
        assert!("10a".parse::<BitWord>().is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(GF2Matrix::identity(3).rank(), 3);
        assert_eq!(GF2Matrix::zeros(4, 5).rank(), 0);
        assert_eq!(m(&["001", "010", "011"]).rank(), 2);
        assert_eq!(GF2Matrix::zeros(0, 0).rank(), 0);
    }

    #[test]
    fn basis_examples() {
        assert!(is_basis(&[w("1")]).unwrap());
        assert!(!is_basis(&[w("01"), w("01")]).unwrap());
        assert!(is_basis(&[w("01"), w("11")]).unwrap());
        assert!(is_basis(&[w("01"), w("1")]).is_err());
        assert!(is_basis(&[w("010"), w("001")]).is_err());
    }

    #[test]
    fn complement_examples() {
        let full = orthogonal_complement(&GF2Matrix::identity(2)).unwrap();
        assert_eq!((full.rows(), full.cols()), (0, 2));

        let one = GF2Matrix::from_rows(2, &[w("11")]).unwrap();
        let c = orthogonal_complement(&one).unwrap();
        assert_eq!((c.rows(), c.cols()), (1, 2));
        assert_eq!(c.row(0).unwrap(), w("11"));

        let deficient = GF2Matrix::from_rows(3, &[w("110"), w("110")]).unwrap();
        assert!(matches!(orthogonal_complement(&deficient), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn nonsingular_counts() {
        assert_eq!(count_nonsingular_submatrices(&m(&["01", "10", "11"])).unwrap(), 3);
        assert_eq!(count_nonsingular_submatrices(&m(&["01", "10", "11", "01"])).unwrap(), 5);
        assert_eq!(count_nonsingular_submatrices(&GF2Matrix::zeros(3, 3)).unwrap(), 0);
        assert_eq!(count_nonsingular_submatrices(&m(&["00", "10", "01"])).unwrap(), 1);
        assert!(count_nonsingular_submatrices(&m(&["011"])).is_err());
    }

    #[test]
    fn parity_check_kernels() {
        let rep = code_from_parity_check(&GF2Matrix::from_rows(2, &[w("11")]).unwrap()).unwrap();
        assert_eq!(rep.to_strings(), vec!["00", "11"]);
        let trivial = code_from_parity_check(&GF2Matrix::identity(2)).unwrap();
        assert_eq!(trivial.to_strings(), vec!["00"]);
        let a = m(&["01", "10", "11"]);
        assert_eq!(code_from_parity_check(&a).unwrap().to_strings(), vec!["000", "111"]);
        let empty = GF2Matrix::zeros(0, 3);
        assert_eq!(code_from_parity_check(&empty).unwrap().len(), 8);
    }

    #[test]
    fn distances() {
        let c = Code::from_strs(3, &["000", "111"]).unwrap();
        assert_eq!(min_distance(&c).unwrap(), 3);
        let c = Code::from_strs(2, &["00", "01"]).unwrap();
        assert_eq!(min_distance(&c).unwrap(), 1);
        assert!(min_distance(&Code::from_strs(2, &["00"]).unwrap()).is_err());
    }

    #[test]
    fn plotkin_examples() {
        assert_eq!(plotkin_bound(4, 3).unwrap(), 2);
        assert_eq!(plotkin_bound(5, 3).unwrap(), 4);
        assert_eq!(plotkin_bound(6, 4).unwrap(), 4);
        assert!(matches!(plotkin_bound(8, 3), Err(Error::OutOfRegime(_))));
        assert!(matches!(plotkin_bound(8, 4), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn xor_basis_undo_restores_state() {
        let mut b = XorBasis::new();
        let p1 = b.insert(0b011).unwrap();
        let p2 = b.insert(0b101).unwrap();
        assert_eq!(b.insert(0b110), None);
        b.remove(p2);
        assert_eq!(b.rank(), 1);
        assert!(b.insert(0b110).is_some());
        let _ = p1;
    }

    #[test]
    fn independent_subsets_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_independent_subset(&[0b01, 0b10, 0b11], 2, |mask| seen.push(mask));
        assert_eq!(seen, vec![0b011, 0b101, 0b110]);
    }
}
