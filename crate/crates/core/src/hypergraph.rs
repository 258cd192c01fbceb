//! Uniform hypergraphs: augmentations, the linear-independence hypergraph,
//! blow-ups, copy search and Lagrangians.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, out_of_regime, Error, Result};
use crate::gf2::{for_each_independent_subset, BitIter};
use crate::seed::{self, domain};

/// Most edges any constructor will materialize.
pub const EDGE_LIMIT: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformHypergraph {
    r: usize,
    n_vertices: usize,
    /// Sorted edges, each a sorted list of distinct vertices.
    edges: Vec<Vec<usize>>,
}

impl UniformHypergraph {
    pub fn new(r: usize, n_vertices: usize, edges: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut out = Vec::new();
        for mut e in edges {
            e.sort_unstable();
            if e.len() != r || e.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("edge {e:?} does not have {r} distinct vertices")));
            }
            if e.last().is_some_and(|&v| v >= n_vertices) {
                return Err(invalid(format!("edge {e:?} leaves the vertex range 0..{n_vertices}")));
            }
            out.push(e);
        }
        out.sort_unstable();
        out.dedup();
        Ok(UniformHypergraph { r, n_vertices, edges: out })
    }

    pub fn empty(r: usize, n_vertices: usize) -> Self {
        UniformHypergraph { r, n_vertices, edges: Vec::new() }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, e: &[usize]) -> bool {
        let mut e = e.to_vec();
        e.sort_unstable();
        self.edges.binary_search(&e).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices];
        for v in self.edges.iter().flatten() {
            deg[*v] += 1;
        }
        deg
    }

    /// `|E| / C(n, r)`, exactly.
    pub fn density_exact(&self) -> BigRational {
        BigRational::new(BigInt::from(self.edges.len()), binom(self.n_vertices, self.r))
    }

    pub fn density(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.density_exact().to_f64().unwrap_or(f64::NAN)
    }

    pub fn with_edge(&self, e: Vec<usize>) -> Result<Self> {
        Self::new(self.r, self.n_vertices, self.edges.iter().cloned().chain(std::iter::once(e)))
    }
}

fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn check_edge_budget(count: &BigInt, what: &str) -> Result<()> {
    if *count > BigInt::from(EDGE_LIMIT) {
        return Err(out_of_regime(format!("{what} would have {count} edges, limit {EDGE_LIMIT}")));
    }
    Ok(())
}

/// All `s`-subsets of `t` vertices.
pub fn complete(s: usize, t: usize) -> Result<UniformHypergraph> {
    check_edge_budget(&binom(t, s), "complete hypergraph")?;
    let mut edges = Vec::new();
    let mut buf = Vec::with_capacity(s);
    subsets(t, s, 0, &mut buf, &mut |e| edges.push(e.to_vec()));
    UniformHypergraph::new(s, t, edges)
}

fn subsets(n: usize, k: usize, start: usize, buf: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if buf.len() == k {
        visit(buf);
        return;
    }
    for v in start..=n - (k - buf.len()) {
        buf.push(v);
        subsets(n, k, v + 1, buf, visit);
        buf.pop();
    }
}

/// `H(r)`: adds `r - k` fresh stem vertices, numbered after the existing
/// ones, to every edge.
pub fn augment(h: &UniformHypergraph, r: usize) -> Result<UniformHypergraph> {
    if r < h.r {
        return Err(invalid(format!("cannot augment a {}-uniform hypergraph to {r}", h.r)));
    }
    let stem: Vec<usize> = (h.n_vertices..h.n_vertices + r - h.r).collect();
    let edges = h.edges.iter().map(|e| e.iter().chain(&stem).copied().collect());
    UniformHypergraph::new(r, h.n_vertices + stem.len(), edges)
}

/// `D_r(s, t)`: the complete `s`-uniform hypergraph on `t` vertices with a
/// stem of `r - s` vertices.
pub fn d_r(r: usize, s: usize, t: usize) -> Result<UniformHypergraph> {
    augment(&complete(s, t)?, r)
}

/// The `k`-uniform hypergraph on `k + 1` consecutive vertex classes of the
/// given sizes whose edges take one vertex from each of `k` distinct classes.
pub fn complete_multipartite_kuniform(class_sizes: &[usize]) -> Result<UniformHypergraph> {
    if class_sizes.len() < 2 {
        return Err(invalid("need at least two classes"));
    }
    let k = class_sizes.len() - 1;
    let starts: Vec<usize> = class_sizes
        .iter()
        .scan(0, |acc, &s| {
            let start = *acc;
            *acc += s;
            Some(start)
        })
        .collect();
    let n: usize = class_sizes.iter().sum();
    let expected: BigInt = (0..=k)
        .map(|omit| {
            class_sizes.iter().enumerate().filter(|&(j, _)| j != omit).map(|(_, &a)| BigInt::from(a)).product::<BigInt>()
        })
        .sum();
    check_edge_budget(&expected, "multipartite hypergraph")?;

    let mut edges = Vec::new();
    for omit in 0..=k {
        let classes: Vec<usize> = (0..=k).filter(|&j| j != omit).collect();
        let mut choice = vec![0usize; k];
        if classes.iter().any(|&j| class_sizes[j] == 0) {
            continue;
        }
        loop {
            edges.push(classes.iter().zip(&choice).map(|(&j, &c)| starts[j] + c).collect());
            // Odometer over the chosen classes.
            let Some(pos) = (0..k).rev().find(|&i| choice[i] + 1 < class_sizes[classes[i]]) else {
                break;
            };
            choice[pos] += 1;
            choice[pos + 1..].iter_mut().for_each(|c| *c = 0);
        }
    }
    UniformHypergraph::new(k, n, edges)
}

/// Largest `r + k` for which the independence hypergraph is materialized.
pub const LIN_INDEP_MAX_DIM: usize = 6;

/// Vertices are the nonzero vectors of `F_2^(r+k)` (vertex `v - 1` is vector
/// `v`); an `r`-set is an edge iff it is linearly independent.
pub fn lin_indep_hypergraph(r: usize, k: usize) -> Result<UniformHypergraph> {
    let m = r + k;
    if r == 0 || m > LIN_INDEP_MAX_DIM {
        return Err(out_of_regime(format!("need 1 <= r and r + k <= {LIN_INDEP_MAX_DIM}, got r={r}, k={k}")));
    }
    let edges_expected = lin_indep_density(r, k)? * BigRational::from_integer(binom((1 << m) - 1, r));
    check_edge_budget(&edges_expected.to_integer(), "independence hypergraph")?;
    let vectors: Vec<u64> = (1..1u64 << m).collect();
    let mut edges = Vec::new();
    for_each_independent_subset(&vectors, r, |mask| edges.push(BitIter(mask).collect()));
    UniformHypergraph::new(r, vectors.len(), edges)
}

/// Density of [`lin_indep_hypergraph`] from the count of independent
/// `r`-sets, `prod_{i<r} (2^m - 2^i) / r!`, over `C(2^m - 1, r)`. Valid for
/// `r + k <= 20` without materializing anything.
pub fn lin_indep_density(r: usize, k: usize) -> Result<BigRational> {
    let m = r + k;
    if r == 0 || m > 20 {
        return Err(out_of_regime(format!("need 1 <= r and r + k <= 20, got r={r}, k={k}")));
    }
    let space = BigInt::one() << m;
    let ordered: BigInt = (0..r).map(|i| &space - (BigInt::one() << i)).product();
    let fact: BigInt = (1..=r).map(BigInt::from).product();
    Ok(BigRational::new(ordered / fact, binom((1 << m) - 1, r)))
}

/// Replaces every vertex by `factor` copies (vertex `v` becomes
/// `v * factor .. v * factor + factor`); each edge becomes all transversal
/// choices of copies.
pub fn blow_up(h: &UniformHypergraph, factor: usize) -> Result<UniformHypergraph> {
    if factor == 0 {
        return Err(invalid("blow-up factor must be at least 1"));
    }
    let per_edge = num_traits::pow(BigInt::from(factor), h.r);
    check_edge_budget(&(per_edge * h.edges.len()), "blow-up")?;
    let mut edges = Vec::new();
    for e in &h.edges {
        let mut choice = vec![0usize; h.r];
        loop {
            edges.push(e.iter().zip(&choice).map(|(&v, &c)| v * factor + c).collect());
            let Some(pos) = (0..h.r).rev().find(|&i| choice[i] + 1 < factor) else {
                break;
            };
            choice[pos] += 1;
            choice[pos + 1..].iter_mut().for_each(|c| *c = 0);
        }
    }
    UniformHypergraph::new(h.r, h.n_vertices * factor, edges)
}

/// `t`-uniform hypergraph on the nonzero vectors of `F_2^t` (vertex `v - 1`
/// is vector `v`) whose edges are the bases.
pub fn basis_hypergraph(t: usize) -> Result<UniformHypergraph> {
    if !(1..=4).contains(&t) {
        return Err(out_of_regime(format!("basis hypergraph built for 1 <= t <= 4, got {t}")));
    }
    let vectors: Vec<u64> = (1..1u64 << t).collect();
    let mut edges = Vec::new();
    for_each_independent_subset(&vectors, t, |mask| edges.push(BitIter(mask).collect()));
    UniformHypergraph::new(t, vectors.len(), edges)
}

// ---------------------------------------------------------------------------
// Copy search
// ---------------------------------------------------------------------------

pub const COPY_SMALL_LIMIT: usize = 10;
pub const COPY_BIG_LIMIT: usize = 64;
pub const DEFAULT_COPY_BUDGET: u64 = 200_000_000;

struct CopySearch<'a> {
    order: Vec<usize>,
    /// Edges of the small graph that become fully placed at each depth.
    closing: Vec<Vec<&'a [usize]>>,
    small_deg: Vec<usize>,
    big_deg: Vec<usize>,
    big_edges: HashSet<u64>,
    map: Vec<usize>,
    used: u64,
    nodes: u64,
    budget: u64,
}

impl CopySearch<'_> {
    fn run(&mut self, depth: usize) -> Result<bool> {
        if depth == self.order.len() {
            return Ok(true);
        }
        let v = self.order[depth];
        for u in 0..self.big_deg.len() {
            if self.used & 1 << u != 0 || self.big_deg[u] < self.small_deg[v] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(out_of_regime(format!("copy search exhausted its budget of {} nodes", self.budget)));
            }
            self.map[v] = u;
            let ok = self.closing[depth]
                .iter()
                .all(|e| self.big_edges.contains(&e.iter().fold(0u64, |m, &x| m | 1 << self.map[x])));
            if ok {
                self.used |= 1 << u;
                let found = self.run(depth + 1)?;
                self.used &= !(1 << u);
                if found {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// Searches for an injective map from the vertices of `small` into `big`
/// sending every edge of `small` onto an edge of `big`. `Ok(None)` is a
/// certificate of absence; an exhausted budget is an error.
pub fn contains_copy(big: &UniformHypergraph, small: &UniformHypergraph) -> Result<Option<Vec<usize>>> {
    contains_copy_with_budget(big, small, DEFAULT_COPY_BUDGET)
}

pub fn contains_copy_with_budget(
    big: &UniformHypergraph,
    small: &UniformHypergraph,
    budget: u64,
) -> Result<Option<Vec<usize>>> {
    if small.n_vertices > COPY_SMALL_LIMIT || big.n_vertices > COPY_BIG_LIMIT {
        return Err(out_of_regime(format!(
            "copy search handles at most {COPY_SMALL_LIMIT} pattern and {COPY_BIG_LIMIT} host vertices"
        )));
    }
    if small.n_vertices > big.n_vertices {
        return Ok(None);
    }
    if small.edges.is_empty() {
        return Ok(Some((0..small.n_vertices).collect()));
    }
    if small.r != big.r {
        return Err(invalid(format!("uniformity {} pattern in a {}-uniform host", small.r, big.r)));
    }

    let small_deg = small.degrees();
    // Most-constrained first: highest degree, then most edges into the
    // already ordered prefix.
    let mut order: Vec<usize> = Vec::with_capacity(small.n_vertices);
    let mut placed = vec![false; small.n_vertices];
    while order.len() < small.n_vertices {
        let next = (0..small.n_vertices)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let links = small.edges.iter().filter(|e| e.contains(&v) && e.iter().any(|&x| placed[x])).count();
                (links, small_deg[v], std::cmp::Reverse(v))
            })
            .expect("unplaced vertex");
        placed[next] = true;
        order.push(next);
    }
    let mut position = vec![0; small.n_vertices];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut closing: Vec<Vec<&[usize]>> = vec![Vec::new(); order.len()];
    for e in &small.edges {
        let last = e.iter().map(|&v| position[v]).max().expect("nonempty edge");
        closing[last].push(e);
    }

    let mut search = CopySearch {
        order,
        closing,
        small_deg,
        big_deg: big.degrees(),
        big_edges: big.edges.iter().map(|e| e.iter().fold(0u64, |m, &v| m | 1 << v)).collect(),
        map: vec![usize::MAX; small.n_vertices],
        used: 0,
        nodes: 0,
        budget,
    };
    Ok(search.run(0)?.then_some(search.map))
}

// ---------------------------------------------------------------------------
// Lagrangians
// ---------------------------------------------------------------------------

/// `sum_{e in E} prod_{j in e} x_j`.
pub fn lagrangian_polynomial(h: &UniformHypergraph, x: &[f64]) -> Result<f64> {
    if x.len() != h.n_vertices {
        return Err(invalid(format!("weight vector has {} entries for {} vertices", x.len(), h.n_vertices)));
    }
    Ok(poly(h, x))
}

fn poly(h: &UniformHypergraph, x: &[f64]) -> f64 {
    h.edges.iter().map(|e| e.iter().map(|&v| x[v]).product::<f64>()).sum()
}

fn gradient(h: &UniformHypergraph, x: &[f64], grad: &mut [f64]) {
    grad.iter_mut().for_each(|g| *g = 0.0);
    for e in &h.edges {
        for (i, &v) in e.iter().enumerate() {
            let others: f64 = e.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &u)| x[u]).product();
            grad[v] += others;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LagrangianResult {
    pub value: f64,
    pub point: Vec<f64>,
    pub restarts_used: usize,
    pub best_restart: usize,
}

const MAX_ASCENT_STEPS: usize = 200_000;

/// Multiplicative-weights ascent `x_i <- x_i (dP/dx_i) / (r P)` from `start`
/// until an iteration improves `P` by less than `tol`. The update keeps `x`
/// on the simplex because `P` is homogeneous of degree `r`; each point is
/// renormalized anyway to absorb rounding.
pub fn ascend(h: &UniformHypergraph, start: &[f64], tol: f64) -> Result<(f64, Vec<f64>)> {
    let mut x = start.to_vec();
    if x.len() != h.n_vertices || x.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(invalid("start must be a non-negative weight vector over the vertices"));
    }
    normalize(&mut x)?;
    let mut value = poly(h, &x);
    if h.edges.is_empty() || value <= 0.0 {
        return Ok((value.max(0.0), x));
    }
    let r = h.r as f64;
    let mut grad = vec![0.0; x.len()];
    for _ in 0..MAX_ASCENT_STEPS {
        gradient(h, &x, &mut grad);
        for (xi, gi) in x.iter_mut().zip(&grad) {
            *xi *= gi / (r * value);
        }
        normalize(&mut x)?;
        let next = poly(h, &x);
        let gain = next - value;
        value = next;
        if gain.abs() <= tol {
            break;
        }
    }
    Ok((value, x))
}

fn normalize(x: &mut [f64]) -> Result<()> {
    let total: f64 = x.iter().sum();
    if total <= 0.0 || total.is_nan() {
        return Err(invalid("weight vector has zero mass"));
    }
    x.iter_mut().for_each(|v| *v /= total);
    Ok(())
}

/// Best value of [`ascend`] over `restarts` starts: the barycenter first,
/// then random interior points (uniform on the simplex) from seeded streams.
/// The value is a lower bound on the Lagrangian; global optimality is not
/// certified.
pub fn lagrangian(h: &UniformHypergraph, restarts: usize, tol: f64, seed: u64) -> Result<LagrangianResult> {
    if h.n_vertices == 0 {
        return Err(invalid("hypergraph has no vertices"));
    }
    if h.n_vertices > 1000 {
        return Err(out_of_regime("Lagrangian optimizer supports at most 1000 vertices"));
    }
    let restarts = restarts.max(1);
    let n = h.n_vertices;
    let runs: Vec<(f64, Vec<f64>)> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let start: Vec<f64> = if i == 0 {
                vec![1.0; n]
            } else {
                let mut rng = seed::rng_for(seed, seed::stream_id(domain::LAGRANGIAN, 0, i as u64));
                (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect()
            };
            ascend(h, &start, tol)
        })
        .collect::<Result<_>>()?;
    let (best_restart, (value, point)) = runs
        .into_iter()
        .enumerate()
        .fold(None, |best: Option<(usize, (f64, Vec<f64>))>, cur| match best {
            Some(b) if b.1 .0 >= cur.1 .0 => Some(b),
            _ => Some(cur),
        })
        .expect("at least one restart");
    Ok(LagrangianResult { value, point, restarts_used: restarts, best_restart })
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// Writes `r=<int> n=<int>` then one sorted, space-separated edge per line.
pub fn write_hypergraph(mut out: impl Write, h: &UniformHypergraph) -> std::io::Result<()> {
    writeln!(out, "r={} n={}", h.r, h.n_vertices)?;
    for e in &h.edges {
        let line: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_hypergraph(input: impl BufRead) -> Result<UniformHypergraph> {
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Parse { line: 1, message: "missing header".into() }),
    };
    let bad_header = || Error::Parse { line: 1, message: format!("expected `r=<int> n=<int>`, got {header:?}") };
    let mut fields = header.split_whitespace();
    let r: usize = fields.next().and_then(|f| f.strip_prefix("r=")).and_then(|v| v.parse().ok()).ok_or_else(bad_header)?;
    let n: usize = fields.next().and_then(|f| f.strip_prefix("n=")).and_then(|v| v.parse().ok()).ok_or_else(bad_header)?;
    if fields.next().is_some() {
        return Err(bad_header());
    }
    let mut edges = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let edge: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: i + 1, message: format!("bad vertex index: {e}") })?;
        if edge.len() != r || edge.windows(2).any(|w| w[0] >= w[1]) || edge.iter().any(|&v| v >= n) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("edge {edge:?} is not {r} sorted distinct vertices below {n}"),
            });
        }
        edges.push(edge);
    }
    UniformHypergraph::new(r, n, edges)
}

pub fn save_hypergraph(path: impl AsRef<Path>, h: &UniformHypergraph) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_hypergraph(&mut out, h)?;
    out.flush()?;
    Ok(())
}

pub fn load_hypergraph(path: impl AsRef<Path>) -> Result<UniformHypergraph> {
    read_hypergraph(BufReader::new(File::open(path)?))
}
