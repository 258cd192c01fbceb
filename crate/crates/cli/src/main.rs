//! `hypercube-codes`: reproduces the bound tables and runs the code
//! constructions and verifiers from the command line.

mod output;

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hypercube_codes::codes::{self, Code, LayerReport, RetryPolicy};
use hypercube_codes::{basisprob, cube, extremal, hypergraph, regression};
use output::{opt, Format, Report};

#[derive(Parser)]
#[command(name = "hypercube-codes", version, about = "Erasure list-decodable codes in the hypercube")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; one per core when unset.
    #[arg(long, global = true, env = "HYPERCUBE_CODES_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Layered random-linear construction.
    Eil,
    /// All words with weight in one residue class.
    ModWeight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum HypergraphKind {
    Basis,
    LinIndep,
    DR,
    Complete,
}

#[derive(Subcommand)]
enum Command {
    /// P(t) for t = 1..=t and the certified value of c.
    Constants {
        #[arg(long, default_value_t = 10)]
        t: usize,
    },
    /// Bounds on L(d); fails if a reference value disagrees.
    BoundsTable {
        #[arg(long, default_value_t = 10)]
        d: usize,
    },
    /// Builds a code and scans every d-subcube.
    BuildVerify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Weight modulus of the kept subcode; d + 1 for the layered family.
        #[arg(long)]
        modulus: Option<usize>,
        /// Residue to keep; the largest class when unset.
        #[arg(long)]
        residue: Option<usize>,
        #[arg(long, value_enum, default_value_t = Family::Eil)]
        family: Family,
        /// Redraws per layer in the layered family.
        #[arg(long, default_value_t = 64)]
        budget: u32,
        /// Fail when a layer stays below its size threshold.
        #[arg(long)]
        strict: bool,
    },
    /// Writes a code file (to --out, or stdout).
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        modulus: Option<usize>,
        #[arg(long)]
        residue: Option<usize>,
        #[arg(long, value_enum, default_value_t = Family::Eil)]
        family: Family,
        #[arg(long, default_value_t = 64)]
        budget: u32,
        #[arg(long)]
        strict: bool,
    },
    /// Summarizes a code or hypergraph file.
    Load {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Writes a hypergraph file (to --out, or stdout).
    Hypergraph {
        #[arg(long, value_enum)]
        kind: HypergraphKind,
        /// Uniformity.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Uniformity of the complete part of D_r(s, t).
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
    },
    /// B(k, d) by exhaustive search, with its bounds.
    Bkd {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
    },
    /// g(d) and an optimal partition.
    G {
        #[arg(long)]
        d: usize,
    },
    /// Largest (d, L, n)-code for small n.
    SearchMaxCode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Codewords allowed per subcube.
        #[arg(long)]
        limit: u64,
        /// Node budget for branch and bound.
        #[arg(long, default_value_t = cube::DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Lagrangian of a hypergraph file or of the basis hypergraph B_t.
    Lagrangian {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-15)]
        tol: f64,
    },
    /// Density of a code file, or of the independence hypergraph.
    Density {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Layered hitting set for subcubes of dimension 2k + 3 log k.
    Hitting {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
}

/// A command's report plus whether its checks passed.
struct Outcome {
    report: Report,
    ok: bool,
    /// Raw output that replaces the rendered report (file formats).
    raw: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, ok: true, raw: None }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(threads) = cli.common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("building thread pool")?;
    }
    let common = &cli.common;
    let outcome = match cli.command {
        Command::Constants { t } => constants(t)?.into(),
        Command::BoundsTable { d } => bounds_table(d)?,
        Command::BuildVerify { n, d, modulus, residue, family, budget, strict } => {
            let policy = RetryPolicy { max_retries: budget, strict };
            build_verify(n, d, modulus, residue, family, common.seed, policy)?.into()
        }
        Command::Build { n, modulus, residue, family, budget, strict } => {
            let policy = RetryPolicy { max_retries: budget, strict };
            build(n, modulus, residue, family, common.seed, policy)?
        }
        Command::Load { input } => load(&input)?.into(),
        Command::Hypergraph { kind, r, k, s, t } => build_hypergraph(kind, r, k, s, t)?,
        Command::Bkd { k, d } => bkd(k, d)?.into(),
        Command::G { d } => g(d)?.into(),
        Command::SearchMaxCode { n, d, limit, budget } => search_max_code(n, d, limit, budget)?.into(),
        Command::Lagrangian { input, t, restarts, tol } => lagrangian(input.as_deref(), t, restarts, tol, common.seed)?.into(),
        Command::Density { input, r, k } => density(input.as_deref(), r, k)?.into(),
        Command::Hitting { n, k } => hitting(n, k, common.seed)?.into(),
    };
    let text = match outcome.raw {
        Some(raw) => raw,
        None => outcome.report.render(common.format)?,
    };
    match &common.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(outcome.ok)
}

fn constants(t_max: usize) -> anyhow::Result<Report> {
    if !(1..=40).contains(&t_max) {
        bail!("--t must be between 1 and 40");
    }
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for t in 1..=t_max {
        let p = basisprob::p_exact(t)?;
        let exact = format!("{}/{}", p.numer(), p.denom());
        let decimal = basisprob::to_decimal(&p, 12);
        json_rows.push(json!({ "t": t, "exact": exact, "decimal": decimal }));
        rows.push(vec![t.to_string(), exact, decimal]);
    }
    let c = basisprob::limit_constant(12)?;
    let lower = basisprob::to_decimal(&c.lower, 15);
    let upper = basisprob::to_decimal(&c.upper, 15);
    rows.push(vec!["c".into(), format!("[{lower}, {upper}]"), c.decimal.clone()]);
    let json = json!({
        "rows": json_rows,
        "c": { "decimal": c.decimal, "lower": lower, "upper": upper, "truncation": c.truncation },
    });
    Ok(Report::new("constants", json)
        .table(&["t", "P(t)", "decimal"], rows)
        .note(format!("c certified from P({}) with interval width below 1e-12", c.truncation)))
}

fn bounds_table(d_max: usize) -> anyhow::Result<Outcome> {
    let rows = extremal::ld_bounds_table(d_max)?;
    let mismatches = regression::check_all()?;
    let table = rows
        .iter()
        .map(|r| {
            let partition = r.g_partition.as_ref().map(|p| format!("{p:?}").replace(' ', ""));
            vec![
                r.d.to_string(),
                r.jt_lower.to_string(),
                opt(r.g_lower),
                opt(partition),
                r.lower.to_string(),
                opt(r.construction_upper),
                opt(r.exact),
                extremal::central_binomial(r.d).to_string(),
            ]
        })
        .collect();
    let json = json!({ "rows": rows, "regression_mismatches": mismatches });
    let mut report = Report::new("bounds-table", json).table(
        &["d", "jt_lower", "g_lower", "g_partition", "lower", "upper", "exact", "central_binomial"],
        table,
    );
    for m in &mismatches {
        eprintln!("regression mismatch: {m}");
        report = report.note(format!("MISMATCH {m}"));
    }
    Ok(Outcome { report, ok: mismatches.is_empty(), raw: None })
}

struct Built {
    code: Code,
    family: Family,
    modulus: usize,
    residue: usize,
    source_size: usize,
    layers: Vec<LayerReport>,
}

fn build_code(
    n: usize,
    modulus: Option<usize>,
    residue: Option<usize>,
    family: Family,
    default_modulus: Option<usize>,
    seed: u64,
    policy: RetryPolicy,
) -> anyhow::Result<Built> {
    let Some(modulus) = modulus.or(default_modulus) else {
        bail!("--modulus is required here");
    };
    let (source, layers) = match family {
        Family::Eil => {
            let eil = codes::eil_code(&codes::build_eil_layers(n, seed)?, policy)?;
            for r in eil.shortfall_layers() {
                log::warn!("layer {r} stays at or below its size threshold after retries");
            }
            (eil.code, eil.reports)
        }
        Family::ModWeight => (Code::full(n)?, Vec::new()),
    };
    let (code, residue) = match residue {
        Some(res) => (codes::residue_subcode(&source, modulus, res)?, res),
        None => {
            let best = codes::best_residue_subcode(&source, modulus)?;
            (best.code, best.residue)
        }
    };
    Ok(Built { code, family, modulus, residue, source_size: source.len(), layers })
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Eil => "eil",
        Family::ModWeight => "mod-weight",
    }
}

fn build_verify(
    n: usize,
    d: usize,
    modulus: Option<usize>,
    residue: Option<usize>,
    family: Family,
    seed: u64,
    policy: RetryPolicy,
) -> anyhow::Result<Report> {
    let default_modulus = (family == Family::Eil).then_some(d + 1);
    let built = build_code(n, modulus, residue, family, default_modulus, seed, policy)?;
    let scan = cube::max_subcube_count(&built.code, d)?;
    let b_d = (1..=extremal::B_MAX_LIMIT).contains(&d).then(|| extremal::b_max(d)).transpose()?.map(|b| b.value);
    let density = built.code.density();
    let c = basisprob::limit_f64();
    let shortfall: Vec<usize> = built.layers.iter().filter(|l| !l.meets_threshold).map(|l| l.r).collect();
    let json = json!({
        "n": n,
        "d": d,
        "family": family_name(built.family),
        "modulus": built.modulus,
        "residue": built.residue,
        "seed": seed,
        "source_size": built.source_size,
        "size": built.code.len(),
        "density": density,
        "c_over_modulus": c / built.modulus as f64,
        "max_count": scan.max_count,
        "b_d": b_d,
        "within_b_d": b_d.map(|b| scan.max_count <= b),
        "witness": scan.witness,
        "histogram": scan.histogram,
        "shortfall_layers": shortfall,
    });
    let row = vec![
        n.to_string(),
        d.to_string(),
        family_name(built.family).into(),
        built.modulus.to_string(),
        built.residue.to_string(),
        built.code.len().to_string(),
        format!("{density:.6}"),
        scan.max_count.to_string(),
        opt(b_d),
    ];
    let mut report = Report::new("build-verify", json).table(
        &["n", "d", "family", "modulus", "residue", "size", "density", "max_count", "B(d)"],
        vec![row],
    );
    report = report.note(format!("densest subcube: {}", serde_json::to_string(&scan.witness)?));
    if !shortfall.is_empty() {
        report = report.note(format!("layers below threshold: {shortfall:?}"));
    }
    Ok(report)
}

fn build(
    n: usize,
    modulus: Option<usize>,
    residue: Option<usize>,
    family: Family,
    seed: u64,
    policy: RetryPolicy,
) -> anyhow::Result<Outcome> {
    let built = build_code(n, modulus, residue, family, Some(1), seed, policy)?;
    let mut buf = Vec::new();
    codes::write_code(&mut buf, &built.code)?;
    let json = json!({ "n": n, "size": built.code.len() });
    Ok(Outcome { report: Report::new("build", json), ok: true, raw: Some(String::from_utf8(buf)?) })
}

fn load(path: &Path) -> anyhow::Result<Report> {
    let mut first = String::new();
    BufReader::new(fs::File::open(path).with_context(|| format!("opening {}", path.display()))?).read_line(&mut first)?;
    if first.starts_with("r=") {
        let h = hypergraph::load_hypergraph(path)?;
        let json = json!({
            "kind": "hypergraph",
            "r": h.r(),
            "n_vertices": h.n_vertices(),
            "edges": h.edge_count(),
            "density": h.density(),
        });
        let row = vec![h.r().to_string(), h.n_vertices().to_string(), h.edge_count().to_string(), format!("{:.6}", h.density())];
        return Ok(Report::new("load", json).table(&["r", "vertices", "edges", "density"], vec![row]));
    }
    let loaded = codes::read_code(BufReader::new(fs::File::open(path)?))?;
    if loaded.duplicates > 0 {
        log::warn!("{}: collapsed {} duplicate words", path.display(), loaded.duplicates);
    }
    let code = loaded.code;
    let json = json!({
        "kind": "code",
        "n": code.n(),
        "size": code.len(),
        "density": code.density(),
        "duplicates": loaded.duplicates,
        "weight_distribution": code.weight_distribution(),
    });
    let rows = code
        .weight_distribution()
        .iter()
        .enumerate()
        .map(|(w, count)| vec![w.to_string(), count.to_string()])
        .collect();
    Ok(Report::new("load", json)
        .table(&["weight", "count"], rows)
        .note(format!("n={} size={} density={:.6}", code.n(), code.len(), code.density())))
}

fn require(v: Option<usize>, flag: &str) -> anyhow::Result<usize> {
    v.with_context(|| format!("--{flag} is required here"))
}

fn build_hypergraph(
    kind: HypergraphKind,
    r: Option<usize>,
    k: Option<usize>,
    s: Option<usize>,
    t: Option<usize>,
) -> anyhow::Result<Outcome> {
    let h = match kind {
        HypergraphKind::Basis => hypergraph::basis_hypergraph(require(t, "t")?)?,
        HypergraphKind::LinIndep => hypergraph::lin_indep_hypergraph(require(r, "r")?, require(k, "k")?)?,
        HypergraphKind::DR => hypergraph::d_r(require(r, "r")?, require(s, "s")?, require(t, "t")?)?,
        HypergraphKind::Complete => hypergraph::complete(require(s, "s")?, require(t, "t")?)?,
    };
    let mut buf = Vec::new();
    hypergraph::write_hypergraph(&mut buf, &h)?;
    let json = json!({ "r": h.r(), "n_vertices": h.n_vertices(), "edges": h.edge_count() });
    Ok(Outcome { report: Report::new("hypergraph", json), ok: true, raw: Some(String::from_utf8(buf)?) })
}

fn bkd(k: usize, d: usize) -> anyhow::Result<Report> {
    let result = extremal::bkd_bruteforce(k, d)?;
    let bounds = extremal::bkd_bounds(k, d)?;
    let columns: Vec<String> = result.witness.columns().map(|c| c.to_string()).collect();
    let json = json!({ "result": result, "bounds": bounds });
    let row = vec![
        k.to_string(),
        d.to_string(),
        result.value.to_string(),
        bounds.plausibility_lower.to_string(),
        opt(bounds.part3_upper),
        opt(bounds.part4_upper),
        opt(bounds.monotone_upper),
    ];
    Ok(Report::new("bkd", json)
        .table(&["k", "d", "B(k,d)", "plausibility", "part3_upper", "part4_upper", "monotone_upper"], vec![row])
        .note(format!("witness columns: {}", columns.join(" "))))
}

fn g(d: usize) -> anyhow::Result<Report> {
    let result = extremal::g_partition(d)?;
    let closed = (d.is_multiple_of(3) && d >= 3).then(|| extremal::g_closed_form_check(d)).transpose()?;
    let json = json!({ "result": result, "closed_form": closed });
    let row = vec![d.to_string(), result.value.to_string(), format!("{:?}", result.best.parts).replace(' ', "")];
    let mut report = Report::new("g", json).table(&["d", "g", "partition"], vec![row]);
    if let Some(c) = closed {
        report = report.note(format!(
            "all-threes value {}: {}",
            c.closed_form,
            if c.all_threes_attains_max { "optimal" } else { "not optimal" }
        ));
    }
    Ok(report)
}

fn search_max_code(n: usize, d: usize, limit: u64, budget: u64) -> anyhow::Result<Report> {
    let result = if n <= cube::EXHAUSTIVE_LIMIT {
        cube::max_code_exhaustive(n, d, limit)?
    } else {
        cube::max_code_branch_and_bound(n, d, limit, budget)?
    };
    let row = vec![
        n.to_string(),
        d.to_string(),
        limit.to_string(),
        result.max_size.to_string(),
        result.upper_bound.to_string(),
        result.certified.to_string(),
        result.nodes.to_string(),
    ];
    let witness = result.witness.to_strings().join(" ");
    Ok(Report::new("search-max-code", serde_json::to_value(&result)?)
        .table(&["n", "d", "limit", "max_size", "upper_bound", "certified", "nodes"], vec![row])
        .note(format!("witness: {witness}")))
}

fn lagrangian(input: Option<&Path>, t: Option<usize>, restarts: usize, tol: f64, seed: u64) -> anyhow::Result<Report> {
    let (h, expected) = match (input, t) {
        (Some(path), None) => (hypergraph::load_hypergraph(path)?, None),
        (None, Some(t)) => {
            let p = basisprob::p_exact(t)?;
            let fact: f64 = (1..=t).map(|i| i as f64).product();
            (hypergraph::basis_hypergraph(t)?, Some(num_traits::ToPrimitive::to_f64(&p).unwrap_or(f64::NAN) / fact))
        }
        _ => bail!("give exactly one of --in and --t"),
    };
    let result = hypergraph::lagrangian(&h, restarts, tol, seed)?;
    let row = vec![
        h.r().to_string(),
        h.n_vertices().to_string(),
        h.edge_count().to_string(),
        format!("{:.12}", result.value),
        opt(expected.map(|e| format!("{e:.12}"))),
        result.best_restart.to_string(),
    ];
    let json = json!({ "r": h.r(), "n_vertices": h.n_vertices(), "edges": h.edge_count(), "result": result, "expected": expected });
    Ok(Report::new("lagrangian", json).table(&["r", "vertices", "edges", "lagrangian", "P(t)/t!", "best_restart"], vec![row]))
}

fn density(input: Option<&Path>, r: Option<usize>, k: Option<usize>) -> anyhow::Result<Report> {
    if let Some(path) = input {
        let code = codes::load_code(path)?;
        let json = json!({ "kind": "code", "n": code.n(), "size": code.len(), "density": code.density() });
        let row = vec![code.n().to_string(), code.len().to_string(), format!("{:.6}", code.density())];
        return Ok(Report::new("density", json).table(&["n", "size", "density"], vec![row]));
    }
    let (r, k) = (require(r, "r")?, require(k, "k")?);
    let exact = hypergraph::lin_indep_density(r, k)?;
    let value = num_traits::ToPrimitive::to_f64(&exact).unwrap_or(f64::NAN);
    let floor = 1.0 - (-(k as f64)).exp2();
    let json = json!({
        "kind": "independence-hypergraph",
        "r": r,
        "k": k,
        "exact": format!("{}/{}", exact.numer(), exact.denom()),
        "density": value,
        "one_minus_two_pow_minus_k": floor,
    });
    let row = vec![r.to_string(), k.to_string(), format!("{value:.9}"), format!("{floor:.9}")];
    Ok(Report::new("density", json).table(&["r", "k", "density", "1-2^-k"], vec![row]))
}

fn hitting(n: usize, k: usize, seed: u64) -> anyhow::Result<Report> {
    let h = codes::hitting_set(n, k, seed)?;
    let dim = codes::hitting_dimension(k);
    let verified = if dim <= n { Some(cube::verify_hitting(&h.set, dim)?) } else { None };
    let density = h.set.density();
    let rows = h
        .layers
        .iter()
        .map(|l| vec![l.r.to_string(), l.total.to_string(), l.dependent.to_string(), l.included_entirely.to_string()])
        .collect();
    let json = json!({
        "n": n,
        "k": k,
        "seed": seed,
        "size": h.set.len(),
        "density": density,
        "target_density": h.target_density,
        "meets_target": h.meets_target,
        "small_layer_cutoff": h.small_layer_cutoff,
        "dimension": dim,
        "hits_all": verified.as_ref().map(|v| v.hits_all),
        "missed": verified.as_ref().and_then(|v| v.missed),
        "layers": h.layers,
    });
    let hits = match &verified {
        Some(v) => v.hits_all.to_string(),
        None => format!("not checked (dimension {dim} > n)"),
    };
    Ok(Report::new("hitting", json)
        .table(&["r", "words", "dependent", "whole_layer"], rows)
        .note(format!("density {density:.6}, target {}, meets target {}", h.target_density, h.meets_target))
        .note(format!("hits every {dim}-subcube: {hits}")))
}
