//! Manifest of reference values and the code that recomputes them.
//!
//! The manifest is `data/regression.toml`, embedded at compile time. Every
//! entry names a quantity, its arguments and the expected value; [`check`]
//! recomputes each one and reports disagreements.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::{basisprob, extremal, hypergraph};

pub const MANIFEST: &str = include_str!("../data/regression.toml");

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Manifest {
    pub version: u32,
    #[serde(rename = "entry")]
    pub entries: Vec<Entry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Published,
    Computed,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Entry {
    pub quantity: String,
    pub args: Vec<usize>,
    pub value: String,
    pub source: Source,
    /// Absolute tolerance for floating-point quantities; exact otherwise.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
        write!(f, "{}({})", self.quantity, args.join(","))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub entry: String,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, got {}", self.entry, self.expected, self.actual)
    }
}

pub fn manifest() -> Result<Manifest> {
    toml::from_str(MANIFEST).map_err(|e| invalid(format!("regression manifest: {e}")))
}

fn arg(entry: &Entry, i: usize) -> Result<usize> {
    entry.args.get(i).copied().ok_or_else(|| invalid(format!("{entry}: missing argument {i}")))
}

fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => Some(BigRational::new(n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?)),
        None => s.trim().parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// Recomputes the quantity named by `entry`, rendered like the manifest.
pub fn evaluate(entry: &Entry) -> Result<String> {
    let value = match entry.quantity.as_str() {
        "p" => rational_string(&basisprob::p_exact(arg(entry, 0)?)?),
        "p_decimal" => basisprob::to_decimal(&basisprob::p_exact(arg(entry, 0)?)?, arg(entry, 1)?),
        "c_decimal" => basisprob::limit_constant(arg(entry, 0)?)?.decimal,
        "bkd" => extremal::bkd_bruteforce(arg(entry, 0)?, arg(entry, 1)?)?.value.to_string(),
        "bkd_part4_upper" => {
            let bounds = extremal::bkd_bounds(arg(entry, 0)?, arg(entry, 1)?)?;
            bounds.part4_upper.map_or_else(|| "none".into(), |v| v.to_string())
        }
        "g" => extremal::g_partition(arg(entry, 0)?)?.value.to_string(),
        "jt" => extremal::jt_lower_bound(arg(entry, 0)?)?.to_string(),
        "ld" => {
            let d = arg(entry, 0)?;
            let rows = extremal::ld_bounds_table(d)?;
            rows[d - 1].exact.map_or_else(|| "open".into(), |v| v.to_string())
        }
        "lagrangian_basis" => {
            let h = hypergraph::basis_hypergraph(arg(entry, 0)?)?;
            hypergraph::lagrangian(&h, 8, 1e-15, 0)?.value.to_string()
        }
        other => return Err(invalid(format!("unknown regression quantity {other:?}"))),
    };
    Ok(value)
}

fn matches(entry: &Entry, actual: &str) -> bool {
    match entry.tolerance {
        Some(tol) => {
            let expected = parse_rational(&entry.value).and_then(|r| r.to_f64());
            match (expected, actual.parse::<f64>()) {
                (Some(e), Ok(a)) => (e - a).abs() <= tol,
                _ => false,
            }
        }
        None => entry.value == actual,
    }
}

/// Recomputes every entry accepted by `filter`; an evaluation error counts
/// as a mismatch.
pub fn check(filter: impl Fn(&Entry) -> bool) -> Result<Vec<Mismatch>> {
    let manifest = manifest()?;
    Ok(manifest
        .entries
        .iter()
        .filter(|e| filter(e))
        .filter_map(|e| {
            let actual = evaluate(e).unwrap_or_else(|err| format!("error: {err}"));
            (!matches(e, &actual)).then(|| Mismatch { entry: e.to_string(), expected: e.value.clone(), actual })
        })
        .collect())
}

pub fn check_all() -> Result<Vec<Mismatch>> {
    check(|_| true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_parses() {
        let m = manifest().unwrap();
        assert_eq!(m.version, 1);
        assert!(m.entries.iter().any(|e| e.quantity == "g" && e.args == [10] && e.value == "80"));
    }

    #[test]
    fn tolerance_matching() {
        let e = Entry { quantity: "x".into(), args: vec![], value: "1/3".into(), source: Source::Published, tolerance: Some(1e-9) };
        assert!(matches(&e, "0.3333333333"));
        assert!(!matches(&e, "0.33"));
        assert!(!matches(&e, "nan-ish"));
    }

    #[test]
    fn unknown_quantity_is_an_error() {
        let e = Entry { quantity: "zeta".into(), args: vec![], value: "0".into(), source: Source::Computed, tolerance: None };
        assert!(evaluate(&e).is_err());
    }
}
