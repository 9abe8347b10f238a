//! Text formats: rationals, integer lists, alpha files, output paths.

use crate::cfrac::{AlphaPair, LinearTypeProbe};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const OUT_DIR_VAR: &str = "SKEWLAB_OUT_DIR";

pub fn fmt_rat(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_err(column: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line: 1, column, msg: msg.into() }
}

/// Parse "p/q", an integer, or a finite decimal.
pub fn parse_rat(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let lead = s.len() - s.trim_start().len() + 1;
    if t.is_empty() {
        return Err(parse_err(lead, "expected a number"));
    }
    if let Some((p, q)) = t.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| parse_err(lead, format!("bad numerator '{p}'")))?;
        let den: BigInt = q.trim().parse().map_err(|_| parse_err(lead + p.len() + 1, format!("bad denominator '{q}'")))?;
        if den.is_zero() {
            return Err(parse_err(lead + p.len() + 1, "zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((i, f)) = t.split_once('.') {
        let neg = i.starts_with('-');
        let digits = format!("{}{}", i.trim_start_matches(['-', '+']), f);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(parse_err(lead, format!("bad decimal '{t}'")));
        }
        let num: BigInt = digits.parse().map_err(|_| parse_err(lead, "bad decimal"))?;
        let den = num_traits::pow(BigInt::from(10), f.len());
        let r = BigRational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| parse_err(lead, format!("bad number '{t}'")))?;
    Ok(BigRational::from_integer(n))
}

/// Comma-separated values and inclusive ranges `a..b`.
pub fn parse_n_list(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    let mut col = 1;
    for item in s.split(',') {
        let t = item.trim();
        let at = col + (item.len() - item.trim_start().len());
        if t.is_empty() {
            return Err(parse_err(at, "empty entry"));
        }
        if let Some((a, b)) = t.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| parse_err(at, format!("bad range start '{a}'")))?;
            let b: u64 = b.trim().parse().map_err(|_| parse_err(at, format!("bad range end '{b}'")))?;
            if b < a {
                return Err(parse_err(at, format!("empty range {a}..{b}")));
            }
            if b - a > 10_000_000 {
                return Err(parse_err(at, "range too long"));
            }
            out.extend(a..=b);
        } else {
            out.push(t.parse().map_err(|_| parse_err(at, format!("bad integer '{t}'")))?);
        }
        col += item.len() + 1;
    }
    Ok(out)
}

/// Comma-separated rationals.
pub fn parse_rat_list(s: &str) -> Result<Vec<BigRational>> {
    let mut out = Vec::new();
    let mut col = 1;
    for item in s.split(',') {
        out.push(parse_rat(item).map_err(|e| match e {
            Error::Parse { line, column, msg } => Error::Parse { line, column: column + col - 1, msg },
            e => e,
        })?);
        col += item.len() + 1;
    }
    Ok(out)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct AlphaFile {
    pub tool_version: String,
    pub depth: usize,
    pub seed_a1: String,
    pub quotients1: Vec<String>,
    pub quotients2: Vec<String>,
    pub convergents1: Vec<String>,
    pub convergents2: Vec<String>,
    pub radius: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_type_probe: Option<ProbeSummary>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ProbeSummary {
    pub bound: u64,
    pub trial_gamma: f64,
    pub max_exponent: Option<f64>,
    pub argmax: Option<(i64, i64)>,
    pub degenerate_count: u64,
    pub records: Vec<ProbeRecord>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ProbeRecord {
    pub k: (i64, i64),
    pub dist: String,
    pub exponent: Option<f64>,
}

impl ProbeSummary {
    pub fn from_probe(p: &LinearTypeProbe) -> Self {
        ProbeSummary {
            bound: p.bound,
            trial_gamma: p.trial_gamma,
            max_exponent: p.max_exponent,
            argmax: p.argmax,
            degenerate_count: p.degenerate_count,
            records: p
                .records
                .iter()
                .map(|r| ProbeRecord { k: r.k, dist: fmt_rat(&r.dist), exponent: r.exponent })
                .collect(),
        }
    }
}

impl AlphaFile {
    pub fn from_pair(pair: &AlphaPair, probe: Option<&LinearTypeProbe>) -> Self {
        let conv = |cf: &crate::cfrac::ContinuedFraction| {
            cf.convergent_list().iter().map(|c| format!("{}/{}", c.p, c.q)).collect()
        };
        AlphaFile {
            tool_version: TOOL_VERSION.into(),
            depth: pair.depth(),
            seed_a1: pair.cf1().quotients()[0].to_string(),
            quotients1: pair.cf1().quotients().iter().map(|q| q.to_string()).collect(),
            quotients2: pair.cf2().quotients().iter().map(|q| q.to_string()).collect(),
            convergents1: conv(pair.cf1()),
            convergents2: conv(pair.cf2()),
            radius: fmt_rat(&pair.radius()),
            linear_type_probe: probe.map(ProbeSummary::from_probe),
        }
    }

    /// Rebuild the pair from the quotients, re-checking windows and the
    /// stored convergents.
    pub fn to_pair(&self) -> Result<AlphaPair> {
        let parse = |v: &[String]| -> Result<Vec<BigUint>> {
            v.iter()
                .enumerate()
                .map(|(i, s)| s.parse::<BigUint>().map_err(|_| Error::InvalidQuotient(i + 1)))
                .collect()
        };
        let pair = AlphaPair::from_quotients(parse(&self.quotients1)?, parse(&self.quotients2)?)?;
        let fresh = AlphaFile::from_pair(&pair, None);
        if fresh.convergents1 != self.convergents1 || fresh.convergents2 != self.convergents2 {
            return Err(Error::InvalidParameter("stored convergents disagree with quotients".into()));
        }
        if pair.depth() != self.depth {
            return Err(Error::InvalidParameter("stored depth disagrees with quotients".into()));
        }
        Ok(pair)
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), msg: e.to_string() }
}

pub fn alpha_from_json(text: &str) -> Result<AlphaPair> {
    let file: AlphaFile = serde_json::from_str(text).map_err(json_err)?;
    file.to_pair()
}

pub fn load_alpha(path: &Path) -> Result<AlphaPair> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    alpha_from_json(&text)
}

/// Relative paths are resolved against `SKEWLAB_OUT_DIR` when it is set.
pub fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(base) = std::env::var(OUT_DIR_VAR) {
            if !base.is_empty() {
                return Path::new(&base).join(path);
            }
        }
    }
    path.to_path_buf()
}

/// Buffered writer to a resolved path, or stdout.
pub fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let p = resolve_out(p);
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            Ok(Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)))
        }
        None => Ok(Box::new(std::io::BufWriter::new(std::io::stdout()))),
    }
}
