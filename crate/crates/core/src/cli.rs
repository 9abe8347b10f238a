//! Command-line front end.

use crate::cfrac::{linear_type_scan, synthesize_alpha_pair, AlphaPair};
use crate::dimension::{certify_dimension_bound, BlockSchedule};
use crate::error::{Error, Result};
use crate::io::{self, fmt_rat, parse_n_list, parse_rat, parse_rat_list, AlphaFile, TOOL_VERSION};
use crate::rigorous::{round_rel, Enclosure};
use crate::skewprod::{mixing_scan, MixingCertificate, ScanConfig, ScanFamily, SkewSystem};
use crate::targets::{bc_partial_sums, default_center, ensemble_fraction, TargetSpec, TargetSystem, DEFAULT_START_INDEX};
use crate::torus::{rectangle_discrepancy, rotation_orbit, DiscrepancyMode, TorusPoint3, DEFAULT_GRID, EXACT_LIMIT};
use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "skewlab", version, about = "Exact-arithmetic experiments on a slowly mixing skew product of the 3-torus")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Synthesize a window-valid frequency pair and write it as JSON.
    ConstructAlpha {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        seed_a1: Option<String>,
        /// Also run the linear-type scan up to this bound.
        #[arg(long)]
        probe_k: Option<u64>,
        #[arg(long, default_value = "17")]
        probe_gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rectangle discrepancy of the rotation orbit (CSV).
    Discrepancy {
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        n_list: String,
        /// exact, grid[:M] or auto (exact up to 512, grid above).
        #[arg(long, default_value = "auto")]
        mode: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mixing certificates over dyadic cube pairs (JSON lines).
    MixingScan {
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        max_gen: u32,
        #[arg(long)]
        n_list: String,
        #[arg(long, default_value = "1/17")]
        s: String,
        /// anchored or all.
        #[arg(long, default_value = "anchored")]
        family: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shrinking-target ensemble hit fractions (CSV).
    Targets {
        /// skew or baseline.
        #[arg(long)]
        system: String,
        #[arg(long)]
        alpha: Option<PathBuf>,
        #[arg(long, default_value = "1/3")]
        delta: String,
        #[arg(long, default_value_t = DEFAULT_START_INDEX)]
        n0: u64,
        #[arg(long)]
        horizons: String,
        #[arg(long, default_value_t = 1000)]
        ensemble: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Target center x,y,z as rationals.
        #[arg(long)]
        center: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified covering dimension bounds (JSON).
    Dimension {
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long, default_value = "13/5")]
        theta: String,
        #[arg(long, default_value = "3")]
        beta: String,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value = "1/64")]
        s_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Run with process arguments; returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidParameter("--threads must be at least 1".into()));
        }
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::ConstructAlpha { depth, seed_a1, probe_k, probe_gamma, out } => construct_alpha(depth, seed_a1, probe_k, probe_gamma, out),
        Command::Discrepancy { alpha, n_list, mode, out } => discrepancy(alpha, &n_list, &mode, out),
        Command::MixingScan { alpha, max_gen, n_list, s, family, out } => scan(alpha, max_gen, &n_list, &s, &family, out),
        Command::Targets { system, alpha, delta, n0, horizons, ensemble, seed, center, out } => {
            targets(&system, alpha, &delta, n0, &horizons, ensemble, seed, center, out)
        }
        Command::Dimension { alpha, theta, beta, levels, s_grid, out } => dimension(alpha, &theta, &beta, levels, &s_grid, out),
    }
}

fn meta(command: &str, config: Value, alpha_depth: Option<usize>, seed: Option<u64>) -> Value {
    json!({
        "tool": "skewlab",
        "tool_version": TOOL_VERSION,
        "command": command,
        "config": config,
        "alpha_depth": alpha_depth,
        "seed": seed,
    })
}

fn csv_header(w: &mut dyn Write, meta: &Value) -> Result<()> {
    let obj = meta.as_object().expect("meta object");
    for (k, v) in obj {
        writeln!(w, "# {k}: {v}")?;
    }
    Ok(())
}

fn load(path: &PathBuf) -> Result<AlphaPair> {
    io::load_alpha(path)
}

fn construct_alpha(depth: usize, seed_a1: Option<String>, probe_k: Option<u64>, gamma: f64, out: Option<PathBuf>) -> Result<()> {
    let seed = match &seed_a1 {
        Some(s) => Some(s.trim().parse::<BigUint>().map_err(|_| Error::Parse { line: 1, column: 1, msg: format!("bad seed '{s}'") })?),
        None => None,
    };
    let pair = synthesize_alpha_pair(depth, seed)?;
    let probe = match probe_k {
        Some(k) => Some(linear_type_scan(&pair.truncated(), k, gamma)?),
        None => None,
    };
    let file = AlphaFile::from_pair(&pair, probe.as_ref());
    let mut value = serde_json::to_value(&file).expect("serializable");
    let config = json!({ "depth": depth, "seed_a1": seed_a1, "probe_k": probe_k, "probe_gamma": gamma });
    value
        .as_object_mut()
        .expect("object")
        .insert("meta".into(), meta("construct-alpha", config, Some(depth), None));
    let mut w = io::open_out(out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &value).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn parse_mode(s: &str) -> Result<Option<DiscrepancyMode>> {
    let t = s.trim();
    match t {
        "auto" => Ok(None),
        "exact" => Ok(Some(DiscrepancyMode::Exact)),
        "grid" => Ok(Some(DiscrepancyMode::Grid(DEFAULT_GRID))),
        _ => match t.strip_prefix("grid:") {
            Some(m) => m
                .parse::<u32>()
                .map(|m| Some(DiscrepancyMode::Grid(m)))
                .map_err(|_| Error::Parse { line: 1, column: 6, msg: format!("bad grid size '{m}'") }),
            None => Err(Error::Parse { line: 1, column: 1, msg: format!("unknown mode '{t}'") }),
        },
    }
}

fn discrepancy(alpha: PathBuf, n_list: &str, mode: &str, out: Option<PathBuf>) -> Result<()> {
    let ns = parse_n_list(n_list)?;
    let mode = parse_mode(mode)?;
    let pair = load(&alpha)?;
    let max_n = *ns.iter().max().ok_or(Error::EmptyPrefix)?;
    let orbit = rotation_orbit(&pair.truncated(), max_n)?;
    let config = json!({ "alpha_file": alpha.file_name().map(|f| f.to_string_lossy().into_owned()), "n_list": n_list, "mode": mode.map_or("auto".to_string(), |m| m.to_string()) });
    let mut w = io::open_out(out.as_deref())?;
    csv_header(&mut *w, &meta("discrepancy", config, Some(pair.depth()), None))?;
    writeln!(w, "n,D_n,mode,error_bound")?;
    for n in ns {
        let m = mode.unwrap_or(if n <= EXACT_LIMIT { DiscrepancyMode::Exact } else { DiscrepancyMode::Grid(DEFAULT_GRID) });
        let d = rectangle_discrepancy(&orbit, n, m)?;
        writeln!(w, "{n},{},{},{}", fmt_rat(&d.value), d.mode, fmt_rat(&d.error_bound))?;
    }
    w.flush()?;
    Ok(())
}

pub fn certificate_json(c: &MixingCertificate) -> Value {
    json!({
        "gA": c.a.gen,
        "idxA": c.a.idx,
        "gB": c.b.gen,
        "idxB": c.b.idx,
        "n": c.n,
        "measure": c.measure.render(),
        "product_term": fmt_rat(&c.product_term),
        "needed_C": c.needed_c.render(),
        "analytic_bound": c.analytic_bound.render(),
        "exact": c.exact(),
        "truncation_level": c.truncation_level,
        "product_dominates": c.product_dominates,
        "indicator_stable": c.indicator_stable,
    })
}

fn scan(alpha: PathBuf, max_gen: u32, n_list: &str, s: &str, family: &str, out: Option<PathBuf>) -> Result<()> {
    let ns: Vec<u32> = parse_n_list(n_list)?
        .into_iter()
        .map(|n| u32::try_from(n).map_err(|_| Error::InvalidParameter(format!("n = {n} too large"))))
        .collect::<Result<_>>()?;
    let s_val = parse_rat(s)?;
    let fam = match family.trim() {
        "anchored" => ScanFamily::Anchored,
        "all" => ScanFamily::All,
        other => return Err(Error::Parse { line: 1, column: 1, msg: format!("unknown family '{other}'") }),
    };
    if max_gen > crate::torus::MAX_GENERATION {
        return Err(Error::InvalidParameter(format!("max generation {max_gen} too large")));
    }
    let pair = load(&alpha)?;
    let system = SkewSystem::new(pair.truncated());
    let config = json!({ "alpha_file": alpha.file_name().map(|f| f.to_string_lossy().into_owned()), "max_gen": max_gen, "n_list": n_list, "s": fmt_rat(&s_val), "family": family.trim() });
    let mut w = io::open_out(out.as_deref())?;
    writeln!(w, "{}", json!({ "meta": meta("mixing-scan", config, Some(pair.depth()), None) }))?;
    let cfg = ScanConfig { max_gen, n_list: ns, s: s_val, family: fam };
    let summary = mixing_scan(&system, &cfg, |c| {
        writeln!(w, "{}", certificate_json(c))?;
        Ok(())
    })?;
    let argmax = summary.c_star_argmax.map(|(a, b, n)| json!({ "gA": a.gen, "idxA": a.idx, "gB": b.gen, "idxB": b.idx, "n": n }));
    writeln!(
        w,
        "{}",
        json!({ "summary": {
            "certificates": summary.certificates,
            "exact_certificates": summary.exact_certificates,
            "C_star": fmt_rat(&summary.c_star),
            "C_star_argmax": argmax,
            "C_star_approx": summary.c_star_approx.map(|v| format!("{v:e}")),
            "product_dominated": summary.product_dominated,
            "bound_violations": summary.bound_violations,
            "unstable_indicators": summary.unstable_indicators,
        }})
    )?;
    w.flush()?;
    Ok(())
}

fn decimal(x: &BigRational, digits: u32, up: bool) -> String {
    let scale = BigRational::from_integer(num_traits::pow(num_bigint::BigInt::from(10), digits as usize));
    let v = x * &scale;
    let i = if up { v.ceil() } else { v.floor() }.to_integer();
    let neg = i < num_bigint::BigInt::from(0);
    let s = i.magnitude().to_string();
    let s = format!("{:0>width$}", s, width = digits as usize + 1);
    let (a, b) = s.split_at(s.len() - digits as usize);
    format!("{}{a}.{b}", if neg { "-" } else { "" })
}

fn enclosure_cols(e: &Enclosure) -> (String, String) {
    (decimal(&e.lo, 12, false), decimal(&e.hi, 12, true))
}

#[allow(clippy::too_many_arguments)]
fn targets(system: &str, alpha: Option<PathBuf>, delta: &str, n0: u64, horizons: &str, m: u64, seed: u64, center: Option<String>, out: Option<PathBuf>) -> Result<()> {
    let delta_v = parse_rat(delta)?;
    let hs = parse_n_list(horizons)?;
    let center_v = match &center {
        Some(c) => {
            let v = parse_rat_list(c)?;
            if v.len() != 3 {
                return Err(Error::Parse { line: 1, column: 1, msg: format!("center needs 3 coordinates, got {}", v.len()) });
            }
            TorusPoint3::new([v[0].clone(), v[1].clone(), v[2].clone()])
        }
        None => default_center(),
    };
    let (sys, depth) = match system.trim() {
        "skew" => {
            let path = alpha.as_ref().ok_or_else(|| Error::InvalidParameter("--alpha is required for the skew system".into()))?;
            let pair = load(path)?;
            (TargetSystem::Skew(SkewSystem::new(pair.truncated())), Some(pair.depth()))
        }
        "baseline" => (TargetSystem::Baseline, None),
        other => return Err(Error::Parse { line: 1, column: 1, msg: format!("unknown system '{other}'") }),
    };
    let max_h = hs.iter().copied().max().unwrap_or(0);
    let target = TargetSpec::new(center_v.clone(), delta_v.clone(), max_h, n0)?;
    let rows = ensemble_fraction(&sys, m, &target, &hs, seed)?;
    let mut sorted = hs.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let bc_points: Vec<u64> = sorted.iter().map(|&h| h.max(1)).collect();
    let bc = bc_partial_sums(&delta_v, &bc_points)?;
    let config = json!({
        "system": sys.name(),
        "alpha_file": alpha.as_ref().and_then(|a| a.file_name()).map(|f| f.to_string_lossy().into_owned()),
        "delta": fmt_rat(&delta_v),
        "n0": n0,
        "horizons": horizons,
        "ensemble": m,
        "center": center_v.coords().iter().map(fmt_rat).collect::<Vec<_>>(),
    });
    let mut w = io::open_out(out.as_deref())?;
    csv_header(&mut *w, &meta("targets", config, depth, Some(seed)))?;
    writeln!(w, "horizon,fraction,mean_hits,bc_partial_sum,boundary_ambiguous_count,bc_lower,bc_upper")?;
    let mden = BigRational::from_integer(m.into());
    for (row, e) in rows.iter().zip(&bc) {
        let frac = BigRational::from_integer(row.starts_hit.into()) / &mden;
        let mean = BigRational::from_integer(row.total_hits.into()) / &mden;
        let (lo, hi) = enclosure_cols(e);
        let mid = if e.is_exact() && e.lo.denom() == &num_bigint::BigInt::from(1) { fmt_rat(&e.lo) } else { format!("{:.12}", e.midpoint_f64()) };
        writeln!(w, "{},{},{},{},{},{},{}", row.horizon, fmt_rat(&frac), fmt_rat(&mean), mid, row.ambiguous, lo, hi)?;
    }
    w.flush()?;
    Ok(())
}

fn enclosure_json(e: &Enclosure) -> Value {
    json!([fmt_rat(&round_rel(&e.lo, 96, false)), fmt_rat(&round_rel(&e.hi, 96, true))])
}

fn dimension(alpha: PathBuf, theta: &str, beta: &str, levels: Option<usize>, step: &str, out: Option<PathBuf>) -> Result<()> {
    let theta_v = parse_rat(theta)?;
    let beta_v = parse_rat(beta)?;
    let step_v = parse_rat(step)?;
    let pair = load(&alpha)?;
    let levels = levels.unwrap_or(pair.depth().saturating_sub(1));
    let schedule = BlockSchedule::build(&pair, &theta_v, &beta_v, levels)?;
    let bound = certify_dimension_bound(&schedule, &step_v)?;
    let config = json!({ "alpha_file": alpha.file_name().map(|f| f.to_string_lossy().into_owned()), "theta": fmt_rat(&theta_v), "beta": fmt_rat(&beta_v), "levels": levels, "s_grid": fmt_rat(&step_v) });
    let sched: Vec<Value> = schedule
        .levels
        .iter()
        .map(|l| {
            json!({
                "level": l.level,
                "Q_2n": l.q_even.to_string(),
                "P_2n": l.p_even.to_string(),
                "Q_2n+1": l.q_odd.to_string(),
                "P_2n+1": l.p_odd.to_string(),
                "Q_2n+2": l.q_next.to_string(),
            })
        })
        .collect();
    let regimes: Vec<Value> = bound
        .regimes
        .iter()
        .map(|rb| {
            let reports: Vec<Value> = rb
                .reports
                .iter()
                .map(|r| {
                    let mut costs = Map::new();
                    for (s, e) in &r.costs {
                        costs.insert(fmt_rat(s), enclosure_json(e));
                    }
                    json!({
                        "level": r.level,
                        "ball_count": r.ball_count.to_string(),
                        "radius": format!("{}^(-1/3)", r.radius_base),
                        "containment_certificate": r.containment,
                        "costs": costs,
                    })
                })
                .collect();
            json!({
                "regime": rb.regime.to_string(),
                "s": rb.s.as_ref().map(fmt_rat),
                "tail_exponent": rb.tail_exponent.as_ref().map(fmt_rat),
                "status": if rb.s.is_some() { "certified" } else { "no certificate on grid" },
                "levels": reports,
            })
        })
        .collect();
    let doc = json!({
        "meta": meta("dimension", config, Some(pair.depth()), None),
        "schedule": sched,
        "regimes": regimes,
        "overall_bound": bound.overall.as_ref().map(fmt_rat),
        "product_bound": bound.product.as_ref().map(fmt_rat),
    });
    let mut w = io::open_out(out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes() {
        assert_eq!(parse_mode("auto").unwrap(), None);
        assert_eq!(parse_mode("exact").unwrap(), Some(DiscrepancyMode::Exact));
        assert_eq!(parse_mode("grid:64").unwrap(), Some(DiscrepancyMode::Grid(64)));
        assert!(matches!(parse_mode("grid:x"), Err(Error::Parse { .. })));
        assert!(parse_mode("fast").is_err());
    }

    #[test]
    fn decimals() {
        let r = BigRational::new(1.into(), 3.into());
        assert_eq!(decimal(&r, 4, false), "0.3333");
        assert_eq!(decimal(&r, 4, true), "0.3334");
        assert_eq!(decimal(&BigRational::from_integer(12.into()), 2, false), "12.00");
    }

    #[test]
    fn parses_cli() {
        let c = Cli::try_parse_from(["skewlab", "--threads", "2", "mixing-scan", "--alpha", "a.json", "--max-gen", "2", "--n-list", "4,8"]).unwrap();
        assert_eq!(c.threads, Some(2));
        assert!(matches!(c.command, Command::MixingScan { max_gen: 2, .. }));
        assert!(Cli::try_parse_from(["skewlab", "discrepancy", "--bogus"]).is_err());
    }
}
