//! Shrinking targets B(y, n^{−δ}): Borel–Cantelli sums, hit sequences and
//! ensemble hit fractions, for the skew product and a coordinatewise
//! doubling baseline.

use crate::error::{Error, Result};
use crate::rigorous::{le_neg_power, pow2, pow_bounds, ratio_u, to_f64, Enclosure};
use crate::skewprod::{BitStream, SkewSystem};
use crate::torus::TorusPoint3;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct TargetSpec {
    pub center: TorusPoint3,
    pub delta: BigRational,
    pub horizon: u64,
    pub start_index: u64,
}

pub const DEFAULT_START_INDEX: u64 = 1000;

pub fn default_center() -> TorusPoint3 {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    TorusPoint3::new([r(1, 3), r(2, 5), r(3, 7)])
}

impl TargetSpec {
    pub fn new(center: TorusPoint3, delta: BigRational, horizon: u64, start_index: u64) -> Result<Self> {
        if !delta.is_positive() {
            return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
        }
        if start_index == 0 {
            return Err(Error::InvalidParameter("N0 must be at least 1".into()));
        }
        delta_parts(&delta)?;
        Ok(TargetSpec { center, delta, horizon, start_index })
    }
}

fn delta_parts(delta: &BigRational) -> Result<(u32, u32)> {
    let a = delta.numer().to_u32().ok_or_else(|| Error::InvalidParameter("delta numerator too large".into()))?;
    let b = delta.denom().to_u32().ok_or_else(|| Error::InvalidParameter("delta denominator too large".into()))?;
    Ok((a, b))
}

/// min(1, (2·n^{−δ})³), exact when 3δ is an integer.
pub fn bc_term(delta: &BigRational, n: u64) -> Enclosure {
    let (a, b) = delta_parts(delta).expect("validated delta");
    let nn = BigUint::from(n);
    // clipped iff n^{3a} ≤ 8^b
    if nn.pow(3 * a) <= pow2(3 * b as u64) {
        return Enclosure::exact(BigRational::one());
    }
    let eight = BigRational::from_integer(8.into());
    let three_delta = delta * BigRational::from_integer(3.into());
    if three_delta.is_integer() {
        let k = three_delta.to_integer().to_u32().expect("small exponent");
        return Enclosure::exact(eight / BigRational::from_integer(BigInt::from(nn.pow(k))));
    }
    let (lo, hi) = pow_bounds(&BigRational::from_integer(n.into()), -(3 * a as i64), b, 64);
    Enclosure { lo: &eight * lo, hi: eight * hi }
}

fn exact_range_sum(k: u32, lo: u64, hi: u64) -> BigRational {
    if hi - lo <= 8 {
        return (lo..hi)
            .map(|n| BigRational::new(8.into(), BigInt::from(BigUint::from(n).pow(k))))
            .sum();
    }
    let mid = lo + (hi - lo) / 2;
    exact_range_sum(k, lo, mid) + exact_range_sum(k, mid, hi)
}

/// Σ_{n=1}^{N} min(1, (2·n^{−δ})³) at each requested N (sorted ascending).
pub fn bc_partial_sums(delta: &BigRational, checkpoints: &[u64]) -> Result<Vec<Enclosure>> {
    if !delta.is_positive() {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    delta_parts(delta)?;
    if checkpoints.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("checkpoints must be ascending".into()));
    }
    let three_delta = delta * BigRational::from_integer(3.into());
    let mut acc = Enclosure::exact(BigRational::zero());
    let mut next = 1u64;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &cp in checkpoints {
        if cp == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        // clipped prefix term by term, then the unclipped tail in bulk
        while next <= cp {
            let t = bc_term(delta, next);
            let clipped = t.lo == BigRational::one();
            acc = acc.add(&t);
            next += 1;
            if !clipped {
                break;
            }
        }
        if next <= cp {
            if three_delta.is_integer() {
                let k = three_delta.to_integer().to_u32().expect("small exponent");
                let s = exact_range_sum(k, next, cp + 1);
                acc = acc.add(&Enclosure::exact(s));
            } else {
                let part = (next..=cp)
                    .into_par_iter()
                    .map(|n| bc_term(delta, n))
                    .reduce(|| Enclosure::exact(BigRational::zero()), |x, y| x.add(&y));
                acc = acc.add(&part);
            }
            next = cp + 1;
        }
        out.push(acc.clone());
    }
    Ok(out)
}

pub fn bc_partial_sum(delta: &BigRational, n: u64) -> Result<Enclosure> {
    Ok(bc_partial_sums(delta, &[n])?.remove(0))
}

#[derive(Clone, Debug)]
pub enum TargetSystem {
    Skew(SkewSystem),
    /// (x, y, z) ↦ (2x, 2y, 2z).
    Baseline,
}

impl TargetSystem {
    pub fn name(&self) -> &'static str {
        match self {
            TargetSystem::Skew(_) => "skew",
            TargetSystem::Baseline => "baseline",
        }
    }
}

/// Initial state: bit sequences for the doubling coordinates and, for the
/// skew system, fiber coordinates t = (t₁, t₂)/2^128.
#[derive(Clone, Debug)]
pub struct Start {
    bits: Vec<BitStream>,
    t0: [u128; 2],
}

fn draw_u128(rng: &mut ChaCha8Rng) -> u128 {
    ((rng.next_u64() as u128) << 64) | rng.next_u64() as u128
}

impl Start {
    /// Start `index` of the ensemble with master `seed`: substreams 4·index + c.
    pub fn seeded(system: &TargetSystem, seed: u64, index: u64) -> Self {
        let base = index.wrapping_mul(4);
        match system {
            TargetSystem::Skew(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(base + 3);
                let t0 = [draw_u128(&mut rng), draw_u128(&mut rng)];
                Start { bits: vec![BitStream::seeded(seed, base)], t0 }
            }
            TargetSystem::Baseline => Start {
                bits: (0..3).map(|c| BitStream::seeded(seed, base + c)).collect(),
                t0: [0, 0],
            },
        }
    }

    pub fn skew(bits: BitStream, t0: [u128; 2]) -> Self {
        Start { bits: vec![bits], t0 }
    }

    pub fn baseline(bits: [BitStream; 3]) -> Self {
        Start { bits: bits.into(), t0: [0, 0] }
    }

    pub fn fiber(&self) -> [BigRational; 2] {
        let den = BigUint::one() << 128;
        self.t0.map(|t| ratio_u(&BigUint::from(t), &den))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HitReport {
    pub hits: Vec<u64>,
    /// Times whose membership could not be decided within the error budget.
    pub ambiguous: Vec<u64>,
    pub bc_partial_sum: Option<Enclosure>,
}

const BAND: f64 = 1e-12;
const EXACT_BITS: usize = 256;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Verdict {
    Hit,
    Miss,
    Ambiguous,
}

fn circ_f64(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Range of circle distance from y over [lo, lo + width], width < 1/2.
fn circ_range(lo: &BigRational, width: &BigRational, y: &BigRational) -> (BigRational, BigRational) {
    let s = crate::rigorous::frac(&(lo - y));
    let e = &s + width;
    let half = BigRational::new(1.into(), 2.into());
    let one = BigRational::one();
    let d = |v: &BigRational| {
        let f = crate::rigorous::frac(v);
        let g = &one - &f;
        if f < g {
            f
        } else {
            g
        }
    };
    let (ds, de) = (d(&s), d(&e));
    let dmin = if s.is_zero() || e >= one { BigRational::zero() } else if ds < de { ds.clone() } else { de.clone() };
    let dmax = if s <= half && half <= e { half } else if ds > de { ds } else { de };
    (dmin, dmax)
}

/// Per-run precomputation shared by every start.
struct Tracker {
    y: [f64; 3],
    center: TorusPoint3,
    a: u32,
    b: u32,
    alpha_fixed: [u128; 2],
    alpha_radius: BigRational,
    skew: bool,
}

impl Tracker {
    fn new(system: &TargetSystem, target: &TargetSpec) -> Result<Self> {
        let (a, b) = delta_parts(&target.delta)?;
        let c = &target.center;
        let y = [to_f64(c.coord(0)), to_f64(c.coord(1)), to_f64(c.coord(2))];
        let (alpha_fixed, alpha_radius, skew) = match system {
            TargetSystem::Skew(sys) => {
                let al = sys.alpha();
                let fx = |r: &BigRational| -> u128 {
                    let v: BigInt = (r.numer() << 128u32) / r.denom();
                    v.to_u128().unwrap_or(u128::MAX)
                };
                ([fx(&al.x), fx(&al.y)], al.radius.clone(), true)
            }
            TargetSystem::Baseline => ([0, 0], BigRational::zero(), false),
        };
        Ok(Tracker { y, center: c.clone(), a, b, alpha_fixed, alpha_radius, skew })
    }

    fn radius_f64(&self, n: u64) -> f64 {
        (n as f64).powf(-(self.a as f64) / self.b as f64)
    }

    /// Verdict for coordinates given by f64 screens; `exact` supplies the
    /// rigorous range for coordinate i when the screen is inconclusive.
    fn judge(&self, n: u64, r: f64, screen: [f64; 3], mut exact: impl FnMut(usize) -> (BigRational, BigRational)) -> Verdict {
        let mut unsure = [false; 3];
        for i in 0..3 {
            let d = circ_f64(screen[i], self.y[i]);
            if d > r + BAND {
                return Verdict::Miss;
            }
            unsure[i] = d >= r - BAND;
        }
        if !unsure.iter().any(|&u| u) {
            return Verdict::Hit;
        }
        let nn = BigUint::from(n);
        let mut verdict = Verdict::Hit;
        for i in (0..3).filter(|&i| unsure[i]) {
            let (dmin, dmax) = exact(i);
            if !le_neg_power(&dmin, &nn, self.a, self.b) {
                return Verdict::Miss;
            }
            if !le_neg_power(&dmax, &nn, self.a, self.b) {
                verdict = Verdict::Ambiguous;
            }
        }
        verdict
    }

    /// Walk n = 1..=last, calling `visit(n, verdict)` for n ≥ first.
    fn run(&self, start: &mut Start, first: u64, last: u64, mut visit: impl FnMut(u64, Verdict)) -> Result<()> {
        if last == 0 || first > last {
            return Ok(());
        }
        for s in &start.bits {
            if let Some(avail) = s.available() {
                let need = last as usize + 64;
                if avail < need {
                    return Err(Error::InsufficientEntropy { needed: need, available: avail });
                }
            }
        }
        let scale = 2f64.powi(-64);
        let scale128 = 2f64.powi(-128);
        let mut zeros: u64 = 0;
        let mut t = start.t0;
        for n in 1..=last {
            let pos = n as usize;
            if self.skew {
                // b_n = 0 fires the rotation on the step from time n−1 to n
                if !start.bits[0].bit(pos - 1)? {
                    zeros += 1;
                    t[0] = t[0].wrapping_add(self.alpha_fixed[0]);
                    t[1] = t[1].wrapping_add(self.alpha_fixed[1]);
                }
            }
            if n < first {
                continue;
            }
            let r = self.radius_f64(n);
            let screen = if self.skew {
                [start.bits[0].window64(pos) as f64 * scale, t[0] as f64 * scale128, t[1] as f64 * scale128]
            } else {
                [
                    start.bits[0].window64(pos) as f64 * scale,
                    start.bits[1].window64(pos) as f64 * scale,
                    start.bits[2].window64(pos) as f64 * scale,
                ]
            };
            let v = self.judge(n, r, screen, |i| self.exact_range(start, pos, i, t, zeros));
            visit(n, v);
        }
        Ok(())
    }

    fn exact_range(&self, start: &mut Start, pos: usize, i: usize, t: [u128; 2], zeros: u64) -> (BigRational, BigRational) {
        let y = self.center.coord(i);
        if i == 0 || !self.skew {
            let w = start.bits[i].window(pos, EXACT_BITS);
            let den = pow2(EXACT_BITS as u64);
            let lo = ratio_u(&w, &den);
            return circ_range(&lo, &ratio_u(&BigUint::one(), &den), y);
        }
        // t ∈ [T, T + z]/2^128 for the truncated α, widened by z·radius
        let den = BigUint::one() << 128;
        let z = BigRational::from_integer(zeros.into());
        let slack = &self.alpha_radius * &z;
        let lo = ratio_u(&BigUint::from(t[i - 1]), &den) - &slack;
        let width = &z / BigRational::from_integer(BigInt::from(den)) + &slack * BigRational::from_integer(2.into());
        circ_range(&lo, &width, y)
    }
}

/// All n ∈ [N₀, N] with ‖Sⁿ(start) − y‖∞ ≤ n^{−δ}.
pub fn hit_sequence(system: &TargetSystem, start: &Start, target: &TargetSpec) -> Result<HitReport> {
    let tracker = Tracker::new(system, target)?;
    let mut st = start.clone();
    let mut report = HitReport::default();
    tracker.run(&mut st, target.start_index, target.horizon, |n, v| match v {
        Verdict::Hit => report.hits.push(n),
        Verdict::Ambiguous => report.ambiguous.push(n),
        Verdict::Miss => {}
    })?;
    report.bc_partial_sum = Some(bc_partial_sum(&target.delta, target.horizon.max(1))?);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleRow {
    pub horizon: u64,
    pub starts_hit: u64,
    pub fraction: f64,
    pub total_hits: u64,
    pub mean_hits: f64,
    pub ambiguous: u64,
}

/// Fraction of `m` seeded starts with at least one hit in [N₀, h], per horizon h.
pub fn ensemble_fraction(system: &TargetSystem, m: u64, target: &TargetSpec, horizons: &[u64], seed: u64) -> Result<Vec<EnsembleRow>> {
    if m == 0 {
        return Err(Error::InvalidParameter("ensemble size must be at least 1".into()));
    }
    let mut hs = horizons.to_vec();
    hs.sort_unstable();
    hs.dedup();
    let tracker = Tracker::new(system, target)?;
    let last = hs.last().copied().unwrap_or(0);
    let per_start: Vec<Vec<(bool, u64, u64)>> = (0..m)
        .into_par_iter()
        .map(|idx| {
            let mut start = Start::seeded(system, seed, idx);
            let mut out = vec![(false, 0u64, 0u64); hs.len()];
            let mut any = false;
            let (mut hits, mut amb) = (0u64, 0u64);
            let mut k = hs.partition_point(|&h| h < target.start_index);
            tracker
                .run(&mut start, target.start_index, last, |n, v| {
                    match v {
                        Verdict::Hit => {
                            any = true;
                            hits += 1;
                        }
                        Verdict::Ambiguous => amb += 1,
                        Verdict::Miss => {}
                    }
                    while k < hs.len() && hs[k] == n {
                        out[k] = (any, hits, amb);
                        k += 1;
                    }
                })
                .expect("seeded streams are unbounded");
            out
        })
        .collect();
    let rows = hs
        .iter()
        .enumerate()
        .map(|(k, &h)| {
            let starts_hit = per_start.iter().filter(|v| v[k].0).count() as u64;
            let total_hits: u64 = per_start.iter().map(|v| v[k].1).sum();
            let ambiguous: u64 = per_start.iter().map(|v| v[k].2).sum();
            EnsembleRow {
                horizon: h,
                starts_hit,
                fraction: starts_hit as f64 / m as f64,
                total_hits,
                mean_hits: total_hits as f64 / m as f64,
                ambiguous,
            }
        })
        .collect();
    Ok(rows)
}
