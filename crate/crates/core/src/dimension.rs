//! Covering bounds for the Hausdorff dimension of
//! {y : ‖kα − y‖∞ ≤ k^{−1/3} i.o.}: block schedules, line covers, s-costs
//! and tail certification, plus an empirical box-counting estimator.

use crate::cfrac::{AlphaPair, TruncatedAlpha};
use crate::error::{Error, Result};
use crate::rigorous::{ceil_pow_ratio, from_uint, le_neg_power, pow_bounds, root_ceil, Enclosure};
use crate::stats::ols_slope;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// k ∈ [Q_{2n}, P_{2n}], radius Q_{2n}^{−1/3}.
    EvenQ,
    /// k ∈ [P_{2n}+1, Q_{2n+1}], radius P_{2n}^{−1/3}.
    EvenP,
    /// k ∈ [Q_{2n+1}, P_{2n+1}], radius Q_{2n+1}^{−1/3}.
    OddQ,
    /// k ∈ [P_{2n+1}+1, Q_{2n+2}], radius P_{2n+1}^{−1/3}.
    OddP,
}

pub const REGIMES: [Regime; 4] = [Regime::EvenQ, Regime::EvenP, Regime::OddQ, Regime::OddP];

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::EvenQ => "even-Q",
            Regime::EvenP => "even-P",
            Regime::OddQ => "odd-Q",
            Regime::OddP => "odd-P",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelBlocks {
    pub level: usize,
    pub q_even: BigUint,
    pub p_even: BigUint,
    pub q_odd: BigUint,
    pub p_odd: BigUint,
    pub q_next: BigUint,
}

#[derive(Clone, Debug)]
pub struct BlockSchedule {
    pub theta: BigRational,
    pub beta: BigRational,
    pub levels: Vec<LevelBlocks>,
    alpha: AlphaPair,
}

fn ratio_parts(r: &BigRational, name: &str) -> Result<(u32, u32)> {
    let a = r.numer().to_u32().ok_or_else(|| Error::InvalidParameter(format!("{name} numerator too large")))?;
    let b = r.denom().to_u32().ok_or_else(|| Error::InvalidParameter(format!("{name} denominator too large")))?;
    Ok((a, b))
}

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

impl BlockSchedule {
    /// Requires 12/5 < θ < 46/15, 12/5 < β < 4 and depth ≥ max_level + 1.
    pub fn build(alpha: &AlphaPair, theta: &BigRational, beta: &BigRational, max_level: usize) -> Result<Self> {
        if !(*theta > r(12, 5) && *theta < r(46, 15)) {
            return Err(Error::InvalidParameter(format!("theta = {theta} outside (12/5, 46/15)")));
        }
        if !(*beta > r(12, 5) && *beta < r(4, 1)) {
            return Err(Error::InvalidParameter(format!("beta = {beta} outside (12/5, 4)")));
        }
        if max_level == 0 {
            return Err(Error::InvalidParameter("at least one level".into()));
        }
        if alpha.depth() < max_level + 1 {
            return Err(Error::InsufficientDepth { level: max_level, needed: max_level + 1, depth: alpha.depth() });
        }
        let (ta, tb) = ratio_parts(theta, "theta")?;
        let (ba, bb) = ratio_parts(beta, "beta")?;
        let q = |n: usize| alpha.cf1().q(n).expect("depth checked").clone();
        let qq = |n: usize| alpha.cf2().q(n).expect("depth checked").clone();
        let mut levels = Vec::with_capacity(max_level);
        for n in 1..=max_level {
            let q_even = q(n) * qq(n);
            let p_even = ceil_pow_ratio(&q_even, ta, tb);
            let q_odd = q(n + 1) * qq(n);
            let p_odd = ceil_pow_ratio(&q_odd, ba, bb);
            let q_next = q(n + 1) * qq(n + 1);
            let chain = [&q_even, &p_even, &q_odd, &p_odd, &q_next];
            let names = ["Q_2n", "P_2n", "Q_2n+1", "P_2n+1", "Q_2n+2"];
            for i in 0..4 {
                if chain[i] > chain[i + 1] {
                    return Err(Error::Interleaving { level: n, detail: format!("{} > {}", names[i], names[i + 1]) });
                }
            }
            levels.push(LevelBlocks { level: n, q_even, p_even, q_odd, p_odd, q_next });
        }
        Ok(BlockSchedule { theta: theta.clone(), beta: beta.clone(), levels, alpha: alpha.clone() })
    }

    pub fn alpha(&self) -> &AlphaPair {
        &self.alpha
    }

    pub fn max_level(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> Result<&LevelBlocks> {
        if n == 0 || n > self.levels.len() {
            return Err(Error::IndexOutOfRange(format!("level {n} of {}", self.levels.len())));
        }
        Ok(&self.levels[n - 1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineAxis {
    /// x = j/q.
    Vertical,
    /// y = j/q'.
    Horizontal,
}

/// The block, its ball radius K^{−1/3}, the approximating pair and the lines
/// carrying its orbit.
#[derive(Clone, Debug)]
pub struct RegimeGeometry {
    pub level: usize,
    pub regime: Regime,
    pub k_min: BigUint,
    pub k_max: BigUint,
    pub radius_base: BigUint,
    /// Convergent levels of the pair (x, y).
    pub pair_levels: (usize, usize),
    pub pair: [BigRational; 2],
    pub axis: LineAxis,
    /// Denominator of the line family; q + 1 lines.
    pub line_den: BigUint,
}

impl RegimeGeometry {
    pub fn line_count(&self) -> BigUint {
        &self.line_den + 1u32
    }

    /// ceil(K^{1/3}) + 1 balls per line.
    pub fn balls_per_line(&self) -> BigUint {
        root_ceil(&self.radius_base, 3) + 1u32
    }

    pub fn ball_count(&self) -> BigUint {
        self.line_count() * self.balls_per_line()
    }
}

pub fn geometry(schedule: &BlockSchedule, level: usize, regime: Regime) -> Result<RegimeGeometry> {
    let b = schedule.level(level)?;
    let n = level;
    let a = &schedule.alpha;
    let (k_min, k_max, radius_base, pl, axis) = match regime {
        Regime::EvenQ => (b.q_even.clone(), b.p_even.clone(), b.q_even.clone(), (n, n), LineAxis::Vertical),
        Regime::EvenP => (&b.p_even + 1u32, b.q_odd.clone(), b.p_even.clone(), (n + 1, n), LineAxis::Horizontal),
        Regime::OddQ => (b.q_odd.clone(), b.p_odd.clone(), b.q_odd.clone(), (n + 1, n), LineAxis::Horizontal),
        Regime::OddP => (&b.p_odd + 1u32, b.q_next.clone(), b.p_odd.clone(), (n + 1, n + 1), LineAxis::Vertical),
    };
    let c1 = a.cf1().convergent(pl.0)?;
    let c2 = a.cf2().convergent(pl.1)?;
    let line_den = match axis {
        LineAxis::Vertical => c1.q.clone(),
        LineAxis::Horizontal => c2.q.clone(),
    };
    Ok(RegimeGeometry {
        level,
        regime,
        k_min,
        k_max,
        radius_base,
        pair_levels: pl,
        pair: [c1.value(), c2.value()],
        axis,
        line_den,
    })
}

/// Decide k_max·err ≤ K^{−1/3}, i.e. (k_max·err)³·K ≤ 1.
pub fn ball_containment(k_max: &BigUint, err: &BigRational, radius_base: &BigUint) -> bool {
    le_neg_power(&(from_uint(k_max) * err), radius_base, 1, 3)
}

#[derive(Clone, Debug)]
pub struct ContainmentCertificate {
    pub level: usize,
    pub regime: Regime,
    pub holds: bool,
    /// Bound on ‖α − pair‖∞ including the truncation radius.
    pub approx_error: BigRational,
    pub k_max: BigUint,
    pub radius_base: BigUint,
}

/// Certify B(kα, K^{−1/3}) ⊂ B(k·pair, 2K^{−1/3}) for every k ≤ k_max.
pub fn containment_check(schedule: &BlockSchedule, level: usize, regime: Regime) -> Result<ContainmentCertificate> {
    let g = geometry(schedule, level, regime)?;
    let a = &schedule.alpha;
    let rad = a.radius();
    let c1 = (a.value1() - &g.pair[0]).abs();
    let c2 = (a.value2() - &g.pair[1]).abs();
    let central = if c1 >= c2 { c1 } else { c2 };
    let upper = &central + &rad;
    let holds = ball_containment(&g.k_max, &upper, &g.radius_base);
    if !holds {
        let lower = if central > rad { &central - &rad } else { BigRational::zero() };
        if ball_containment(&g.k_max, &lower, &g.radius_base) {
            return Err(Error::Indeterminate(format!("containment at level {level} ({regime})")));
        }
    }
    Ok(ContainmentCertificate { level, regime, holds, approx_error: upper, k_max: g.k_max, radius_base: g.radius_base })
}

/// Enclosure of Σ|B|^s = lines·(ceil(K^{1/3}) + 1)·(4K^{−1/3})^s.
pub fn cover_cost(schedule: &BlockSchedule, level: usize, regime: Regime, s: &BigRational) -> Result<Enclosure> {
    let cert = containment_check(schedule, level, regime)?;
    if !cert.holds {
        return Err(Error::MissingCertificate { level, regime: regime.to_string() });
    }
    let g = geometry(schedule, level, regime)?;
    Ok(cost_formula(&g.ball_count(), &g.radius_base, s))
}

fn cost_formula(count: &BigUint, radius_base: &BigUint, s: &BigRational) -> Enclosure {
    let (a, b) = ratio_parts(s, "s").expect("small grid exponent");
    // (4K^{−1/3})^s = (64/K)^{s/3}
    let base = BigRational::new(64.into(), BigInt::from(radius_base.clone()));
    let (lo, hi) = pow_bounds(&base, a as i64, 3 * b, 64);
    let c = from_uint(count);
    Enclosure { lo: &c * lo, hi: c * hi }
}

/// Sign-determining exponent of the level cost in q_n (must be < 0).
pub fn tail_exponent(regime: Regime, theta: &BigRational, beta: &BigRational, s: &BigRational) -> BigRational {
    let sm1 = s - BigRational::one();
    match regime {
        Regime::EvenQ | Regime::OddQ => BigRational::one() - r(5, 3) * sm1,
        Regime::EvenP => r(4, 1) - r(5, 3) * theta * sm1,
        Regime::OddP => BigRational::one() - r(5, 12) * beta * sm1,
    }
}

#[derive(Clone, Debug)]
pub struct CoverReport {
    pub level: usize,
    pub regime: Regime,
    pub ball_count: BigUint,
    pub radius_base: BigUint,
    pub containment: bool,
    pub costs: Vec<(BigRational, Enclosure)>,
}

#[derive(Clone, Debug)]
pub struct RegimeBound {
    pub regime: Regime,
    /// Smallest certified grid exponent, if any.
    pub s: Option<BigRational>,
    pub tail_exponent: Option<BigRational>,
    pub reports: Vec<CoverReport>,
}

#[derive(Clone, Debug)]
pub struct DimensionBound {
    pub grid: Vec<BigRational>,
    pub regimes: Vec<RegimeBound>,
    pub overall: Option<BigRational>,
    pub product: Option<BigRational>,
}

pub fn s_grid(step: &BigRational) -> Result<Vec<BigRational>> {
    if !step.is_positive() || *step >= BigRational::one() {
        return Err(Error::InvalidParameter(format!("s-grid step {step} outside (0, 1)")));
    }
    let mut out = Vec::new();
    let mut s = BigRational::one() + step;
    let two = r(2, 1);
    while s < two {
        out.push(s.clone());
        s += step;
    }
    Ok(out)
}

/// Smallest grid s per regime whose level costs are certified, whose
/// consecutive levels satisfy cost(l+1) ≤ cost(l)/2, and whose tail
/// exponent is negative.
pub fn certify_dimension_bound(schedule: &BlockSchedule, step: &BigRational) -> Result<DimensionBound> {
    if schedule.max_level() < 2 {
        return Err(Error::InvalidParameter("need at least two computed levels".into()));
    }
    let grid = s_grid(step)?;
    let cells: Vec<(Regime, usize)> = REGIMES
        .iter()
        .flat_map(|&rg| (1..=schedule.max_level()).map(move |l| (rg, l)))
        .collect();
    let reports: Vec<CoverReport> = cells
        .par_iter()
        .map(|&(regime, level)| -> Result<CoverReport> {
            let cert = containment_check(schedule, level, regime)?;
            let g = geometry(schedule, level, regime)?;
            let costs = if cert.holds {
                grid.iter().map(|s| (s.clone(), cost_formula(&g.ball_count(), &g.radius_base, s))).collect()
            } else {
                Vec::new()
            };
            Ok(CoverReport { level, regime, ball_count: g.ball_count(), radius_base: g.radius_base, containment: cert.holds, costs })
        })
        .collect::<Result<_>>()?;
    let mut regimes = Vec::new();
    for regime in REGIMES {
        let reps: Vec<CoverReport> = reports.iter().filter(|r| r.regime == regime).cloned().collect();
        let mut chosen = None;
        if reps.iter().all(|r| r.containment) {
            for (j, s) in grid.iter().enumerate() {
                let tail = tail_exponent(regime, &schedule.theta, &schedule.beta, s);
                if !tail.is_negative() {
                    continue;
                }
                let ratio_ok = reps.windows(2).all(|w| {
                    let half = &w[0].costs[j].1.lo / r(2, 1);
                    w[1].costs[j].1.hi <= half
                });
                if ratio_ok {
                    chosen = Some((s.clone(), tail));
                    break;
                }
            }
        }
        regimes.push(RegimeBound {
            regime,
            s: chosen.as_ref().map(|c| c.0.clone()),
            tail_exponent: chosen.map(|c| c.1),
            reports: reps,
        });
    }
    let overall = if regimes.iter().all(|r| r.s.is_some()) {
        regimes.iter().filter_map(|r| r.s.clone()).max()
    } else {
        None
    };
    let product = overall.as_ref().map(|o| o + BigRational::one());
    Ok(DimensionBound { grid, regimes, overall, product })
}

/// Explicit ball centers of the level cover (line j, ball i), if at most
/// `limit` balls.
pub fn enumerate_cover(schedule: &BlockSchedule, level: usize, regime: Regime, limit: u64) -> Result<Option<Vec<[BigRational; 2]>>> {
    let g = geometry(schedule, level, regime)?;
    let total = g.ball_count();
    if total > BigUint::from(limit) {
        return Ok(None);
    }
    let lines = g.line_count().to_u64().expect("bounded by limit");
    let per = g.balls_per_line().to_u64().expect("bounded by limit");
    let den = BigInt::from(g.line_den.clone());
    let mut out = Vec::with_capacity((lines * per) as usize);
    for j in 0..lines {
        let across = BigRational::new(BigInt::from(j), den.clone());
        for i in 0..per {
            let along = BigRational::new(BigInt::from(i), BigInt::from(per - 1));
            out.push(match g.axis {
                LineAxis::Vertical => [across.clone(), along],
                LineAxis::Horizontal => [along, across.clone()],
            });
        }
    }
    Ok(Some(out))
}

/// Level-1 sample test: corners of B(kα, K^{−1/3}) for sampled k lie in a
/// 2K^{−1/3}-tube around some line of the family.
pub fn containment_sample_check(schedule: &BlockSchedule, regime: Regime, samples: u64) -> Result<bool> {
    let g = geometry(schedule, 1, regime)?;
    let a = &schedule.alpha;
    let alpha = [a.value1(), a.value2()];
    let (rho_lo, _) = pow_bounds(&from_uint(&g.radius_base), -1, 3, 64);
    let (_, rho_hi) = pow_bounds(&from_uint(&g.radius_base), -1, 3, 64);
    let tube = &rho_lo * r(2, 1);
    let span = &g.k_max - &g.k_min;
    let den = BigInt::from(g.line_den.clone());
    let axis_idx = match g.axis {
        LineAxis::Vertical => 0,
        LineAxis::Horizontal => 1,
    };
    for i in 0..=samples {
        let k = &g.k_min + &span * i / samples.max(1);
        let kk = BigRational::from_integer(BigInt::from(k));
        let c = crate::rigorous::frac(&(&kk * &alpha[axis_idx]));
        for sign in [-1i64, 1] {
            let p = &c + &rho_hi * r(sign, 1);
            // nearest line j/den
            let scaled = &p * BigRational::from_integer(den.clone());
            let j = scaled.round();
            let d = (&p - j / BigRational::from_integer(den.clone())).abs();
            if d > tube {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct BoxCount {
    /// (ε exponent e with ε = 2^{−e}, boxes meeting E).
    pub counts: Vec<(u32, u64)>,
    pub slope: f64,
}

/// Least-squares slope of log N(ε) against log(1/ε) for
/// E = ⋃_{k_min ≤ k ≤ k_max} B(kα, k^{−1/3}). Descriptive only.
pub fn box_counting_estimate(alpha: &TruncatedAlpha, k_min: u64, k_max: u64, eps_exponents: &[u32]) -> Result<BoxCount> {
    if eps_exponents.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} epsilons", eps_exponents.len())));
    }
    if eps_exponents.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("epsilons must be decreasing".into()));
    }
    if k_min == 0 || k_max < k_min {
        return Err(Error::InvalidParameter("need 1 <= k_min <= k_max".into()));
    }
    if *eps_exponents.last().expect("nonempty") > 13 {
        return Err(Error::InvalidParameter("epsilon below 2^-13".into()));
    }
    let fx = |r: &BigRational| -> u128 {
        let v: BigInt = (r.numer() << 128u32) / r.denom();
        v.to_u128().unwrap_or(u128::MAX)
    };
    let step = [fx(&alpha.x), fx(&alpha.y)];
    let balls: Vec<(f64, f64, f64)> = (k_min..=k_max)
        .map(|k| {
            let c = [step[0].wrapping_mul(k as u128), step[1].wrapping_mul(k as u128)];
            let s = 2f64.powi(-128);
            (c[0] as f64 * s, c[1] as f64 * s, (k as f64).powf(-1.0 / 3.0))
        })
        .collect();
    let counts: Vec<(u32, u64)> = eps_exponents
        .par_iter()
        .map(|&e| (e, count_boxes(&balls, e)))
        .collect();
    let pts: Vec<(f64, f64)> = counts.iter().map(|&(e, c)| (e as f64 * 2f64.ln(), (c.max(1) as f64).ln())).collect();
    Ok(BoxCount { slope: ols_slope(&pts)?, counts })
}

fn count_boxes(balls: &[(f64, f64, f64)], e: u32) -> u64 {
    let m = 1usize << e;
    let words = m.div_ceil(64);
    let mut grid = vec![0u64; m * words];
    let mf = m as f64;
    let span = |c: f64, r: f64| -> Vec<(usize, usize)> {
        if 2.0 * r >= 1.0 {
            return vec![(0, m - 1)];
        }
        let lo = ((c - r) * mf).floor() as i64;
        let hi = ((c + r) * mf).floor() as i64;
        if hi - lo + 1 >= m as i64 {
            return vec![(0, m - 1)];
        }
        let lo_w = lo.rem_euclid(m as i64) as usize;
        let hi_w = hi.rem_euclid(m as i64) as usize;
        if lo_w <= hi_w {
            vec![(lo_w, hi_w)]
        } else {
            vec![(lo_w, m - 1), (0, hi_w)]
        }
    };
    for &(x, y, rad) in balls {
        let xs = span(x, rad);
        for (y0, y1) in span(y, rad) {
            for row in y0..=y1 {
                let base = row * words;
                for &(x0, x1) in &xs {
                    set_range(&mut grid[base..base + words], x0, x1);
                }
            }
        }
    }
    grid.iter().map(|w| w.count_ones() as u64).sum()
}

fn set_range(row: &mut [u64], lo: usize, hi: usize) {
    let (wl, wh) = (lo / 64, hi / 64);
    let mask_from = |b: usize| u64::MAX << b;
    let mask_to = |b: usize| if b == 63 { u64::MAX } else { (1u64 << (b + 1)) - 1 };
    if wl == wh {
        row[wl] |= mask_from(lo % 64) & mask_to(hi % 64);
        return;
    }
    row[wl] |= mask_from(lo % 64);
    for w in &mut row[wl + 1..wh] {
        *w = u64::MAX;
    }
    row[wh] |= mask_to(hi % 64);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::synthesize_alpha_pair;
    use num_bigint::BigUint;

    fn pair(depth: usize) -> AlphaPair {
        synthesize_alpha_pair(depth, None).unwrap()
    }

    #[test]
    fn rejects_closed_endpoints() {
        let a = pair(2);
        assert!(BlockSchedule::build(&a, &r(12, 5), &r(3, 1), 1).is_err());
        assert!(BlockSchedule::build(&a, &r(13, 5), &r(12, 5), 1).is_err());
        assert!(BlockSchedule::build(&a, &r(46, 15), &r(3, 1), 1).is_err());
        assert!(matches!(BlockSchedule::build(&a, &r(13, 5), &r(3, 1), 2), Err(Error::InsufficientDepth { .. })));
    }

    #[test]
    fn seed_two_blocks() {
        let a = synthesize_alpha_pair(2, Some(BigUint::from(2u32))).unwrap();
        let s = BlockSchedule::build(&a, &r(13, 5), &r(3, 1), 1).unwrap();
        let l = s.level(1).unwrap();
        assert_eq!(l.q_even, BigUint::from(32u32));
        // ceil(32^{13/5}) = ceil(2^13) since 32^{1/5} = 2
        assert_eq!(l.p_even, BigUint::from(8192u32));
        assert!(l.p_even <= l.q_odd);
        assert_eq!(l.q_odd, a.cf1().q(2).unwrap() * 16u32);
    }

    #[test]
    fn default_seed_blocks() {
        let s = BlockSchedule::build(&pair(2), &r(13, 5), &r(3, 1), 1).unwrap();
        let l = s.level(1).unwrap();
        assert_eq!(l.q_even, BigUint::from(243u32));
        assert_eq!(l.p_even, BigUint::from(3u32).pow(13));
        assert_eq!(l.q_odd, BigUint::from(43046722u64 * 81));
        assert_eq!(l.p_odd, l.q_odd.pow(3));
    }

    #[test]
    fn level_one_containment() {
        let s = BlockSchedule::build(&pair(2), &r(13, 5), &r(3, 1), 1).unwrap();
        for rg in REGIMES {
            assert!(containment_check(&s, 1, rg).unwrap().holds, "{rg}");
        }
        assert!(containment_check(&s, 2, Regime::EvenQ).is_err());
    }

    #[test]
    fn containment_direction() {
        let big = BigUint::from(1000u32);
        assert!(!ball_containment(&big, &r(1, 100), &BigUint::from(8u32)));
        assert!(ball_containment(&big, &r(1, 4000), &BigUint::from(8u32)));
        // equality: 1000·(1/2000) = 1/2 = 8^{−1/3}
        assert!(ball_containment(&big, &r(1, 2000), &BigUint::from(8u32)));
    }

    #[test]
    fn cost_monotone_and_enumeration() {
        let s = BlockSchedule::build(&pair(2), &r(13, 5), &r(3, 1), 1).unwrap();
        let c_mid = cover_cost(&s, 1, Regime::EvenQ, &r(3, 2)).unwrap();
        let c_hi = cover_cost(&s, 1, Regime::EvenQ, &r(63, 32)).unwrap();
        assert!(c_hi.hi < c_mid.lo);
        let balls = enumerate_cover(&s, 1, Regime::EvenQ, 1_000_000).unwrap().unwrap();
        // 4 lines x = j/3, ceil(243^{1/3}) + 1 = 8 balls each
        assert_eq!(balls.len(), 32);
        let g = geometry(&s, 1, Regime::EvenQ).unwrap();
        assert_eq!(cost_formula(&BigUint::from(balls.len()), &g.radius_base, &r(3, 2)), c_mid);
    }

    #[test]
    fn whole_torus_cost() {
        // K = 1: one line, two balls of diameter 4
        let c = cost_formula(&BigUint::from(2u32), &BigUint::one(), &r(3, 2));
        assert!(c.lo >= BigRational::one());
    }

    #[test]
    fn tail_signs() {
        let th = r(13, 5);
        let be = r(3, 1);
        assert!(!tail_exponent(Regime::EvenQ, &th, &be, &r(14, 13)).is_negative());
        // sound even-Q exponent needs s > 8/5
        assert!(!tail_exponent(Regime::EvenQ, &th, &be, &r(3, 2)).is_negative());
        assert!(tail_exponent(Regime::EvenQ, &th, &be, &r(33, 20)).is_negative());
        assert!(!tail_exponent(Regime::EvenP, &th, &be, &r(25, 13)).is_negative());
        assert!(tail_exponent(Regime::EvenP, &th, &be, &(r(25, 13) + r(1, 1000))).is_negative());
    }

    #[test]
    fn sample_containment() {
        let s = BlockSchedule::build(&pair(2), &r(13, 5), &r(3, 1), 1).unwrap();
        for rg in REGIMES {
            assert!(containment_sample_check(&s, rg, 64).unwrap(), "{rg}");
        }
    }

    #[test]
    fn box_counting_full_and_ball() {
        let a = pair(2).truncated();
        let full = box_counting_estimate(&a, 1, 1, &[4, 5, 6, 7]).unwrap();
        assert!((full.slope - 2.0).abs() < 0.05);
        let ball = box_counting_estimate(&a, 1000, 1000, &[7, 8, 9, 10]).unwrap();
        assert!((ball.slope - 2.0).abs() < 0.1, "{}", ball.slope);
        assert!(matches!(box_counting_estimate(&a, 1, 5, &[4, 5]), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn grid_points() {
        let g = s_grid(&r(1, 4)).unwrap();
        assert_eq!(g, vec![r(5, 4), r(3, 2), r(7, 4)]);
    }
}
