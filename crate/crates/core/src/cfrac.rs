//! Continued fractions, the synchronised α = (α₁, α₂) pair and a
//! Diophantine linear-type probe.

use crate::error::{Error, Result};
use crate::rigorous::{from_uint, ln_f64, ratio_u};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigUint,
    pub q: BigUint,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        ratio_u(&self.p, &self.q)
    }
}

/// Finite continued fraction with its convergents.
///
/// Two layouts are supported. [`ContinuedFraction::from_quotients`] reads
/// `(a₁, …, a_m)` as θ = [0; a₁, …, a_m] with levels `1..=m` and seeds
/// (p₀, q₀) = (0, 1), (p₋₁, q₋₁) = (1, 0). [`ContinuedFraction::regular`]
/// reads `(a₀, …, a_{m-1})` as [a₀; a₁, …] with levels `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    quotients: Vec<BigUint>,
    convergents: Vec<Convergent>,
    first_level: usize,
}

/// Convergents of θ = [0; a₁, …, a_m].
pub fn convergents(quotients: &[BigUint]) -> Result<ContinuedFraction> {
    ContinuedFraction::from_quotients(quotients.to_vec())
}

impl ContinuedFraction {
    pub fn from_quotients(quotients: Vec<BigUint>) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::NoQuotients);
        }
        if let Some(i) = quotients.iter().position(|a| a.is_zero()) {
            return Err(Error::InvalidQuotient(i + 1));
        }
        let mut cf = ContinuedFraction { quotients: Vec::new(), convergents: Vec::new(), first_level: 1 };
        for a in quotients {
            cf.push(a);
        }
        Ok(cf)
    }

    /// Regular form [a₀; a₁, …]; a₀ may be zero, the rest must be positive.
    pub fn regular(quotients: Vec<BigUint>) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::NoQuotients);
        }
        if let Some(i) = quotients.iter().skip(1).position(|a| a.is_zero()) {
            return Err(Error::InvalidQuotient(i + 1));
        }
        let mut cf = ContinuedFraction { quotients: Vec::new(), convergents: Vec::new(), first_level: 0 };
        for a in quotients {
            cf.push(a);
        }
        Ok(cf)
    }

    fn seeds(&self) -> (Convergent, Convergent) {
        let (older, old) = if self.first_level == 1 {
            ((1u32, 0u32), (0u32, 1u32))
        } else {
            ((0, 1), (1, 0))
        };
        (
            Convergent { p: older.0.into(), q: older.1.into() },
            Convergent { p: old.0.into(), q: old.1.into() },
        )
    }

    pub(crate) fn push(&mut self, a: BigUint) {
        let (s2, s1) = self.seeds();
        let len = self.convergents.len();
        let prev1 = if len >= 1 { &self.convergents[len - 1] } else { &s1 };
        let prev2 = if len >= 2 {
            &self.convergents[len - 2]
        } else if len == 1 {
            &s1
        } else {
            &s2
        };
        let next = Convergent { p: &a * &prev1.p + &prev2.p, q: &a * &prev1.q + &prev2.q };
        self.quotients.push(a);
        self.convergents.push(next);
    }

    pub fn quotients(&self) -> &[BigUint] {
        &self.quotients
    }

    pub fn convergent_list(&self) -> &[Convergent] {
        &self.convergents
    }

    pub fn first_level(&self) -> usize {
        self.first_level
    }

    /// Index of the deepest level.
    pub fn depth(&self) -> usize {
        self.first_level + self.convergents.len() - 1
    }

    pub fn is_regular(&self) -> bool {
        self.first_level == 0
    }

    pub fn convergent(&self, n: usize) -> Result<&Convergent> {
        if n < self.first_level || n > self.depth() {
            return Err(Error::InsufficientDepth { level: n, needed: n, depth: self.depth() });
        }
        Ok(&self.convergents[n - self.first_level])
    }

    pub fn p(&self, n: usize) -> Result<&BigUint> {
        Ok(&self.convergent(n)?.p)
    }

    pub fn q(&self, n: usize) -> Result<&BigUint> {
        Ok(&self.convergent(n)?.q)
    }

    /// Deepest convergent as a rational.
    pub fn value(&self) -> BigRational {
        self.convergents.last().expect("nonempty").value()
    }

    /// `(|θ_m − p_n/q_n|, 1/(q_n q_{n+1}))` with θ_m the deepest convergent.
    pub fn approximation_gap(&self, n: usize) -> Result<(BigRational, BigRational)> {
        if n + 1 > self.depth() || n < self.first_level {
            return Err(Error::InsufficientDepth { level: n, needed: n + 1, depth: self.depth() });
        }
        let c = self.convergent(n)?;
        let next = self.convergent(n + 1)?;
        let gap = (self.value() - c.value()).abs();
        let bound = BigRational::new(BigInt::one(), BigInt::from(&c.q * &next.q));
        Ok((gap, bound))
    }
}

/// α represented by an exact rational point plus a radius bounding the
/// sup-norm distance to the true α.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedAlpha {
    pub x: BigRational,
    pub y: BigRational,
    pub radius: BigRational,
    pub level: Option<usize>,
}

impl TruncatedAlpha {
    /// A rational rotation taken at face value (radius 0).
    pub fn exact(x: BigRational, y: BigRational) -> Self {
        TruncatedAlpha {
            x: crate::rigorous::frac(&x),
            y: crate::rigorous::frac(&y),
            radius: BigRational::zero(),
            level: None,
        }
    }

    pub fn coords(&self) -> [&BigRational; 2] {
        [&self.x, &self.y]
    }

    /// Numerators and denominators `[(p, q), (p', q')]` of the reduced coordinates.
    pub fn fractions(&self) -> [(BigUint, BigUint); 2] {
        let f = |r: &BigRational| (r.numer().magnitude().clone(), r.denom().magnitude().clone());
        [f(&self.x), f(&self.y)]
    }
}

/// The pair (α₁, α₂) with synchronised windows
/// q_n⁴ ≤ q'_n ≤ 4q_n⁴ and q'⁴_{n−1} ≤ q_n ≤ 4q'⁴_{n−1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaPair {
    cf1: ContinuedFraction,
    cf2: ContinuedFraction,
}

impl AlphaPair {
    pub fn new(cf1: ContinuedFraction, cf2: ContinuedFraction) -> Result<Self> {
        if cf1.is_regular() || cf2.is_regular() {
            return Err(Error::InvalidParameter("alpha pair needs [0; a1, ...] continued fractions".into()));
        }
        if cf1.depth() != cf2.depth() {
            return Err(Error::InvalidParameter(format!(
                "unsynchronised depths {} and {}",
                cf1.depth(),
                cf2.depth()
            )));
        }
        check_windows(cf1.quotients(), cf2.quotients())?;
        Ok(AlphaPair { cf1, cf2 })
    }

    pub fn from_quotients(q1: Vec<BigUint>, q2: Vec<BigUint>) -> Result<Self> {
        AlphaPair::new(ContinuedFraction::from_quotients(q1)?, ContinuedFraction::from_quotients(q2)?)
    }

    pub fn depth(&self) -> usize {
        self.cf1.depth()
    }

    pub fn cf1(&self) -> &ContinuedFraction {
        &self.cf1
    }

    pub fn cf2(&self) -> &ContinuedFraction {
        &self.cf2
    }

    pub fn value1(&self) -> BigRational {
        self.cf1.value()
    }

    pub fn value2(&self) -> BigRational {
        self.cf2.value()
    }

    /// Bound on ‖α − (value1, value2)‖∞ valid for every continuation that
    /// keeps the window constraints: 1/(q_m q'_m⁴).
    pub fn radius(&self) -> BigRational {
        let m = self.depth();
        let q = self.cf1.q(m).expect("depth");
        let qq = self.cf2.q(m).expect("depth");
        BigRational::new(BigInt::one(), BigInt::from(q * qq.pow(4)))
    }

    /// Bound on ‖α − (p_n/q_n, p'_n/q'_n)‖∞.
    pub fn approx_error(&self, n: usize) -> Result<BigRational> {
        let c1 = self.cf1.convergent(n)?;
        let c2 = self.cf2.convergent(n)?;
        let r = self.radius();
        let e1 = (self.value1() - c1.value()).abs() + &r;
        let e2 = (self.value2() - c2.value()).abs() + &r;
        Ok(if e1 >= e2 { e1 } else { e2 })
    }

    pub fn truncated(&self) -> TruncatedAlpha {
        self.truncated_at(self.depth()).expect("depth is valid")
    }

    pub fn truncated_at(&self, n: usize) -> Result<TruncatedAlpha> {
        Ok(TruncatedAlpha {
            x: self.cf1.convergent(n)?.value(),
            y: self.cf2.convergent(n)?.value(),
            radius: self.approx_error(n)?,
            level: Some(n),
        })
    }
}

fn q_sequence(quotients: &[BigUint]) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(quotients.len());
    let mut older = BigUint::zero();
    let mut old = BigUint::one();
    for a in quotients {
        let next = a * &old + &older;
        older = std::mem::replace(&mut old, next.clone());
        out.push(next);
    }
    out
}

/// Independent window checker: rebuilds both q-sequences from the quotients
/// alone and verifies q_n⁴ ≤ q'_n ≤ 4q_n⁴ (n ≥ 1) and
/// q'⁴_{n−1} ≤ q_n ≤ 4q'⁴_{n−1} (n ≥ 2).
pub fn check_windows(quotients1: &[BigUint], quotients2: &[BigUint]) -> Result<()> {
    if quotients1.len() != quotients2.len() {
        return Err(Error::InvalidParameter("quotient lists differ in length".into()));
    }
    let q = q_sequence(quotients1);
    let qq = q_sequence(quotients2);
    for n in 1..=q.len() {
        let (qn, qqn) = (&q[n - 1], &qq[n - 1]);
        let lo = qn.pow(4);
        if qqn < &lo || qqn > &(&lo * 4u32) {
            return Err(Error::WindowViolation { level: n, detail: "q_n^4 <= q'_n <= 4 q_n^4".into() });
        }
        if n >= 2 {
            let lo = qq[n - 2].pow(4);
            if qn < &lo || qn > &(&lo * 4u32) {
                return Err(Error::WindowViolation {
                    level: n,
                    detail: "q'_{n-1}^4 <= q_n <= 4 q'_{n-1}^4".into(),
                });
            }
        }
    }
    Ok(())
}

/// Verifies q_n¹⁶ ≤ q_{n+1} ≤ 16·q_n¹⁶ for both sequences at every computed level.
pub fn check_growth(quotients1: &[BigUint], quotients2: &[BigUint]) -> Result<()> {
    for (which, qs) in [("q", q_sequence(quotients1)), ("q'", q_sequence(quotients2))] {
        for n in 1..qs.len() {
            let lo = qs[n - 1].pow(16);
            if qs[n] < lo || qs[n] > &lo * 16u32 {
                return Err(Error::WindowViolation {
                    level: n,
                    detail: format!("{which}_n^16 <= {which}_(n+1) <= 16 {which}_n^16"),
                });
            }
        }
    }
    Ok(())
}

pub const DEFAULT_SEED_A1: u32 = 3;

fn greedy_quotient(lower: &BigUint, older: &BigUint, old: &BigUint) -> BigUint {
    if lower <= older {
        return BigUint::one();
    }
    let a = (lower - older).div_ceil(old);
    if a.is_zero() {
        BigUint::one()
    } else {
        a
    }
}

/// Greedy synthesis: a_n = ceil((L − q_{n−2})/q_{n−1}) with L the lower end of
/// the current window, alternating between the two sides.
pub fn synthesize_alpha_pair(target_depth: usize, seed_a1: Option<BigUint>) -> Result<AlphaPair> {
    if target_depth == 0 {
        return Err(Error::InvalidParameter("target depth must be at least 1".into()));
    }
    let a1 = seed_a1.unwrap_or_else(|| BigUint::from(DEFAULT_SEED_A1));
    if a1.is_zero() {
        return Err(Error::InvalidQuotient(1));
    }
    let mut cf1 = ContinuedFraction::from_quotients(vec![a1])?;
    let mut cf2: Option<ContinuedFraction> = None;
    let zero = BigUint::zero();
    let one = BigUint::one();
    for n in 1..=target_depth {
        if n >= 2 {
            let qq_prev = cf2.as_ref().expect("level n-1 built").q(n - 1)?;
            let lower = qq_prev.pow(4);
            let upper = &lower * 4u32;
            let old = cf1.q(n - 1)?.clone();
            let older = if n >= 3 { cf1.q(n - 2)?.clone() } else { one.clone() };
            let a = greedy_quotient(&lower, &older, &old);
            cf1.push(a);
            let qn = cf1.q(n)?;
            if qn < &lower || qn > &upper {
                return Err(Error::SynthesisInfeasible(n));
            }
        }
        let qn = cf1.q(n)?.clone();
        let lower = qn.pow(4);
        let upper = &lower * 4u32;
        let (old, older) = match &cf2 {
            None => (one.clone(), zero.clone()),
            Some(c) => {
                let old = c.q(n - 1)?.clone();
                let older = if n >= 3 { c.q(n - 2)?.clone() } else { one.clone() };
                (old, older)
            }
        };
        let a = greedy_quotient(&lower, &older, &old);
        match &mut cf2 {
            None => cf2 = Some(ContinuedFraction::from_quotients(vec![a])?),
            Some(c) => c.push(a),
        }
        let qqn = cf2.as_ref().expect("just built").q(n)?;
        if qqn < &lower || qqn > &upper {
            return Err(Error::SynthesisInfeasible(n));
        }
    }
    AlphaPair::new(cf1, cf2.expect("depth >= 1"))
}

#[derive(Clone, Debug)]
pub struct LinearTypeRecord {
    pub k: (i64, i64),
    pub norm: u64,
    pub dist: BigRational,
    pub exponent: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct LinearTypeProbe {
    pub bound: u64,
    pub trial_gamma: f64,
    pub records: Vec<LinearTypeRecord>,
    /// First few k with d_ℤ(α·k) = 0 (at most [`DEGENERATE_LIST_CAP`]).
    pub degenerate: Vec<(i64, i64)>,
    pub degenerate_count: u64,
    pub max_exponent: Option<f64>,
    pub argmax: Option<(i64, i64)>,
}

pub const DEGENERATE_LIST_CAP: usize = 1000;

struct ExactDot {
    a: BigInt,
    b: BigInt,
    den: BigInt,
}

impl ExactDot {
    fn new(alpha: &TruncatedAlpha) -> Self {
        let [(p, q), (pp, qq)] = alpha.fractions();
        ExactDot {
            a: BigInt::from(&p * &qq),
            b: BigInt::from(&pp * &q),
            den: BigInt::from(&q * &qq),
        }
    }

    fn dist(&self, k: (i64, i64)) -> BigRational {
        let v = (&self.a * k.0 + &self.b * k.1).mod_floor(&self.den);
        let w = &self.den - &v;
        BigRational::new(if v <= w { v } else { w }, self.den.clone())
    }
}

fn to_fixed(x: &BigRational) -> u128 {
    let scaled: BigInt = (x.numer() << 128u32) / x.denom();
    scaled.to_u128().unwrap_or(u128::MAX)
}

/// Half-plane representatives of the shell ‖k‖∞ = r, in a fixed order.
fn shell(r: i64) -> impl Iterator<Item = (i64, i64)> {
    let right = (-r..=r).map(move |k2| (r, k2));
    let sides = (1..r).flat_map(move |k1| [(k1, -r), (k1, r)]);
    let top = std::iter::once((0, r));
    right.chain(sides).chain(top)
}

struct ShellResult {
    best: Option<(BigRational, (i64, i64))>,
    degenerate: Vec<(i64, i64)>,
    degenerate_count: u64,
}

/// Scan nonzero k with ‖k‖∞ ≤ K and record d_ℤ(α·k).
pub fn linear_type_scan(alpha: &TruncatedAlpha, bound: u64, trial_gamma: f64) -> Result<LinearTypeProbe> {
    if bound == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    if bound > (1 << 40) {
        return Err(Error::InvalidParameter("K too large".into()));
    }
    let guard = BigRational::from_integer(BigInt::from(2 * bound).pow(20));
    if &alpha.radius * guard >= BigRational::one() {
        return Err(Error::TruncationTooCoarse(bound));
    }
    let fx = to_fixed(&alpha.x);
    let fy = to_fixed(&alpha.y);
    let exact = ExactDot::new(alpha);
    let shells: Vec<ShellResult> = (1..=bound as i64)
        .into_par_iter()
        .map(|r| {
            let err = 2 * r as u128 + 2;
            let dist_of = |k: (i64, i64)| -> u128 {
                let v = (k.0 as i128 as u128)
                    .wrapping_mul(fx)
                    .wrapping_add((k.1 as i128 as u128).wrapping_mul(fy));
                v.min(v.wrapping_neg())
            };
            let mut min_fixed = u128::MAX;
            for k in shell(r) {
                min_fixed = min_fixed.min(dist_of(k));
            }
            let cutoff = min_fixed.saturating_add(2 * err);
            let mut best: Option<(BigRational, (i64, i64))> = None;
            let mut degenerate = Vec::new();
            let mut degenerate_count = 0u64;
            for k in shell(r) {
                if dist_of(k) > cutoff {
                    continue;
                }
                let d = exact.dist(k);
                if d.is_zero() {
                    degenerate_count += 1;
                    if degenerate.len() < DEGENERATE_LIST_CAP {
                        degenerate.push(k);
                    }
                    continue;
                }
                if best.as_ref().is_none_or(|(b, _)| d < *b) {
                    best = Some((d, k));
                }
            }
            ShellResult { best, degenerate, degenerate_count }
        })
        .collect();

    let mut records = Vec::new();
    let mut degenerate = Vec::new();
    let mut degenerate_count = 0;
    let mut running = f64::INFINITY;
    let mut max_exponent: Option<f64> = None;
    let mut argmax = None;
    for (i, s) in shells.into_iter().enumerate() {
        let r = i as u64 + 1;
        degenerate_count += s.degenerate_count;
        for k in s.degenerate {
            if degenerate.len() < DEGENERATE_LIST_CAP {
                degenerate.push(k);
            }
        }
        let Some((d, k)) = s.best else { continue };
        let ln_d = ln_f64(&d);
        let ln_r = (r as f64).ln();
        let exponent = if r >= 2 { Some(-ln_d / ln_r) } else { None };
        if let Some(e) = exponent {
            if max_exponent.is_none_or(|m| e > m) {
                max_exponent = Some(e);
                argmax = Some(k);
            }
        }
        let score = ln_d + trial_gamma * ln_r;
        if score < running {
            running = score;
            records.push(LinearTypeRecord { k, norm: r, dist: d, exponent });
        }
    }
    Ok(LinearTypeProbe {
        bound,
        trial_gamma,
        records,
        degenerate,
        degenerate_count,
        max_exponent,
        argmax,
    })
}

/// Exact d_ℤ(α·k) for a single k.
pub fn lattice_distance(alpha: &TruncatedAlpha, k: (i64, i64)) -> BigRational {
    ExactDot::new(alpha).dist(k)
}

pub fn as_rational(n: &BigUint) -> BigRational {
    from_uint(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigorous::rat;
    use proptest::prelude::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn fibonacci_denominators() {
        let cf = convergents(&big(&[1, 1, 1, 1, 1])).unwrap();
        let q: Vec<u64> = cf.convergent_list().iter().map(|c| c.q.to_u64().unwrap()).collect();
        assert_eq!(q, vec![1, 2, 3, 5, 8]);
        assert_eq!(cf.depth(), 5);
    }

    #[test]
    fn pi_convergents() {
        let cf = ContinuedFraction::regular(big(&[3, 7, 15, 1])).unwrap();
        let got: Vec<BigRational> = cf.convergent_list().iter().map(|c| c.value()).collect();
        assert_eq!(got, vec![rat(3, 1), rat(22, 7), rat(333, 106), rat(355, 113)]);
        // Oracle: pi to 30 digits.
        let pi = BigRational::new(
            "314159265358979323846264338327950".parse().unwrap(),
            "100000000000000000000000000000000".parse().unwrap(),
        );
        assert!((rat(355, 113) - pi).abs() < rat(3, 10_000_000));
    }

    #[test]
    fn single_quotient() {
        let cf = convergents(&big(&[2])).unwrap();
        assert_eq!(cf.convergent(1).unwrap().value(), rat(1, 2));
    }

    #[test]
    fn errors() {
        assert!(matches!(convergents(&[]), Err(Error::NoQuotients)));
        assert!(matches!(convergents(&big(&[1, 0, 2])), Err(Error::InvalidQuotient(2))));
    }

    #[test]
    fn gap_golden() {
        let cf = convergents(&big(&[1; 10])).unwrap();
        let (gap, bound) = cf.approximation_gap(3).unwrap();
        assert_eq!(bound, rat(1, 15));
        assert!(gap <= bound);
    }

    #[test]
    fn gap_pi() {
        let cf = ContinuedFraction::regular(big(&[3, 7, 15, 1])).unwrap();
        let (gap, bound) = cf.approximation_gap(1).unwrap();
        assert_eq!(bound, rat(1, 742));
        assert!(gap <= bound);
    }

    #[test]
    fn gap_at_depth_errors() {
        let cf = convergents(&big(&[1; 10])).unwrap();
        assert!(matches!(cf.approximation_gap(10), Err(Error::InsufficientDepth { .. })));
    }

    #[test]
    fn depth_one_seed_two() {
        let pair = synthesize_alpha_pair(1, Some(BigUint::from(2u32))).unwrap();
        assert_eq!(pair.cf2().q(1).unwrap(), &BigUint::from(16u32));
        // Oracle: the smallest admissible a'_1 in [16, 64] by enumeration.
        let first = (1u32..100).find(|&a| (16..=64).contains(&a)).unwrap();
        assert_eq!(pair.cf2().quotients()[0], BigUint::from(first));
    }

    #[test]
    fn default_seed_levels() {
        let pair = synthesize_alpha_pair(2, None).unwrap();
        assert_eq!(pair.cf1().q(1).unwrap(), &BigUint::from(3u32));
        assert_eq!(pair.cf2().q(1).unwrap(), &BigUint::from(81u32));
        assert_eq!(pair.cf1().q(2).unwrap(), &BigUint::from(43046722u64));
    }

    #[test]
    fn depth_three_growth() {
        let pair = synthesize_alpha_pair(3, None).unwrap();
        let q2 = pair.cf1().q(2).unwrap();
        let qq2 = pair.cf2().q(2).unwrap();
        let q3 = pair.cf1().q(3).unwrap();
        assert!(q3 >= &qq2.pow(4));
        assert!(qq2.pow(4) >= q2.pow(16));
        check_windows(pair.cf1().quotients(), pair.cf2().quotients()).unwrap();
        check_growth(pair.cf1().quotients(), pair.cf2().quotients()).unwrap();
    }

    #[test]
    fn window_checker_rejects() {
        // q1 = 2 but q'_1 = 15 < 16
        let err = check_windows(&big(&[2]), &big(&[15])).unwrap_err();
        assert!(matches!(err, Error::WindowViolation { level: 1, .. }));
        assert!(AlphaPair::from_quotients(big(&[2]), big(&[65])).is_err());
    }

    #[test]
    fn radius_bounds_continuations() {
        let deep = synthesize_alpha_pair(3, None).unwrap();
        let shallow = AlphaPair::from_quotients(
            deep.cf1().quotients()[..2].to_vec(),
            deep.cf2().quotients()[..2].to_vec(),
        )
        .unwrap();
        let r = shallow.radius();
        assert!((deep.value1() - shallow.value1()).abs() <= r);
        assert!((deep.value2() - shallow.value2()).abs() <= r);
        let t = deep.truncated_at(2).unwrap();
        assert!((deep.value1() - &t.x).abs() <= t.radius);
    }

    #[test]
    fn degenerate_half() {
        let alpha = TruncatedAlpha::exact(rat(1, 2), rat(1, 2));
        let probe = linear_type_scan(&alpha, 3, 2.0).unwrap();
        assert!(probe.degenerate.contains(&(1, 1)));
        assert!(!probe.degenerate.contains(&(0, 0)));
        assert!(probe.records.iter().all(|r| r.k != (0, 0)));
        assert_eq!(lattice_distance(&alpha, (1, 1)), BigRational::zero());
    }

    #[test]
    fn coarse_truncation_rejected() {
        let pair = synthesize_alpha_pair(2, None).unwrap();
        let t = pair.truncated_at(1).unwrap();
        assert!(matches!(linear_type_scan(&t, 100, 16.0), Err(Error::TruncationTooCoarse(100))));
    }

    #[test]
    fn scan_matches_brute_force() {
        let pair = synthesize_alpha_pair(3, None).unwrap();
        let alpha = pair.truncated();
        let k_max = 40i64;
        let probe = linear_type_scan(&alpha, k_max as u64, 16.0).unwrap();
        // Oracle: per-shell exact minima over the full square, then running minimum.
        let mut running: Option<f64> = None;
        let mut expected = Vec::new();
        let mut max_e: f64 = f64::NEG_INFINITY;
        for r in 1..=k_max {
            let mut best: Option<(BigRational, (i64, i64))> = None;
            for k1 in -r..=r {
                for k2 in -r..=r {
                    if k1.abs().max(k2.abs()) != r || k1 < 0 || (k1 == 0 && k2 < 0) {
                        continue;
                    }
                    let d = lattice_distance(&alpha, (k1, k2));
                    if best.as_ref().is_none_or(|(b, _)| d < *b) {
                        best = Some((d, (k1, k2)));
                    }
                }
            }
            let (d, k) = best.unwrap();
            let score = ln_f64(&d) + 16.0 * (r as f64).ln();
            if running.is_none_or(|m| score < m) {
                running = Some(score);
                expected.push((k, d.clone()));
            }
            if r >= 2 {
                max_e = max_e.max(-ln_f64(&d) / (r as f64).ln());
            }
        }
        let got: Vec<((i64, i64), BigRational)> = probe.records.iter().map(|r| (r.k, r.dist.clone())).collect();
        assert_eq!(got, expected);
        assert!((probe.max_exponent.unwrap() - max_e).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn determinant_and_coprimality(qs in proptest::collection::vec(1u64..1_000_000, 1..30)) {
            let cf = convergents(&big(&qs)).unwrap();
            let mut prev = Convergent { p: BigUint::zero(), q: BigUint::one() };
            for (i, c) in cf.convergent_list().iter().enumerate() {
                let n = i + 1;
                prop_assert!(c.p.gcd(&c.q).is_one());
                let lhs = BigInt::from(&c.p * &prev.q) - BigInt::from(&prev.p * &c.q);
                let expected = if (n - 1) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                prop_assert_eq!(lhs, expected);
                if n >= 3 {
                    prop_assert!(c.q > prev.q);
                }
                prev = c.clone();
            }
        }

        #[test]
        fn alternation(qs in proptest::collection::vec(1u64..1_000, 3..20)) {
            let cf = convergents(&big(&qs)).unwrap();
            let theta = cf.value();
            let list = cf.convergent_list();
            for n in 0..list.len() - 1 {
                let a = list[n].value();
                let b = list[n + 1].value();
                let diff = (&a - &b).abs();
                prop_assert_eq!(diff, BigRational::new(BigInt::one(), BigInt::from(&list[n].q * &list[n + 1].q)));
                if n + 1 < list.len() - 1 {
                    // opposite sides of the deepest value
                    let sa = (&a - &theta).signum();
                    let sb = (&b - &theta).signum();
                    prop_assert!(sa * sb <= BigRational::zero());
                }
            }
        }

        #[test]
        fn synthesis_sound(seed in 1u32..=4, depth in 1usize..=3) {
            let pair = synthesize_alpha_pair(depth, Some(BigUint::from(seed))).unwrap();
            prop_assert_eq!(pair.depth(), depth);
            prop_assert!(check_windows(pair.cf1().quotients(), pair.cf2().quotients()).is_ok());
            prop_assert!(check_growth(pair.cf1().quotients(), pair.cf2().quotients()).is_ok());
        }
    }
}
