//! The skew product S_α(x, t) = (2x, t + α·χ_{[0,1/2)}(x)) and exact
//! certificates for its (9, C/n^s)-mixing on dyadic cubes.

use crate::cfrac::TruncatedAlpha;
use crate::error::{Error, Result};
use crate::rigorous::{pow2, pow_bounds, ratio_u, to_f64};
use crate::torus::{enlarge_square, DyadicCube3, Rect2, TorusPoint2, TorusPoint3};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Bit sequence b₁b₂… coding x = Σ b_i 2^{−i}; either a fixed finite list or
/// drawn lazily from a seeded ChaCha substream.
#[derive(Clone, Debug)]
pub struct BitStream {
    words: Vec<u64>,
    limit: Option<usize>,
    rng: Option<ChaCha8Rng>,
}

impl BitStream {
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64) + 1];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (63 - i % 64);
            }
        }
        BitStream { words, limit: Some(bits.len()), rng: None }
    }

    /// Independent substream `stream` of the master `seed`.
    pub fn seeded(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        BitStream { words: Vec::new(), limit: None, rng: Some(rng) }
    }

    pub fn available(&self) -> Option<usize> {
        self.limit
    }

    fn ensure(&mut self, nbits: usize) -> Result<()> {
        if let Some(limit) = self.limit {
            if nbits > limit {
                return Err(Error::InsufficientEntropy { needed: nbits, available: limit });
            }
            return Ok(());
        }
        let need_words = nbits.div_ceil(64) + 1;
        let rng = self.rng.as_mut().expect("lazy stream has an rng");
        while self.words.len() < need_words {
            self.words.push(rng.next_u64());
        }
        Ok(())
    }

    /// Bit b_{i+1}.
    pub fn bit(&mut self, i: usize) -> Result<bool> {
        self.ensure(i + 1)?;
        Ok((self.words[i / 64] >> (63 - i % 64)) & 1 == 1)
    }

    /// Bits b_{pos+1} … b_{pos+64} as an integer, most significant first.
    /// Lazy streams only; finite streams pad with zeros.
    pub fn window64(&mut self, pos: usize) -> u64 {
        if self.limit.is_none() {
            self.ensure(pos + 64).expect("lazy stream");
        }
        let w = pos / 64;
        let s = pos % 64;
        let hi = self.words.get(w).copied().unwrap_or(0);
        if s == 0 {
            hi
        } else {
            let lo = self.words.get(w + 1).copied().unwrap_or(0);
            (hi << s) | (lo >> (64 - s))
        }
    }

    /// Bits b_{pos+1} … b_{pos+len} as an integer.
    pub fn window(&mut self, pos: usize, len: usize) -> BigUint {
        let mut out = BigUint::zero();
        let mut done = 0;
        while done < len {
            let take = (len - done).min(64);
            let w = self.window64(pos + done) >> (64 - take);
            out = (out << take) | BigUint::from(w);
            done += take;
        }
        out
    }

    /// Number of zero bits among b_{from+1} … b_{to}.
    pub fn zeros_between(&mut self, from: usize, to: usize) -> Result<u64> {
        if to == 0 || to <= from {
            return Ok(0);
        }
        self.ensure(to)?;
        let mut zeros = 0u64;
        let mut i = from;
        while i < to {
            let take = (to - i).min(64);
            let w = self.window64(i) >> (64 - take);
            zeros += take as u64 - w.count_ones() as u64;
            i += take;
        }
        Ok(zeros)
    }
}

/// State of the bitstream model: x is the bit sequence after `offset`
/// shifts, the fiber is tracked exactly.
#[derive(Clone, Debug)]
pub struct BitState {
    pub bits: BitStream,
    pub offset: usize,
    pub fiber: TorusPoint2,
}

#[derive(Clone, Debug)]
pub struct SkewSystem {
    alpha: TruncatedAlpha,
}

impl SkewSystem {
    pub fn new(alpha: TruncatedAlpha) -> Self {
        SkewSystem { alpha }
    }

    pub fn alpha(&self) -> &TruncatedAlpha {
        &self.alpha
    }

    fn alpha_point(&self) -> TorusPoint2 {
        TorusPoint2::new([self.alpha.x.clone(), self.alpha.y.clone()])
    }

    pub fn step(&self, s: &TorusPoint3) -> TorusPoint3 {
        let x = s.coord(0);
        let half = BigRational::new(1.into(), 2.into());
        let fire = *x < half;
        let two = BigRational::from_integer(2.into());
        let (t1, t2) = if fire {
            (s.coord(1) + &self.alpha.x, s.coord(2) + &self.alpha.y)
        } else {
            (s.coord(1).clone(), s.coord(2).clone())
        };
        TorusPoint3::new([x * two, t1, t2])
    }

    pub fn iterate(&self, s: &TorusPoint3, n: u64) -> TorusPoint3 {
        let mut cur = s.clone();
        for _ in 0..n {
            cur = self.step(&cur);
        }
        cur
    }

    /// Advance the bitstream model by `n` steps.
    pub fn iterate_bits(&self, state: &mut BitState, n: usize) -> Result<()> {
        let z = state.bits.zeros_between(state.offset, state.offset + n)?;
        let shift = self.alpha_point().scale(&BigInt::from(z));
        state.fiber = state.fiber.add(&shift);
        state.offset += n;
        Ok(())
    }

    pub fn preimage_measure_exact(&self, a: &DyadicCube3, b: &DyadicCube3, n: u32) -> Result<BigRational> {
        if a.gen < b.gen {
            return Err(Error::CubeOrder { ga: a.gen, gb: b.gen });
        }
        let engine = MeasureEngine::new(&self.alpha, a.gen);
        let mut binom = Binomials::default();
        Ok(engine.measure(a, b, n, &mut binom))
    }

    /// S = Σ_k χ_{R̃}(kα)·C(n − n_B, k) with the Abel decomposition into Σ₁ + Σ₂.
    pub fn binomial_indicator_sum(&self, n: u32, n_b: u32, r_tilde: &Rect2) -> Result<BinomialIndicatorSum> {
        if n <= n_b {
            return Err(Error::InvalidParameter(format!("n = {n} must exceed n_B = {n_b}")));
        }
        let mut binom = Binomials::default();
        Ok(indicator_sum(&self.alpha, n - n_b, r_tilde, 0, &mut binom))
    }

    /// Certificate for one (A, B, n) at exponent s.
    pub fn certificate(&self, a: &DyadicCube3, b: &DyadicCube3, n: u32, s: &BigRational) -> Result<MixingCertificate> {
        if a.gen < b.gen {
            return Err(Error::CubeOrder { ga: a.gen, gb: b.gen });
        }
        let exp = Exponent::new(s)?;
        let engine = MeasureEngine::new(&self.alpha, a.gen);
        let mut binom = Binomials::default();
        Ok(engine.certificate(a, b, n, &exp, &mut binom))
    }
}

#[derive(Clone, Debug)]
pub struct BinomialIndicatorSum {
    pub n_free: u32,
    pub indicators: Vec<bool>,
    pub sum: BigUint,
    /// area(R̃)·2^N.
    pub sigma2: BigRational,
    /// Σ₂ from the Abel form L·(Σ_{k<N} (k+1)(C_k − C_{k+1}) + (N+1)).
    pub sigma2_abel: BigRational,
    /// S − Σ₂.
    pub sigma1: BigRational,
    /// Σ_{k<N} (A_k − (k+1)L)(C_k − C_{k+1}) + (A_N − (N+1)L).
    pub sigma1_abel: BigRational,
    /// Indicators unchanged for every α within the truncation radius.
    pub stable: bool,
}

impl BinomialIndicatorSum {
    /// |Σ₁|·N^{1/γ}/2^N, the constant in the shape η·2^N/N^{1/γ}.
    pub fn eta_shape(&self, gamma: f64) -> f64 {
        let n = self.n_free as f64;
        to_f64(&self.sigma1.abs()) * n.powf(1.0 / gamma) / 2f64.powf(n)
    }
}

/// χ_R(kα) for k = 0..count, with guarded stability under margin (k + z_offset)·radius.
#[derive(Clone, Debug)]
struct IndicatorRow {
    chi: Vec<bool>,
    stable_prefix: Vec<bool>,
}

impl IndicatorRow {
    fn new(alpha: &TruncatedAlpha, rect: &Rect2, count: usize, z_offset: u64) -> Self {
        let a = TorusPoint2::new([alpha.x.clone(), alpha.y.clone()]);
        let mut chi = Vec::with_capacity(count);
        let mut stable_prefix = Vec::with_capacity(count);
        let mut stable = true;
        for k in 0..count as u64 {
            let p = a.scale(&BigInt::from(k));
            let margin = &alpha.radius * BigRational::from_integer(BigInt::from(k + z_offset));
            match rect.contains_guarded(&p, &margin) {
                Some(v) => chi.push(v),
                None => {
                    stable = false;
                    chi.push(rect.contains(&p));
                }
            }
            stable_prefix.push(stable);
        }
        IndicatorRow { chi, stable_prefix }
    }

    fn sum(&self, n_free: u32, binom: &mut Binomials) -> (BigUint, bool) {
        let row = binom.row(n_free);
        let mut sum = BigUint::zero();
        for (k, c) in row.iter().enumerate() {
            if self.chi[k] {
                sum += c;
            }
        }
        (sum, self.stable_prefix[n_free as usize])
    }
}

fn indicator_sum(alpha: &TruncatedAlpha, n_free: u32, rect: &Rect2, z_offset: u64, binom: &mut Binomials) -> BinomialIndicatorSum {
    let ind = IndicatorRow::new(alpha, rect, n_free as usize + 1, z_offset);
    let (sum, stable) = ind.sum(n_free, binom);
    let indicators = ind.chi;
    let row = binom.row(n_free).to_vec();
    let l = rect.area();
    let nn = n_free as usize;
    let sigma2 = &l * BigRational::from_integer(BigInt::from(pow2(n_free as u64)));
    let mut abel2 = BigInt::zero();
    let mut abel1 = BigRational::zero();
    let mut acc = 0i64;
    for k in 0..nn {
        if indicators[k] {
            acc += 1;
        }
        let dc = BigInt::from(row[k].clone()) - BigInt::from(row[k + 1].clone());
        abel2 += BigInt::from(k as i64 + 1) * &dc;
        let ak = BigRational::from_integer(acc.into()) - &l * BigRational::from_integer((k as i64 + 1).into());
        abel1 += ak * BigRational::from_integer(dc);
    }
    if indicators[nn] {
        acc += 1;
    }
    abel2 += BigInt::from(nn as i64 + 1);
    abel1 += BigRational::from_integer(acc.into()) - &l * BigRational::from_integer((nn as i64 + 1).into());
    let sigma2_abel = &l * BigRational::from_integer(abel2);
    let sigma1 = BigRational::from_integer(BigInt::from(sum.clone())) - &sigma2;
    BinomialIndicatorSum { n_free, indicators, sum, sigma2, sigma2_abel, sigma1, sigma1_abel: abel1, stable }
}

/// Rows of Pascal's triangle, grown on demand.
#[derive(Default, Clone, Debug)]
pub struct Binomials {
    rows: Vec<Vec<BigUint>>,
}

impl Binomials {
    pub fn row(&mut self, n: u32) -> &[BigUint] {
        while self.rows.len() <= n as usize {
            let next = match self.rows.last() {
                None => vec![BigUint::one()],
                Some(prev) => {
                    let mut r = Vec::with_capacity(prev.len() + 1);
                    r.push(BigUint::one());
                    for w in prev.windows(2) {
                        r.push(&w[0] + &w[1]);
                    }
                    r.push(BigUint::one());
                    r
                }
            };
            self.rows.push(next);
        }
        &self.rows[n as usize]
    }
}

/// Exponent s = a/b ∈ (0, 1].
#[derive(Clone, Debug)]
pub struct Exponent {
    pub value: BigRational,
    pub num: u32,
    pub den: u32,
}

pub fn default_exponent() -> BigRational {
    BigRational::new(1.into(), 17.into())
}

impl Exponent {
    pub fn new(s: &BigRational) -> Result<Self> {
        if !s.is_positive() || *s > BigRational::one() {
            return Err(Error::InvalidParameter(format!("s = {s} outside (0, 1]")));
        }
        let num = s.numer().to_u32().ok_or_else(|| Error::InvalidParameter("s numerator too large".into()))?;
        let den = s.denom().to_u32().ok_or_else(|| Error::InvalidParameter("s denominator too large".into()))?;
        Ok(Exponent { value: s.clone(), num, den })
    }

    /// Rational upper bound of n^s.
    pub fn upper_power(&self, n: u32) -> BigRational {
        if n <= 1 {
            return BigRational::one();
        }
        pow_bounds(&BigRational::from_integer(n.into()), self.num as i64, self.den, 64).1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    Exact(BigRational),
    Approx { value: f64, rel_error: f64 },
}

impl Quantity {
    pub fn to_f64(&self) -> f64 {
        match self {
            Quantity::Exact(r) => to_f64(r),
            Quantity::Approx { value, .. } => *value,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Quantity::Exact(r) => Some(r),
            Quantity::Approx { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Quantity::Exact(_))
    }

    /// "p/q" for exact values, a decimal otherwise.
    pub fn render(&self) -> String {
        match self {
            Quantity::Exact(r) => crate::io::fmt_rat(r),
            Quantity::Approx { value, .. } => format!("{value:e}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MixingCertificate {
    pub a: DyadicCube3,
    pub b: DyadicCube3,
    pub n: u32,
    pub truncation_level: Option<usize>,
    pub measure: Quantity,
    /// 9·L³(A)·L³(B).
    pub product_term: BigRational,
    pub needed_c: Quantity,
    pub analytic_bound: Quantity,
    pub product_dominates: bool,
    pub indicator_stable: bool,
}

impl MixingCertificate {
    pub fn exact(&self) -> bool {
        self.measure.is_exact()
    }
}

/// Exponent above which certificates switch to log-domain floats.
pub const EXACT_N_LIMIT: u32 = 200;
const APPROX_REL_ERROR: f64 = 1e-9;

/// Exact overlap machinery: per-axis integers scaled by D_i = 2^G·q_i.
struct MeasureEngine<'a> {
    alpha: &'a TruncatedAlpha,
    g: u32,
    q: [BigUint; 2],
    p: [BigUint; 2],
    den: [BigUint; 2],
}

impl<'a> MeasureEngine<'a> {
    fn new(alpha: &'a TruncatedAlpha, g: u32) -> Self {
        let [(p1, q1), (p2, q2)] = alpha.fractions();
        let scale = pow2(g as u64);
        MeasureEngine { alpha, g, den: [&q1 * &scale, &q2 * &scale], q: [q1, q2], p: [p1, p2] }
    }

    /// Length of [lo1, lo1+len1) ∩ [lo2, lo2+len2) on the circle ℤ/Dℤ.
    fn circ_overlap(lo1: &BigUint, len1: &BigUint, lo2: &BigUint, len2: &BigUint, d: &BigUint) -> BigUint {
        let lo1 = BigInt::from(lo1.clone());
        let hi1 = &lo1 + BigInt::from(len1.clone());
        let mut total = BigInt::zero();
        let d = BigInt::from(d.clone());
        for k in [-1i32, 0, 1] {
            let lo2k = BigInt::from(lo2.clone()) + &d * k;
            let hi2k = &lo2k + BigInt::from(len2.clone());
            let lo = if lo1 > lo2k { lo1.clone() } else { lo2k };
            let hi = if hi1 < hi2k { hi1.clone() } else { hi2k };
            if hi > lo {
                total += hi - lo;
            }
        }
        total.magnitude().clone()
    }

    /// Product of axis overlaps of (R_A − zα) and R_B, scaled by D₁·D₂.
    fn weight(&self, a: &DyadicCube3, b: &DyadicCube3, z: u64) -> BigUint {
        let mut w = BigUint::one();
        for axis in 0..2 {
            let ua = pow2((self.g - a.gen) as u64) * &self.q[axis];
            let ub = pow2((self.g - b.gen) as u64) * &self.q[axis];
            let a_lo = &ua * a.idx[axis + 1];
            let b_lo = &ub * b.idx[axis + 1];
            let shift = ((BigUint::from(z) * &self.p[axis]) % &self.q[axis]) << self.g;
            let d = &self.den[axis];
            let lo = if a_lo >= shift { &a_lo - &shift } else { &a_lo + d - &shift };
            w *= Self::circ_overlap(&lo, &ua, &b_lo, &ub, d);
            if w.is_zero() {
                break;
            }
        }
        w
    }

    fn weights(&self, a: &DyadicCube3, b: &DyadicCube3, z0: u64, count: usize) -> Vec<BigUint> {
        (0..count as u64).map(|j| self.weight(a, b, z0 + j)).collect()
    }

    /// Numerator over 2^{n+g_A}·D₁·D₂ when the x-constraints are consistent.
    fn numerator(&self, a: &DyadicCube3, b: &DyadicCube3, n: u32, weights: &[BigUint], binom: &mut Binomials) -> BigUint {
        let nb = b.gen;
        if n >= nb {
            let row = binom.row(n - nb);
            row.iter().zip(weights).map(|(c, w)| c * w).sum()
        } else {
            // bits n+1..n_B of i_B must agree with the first n_B − n bits of i_A
            let shared = nb - n;
            let tail_b = b.idx[0] & ((1u64 << shared) - 1);
            let head_a = a.idx[0] >> (a.gen - shared);
            if tail_b != head_a {
                return BigUint::zero();
            }
            let z = n - (b.idx[0] >> shared).count_ones();
            self.weight(a, b, z as u64)
        }
    }

    fn denominator(&self, a: &DyadicCube3, n: u32) -> BigUint {
        pow2((n + a.gen) as u64) * &self.den[0] * &self.den[1]
    }

    fn measure(&self, a: &DyadicCube3, b: &DyadicCube3, n: u32, binom: &mut Binomials) -> BigRational {
        let weights = if n >= b.gen {
            self.weights(a, b, b.zeros_in_word() as u64, (n - b.gen) as usize + 1)
        } else {
            Vec::new()
        };
        let num = self.numerator(a, b, n, &weights, binom);
        ratio_u(&num, &self.denominator(a, n))
    }

    fn r_tilde(a: &DyadicCube3, b: &DyadicCube3) -> (Rect2, bool) {
        let rb = b.square();
        let (big, clipped) = enlarge_square(&rb, 3);
        let center = a.square().center().sub(rb.center());
        (Rect2::new(center, big.half().clone()).expect("valid half-sides"), clipped)
    }

    /// Indicators of the enlarged square R̃ − z_B·α along kα.
    fn indicator_row(&self, a: &DyadicCube3, b: &DyadicCube3, count: usize) -> IndicatorRow {
        let zb = b.zeros_in_word() as u64;
        let (rt, _) = Self::r_tilde(a, b);
        let z = BigRational::from_integer(zb.into());
        let shift = TorusPoint2::new([&self.alpha.x * &z, &self.alpha.y * &z]);
        let shifted = Rect2::new(rt.center().sub(&shift), rt.half().clone()).expect("valid half-sides");
        IndicatorRow::new(self.alpha, &shifted, count, zb)
    }

    fn certificate(&self, a: &DyadicCube3, b: &DyadicCube3, n: u32, s: &Exponent, binom: &mut Binomials) -> MixingCertificate {
        let weights = if n >= b.gen {
            self.weights(a, b, b.zeros_in_word() as u64, (n - b.gen) as usize + 1)
        } else {
            Vec::new()
        };
        let upper = s.upper_power(n);
        let ind = self.indicator_row(a, b, weights.len());
        self.certificate_with(a, b, n, s, &upper, &weights, &ind, binom)
    }

    #[allow(clippy::too_many_arguments)]
    fn certificate_with(
        &self,
        a: &DyadicCube3,
        b: &DyadicCube3,
        n: u32,
        s: &Exponent,
        n_pow_s_upper: &BigRational,
        weights: &[BigUint],
        indicators: &IndicatorRow,
        binom: &mut Binomials,
    ) -> MixingCertificate {
        let vol_a = a.volume();
        let product_term = BigRational::from_integer(9.into()) * &vol_a * b.volume();
        // Bound chain: S·2^{−n}·L(I_A)·L²(R_A) for n ≥ n_B, 2^{−n}·L³(A) below.
        let (bound_factor, indicator_stable) = if n >= b.gen {
            let (sum, stable) = indicators.sum(n - b.gen, binom);
            (Some(sum), stable)
        } else {
            (None, true)
        };
        if n > EXACT_N_LIMIT {
            return self.approx_certificate(a, b, n, s, weights, bound_factor, product_term, indicator_stable);
        }
        let num = self.numerator(a, b, n, weights, binom);
        let measure = ratio_u(&num, &self.denominator(a, n));
        let two_n = BigRational::from_integer(BigInt::from(pow2(n as u64)));
        let bound = match &bound_factor {
            Some(sum) => BigRational::from_integer(BigInt::from(sum.clone())) * &vol_a / &two_n,
            None => &vol_a / &two_n,
        };
        let product_dominates = measure <= product_term;
        let needed = if product_dominates {
            BigRational::zero()
        } else {
            (&measure - &product_term) * n_pow_s_upper / &vol_a
        };
        MixingCertificate {
            a: *a,
            b: *b,
            n,
            truncation_level: self.alpha.level,
            measure: Quantity::Exact(measure),
            product_term,
            needed_c: Quantity::Exact(needed),
            analytic_bound: Quantity::Exact(bound),
            product_dominates,
            indicator_stable,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn approx_certificate(
        &self,
        a: &DyadicCube3,
        b: &DyadicCube3,
        n: u32,
        s: &Exponent,
        weights: &[BigUint],
        bound_sum: Option<BigUint>,
        product_term: BigRational,
        indicator_stable: bool,
    ) -> MixingCertificate {
        let ln2 = std::f64::consts::LN_2;
        let dd = ratio_u(&BigUint::one(), &(&self.den[0] * &self.den[1]));
        let nf = n - b.gen;
        let mut ln_fact = vec![0.0f64; nf as usize + 2];
        for i in 1..ln_fact.len() {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        let base = -((n + a.gen) as f64) * ln2;
        let mut measure = 0.0f64;
        for (j, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let ln_c = ln_fact[nf as usize] - ln_fact[j] - ln_fact[nf as usize - j];
            let area = to_f64(&(ratio_u(w, &BigUint::one()) * &dd));
            measure += (ln_c + base).exp() * area;
        }
        let vol_a = to_f64(&a.volume());
        let bound = match bound_sum {
            Some(sum) => {
                let ln_sum = crate::rigorous::ln_uint_f64(&sum);
                if sum.is_zero() {
                    0.0
                } else {
                    (ln_sum - n as f64 * ln2).exp() * vol_a
                }
            }
            None => vol_a * (-(n as f64) * ln2).exp(),
        };
        let prod = to_f64(&product_term);
        let product_dominates = measure <= prod;
        let s_f = s.num as f64 / s.den as f64;
        let needed = if product_dominates { 0.0 } else { (measure - prod) * (n as f64).powf(s_f) / vol_a };
        MixingCertificate {
            a: *a,
            b: *b,
            n,
            truncation_level: self.alpha.level,
            measure: Quantity::Approx { value: measure, rel_error: APPROX_REL_ERROR },
            product_term,
            needed_c: Quantity::Approx { value: needed, rel_error: APPROX_REL_ERROR },
            analytic_bound: Quantity::Approx { value: bound, rel_error: APPROX_REL_ERROR },
            product_dominates,
            indicator_stable,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanFamily {
    /// R_B at the origin, every I_B and every A. Complete up to fiber translation.
    Anchored,
    /// Every pair with generation(A) ≥ generation(B).
    All,
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub max_gen: u32,
    pub n_list: Vec<u32>,
    pub s: BigRational,
    pub family: ScanFamily,
}

#[derive(Clone, Debug, Default)]
pub struct ScanSummary {
    pub certificates: u64,
    pub exact_certificates: u64,
    /// Max needed_C over exact certificates.
    pub c_star: BigRational,
    pub c_star_argmax: Option<(DyadicCube3, DyadicCube3, u32)>,
    /// Max needed_C per iterate n (exact certificates).
    pub c_star_by_n: BTreeMap<u32, BigRational>,
    /// Max needed_C over approximate certificates.
    pub c_star_approx: Option<f64>,
    pub product_dominated: u64,
    pub bound_violations: u64,
    pub unstable_indicators: u64,
}

impl ScanSummary {
    /// C* restricted to iterates n ≤ horizon.
    pub fn c_star_up_to(&self, horizon: u32) -> BigRational {
        self.c_star_by_n
            .range(..=horizon)
            .map(|(_, c)| c.clone())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

fn b_cubes(g: u32, family: ScanFamily) -> Vec<DyadicCube3> {
    match family {
        ScanFamily::All => DyadicCube3::all(g).collect(),
        ScanFamily::Anchored => (0..1u64 << g).map(|i| DyadicCube3 { gen: g, idx: [i, 0, 0] }).collect(),
    }
}

/// Certificates for every (A, B, n) in the family, streamed to `sink` in
/// canonical order: g_B, B, g_A, A, n.
pub fn mixing_scan<F>(system: &SkewSystem, config: &ScanConfig, mut sink: F) -> Result<ScanSummary>
where
    F: FnMut(&MixingCertificate) -> Result<()>,
{
    if config.n_list.is_empty() {
        return Err(Error::EmptyScan);
    }
    let exp = Exponent::new(&config.s)?;
    let mut n_list = config.n_list.clone();
    n_list.sort_unstable();
    n_list.dedup();
    let n_max = *n_list.last().expect("nonempty");
    let uppers: Vec<BigRational> = n_list.iter().map(|&n| exp.upper_power(n)).collect();
    let engine = MeasureEngine::new(&system.alpha, config.max_gen);
    let mut summary = ScanSummary::default();
    let mut seed_binom = Binomials::default();
    seed_binom.row(n_max);
    for gb in 0..=config.max_gen {
        for b in b_cubes(gb, config.family) {
            let zb = b.zeros_in_word() as u64;
            let count = n_max.saturating_sub(gb) as usize + 1;
            for ga in gb..=config.max_gen {
                let side = 1u64 << ga;
                let squares: Vec<(u64, u64)> = (0..side).flat_map(|x| (0..side).map(move |y| (x, y))).collect();
                let batch: Vec<Vec<MixingCertificate>> = squares
                    .par_iter()
                    .map_init(
                        || seed_binom.clone(),
                        |binom, &(rx, ry)| {
                            let probe = DyadicCube3 { gen: ga, idx: [0, rx, ry] };
                            let weights = engine.weights(&probe, &b, zb, count);
                            let ind = engine.indicator_row(&probe, &b, count);
                            let mut out = Vec::with_capacity(side as usize * n_list.len());
                            for ix in 0..side {
                                let a = DyadicCube3 { gen: ga, idx: [ix, rx, ry] };
                                for (i, &n) in n_list.iter().enumerate() {
                                    let w = if n >= gb { &weights[..(n - gb) as usize + 1] } else { &[][..] };
                                    out.push(engine.certificate_with(&a, &b, n, &exp, &uppers[i], w, &ind, binom));
                                }
                            }
                            out
                        },
                    )
                    .collect();
                // canonical order: A by (ix, rx, ry)
                let mut flat: Vec<MixingCertificate> = batch.into_iter().flatten().collect();
                flat.sort_by(|x, y| x.a.idx.cmp(&y.a.idx).then(x.n.cmp(&y.n)));
                for cert in &flat {
                    absorb(&mut summary, cert);
                    sink(cert)?;
                }
            }
        }
    }
    if summary.certificates == 0 {
        return Err(Error::EmptyScan);
    }
    Ok(summary)
}

fn absorb(summary: &mut ScanSummary, cert: &MixingCertificate) {
    summary.certificates += 1;
    if cert.product_dominates {
        summary.product_dominated += 1;
    }
    if !cert.indicator_stable {
        summary.unstable_indicators += 1;
    }
    match (&cert.measure, &cert.analytic_bound, &cert.needed_c) {
        (Quantity::Exact(m), Quantity::Exact(p), Quantity::Exact(c)) => {
            summary.exact_certificates += 1;
            if m > p {
                summary.bound_violations += 1;
            }
            let entry = summary.c_star_by_n.entry(cert.n).or_insert_with(BigRational::zero);
            if c > entry {
                *entry = c.clone();
            }
            if c > &summary.c_star || summary.c_star_argmax.is_none() {
                summary.c_star = summary.c_star.clone().max(c.clone());
                summary.c_star_argmax = Some((cert.a, cert.b, cert.n));
            }
        }
        _ => {
            let m = cert.measure.to_f64();
            let p = cert.analytic_bound.to_f64();
            if m > p * (1.0 + 2.0 * APPROX_REL_ERROR) {
                summary.bound_violations += 1;
            }
            let c = cert.needed_c.to_f64();
            summary.c_star_approx = Some(summary.c_star_approx.map_or(c, |v| v.max(c)));
        }
    }
}
