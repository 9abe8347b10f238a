//! Directed-rounding helpers: integer roots, rational power enclosures and
//! logarithm bounds. Every function returns bounds that are true
//! inequalities, never float artifacts.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Closed rational interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn exact(v: BigRational) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint_f64(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(2.into())))
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn from_uint(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

pub fn ratio_u(n: &BigUint, d: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(n.clone()), BigInt::from(d.clone()))
}

/// `x mod 1`, in `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_int(x: &BigRational) -> BigRational {
    let f = frac(x);
    let g = BigRational::one() - &f;
    if f <= g {
        f
    } else {
        g
    }
}

pub fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

pub fn to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back on a shift when numerator or denominator overflow f64.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = nb - db;
    let scaled = if shift > 0 {
        BigRational::new(x.numer().clone(), x.denom() << (shift as u64))
    } else {
        BigRational::new(x.numer() << ((-shift) as u64), x.denom().clone())
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Natural log of a positive big rational as f64 (no rigour; for fits and diagnostics).
pub fn ln_f64(x: &BigRational) -> f64 {
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = nb - db;
    let scaled = if shift > 0 {
        BigRational::new(x.numer().clone(), x.denom() << (shift as u64))
    } else {
        BigRational::new(x.numer() << ((-shift) as u64), x.denom().clone())
    };
    scaled.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_uint_f64(x: &BigUint) -> f64 {
    ln_f64(&from_uint(x))
}

pub fn root_floor(x: &BigUint, k: u32) -> BigUint {
    x.nth_root(k)
}

pub fn root_ceil(x: &BigUint, k: u32) -> BigUint {
    let r = x.nth_root(k);
    if r.pow(k) == *x {
        r
    } else {
        r + 1u32
    }
}

/// `ceil(x^(a/b))` exactly, for a positive integer `x`.
pub fn ceil_pow_ratio(x: &BigUint, a: u32, b: u32) -> BigUint {
    root_ceil(&x.pow(a), b)
}

/// `floor(x^(a/b))` exactly.
pub fn floor_pow_ratio(x: &BigUint, a: u32, b: u32) -> BigUint {
    root_floor(&x.pow(a), b)
}

fn floor_div(n: &BigUint, d: &BigUint) -> BigUint {
    n / d
}

fn ceil_div(n: &BigUint, d: &BigUint) -> BigUint {
    n.div_ceil(d)
}

/// Enclosure of `x^(1/k)` for `x >= 0` with relative width about `2^-bits`.
pub fn root_bounds(x: &BigRational, k: u32, bits: u32) -> (BigRational, BigRational) {
    assert!(k >= 1);
    assert!(!x.is_negative(), "root of negative rational");
    if x.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    if k == 1 {
        return (x.clone(), x.clone());
    }
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    let want = k as i64 * (bits as i64 + 2) + d.bits() as i64 - n.bits() as i64;
    let p = if want > 0 { (want as u64).div_ceil(k as u64) } else { 0 };
    let scaled = n << (k as u64 * p);
    let lo_int = root_floor(&floor_div(&scaled, d), k);
    let hi_int = root_ceil(&ceil_div(&scaled, d), k);
    let den = pow2(p);
    (ratio_u(&lo_int, &den), ratio_u(&hi_int, &den))
}

/// Enclosure of `base^(a/b)` for `base > 0`, `b >= 1`.
pub fn pow_bounds(base: &BigRational, a: i64, b: u32, bits: u32) -> (BigRational, BigRational) {
    assert!(base.is_positive());
    let ua = a.unsigned_abs() as u32;
    let p = BigRational::new(base.numer().pow(ua), base.denom().pow(ua));
    let p = if a < 0 { p.recip() } else { p };
    root_bounds(&p, b, bits)
}

/// Decide `d <= n^(-a/b)` exactly for `d >= 0`, `n >= 1`.
pub fn le_neg_power(d: &BigRational, n: &BigUint, a: u32, b: u32) -> bool {
    if d.is_zero() {
        return true;
    }
    // d^b * n^a <= 1
    let lhs_num = d.numer().magnitude().pow(b) * n.pow(a);
    let lhs_den = d.denom().magnitude().pow(b);
    lhs_num <= lhs_den
}

/// Compare `d` with `n^(-a/b)`; `Ordering::Less` means `d < n^(-a/b)`.
pub fn cmp_neg_power(d: &BigRational, n: &BigUint, a: u32, b: u32) -> Ordering {
    if d.is_zero() {
        return Ordering::Less;
    }
    let lhs_num = d.numer().magnitude().pow(b) * n.pow(a);
    let lhs_den = d.denom().magnitude().pow(b);
    lhs_num.cmp(&lhs_den)
}

/// Rigorous bounds on `ln x` for rational `x > 0`, width about `2^-bits`.
pub fn ln_bounds(x: &BigRational, bits: u32) -> Enclosure {
    assert!(x.is_positive());
    // x = 2^e * m, m in [1, 2)
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = int(2);
    let mut m = if e >= 0 {
        x / BigRational::from_integer(BigInt::from(pow2(e as u64)))
    } else {
        x * BigRational::from_integer(BigInt::from(pow2((-e) as u64)))
    };
    while m < BigRational::one() {
        m = &m * &two;
        e -= 1;
    }
    while m >= two {
        m = &m / &two;
        e += 1;
    }
    let ln_m = atanh_series(&((&m - BigRational::one()) / (&m + BigRational::one())), bits);
    let ln_2 = atanh_series(&rat(1, 3), bits + 8);
    let ln_2 = Enclosure {
        lo: &ln_2.lo * int(2),
        hi: &ln_2.hi * int(2),
    };
    let two_m = Enclosure { lo: &ln_m.lo * int(2), hi: &ln_m.hi * int(2) };
    let ee = int(e);
    let e_ln2 = if e >= 0 {
        Enclosure { lo: &ln_2.lo * &ee, hi: &ln_2.hi * &ee }
    } else {
        Enclosure { lo: &ln_2.hi * &ee, hi: &ln_2.lo * &ee }
    };
    e_ln2.add(&two_m)
}

/// Enclosure of atanh(y) for `0 <= y <= 1/3`.
fn atanh_series(y: &BigRational, bits: u32) -> Enclosure {
    assert!(!y.is_negative() && *y <= rat(1, 3));
    if y.is_zero() {
        return Enclosure::exact(BigRational::zero());
    }
    let y2 = y * y;
    let mut pow = y.clone();
    let mut sum = BigRational::zero();
    let mut k: i64 = 0;
    let tol = BigRational::new(BigInt::one(), BigInt::from(pow2(bits as u64 + 2)));
    loop {
        sum += &pow / int(2 * k + 1);
        pow = &pow * &y2;
        k += 1;
        // remainder <= y^(2k+1) / ((2k+1)(1 - y^2))
        let rem = &pow / (int(2 * k + 1) * (BigRational::one() - &y2));
        if rem < tol {
            let hi = &sum + &rem;
            return Enclosure { lo: round_down(&sum, bits + 8), hi: round_up(&hi, bits + 8) };
        }
    }
}

/// Largest dyadic `j/2^bits <= x`.
pub fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let den = BigInt::from(pow2(bits as u64));
    let scaled = (x * BigRational::from_integer(den.clone())).floor().to_integer();
    BigRational::new(scaled, den)
}

/// Smallest dyadic `j/2^bits >= x`.
pub fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let den = BigInt::from(pow2(bits as u64));
    let scaled = (x * BigRational::from_integer(den.clone())).ceil().to_integer();
    BigRational::new(scaled, den)
}

/// Dyadic rounding to about `bits` significant bits, directed.
pub fn round_rel(x: &BigRational, bits: u32, up: bool) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let mag = x.numer().bits() as i64 - x.denom().bits() as i64;
    let shift = bits as i64 - mag;
    let s = shift.unsigned_abs();
    let factor = BigRational::from_integer(BigInt::from(pow2(s)));
    let scaled = if shift >= 0 { x * &factor } else { x / &factor };
    let r = if up { scaled.ceil() } else { scaled.floor() };
    if shift >= 0 {
        r / factor
    } else {
        r * factor
    }
}

pub fn uint_of(x: &BigInt) -> Option<BigUint> {
    match x.sign() {
        Sign::Minus => None,
        _ => Some(x.magnitude().clone()),
    }
}
