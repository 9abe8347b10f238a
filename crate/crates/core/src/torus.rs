//! Exact torus geometry: points, centred rectangles, dyadic cubes, rotation
//! orbits and rectangle discrepancy.

use crate::cfrac::TruncatedAlpha;
use crate::error::{Error, Result};
use crate::rigorous::{frac, pow2, ratio_u};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusPoint<const D: usize> {
    coords: [BigRational; D],
}

pub type TorusPoint2 = TorusPoint<2>;
pub type TorusPoint3 = TorusPoint<3>;

impl<const D: usize> TorusPoint<D> {
    /// Reduces every coordinate into `[0, 1)`.
    pub fn new(coords: [BigRational; D]) -> Self {
        TorusPoint { coords: coords.map(|c| frac(&c)) }
    }

    pub fn origin() -> Self {
        TorusPoint { coords: std::array::from_fn(|_| BigRational::zero()) }
    }

    pub fn coords(&self) -> &[BigRational; D] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &BigRational {
        &self.coords[i]
    }

    pub fn add(&self, other: &Self) -> Self {
        TorusPoint::new(std::array::from_fn(|i| &self.coords[i] + &other.coords[i]))
    }

    pub fn sub(&self, other: &Self) -> Self {
        TorusPoint::new(std::array::from_fn(|i| &self.coords[i] - &other.coords[i]))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let f = BigRational::from_integer(k.clone());
        TorusPoint::new(std::array::from_fn(|i| &self.coords[i] * &f))
    }

    /// Sup-norm torus distance.
    pub fn dist(&self, other: &Self) -> BigRational {
        (0..D)
            .map(|i| circle_dist(&self.coords[i], &other.coords[i]))
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

/// Distance on ℝ/ℤ.
pub fn circle_dist(a: &BigRational, b: &BigRational) -> BigRational {
    crate::rigorous::dist_to_int(&(a - b))
}

/// Closed sup-norm square/rectangle on T², centred, half-sides in (0, 1/2].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rect2 {
    center: TorusPoint2,
    half: [BigRational; 2],
}

impl Rect2 {
    pub fn new(center: TorusPoint2, half: [BigRational; 2]) -> Result<Self> {
        let max = BigRational::new(1.into(), 2.into());
        for h in &half {
            if !h.is_positive() || *h > max {
                return Err(Error::InvalidParameter(format!("half-side {h} outside (0, 1/2]")));
            }
        }
        Ok(Rect2 { center, half })
    }

    pub fn full() -> Self {
        let h = BigRational::new(1.into(), 2.into());
        Rect2 { center: TorusPoint2::origin(), half: [h.clone(), h] }
    }

    pub fn center(&self) -> &TorusPoint2 {
        &self.center
    }

    pub fn half(&self) -> &[BigRational; 2] {
        &self.half
    }

    pub fn area(&self) -> BigRational {
        let two = BigRational::from_integer(2.into());
        (&self.half[0] * &two) * (&self.half[1] * &two)
    }

    pub fn is_full(&self) -> bool {
        let h = BigRational::new(1.into(), 2.into());
        self.half[0] == h && self.half[1] == h
    }

    pub fn contains(&self, p: &TorusPoint2) -> bool {
        (0..2).all(|i| circle_dist(p.coord(i), self.center.coord(i)) <= self.half[i])
    }

    /// Closed-membership test that is stable under moving `p` by up to
    /// `margin` in sup norm: `Some(inside)` when decided, `None` otherwise.
    pub fn contains_guarded(&self, p: &TorusPoint2, margin: &BigRational) -> Option<bool> {
        if margin.is_zero() {
            return Some(self.contains(p));
        }
        let mut inside = true;
        for i in 0..2 {
            if self.half[i] == BigRational::new(1.into(), 2.into()) {
                continue;
            }
            let d = circle_dist(p.coord(i), self.center.coord(i));
            if d > &self.half[i] + margin {
                return Some(false);
            }
            if d + margin > self.half[i] {
                inside = false;
            }
        }
        if inside {
            Some(true)
        } else {
            None
        }
    }
}

/// Multiply the half-sides by `factor`, clipping to the full circle; the flag
/// reports whether clipping happened.
pub fn enlarge_square(r: &Rect2, factor: u32) -> (Rect2, bool) {
    let max = BigRational::new(1.into(), 2.into());
    let f = BigRational::from_integer(factor.into());
    let mut clipped = false;
    let half = r.half.clone().map(|h| {
        let h = h * &f;
        if h > max {
            clipped = true;
            max.clone()
        } else {
            h
        }
    });
    (Rect2 { center: r.center.clone(), half }, clipped)
}

/// Half-open dyadic cube I × R of side 2^{−g} in T³.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube3 {
    pub gen: u32,
    pub idx: [u64; 3],
}

pub const MAX_GENERATION: u32 = 60;

pub fn dyadic_cube(g: u32, k1: u64, k2: u64, k3: u64) -> Result<DyadicCube3> {
    DyadicCube3::new(g, [k1, k2, k3])
}

impl DyadicCube3 {
    pub fn new(gen: u32, idx: [u64; 3]) -> Result<Self> {
        if gen > MAX_GENERATION {
            return Err(Error::IndexOutOfRange(format!("generation {gen} > {MAX_GENERATION}")));
        }
        let n = 1u64 << gen;
        if idx.iter().any(|&k| k >= n) {
            return Err(Error::IndexOutOfRange(format!("indices {idx:?} not below 2^{gen}")));
        }
        Ok(DyadicCube3 { gen, idx })
    }

    pub fn whole() -> Self {
        DyadicCube3 { gen: 0, idx: [0; 3] }
    }

    /// All cubes of generation `g` in lexicographic index order.
    pub fn all(g: u32) -> impl Iterator<Item = DyadicCube3> {
        let n = 1u64 << g;
        (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| DyadicCube3 { gen: g, idx: [a, b, c] })))
    }

    pub fn side(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(pow2(self.gen as u64)))
    }

    pub fn volume(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(pow2(3 * self.gen as u64)))
    }

    /// `[k₁/2^g, (k₁+1)/2^g)`.
    pub fn interval(&self) -> (BigRational, BigRational) {
        let d = BigInt::from(pow2(self.gen as u64));
        (
            BigRational::new(BigInt::from(self.idx[0]), d.clone()),
            BigRational::new(BigInt::from(self.idx[0] + 1), d),
        )
    }

    /// Binary word i̲ with π([i̲]) = I, most significant symbol first.
    pub fn word(&self) -> Vec<u8> {
        (0..self.gen).rev().map(|b| ((self.idx[0] >> b) & 1) as u8).collect()
    }

    pub fn zeros_in_word(&self) -> u32 {
        self.gen - self.idx[0].count_ones()
    }

    /// Lower corner of the square R.
    pub fn square_corner(&self) -> TorusPoint2 {
        let d = BigInt::from(pow2(self.gen as u64));
        TorusPoint2::new([
            BigRational::new(BigInt::from(self.idx[1]), d.clone()),
            BigRational::new(BigInt::from(self.idx[2]), d),
        ])
    }

    /// R as a closed centred square (its closure).
    pub fn square(&self) -> Rect2 {
        let d = BigInt::from(pow2(self.gen as u64 + 1));
        let c = TorusPoint2::new([
            BigRational::new(BigInt::from(2 * self.idx[1] + 1), d.clone()),
            BigRational::new(BigInt::from(2 * self.idx[2] + 1), d.clone()),
        ]);
        let h = BigRational::new(BigInt::one(), d);
        Rect2 { center: c, half: [h.clone(), h] }
    }

    pub fn contains(&self, p: &TorusPoint3) -> bool {
        let d = BigRational::from_integer(BigInt::from(pow2(self.gen as u64)));
        (0..3).all(|i| (p.coord(i) * &d).floor().to_integer() == BigInt::from(self.idx[i]))
    }
}

/// Exact orbit table k·α mod 1, k = 0..=N, stored as numerators over the
/// two denominators.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    alpha: TruncatedAlpha,
    den: [BigUint; 2],
    num: [Vec<BigUint>; 2],
}

pub fn rotation_orbit(alpha: &TruncatedAlpha, n: u64) -> Result<OrbitTable> {
    if n == 0 {
        return Err(Error::InvalidParameter("orbit length must be at least 1".into()));
    }
    let [(p, q), (pp, qq)] = alpha.fractions();
    let min_den = if q <= qq { &q } else { &qq };
    if BigUint::from(n) >= *min_den {
        return Err(Error::OrbitAlias { n, den: min_den.to_string() });
    }
    let build = |p: &BigUint, q: &BigUint| -> Vec<BigUint> {
        let mut out = Vec::with_capacity(n as usize + 1);
        let mut cur = BigUint::zero();
        for _ in 0..=n {
            out.push(cur.clone());
            cur += p;
            if cur >= *q {
                cur -= q;
            }
        }
        out
    };
    Ok(OrbitTable { alpha: alpha.clone(), num: [build(&p, &q), build(&pp, &qq)], den: [q, qq] })
}

impl OrbitTable {
    pub fn alpha(&self) -> &TruncatedAlpha {
        &self.alpha
    }

    /// Largest index N (entries 0..=N).
    pub fn len(&self) -> u64 {
        self.num[0].len() as u64 - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn numerators(&self, axis: usize) -> &[BigUint] {
        &self.num[axis]
    }

    pub fn denominator(&self, axis: usize) -> &BigUint {
        &self.den[axis]
    }

    pub fn point(&self, k: usize) -> TorusPoint2 {
        TorusPoint2 {
            coords: [ratio_u(&self.num[0][k], &self.den[0]), ratio_u(&self.num[1][k], &self.den[1])],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscrepancyMode {
    Exact,
    Grid(u32),
}

pub const DEFAULT_GRID: u32 = 1024;
pub const EXACT_LIMIT: u64 = 512;

impl std::fmt::Display for DiscrepancyMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiscrepancyMode::Exact => write!(f, "exact"),
            DiscrepancyMode::Grid(m) => write!(f, "grid:{m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscrepancyValue {
    pub value: BigRational,
    /// Additive error bound: 0 in exact mode, 4/m in grid mode.
    pub error_bound: BigRational,
    pub mode: DiscrepancyMode,
}

/// sup over axis-parallel non-wrapping rectangles R ⊂ [0,1]² of
/// |#{0 ≤ k < n : kα ∈ R}/n − area(R)|.
pub fn rectangle_discrepancy(orbit: &OrbitTable, n: u64, mode: DiscrepancyMode) -> Result<DiscrepancyValue> {
    if n == 0 {
        return Err(Error::EmptyPrefix);
    }
    if n > orbit.len() + 1 {
        return Err(Error::InvalidParameter(format!("prefix {n} exceeds orbit of {} points", orbit.len() + 1)));
    }
    match mode {
        DiscrepancyMode::Exact => {
            if n > EXACT_LIMIT {
                return Err(Error::InvalidParameter(format!("exact mode supports n <= {EXACT_LIMIT}")));
            }
            Ok(DiscrepancyValue { value: exact_discrepancy(orbit, n as usize), error_bound: BigRational::zero(), mode })
        }
        DiscrepancyMode::Grid(m) => {
            if m == 0 || m > 1 << 14 {
                return Err(Error::InvalidParameter(format!("grid size {m} outside 1..=16384")));
            }
            Ok(DiscrepancyValue {
                value: grid_discrepancy(orbit, n as usize, m),
                error_bound: BigRational::new(4.into(), m.into()),
                mode,
            })
        }
    }
}

struct Prepared {
    /// Distinct x numerators with 0 and q₁ added, sorted.
    xs: Vec<BigUint>,
    /// Points sorted by y: (x rank in `xs`, y numerator).
    pts: Vec<(usize, BigUint)>,
    xf: Vec<f64>,
    yf: Vec<f64>,
    q: [BigUint; 2],
}

fn prepare(orbit: &OrbitTable, n: usize) -> Prepared {
    let q = [orbit.den[0].clone(), orbit.den[1].clone()];
    let mut xs: Vec<BigUint> = orbit.num[0][..n].to_vec();
    xs.push(BigUint::zero());
    xs.push(q[0].clone());
    xs.sort();
    xs.dedup();
    let mut pts: Vec<(usize, BigUint)> = (0..n)
        .map(|k| (xs.binary_search(&orbit.num[0][k]).expect("present"), orbit.num[1][k].clone()))
        .collect();
    pts.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let xf = xs.iter().map(|x| ratio_u(x, &q[0]).to_f64().unwrap_or(0.0)).collect();
    let yf = pts.iter().map(|p| ratio_u(&p.1, &q[1]).to_f64().unwrap_or(0.0)).collect();
    Prepared { xs, pts, xf, yf, q }
}

/// Best closed and open scores for the slab between x-ranks `i ≤ j`, in f64.
/// Closed: count − n·w·h over x_i ≤ x ≤ x_j; open: n·w·h − count over
/// x_i < x < x_j (only when i < j).
fn slab_scores_f64(p: &Prepared, i: usize, j: usize, n: f64) -> (f64, f64) {
    let nw = n * (p.xf[j] - p.xf[i]);
    let mut best_closed = 0.0f64;
    let mut cur: Option<f64> = None;
    let mut prev_y = 0.0;
    let mut g = 0.0f64;
    let mut best_open = f64::NEG_INFINITY;
    let mut open_y = 0.0;
    let mut open_c = 0.0;
    let len = p.pts.len();
    let mut t = 0;
    while t < len {
        let y = p.yf[t];
        let (c_closed, c_open, s) = group_counts(p, t, i, j);
        if c_closed > 0 {
            let c = c_closed as f64;
            let next = match cur {
                None => c,
                Some(v) => c + (v - nw * (y - prev_y)).max(0.0),
            };
            best_closed = best_closed.max(next);
            cur = Some(next);
            prev_y = y;
        }
        if j > i && c_open > 0 && !p.pts[t].1.is_zero() {
            g = nw * (y - open_y) + (g - open_c).max(0.0);
            best_open = best_open.max(g);
            open_y = y;
            open_c = c_open as f64;
        }
        t = s;
    }
    if j > i {
        g = nw * (1.0 - open_y) + (g - open_c).max(0.0);
        best_open = best_open.max(g);
    }
    (best_closed, best_open)
}

/// Counts of the y-group starting at `t` inside the closed and open slabs,
/// and the index past the group.
fn group_counts(p: &Prepared, t: usize, i: usize, j: usize) -> (u64, u64, usize) {
    let yv = &p.pts[t].1;
    let (mut closed, mut open) = (0, 0);
    let mut s = t;
    while s < p.pts.len() && p.pts[s].1 == *yv {
        let r = p.pts[s].0;
        if r >= i && r <= j {
            closed += 1;
        }
        if r > i && r < j {
            open += 1;
        }
        s += 1;
    }
    (closed, open, s)
}

/// Exact version of [`slab_scores_f64`], scaled by q₁·q₂.
fn slab_scores_exact(p: &Prepared, i: usize, j: usize, n: usize) -> (BigInt, BigInt) {
    let q1q2 = BigInt::from(&p.q[0] * &p.q[1]);
    let nw = BigInt::from(&p.xs[j] - &p.xs[i]) * BigInt::from(n);
    let zero = BigInt::zero();
    let pos = |v: BigInt| if v > BigInt::zero() { v } else { BigInt::zero() };
    let mut best_closed = zero.clone();
    let mut cur: Option<BigInt> = None;
    let mut prev_y = BigInt::zero();
    let mut g = BigInt::zero();
    let mut best_open: Option<BigInt> = None;
    let mut open_y = BigInt::zero();
    let mut open_c = BigInt::zero();
    let len = p.pts.len();
    let mut t = 0;
    while t < len {
        let y = BigInt::from(p.pts[t].1.clone());
        let (c_closed, c_open, s) = group_counts(p, t, i, j);
        if c_closed > 0 {
            let c = &q1q2 * c_closed;
            let next = match cur.take() {
                None => c,
                Some(v) => c + pos(v - &nw * (&y - &prev_y)),
            };
            if next > best_closed {
                best_closed = next.clone();
            }
            cur = Some(next);
            prev_y = y.clone();
        }
        if j > i && c_open > 0 && !y.is_zero() {
            g = &nw * (&y - &open_y) + pos(&g - &open_c);
            if best_open.as_ref().is_none_or(|b| g > *b) {
                best_open = Some(g.clone());
            }
            open_y = y;
            open_c = &q1q2 * c_open;
        }
        t = s;
    }
    if j > i {
        g = &nw * (BigInt::from(p.q[1].clone()) - &open_y) + pos(&g - &open_c);
        if best_open.as_ref().is_none_or(|b| g > *b) {
            best_open = Some(g);
        }
    }
    (best_closed, best_open.unwrap_or_else(|| BigInt::from(-1)))
}

fn exact_discrepancy(orbit: &OrbitTable, n: usize) -> BigRational {
    let p = prepare(orbit, n);
    let m = p.xs.len();
    let nf = n as f64;
    let rows: Vec<Vec<(f64, f64)>> = (0..m)
        .into_par_iter()
        .map(|i| (i..m).map(|j| slab_scores_f64(&p, i, j, nf)).collect())
        .collect();
    let mut best = f64::NEG_INFINITY;
    for row in &rows {
        for &(c, o) in row {
            best = best.max(c).max(o);
        }
    }
    let tol = 1e-6;
    let candidates: Vec<(usize, usize)> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(move |(_, &(c, o))| c.max(o) >= best - tol)
                .map(move |(dj, _)| (i, i + dj))
        })
        .collect();
    let exact_best = candidates
        .par_iter()
        .map(|&(i, j)| {
            let (c, o) = slab_scores_exact(&p, i, j, n);
            if c >= o {
                c
            } else {
                o
            }
        })
        .max()
        .expect("at least one slab");
    let den = BigInt::from(&p.q[0] * &p.q[1]) * BigInt::from(n);
    BigRational::new(exact_best, den)
}

fn grid_discrepancy(orbit: &OrbitTable, n: usize, m: u32) -> BigRational {
    let m_us = m as usize;
    let mb = BigUint::from(m);
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); m_us];
    for k in 0..n {
        let cx = (&orbit.num[0][k] * &mb / &orbit.den[0]).to_usize().unwrap_or(0).min(m_us - 1);
        let cy = (&orbit.num[1][k] * &mb / &orbit.den[1]).to_usize().unwrap_or(0).min(m_us - 1);
        cols[cx].push(cy);
    }
    let m2 = (m as i64) * (m as i64);
    let ni = n as i64;
    let best = (0..m_us)
        .into_par_iter()
        .map(|a| {
            let mut col = vec![0i64; m_us];
            let mut best = 0i64;
            for b in a + 1..=m_us {
                for &y in &cols[b - 1] {
                    col[y] += 1;
                }
                let cost = ni * (b - a) as i64;
                let (mut hi, mut lo) = (i64::MIN, i64::MAX);
                let (mut run_hi, mut run_lo) = (0i64, 0i64);
                for &c in &col {
                    let v = c * m2 - cost;
                    run_hi = if run_hi > 0 { run_hi + v } else { v };
                    run_lo = if run_lo < 0 { run_lo + v } else { v };
                    hi = hi.max(run_hi);
                    lo = lo.min(run_lo);
                }
                best = best.max(hi).max(-lo);
            }
            best
        })
        .max()
        .unwrap_or(0);
    BigRational::new(BigInt::from(best), BigInt::from(ni * m2))
}

/// Fitted slope of log D_n against log n.
pub fn discrepancy_slope(series: &[(u64, BigRational)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = series.iter().map(|(n, d)| (*n as f64, crate::rigorous::to_f64(d))).collect();
    crate::stats::loglog_slope(&pts)
}

/// `x mod q` for signed `x`.
pub fn mod_uint(x: &BigInt, q: &BigUint) -> BigUint {
    let qi = BigInt::from(q.clone());
    x.mod_floor(&qi).magnitude().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::synthesize_alpha_pair;
    use crate::rigorous::rat;
    use proptest::prelude::*;

    fn alpha(x: BigRational, y: BigRational) -> TruncatedAlpha {
        TruncatedAlpha::exact(x, y)
    }

    /// Independent oracle: every rectangle with edges in the full coordinate
    /// set, closed and open variants.
    fn brute_force(orbit: &OrbitTable, n: usize) -> BigRational {
        let pts: Vec<TorusPoint2> = (0..n).map(|k| orbit.point(k)).collect();
        let mut xs: Vec<BigRational> = pts.iter().map(|p| p.coord(0).clone()).collect();
        let mut ys: Vec<BigRational> = pts.iter().map(|p| p.coord(1).clone()).collect();
        for v in [&mut xs, &mut ys] {
            v.push(BigRational::zero());
            v.push(BigRational::one());
            v.sort();
            v.dedup();
        }
        let nn = BigRational::from_integer(BigInt::from(n));
        let mut best = BigRational::zero();
        for (a, x0) in xs.iter().enumerate() {
            for x1 in &xs[a..] {
                for (b, y0) in ys.iter().enumerate() {
                    for y1 in &ys[b..] {
                        let area = (x1 - x0) * (y1 - y0);
                        let closed = pts
                            .iter()
                            .filter(|p| p.coord(0) >= x0 && p.coord(0) <= x1 && p.coord(1) >= y0 && p.coord(1) <= y1)
                            .count();
                        let open = pts
                            .iter()
                            .filter(|p| p.coord(0) > x0 && p.coord(0) < x1 && p.coord(1) > y0 && p.coord(1) < y1)
                            .count();
                        let d1 = BigRational::from_integer(closed.into()) / &nn - &area;
                        let d2 = &area - BigRational::from_integer(open.into()) / &nn;
                        best = best.max(d1).max(d2);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn orbit_small() {
        let o = rotation_orbit(&alpha(rat(1, 4), rat(1, 3)), 2).unwrap();
        assert_eq!(o.point(0), TorusPoint2::origin());
        assert_eq!(o.point(1), TorusPoint2::new([rat(1, 4), rat(1, 3)]));
        assert_eq!(o.point(2), TorusPoint2::new([rat(1, 2), rat(2, 3)]));
    }

    #[test]
    fn orbit_alias() {
        assert!(matches!(rotation_orbit(&alpha(rat(1, 4), rat(1, 3)), 3), Err(Error::OrbitAlias { .. })));
    }

    #[test]
    fn orbit_entries_formula_and_distinct() {
        let pair = synthesize_alpha_pair(2, None).unwrap();
        let a = pair.truncated();
        let o = rotation_orbit(&a, 1000).unwrap();
        let [(p, q), _] = a.fractions();
        for k in [0usize, 1, 17, 999, 1000] {
            assert_eq!(o.numerators(0)[k], (BigUint::from(k) * &p) % &q);
        }
        let mut pts: Vec<(BigUint, BigUint)> =
            (0..=1000).map(|k| (o.numerators(0)[k].clone(), o.numerators(1)[k].clone())).collect();
        pts.sort();
        pts.dedup();
        assert_eq!(pts.len(), 1001);
    }

    #[test]
    fn single_point() {
        let o = rotation_orbit(&alpha(rat(1, 4), rat(1, 3)), 1).unwrap();
        let d = rectangle_discrepancy(&o, 1, DiscrepancyMode::Exact).unwrap();
        assert_eq!(d.value, rat(1, 1));
    }

    #[test]
    fn two_points_half() {
        let o = rotation_orbit(&alpha(rat(1, 2), rat(1, 2)), 1).unwrap();
        let d = rectangle_discrepancy(&o, 2, DiscrepancyMode::Exact).unwrap();
        assert_eq!(d.value, brute_force(&o, 2));
        assert_eq!(d.value, rat(3, 4));
    }

    #[test]
    fn empty_prefix() {
        let o = rotation_orbit(&alpha(rat(1, 4), rat(1, 3)), 1).unwrap();
        assert!(matches!(rectangle_discrepancy(&o, 0, DiscrepancyMode::Exact), Err(Error::EmptyPrefix)));
    }

    #[test]
    fn grid_close_to_exact() {
        let pair = synthesize_alpha_pair(2, None).unwrap();
        let o = rotation_orbit(&pair.truncated(), 200).unwrap();
        for n in [5u64, 50, 200] {
            let e = rectangle_discrepancy(&o, n, DiscrepancyMode::Exact).unwrap();
            let g = rectangle_discrepancy(&o, n, DiscrepancyMode::Grid(256)).unwrap();
            assert!(g.value <= &e.value + &g.error_bound);
            assert!(e.value <= &g.value + &g.error_bound);
        }
    }

    #[test]
    fn cubes() {
        let c = dyadic_cube(0, 0, 0, 0).unwrap();
        assert_eq!(c.volume(), rat(1, 1));
        assert!(c.square().is_full());
        assert!(dyadic_cube(2, 4, 0, 0).is_err());
        let c = dyadic_cube(3, 5, 1, 2).unwrap();
        assert_eq!(c.word(), vec![1, 0, 1]);
        assert_eq!(c.zeros_in_word(), 1);
        assert_eq!(c.volume(), rat(1, 512));
        assert_eq!(c.interval(), (rat(5, 8), rat(6, 8)));
        assert!(c.contains(&TorusPoint3::new([rat(5, 8), rat(1, 8), rat(2, 8)])));
        assert!(!c.contains(&TorusPoint3::new([rat(6, 8), rat(1, 8), rat(2, 8)])));
    }

    #[test]
    fn enlarge() {
        let c = dyadic_cube(2, 0, 1, 1).unwrap();
        let (r, clipped) = enlarge_square(&c.square(), 3);
        assert!(!clipped);
        assert_eq!(r.half()[0], rat(3, 8));
        assert_eq!(r.area(), rat(9, 16));
        assert_eq!(r.area(), c.square().area() * rat(9, 1));
        let c = dyadic_cube(1, 0, 0, 0).unwrap();
        let (r, clipped) = enlarge_square(&c.square(), 3);
        assert!(clipped);
        assert!(r.is_full());
    }

    #[test]
    fn guarded_membership() {
        let r = Rect2::new(TorusPoint2::new([rat(1, 2), rat(1, 2)]), [rat(1, 4), rat(1, 4)]).unwrap();
        let edge = TorusPoint2::new([rat(3, 4), rat(1, 2)]);
        assert!(r.contains(&edge));
        assert_eq!(r.contains_guarded(&edge, &rat(1, 1000)), None);
        assert_eq!(r.contains_guarded(&TorusPoint2::new([rat(1, 2), rat(1, 2)]), &rat(1, 1000)), Some(true));
        assert_eq!(r.contains_guarded(&TorusPoint2::origin(), &rat(1, 1000)), Some(false));
        assert!(Rect2::new(TorusPoint2::origin(), [rat(0, 1), rat(1, 4)]).is_err());
    }

    #[test]
    fn wraparound_distance() {
        let a = TorusPoint2::new([rat(1, 10), rat(9, 10)]);
        let b = TorusPoint2::new([rat(9, 10), rat(1, 10)]);
        assert_eq!(a.dist(&b), rat(1, 5));
        assert_eq!(TorusPoint2::new([rat(-1, 4), rat(5, 4)]), TorusPoint2::new([rat(3, 4), rat(1, 4)]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn exact_matches_brute_force(p1 in 1i64..200, q1 in 40i64..200, p2 in 1i64..200, q2 in 40i64..200, n in 1usize..=14) {
            let a = alpha(rat(p1 % q1, q1), rat(p2 % q2, q2));
            let [(_, d1), (_, d2)] = a.fractions();
            let cap = d1.min(d2).to_usize().unwrap();
            prop_assume!(n < cap);
            let o = rotation_orbit(&a, n as u64).unwrap();
            let d = rectangle_discrepancy(&o, n as u64, DiscrepancyMode::Exact).unwrap();
            prop_assert_eq!(&d.value, &brute_force(&o, n));
            prop_assert!(d.value > BigRational::zero() && d.value <= BigRational::one());
            let g = rectangle_discrepancy(&o, n as u64, DiscrepancyMode::Grid(64)).unwrap();
            prop_assert!(g.value <= &d.value + &g.error_bound);
        }
    }
}
