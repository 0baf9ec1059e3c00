//! Certified enclosures for the dimension-bound function.
//!
//! The function of interest is
//!
//! ```text
//! g(c) = 2^{−c} · Σ_{j≥1} j^{−2c},     c ∈ (1/2, 1],
//! ```
//!
//! which is continuous and strictly decreasing, blows up as `c → 1/2⁺`, and
//! satisfies `g(1) = π²/12 < 1`; its unique crossing of 1 is the constant
//! `c*` bounding the Hausdorff dimension of the one-side-bounded set. All
//! arithmetic here is two-sided: values are closed intervals with exact
//! rational endpoints, every operation rounds outward on a dyadic grid, and
//! an inequality is asserted only when the whole interval sits on one side.
//! No floating point participates in any bound.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Euclid, One, Signed, Zero};

use crate::numkernel::{ratio, Ratio};
use crate::{Error, Result};

/// A certified enclosure `lo ≤ x ≤ hi` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    pub lo: Ratio,
    pub hi: Ratio,
}

impl Enclosure {
    pub fn width(&self) -> Ratio {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Ratio) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn strictly_above(&self, x: &Ratio) -> bool {
        &self.lo > x
    }

    pub fn strictly_below(&self, x: &Ratio) -> bool {
        &self.hi < x
    }
}

impl std::fmt::Display for Enclosure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

// ---------------------------------------------------------------------------
// fixed-point interval engine
//
// An `Fi` holds two mantissas at a shared scale 2^{−prec}: the value lies in
// [lo, hi]·2^{−prec}. Addition is exact; multiplication and conversions round
// outward by at most one grid step per endpoint.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Fi {
    lo: BigInt,
    hi: BigInt,
}

fn floor_shr(x: &BigInt, p: u32) -> BigInt {
    // BigInt >> rounds toward negative infinity (arithmetic shift), which is
    // exactly the floor; asserted in the tests below.
    x >> p
}

fn ceil_shr(x: &BigInt, p: u32) -> BigInt {
    -floor_shr(&-x, p)
}

struct Grid {
    prec: u32,
}

impl Grid {
    fn from_int(&self, n: i64) -> Fi {
        let m = BigInt::from(n) << self.prec;
        Fi {
            lo: m.clone(),
            hi: m,
        }
    }

    /// Outward conversion of an exact rational.
    fn from_ratio(&self, r: &Ratio) -> Fi {
        let scaled = r.numer() << self.prec;
        let lo = scaled.div_euclid(r.denom());
        let hi = if (&lo * r.denom()) == scaled {
            lo.clone()
        } else {
            &lo + 1
        };
        Fi { lo, hi }
    }

    fn to_enclosure(&self, x: &Fi) -> Enclosure {
        let scale = BigInt::one() << self.prec;
        Enclosure {
            lo: Ratio::new(x.lo.clone(), scale.clone()),
            hi: Ratio::new(x.hi.clone(), scale),
        }
    }

    fn add(&self, a: &Fi, b: &Fi) -> Fi {
        Fi {
            lo: &a.lo + &b.lo,
            hi: &a.hi + &b.hi,
        }
    }

    fn sub(&self, a: &Fi, b: &Fi) -> Fi {
        Fi {
            lo: &a.lo - &b.hi,
            hi: &a.hi - &b.lo,
        }
    }

    fn mul(&self, a: &Fi, b: &Fi) -> Fi {
        let c1 = &a.lo * &b.lo;
        let c2 = &a.lo * &b.hi;
        let c3 = &a.hi * &b.lo;
        let c4 = &a.hi * &b.hi;
        let lo = (&c1).min(&c2).min(&c3).min(&c4);
        let hi = (&c1).max(&c2).max(&c3).max(&c4);
        Fi {
            lo: floor_shr(lo, self.prec),
            hi: ceil_shr(hi, self.prec),
        }
    }

    /// Exact scaling by an integer (no rounding).
    fn mul_int(&self, a: &Fi, n: i64) -> Fi {
        let x = &a.lo * n;
        let y = &a.hi * n;
        if n >= 0 {
            Fi { lo: x, hi: y }
        } else {
            Fi { lo: y, hi: x }
        }
    }

    /// Outward scaling by an exact rational.
    fn mul_ratio(&self, a: &Fi, r: &Ratio) -> Fi {
        let x = &a.lo * r.numer();
        let y = &a.hi * r.numer();
        let (lo_num, hi_num) = if x <= y { (x, y) } else { (y, x) };
        let lo = lo_num.div_euclid(r.denom());
        let hi_floor = hi_num.div_euclid(r.denom());
        let hi = if (&hi_floor * r.denom()) == hi_num {
            hi_floor
        } else {
            hi_floor + 1
        };
        Fi { lo, hi }
    }

    /// Outward division by a positive integer.
    fn div_uint(&self, a: &Fi, n: u64) -> Fi {
        let n = BigInt::from(n);
        let lo = a.lo.div_euclid(&n);
        let hi_floor = a.hi.div_euclid(&n);
        let hi = if (&hi_floor * &n) == a.hi {
            hi_floor
        } else {
            hi_floor + 1
        };
        Fi { lo, hi }
    }

    /// Magnitude bound of the interval, in grid units.
    fn mag(&self, a: &Fi) -> BigInt {
        a.lo.abs().max(a.hi.abs())
    }

    /// `atanh(x)` for an exact rational `0 < x < 1`, by the odd power series
    /// with an explicit geometric tail bound.
    fn atanh_ratio(&self, x: &Ratio) -> Fi {
        assert!(
            x > &Ratio::zero() && x < &Ratio::one(),
            "atanh argument out of range"
        );
        let x2 = x * x;
        let mut acc = self.from_int(0);
        let mut pow = x.clone(); // x^{2t+1}, exact
        let mut t: u64 = 0;
        let eps = BigInt::from(2); // stop once a term is ≤ 2 grid units
        loop {
            let term = &pow / Ratio::from(BigInt::from(2 * t + 1));
            let term_fi = self.from_ratio(&term);
            let small = self.mag(&term_fi) <= eps;
            acc = self.add(&acc, &term_fi);
            pow = &pow * &x2;
            if small {
                // remaining terms are positive and bounded by the geometric
                // series pow/(2t+3) · (1 + x² + x⁴ + …) = pow/((2t+3)(1−x²))
                let tail = (&pow / Ratio::from(BigInt::from(2 * t + 3)))
                    / (Ratio::one() - &x2);
                acc.hi += self.from_ratio(&tail).hi;
                return acc;
            }
            t += 1;
        }
    }

    /// `exp(x)` for an interval `x` with |x| ≤ ~40, by range reduction
    /// `x = n·ln2 + r` and the Taylor series with a factorial tail bound.
    fn exp(&self, x: &Fi, ln2: &Fi) -> Fi {
        // pick n ≈ x/ln2 from the midpoint (any nearby integer works;
        // correctness never depends on the choice, only |r| stays small)
        let mid = (&x.lo + &x.hi) >> 1;
        let approx = &mid * 1443i64 / 1000i64; // 1/ln2 ≈ 1.4427
        let half = BigInt::one() << (self.prec - 1);
        let n_big = floor_shr(&(&approx + &half), self.prec);
        let n = i64::try_from(&n_big).expect("reduction exponent fits i64");
        let r = self.sub(x, &self.mul_int(ln2, n));

        let mut acc = self.from_int(1);
        let mut term = self.from_int(1);
        let mut t: u64 = 1;
        let eps = BigInt::from(4);
        loop {
            term = self.div_uint(&self.mul(&term, &r), t);
            acc = self.add(&acc, &term);
            let m = self.mag(&term);
            if m <= eps {
                // |Σ_{s>t} r^s/s!| ≤ |term|·Σ_{s≥1} (|r|/(t+1))^s < |term|
                // for |r| ≤ 1/2 < t+1, with a grid unit of slack
                let pad = &m + 1;
                acc.lo -= &pad;
                acc.hi += pad;
                break;
            }
            t += 1;
            assert!(t < 500, "exp series failed to converge");
        }

        // scale by 2^n
        if n >= 0 {
            Fi {
                lo: acc.lo << n as u32,
                hi: acc.hi << n as u32,
            }
        } else {
            let p = (-n) as u32;
            Fi {
                lo: floor_shr(&acc.lo, p),
                hi: ceil_shr(&acc.hi, p),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// prime machinery for the series Σ j^{−2c}
// ---------------------------------------------------------------------------

/// Smallest-prime-factor table for 0..=n.
fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf: Vec<u32> = vec![0; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

struct SeriesEngine {
    grid: Grid,
    spf: Vec<u32>,
    ln2: Fi,
    /// ln p for primes encountered so far.
    ln_prime: HashMap<u64, Fi>,
    /// p^{−2c} for primes encountered so far.
    pow_prime: HashMap<u64, Fi>,
    minus_two_c: Ratio,
}

impl SeriesEngine {
    fn new(prec: u32, c: &Ratio, initial_sieve: usize) -> SeriesEngine {
        let grid = Grid { prec };
        let ln2 = grid.mul_int(&grid.atanh_ratio(&ratio(1, 3)), 2);
        SeriesEngine {
            grid,
            spf: spf_sieve(initial_sieve),
            ln2,
            ln_prime: HashMap::new(),
            pow_prime: HashMap::new(),
            minus_two_c: c * Ratio::from(BigInt::from(-2)),
        }
    }

    fn ensure_sieve(&mut self, n: usize) {
        if self.spf.len() <= n {
            self.spf = spf_sieve(n);
        }
    }

    /// ln n for any n ≥ 1 inside the sieve, as a sum over prime factors.
    fn ln_int(&mut self, n: u64) -> Fi {
        let mut acc = self.grid.from_int(0);
        let mut x = n;
        while x > 1 {
            let p = self.spf[x as usize] as u64;
            let lp = self.ln_prime_value(p);
            acc = self.grid.add(&acc, &lp);
            x /= p;
        }
        acc
    }

    /// ln p for a prime p, via ln(p−1) (all of whose prime factors are
    /// smaller) plus the fast-converging correction 2·atanh(1/(2p−1)).
    fn ln_prime_value(&mut self, p: u64) -> Fi {
        if let Some(v) = self.ln_prime.get(&p) {
            return v.clone();
        }
        let v = if p == 2 {
            self.ln2.clone()
        } else {
            let base = self.ln_int(p - 1);
            let corr = self
                .grid
                .mul_int(&self.grid.atanh_ratio(&ratio(1, 2 * p as i64 - 1)), 2);
            self.grid.add(&base, &corr)
        };
        self.ln_prime.insert(p, v.clone());
        v
    }

    /// p^{−2c} = exp(−2c·ln p) for a prime p.
    fn pow_prime_value(&mut self, p: u64) -> Fi {
        if let Some(v) = self.pow_prime.get(&p) {
            return v.clone();
        }
        let lp = self.ln_prime_value(p);
        let arg = self.grid.mul_ratio(&lp, &self.minus_two_c);
        let ln2 = self.ln2.clone();
        let v = self.grid.exp(&arg, &ln2);
        self.pow_prime.insert(p, v.clone());
        v
    }

    /// j^{−2c} for any j ≥ 1 inside the sieve, multiplicatively over the
    /// prime factorization.
    fn term(&mut self, j: u64) -> Fi {
        let mut acc = self.grid.from_int(1);
        let mut x = j;
        while x > 1 {
            let p = self.spf[x as usize] as u64;
            let f = self.pow_prime_value(p);
            acc = self.grid.mul(&acc, &f);
            x /= p;
        }
        acc
    }

    /// x^s for integer x ≥ 1 in the sieve and exact rational exponent s.
    fn pow_rational_exp(&mut self, x: u64, s: &Ratio) -> Fi {
        let lx = self.ln_int(x);
        let arg = self.grid.mul_ratio(&lx, s);
        let ln2 = self.ln2.clone();
        self.grid.exp(&arg, &ln2)
    }
}

// ---------------------------------------------------------------------------
// g(c) and the crossing point
// ---------------------------------------------------------------------------

const SUM_START: u64 = 1 << 12;
const SUM_CAP: u64 = 1 << 22;

/// Certified enclosure of `g(c) = 2^{−c}·Σ_{j≥1} j^{−2c}` with width at most
/// `tol`. The series is summed exactly term-group by term-group up to a cut
/// `J`, and the remainder is sandwiched between the integral bounds
/// `∫_J^∞ x^{−2c} dx` and `∫_{J−1}^∞ x^{−2c} dx`; the cut grows until the
/// enclosure is narrow enough.
pub fn g_function(c: &Ratio, tol: &Ratio) -> Result<Enclosure> {
    let half = ratio(1, 2);
    if c <= &half {
        return Err(Error::invalid(format!(
            "g diverges for c ≤ 1/2 (got c = {c})"
        )));
    }
    if tol <= &Ratio::zero() {
        return Err(Error::invalid("tolerance must be positive"));
    }

    // grid resolution: comfortably below both the tolerance and the
    // accumulated per-term rounding of ~2^23 snapped operations
    let tol_bits = {
        let inv = tol.recip();
        inv.numer().div_euclid(inv.denom()).bits() as u32 + 1
    };
    let prec = 96u32.max(tol_bits + 48);

    if c == &Ratio::one() {
        return g_at_one(prec, tol);
    }

    let two_c_minus_one = c * Ratio::from(BigInt::from(2)) - Ratio::one();
    let inv_2c_minus_one = two_c_minus_one.recip();
    let one_minus_2c = -&two_c_minus_one;

    let mut eng = SeriesEngine::new(prec, c, SUM_START as usize + 1);
    let minus_c = -c;

    let mut sum = eng.grid.from_int(1); // j = 1
    let mut j: u64 = 2;
    let mut cut = SUM_START;
    loop {
        eng.ensure_sieve(cut as usize + 2);
        while j <= cut {
            let t = eng.term(j);
            sum = eng.grid.add(&sum, &t);
            j += 1;
        }
        // the summand decreases, so Σ_{j>J} is sandwiched by the integrals
        // from J+1 and from J: tail ∈ [(J+1)^{1−2c}, J^{1−2c}] / (2c−1)
        let t_lo = eng.pow_rational_exp(cut + 1, &one_minus_2c);
        let t_hi = eng.pow_rational_exp(cut, &one_minus_2c);
        let tail = Fi {
            lo: t_lo.lo.clone(),
            hi: t_hi.hi.clone(),
        };
        let tail = eng.grid.mul_ratio(&tail, &inv_2c_minus_one);
        let total = eng.grid.add(&sum, &tail);
        let ln2 = eng.ln2.clone();
        let factor = eng.grid.exp(&eng.grid.mul_ratio(&ln2, &minus_c), &ln2);
        let g = eng.grid.mul(&total, &factor);
        let enc = eng.grid.to_enclosure(&g);
        if &enc.width() <= tol {
            return Ok(enc);
        }
        if cut >= SUM_CAP {
            return Err(Error::budget(format!(
                "g({c}) cannot be enclosed to width {tol} within the summation cap {SUM_CAP}"
            )));
        }
        cut *= 2;
    }
}

/// Fast path at c = 1: every term is the exact rational 1/j² and the scale
/// factor is exactly 1/2.
fn g_at_one(prec: u32, tol: &Ratio) -> Result<Enclosure> {
    let grid = Grid { prec };
    let mut sum = grid.from_int(1);
    let mut j: u64 = 2;
    let mut cut = SUM_START;
    loop {
        while j <= cut {
            sum = grid.add(&sum, &grid.from_ratio(&Ratio::new(
                BigInt::one(),
                BigInt::from(j) * BigInt::from(j),
            )));
            j += 1;
        }
        let tail = Fi {
            lo: grid
                .from_ratio(&Ratio::new(BigInt::one(), BigInt::from(cut + 1)))
                .lo,
            hi: grid.from_ratio(&Ratio::new(BigInt::one(), BigInt::from(cut))).hi,
        };
        let total = grid.add(&sum, &tail);
        let g = grid.mul_ratio(&total, &ratio(1, 2));
        let enc = grid.to_enclosure(&g);
        if &enc.width() <= tol {
            return Ok(enc);
        }
        if cut >= SUM_CAP {
            return Err(Error::budget(format!(
                "g(1) cannot be enclosed to width {tol} within the summation cap {SUM_CAP}"
            )));
        }
        cut *= 2;
    }
}

/// One certified sample of g taken during the crossing search.
#[derive(Debug, Clone)]
pub struct GSample {
    pub c: Ratio,
    pub value: Enclosure,
}

/// A certified bracket for the crossing point `c*` of `g(c) = 1`, together
/// with the g-samples that establish it: `g(lower) > 1 > g(upper)`, so the
/// Hausdorff dimension of the one-side-bounded set is at most `upper < 1`.
#[derive(Debug, Clone)]
pub struct DimBound {
    pub lower: Ratio,
    pub upper: Ratio,
    pub tolerance: Ratio,
    pub g_samples: Vec<GSample>,
}

impl DimBound {
    pub fn to_json(&self) -> serde_json::Value {
        let ratio_str = |r: &Ratio| r.to_string();
        serde_json::json!({
            "c_star_lower": ratio_str(&self.lower),
            "c_star_upper": ratio_str(&self.upper),
            "tolerance": ratio_str(&self.tolerance),
            "g_samples": self.g_samples.iter().map(|s| {
                serde_json::json!({
                    "c": ratio_str(&s.c),
                    "g_lower": ratio_str(&s.value.lo),
                    "g_upper": ratio_str(&s.value.hi),
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// Decides g(c) against 1 with escalating precision; records the decisive
/// sample.
fn side_of_one(c: &Ratio, samples: &mut Vec<GSample>) -> Result<Ordering> {
    let one = Ratio::one();
    let mut tol = ratio(1, 8);
    for _ in 0..8 {
        let enc = g_function(c, &tol)?;
        let verdict = if enc.strictly_above(&one) {
            Some(Ordering::Greater)
        } else if enc.strictly_below(&one) {
            Some(Ordering::Less)
        } else {
            None
        };
        if let Some(v) = verdict {
            samples.push(GSample {
                c: c.clone(),
                value: enc,
            });
            return Ok(v);
        }
        tol /= Ratio::from(BigInt::from(1024));
    }
    Err(Error::budget(format!(
        "cannot separate g({c}) from 1; the sample point is too close to the crossing"
    )))
}

/// Bisects for the crossing point of `g(c) = 1`, starting from the certified
/// bracket `[51/100, 1]` (g blows up toward 1/2 and g(1) = π²/12 < 1), until
/// the bracket is narrower than `tolerance`.
pub fn cstar(tolerance: &Ratio) -> Result<DimBound> {
    if tolerance <= &Ratio::zero() {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let mut samples = Vec::new();
    let mut lo = ratio(51, 100);
    let mut hi = Ratio::one();
    if side_of_one(&lo, &mut samples)? != Ordering::Greater {
        return Err(Error::internal("g(51/100) should certify above 1"));
    }
    if side_of_one(&hi, &mut samples)? != Ordering::Less {
        return Err(Error::internal("g(1) should certify below 1"));
    }
    while &(&hi - &lo) >= tolerance {
        let mid = (&lo + &hi) / Ratio::from(BigInt::from(2));
        match side_of_one(&mid, &mut samples)? {
            Ordering::Greater => lo = mid,
            Ordering::Less => hi = mid,
            Ordering::Equal => unreachable!("side_of_one never returns Equal"),
        }
    }
    Ok(DimBound {
        lower: lo,
        upper: hi,
        tolerance: tolerance.clone(),
        g_samples: samples,
    })
}

/// A certified bracket of π²/12 of width far below 10⁻²⁵, produced by an
/// arctangent identity with alternating-series partial sums. Used as an
/// independent reference value for validating `g(1)`.
pub fn pi_squared_over_twelve_bounds() -> (Ratio, Ratio) {
    // atan partial sums alternate around the limit for 0 < x < 1
    fn atan_bracket(x: &Ratio, terms: u32) -> (Ratio, Ratio) {
        let x2 = x * x;
        let mut pow = x.clone();
        let mut acc = Ratio::zero();
        let mut prev = Ratio::zero();
        for t in 0..terms {
            let term = &pow / Ratio::from(BigInt::from(2 * t + 1));
            prev = acc.clone();
            if t % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
            pow = &pow * &x2;
        }
        if &acc < &prev {
            (acc, prev)
        } else {
            (prev, acc)
        }
    }
    let (a1_lo, a1_hi) = atan_bracket(&ratio(1, 5), 40);
    let (a2_lo, a2_hi) = atan_bracket(&ratio(1, 239), 40);
    let sixteen = Ratio::from(BigInt::from(16));
    let four = Ratio::from(BigInt::from(4));
    let pi_lo = &sixteen * &a1_lo - &four * &a2_hi;
    let pi_hi = &sixteen * &a1_hi - &four * &a2_lo;
    assert!(pi_lo > Ratio::from(BigInt::from(3)));
    let twelve = Ratio::from(BigInt::from(12));
    (&pi_lo * &pi_lo / &twelve, &pi_hi * &pi_hi / &twelve)
}
