//! Real quadratic surds `(a + b*sqrt(d))/e` with exact, decidable ordering.
//!
//! Canonical form: `e > 0`, `gcd(a, b, e) = 1`, `d` squarefree, and `d = 0`
//! exactly when the value is rational (`b = 0`). All comparisons reduce to
//! integer sign tests of `x + y*sqrt(d)`, settled by squaring — no rounding
//! anywhere.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Ratio;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    a: BigInt,
    b: BigInt,
    d: u64,
    e: BigInt,
}

impl Surd {
    /// Builds `(a + b*sqrt(d))/e` and normalizes to canonical form.
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        d: u64,
        e: impl Into<BigInt>,
    ) -> Result<Surd> {
        let mut a: BigInt = a.into();
        let mut b: BigInt = b.into();
        let mut e: BigInt = e.into();
        let mut d = d;
        if e.is_zero() {
            return Err(Error::invalid("surd denominator must be nonzero"));
        }
        if e.is_negative() {
            a = -a;
            b = -b;
            e = -e;
        }
        if b.is_zero() || d == 0 {
            b = BigInt::zero();
            d = 0;
        } else {
            let (sf, root) = squarefree_decompose(d);
            b *= BigInt::from(root);
            d = sf;
            if d == 1 {
                a += std::mem::take(&mut b);
                d = 0;
            }
        }
        let g = a.gcd(&b).gcd(&e);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            e /= &g;
        }
        Ok(Surd { a, b, d, e })
    }

    pub fn from_ratio(r: &Ratio) -> Surd {
        Surd {
            a: r.numer().clone(),
            b: BigInt::zero(),
            d: 0,
            e: r.denom().clone(),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact rational value, when the surd is rational.
    pub fn as_ratio(&self) -> Option<Ratio> {
        self.is_rational()
            .then(|| Ratio::new(self.a.clone(), self.e.clone()))
    }

    /// The radicand in canonical form (0 for rational values).
    pub fn radicand(&self) -> u64 {
        self.d
    }

    /// Sign of the value.
    pub fn sign(&self) -> Ordering {
        sign_with_sqrt(&self.a, &self.b, self.d)
    }

    /// Exact comparison against a rational.
    pub fn cmp_ratio(&self, r: &Ratio) -> Ordering {
        // (a + b√d)/e − p/q has the sign of (aq − pe) + bq√d  (e, q > 0).
        let x = &self.a * r.denom() - r.numer() * &self.e;
        let y = &self.b * r.denom();
        sign_with_sqrt(&x, &y, self.d)
    }

    fn cmp_int(&self, m: &BigInt) -> Ordering {
        let x = &self.a - m * &self.e;
        sign_with_sqrt(&x, &self.b, self.d)
    }

    /// Exact comparison against another surd (radicands may differ).
    pub fn cmp_surd(&self, other: &Surd) -> Ordering {
        // self − other has the sign of X + Y√d − Z√d' with
        // X = a e' − a' e, Y = b e', Z = b' e  (e, e' > 0).
        let x = &self.a * &other.e - &other.a * &self.e;
        let y = &self.b * &other.e;
        let z = &other.b * &self.e;
        if self.d == other.d || z.is_zero() {
            return sign_with_sqrt(&x, &(y - z), self.d);
        }
        if y.is_zero() {
            return sign_with_sqrt(&x, &(-z), other.d);
        }
        // Compare U = X + Y√d against V = Z√d'.
        let su = sign_with_sqrt(&x, &y, self.d);
        let sv = z.cmp(&BigInt::zero());
        match (su, sv) {
            (Ordering::Greater, Ordering::Less | Ordering::Equal) => Ordering::Greater,
            (Ordering::Less, Ordering::Greater | Ordering::Equal) => Ordering::Less,
            (Ordering::Equal, s) => s.reverse(),
            (s, _) => {
                // Same nonzero sign: compare squares. U² − V² =
                // (X² + Y²d − Z²d') + 2XY√d, and the mixed term is zero or
                // irrational, so the sign test below is exact.
                let rat = &x * &x + &y * &y * BigInt::from(self.d)
                    - &z * &z * BigInt::from(other.d);
                let mixed = BigInt::from(2) * &x * &y;
                let sq = sign_with_sqrt(&rat, &mixed, self.d);
                if s == Ordering::Greater {
                    sq
                } else {
                    sq.reverse()
                }
            }
        }
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        // Integer bound on the numerator a + b√d, then a guarded fixup.
        let rad = &self.b * &self.b * BigInt::from(self.d);
        let root = rad.sqrt();
        let num_guess = if self.b.is_negative() {
            &self.a - &root - 1
        } else {
            &self.a + &root
        };
        let mut m = num_guess.div_floor(&self.e);
        let one = BigInt::one();
        while self.cmp_int(&(&m + &one)) != Ordering::Less {
            m += &one;
        }
        while self.cmp_int(&m) == Ordering::Less {
            m -= &one;
        }
        m
    }

    /// Fractional part `x - floor(x)` as a surd in `[0, 1)`.
    pub fn fract(&self) -> Surd {
        let f = self.floor();
        self.add_int(&(-f))
    }

    pub fn add_int(&self, m: &BigInt) -> Surd {
        Surd::new(&self.a + m * &self.e, self.b.clone(), self.d, self.e.clone())
            .expect("denominator unchanged")
    }

    pub fn add_ratio(&self, r: &Ratio) -> Surd {
        Surd::new(
            &self.a * r.denom() + r.numer() * &self.e,
            &self.b * r.denom(),
            self.d,
            &self.e * r.denom(),
        )
        .expect("denominator positive")
    }

    pub fn mul_ratio(&self, r: &Ratio) -> Surd {
        Surd::new(
            &self.a * r.numer(),
            &self.b * r.numer(),
            self.d,
            &self.e * r.denom(),
        )
        .expect("denominator nonzero")
    }

    pub fn neg(&self) -> Surd {
        Surd {
            a: -self.a.clone(),
            b: -self.b.clone(),
            d: self.d,
            e: self.e.clone(),
        }
    }

    /// Reciprocal; errors on zero.
    pub fn recip(&self) -> Result<Surd> {
        if self.sign() == Ordering::Equal {
            return Err(Error::invalid("division by a zero surd"));
        }
        // e/(a + b√d) = e(a − b√d)/(a² − b²d).
        let den = &self.a * &self.a - &self.b * &self.b * BigInt::from(self.d);
        Surd::new(&self.a * &self.e, -(&self.b * &self.e), self.d, den)
    }

    /// Möbius image `(n1·x + n0)/(d1·x + d0)`; errors when the denominator
    /// vanishes (impossible for irrational `x` with integer coefficients
    /// unless both are zero).
    pub fn mobius(&self, n1: &BigInt, n0: &BigInt, d1: &BigInt, d0: &BigInt) -> Result<Surd> {
        // Numerator and denominator share the overall /e, which cancels.
        let na = n1 * &self.a + n0 * &self.e;
        let nb = n1 * &self.b;
        let da = d1 * &self.a + d0 * &self.e;
        let db = d1 * &self.b;
        let d_big = BigInt::from(self.d);
        let denom = &da * &da - &db * &db * &d_big;
        if denom.is_zero() {
            return Err(Error::invalid("Möbius transform denominator vanishes"));
        }
        // (na + nb√d)(da − db√d) = (na·da − nb·db·d) + (nb·da − na·db)√d.
        Surd::new(
            &na * &da - &nb * &db * &d_big,
            &nb * &da - &na * &db,
            self.d,
            denom,
        )
    }

    /// Raw canonical parts `(a, b, d, e)`.
    pub fn parts(&self) -> (&BigInt, &BigInt, u64, &BigInt) {
        (&self.a, &self.b, self.d, &self.e)
    }
}

/// Sign of `x + y*sqrt(d)` for integers `x`, `y` and nonnegative `d`.
///
/// Settled by squaring; equality is reported only when the value is exactly
/// zero (which for squarefree `d ≥ 2` forces `x = y = 0`).
pub(crate) fn sign_with_sqrt(x: &BigInt, y: &BigInt, d: u64) -> Ordering {
    if y.is_zero() || d == 0 {
        return x.cmp(&BigInt::zero());
    }
    let sx = x.cmp(&BigInt::zero());
    let sy = y.cmp(&BigInt::zero());
    match (sx, sy) {
        (Ordering::Greater | Ordering::Equal, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less | Ordering::Equal, Ordering::Less) => Ordering::Less,
        (Ordering::Greater, Ordering::Less) | (Ordering::Less, Ordering::Greater) => {
            let lhs = x * x;
            let rhs = y * y * BigInt::from(d);
            // x and y√d have opposite signs; |x| decides.
            match lhs.cmp(&rhs) {
                Ordering::Greater => sx,
                Ordering::Less => sy,
                Ordering::Equal => Ordering::Equal,
            }
        }
        _ => unreachable!("zero/zero handled above"),
    }
}

/// Splits `d` into `(squarefree, root)` with `d = squarefree * root²`.
fn squarefree_decompose(d: u64) -> (u64, u64) {
    let mut sf: u64 = 1;
    let mut root: u64 = 1;
    for (p, mult) in factor_u64(d) {
        if mult % 2 == 1 {
            sf *= p;
        }
        root *= p.pow(mult / 2);
    }
    (sf, root)
}

/// Prime factorization of a u64 via trial division plus Brent's rho.
pub(crate) fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut out = std::collections::BTreeMap::new();
    let mut n = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            *out.entry(p).or_insert(0u32) += 1;
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m <= 1 {
            continue;
        }
        if is_prime_u64(m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        let f = brent_rho(m);
        stack.push(f);
        stack.push(m / f);
    }
    out.into_iter().collect()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for u64.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn brent_rho(n: u64) -> u64 {
    // n is odd, composite, and free of small factors here.
    let mut c: u64 = 1;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x: u64 = 2;
        let mut y: u64 = 2;
        let mut d: u64 = 1;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_negative() {
            write!(f, "({}-{}*sqrt({}))/{}", self.a, -&self.b, self.d, self.e)
        } else {
            write!(f, "({}+{}*sqrt({}))/{}", self.a, self.b, self.d, self.e)
        }
    }
}

impl FromStr for Surd {
    type Err = Error;

    /// Parses `(a+b*sqrt(d))/e` (also `a-b*...`), tolerating spaces.
    fn from_str(input: &str) -> Result<Surd> {
        let mut p = Lexer::new(input);
        p.expect('(')?;
        let a = p.integer("rational part a")?;
        let sign = p.plus_or_minus()?;
        let b_mag = p.integer("coefficient b")?;
        p.expect('*')?;
        p.keyword("sqrt")?;
        p.expect('(')?;
        let d = p.integer("radicand d")?;
        p.expect(')')?;
        p.expect(')')?;
        p.expect('/')?;
        let e = p.integer("denominator e")?;
        p.end()?;
        let d = u64::try_from(&d)
            .map_err(|_| Error::parse(input, 0, "radicand d out of supported range"))?;
        if e <= BigInt::zero() {
            return Err(Error::parse(input, 0, "denominator e must be positive"));
        }
        let b = if sign == '-' { -b_mag } else { b_mag };
        Surd::new(a, b, d, e)
    }
}

/// Minimal cursor-based lexer shared by the literal parsers.
pub(crate) struct Lexer<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(input: &'a str) -> Self {
        Lexer {
            input,
            bytes: input.as_bytes(),
            pos: 0,
        }
    }

    pub fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.input[self.pos..].chars().next()
    }

    pub fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(Error::parse(self.input, self.pos, format!("expected '{c}'")))
        }
    }

    pub fn keyword(&mut self, kw: &str) -> Result<()> {
        self.skip_ws();
        if self.input[self.pos..].starts_with(kw) {
            self.pos += kw.len();
            Ok(())
        } else {
            Err(Error::parse(
                self.input,
                self.pos,
                format!("expected '{kw}'"),
            ))
        }
    }

    pub fn plus_or_minus(&mut self) -> Result<char> {
        self.skip_ws();
        match self.peek() {
            Some(c @ ('+' | '-')) => {
                self.pos += 1;
                Ok(c)
            }
            _ => Err(Error::parse(self.input, self.pos, "expected '+' or '-'")),
        }
    }

    pub fn integer(&mut self, what: &str) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') || self.peek() == Some('+') {
            self.pos += 1;
        }
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.input[start..self.pos].parse().map_err(|_| {
            Error::parse(self.input, start, format!("expected an integer for {what}"))
        })
    }

    pub fn end(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(Error::parse(self.input, self.pos, "trailing input"))
        }
    }
}
