//! Continued-fraction expansions: finite (rational) and eventually periodic
//! (quadratic irrational), with exact conversions in both directions.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::surd::{Lexer, Surd};
use super::Ratio;
use crate::{Error, Result};

/// Iteration guard for the quadratic-surd expansion loop. Periods of real
/// inputs are far shorter; hitting this means the request is out of scope.
const MAX_EXPANSION_STEPS: usize = 1_000_000;

/// A continued fraction `[a0; a1, a2, ...]`, either finite or eventually
/// periodic.
///
/// `prefix` holds the leading terms and `period` the repeating block; an
/// empty period means a finite (rational) expansion. An empty prefix with a
/// nonempty period is allowed and denotes a purely periodic expansion.
/// Validity: the index-0 term is `>= 0`, every later term is `>= 1` (hence
/// all period entries are `>= 1`), and finite expansions are kept canonical
/// (length > 1 never ends in 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion {
    prefix: Vec<BigInt>,
    period: Vec<BigInt>,
}

impl CfExpansion {
    pub fn new(prefix: Vec<BigInt>, period: Vec<BigInt>) -> Result<CfExpansion> {
        if prefix.is_empty() && period.is_empty() {
            return Err(Error::invalid("continued fraction needs at least one term"));
        }
        for (i, t) in prefix.iter().enumerate() {
            if i == 0 {
                if t.is_negative() {
                    return Err(Error::invalid("term a0 must be nonnegative"));
                }
            } else if t < &BigInt::one() {
                return Err(Error::invalid(format!("term a{i} must be at least 1")));
            }
        }
        for t in &period {
            if t < &BigInt::one() {
                return Err(Error::invalid("period terms must be at least 1"));
            }
        }
        let mut prefix = prefix;
        if period.is_empty() && prefix.len() > 1 && prefix.last() == Some(&BigInt::one()) {
            prefix.pop();
            *prefix.last_mut().expect("length >= 1") += BigInt::one();
        }
        Ok(CfExpansion { prefix, period })
    }

    pub fn from_i64(prefix: &[i64], period: &[i64]) -> Result<CfExpansion> {
        CfExpansion::new(
            prefix.iter().map(|&x| BigInt::from(x)).collect(),
            period.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn prefix(&self) -> &[BigInt] {
        &self.prefix
    }

    pub fn period(&self) -> &[BigInt] {
        &self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Index of the last term of a finite expansion.
    pub fn last_index(&self) -> Option<usize> {
        self.is_finite().then(|| self.prefix.len() - 1)
    }

    /// Term `a_n`; `None` past the end of a finite expansion.
    pub fn term(&self, n: usize) -> Option<&BigInt> {
        if n < self.prefix.len() {
            Some(&self.prefix[n])
        } else if self.period.is_empty() {
            None
        } else {
            Some(&self.period[(n - self.prefix.len()) % self.period.len()])
        }
    }

    /// Exact value of a finite expansion.
    pub fn rational_value(&self) -> Option<Ratio> {
        if !self.is_finite() {
            return None;
        }
        let (p, _, q, _) = continuants(&self.prefix);
        Some(Ratio::new(p, q))
    }

    /// Term-sequence equality (value-level for the expansion as a sequence),
    /// robust to different prefix/period representations of the same
    /// eventually periodic sequence.
    pub fn terms_eq(&self, other: &CfExpansion) -> bool {
        match (self.is_finite(), other.is_finite()) {
            (true, true) => self.prefix == other.prefix,
            (true, false) | (false, true) => false,
            (false, false) => {
                let bound = self.prefix.len().max(other.prefix.len())
                    + self.period.len().lcm(&other.period.len());
                (0..bound).all(|n| self.term(n) == other.term(n))
            }
        }
    }
}

/// Convergent seeds and recursion over an arbitrary term slice:
/// returns `(p_last, p_prev, q_last, q_prev)` with seeds
/// `p_{-2}=0, p_{-1}=1, q_{-2}=1, q_{-1}=0`.
pub(crate) fn continuants(terms: &[BigInt]) -> (BigInt, BigInt, BigInt, BigInt) {
    let mut p_prev = BigInt::zero();
    let mut p_last = BigInt::one();
    let mut q_prev = BigInt::one();
    let mut q_last = BigInt::zero();
    for a in terms {
        let p = a * &p_last + &p_prev;
        let q = a * &q_last + &q_prev;
        p_prev = std::mem::replace(&mut p_last, p);
        q_prev = std::mem::replace(&mut q_last, q);
    }
    (p_last, p_prev, q_last, q_prev)
}

/// Finite expansion of a nonnegative rational via Euclid's algorithm.
/// The result is canonical (never ends in a trailing 1 unless it is `[1]`).
pub fn cf_from_rational(x: &Ratio) -> Result<CfExpansion> {
    if x.is_negative() {
        return Err(Error::invalid(
            "continued fraction expansion requires a nonnegative value",
        ));
    }
    let mut p = x.numer().clone();
    let mut q = x.denom().clone();
    let mut terms = Vec::new();
    while !q.is_zero() {
        let (a, r) = p.div_rem(&q);
        terms.push(a);
        p = std::mem::replace(&mut q, r);
    }
    CfExpansion::new(terms, Vec::new())
}

/// Eventually periodic expansion of a positive quadratic irrational.
///
/// Runs the classical complete-quotient iteration `(P + sqrt(D))/Q` and
/// detects the first repeated state, so the returned period is minimal.
pub fn cf_from_surd(x: &Surd) -> Result<CfExpansion> {
    if x.is_rational() {
        return Err(Error::invalid(
            "value is rational; its expansion is finite (use the rational form)",
        ));
    }
    if x.sign() != std::cmp::Ordering::Greater {
        return Err(Error::invalid(
            "continued fraction expansion requires a positive value",
        ));
    }
    let (a, b, d, e) = x.parts();
    // Normalize to x = (P + √D)/Q with integer P, Q and D = b²d (so √D has
    // positive coefficient), then enforce Q | D − P².
    let (mut p, mut q) = if b.is_positive() {
        (a.clone(), e.clone())
    } else {
        (-a, -e)
    };
    let mut dd: BigInt = b * b * BigInt::from(d);
    let rem = (&dd - &p * &p) % &q;
    if !rem.is_zero() {
        let qa = q.abs();
        p *= &qa;
        dd *= &qa * &qa;
        q *= &qa;
    }
    let root = dd.sqrt();
    let mut terms: Vec<BigInt> = Vec::new();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    loop {
        if terms.len() > MAX_EXPANSION_STEPS {
            return Err(Error::budget(format!(
                "expansion exceeded {MAX_EXPANSION_STEPS} terms without closing a period"
            )));
        }
        if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
            let period = terms.split_off(start);
            return CfExpansion::new(terms, period);
        }
        seen.insert((p.clone(), q.clone()), terms.len());
        // floor((P + √D)/Q) computed exactly from the integer square root.
        let a = if q.is_positive() {
            (&p + &root).div_floor(&q)
        } else {
            // (P+√D)/Q = −(P+⌊√D⌋+θ)/|Q| with θ ∈ (0,1), so the floor is
            // ⌊−(P+⌊√D⌋+1)/|Q|⌋ = div_floor(P+⌊√D⌋+1, Q).
            (&p + &root + BigInt::one()).div_floor(&q)
        };
        let p_next = &a * &q - &p;
        let q_next = (&dd - &p_next * &p_next) / &q;
        terms.push(a);
        p = p_next;
        q = q_next;
    }
}

/// Reconstructs the quadratic irrational named by an eventually periodic
/// expansion.
pub fn surd_from_cf(cf: &CfExpansion) -> Result<Surd> {
    if cf.is_finite() {
        return Err(Error::invalid(
            "expansion is finite; its value is rational, not a surd",
        ));
    }
    // The purely periodic tail y satisfies y = (P·y + P')/(Q·y + Q') where
    // the coefficients are the continuants of one period block, i.e.
    // Q·y² + (Q' − P)·y − P' = 0, and y > 1 picks the root with +√disc.
    let (p, p_prev, q, q_prev) = continuants(&cf.period);
    let disc = (&p - &q_prev) * (&p - &q_prev) + BigInt::from(4) * &q * &p_prev;
    let disc_u64 = u64::try_from(&disc).map_err(|_| {
        Error::budget("reconstruction discriminant exceeds the supported radicand range")
    })?;
    let y = Surd::new(p - &q_prev, BigInt::one(), disc_u64, BigInt::from(2) * q)?;
    debug_assert!(y.cmp_ratio(&Ratio::one()) == std::cmp::Ordering::Greater);
    let (pp, pp_prev, qq, qq_prev) = continuants(&cf.prefix);
    y.mobius(&pp, &pp_prev, &qq, &qq_prev)
}

/// A certified two-sided enclosure of a continued-fraction value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfInterval {
    pub center: Ratio,
    pub halfwidth: Ratio,
}

impl CfInterval {
    pub fn lo(&self) -> Ratio {
        &self.center - &self.halfwidth
    }

    pub fn hi(&self) -> Ratio {
        &self.center + &self.halfwidth
    }
}

/// Convergent `p_depth / q_depth` together with the rigorous error bound
/// `1/(q_depth · q_{depth+1})` (zero exactly at the end of a finite
/// expansion).
pub fn eval_cf(cf: &CfExpansion, depth: usize) -> Result<CfInterval> {
    if depth < 1 {
        return Err(Error::invalid("evaluation depth must be at least 1"));
    }
    if let Some(last) = cf.last_index() {
        if depth > last {
            return Err(Error::invalid(format!(
                "depth {depth} exceeds the final term index {last} of a finite expansion"
            )));
        }
    }
    let mut p_prev = BigInt::zero();
    let mut p_last = BigInt::one();
    let mut q_prev = BigInt::one();
    let mut q_last = BigInt::zero();
    for n in 0..=depth {
        let a = cf.term(n).expect("depth bounded above");
        let p = a * &p_last + &p_prev;
        let q = a * &q_last + &q_prev;
        p_prev = std::mem::replace(&mut p_last, p);
        q_prev = std::mem::replace(&mut q_last, q);
    }
    let halfwidth = match cf.term(depth + 1) {
        Some(a_next) => {
            let q_next = a_next * &q_last + &q_prev;
            Ratio::new(BigInt::one(), &q_last * q_next)
        }
        None => Ratio::zero(),
    };
    Ok(CfInterval {
        center: Ratio::new(p_last, q_last),
        halfwidth,
    })
}

/// Open interval of all reals whose expansion starts with the given terms:
/// the span between the word's value and the value with its last term
/// incremented, returned as `(lo, hi)`.
pub fn fundamental_interval(word: &[BigInt]) -> Result<(Ratio, Ratio)> {
    if word.is_empty() {
        return Err(Error::invalid("fundamental interval requires at least one term"));
    }
    // Reuse expansion validation (index 0 may be 0, the rest must be >= 1),
    // but on the raw word — no canonical merge.
    for (i, t) in word.iter().enumerate() {
        if i == 0 {
            if t.is_negative() {
                return Err(Error::invalid("term a0 must be nonnegative"));
            }
        } else if t < &BigInt::one() {
            return Err(Error::invalid(format!("term a{i} must be at least 1")));
        }
    }
    let (p, _, q, _) = continuants(word);
    let v1 = Ratio::new(p, q);
    let mut bumped = word.to_vec();
    *bumped.last_mut().expect("nonempty") += BigInt::one();
    let (p2, _, q2, _) = continuants(&bumped);
    let v2 = Ratio::new(p2, q2);
    if v1 <= v2 {
        Ok((v1, v2))
    } else {
        Ok((v2, v1))
    }
}

impl fmt::Display for CfExpansion {
    /// Literal form `a0;a1,...[;(b1,...,bm)]`; purely periodic expansions
    /// are displayed with one period term unrolled so the literal always
    /// starts with `a0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (head, tail, period): (&BigInt, Vec<&BigInt>, Vec<&BigInt>) =
            if self.prefix.is_empty() {
                let mut rotated: Vec<&BigInt> = self.period[1..].iter().collect();
                rotated.push(&self.period[0]);
                (&self.period[0], Vec::new(), rotated)
            } else {
                (
                    &self.prefix[0],
                    self.prefix[1..].iter().collect(),
                    self.period.iter().collect(),
                )
            };
        write!(f, "{head}")?;
        if !tail.is_empty() {
            write!(f, ";")?;
            for (i, t) in tail.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{t}")?;
            }
        }
        if !period.is_empty() {
            write!(f, ";(")?;
            for (i, t) in period.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl FromStr for CfExpansion {
    type Err = Error;

    fn from_str(input: &str) -> Result<CfExpansion> {
        let mut lex = Lexer::new(input);
        let a0 = lex.integer("term a0")?;
        let mut prefix = vec![a0];
        let mut period = Vec::new();
        if lex.peek() == Some(';') {
            lex.expect(';')?;
            if lex.peek() == Some('(') {
                period = paren_list(&mut lex)?;
            } else {
                loop {
                    prefix.push(lex.integer("continued fraction term")?);
                    if lex.peek() == Some(',') {
                        lex.expect(',')?;
                    } else {
                        break;
                    }
                }
                if lex.peek() == Some(';') {
                    lex.expect(';')?;
                    period = paren_list(&mut lex)?;
                }
            }
        }
        lex.end()?;
        CfExpansion::new(prefix, period)
    }
}

fn paren_list(lex: &mut Lexer) -> Result<Vec<BigInt>> {
    lex.expect('(')?;
    let mut out = Vec::new();
    loop {
        out.push(lex.integer("period term")?);
        if lex.peek() == Some(',') {
            lex.expect(',')?;
        } else {
            break;
        }
    }
    lex.expect(')')?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ratio;

    fn cf(prefix: &[i64], period: &[i64]) -> CfExpansion {
        CfExpansion::from_i64(prefix, period).unwrap()
    }

    #[test]
    fn rational_expansions() {
        assert_eq!(cf_from_rational(&ratio(7, 3)).unwrap(), cf(&[2, 3], &[]));
        assert_eq!(cf_from_rational(&ratio(1, 2)).unwrap(), cf(&[0, 2], &[]));
        assert_eq!(cf_from_rational(&ratio(0, 1)).unwrap(), cf(&[0], &[]));
        assert_eq!(cf_from_rational(&ratio(5, 1)).unwrap(), cf(&[5], &[]));
        assert_eq!(
            cf_from_rational(&ratio(355, 113)).unwrap(),
            cf(&[3, 7, 16], &[])
        );
        assert!(cf_from_rational(&ratio(-1, 2)).is_err());
    }

    #[test]
    fn canonical_merge_of_trailing_one() {
        assert_eq!(cf(&[2, 3, 1], &[]), cf(&[2, 4], &[]));
        assert_eq!(cf(&[2, 3, 1], &[]).rational_value().unwrap(), ratio(9, 4));
        assert_eq!(cf(&[0, 1], &[]), cf(&[1], &[]));
    }

    #[test]
    fn validation_rejects_bad_terms() {
        assert!(CfExpansion::from_i64(&[], &[]).is_err());
        assert!(CfExpansion::from_i64(&[0, 0], &[]).is_err());
        assert!(CfExpansion::from_i64(&[-1], &[]).is_err());
        assert!(CfExpansion::from_i64(&[0], &[0]).is_err());
        assert!(CfExpansion::from_i64(&[0], &[2, 0]).is_err());
        assert!(CfExpansion::from_i64(&[], &[1, 2]).is_ok());
    }

    #[test]
    fn surd_expansions_match_known_values() {
        let sqrt2_minus_1 = Surd::new(-1, 1, 2, 1).unwrap();
        assert_eq!(cf_from_surd(&sqrt2_minus_1).unwrap(), cf(&[0], &[2]));
        let golden_frac = Surd::new(-1, 1, 5, 2).unwrap();
        assert_eq!(cf_from_surd(&golden_frac).unwrap(), cf(&[0], &[1]));
        let sqrt2 = Surd::new(0, 1, 2, 1).unwrap();
        assert_eq!(cf_from_surd(&sqrt2).unwrap(), cf(&[1], &[2]));
        // 1 + √2 is purely periodic: detected with an empty prefix.
        let purely = cf_from_surd(&Surd::new(1, 1, 2, 1).unwrap()).unwrap();
        assert_eq!(purely, cf(&[], &[2]));
        // √3 = [1; 1, 2, 1, 2, ...]
        let sqrt3 = Surd::new(0, 1, 3, 1).unwrap();
        assert_eq!(cf_from_surd(&sqrt3).unwrap(), cf(&[1], &[1, 2]));
        // √7 = [2; 1, 1, 1, 4, ...]
        let sqrt7 = Surd::new(0, 1, 7, 1).unwrap();
        assert_eq!(cf_from_surd(&sqrt7).unwrap(), cf(&[2], &[1, 1, 1, 4]));
        assert!(cf_from_surd(&Surd::new(1, 0, 2, 2).unwrap()).is_err());
        assert!(cf_from_surd(&sqrt2.neg()).is_err());
    }

    #[test]
    fn surd_reconstruction_round_trips() {
        for c in [
            cf(&[0], &[2]),
            cf(&[0], &[1]),
            cf(&[1], &[2]),
            cf(&[0, 1, 1], &[2, 1]),
            cf(&[], &[1, 2]),
            cf(&[3, 1, 4], &[1, 5, 9]),
        ] {
            let s = surd_from_cf(&c).unwrap();
            let back = cf_from_surd(&s).unwrap();
            assert!(
                back.terms_eq(&c),
                "round trip failed: {c} -> {s} -> {back}"
            );
        }
        let golden_tail = surd_from_cf(&cf(&[0], &[1])).unwrap();
        assert_eq!(golden_tail, Surd::new(-1, 1, 5, 2).unwrap());
        assert!(surd_from_cf(&cf(&[2, 3], &[])).is_err());
    }

    #[test]
    fn evaluation_with_certified_width() {
        let e = eval_cf(&cf(&[0], &[2]), 3).unwrap();
        assert_eq!(e.center, ratio(5, 12));
        assert_eq!(e.halfwidth, ratio(1, 348));
        let g = eval_cf(&cf(&[0], &[1]), 4).unwrap();
        assert_eq!(g.center, ratio(3, 5));
        assert_eq!(g.halfwidth, ratio(1, 40));
        let f = eval_cf(&cf(&[2, 3], &[]), 1).unwrap();
        assert_eq!(f.center, ratio(7, 3));
        assert_eq!(f.halfwidth, ratio(0, 1));
        assert!(eval_cf(&cf(&[2, 3], &[]), 2).is_err());
        assert!(eval_cf(&cf(&[0], &[2]), 0).is_err());
        // The enclosure really contains the value: |(√2−1) − 5/12| ≤ 1/348.
        let x = Surd::new(-1, 1, 2, 1).unwrap();
        assert_eq!(
            x.cmp_ratio(&e.lo()),
            std::cmp::Ordering::Greater
        );
        assert_eq!(x.cmp_ratio(&e.hi()), std::cmp::Ordering::Less);
    }

    #[test]
    fn fundamental_intervals() {
        let b3 = fundamental_interval(&[BigInt::from(3)]).unwrap();
        assert_eq!(b3, (ratio(3, 1), ratio(4, 1)));
        let b02 = fundamental_interval(&[BigInt::from(0), BigInt::from(2)]).unwrap();
        assert_eq!(b02, (ratio(1, 3), ratio(1, 2)));
        let b011 =
            fundamental_interval(&[BigInt::from(0), BigInt::from(1), BigInt::from(1)]).unwrap();
        assert_eq!(b011, (ratio(1, 2), ratio(2, 3)));
        assert!(fundamental_interval(&[]).is_err());
        assert!(fundamental_interval(&[BigInt::from(0), BigInt::from(0)]).is_err());
    }

    #[test]
    fn literal_round_trips() {
        for text in ["0;(2)", "0;1,1;(2,1)", "5", "2;3", "1;(1,2)", "0;(1)"] {
            let c: CfExpansion = text.parse().unwrap();
            assert_eq!(c.to_string(), text, "display drifted for {text}");
        }
        // purely periodic displays with one term unrolled, parses back equal
        let purely = cf(&[], &[2]);
        assert_eq!(purely.to_string(), "2;(2)");
        let back: CfExpansion = purely.to_string().parse().unwrap();
        assert!(back.terms_eq(&purely));
        // liberal whitespace
        let spaced: CfExpansion = " 0 ; 1 , 1 ; ( 2 , 1 ) ".parse().unwrap();
        assert_eq!(spaced, cf(&[0, 1, 1], &[2, 1]));
        assert!("".parse::<CfExpansion>().is_err());
        assert!("0;".parse::<CfExpansion>().is_err());
        assert!("0;(2),3".parse::<CfExpansion>().is_err());
        assert!("0;1,".parse::<CfExpansion>().is_err());
    }

    #[test]
    fn term_sequence_equality() {
        assert!(cf(&[0], &[2, 2]).terms_eq(&cf(&[0], &[2])));
        assert!(cf(&[0, 2], &[2]).terms_eq(&cf(&[0], &[2])));
        assert!(!cf(&[0], &[2]).terms_eq(&cf(&[0], &[2, 1])));
        assert!(!cf(&[0, 2], &[]).terms_eq(&cf(&[0], &[2])));
    }
}
