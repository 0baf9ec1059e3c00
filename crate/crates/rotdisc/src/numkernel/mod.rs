//! Exact numeric foundation: arbitrary-precision rationals, real quadratic
//! surds with a decidable total order, continued-fraction expansions, and
//! convergent tables.

mod cf;
mod convergents;
mod surd;

pub use cf::{
    cf_from_rational, cf_from_surd, eval_cf, fundamental_interval, surd_from_cf, CfExpansion,
    CfInterval,
};
pub use convergents::{convergents, ConvergentRow, ConvergentTable};
pub use surd::Surd;
pub(crate) use surd::sign_with_sqrt;

#[allow(unused_imports)]
pub(crate) use cf::continuants;

use num_bigint::BigInt;

use crate::{Error, Result};

/// Arbitrary-precision rational, always reduced, denominator positive.
pub type Ratio = num_rational::BigRational;

/// Builds a reduced rational from machine integers (test and CLI convenience).
pub fn ratio(p: i64, q: i64) -> Ratio {
    Ratio::new(BigInt::from(p), BigInt::from(q))
}

/// Parses a rational literal `p/q` (or a bare integer `p`).
///
/// The value is reduced and the denominator made positive, so for example
/// `"-4/-6"` parses to `2/3`. A zero denominator is rejected.
pub fn parse_ratio(input: &str) -> Result<Ratio> {
    let s = input.trim();
    let (num_str, den_str) = match s.find('/') {
        Some(i) => (&s[..i], &s[i + 1..]),
        None => (s, ""),
    };
    let p: BigInt = num_str
        .trim()
        .parse()
        .map_err(|_| Error::parse(input, 0, "expected an integer numerator"))?;
    if den_str.is_empty() && !s.contains('/') {
        return Ok(Ratio::from(p));
    }
    let q: BigInt = den_str.trim().parse().map_err(|_| {
        Error::parse(
            input,
            s.find('/').unwrap_or(0) + 1,
            "expected an integer denominator",
        )
    })?;
    if q == BigInt::from(0) {
        return Err(Error::parse(
            input,
            s.find('/').unwrap_or(0) + 1,
            "denominator must be nonzero",
        ));
    }
    Ok(Ratio::new(p, q))
}

/// Parses a nonnegative numeric literal into an exact rational.
///
/// Accepts `p/q`, plain integers, decimals (`0.25`), and scientific notation
/// (`1e-9`, `2.5e3`). Every accepted form is converted exactly.
pub fn parse_decimal(input: &str) -> Result<Ratio> {
    let s = input.trim();
    if s.contains('/') {
        return parse_ratio(s);
    }
    let bad = |pos: usize, msg: &str| Error::parse(input, pos, msg);
    let mut mantissa = String::new();
    let mut frac_digits: u32 = 0;
    let mut exp: i64 = 0;
    let mut chars = s.char_indices().peekable();
    if let Some(&(_, c)) = chars.peek() {
        if c == '+' || c == '-' {
            mantissa.push(c);
            chars.next();
        }
    }
    let mut seen_digit = false;
    let mut in_frac = false;
    while let Some(&(i, c)) = chars.peek() {
        match c {
            '0'..='9' => {
                mantissa.push(c);
                if in_frac {
                    frac_digits += 1;
                }
                seen_digit = true;
                chars.next();
            }
            '.' => {
                if in_frac {
                    return Err(bad(i, "unexpected second decimal point"));
                }
                in_frac = true;
                chars.next();
            }
            'e' | 'E' => {
                chars.next();
                let rest: String = chars.map(|(_, c)| c).collect();
                exp = rest
                    .parse()
                    .map_err(|_| bad(i + 1, "expected an integer exponent"))?;
                break;
            }
            _ => return Err(bad(i, "unexpected character in numeric literal")),
        }
    }
    if !seen_digit {
        return Err(bad(0, "expected digits"));
    }
    let m: BigInt = mantissa
        .parse()
        .map_err(|_| bad(0, "invalid mantissa digits"))?;
    let ten = BigInt::from(10);
    let shift = exp - i64::from(frac_digits);
    let value = if shift >= 0 {
        Ratio::from(m * num_traits::pow(ten, shift as usize))
    } else {
        Ratio::new(m, num_traits::pow(ten, (-shift) as usize))
    };
    Ok(value)
}

/// Validates a window `c = h/k`: returns `(h, k)` with `0 < h < k`,
/// `gcd(h, k) = 1`, both fitting in `i64`.
pub fn window_parts(c: &Ratio) -> Result<(i64, i64)> {
    use num_traits::{One, Zero};
    if c <= &Ratio::zero() || c >= &Ratio::one() {
        return Err(Error::invalid(format!(
            "window must lie strictly between 0 and 1, got {c}"
        )));
    }
    let h = i64::try_from(c.numer()).map_err(|_| Error::invalid("window numerator too large"))?;
    let k =
        i64::try_from(c.denom()).map_err(|_| Error::invalid("window denominator too large"))?;
    Ok((h, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_literals_parse_and_reduce() {
        assert_eq!(parse_ratio("7/3").unwrap(), ratio(7, 3));
        assert_eq!(parse_ratio("5").unwrap(), ratio(5, 1));
        assert_eq!(parse_ratio("-4/-6").unwrap(), ratio(2, 3));
        assert_eq!(parse_ratio(" 1/2 ").unwrap(), ratio(1, 2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x/2").is_err());
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_decimal("0.25").unwrap(), ratio(1, 4));
        assert_eq!(
            parse_decimal("1e-9").unwrap(),
            Ratio::new(BigInt::from(1), BigInt::from(1_000_000_000u64))
        );
        assert_eq!(parse_decimal("2.5e3").unwrap(), ratio(2500, 1));
        assert_eq!(parse_decimal("3").unwrap(), ratio(3, 1));
        assert_eq!(parse_decimal("1/2").unwrap(), ratio(1, 2));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("e9").is_err());
    }

    #[test]
    fn window_validation() {
        assert_eq!(window_parts(&ratio(1, 2)).unwrap(), (1, 2));
        assert_eq!(window_parts(&ratio(2, 6)).unwrap(), (1, 3));
        assert!(window_parts(&ratio(2, 2)).is_err());
        assert!(window_parts(&ratio(0, 5)).is_err());
        assert!(window_parts(&ratio(7, 5)).is_err());
    }
}
