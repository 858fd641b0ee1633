//! Exact scalars.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

/// `num / den` in lowest terms. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q` or a bare integer `p`. Signs are accepted on the numerator.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let valid = |s: &str, signed: bool| {
        let digits = if signed {
            s.strip_prefix(['-', '+']).unwrap_or(s)
        } else {
            s
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return None;
    }
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// `⌊n·c⌋` as an integer.
pub fn floor_scaled(c: &Rational, n: u64) -> BigInt {
    (c * Rational::from_integer(BigInt::from(n))).floor().to_integer()
}

/// `⌈c⌉` as an integer.
pub fn ceil_int(c: &Rational) -> BigInt {
    let (q, r) = c.numer().div_rem(c.denom());
    if r.is_positive() {
        q + 1
    } else {
        q
    }
}

pub fn to_u64(n: &BigInt) -> Option<u64> {
    n.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("2/4"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("-3"), Some(int(-3)));
        assert_eq!(parse_rational("7 / 3"), Some(ratio(7, 3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn display_is_lowest_terms() {
        assert_eq!(ratio(6, 8).to_string(), "3/4");
        assert_eq!(ratio(4, 2).to_string(), "2");
    }

    #[test]
    fn ceilings() {
        assert_eq!(ceil_int(&ratio(1, 2)), BigInt::from(1));
        assert_eq!(ceil_int(&int(16)), BigInt::from(16));
        assert_eq!(ceil_int(&ratio(-1, 2)), BigInt::from(0));
        assert_eq!(floor_scaled(&ratio(2, 3), 2), BigInt::from(1));
    }
}
