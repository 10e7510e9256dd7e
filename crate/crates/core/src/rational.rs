//! Exact number types.
//!
//! Costs are small rationals and only ever compared or summed, so they use a
//! machine-word ratio. Planar coordinates come out of the star-list
//! construction, which can grow quickly, so they use arbitrary precision.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

/// Exact cost value.
pub type Cost = Ratio<i64>;

/// Exact planar coordinate.
pub type Coord = BigRational;

pub fn cost(v: i64) -> Cost {
    Cost::from_integer(v)
}

pub fn coord(v: i64) -> Coord {
    Coord::from_integer(BigInt::from(v))
}

pub fn coord_frac(num: i64, den: i64) -> Coord {
    Coord::new(BigInt::from(num), BigInt::from(den))
}

/// Narrows an arbitrary-precision rational into a [`Cost`], if it fits.
pub fn to_cost(v: &BigRational) -> Option<Cost> {
    let n: i64 = v.numer().try_into().ok()?;
    let d: i64 = v.denom().try_into().ok()?;
    Some(Cost::new(n, d))
}

pub fn from_cost(v: &Cost) -> BigRational {
    BigRational::new(BigInt::from(*v.numer()), BigInt::from(*v.denom()))
}

/// Parses `"7"`, `"-3/4"` or a decimal literal such as `"1.25"` or `"2e-3"`
/// into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(all);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Exact rational square root, if `v` is the square of a rational.
pub fn rational_sqrt(v: &BigRational) -> Option<BigRational> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    if &(&n * &n) == v.numer() && &(&d * &d) == v.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

pub fn half() -> Coord {
    Coord::new(BigInt::one(), BigInt::from(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_fractions_and_decimals() {
        assert_eq!(parse_rational("7"), Some(coord(7)));
        assert_eq!(parse_rational("-3/4"), Some(coord_frac(-3, 4)));
        assert_eq!(parse_rational("1.5"), Some(coord_frac(3, 2)));
        assert_eq!(parse_rational("0.1"), Some(coord_frac(1, 10)));
        assert_eq!(parse_rational("2e-3"), Some(coord_frac(1, 500)));
        assert_eq!(parse_rational("1.25E2"), Some(coord(125)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn sqrt_only_for_rational_squares() {
        assert_eq!(rational_sqrt(&coord_frac(9, 4)), Some(coord_frac(3, 2)));
        assert_eq!(rational_sqrt(&coord(20)), None);
    }
}
