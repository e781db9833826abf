//! Small helpers around `num::BigRational`. All guarantee arithmetic in this
//! crate is exact; floats appear only in display output.

use num::bigint::BigInt;
use num::{ToPrimitive, Zero};

pub use num::BigRational;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(value: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// `p/q` in lowest terms, denominator always printed.
pub fn to_frac_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_frac(s: &str) -> Option<BigRational> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (
            p.trim().parse::<BigInt>().ok()?,
            q.trim().parse::<BigInt>().ok()?,
        ),
        None => (s.trim().parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    if q.is_zero() {
        return None;
    }
    Some(BigRational::new(p, q))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_strings_round_trip() {
        let r = rat(11671, 8754);
        assert_eq!(to_frac_string(&r), "11671/8754");
        assert_eq!(parse_frac("11671/8754").unwrap(), r);
        assert_eq!(parse_frac("3").unwrap(), rat(3, 1));
        assert!(parse_frac("1/0").is_none());
    }

    #[test]
    fn reduction_happens() {
        assert_eq!(to_frac_string(&rat(35013, 26262)), "11671/8754");
    }
}
