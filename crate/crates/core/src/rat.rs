//! Exact rational scalars and the `"p/q"` wire format.
//!
//! Every quantity in this crate that is a number is a [`Rat`]; there is no
//! floating point anywhere. The wire format is a decimal-free string
//! `"p/q"` with `q > 0` and `gcd(p, q) = 1`; a bare `"p"` abbreviates
//! `"p/1"`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

pub type Rat = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// 2^-n as an exact rational.
pub fn pow2_inv(n: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << n)
}

pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p: BigInt = p
        .trim()
        .parse()
        .map_err(|_| format!("bad numerator in {s:?}"))?;
    let q: BigInt = q
        .trim()
        .parse()
        .map_err(|_| format!("bad denominator in {s:?}"))?;
    if q.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(p, q))
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter serializing a [`Rat`] as the `"p/q"` string form.
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(de)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

/// Largest e with m^e dividing n, together with n / m^e.
///
/// Used to decide divisibility questions in Z[1/m] without factoring m:
/// repeatedly strips gcd(n, m^k) factors.
pub fn strip_m_part(n: &BigInt, m: &BigInt) -> BigInt {
    use num_integer::Integer;
    assert!(!n.is_zero());
    let mut n = n.abs();
    loop {
        let g = n.gcd(m);
        if g.is_one() {
            return n;
        }
        while (&n % &g).is_zero() {
            n /= &g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/8", "-1/2", "0", "7", "-5/3"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert_eq!(format_rat(&parse_rat("2/4").unwrap()), "1/2");
        assert_eq!(format_rat(&parse_rat("3/-6").unwrap()), "-1/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn strip_m_part_examples() {
        let b = |n: i64| BigInt::from(n);
        assert_eq!(strip_m_part(&b(24), &b(2)), b(3));
        assert_eq!(strip_m_part(&b(24), &b(6)), b(1));
        assert_eq!(strip_m_part(&b(-40), &b(10)), b(1));
        assert_eq!(strip_m_part(&b(7), &b(2)), b(7));
    }
}
