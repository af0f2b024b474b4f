//! Exact scalar arithmetic shared by every module.
//!
//! Everything that is not a small lattice coordinate is an arbitrary
//! precision rational; floating point never enters the exact pipeline.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Builds the rational `n/d`.
///
/// # Panics
/// Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `⌊a/b⌋` for `b > 0` or `b < 0`.
pub fn floor_div(a: i64, b: i64) -> i64 {
    Integer::div_floor(&a, &b)
}

/// `⌈a/b⌉` for `b ≠ 0`.
pub fn ceil_div(a: i64, b: i64) -> i64 {
    -Integer::div_floor(&(-a), &b)
}

/// Fractional part `{x} = x − ⌊x⌋ ∈ [0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// `⌈x⌉` as a machine integer.
///
/// # Panics
/// Panics if the value does not fit in `i64`; lattice coordinates are small by
/// construction, so overflow is a logic error.
pub fn ceil_i64(x: &Rational) -> i64 {
    x.ceil()
        .to_integer()
        .to_i64()
        .expect("lattice coordinate overflows i64")
}

/// `⌊x⌋` as a machine integer.
///
/// # Panics
/// Panics if the value does not fit in `i64`.
pub fn floor_i64(x: &Rational) -> i64 {
    x.floor()
        .to_integer()
        .to_i64()
        .expect("lattice coordinate overflows i64")
}

/// Converts an integral rational to `i64`, `None` if it is not an integer or
/// does not fit.
pub fn to_i64_exact(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

/// Least common multiple of the denominators of `xs` (1 for an empty slice).
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Canonical machine-readable form `"p/q"` with `q > 0`, always including
/// the denominator.
pub fn to_pq(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"` or a plain integer `"p"`.
pub fn parse_pq(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Lossy conversion used only for diagnostics and numeric oracles.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Absolute value of a big integer as a rational.
pub fn abs_int(x: &BigInt) -> Rational {
    Rational::from_integer(x.abs())
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_pq {
    use super::{parse_pq, to_pq, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    /// Serializes a single rational.
    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_pq(x))
    }

    /// Deserializes a single rational.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_pq(&s).ok_or_else(|| D::Error::custom(format!("invalid rational {s:?}")))
    }

    /// Adapters for `Vec<Rational>`.
    pub mod vec {
        use super::{parse_pq, to_pq, Rational};
        use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

        /// Serializes a vector of rationals.
        pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&to_pq(x))?;
            }
            seq.end()
        }

        /// Deserializes a vector of rationals.
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|s| {
                    parse_pq(s).ok_or_else(|| D::Error::custom(format!("invalid rational {s:?}")))
                })
                .collect()
        }
    }
}
