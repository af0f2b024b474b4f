//! Dedekind sums `s(q, p) = Σ_{l mod p} ((l/p)) ((ql/p))`.
//!
//! Two independent evaluations are provided: the defining sum in `O(p)` and
//! the reciprocity recursion in `O(log p)`. [`dedekind_sum`] uses the
//! recursion and, in debug builds, checks it against the direct sum for
//! small `p`.

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

use crate::arith::{int, rat, Rational};

/// Largest `p` for which debug builds cross-check the recursion against the
/// defining sum.
const DEBUG_CROSS_CHECK_LIMIT: i64 = 512;

/// Failure of a Dedekind-sum evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DedekindError {
    /// `gcd(q, p) ≠ 1`.
    #[error("Dedekind sum s({q}, {p}) requires gcd(q, p) = 1")]
    NotCoprime { q: i64, p: i64 },
    /// `p < 1`.
    #[error("Dedekind sum s({q}, {p}) requires p ≥ 1")]
    NonPositiveModulus { q: i64, p: i64 },
}

fn check(q: i64, p: i64) -> Result<(), DedekindError> {
    if p < 1 {
        return Err(DedekindError::NonPositiveModulus { q, p });
    }
    if q.gcd(&p) != 1 {
        return Err(DedekindError::NotCoprime { q, p });
    }
    Ok(())
}

/// The sawtooth function `((x))` at `x = n/d`: `{x} − 1/2` off the integers
/// and `0` on them.
pub fn sawtooth(n: i64, d: i64) -> Rational {
    let r = n.rem_euclid(d);
    if r == 0 {
        Rational::from_integer(0.into())
    } else {
        rat(2 * r - d, 2 * d)
    }
}

/// `s(q, p)` by the defining sum.
pub fn dedekind_sum_direct(q: i64, p: i64) -> Result<Rational, DedekindError> {
    check(q, p)?;
    // ((l/p))((ql/p)) = (2l − p)(2r − p) / (4p²) with r = ql mod p; both
    // factors vanish together since q is a unit mod p.
    let mut numer: i128 = 0;
    for l in 1..p {
        let r = (q as i128 * l as i128).rem_euclid(p as i128);
        numer += (2 * l as i128 - p as i128) * (2 * r - p as i128);
    }
    let denom = 4 * (p as i128) * (p as i128);
    Ok(Rational::new(BigInt::from(numer), BigInt::from(denom)))
}

/// `s(q, p)` by the reciprocity law
/// `s(q, p) + s(p, q) = (p/q + q/p + 1/(pq))/12 − 1/4`.
pub fn dedekind_sum_reciprocity(q: i64, p: i64) -> Result<Rational, DedekindError> {
    check(q, p)?;
    let mut sign = 1;
    let mut q = q.rem_euclid(p);
    if 2 * q > p {
        // s(−q, p) = −s(q, p) keeps the recursion on q ≤ p/2.
        q = p - q;
        sign = -1;
    }
    let mut p = p;
    let mut total = Rational::from_integer(0.into());
    let mut alternating = 1;
    while p > 1 {
        let (pi, qi) = (p as i128, q as i128);
        let term = Rational::new(
            BigInt::from(pi * pi + qi * qi + 1),
            BigInt::from(12 * pi * qi),
        ) - rat(1, 4);
        total += int(alternating) * term;
        alternating = -alternating;
        let r = p % q;
        p = q;
        q = r;
    }
    Ok(int(sign) * total)
}

/// `s(q, p)` for coprime `q` and `p ≥ 1`.
pub fn dedekind_sum(q: i64, p: i64) -> Result<Rational, DedekindError> {
    let s = dedekind_sum_reciprocity(q, p)?;
    if cfg!(debug_assertions) && p <= DEBUG_CROSS_CHECK_LIMIT {
        debug_assert_eq!(s, dedekind_sum_direct(q, p)?, "s({q}, {p})");
    }
    Ok(s)
}
