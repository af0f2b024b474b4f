//! Truncated Laurent series in one variable `u` with exact rational
//! coefficients.
//!
//! A [`Laurent`] stores `Σ_{k<len} c_k u^{val+k} + O(u^{val+len})`; every
//! operation tracks the absolute precision so that reading a coefficient
//! beyond it is an error rather than a silent truncation artifact.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::Rational;

/// Errors of series arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    /// Inversion of a series whose leading stored coefficient vanishes.
    #[error("cannot invert a series with vanishing leading coefficient")]
    NotInvertible,
    /// A coefficient beyond the known precision was requested.
    #[error("coefficient of u^{exponent} unknown: series known only up to O(u^{precision})")]
    PrecisionExceeded { exponent: i64, precision: i64 },
}

/// A truncated Laurent series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Laurent {
    val: i64,
    coeffs: Vec<Rational>,
}

/// `C(n, k)` for any integer `n` (generalized binomial) and `k ≥ 0`.
fn binomial(n: i64, k: usize) -> Rational {
    let mut acc = Rational::one();
    for j in 0..k {
        acc *= Rational::new(BigInt::from(n - j as i64), BigInt::from(j as i64 + 1));
    }
    acc
}

impl Laurent {
    /// `Σ coeffs[k] u^{val+k} + O(u^{val + coeffs.len()})`.
    pub fn new(val: i64, coeffs: Vec<Rational>) -> Self {
        Laurent { val, coeffs }
    }

    /// The constant `c + O(u^terms)`.
    pub fn constant(c: Rational, terms: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); terms];
        if terms > 0 {
            coeffs[0] = c;
        }
        Laurent { val: 0, coeffs }
    }

    /// `(1 + u)^n + O(u^terms)` for any integer `n`.
    pub fn one_plus_u_pow(n: i64, terms: usize) -> Self {
        Laurent {
            val: 0,
            coeffs: (0..terms).map(|k| binomial(n, k)).collect(),
        }
    }

    /// `((1 + u)^n − 1)/u + O(u^terms)`.
    pub fn power_minus_one_over_u(n: i64, terms: usize) -> Self {
        Laurent {
            val: 0,
            coeffs: (1..=terms).map(|k| binomial(n, k)).collect(),
        }
    }

    /// Lowest stored exponent.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    /// Absolute precision: the series is known modulo `u^precision`.
    pub fn precision(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    /// The coefficient of `u^exponent`.
    pub fn coeff(&self, exponent: i64) -> Result<Rational, SeriesError> {
        if exponent >= self.precision() {
            return Err(SeriesError::PrecisionExceeded {
                exponent,
                precision: self.precision(),
            });
        }
        if exponent < self.val {
            return Ok(Rational::zero());
        }
        Ok(self.coeffs[(exponent - self.val) as usize].clone())
    }

    /// Multiplies by `u^k`.
    pub fn shift(&self, k: i64) -> Self {
        Laurent {
            val: self.val + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, c: &Rational) -> Self {
        Laurent {
            val: self.val,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        let val = self.val.min(other.val);
        let prec = self.precision().min(other.precision());
        let coeffs = (val..prec)
            .map(|e| {
                let a = if e >= self.val { &self.coeffs[(e - self.val) as usize] } else { &Rational::zero() };
                let b = if e >= other.val { &other.coeffs[(e - other.val) as usize] } else { &Rational::zero() };
                a + b
            })
            .collect();
        Laurent { val, coeffs }
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Product; the relative precision is the smaller of the two.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Laurent {
            val: self.val + other.val,
            coeffs,
        }
    }

    /// Multiplicative inverse; requires a non-zero leading stored
    /// coefficient.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let lead = self.coeffs.first().filter(|c| !c.is_zero()).ok_or(SeriesError::NotInvertible)?;
        let n = self.coeffs.len();
        let inv_lead = lead.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        out.push(inv_lead.clone());
        for k in 1..n {
            let mut acc = Rational::zero();
            for j in 1..=k {
                acc += &self.coeffs[j] * &out[k - j];
            }
            out.push(-acc * &inv_lead);
        }
        Ok(Laurent {
            val: -self.val,
            coeffs: out,
        })
    }

    /// Quotient.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Integer power `n ≥ 0`.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Laurent::constant(Rational::one(), self.coeffs.len());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, "({c})u^{} + ", self.val + k as i64)?;
            }
        }
        write!(f, "O(u^{})", self.precision())
    }
}
