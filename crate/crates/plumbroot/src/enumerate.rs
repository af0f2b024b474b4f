//! Complete enumeration of sublevel sets `{x ∈ L : χ_k(x) ≤ n}`.
//!
//! `χ_k(x) ≤ n` is the ellipsoid condition
//! `(x − c)ᵀ A (x − c) ≤ 2n + κᵀ A⁻¹ κ / 4` with `A = −B` positive definite,
//! `κ_j = k(b_j)` and centre `c = A⁻¹κ/2 = −k/2`. The Fincke–Pohst search
//! uses an exact rational `Uᵀ D U` factorization of `A`; all bounds are then
//! rescaled to a common integer denominator so the inner loop runs on
//! integers (machine `i128` when a magnitude bound proves it safe, big
//! integers otherwise). Every bound is exact: no point is ever lost.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{common_denominator, int, Rational};
use crate::graph::PlumbingGraph;
use crate::lattice::LatticeVector;

/// Default cap on the number of enumerated lattice points.
pub const DEFAULT_POINT_CAP: usize = 10_000_000;

/// Errors of the sublevel enumeration.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    /// The sublevel set is (predicted to be) larger than the cap.
    #[error("sublevel set at level {level} exceeds the point cap {cap} (estimated {estimate} points)")]
    LevelTooLarge {
        /// Requested level `n`.
        level: i64,
        /// Point cap in force.
        cap: usize,
        /// Volume-based estimate of the point count (lower bound when the
        /// enumeration was aborted).
        estimate: u64,
    },
    /// The values do not have the graph's dimension.
    #[error("characteristic values have length {found}, graph has {expected} vertices")]
    DimensionMismatch {
        /// Number of vertices.
        expected: usize,
        /// Length of the supplied vector.
        found: usize,
    },
}

/// Integer scalars usable in the inner search loop.
trait SearchInt: Clone + Send + Sync + Integer + Signed + Roots {
    fn from_big(x: &BigInt) -> Self;
    fn from_i64(x: i64) -> Self;
    fn to_i64_lossless(&self) -> i64;
}

impl SearchInt for i128 {
    fn from_big(x: &BigInt) -> Self {
        x.to_i128().expect("magnitude bound checked before dispatch")
    }
    fn from_i64(x: i64) -> Self {
        x as i128
    }
    fn to_i64_lossless(&self) -> i64 {
        i64::try_from(*self).expect("lattice coordinate overflows i64")
    }
}

impl SearchInt for BigInt {
    fn from_big(x: &BigInt) -> Self {
        x.clone()
    }
    fn from_i64(x: i64) -> Self {
        BigInt::from(x)
    }
    fn to_i64_lossless(&self) -> i64 {
        self.to_i64().expect("lattice coordinate overflows i64")
    }
}

/// Scaled integer description of the search ellipsoid:
/// `Σ_i W_i (N x_i − U_i)² ≤ R` with `U_i = C_i − Σ_{j>i} P_{ij} x_j`.
struct Ellipsoid<T> {
    n: T,
    weight: Vec<T>,
    centre: Vec<T>,
    coupling: Vec<Vec<T>>,
    radius: T,
}

struct Scaled {
    n: BigInt,
    weight: Vec<BigInt>,
    centre: Vec<BigInt>,
    coupling: Vec<Vec<BigInt>>,
    radius: BigInt,
    /// Per-coordinate bound `|x_i| ≤ bound` (for overflow analysis).
    coord_bound: f64,
    estimate: f64,
}

fn scale(graph: &PlumbingGraph, values: &[i64], level: i64) -> Option<Scaled> {
    let s = graph.len();
    let a: Vec<Vec<Rational>> = (0..s)
        .map(|i| (0..s).map(|j| int(-graph.form().b(i, j))).collect())
        .collect();
    // A = Uᵀ D U with U unit upper triangular.
    let mut d = vec![Rational::zero(); s];
    let mut mu = vec![vec![Rational::zero(); s]; s];
    for i in 0..s {
        let mut di = a[i][i].clone();
        for k in 0..i {
            di -= &d[k] * &mu[k][i] * &mu[k][i];
        }
        for j in i + 1..s {
            let mut v = a[i][j].clone();
            for k in 0..i {
                v -= &d[k] * &mu[k][i] * &mu[k][j];
            }
            mu[i][j] = v / &di;
        }
        d[i] = di;
    }
    // c = A⁻¹κ/2 = −B⁻¹κ/2, and κᵀA⁻¹κ/4 = (κ·c)/2.
    let kappa: Vec<Rational> = values.iter().map(|&v| int(v)).collect();
    let inv = graph.form().inverse();
    let c: Vec<Rational> = (0..s)
        .map(|i| {
            -(0..s).fold(Rational::zero(), |acc, j| acc + &inv[i][j] * &kappa[j]) / int(2)
        })
        .collect();
    let kc = kappa.iter().zip(&c).fold(Rational::zero(), |acc, (k, ci)| acc + k * ci);
    let r = int(2 * level) + kc / int(2);
    if r < Rational::zero() {
        return None;
    }
    let n1 = common_denominator(mu.iter().flatten());
    let n2 = common_denominator(c.iter());
    let n = &n1 * &n2;
    let nq = Rational::from_integer(n.clone());
    let lam = common_denominator(d.iter().chain(std::iter::once(&r)));
    let lamq = Rational::from_integer(lam);
    let weight: Vec<BigInt> = d.iter().map(|di| (di * &lamq).to_integer()).collect();
    let radius = (&r * &nq * &nq * &lamq).to_integer();
    let coupling: Vec<Vec<BigInt>> = (0..s)
        .map(|i| (0..s).map(|j| (&mu[i][j] * &nq).to_integer()).collect())
        .collect();
    let centre: Vec<BigInt> = (0..s)
        .map(|i| {
            let mut v = &c[i] * &nq;
            for j in i + 1..s {
                v += &mu[i][j] * &c[j] * &nq;
            }
            debug_assert!(v.is_integer());
            v.to_integer()
        })
        .collect();
    // |x_j − c_j| ≤ sqrt(R (A⁻¹)_jj).
    let rf = r.to_f64().unwrap_or(f64::INFINITY);
    let coord_bound = (0..s)
        .map(|j| {
            let aj = -inv[j][j].to_f64().unwrap_or(f64::INFINITY);
            c[j].to_f64().unwrap_or(f64::INFINITY).abs() + (rf * aj).sqrt() + 2.0
        })
        .fold(0.0, f64::max);
    Some(Scaled {
        n,
        weight,
        centre,
        coupling,
        radius,
        coord_bound,
        estimate: volume_estimate(s, rf, graph.order().to_f64().unwrap_or(f64::INFINITY)),
    })
}

/// Volume of `{yᵀAy ≤ R}`: `(πR)^{s/2} / (Γ(s/2 + 1) √det A)`.
fn volume_estimate(s: usize, r: f64, det: f64) -> f64 {
    let half = s as f64 / 2.0;
    let mut gamma = 1.0;
    // Γ(s/2 + 1) by the recursion from Γ(1) = 1 or Γ(1/2) = √π.
    let mut t = half;
    while t > 0.75 {
        gamma *= t;
        t -= 1.0;
    }
    if (t - 0.5).abs() < 1e-9 {
        gamma *= std::f64::consts::PI.sqrt();
    }
    (std::f64::consts::PI * r).powf(half) / gamma / det.sqrt()
}

fn fits_i128(sc: &Scaled) -> bool {
    let log = |x: &BigInt| x.bits() as f64;
    let s = sc.weight.len() as f64;
    let xb = sc.coord_bound.log2().max(1.0);
    let max_p = sc.coupling.iter().flatten().map(log).fold(0.0, f64::max);
    let max_c = sc.centre.iter().map(log).fold(0.0, f64::max);
    let max_w = sc.weight.iter().map(log).fold(0.0, f64::max);
    let u_bits = (max_p + xb + s.log2() + 1.0).max(max_c) + 1.0;
    let diff_bits = (log(&sc.n) + xb).max(u_bits) + 1.0;
    let term_bits = max_w + 2.0 * diff_bits;
    sc.coord_bound.is_finite() && term_bits < 118.0 && log(&sc.radius) + 2.0 < 118.0
}

impl<T: SearchInt> Ellipsoid<T> {
    fn from_scaled(sc: &Scaled) -> Self {
        Ellipsoid {
            n: T::from_big(&sc.n),
            weight: sc.weight.iter().map(T::from_big).collect(),
            centre: sc.centre.iter().map(T::from_big).collect(),
            coupling: sc
                .coupling
                .iter()
                .map(|row| row.iter().map(T::from_big).collect())
                .collect(),
            radius: T::from_big(&sc.radius),
        }
    }

    /// The integer range of `x_i` given `U_i` and the remaining budget.
    fn range(&self, i: usize, u: &T, rem: &T) -> Option<(i64, i64)> {
        if rem.is_negative() {
            return None;
        }
        let r = (rem.clone() / self.weight[i].clone()).sqrt();
        let lo = Integer::div_ceil(&(u.clone() - r.clone()), &self.n);
        let hi = Integer::div_floor(&(u.clone() + r), &self.n);
        if lo > hi {
            None
        } else {
            Some((lo.to_i64_lossless(), hi.to_i64_lossless()))
        }
    }

    fn u_at(&self, i: usize, x: &[i64]) -> T {
        let mut u = self.centre[i].clone();
        for j in i + 1..x.len() {
            if x[j] != 0 {
                u = u - self.coupling[i][j].clone() * T::from_i64(x[j]);
            }
        }
        u
    }

    fn spent(&self, i: usize, xi: i64, u: &T) -> T {
        let diff = self.n.clone() * T::from_i64(xi) - u.clone();
        self.weight[i].clone() * diff.clone() * diff
    }

    /// Depth-first search over coordinates `i, i−1, …, 0` with the
    /// coordinates above `i` already fixed in `x`.
    fn search(
        &self,
        i: usize,
        x: &mut Vec<i64>,
        rem: T,
        out: &mut Vec<LatticeVector>,
        cap: usize,
    ) -> bool {
        let u = self.u_at(i, x);
        let Some((lo, hi)) = self.range(i, &u, &rem) else {
            return true;
        };
        for xi in lo..=hi {
            let next = rem.clone() - self.spent(i, xi, &u);
            if next.is_negative() {
                continue;
            }
            x[i] = xi;
            if i == 0 {
                out.push(LatticeVector::new(x.clone()));
                if out.len() > cap {
                    return false;
                }
            } else if !self.search(i - 1, x, next, out, cap) {
                return false;
            }
        }
        x[i] = 0;
        true
    }

    fn run(&self, s: usize, cap: usize) -> Option<Vec<LatticeVector>> {
        let top = s - 1;
        let u = self.u_at(top, &vec![0; s]);
        let Some((lo, hi)) = self.range(top, &u, &self.radius) else {
            return Some(Vec::new());
        };
        let parts: Vec<Option<Vec<LatticeVector>>> = (lo..=hi)
            .into_par_iter()
            .map(|xt| {
                let next = self.radius.clone() - self.spent(top, xt, &u);
                let mut out = Vec::new();
                if next.is_negative() {
                    return Some(out);
                }
                let mut x = vec![0i64; s];
                x[top] = xt;
                if top == 0 {
                    out.push(LatticeVector::new(x));
                    return Some(out);
                }
                self.search(top - 1, &mut x, next, &mut out, cap).then_some(out)
            })
            .collect();
        let mut all = Vec::new();
        for p in parts {
            all.extend(p?);
            if all.len() > cap {
                return None;
            }
        }
        Some(all)
    }
}

/// Every `x ∈ L` with `χ_k(x) ≤ level`, where `k` is given by its values
/// `k(b_j)`. The order is deterministic.
pub fn sublevel_points(
    graph: &PlumbingGraph,
    values: &[i64],
    level: i64,
    cap: usize,
) -> Result<Vec<LatticeVector>, EnumerationError> {
    if values.len() != graph.len() {
        return Err(EnumerationError::DimensionMismatch {
            expected: graph.len(),
            found: values.len(),
        });
    }
    let Some(sc) = scale(graph, values, level) else {
        return Ok(Vec::new());
    };
    let too_large = |estimate: f64| EnumerationError::LevelTooLarge {
        level,
        cap,
        estimate: estimate.min(u64::MAX as f64) as u64,
    };
    if sc.estimate > 4.0 * cap as f64 + 1e3 {
        return Err(too_large(sc.estimate));
    }
    let s = graph.len();
    let result = if fits_i128(&sc) {
        Ellipsoid::<i128>::from_scaled(&sc).run(s, cap)
    } else {
        Ellipsoid::<BigInt>::from_scaled(&sc).run(s, cap)
    };
    let points = result.ok_or_else(|| too_large(sc.estimate.max(cap as f64)))?;
    debug_assert!(points.iter().all(|x| {
        let total: i64 = values.iter().zip(x.coeffs()).map(|(k, c)| k * c).sum::<i64>()
            + graph.self_pairing(x);
        -total / 2 <= level
    }));
    Ok(points)
}

/// Brute-force `min χ_k` helper used by callers that need the minimizing
/// level: returns `(min χ, number of minimizers)`.
pub fn minimum(
    graph: &PlumbingGraph,
    values: &[i64],
    cap: usize,
) -> Result<(i64, usize), EnumerationError> {
    let pts = sublevel_points(graph, values, 0, cap)?;
    let chis: Vec<i64> = pts
        .iter()
        .map(|x| {
            let total: i64 = values.iter().zip(x.coeffs()).map(|(k, c)| k * c).sum::<i64>()
                + graph.self_pairing(x);
            -total / 2
        })
        .collect();
    let m = chis.iter().copied().min().unwrap_or(0);
    Ok((m, chis.iter().filter(|&&c| c == m).count()))
}
