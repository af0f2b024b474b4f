//! Closed-form pipeline for lens spaces `L(p, q)`.
//!
//! The plumbing graph is the chain `−k₁ — … — −k_s` of the negative
//! continued fraction `p/q = [k₁, …, k_s]`. Spin^c structures are indexed by
//! `0 ≤ a < p` through `l'_{[−a g_s]} = −Σ a_j g_j`, where `(g_j, b_i) = δ_ij`
//! and `g_s` belongs to the last vertex of the chain. Everything here is
//! exact; the Fourier-sum evaluation of the torsion exists only as an
//! independent numeric check.

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{int, rat, serde_pq, Rational};
use crate::dedekind::dedekind_sum;
use crate::graph::PlumbingGraph;
use crate::lattice::DualVector;

/// Invalid lens-space parameters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LensError {
    /// `gcd(p, q) ≠ 1`.
    #[error("L({p}, {q}) requires gcd(p, q) = 1")]
    NotCoprime { p: i64, q: i64 },
    /// Parameters outside `0 < q < p`, or a spin^c index outside `0 ≤ a < p`.
    #[error("{0}")]
    Range(String),
}

/// The negative continued fraction `p/q = k₁ − 1/(k₂ − 1/(… − 1/k_s))` with
/// every `k_j ≥ 2`.
pub fn neg_cf(p: i64, q: i64) -> Result<Vec<i64>, LensError> {
    if !(0 < q && q < p) {
        return Err(LensError::Range(format!("L({p}, {q}) requires 0 < q < p")));
    }
    if p.gcd(&q) != 1 {
        return Err(LensError::NotCoprime { p, q });
    }
    let (mut num, mut den) = (p, q);
    let mut cf = Vec::new();
    while den > 0 {
        let k = crate::arith::ceil_div(num, den);
        cf.push(k);
        (num, den) = (den, k * den - num);
    }
    Ok(cf)
}

/// Evaluates a negative continued fraction `[k₁, …, k_s]` as `n/d` with
/// `gcd(n, d) = 1`; the empty fraction is `1/0`.
pub fn eval_neg_cf(cf: &[i64]) -> (i64, i64) {
    cf.iter().rev().fold((1, 0), |(n, d), &k| (k * n - d, n))
}

/// The lens space `L(p, q)` with its continued-fraction data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LensSpace {
    p: i64,
    q: i64,
    q_prime: i64,
    cf: Vec<i64>,
    /// `n[i][j] = n_{ij}` for `1 ≤ i ≤ s+2`, `0 ≤ j ≤ s`.
    n: Vec<Vec<i64>>,
}

impl LensSpace {
    /// Builds `L(p, q)` for coprime `0 < q < p`.
    pub fn new(p: i64, q: i64) -> Result<Self, LensError> {
        let cf = neg_cf(p, q)?;
        let s = cf.len();
        let mut n = vec![vec![0i64; s + 1]; s + 3];
        for j in 0..=s {
            // n_{j+1, j} = 1; rows i > j+1 stay zero.
            n[j + 1][j] = 1;
            for i in (1..=j).rev() {
                n[i][j] = cf[i - 1] * n[i + 1][j] - n[i + 2][j];
            }
        }
        let q_prime = n[1][s - 1];
        let lens = LensSpace {
            p,
            q,
            q_prime,
            cf,
            n,
        };
        debug_assert_eq!(lens.n(1, s), p);
        debug_assert_eq!(lens.n(2, s), q);
        debug_assert_eq!((q * q_prime).rem_euclid(p), 1 % p);
        Ok(lens)
    }

    /// `p = |H|`.
    pub fn p(&self) -> i64 {
        self.p
    }

    /// `q`.
    pub fn q(&self) -> i64 {
        self.q
    }

    /// `q'` with `q q' ≡ 1 (mod p)` and `0 < q' < p` (`q' = n_{1,s−1}`).
    pub fn q_prime(&self) -> i64 {
        self.q_prime
    }

    /// The continued fraction `[k₁, …, k_s]`.
    pub fn cf(&self) -> &[i64] {
        &self.cf
    }

    /// Length `s` of the chain.
    pub fn len(&self) -> usize {
        self.cf.len()
    }

    /// Always false: the chain has at least one vertex.
    pub fn is_empty(&self) -> bool {
        self.cf.is_empty()
    }

    /// `n_{ij}` (1-based), the numerator of `[k_i, …, k_j]`, extended by
    /// `n_{i,i−1} = 1` and `n_{ij} = 0` for `j < i − 1`.
    ///
    /// # Panics
    /// Panics unless `1 ≤ i ≤ s + 2` and `j ≤ s`.
    pub fn n(&self, i: usize, j: usize) -> i64 {
        self.n[i][j]
    }

    /// The plumbing chain `−k₁ — … — −k_s`, vertex `j − 1` carrying `−k_j`.
    pub fn graph(&self) -> PlumbingGraph {
        let e: Vec<i64> = self.cf.iter().map(|k| -k).collect();
        PlumbingGraph::chain(&e).expect("lens chains are negative definite")
    }

    fn check_index(&self, a: i64) -> Result<(), LensError> {
        if (0..self.p).contains(&a) {
            Ok(())
        } else {
            Err(LensError::Range(format!(
                "spin^c index {a} outside 0..{} for L({}, {})",
                self.p, self.p, self.q
            )))
        }
    }
}

/// The coefficient system `E(a) = (a₁, …, a_s)` of `l'_{[−a g_s]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpincCoeffs {
    /// The spin^c index `0 ≤ a < p`.
    pub a: i64,
    /// `(a₁, …, a_s)`.
    pub coeffs: Vec<i64>,
}

impl SpincCoeffs {
    /// `Σ n_{t+1,s} a_t`, which recovers `a`.
    pub fn index(&self, lens: &LensSpace) -> i64 {
        let s = lens.len();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(t, &at)| lens.n(t + 2, s) * at)
            .sum()
    }

    /// Whether the coefficients solve the inequality system
    /// `a_t ≥ 0` and `n_{i+1,s} a_i + … + n_{ss} a_{s−1} + a_s < n_{is}`.
    pub fn satisfies_system(&self, lens: &LensSpace) -> bool {
        let s = lens.len();
        if self.coeffs.len() != s || self.coeffs.iter().any(|&c| c < 0) {
            return false;
        }
        (1..=s).all(|i| {
            let lhs: i64 = (i..=s).map(|t| lens.n(t + 1, s) * self.coeffs[t - 1]).sum();
            lhs < lens.n(i, s)
        })
    }

    /// `l'_{[−a g_s]} = −Σ a_j g_j` on the chain graph.
    pub fn l_prime(&self, graph: &PlumbingGraph) -> DualVector {
        let pairings: Vec<i64> = self.coeffs.iter().map(|c| -c).collect();
        graph.dual_from_int_pairings(&pairings)
    }

    /// Renders `a/p` as the nested fraction
    /// `(a₁ + (a₂ + (… + a_s/r_s) …)/r₂)/r₁` with `r_i = n_{is}/n_{i+1,s}`.
    pub fn generalized_fraction(&self, lens: &LensSpace) -> String {
        let s = lens.len();
        let mut text = String::new();
        for i in (1..=s).rev() {
            let r = format!("({}/{})", lens.n(i, s), lens.n(i + 1, s));
            text = if text.is_empty() {
                format!("{}/{r}", self.coeffs[i - 1])
            } else {
                format!("({} + {text})/{r}", self.coeffs[i - 1])
            };
        }
        text
    }
}

/// `E(a)` by the greedy formula
/// `a_i = ⌊(a − Σ_{t<i} n_{t+1,s} a_t) / n_{i+1,s}⌋`.
pub fn spinc_coeffs(lens: &LensSpace, a: i64) -> Result<SpincCoeffs, LensError> {
    lens.check_index(a)?;
    let s = lens.len();
    let mut rest = a;
    let mut coeffs = Vec::with_capacity(s);
    for i in 1..=s {
        let w = lens.n(i + 1, s);
        let ai = Integer::div_floor(&rest, &w);
        coeffs.push(ai);
        rest -= ai * w;
    }
    Ok(SpincCoeffs { a, coeffs })
}

/// All systems `E(p−1), E(p−2), …, E(0)` generated by the descending
/// recursion that starts at `(k₁−1, k₂−2, …, k_s−2)`; returned in
/// ascending order of `a`.
pub fn spinc_coeffs_descending(lens: &LensSpace) -> Vec<SpincCoeffs> {
    let s = lens.len();
    let top = |from: usize, coeffs: &mut Vec<i64>| {
        // Positions from..s (0-based) receive k − 1 at `from`, k − 2 after.
        for t in from..s {
            coeffs[t] = lens.cf[t] - if t == from { 1 } else { 2 };
        }
    };
    let mut current = vec![0; s];
    top(0, &mut current);
    let mut out = Vec::with_capacity(lens.p as usize);
    for a in (0..lens.p).rev() {
        out.push(SpincCoeffs {
            a,
            coeffs: current.clone(),
        });
        if a == 0 {
            break;
        }
        if current[s - 1] > 0 {
            current[s - 1] -= 1;
        } else {
            let last = current
                .iter()
                .rposition(|&c| c != 0)
                .expect("only E(0) is identically zero");
            current[last] -= 1;
            top(last + 1, &mut current);
        }
    }
    out.reverse();
    out
}

/// `χ(l'_{[−a g_s]}) = a(1−p)/(2p) + Σ_{j=1}^{a} {j q'/p}`.
pub fn chi_lprime(lens: &LensSpace, a: i64) -> Result<Rational, LensError> {
    lens.check_index(a)?;
    let p = lens.p;
    let frac_sum: i64 = (1..=a).map(|j| (j * lens.q_prime).rem_euclid(p)).sum();
    Ok(rat(a * (1 - p), 2 * p) + rat(frac_sum, p))
}

/// `χ(l'_{[−a g_s]})` for every `a`, by prefix sums.
pub fn chi_table(lens: &LensSpace) -> Vec<Rational> {
    let p = lens.p;
    let mut frac_sum = 0i64;
    (0..p)
        .map(|a| {
            if a > 0 {
                frac_sum += (a * lens.q_prime).rem_euclid(p);
            }
            rat(a * (1 - p), 2 * p) + rat(frac_sum, p)
        })
        .collect()
}

/// `K² + s = 4((p−1)/(2p) − 3 s(q, p))`.
pub fn k_squared_plus_s(lens: &LensSpace) -> Rational {
    int(4) * (rat(lens.p - 1, 2 * lens.p) - int(3) * dedekind(lens))
}

/// The Casson–Walker invariant `λ(L(p, q)) = p · s(q, p) / 2`.
pub fn casson_walker(lens: &LensSpace) -> Rational {
    int(lens.p) * dedekind(lens) / int(2)
}

fn dedekind(lens: &LensSpace) -> Rational {
    dedekind_sum(lens.q, lens.p).expect("p and q are coprime")
}

/// Exact invariants of one spin^c structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LensInvariants {
    /// `p`.
    pub p: i64,
    /// `q`.
    pub q: i64,
    /// Spin^c index `a`.
    pub a: i64,
    /// Correction term `d = (K²+s)/4 − 2χ(l')`.
    #[serde(with = "serde_pq")]
    pub d: Rational,
    /// Always `0`: lens spaces are L-spaces.
    pub rank_red: u64,
    /// `χ(l'_{[−a g_s]})`.
    #[serde(with = "serde_pq")]
    pub chi: Rational,
    /// Reidemeister–Turaev torsion `T(1) = (p−1)/(4p) − s(q,p) − χ(l')`.
    #[serde(with = "serde_pq")]
    pub torsion: Rational,
    /// Casson–Walker invariant.
    #[serde(with = "serde_pq")]
    pub lambda: Rational,
    /// `χ(HF⁺) − d/2` with `HF⁺_red = 0`, i.e. `−d/2`.
    #[serde(with = "serde_pq")]
    pub sw_osz: Rational,
    /// `−T(1) + λ/|H|`.
    #[serde(with = "serde_pq")]
    pub sw_tcw: Rational,
}

impl LensInvariants {
    /// Whether `T(1) − λ/|H| = d/2`, equivalently `sw^OSz = sw^TCW`.
    pub fn identity_holds(&self) -> bool {
        &self.torsion - &self.lambda / int(self.p) == &self.d / int(2) && self.sw_osz == self.sw_tcw
    }
}

fn invariants_from_chi(lens: &LensSpace, a: i64, chi: Rational) -> LensInvariants {
    let s = dedekind(lens);
    let p = lens.p;
    let d = rat(p - 1, 2 * p) - int(3) * &s - int(2) * &chi;
    let torsion = rat(p - 1, 4 * p) - &s - &chi;
    let lambda = int(p) * &s / int(2);
    let sw_osz = -&d / int(2);
    let sw_tcw = -&torsion + &lambda / int(p);
    LensInvariants {
        p,
        q: lens.q,
        a,
        d,
        rank_red: 0,
        chi,
        torsion,
        lambda,
        sw_osz,
        sw_tcw,
    }
}

/// Invariants of the spin^c structure `a`.
pub fn lens_invariants(lens: &LensSpace, a: i64) -> Result<LensInvariants, LensError> {
    let chi = chi_lprime(lens, a)?;
    Ok(invariants_from_chi(lens, a, chi))
}

/// Invariants of every spin^c structure, ordered by `a`.
pub fn lens_table(lens: &LensSpace) -> Vec<LensInvariants> {
    chi_table(lens)
        .into_iter()
        .enumerate()
        .map(|(a, chi)| invariants_from_chi(lens, a as i64, chi))
        .collect()
}

/// `T(1)` for every `a` by the character sum
/// `(1/p) Σ_{ξ^p = 1, ξ ≠ 1} ξ^{−a} / ((ξ − 1)(ξ^q − 1))` in double
/// precision.
pub fn torsion_fourier_f64(lens: &LensSpace) -> Vec<f64> {
    let p = lens.p as usize;
    let q = lens.q as usize;
    let root = |m: usize| Complex64::from_polar(1.0, std::f64::consts::TAU * (m % p) as f64 / p as f64);
    let weights: Vec<Complex64> = (1..p)
        .map(|m| 1.0 / ((root(m) - 1.0) * (root(m * q) - 1.0)))
        .collect();
    (0..p)
        .map(|a| {
            let total: f64 = weights
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let m = i + 1;
                    (root((p - (a * m) % p) % p) * w).re
                })
                .sum();
            total / p as f64
        })
        .collect()
}

/// `T(1)` for the structure `a` by the character sum in `bits`-bit binary
/// floating point; only the real part is accumulated (the imaginary parts
/// cancel in conjugate pairs).
pub fn torsion_fourier_precise(lens: &LensSpace, a: i64, bits: usize) -> BigFloat {
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().expect("constant cache");
    let p = lens.p as usize;
    let pi = cc.pi(bits, rm);
    let step = pi
        .mul(&BigFloat::from_i64(2, bits), bits, rm)
        .div(&BigFloat::from_i64(lens.p, bits), bits, rm);
    let table: Vec<(BigFloat, BigFloat)> = (0..p)
        .map(|m| {
            let angle = step.mul(&BigFloat::from_i64(m as i64, bits), bits, rm);
            (angle.cos(bits, rm, &mut cc), angle.sin(bits, rm, &mut cc))
        })
        .collect();
    let one = BigFloat::from_i64(1, bits);
    let q = lens.q as usize;
    let a = a as usize;
    let mut total = BigFloat::from_i64(0, bits);
    for m in 1..p {
        // w = (ξ − 1)(ξ^q − 1), numerator ξ^{−a}; Re(num · conj(w)) / |w|².
        let (c1, s1) = &table[m];
        let (c2, s2) = &table[(m * q) % p];
        let (x1, x2) = (c1.sub(&one, bits, rm), c2.sub(&one, bits, rm));
        let wr = x1.mul(&x2, bits, rm).sub(&s1.mul(s2, bits, rm), bits, rm);
        let wi = x1.mul(s2, bits, rm).add(&s1.mul(&x2, bits, rm), bits, rm);
        let (cn, sn) = &table[(p - (a * m) % p) % p];
        let re = cn.mul(&wr, bits, rm).add(&sn.mul(&wi, bits, rm), bits, rm);
        let norm = wr.mul(&wr, bits, rm).add(&wi.mul(&wi, bits, rm), bits, rm);
        total = total.add(&re.div(&norm, bits, rm), bits, rm);
    }
    total.div(&BigFloat::from_i64(lens.p, bits), bits, rm)
}

/// A rational as a `bits`-bit float.
pub fn rational_to_bigfloat(x: &Rational, bits: usize) -> BigFloat {
    let rm = RoundingMode::ToEven;
    let parse = |n: &BigInt| {
        n.to_i128()
            .map(|v| BigFloat::from_i128(v, bits))
            .unwrap_or_else(|| BigFloat::parse(&n.to_string(), astro_float::Radix::Dec, bits, rm, &mut Consts::new().expect("constant cache")))
    };
    if x.is_zero() {
        return BigFloat::from_i64(0, bits);
    }
    parse(x.numer()).div(&parse(x.denom()), bits, rm)
}

/// Whether `|approx − exact| < 2^{−tolerance_bits}`.
pub fn agrees_within(approx: &BigFloat, exact: &Rational, bits: usize, tolerance_bits: usize) -> bool {
    let rm = RoundingMode::ToEven;
    let diff = approx.sub(&rational_to_bigfloat(exact, bits), bits, rm);
    let two = BigFloat::from_i64(2, bits);
    let tol = two.powi(tolerance_bits, bits, rm);
    let scaled = diff.mul(&tol, bits, rm);
    matches!(scaled.abs().cmp(&BigFloat::from_i64(1, bits)), Some(c) if c < 0)
}
