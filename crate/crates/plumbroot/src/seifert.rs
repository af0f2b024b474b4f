//! Seifert fibered rational homology spheres with negative orbifold Euler
//! number.
//!
//! The normalized invariants `e₀` and `(α_l, ω_l)`, `0 < ω_l < α_l`, give a
//! star-shaped plumbing graph whose central vertex is an AR vertex. Every
//! quantity of the AR pipeline has a closed form here: the spin^c
//! enumeration through the reduced inequality system, `χ(l'_{[k]})`,
//! `K² + s`, the cycles `x(i)` and the τ-function, the Dolgachev–Pinkham
//! count and the torsion limit, the latter by exact Laurent expansion.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use twofloat::TwoFloat;

use crate::arith::{ceil_div, floor_div, int, rat, serde_pq, to_i64_exact, Rational};
use crate::dedekind::dedekind_sum;
use crate::graph::{GraphError, PlumbingGraph};
use crate::lattice::{DualVector, LatticeVector};
use crate::lens::{spinc_coeffs, LensSpace, SpincCoeffs};
use crate::root::TauFunction;
use crate::series::{Laurent, SeriesError};
use crate::spinc::{distinguished_rep, orbit_of};

/// Number of series terms kept when expanding at `t = 1 + u`: the pole
/// order two plus one.
const SERIES_TERMS: usize = 3;

/// Largest candidate count the spin^c enumeration will scan.
const CANDIDATE_CAP: u128 = 50_000_000;

/// Failures of the Seifert pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeifertError {
    /// Fewer than three legs.
    #[error("{0} legs given; Seifert data needs at least 3 (use the lens module for chains)")]
    TooFewLegs(usize),
    /// A leg violating `0 < ω < α`, `gcd(α, ω) = 1`.
    #[error("invalid leg {alpha}/{omega}: need α ≥ 2, 0 < ω < α and gcd(α, ω) = 1")]
    InvalidLeg { alpha: i64, omega: i64 },
    /// `e ≥ 0`: the plumbing is not negative definite.
    #[error("orbifold Euler number e = {0} is not negative")]
    PositiveOrbifoldEuler(String),
    /// An intermediate quantity does not fit a machine integer.
    #[error("{0} overflows 64-bit integers")]
    Overflow(&'static str),
    /// The enumeration did not produce `|H|` structures.
    #[error("spin^c enumeration found {found} structures, expected |H| = {expected}")]
    CountMismatch { expected: i64, found: usize },
    /// A candidate is not the distinguished representative of its class.
    #[error("coefficients a₀ = {a0}, a = {a:?} are not a distinguished representative")]
    RepresentativeMismatch { a0: i64, a: Vec<i64> },
    /// `α·ã` is not an integer.
    #[error("exponent α·ã = {0} is not an integer")]
    NonIntegralExponent(String),
    /// The candidate space is too large to scan.
    #[error("spin^c search space of {0} candidates exceeds the cap")]
    SearchTooLarge(u128),
    /// An identity failed; the payload is a counterexample dump.
    #[error("identity violated: {0}")]
    IdentityViolated(String),
    /// Graph construction failed.
    #[error(transparent)]
    Graph(#[from] GraphError),
    /// Series arithmetic failed.
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// A normalized Seifert pair `(α, ω)` with `0 < ω < α`, `gcd(α, ω) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Leg {
    /// Multiplicity `α ≥ 2`.
    pub alpha: i64,
    /// `0 < ω < α`.
    pub omega: i64,
}

impl Leg {
    /// Validated constructor.
    pub fn new(alpha: i64, omega: i64) -> Result<Self, SeifertError> {
        if alpha < 2 || omega <= 0 || omega >= alpha || alpha.gcd(&omega) != 1 {
            return Err(SeifertError::InvalidLeg { alpha, omega });
        }
        Ok(Leg { alpha, omega })
    }
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.alpha, self.omega)
    }
}

/// Failure to parse a leg written as `"α/ω"`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LegParseError {
    /// Not of the form `integer/integer`.
    #[error("leg `{0}` is not of the form α/ω")]
    Syntax(String),
    /// Parsed but invalid.
    #[error(transparent)]
    Invalid(#[from] SeifertError),
}

impl FromStr for Leg {
    type Err = LegParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || LegParseError::Syntax(s.to_string());
        let (a, w) = s.trim().split_once('/').ok_or_else(syntax)?;
        let alpha: i64 = a.trim().parse().map_err(|_| syntax())?;
        let omega: i64 = w.trim().parse().map_err(|_| syntax())?;
        Ok(Leg::new(alpha, omega)?)
    }
}

/// Normalized Seifert invariants with their derived quantities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeifertData {
    e0: i64,
    legs: Vec<Leg>,
    arms: Vec<LensSpace>,
    e: Rational,
    epsilon: Rational,
    alpha: i64,
    o: i64,
    order: i64,
}

impl SeifertData {
    /// Validates the data: at least three legs and `e < 0`.
    pub fn new(e0: i64, legs: Vec<Leg>) -> Result<Self, SeifertError> {
        if legs.len() < 3 {
            return Err(SeifertError::TooFewLegs(legs.len()));
        }
        for l in &legs {
            Leg::new(l.alpha, l.omega)?;
        }
        let e = legs.iter().fold(int(e0), |acc, l| acc + rat(l.omega, l.alpha));
        if !e.is_negative() {
            return Err(SeifertError::PositiveOrbifoldEuler(e.to_string()));
        }
        let nu = legs.len() as i64;
        let epsilon = legs.iter().fold(int(2 - nu), |acc, l| acc + rat(1, l.alpha)) / &e;
        let alpha = legs
            .iter()
            .try_fold(1i64, |acc, l| acc.checked_mul(l.alpha / acc.gcd(&l.alpha)))
            .ok_or(SeifertError::Overflow("lcm of the multiplicities"))?;
        let o = to_i64_exact(&(-&e * int(alpha))).ok_or(SeifertError::Overflow("o = −eα"))?;
        let prod = legs
            .iter()
            .try_fold(1i64, |acc, l| acc.checked_mul(l.alpha))
            .ok_or(SeifertError::Overflow("Πα_l"))?;
        let order = to_i64_exact(&(-&e * int(prod))).ok_or(SeifertError::Overflow("|H|"))?;
        let arms = legs
            .iter()
            .map(|l| LensSpace::new(l.alpha, l.omega).expect("validated leg"))
            .collect();
        Ok(SeifertData {
            e0,
            legs,
            arms,
            e,
            epsilon,
            alpha,
            o,
            order,
        })
    }

    /// Central decoration `e₀`.
    pub fn e0(&self) -> i64 {
        self.e0
    }

    /// The legs `(α_l, ω_l)`.
    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    /// Number of legs `ν`.
    pub fn nu(&self) -> usize {
        self.legs.len()
    }

    /// Orbifold Euler number `e = e₀ + Σ ω_l/α_l`.
    pub fn e(&self) -> &Rational {
        &self.e
    }

    /// `ε = (2 − ν + Σ 1/α_l)/e`.
    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    /// `α = lcm(α_l)`.
    pub fn alpha(&self) -> i64 {
        self.alpha
    }

    /// `o = −eα`, the order of `[g₀]`.
    pub fn o(&self) -> i64 {
        self.o
    }

    /// `|H| = −e Π α_l`.
    pub fn order(&self) -> i64 {
        self.order
    }

    /// `ω'_l` with `ω_l ω'_l ≡ 1 (mod α_l)`.
    pub fn omega_prime(&self, l: usize) -> i64 {
        self.arms[l].q_prime()
    }

    /// The continued-fraction data of leg `l` (as the lens space
    /// `L(α_l, ω_l)`).
    pub fn arm(&self, l: usize) -> &LensSpace {
        &self.arms[l]
    }

    /// Index of vertex `v^l_j` (`j ≥ 1`) in [`SeifertData::graph`]; the
    /// centre is vertex 0.
    pub fn leg_vertex(&self, l: usize, j: usize) -> usize {
        1 + self.arms[..l].iter().map(LensSpace::len).sum::<usize>() + (j - 1)
    }

    /// The star-shaped plumbing graph: centre `e₀`, leg `l` the chain of
    /// `α_l/ω_l = [k₁, …]` with `v₁` adjacent to the centre.
    pub fn graph(&self) -> Result<PlumbingGraph, SeifertError> {
        let mut vertices = vec![(0i64, self.e0)];
        let mut edges = Vec::new();
        for (l, arm) in self.arms.iter().enumerate() {
            let mut prev = 0i64;
            for (j, &k) in arm.cf().iter().enumerate() {
                let id = self.leg_vertex(l, j + 1) as i64;
                vertices.push((id, -k));
                edges.push((prev, id));
                prev = id;
            }
        }
        Ok(PlumbingGraph::new(&vertices, &edges)?)
    }
}

/// A spin^c structure in reduced coordinates `(a₀; a₁, …, a_ν)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SeifertSpinc {
    /// `a₀ ≥ 0`.
    pub a0: i64,
    /// `0 ≤ a_l < α_l`.
    pub a: Vec<i64>,
}

impl SeifertSpinc {
    /// The canonical structure (all coefficients zero).
    pub fn canonical(data: &SeifertData) -> Self {
        SeifertSpinc {
            a0: 0,
            a: vec![0; data.nu()],
        }
    }

    /// `ã = a₀ + Σ a_l/α_l`.
    pub fn a_tilde(&self, data: &SeifertData) -> Rational {
        data.legs
            .iter()
            .zip(&self.a)
            .fold(int(self.a0), |acc, (l, &a)| acc + rat(a, l.alpha))
    }

    /// Per-leg expansions `E(a_l)`.
    pub fn leg_coeffs(&self, data: &SeifertData) -> Vec<SpincCoeffs> {
        data.arms
            .iter()
            .zip(&self.a)
            .map(|(arm, &a)| spinc_coeffs(arm, a).expect("0 ≤ a_l < α_l"))
            .collect()
    }

    /// Pairings `(l', b_j)`: `−a₀` at the centre and `−a^l_j` on the legs.
    pub fn pairings(&self, data: &SeifertData) -> Vec<i64> {
        let mut p = vec![-self.a0];
        for e in self.leg_coeffs(data) {
            p.extend(e.coeffs.iter().map(|c| -c));
        }
        p
    }

    /// `l' = −a₀ g₀ − Σ a^l_j g^l_j`.
    pub fn l_prime(&self, data: &SeifertData, graph: &PlumbingGraph) -> DualVector {
        graph.dual_from_int_pairings(&self.pairings(data))
    }

    /// `1 + a₀ + i e₀ + Σ ⌊(iω_l + a_l)/α_l⌋`, non-positive for every
    /// `i > 0` exactly on the reduced system.
    fn constraint(&self, data: &SeifertData, i: i64) -> i64 {
        1 + self.a0
            + i * data.e0
            + data
                .legs
                .iter()
                .zip(&self.a)
                .map(|(l, &a)| floor_div(i * l.omega + a, l.alpha))
                .sum::<i64>()
    }

    /// Whether `(a₀; a)` solves the reduced inequality system. The
    /// constraint drops by `o` when `i` grows by `α`, so `1 ≤ i ≤ α`
    /// suffices.
    pub fn satisfies_reduced_system(&self, data: &SeifertData) -> bool {
        self.a0 >= 0
            && self.a.len() == data.nu()
            && self.a.iter().zip(&data.legs).all(|(&a, l)| (0..l.alpha).contains(&a))
            && (1..=data.alpha).all(|i| self.constraint(data, i) <= 0)
    }
}

impl fmt::Display for SeifertSpinc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.a0)?;
        for (i, a) in self.a.iter().enumerate() {
            write!(f, "{}{a}", if i == 0 { " " } else { ", " })?;
        }
        write!(f, ")")
    }
}

/// All spin^c structures, sorted by `(a₀, a)`. Candidates `a₀ ≤ −1 − e₀`
/// (the `i = 1` constraint) and `0 ≤ a_l < α_l` are filtered by the reduced
/// system; the result must have exactly `|H|` elements and each must be the
/// distinguished representative of its class on the star graph.
pub fn enumerate_seifert_spinc(data: &SeifertData) -> Result<Vec<SeifertSpinc>, SeifertError> {
    let a0_max = -1 - data.e0;
    let legs_space: u128 = data.legs.iter().map(|l| l.alpha as u128).product();
    let space = legs_space * (a0_max.max(0) as u128 + 1);
    if space > CANDIDATE_CAP {
        return Err(SeifertError::SearchTooLarge(space));
    }
    let mut found = Vec::new();
    for a0 in 0..=a0_max {
        let mut a = vec![0i64; data.nu()];
        loop {
            let cand = SeifertSpinc { a0, a: a.clone() };
            if cand.satisfies_reduced_system(data) {
                found.push(cand);
            }
            // Odometer over the leg coefficients.
            let mut l = 0;
            while l < a.len() {
                a[l] += 1;
                if a[l] < data.legs[l].alpha {
                    break;
                }
                a[l] = 0;
                l += 1;
            }
            if l == a.len() {
                break;
            }
        }
    }
    found.sort();
    if found.len() as i64 != data.order {
        return Err(SeifertError::CountMismatch {
            expected: data.order,
            found: found.len(),
        });
    }
    let graph = data.graph()?;
    for sp in &found {
        let lp = sp.l_prime(data, &graph);
        let rep = distinguished_rep(&graph, &lp).map_err(|_| SeifertError::RepresentativeMismatch {
            a0: sp.a0,
            a: sp.a.clone(),
        })?;
        if rep != lp {
            return Err(SeifertError::RepresentativeMismatch {
                a0: sp.a0,
                a: sp.a.clone(),
            });
        }
    }
    Ok(found)
}

/// `Σ_{i=1}^{n} {i ω'/α}`.
fn frac_sum(omega_prime: i64, alpha: i64, n: i64) -> Rational {
    rat((1..=n).map(|i| (i * omega_prime).rem_euclid(alpha)).sum(), alpha)
}

/// `χ(l'_{[k]})` by the closed formula
/// `−χ = Σ_{l≥0} a_l/2 + εã/2 + ã²/(2e) − Σ_l Σ_{i ≤ a_l} {iω'_l/α_l}`.
pub fn seifert_chi_lprime(data: &SeifertData, sp: &SeifertSpinc) -> Rational {
    let at = sp.a_tilde(data);
    let mut minus_chi = rat(sp.a0 + sp.a.iter().sum::<i64>(), 2)
        + &data.epsilon * &at / int(2)
        + &at * &at / (int(2) * &data.e);
    for (l, &a) in sp.a.iter().enumerate() {
        minus_chi -= frac_sum(data.omega_prime(l), data.legs[l].alpha, a);
    }
    -minus_chi
}

/// `χ(l'_{[k]})` by raising the leg coefficients one unit at a time from
/// `(a₀; 0, …, 0)`, using the step
/// `χ(k⁻_l) − χ(k) = χ(g^l) + (a₀ + Σ a_t/α_t)/(eα_l) − {a_l ω'_l/α_l}`.
pub fn seifert_chi_lprime_stepwise(data: &SeifertData, sp: &SeifertSpinc) -> Rational {
    let e = &data.e;
    let a0 = int(sp.a0);
    let mut chi = -(&a0 * &a0 / (int(2) * e) + &a0 * (int(1) + &data.epsilon) / int(2));
    let mut cur = SeifertSpinc {
        a0: sp.a0,
        a: vec![0; data.nu()],
    };
    for l in 0..data.nu() {
        let al = data.legs[l].alpha;
        let chi_g = rat(1, 2) + &data.epsilon / int(2 * al) - int(1) / (int(2 * al * al) * e);
        for _ in 0..sp.a[l] {
            cur.a[l] += 1;
            let step = &chi_g + cur.a_tilde(data) / (e * int(al))
                - rat((cur.a[l] * data.omega_prime(l)).rem_euclid(al), al);
            chi -= step;
        }
    }
    chi
}

/// `K² + s = ε²e + e + 5 − 12 Σ s(ω_l, α_l)`.
pub fn seifert_k2s(data: &SeifertData) -> Rational {
    k_squared_plus_s_star(data.e0, &data.legs)
}

/// The [`seifert_k2s`] formula for a star-shaped graph with any number of
/// legs (including the chains of lens spaces, with at most two legs), with
/// `e = e₀ + Σ ω_l/α_l` and `ε = (2 − ν + Σ 1/α_l)/e`.
///
/// # Panics
/// Panics if `e = 0`.
pub fn k_squared_plus_s_star(e0: i64, legs: &[Leg]) -> Rational {
    let e = legs.iter().fold(int(e0), |acc, l| acc + rat(l.omega, l.alpha));
    assert!(!e.is_zero(), "star with vanishing orbifold Euler number");
    let epsilon = legs.iter().fold(int(2 - legs.len() as i64), |acc, l| acc + rat(1, l.alpha)) / &e;
    let s = legs
        .iter()
        .map(|l| dedekind_sum(l.omega, l.alpha).expect("coprime leg"))
        .fold(Rational::zero(), |a, b| a + b);
    &epsilon * &epsilon * &e + &e + int(5) - int(12) * s
}

/// `Δτ(i) = 1 + a₀ − i e₀ + Σ ⌊(−iω_l + a_l)/α_l⌋`.
pub fn tau_increment(data: &SeifertData, sp: &SeifertSpinc, i: i64) -> i64 {
    1 + sp.a0 - i * data.e0
        + data
            .legs
            .iter()
            .zip(&sp.a)
            .map(|(l, &a)| floor_div(-i * l.omega + a, l.alpha))
            .sum::<i64>()
}

/// `i* = max(0, ⌈(ν − 1 − a₀)/(−e)⌉)`: every `Δτ(i)` with `i ≥ i*` is
/// positive.
pub fn tau_bound(data: &SeifertData, sp: &SeifertSpinc) -> i64 {
    let x = int(data.nu() as i64 - 1 - sp.a0) / -&data.e;
    x.ceil().to_integer().to_i64().expect("small bound").max(0)
}

/// The τ-function from the closed increments, truncated after the last
/// descent (certified by [`tau_bound`]).
pub fn seifert_tau(data: &SeifertData, sp: &SeifertSpinc) -> TauFunction {
    let bound = tau_bound(data, sp);
    let mut incs: Vec<i64> = (0..bound).map(|i| tau_increment(data, sp, i)).collect();
    let keep = incs.iter().rposition(|&d| d < 0).map_or(0, |b| b + 1);
    incs.truncate(keep);
    TauFunction::from_increments(0, &incs, true)
}

/// The cycle `x(i)` in closed form: coefficient `i` at the centre and
/// `v^l_1 = ⌈(iω_l − a_l)/α_l⌉`,
/// `v^l_j = ⌈(v^l_{j−1} n_{j+1,s} − ã^l_j)/n_{j,s}⌉` on leg `l`.
pub fn x_closed_form(data: &SeifertData, sp: &SeifertSpinc, i: i64) -> LatticeVector {
    let mut x = vec![0i64; 1 + data.arms.iter().map(LensSpace::len).sum::<usize>()];
    x[0] = i;
    for (l, e) in sp.leg_coeffs(data).iter().enumerate() {
        let arm = &data.arms[l];
        let s = arm.len();
        let tilde = |j: usize| -> i64 { (j..=s).map(|t| arm.n(t + 1, s) * e.coeffs[t - 1]).sum() };
        let mut prev = i;
        for j in 1..=s {
            let v = ceil_div(prev * arm.n(j + 1, s) - tilde(j), arm.n(j, s));
            x[data.leg_vertex(l, j)] = v;
            prev = v;
        }
    }
    LatticeVector::new(x)
}

/// The Dolgachev–Pinkham invariant
/// `Σ_{i≥0} max{0, −1 + i e₀ − Σ ⌊−iω_l/α_l⌋}`.
pub fn dp_invariant(data: &SeifertData) -> i64 {
    let can = SeifertSpinc::canonical(data);
    (0..tau_bound(data, &can))
        .map(|i| (-tau_increment(data, &can, i)).max(0))
        .sum()
}

/// The coefficient `c(i)` of `P_{[k]}(t) = Σ_{i≥0} c(i) t^{oi + αã}`, which
/// equals `Δτ(i)`.
fn series_coefficient(data: &SeifertData, sp: &SeifertSpinc, i: i64) -> i64 {
    tau_increment(data, sp, i)
}

/// The exponent `αã`, asserted integral.
fn alpha_a_tilde(data: &SeifertData, sp: &SeifertSpinc) -> Result<i64, SeifertError> {
    let x = sp.a_tilde(data) * int(data.alpha);
    to_i64_exact(&x).ok_or_else(|| SeifertError::NonIntegralExponent(x.to_string()))
}

/// `L = lim_{t→1} (P_{[k]}(t) − P̂₁(t)/|H|)` exactly.
///
/// With `c(r + mα) = c(r) + m·o` and `T = t^{oα}`,
/// `P_{[k]} = t^{αã} Σ_{r<α} t^{or} (c(r)(1 − T) + oT)/(1 − T)²`; both this
/// and `P̂₁ = (t^α − 1)^{ν−2}/Π(t^{α/α_l} − 1)` have a double pole at
/// `u = t − 1 = 0`, and the constant terms are read from exact expansions.
pub fn seifert_torsion_limit(data: &SeifertData, sp: &SeifertSpinc) -> Result<Rational, SeifertError> {
    let n = SERIES_TERMS;
    let at = alpha_a_tilde(data, sp)?;
    let (o, alpha) = (data.o, data.alpha);
    let big_t = Laurent::one_plus_u_pow(o * alpha, n);
    // (1 − T)/u = −((1+u)^{oα} − 1)/u.
    let w = Laurent::power_minus_one_over_u(o * alpha, n).scale(&-Rational::one());
    let u_w = w.shift(1);
    let mut numer = Laurent::constant(Rational::zero(), n);
    for r in 0..alpha {
        let c = int(series_coefficient(data, sp, r));
        let bracket = u_w.scale(&c).add(&big_t.scale(&int(o)));
        numer = numer.add(&Laurent::one_plus_u_pow(at + o * r, n).mul(&bracket));
    }
    // P = numer / (u² w²): constant term is the u² coefficient of numer/w².
    let p_const = numer.div(&w.pow(2))?.coeff(2)?;
    let nu = data.nu() as u32;
    let mut hat = Laurent::power_minus_one_over_u(alpha, n).pow(nu - 2);
    for l in &data.legs {
        hat = hat.div(&Laurent::power_minus_one_over_u(alpha / l.alpha, n))?;
    }
    let hat_const = hat.coeff(2)?;
    Ok(p_const - hat_const / int(data.order))
}

/// Numeric oracle for [`seifert_torsion_limit`]: partial sums of
/// `P_{[k]}(t) − P̂₁(t)/|H|` in double-double arithmetic at
/// `t = 1 − 10^{−m}`, `m = 3, 4, 5`, extrapolated to `t = 1` by
/// polynomial (Richardson–Neville) extrapolation.
pub fn seifert_torsion_limit_numeric(data: &SeifertData, sp: &SeifertSpinc) -> Result<f64, SeifertError> {
    let at = alpha_a_tilde(data, sp)?;
    let samples: Vec<(TwoFloat, TwoFloat)> = [3, 4, 5]
        .iter()
        .map(|&m| {
            let h = TwoFloat::from(10f64.powi(-m));
            let t = TwoFloat::from(1.0) - h;
            (h, evaluate_difference(data, sp, at, t))
        })
        .collect();
    Ok(neville_at_zero(&samples).hi())
}

fn evaluate_difference(data: &SeifertData, sp: &SeifertSpinc, at: i64, t: TwoFloat) -> TwoFloat {
    let one = TwoFloat::from(1.0);
    let pow = |x: TwoFloat, n: i64| -> TwoFloat {
        let mut acc = one;
        let mut base = x;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        acc
    };
    let step = pow(t, data.o);
    let mut term = pow(t, at);
    let mut sum = TwoFloat::from(0.0);
    let mut i = 0i64;
    loop {
        let c = series_coefficient(data, sp, i);
        let contribution = term * c as f64;
        sum += contribution;
        i += 1;
        term *= step;
        // Past one period the coefficients grow linearly while t^{oi}
        // decays geometrically; the tail after a term of relative size
        // 10⁻⁴⁰ is below 10⁻³⁰ of the sum for the sample points used.
        if i > data.alpha && c > 0 && contribution.abs() < sum.abs() * 1e-40 {
            break;
        }
    }
    let mut hat = pow(pow(t, data.alpha) - one, data.nu() as i64 - 2);
    for l in &data.legs {
        hat /= pow(t, data.alpha / l.alpha) - one;
    }
    sum - hat / (data.order as f64)
}

/// Value at `h = 0` of the polynomial through the samples `(h_k, f_k)`.
fn neville_at_zero(samples: &[(TwoFloat, TwoFloat)]) -> TwoFloat {
    let h: Vec<TwoFloat> = samples.iter().map(|s| s.0).collect();
    let mut p: Vec<TwoFloat> = samples.iter().map(|s| s.1).collect();
    let n = p.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (h[i + k] * p[i] - h[i] * p[i + 1]) / (h[i + k] - h[i]);
        }
    }
    p[0]
}

/// Per-structure report of the Seifert pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeifertOrbitReport {
    /// The structure.
    pub spinc: SeifertSpinc,
    /// `(l', b_j)` per vertex.
    pub pairings: Vec<i64>,
    /// `χ(l'_{[k]})`.
    #[serde(with = "serde_pq")]
    pub chi: Rational,
    /// `k_r² + s`.
    #[serde(with = "serde_pq")]
    pub k_r_squared_plus_s: Rational,
    /// τ-values up to the last descent.
    pub tau: Vec<i64>,
    /// `min τ`.
    pub min_tau: i64,
    /// `rank HF⁺_red(−M, [k])`.
    pub rank_red: u64,
    /// `χ(HF⁺(−M, [k]))`, equal to `rank_red`.
    pub chi_hf: i64,
    /// `d(M, [k]) = (k_r²+s)/4 − 2 min τ`.
    #[serde(with = "serde_pq")]
    pub d: Rational,
    /// `χ(HF⁺(M)) − d/2 = −rank_red − d/2`.
    #[serde(with = "serde_pq")]
    pub sw_osz: Rational,
    /// `−T(1) + λ/|H|`.
    #[serde(with = "serde_pq")]
    pub sw_tcw: Rational,
    /// The torsion limit `L`.
    #[serde(with = "serde_pq")]
    pub limit: Rational,
    /// `T(1) = L + χ(HF⁺(−M)) − min τ`.
    #[serde(with = "serde_pq")]
    pub torsion: Rational,
    /// Numeric extrapolation of `L` (approximate, not part of the exact
    /// data).
    pub limit_approx: f64,
    /// Always `true`: stabilization follows from the closed bound.
    pub certified: bool,
}

/// Full identity verification for one Seifert datum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeifertReport {
    /// `e₀`.
    pub e0: i64,
    /// Legs.
    pub legs: Vec<Leg>,
    /// `e`.
    #[serde(with = "serde_pq")]
    pub e: Rational,
    /// `ε`.
    #[serde(with = "serde_pq")]
    pub epsilon: Rational,
    /// `|H|`.
    pub order: i64,
    /// `K² + s`.
    #[serde(with = "serde_pq")]
    pub k_squared_plus_s: Rational,
    /// Casson–Walker invariant of the star graph.
    #[serde(with = "serde_pq")]
    pub lambda: Rational,
    /// Dolgachev–Pinkham invariant.
    pub dp: i64,
    /// Per-structure data, sorted by `(a₀, a)`.
    pub orbits: Vec<SeifertOrbitReport>,
}

/// Tolerance of the numeric torsion oracle.
pub const NUMERIC_TOLERANCE: f64 = 1e-6;

fn violation(what: &str, data: &SeifertData, sp: Option<&SeifertSpinc>, lhs: &Rational, rhs: &Rational) -> SeifertError {
    let legs: Vec<String> = data.legs.iter().map(Leg::to_string).collect();
    let at = sp.map_or_else(|| "global".to_string(), |s| s.to_string());
    SeifertError::IdentityViolated(format!(
        "{what} fails for e0 = {}, legs [{}], structure {at}: {lhs} ≠ {rhs}",
        data.e0,
        legs.join(", ")
    ))
}

fn analyze_structure(
    data: &SeifertData,
    graph: &PlumbingGraph,
    k2s: &Rational,
    lambda: &Rational,
    sp: &SeifertSpinc,
) -> Result<SeifertOrbitReport, SeifertError> {
    let h = int(data.order);
    let chi = seifert_chi_lprime(data, sp);
    let chi_graph = graph.chi_rational(&sp.l_prime(data, graph));
    if chi != chi_graph {
        return Err(violation("closed χ(l') = lattice χ(l')", data, Some(sp), &chi, &chi_graph));
    }
    let chi_steps = seifert_chi_lprime_stepwise(data, sp);
    if chi != chi_steps {
        return Err(violation("closed χ(l') = stepwise χ(l')", data, Some(sp), &chi, &chi_steps));
    }
    let kr = k2s - int(8) * &chi;
    let tau = seifert_tau(data, sp);
    let (rank_red, min_tau) = tau.rank_red();
    let limit = seifert_torsion_limit(data, sp)?;
    let expected = lambda / &h + &kr / int(8);
    if limit != expected {
        return Err(violation("L = λ/|H| + (k_r²+s)/8", data, Some(sp), &limit, &expected));
    }
    let rank_q = int(rank_red as i64);
    let torsion = &limit + &rank_q - int(min_tau);
    let d = &kr / int(4) - int(2 * min_tau);
    let sw_osz = -&rank_q - &d / int(2);
    let sw_tcw = -&torsion + lambda / &h;
    if sw_osz != sw_tcw {
        return Err(violation("sw^OSz = sw^TCW", data, Some(sp), &sw_osz, &sw_tcw));
    }
    let limit_approx = seifert_torsion_limit_numeric(data, sp)?;
    let exact = crate::arith::to_f64(&limit);
    let error = (limit_approx - exact).abs();
    // A NaN error must fail as well.
    if error.is_nan() || error >= NUMERIC_TOLERANCE {
        return Err(SeifertError::IdentityViolated(format!(
            "numeric torsion limit {limit_approx} differs from exact {limit} for structure {sp}"
        )));
    }
    Ok(SeifertOrbitReport {
        spinc: sp.clone(),
        pairings: sp.pairings(data),
        chi,
        k_r_squared_plus_s: kr,
        tau: tau.values().to_vec(),
        min_tau,
        rank_red,
        chi_hf: rank_red as i64,
        d,
        sw_osz,
        sw_tcw,
        limit,
        torsion,
        limit_approx,
        certified: tau.certified(),
    })
}

/// Verifies, for every spin^c structure, the closed forms against the
/// lattice, the torsion-limit identity `L = λ/|H| + (k_r²+s)/8` and
/// `sw^OSz = sw^TCW`; then the global identities `Σ T(1) = 0` and
/// `λ = Σ (χ(HF⁺(M)) − d/2)`, and `K²+s` against the graph formula.
pub fn verify_sw_identity(data: &SeifertData) -> Result<SeifertReport, SeifertError> {
    let graph = data.graph()?;
    let k2s = seifert_k2s(data);
    let k2s_graph = graph.k_squared_plus_s();
    if k2s != k2s_graph {
        return Err(violation("K²+s closed form = graph formula", data, None, &k2s, &k2s_graph));
    }
    let order_graph = graph.order();
    if order_graph != BigInt::from(data.order) {
        return Err(SeifertError::IdentityViolated(format!(
            "|H| = {} but |det B| = {order_graph}",
            data.order
        )));
    }
    let lambda = graph.casson_walker();
    let structures = enumerate_seifert_spinc(data)?;
    let orbits: Vec<SeifertOrbitReport> = structures
        .par_iter()
        .map(|sp| analyze_structure(data, &graph, &k2s, &lambda, sp))
        .collect::<Result<_, _>>()?;
    let t_sum = orbits.iter().fold(Rational::zero(), |acc, r| acc + &r.torsion);
    if !t_sum.is_zero() {
        return Err(violation("Σ T(1) = 0", data, None, &t_sum, &Rational::zero()));
    }
    let sw_sum = orbits.iter().fold(Rational::zero(), |acc, r| acc + &r.sw_osz);
    if sw_sum != lambda {
        return Err(violation("λ = Σ (χ(HF⁺(M)) − d/2)", data, None, &lambda, &sw_sum));
    }
    let dp = dp_invariant(data);
    let can = &orbits[0];
    let dp_engine = can.chi_hf - can.min_tau;
    if dp != dp_engine {
        return Err(violation("DP = χ(HF⁺) − min χ_can", data, None, &int(dp), &int(dp_engine)));
    }
    Ok(SeifertReport {
        e0: data.e0,
        legs: data.legs.clone(),
        e: data.e.clone(),
        epsilon: data.epsilon.clone(),
        order: data.order,
        k_squared_plus_s: k2s,
        lambda,
        dp,
        orbits,
    })
}

/// The [`orbit_of`] orbit on the star graph matching a structure.
pub fn spinc_orbit(
    data: &SeifertData,
    graph: &PlumbingGraph,
    sp: &SeifertSpinc,
) -> Result<crate::spinc::SpincOrbit, crate::spinc::SpincError> {
    orbit_of(graph, &sp.l_prime(data, graph))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(e0: i64, legs: &[(i64, i64)]) -> SeifertData {
        SeifertData::new(e0, legs.iter().map(|&(a, w)| Leg::new(a, w).unwrap()).collect()).unwrap()
    }

    #[test]
    fn poincare_sphere() {
        let d = data(-2, &[(2, 1), (3, 2), (5, 4)]);
        assert_eq!(d.e(), &rat(-1, 30));
        assert_eq!(d.order(), 1);
        let g = d.graph().unwrap();
        assert_eq!(g.len(), 8);
        assert!(g.euler_numbers().iter().all(|&e| e == -2));
        assert_eq!(seifert_k2s(&d), int(8));
        let sp = enumerate_seifert_spinc(&d).unwrap();
        assert_eq!(sp, vec![SeifertSpinc::canonical(&d)]);
        assert_eq!(dp_invariant(&d), 0);
        assert_eq!(seifert_tau(&d, &sp[0]).min(), 0);
    }

    #[test]
    fn leg_parsing() {
        assert_eq!("3/2".parse::<Leg>().unwrap(), Leg { alpha: 3, omega: 2 });
        assert!(matches!("3".parse::<Leg>(), Err(LegParseError::Syntax(_))));
        assert!(matches!("4/2".parse::<Leg>(), Err(LegParseError::Invalid(_))));
        assert!(matches!(
            SeifertData::new(-1, vec![Leg::new(2, 1).unwrap(); 2]),
            Err(SeifertError::TooFewLegs(2))
        ));
        assert!(matches!(
            SeifertData::new(-1, vec![Leg::new(2, 1).unwrap(); 3]),
            Err(SeifertError::PositiveOrbifoldEuler(_))
        ));
    }

    #[test]
    fn series_limit_of_canonical_structure() {
        let d = data(-1, &[(2, 1), (3, 1), (7, 1)]);
        let can = SeifertSpinc::canonical(&d);
        let exact = seifert_torsion_limit(&d, &can).unwrap();
        let approx = seifert_torsion_limit_numeric(&d, &can).unwrap();
        assert!((approx - crate::arith::to_f64(&exact)).abs() < 1e-6, "{approx} vs {exact}");
    }
}
