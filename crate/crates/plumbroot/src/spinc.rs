//! Spin^c structures as orbits of characteristic elements modulo `2L`.
//!
//! An orbit `[k] = K + 2(l' + L)` is recorded through the unique minimal
//! element `l'_{[k]}` of `(l' + L) ∩ S_Q`, where `S_Q` is the cone of
//! rational cycles pairing non-positively with every base vector. The
//! distinguished representative is `k_r = K + 2·l'_{[k]}`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{ceil_i64, int, Rational};
use crate::enumerate::{self, EnumerationError};
use crate::graph::PlumbingGraph;
use crate::lattice::{CharElement, DualVector, LatticeError, LatticeVector};
use crate::smith::SmithForm;

/// Largest group order for which all orbits are materialized.
pub const MAX_ORBITS: u64 = 1 << 22;

/// Errors of the spin^c layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpincError {
    /// The input is not an element of `L'`.
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    /// `|H|` is too large to enumerate every orbit.
    #[error("|H| = {0} exceeds the orbit enumeration cap {MAX_ORBITS}")]
    TooManyOrbits(BigInt),
    /// The minimum of `χ_k` could not be enumerated within the cap.
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

/// The group `H = L'/L ≅ coker B` with its Smith presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HGroup {
    smith: SmithForm,
}

impl HGroup {
    /// Computes the Smith presentation of `coker B`.
    pub fn new(graph: &PlumbingGraph) -> Self {
        HGroup {
            smith: SmithForm::new(graph.form().matrix()),
        }
    }

    /// `|H| = |det B|`.
    pub fn order(&self) -> BigInt {
        self.smith.order()
    }

    /// Invariant factors (elementary divisors > 1).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.smith.invariant_factors()
    }

    /// The underlying Smith decomposition.
    pub fn smith(&self) -> &SmithForm {
        &self.smith
    }

    /// Index of the class of an element with integral pairings `p = By`.
    pub fn index_of_pairings(&self, p: &[i64]) -> BigInt {
        self.smith.index_of(&self.smith.coordinates(p))
    }

    /// A pairing vector representing the class with the given index.
    pub fn pairings_of_index(&self, index: &BigInt) -> Vec<BigInt> {
        let c = self.smith.coordinates_of_index(index);
        self.smith.representative(&c)
    }
}

/// One spin^c structure together with its distinguished representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpincOrbit {
    /// Index in the canonical enumeration of `H` (0 is the canonical orbit).
    pub index: usize,
    /// `l'_{[k]}` in b-coordinates.
    #[serde(with = "crate::arith::serde_pq::vec", rename = "l_prime")]
    l_prime_coeffs: Vec<Rational>,
    /// The pairings `(l'_{[k]}, b_j)`.
    pub pairings: Vec<i64>,
    #[serde(skip)]
    l_prime: DualVector,
    #[serde(skip)]
    k_r: CharElement,
}

impl SpincOrbit {
    fn new(graph: &PlumbingGraph, index: usize, l_prime: DualVector) -> Self {
        let pairings = graph
            .integral_pairings(&l_prime)
            .expect("distinguished representative lies in L'");
        let k_r = graph
            .canonical_class()
            .shifted(graph, &l_prime)
            .expect("distinguished representative lies in L'");
        SpincOrbit {
            index,
            l_prime_coeffs: l_prime.coeffs().to_vec(),
            pairings,
            l_prime,
            k_r,
        }
    }

    /// The distinguished element `l'_{[k]}`.
    pub fn l_prime(&self) -> &DualVector {
        &self.l_prime
    }

    /// The distinguished characteristic representative `k_r = K + 2·l'_{[k]}`.
    pub fn k_r(&self) -> &CharElement {
        &self.k_r
    }
}

/// Enumerates all `|H|` spin^c structures in Smith-coordinate order, each
/// normalized to its distinguished representative.
pub fn enumerate_spinc(graph: &PlumbingGraph) -> Result<Vec<SpincOrbit>, SpincError> {
    let group = HGroup::new(graph);
    let order = group.order();
    let n = order
        .to_u64()
        .filter(|&n| n <= MAX_ORBITS)
        .ok_or_else(|| SpincError::TooManyOrbits(order.clone()))? as usize;
    let orbits = (0..n)
        .into_par_iter()
        .map(|index| {
            let y = group.pairings_of_index(&BigInt::from(index));
            let y: Vec<Rational> = y.into_iter().map(Rational::from_integer).collect();
            let l = reduce_mod_lattice(&graph.dual_from_pairings(&y));
            let rep = distinguished_rep(graph, &l).expect("Smith representative lies in L'");
            SpincOrbit::new(graph, index, rep)
        })
        .collect();
    Ok(orbits)
}

/// The orbit of the canonical class; its distinguished representative is `K`.
pub fn canonical_orbit(graph: &PlumbingGraph) -> SpincOrbit {
    SpincOrbit::new(graph, 0, DualVector::zero(graph.len()))
}

/// Builds the orbit of an arbitrary `l' ∈ L'`, indexed consistently with
/// [`enumerate_spinc`].
pub fn orbit_of(graph: &PlumbingGraph, l_prime: &DualVector) -> Result<SpincOrbit, SpincError> {
    let p = graph.integral_pairings(l_prime)?;
    let group = HGroup::new(graph);
    let index = group
        .index_of_pairings(&p)
        .to_usize()
        .ok_or_else(|| SpincError::TooManyOrbits(group.order()))?;
    let rep = distinguished_rep(graph, &reduce_mod_lattice(l_prime))?;
    Ok(SpincOrbit::new(graph, index, rep))
}

/// The involution `[l'] ↦ [−l']` on orbit indices.
pub fn involution(graph: &PlumbingGraph, orbits: &[SpincOrbit]) -> Vec<usize> {
    let group = HGroup::new(graph);
    orbits
        .iter()
        .map(|o| {
            let neg: Vec<i64> = o.pairings.iter().map(|&v| -v).collect();
            group
                .index_of_pairings(&neg)
                .to_usize()
                .expect("orbit index fits in usize")
        })
        .collect()
}

/// Subtracts the integral part of every b-coordinate, giving a
/// representative with coefficients in `[0, 1)`.
fn reduce_mod_lattice(l: &DualVector) -> DualVector {
    DualVector::new(l.coeffs().iter().map(|c| c - c.floor()).collect())
}

/// The minimal element of `(l' + L) ∩ S_Q`.
///
/// Starting from `x = ⌈−l'⌉` (a lower bound of the minimum, since `S_Q`
/// consists of effective cycles) the generalized Laufer ascent adds `b_j`
/// for the smallest `j` with `(x + l', b_j) > 0` until no such `j` remains.
pub fn distinguished_rep(graph: &PlumbingGraph, l_prime: &DualVector) -> Result<DualVector, LatticeError> {
    let p = graph.integral_pairings(l_prime)?;
    let x0 = LatticeVector::new(l_prime.coeffs().iter().map(|c| ceil_i64(&-c)).collect());
    let x = laufer_ascent(graph, x0, &p, |_| true);
    Ok(l_prime.add_lattice(&x))
}

/// Laufer ascent: repeatedly adds `b_j` for the smallest allowed `j` with
/// `(x, b_j) + offset_j > 0`.
pub(crate) fn laufer_ascent(
    graph: &PlumbingGraph,
    mut x: LatticeVector,
    offset: &[i64],
    allowed: impl Fn(usize) -> bool,
) -> LatticeVector {
    let s = graph.len();
    let mut q: Vec<i64> = graph
        .basis_pairings(&x)
        .iter()
        .zip(offset)
        .map(|(a, b)| a + b)
        .collect();
    let mut violated: BTreeSet<usize> = (0..s).filter(|&j| allowed(j) && q[j] > 0).collect();
    while let Some(j) = violated.pop_first() {
        x.add_basis(j, 1);
        q[j] += graph.euler(j);
        if q[j] > 0 {
            violated.insert(j);
        }
        for &i in graph.neighbors(j) {
            q[i] += 1;
            if q[i] > 0 && allowed(i) {
                violated.insert(i);
            }
        }
    }
    x
}

/// `m_k = min_{x ∈ L} χ_k(x) ≤ 0`, by complete enumeration of the level-0
/// sublevel set.
pub fn m_k(graph: &PlumbingGraph, k: &CharElement, cap: usize) -> Result<i64, SpincError> {
    let points = enumerate::sublevel_points(graph, k.values(), 0, cap)?;
    Ok(points
        .iter()
        .map(|x| k.chi(graph, x))
        .min()
        .unwrap_or(0)
        .min(0))
}

/// Whether `y` lies in `S_Q`: `(y, b_j) ≤ 0` for all `j`.
pub fn in_s_q(graph: &PlumbingGraph, y: &DualVector) -> bool {
    graph.dual_pairings(y).iter().all(|p| *p <= Rational::zero())
}

/// `χ_{K}(l')` extended to rational cycles; `χ(l'_{[k]})` for an orbit.
pub fn chi_of_orbit(graph: &PlumbingGraph, orbit: &SpincOrbit) -> Rational {
    graph.chi_rational(orbit.l_prime())
}

/// `(k_r² + s)` for an orbit.
pub fn k_r_squared_plus_s(graph: &PlumbingGraph, orbit: &SpincOrbit) -> Rational {
    orbit.k_r().square() + int(graph.len() as i64)
}
