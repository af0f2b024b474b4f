//! Lattice vectors `x ∈ L`, dual vectors `l' ∈ L' ⊂ L ⊗ Q` and
//! characteristic elements.
//!
//! Both kinds of vectors are stored in b-coordinates (the basis of vertex
//! classes `b_j`). Pairings need the intersection form and therefore live on
//! [`PlumbingGraph`](crate::graph::PlumbingGraph).

use std::fmt;
use std::ops::{Add, AddAssign, Index, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{int, Rational};
use crate::graph::PlumbingGraph;

/// Errors raised by lattice-level operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    /// A vector has the wrong number of coordinates for the graph.
    #[error("vector has {found} coordinates, the graph has {expected} vertices")]
    DimensionMismatch {
        /// Number of vertices of the graph.
        expected: usize,
        /// Number of coordinates supplied.
        found: usize,
    },
    /// A dual vector does not pair integrally with every basis vector.
    #[error("vector is not in the dual lattice: pairing with b_{vertex} is {pairing}")]
    NotIntegral {
        /// Internal index of the offending basis vector.
        vertex: usize,
        /// The non-integral pairing, as `p/q`.
        pairing: String,
    },
    /// `k(b_j) + (b_j, b_j)` is odd for some `j`.
    #[error("element is not characteristic: k(b_{vertex}) + e_{vertex} is odd")]
    ParityViolation {
        /// Internal index of the offending basis vector.
        vertex: usize,
    },
}

/// An integral cycle `x = Σ x_j b_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(Vec<i64>);

impl LatticeVector {
    /// Wraps a coefficient vector.
    pub fn new(coeffs: Vec<i64>) -> Self {
        LatticeVector(coeffs)
    }

    /// The zero cycle of rank `s`.
    pub fn zero(s: usize) -> Self {
        LatticeVector(vec![0; s])
    }

    /// The basis vector `b_j` of rank `s`.
    pub fn basis(s: usize, j: usize) -> Self {
        let mut v = vec![0; s];
        v[j] = 1;
        LatticeVector(v)
    }

    /// The sum `Σ_j b_j`.
    pub fn all_ones(s: usize) -> Self {
        LatticeVector(vec![1; s])
    }

    /// Coefficients in the basis `{b_j}`.
    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    /// Mutable access to the coefficients.
    pub fn coeffs_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }

    /// Consumes the vector, returning its coefficients.
    pub fn into_coeffs(self) -> Vec<i64> {
        self.0
    }

    /// Number of coordinates.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Whether the vector has no coordinates.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether every coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Whether `x ≥ 0` componentwise.
    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// The componentwise partial order `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Support `|x| = {j : x_j ≠ 0}`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&j| self.0[j] != 0).collect()
    }

    /// Componentwise minimum.
    pub fn min(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// Componentwise maximum.
    pub fn max(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// Adds `c · b_j` in place.
    pub fn add_basis(&mut self, j: usize, c: i64) {
        self.0[j] += c;
    }
}

impl Index<usize> for LatticeVector {
    type Output = i64;
    fn index(&self, j: usize) -> &i64 {
        &self.0[j]
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl AddAssign<&LatticeVector> for LatticeVector {
    fn add_assign(&mut self, rhs: &LatticeVector) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A rational vector `y = Σ y_j b_j ∈ L ⊗ Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualVector(Vec<Rational>);

impl DualVector {
    /// Wraps a b-coordinate vector.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        DualVector(coeffs)
    }

    /// The zero vector of rank `s`.
    pub fn zero(s: usize) -> Self {
        DualVector(vec![Rational::zero(); s])
    }

    /// The image of an integral cycle.
    pub fn from_lattice(x: &LatticeVector) -> Self {
        DualVector(x.coeffs().iter().map(|&c| int(c)).collect())
    }

    /// b-coordinates.
    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    /// Number of coordinates.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Whether the vector has no coordinates.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether all coordinates vanish.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Whether `y ≥ 0` componentwise.
    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|c| !c.is_negative())
    }

    /// `y + x` for an integral cycle `x`.
    pub fn add_lattice(&self, x: &LatticeVector) -> Self {
        DualVector(
            self.0
                .iter()
                .zip(x.coeffs())
                .map(|(a, &b)| a + int(b))
                .collect(),
        )
    }

    /// `y − z`.
    pub fn sub(&self, other: &Self) -> Self {
        DualVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `y + z`.
    pub fn add(&self, other: &Self) -> Self {
        DualVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `c · y`.
    pub fn scale(&self, c: &Rational) -> Self {
        DualVector(self.0.iter().map(|a| a * c).collect())
    }

    /// `−y`.
    pub fn neg(&self) -> Self {
        DualVector(self.0.iter().map(|a| -a).collect())
    }

    /// The integral cycle with the same coordinates, if all are integers.
    pub fn to_lattice(&self) -> Option<LatticeVector> {
        self.0
            .iter()
            .map(crate::arith::to_i64_exact)
            .collect::<Option<Vec<_>>>()
            .map(LatticeVector::new)
    }
}

impl Index<usize> for DualVector {
    type Output = Rational;
    fn index(&self, j: usize) -> &Rational {
        &self.0[j]
    }
}

impl fmt::Display for DualVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A characteristic element `k ∈ L'`: `k(x) + (x, x)` is even for all `x ∈ L`.
///
/// Besides its b-coordinates the element caches its integral values
/// `k(b_j)`, which is all the quadratic function `χ_k` needs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharElement {
    dual: DualVector,
    values: Vec<i64>,
}

impl CharElement {
    /// Validates `k` as a characteristic element of `graph`.
    pub fn new(graph: &PlumbingGraph, k: DualVector) -> Result<Self, LatticeError> {
        let values = graph.integral_pairings(&k)?;
        Self::check_parity(graph, &values)?;
        Ok(CharElement { dual: k, values })
    }

    /// Builds the characteristic element with prescribed values `k(b_j)`.
    pub fn from_values(graph: &PlumbingGraph, values: Vec<i64>) -> Result<Self, LatticeError> {
        if values.len() != graph.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: graph.len(),
                found: values.len(),
            });
        }
        Self::check_parity(graph, &values)?;
        let pairings: Vec<Rational> = values.iter().map(|&v| int(v)).collect();
        let dual = graph.dual_from_pairings(&pairings);
        Ok(CharElement { dual, values })
    }

    fn check_parity(graph: &PlumbingGraph, values: &[i64]) -> Result<(), LatticeError> {
        match (0..graph.len()).find(|&j| (values[j] + graph.euler(j)).rem_euclid(2) != 0) {
            Some(vertex) => Err(LatticeError::ParityViolation { vertex }),
            None => Ok(()),
        }
    }

    /// The canonical class `K`, defined by `K(b_j) = −e_j − 2`.
    pub fn canonical(graph: &PlumbingGraph) -> Self {
        let values = (0..graph.len()).map(|j| -graph.euler(j) - 2).collect();
        Self::from_values(graph, values).expect("canonical class is characteristic")
    }

    /// `self + 2·l'` for `l' ∈ L'`.
    pub fn shifted(&self, graph: &PlumbingGraph, l_prime: &DualVector) -> Result<Self, LatticeError> {
        let p = graph.integral_pairings(l_prime)?;
        let values = self.values.iter().zip(&p).map(|(k, l)| k + 2 * l).collect();
        Ok(CharElement {
            dual: self.dual.add(&l_prime.scale(&int(2))),
            values,
        })
    }

    /// `self + 2x` for `x ∈ L`.
    pub fn shifted_by_lattice(&self, graph: &PlumbingGraph, x: &LatticeVector) -> Self {
        let bx = graph.basis_pairings(x);
        let values = self.values.iter().zip(&bx).map(|(k, l)| k + 2 * l).collect();
        CharElement {
            dual: self.dual.add_lattice(&(x + x)),
            values,
        }
    }

    /// b-coordinates of `k`.
    pub fn dual(&self) -> &DualVector {
        &self.dual
    }

    /// The integral values `k(b_j)`.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `k(x)` for an integral cycle.
    pub fn eval(&self, x: &LatticeVector) -> i64 {
        self.values.iter().zip(x.coeffs()).map(|(k, c)| k * c).sum()
    }

    /// `χ_k(x) = −(k(x) + (x, x))/2`.
    pub fn chi(&self, graph: &PlumbingGraph, x: &LatticeVector) -> i64 {
        let total = self.eval(x) + graph.self_pairing(x);
        debug_assert!(total % 2 == 0, "characteristic element has odd value");
        -total / 2
    }

    /// `(k, k)` as an exact rational.
    pub fn square(&self) -> Rational {
        self.values
            .iter()
            .zip(self.dual.coeffs())
            .map(|(&v, c)| int(v) * c)
            .fold(Rational::zero(), |a, b| a + b)
    }
}

/// `χ_k(x)` from raw values `k(b_j)`, reporting a parity violation instead of
/// assuming the element is characteristic.
pub fn chi_from_values(
    graph: &PlumbingGraph,
    values: &[i64],
    x: &LatticeVector,
) -> Result<i64, LatticeError> {
    if values.len() != graph.len() || x.len() != graph.len() {
        return Err(LatticeError::DimensionMismatch {
            expected: graph.len(),
            found: values.len().min(x.len()),
        });
    }
    let total: i64 =
        values.iter().zip(x.coeffs()).map(|(k, c)| k * c).sum::<i64>() + graph.self_pairing(x);
    if total.rem_euclid(2) != 0 {
        let vertex = (0..graph.len())
            .find(|&j| (values[j] + graph.euler(j)).rem_euclid(2) != 0)
            .unwrap_or(0);
        return Err(LatticeError::ParityViolation { vertex });
    }
    Ok(-total / 2)
}
