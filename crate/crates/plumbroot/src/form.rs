//! The intersection form of a plumbing tree and its exact inverse.
//!
//! A tree-shaped symmetric matrix admits Gaussian elimination without fill-in
//! when vertices are eliminated leaves-first. The pivots are ratios of
//! subtree determinants, which are computed fraction-free in big integers;
//! negative definiteness is the statement that every pivot is negative
//! (Sylvester's criterion for the leading principal minors in elimination
//! order).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::Rational;

/// Certificate of failure of negative definiteness: the position (in
/// elimination order, 1-based) of the first leading principal minor with the
/// wrong sign and the vertex eliminated at that step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DefinitenessFailure {
    /// Internal index of the vertex whose pivot is non-negative.
    pub vertex: usize,
    /// 1-based size of the offending leading principal minor.
    pub minor_index: usize,
}

/// The matrix `B` of a plumbing tree together with `B⁻¹` and `det B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionForm {
    b: Vec<Vec<i64>>,
    b_inv: Vec<Vec<Rational>>,
    det: BigInt,
}

/// Leaves-first elimination order of a tree: `order` lists vertices so that
/// each vertex appears after all of its children (rooted at vertex 0).
struct Elimination {
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl Elimination {
    fn new(adj: &[Vec<usize>]) -> Self {
        let s = adj.len();
        let mut parent = vec![None; s];
        let mut children = vec![Vec::new(); s];
        let mut visited = vec![false; s];
        let mut preorder = Vec::with_capacity(s);
        let mut stack = vec![0usize];
        visited[0] = true;
        while let Some(v) = stack.pop() {
            preorder.push(v);
            for &w in adj[v].iter().rev() {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some(v);
                    children[v].push(w);
                    stack.push(w);
                }
            }
        }
        for c in children.iter_mut() {
            c.sort_unstable();
        }
        let mut order = preorder;
        order.reverse();
        Elimination {
            order,
            parent,
            children,
        }
    }
}

impl IntersectionForm {
    /// Builds the form of a tree with Euler numbers `euler` and adjacency
    /// lists `adj`, verifying negative definiteness.
    ///
    /// The caller guarantees that `adj` describes a tree on `euler.len() ≥ 1`
    /// vertices.
    pub(crate) fn from_tree(euler: &[i64], adj: &[Vec<usize>]) -> Result<Self, DefinitenessFailure> {
        let s = euler.len();
        let elim = Elimination::new(adj);

        // d_full[v] = det B restricted to the subtree rooted at v,
        // d_minor[v] = det of that subtree with v removed (product over children).
        let mut d_full = vec![BigInt::zero(); s];
        let mut d_minor = vec![BigInt::zero(); s];
        for (pos, &v) in elim.order.iter().enumerate() {
            let kids = &elim.children[v];
            let mut prod = BigInt::one();
            for &c in kids {
                prod *= &d_full[c];
            }
            // Σ_c d_minor[c] · Π_{c' ≠ c} d_full[c'], via prefix/suffix products.
            let mut prefix = vec![BigInt::one(); kids.len() + 1];
            for (i, &c) in kids.iter().enumerate() {
                prefix[i + 1] = &prefix[i] * &d_full[c];
            }
            let mut suffix = BigInt::one();
            let mut cross = BigInt::zero();
            for (i, &c) in kids.iter().enumerate().rev() {
                cross += &prefix[i] * &suffix * &d_minor[c];
                suffix *= &d_full[c];
            }
            let full = BigInt::from(euler[v]) * &prod - cross;
            // pivot = full / prod must be negative.
            if (&full * &prod).signum() >= BigInt::zero() {
                return Err(DefinitenessFailure {
                    vertex: v,
                    minor_index: pos + 1,
                });
            }
            d_full[v] = full;
            d_minor[v] = prod;
        }
        let root = *elim.order.last().expect("non-empty tree");
        let det = d_full[root].clone();

        let pivots: Vec<Rational> = (0..s)
            .map(|v| Rational::new(d_full[v].clone(), d_minor[v].clone()))
            .collect();

        let mut b = vec![vec![0i64; s]; s];
        for v in 0..s {
            b[v][v] = euler[v];
            for &w in &adj[v] {
                b[v][w] = 1;
            }
        }

        let mut b_inv = vec![vec![Rational::zero(); s]; s];
        for j in 0..s {
            let col = solve_unit(&elim, &pivots, j);
            for (i, x) in col.into_iter().enumerate() {
                b_inv[i][j] = x;
            }
        }
        Ok(IntersectionForm { b, b_inv, det })
    }

    /// Number of vertices `s`.
    pub fn rank(&self) -> usize {
        self.b.len()
    }

    /// Entry `B[i][j]`.
    pub fn b(&self, i: usize, j: usize) -> i64 {
        self.b[i][j]
    }

    /// The integer matrix `B`.
    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.b
    }

    /// The exact inverse `B⁻¹`; column `j` is the dual basis vector `g_j` in
    /// b-coordinates.
    pub fn inverse(&self) -> &[Vec<Rational>] {
        &self.b_inv
    }

    /// Entry `(B⁻¹)[i][j] = (g_i, g_j)`.
    pub fn inv(&self, i: usize, j: usize) -> &Rational {
        &self.b_inv[i][j]
    }

    /// `det B` (sign `(−1)^s`).
    pub fn det(&self) -> &BigInt {
        &self.det
    }

    /// `|det B| = |H|`.
    pub fn order(&self) -> BigInt {
        self.det.abs()
    }
}

/// Solves `B y = e_j` by leaves-first elimination followed by back
/// substitution from the root.
fn solve_unit(elim: &Elimination, pivots: &[Rational], j: usize) -> Vec<Rational> {
    let s = pivots.len();
    let mut r = vec![Rational::zero(); s];
    r[j] = Rational::one();
    for &v in &elim.order {
        let mut acc = std::mem::take(&mut r[v]);
        for &c in &elim.children[v] {
            acc -= &r[c] / &pivots[c];
        }
        r[v] = acc;
    }
    let mut y = vec![Rational::zero(); s];
    for &v in elim.order.iter().rev() {
        y[v] = match elim.parent[v] {
            None => &r[v] / &pivots[v],
            Some(p) => (&r[v] - &y[p]) / &pivots[v],
        };
    }
    y
}
