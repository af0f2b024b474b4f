//! Plumbing graphs: validated negative-definite trees of Euler numbers.
//!
//! Vertices carry user-facing ids; internally they are numbered `0..s` in
//! the order given. All operations are pure and the graph is immutable.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use petgraph::unionfind::UnionFind;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{int, Rational};
use crate::form::IntersectionForm;
use crate::lattice::{CharElement, DualVector, LatticeError, LatticeVector};

/// Why a vertex/edge list fails to describe a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeFailure {
    /// The listed edges (user ids) form a cycle.
    Cycle(Vec<(i64, i64)>),
    /// The listed vertices (user ids) are not reachable from the first vertex.
    Disconnected(Vec<i64>),
}

impl std::fmt::Display for TreeFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TreeFailure::Cycle(edges) => {
                write!(f, "cycle through edges")?;
                for (a, b) in edges {
                    write!(f, " {{{a},{b}}}")?;
                }
                Ok(())
            }
            TreeFailure::Disconnected(ids) => {
                write!(f, "vertices unreachable from the first vertex: {ids:?}")
            }
        }
    }
}

/// Errors raised while building or transforming plumbing graphs.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// The vertex list is empty.
    #[error("graph has no vertices")]
    Empty,
    /// Two vertices share an id.
    #[error("duplicate vertex id {0}")]
    DuplicateId(i64),
    /// An edge names a vertex that does not exist.
    #[error("edge {{{0},{1}}} references unknown vertex {2}")]
    UnknownEndpoint(i64, i64, i64),
    /// An edge joins a vertex to itself.
    #[error("self-loop at vertex {0}")]
    SelfLoop(i64),
    /// The edges do not form a tree.
    #[error("not a tree: {0}")]
    NotATree(TreeFailure),
    /// The intersection form is not negative definite.
    #[error(
        "intersection form is not negative definite: leading principal minor \
         {minor_index} (eliminating vertex {vertex}) has the wrong sign"
    )]
    NotNegativeDefinite {
        /// User id of the vertex eliminated at the failing step.
        vertex: i64,
        /// 1-based size of the failing leading principal minor.
        minor_index: usize,
    },
    /// A blow-up site does not exist.
    #[error("invalid blow-up site: {0}")]
    InvalidSite(String),
    /// A vertex cannot be blown down.
    #[error("vertex {vertex} cannot be blown down: {reason}")]
    NotBlowDownable {
        /// User id of the vertex.
        vertex: i64,
        /// Human readable reason.
        reason: String,
    },
    /// The JSON input is malformed.
    #[error("invalid graph JSON: {0}")]
    Json(String),
}

/// One vertex of the JSON graph schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    /// User-facing vertex id.
    pub id: i64,
    /// Euler number `e_j`.
    pub e: i64,
}

/// The JSON graph schema
/// `{"vertices":[{"id":int,"e":int},...],"edges":[[int,int],...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    /// Vertices in their internal order.
    pub vertices: Vec<VertexSpec>,
    /// Undirected edges by user id.
    pub edges: Vec<[i64; 2]>,
}

/// Place where a blow-up happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupSite {
    /// Attach a new `(−1)`-vertex to this vertex (user id).
    Vertex(i64),
    /// Subdivide this edge (user ids) by a new `(−1)`-vertex.
    Edge(i64, i64),
}

/// A connected, negative-definite plumbing tree with genus-zero vertices and
/// positive edge signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlumbingGraph {
    ids: Vec<i64>,
    euler: Vec<i64>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    form: IntersectionForm,
}

impl PlumbingGraph {
    /// Validates `(id, e)` vertices and id-pair edges and builds the graph.
    pub fn new(vertices: &[(i64, i64)], edges: &[(i64, i64)]) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut index = BTreeMap::new();
        for (pos, &(id, _)) in vertices.iter().enumerate() {
            if index.insert(id, pos).is_some() {
                return Err(GraphError::DuplicateId(id));
            }
        }
        let s = vertices.len();
        let ids: Vec<i64> = vertices.iter().map(|v| v.0).collect();
        let euler: Vec<i64> = vertices.iter().map(|v| v.1).collect();
        let mut adj = vec![Vec::new(); s];
        let mut norm_edges = Vec::with_capacity(edges.len());
        let mut dsu = UnionFind::<usize>::new(s);
        for &(a, b) in edges {
            let ia = *index.get(&a).ok_or(GraphError::UnknownEndpoint(a, b, a))?;
            let ib = *index.get(&b).ok_or(GraphError::UnknownEndpoint(a, b, b))?;
            if ia == ib {
                return Err(GraphError::SelfLoop(a));
            }
            if !dsu.union(ia, ib) {
                let mut cycle = tree_path(&adj, ia, ib)
                    .windows(2)
                    .map(|w| (ids[w[0]], ids[w[1]]))
                    .collect::<Vec<_>>();
                cycle.push((b, a));
                return Err(GraphError::NotATree(TreeFailure::Cycle(cycle)));
            }
            adj[ia].push(ib);
            adj[ib].push(ia);
            norm_edges.push((ia.min(ib), ia.max(ib)));
        }
        if norm_edges.len() + 1 != s {
            let root = dsu.find_mut(0);
            let unreachable = (0..s).filter(|&v| dsu.find_mut(v) != root).map(|v| ids[v]).collect();
            return Err(GraphError::NotATree(TreeFailure::Disconnected(unreachable)));
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        norm_edges.sort_unstable();
        let form = IntersectionForm::from_tree(&euler, &adj).map_err(|f| {
            GraphError::NotNegativeDefinite {
                vertex: ids[f.vertex],
                minor_index: f.minor_index,
            }
        })?;
        Ok(PlumbingGraph {
            ids,
            euler,
            adj,
            edges: norm_edges,
            form,
        })
    }

    /// Builds a graph from Euler numbers and internal-index edges; ids are
    /// `0..s`.
    pub fn from_euler(euler: &[i64], edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let vertices: Vec<(i64, i64)> = euler.iter().enumerate().map(|(i, &e)| (i as i64, e)).collect();
        let edges: Vec<(i64, i64)> = edges.iter().map(|&(a, b)| (a as i64, b as i64)).collect();
        Self::new(&vertices, &edges)
    }

    /// A linear chain with the given Euler numbers.
    pub fn chain(euler: &[i64]) -> Result<Self, GraphError> {
        let edges: Vec<(usize, usize)> = (1..euler.len()).map(|i| (i - 1, i)).collect();
        Self::from_euler(euler, &edges)
    }

    /// Builds a graph from the JSON schema.
    pub fn from_spec(spec: &GraphSpec) -> Result<Self, GraphError> {
        let vertices: Vec<(i64, i64)> = spec.vertices.iter().map(|v| (v.id, v.e)).collect();
        let edges: Vec<(i64, i64)> = spec.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(&vertices, &edges)
    }

    /// Parses and validates a JSON graph description.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let spec: GraphSpec = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        Self::from_spec(&spec)
    }

    /// The JSON schema form of this graph.
    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: (0..self.len())
                .map(|j| VertexSpec {
                    id: self.ids[j],
                    e: self.euler[j],
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| [self.ids[a], self.ids[b]])
                .collect(),
        }
    }

    /// Number of vertices `s`.
    pub fn len(&self) -> usize {
        self.euler.len()
    }

    /// Always false: graphs have at least one vertex.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Euler number `e_j` of internal vertex `j`.
    pub fn euler(&self, j: usize) -> i64 {
        self.euler[j]
    }

    /// All Euler numbers in internal order.
    pub fn euler_numbers(&self) -> &[i64] {
        &self.euler
    }

    /// Degree `δ_j`.
    pub fn degree(&self, j: usize) -> usize {
        self.adj[j].len()
    }

    /// Neighbours of internal vertex `j`, sorted.
    pub fn neighbors(&self, j: usize) -> &[usize] {
        &self.adj[j]
    }

    /// Edges as sorted internal index pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// User id of internal vertex `j`.
    pub fn id(&self, j: usize) -> i64 {
        self.ids[j]
    }

    /// All user ids in internal order.
    pub fn ids(&self) -> &[i64] {
        &self.ids
    }

    /// Internal index of a user id.
    pub fn index_of(&self, id: i64) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    /// The intersection form.
    pub fn form(&self) -> &IntersectionForm {
        &self.form
    }

    /// `|H| = |det B|`.
    pub fn order(&self) -> BigInt {
        self.form.order()
    }

    // ---- pairings -------------------------------------------------------

    /// `(x, b_j)` for an integral cycle.
    pub fn pairing_with_basis(&self, x: &LatticeVector, j: usize) -> i64 {
        self.euler[j] * x[j] + self.adj[j].iter().map(|&i| x[i]).sum::<i64>()
    }

    /// The vector `Bx = ((x, b_j))_j`.
    pub fn basis_pairings(&self, x: &LatticeVector) -> Vec<i64> {
        (0..self.len()).map(|j| self.pairing_with_basis(x, j)).collect()
    }

    /// `(x, y)` for integral cycles.
    pub fn pair_lattice(&self, x: &LatticeVector, y: &LatticeVector) -> i64 {
        (0..self.len()).map(|j| self.pairing_with_basis(x, j) * y[j]).sum()
    }

    /// `(x, x)`.
    pub fn self_pairing(&self, x: &LatticeVector) -> i64 {
        let diag: i64 = (0..self.len()).map(|j| self.euler[j] * x[j] * x[j]).sum();
        let off: i64 = self.edges.iter().map(|&(a, b)| x[a] * x[b]).sum();
        diag + 2 * off
    }

    /// The rational vector `By = ((y, b_j))_j`.
    pub fn dual_pairings(&self, y: &DualVector) -> Vec<Rational> {
        (0..self.len())
            .map(|j| {
                let mut acc = int(self.euler[j]) * &y[j];
                for &i in &self.adj[j] {
                    acc += &y[i];
                }
                acc
            })
            .collect()
    }

    /// `(y, z)` for rational vectors.
    pub fn pair_dual(&self, y: &DualVector, z: &DualVector) -> Rational {
        self.dual_pairings(y)
            .iter()
            .zip(z.coeffs())
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// `(y, x)` for a rational vector and an integral cycle.
    pub fn pair_dual_lattice(&self, y: &DualVector, x: &LatticeVector) -> Rational {
        self.dual_pairings(y)
            .iter()
            .zip(x.coeffs())
            .fold(Rational::zero(), |acc, (a, &b)| acc + a * int(b))
    }

    /// The pairings `(y, b_j)` as integers, or [`LatticeError::NotIntegral`]
    /// if `y ∉ L'`.
    pub fn integral_pairings(&self, y: &DualVector) -> Result<Vec<i64>, LatticeError> {
        if y.len() != self.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.len(),
                found: y.len(),
            });
        }
        self.dual_pairings(y)
            .iter()
            .enumerate()
            .map(|(j, p)| {
                crate::arith::to_i64_exact(p).ok_or_else(|| LatticeError::NotIntegral {
                    vertex: j,
                    pairing: crate::arith::to_pq(p),
                })
            })
            .collect()
    }

    /// The rational vector `B⁻¹p`, i.e. the element with `(y, b_j) = p_j`.
    pub fn dual_from_pairings(&self, p: &[Rational]) -> DualVector {
        let inv = self.form.inverse();
        DualVector::new(
            (0..self.len())
                .map(|i| {
                    inv[i]
                        .iter()
                        .zip(p)
                        .filter(|(_, pj)| !pj.is_zero())
                        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
                })
                .collect(),
        )
    }

    /// [`dual_from_pairings`](Self::dual_from_pairings) for integral pairings.
    pub fn dual_from_int_pairings(&self, p: &[i64]) -> DualVector {
        let p: Vec<Rational> = p.iter().map(|&v| int(v)).collect();
        self.dual_from_pairings(&p)
    }

    /// The dual basis vector `g_j` (column `j` of `B⁻¹`).
    pub fn dual_basis(&self, j: usize) -> DualVector {
        DualVector::new((0..self.len()).map(|i| self.form.inv(i, j).clone()).collect())
    }

    /// Whether `y ∈ L'`.
    pub fn in_dual_lattice(&self, y: &DualVector) -> bool {
        self.integral_pairings(y).is_ok()
    }

    /// `χ(y) = −((K, y) + (y, y))/2` extended to `L ⊗ Q`, with `K` the canonical
    /// class.
    pub fn chi_rational(&self, y: &DualVector) -> Rational {
        let p = self.dual_pairings(y);
        let mut total = Rational::zero();
        for j in 0..self.len() {
            total += (int(-self.euler[j] - 2) + &p[j]) * &y[j];
        }
        -total / int(2)
    }

    // ---- characteristic classes and invariants --------------------------

    /// The canonical class `K`.
    pub fn canonical_class(&self) -> CharElement {
        CharElement::canonical(self)
    }

    /// `K² + s` via the closed graph formula
    /// `Σ e_j + 3s + 2 + Σ_{i,j} (2 − δ_i)(2 − δ_j)(B⁻¹)_{ij}`; cross-checked
    /// in debug builds against `(K, K) + s`.
    pub fn k_squared_plus_s(&self) -> Rational {
        let s = self.len() as i64;
        let w: Vec<i64> = (0..self.len()).map(|j| 2 - self.degree(j) as i64).collect();
        let mut total = int(self.euler.iter().sum::<i64>() + 3 * s + 2);
        for i in 0..self.len() {
            if w[i] == 0 {
                continue;
            }
            for j in 0..self.len() {
                if w[j] != 0 {
                    total += int(w[i] * w[j]) * self.form.inv(i, j);
                }
            }
        }
        debug_assert_eq!(total, self.k_squared_plus_s_direct());
        total
    }

    /// `(K, K) + s` computed directly from the canonical class.
    pub fn k_squared_plus_s_direct(&self) -> Rational {
        self.canonical_class().square() + int(self.len() as i64)
    }

    /// The Casson–Walker invariant `λ(M)` (Lescop normalization) from
    /// `−(24/|H|) λ = Σ e_j + 3s + Σ (2 − δ_j)(B⁻¹)_{jj}`.
    pub fn casson_walker(&self) -> Rational {
        let s = self.len() as i64;
        let mut total = int(self.euler.iter().sum::<i64>() + 3 * s);
        for j in 0..self.len() {
            let w = 2 - self.degree(j) as i64;
            if w != 0 {
                total += int(w) * self.form.inv(j, j);
            }
        }
        let h = Rational::from_integer(self.order());
        -total * h / int(24)
    }

    // ---- plumbing calculus ----------------------------------------------

    fn next_id(&self) -> i64 {
        self.ids.iter().copied().max().unwrap_or(-1) + 1
    }

    fn rebuild(
        &self,
        vertices: Vec<(i64, i64)>,
        edges: Vec<(i64, i64)>,
    ) -> Result<PlumbingGraph, GraphError> {
        PlumbingGraph::new(&vertices, &edges)
    }

    fn id_edges(&self) -> Vec<(i64, i64)> {
        self.edges.iter().map(|&(a, b)| (self.ids[a], self.ids[b])).collect()
    }

    /// Blows up a vertex or an edge, adding a new `(−1)`-vertex whose id is
    /// one more than the largest existing id.
    pub fn blow_up(&self, site: BlowupSite) -> Result<PlumbingGraph, GraphError> {
        let new_id = self.next_id();
        let mut vertices: Vec<(i64, i64)> = (0..self.len()).map(|j| (self.ids[j], self.euler[j])).collect();
        let mut edges = self.id_edges();
        match site {
            BlowupSite::Vertex(id) => {
                let j = self
                    .index_of(id)
                    .ok_or_else(|| GraphError::InvalidSite(format!("no vertex {id}")))?;
                vertices[j].1 -= 1;
                vertices.push((new_id, -1));
                edges.push((id, new_id));
            }
            BlowupSite::Edge(a, b) => {
                let (ia, ib) = match (self.index_of(a), self.index_of(b)) {
                    (Some(ia), Some(ib)) => (ia, ib),
                    _ => return Err(GraphError::InvalidSite(format!("no edge {{{a},{b}}}"))),
                };
                let key = (ia.min(ib), ia.max(ib));
                let pos = self
                    .edges
                    .iter()
                    .position(|&e| e == key)
                    .ok_or_else(|| GraphError::InvalidSite(format!("no edge {{{a},{b}}}")))?;
                edges.remove(pos);
                vertices[ia].1 -= 1;
                vertices[ib].1 -= 1;
                vertices.push((new_id, -1));
                edges.push((a, new_id));
                edges.push((new_id, b));
            }
        }
        self.rebuild(vertices, edges)
    }

    /// Blows down a `(−1)`-vertex of degree one or two, inverting
    /// [`blow_up`](Self::blow_up).
    pub fn blow_down(&self, id: i64) -> Result<PlumbingGraph, GraphError> {
        let j = self.index_of(id).ok_or_else(|| GraphError::NotBlowDownable {
            vertex: id,
            reason: "no such vertex".into(),
        })?;
        if self.euler[j] != -1 {
            return Err(GraphError::NotBlowDownable {
                vertex: id,
                reason: format!("Euler number is {}, not -1", self.euler[j]),
            });
        }
        let nbrs = self.adj[j].clone();
        match nbrs.len() {
            0 => {
                return Err(GraphError::NotBlowDownable {
                    vertex: id,
                    reason: "the graph would become empty".into(),
                })
            }
            1 | 2 => {}
            d => {
                return Err(GraphError::NotBlowDownable {
                    vertex: id,
                    reason: format!("degree {d} exceeds 2"),
                })
            }
        }
        let mut vertices = Vec::with_capacity(self.len() - 1);
        for v in 0..self.len() {
            if v == j {
                continue;
            }
            let bump = i64::from(nbrs.contains(&v));
            vertices.push((self.ids[v], self.euler[v] + bump));
        }
        let mut edges: Vec<(i64, i64)> = self
            .edges
            .iter()
            .filter(|&&(a, b)| a != j && b != j)
            .map(|&(a, b)| (self.ids[a], self.ids[b]))
            .collect();
        if nbrs.len() == 2 {
            edges.push((self.ids[nbrs[0]], self.ids[nbrs[1]]));
        }
        self.rebuild(vertices, edges)
    }

    /// The same graph with `e_j` replaced by `e`, if still negative definite.
    pub fn with_euler(&self, j: usize, e: i64) -> Result<PlumbingGraph, GraphError> {
        let mut vertices: Vec<(i64, i64)> = (0..self.len()).map(|v| (self.ids[v], self.euler[v])).collect();
        vertices[j].1 = e;
        self.rebuild(vertices, self.id_edges())
    }

    /// Whether the two graphs agree up to a relabeling that preserves user ids:
    /// same id → Euler map and the same edge set.
    pub fn same_labeled(&self, other: &PlumbingGraph) -> bool {
        let va: BTreeMap<i64, i64> = self.ids.iter().copied().zip(self.euler.iter().copied()).collect();
        let vb: BTreeMap<i64, i64> = other.ids.iter().copied().zip(other.euler.iter().copied()).collect();
        let norm = |g: &PlumbingGraph| -> BTreeSet<(i64, i64)> {
            g.id_edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect()
        };
        va == vb && norm(self) == norm(other)
    }

    /// Whether the graph is star-shaped around `center` with every other
    /// vertex of degree ≤ 2 (legs are chains attached to the centre).
    pub fn legs_from(&self, center: usize) -> Option<Vec<Vec<usize>>> {
        let mut legs = Vec::new();
        for &first in &self.adj[center] {
            let mut leg = vec![first];
            let mut prev = center;
            let mut cur = first;
            loop {
                if self.degree(cur) > 2 {
                    return None;
                }
                match self.adj[cur].iter().find(|&&w| w != prev) {
                    Some(&next) => {
                        leg.push(next);
                        prev = cur;
                        cur = next;
                    }
                    None => break,
                }
            }
            legs.push(leg);
        }
        Some(legs)
    }
}

/// Path between two vertices of a forest given by adjacency lists.
fn tree_path(adj: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::from([from]);
    prev[from] = from;
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in &adj[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    path
}
