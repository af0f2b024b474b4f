//! Definition-level reference computations on sublevel sets of `χ_k`.
//!
//! The oracle enumerates `L_{k,≤n} = {x : χ_k(x) ≤ n}` completely and joins
//! points differing by `±b_j`; the connected components per level are the
//! vertices of the graded root `R_k`. It is a verifier for small graphs, not
//! a production path.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::enumerate::{sublevel_points, EnumerationError};
use crate::graph::PlumbingGraph;
use crate::lattice::{CharElement, LatticeVector};
use crate::root::GradedRoot;
use crate::spinc::SpincOrbit;

/// A sublevel set together with its connected components.
#[derive(Debug, Clone)]
pub struct SublevelComplex {
    /// The level `n`.
    pub level: i64,
    /// Points sorted by `(χ_k, coordinates)`.
    pub points: Vec<LatticeVector>,
    /// `χ_k` of every point.
    pub chi: Vec<i64>,
    /// Component label of every point: the index of the first point of its
    /// component.
    pub component: Vec<usize>,
}

impl SublevelComplex {
    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        self.component.iter().enumerate().filter(|(i, &c)| *i == c).count()
    }

    /// Index of a point, if present.
    pub fn index_of(&self, x: &LatticeVector) -> Option<usize> {
        self.points.iter().position(|p| p == x)
    }
}

/// Enumerates points of `L_{k,≤n}` sorted by `(χ, x)`.
fn sorted_points(
    graph: &PlumbingGraph,
    k: &CharElement,
    n: i64,
    cap: usize,
) -> Result<(Vec<LatticeVector>, Vec<i64>), EnumerationError> {
    let mut pts: Vec<(i64, LatticeVector)> = sublevel_points(graph, k.values(), n, cap)?
        .into_iter()
        .map(|x| (k.chi(graph, &x), x))
        .collect();
    pts.sort();
    Ok(pts.into_iter().map(|(c, x)| (x, c)).unzip())
}

/// Incremental union-find over points added level by level.
struct LevelSweep<'a> {
    graph: &'a PlumbingGraph,
    points: &'a [LatticeVector],
    index: HashMap<&'a LatticeVector, usize>,
    uf: UnionFind<usize>,
    added: usize,
}

impl<'a> LevelSweep<'a> {
    fn new(graph: &'a PlumbingGraph, points: &'a [LatticeVector]) -> Self {
        LevelSweep {
            graph,
            points,
            index: HashMap::with_capacity(points.len()),
            uf: UnionFind::new(points.len()),
            added: 0,
        }
    }

    /// Adds the next points (in sorted order) up to `end` and joins each to
    /// its present `±b_j` neighbours.
    fn add_until(&mut self, end: usize) {
        let s = self.graph.len();
        while self.added < end {
            let i = self.added;
            let x = &self.points[i];
            let mut y = x.clone();
            for j in 0..s {
                for delta in [1, -1] {
                    y.add_basis(j, delta);
                    if let Some(&other) = self.index.get(&y) {
                        self.uf.union(i, other);
                    }
                    y.add_basis(j, -delta);
                }
            }
            self.index.insert(x, i);
            self.added += 1;
        }
    }

    /// Components of the points added so far, each sorted, ordered by
    /// first element.
    fn classes(&mut self) -> Vec<Vec<usize>> {
        let mut by_root: HashMap<usize, usize> = HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.added {
            let r = self.uf.find_mut(i);
            match by_root.get(&r) {
                Some(&c) => classes[c].push(i),
                None => {
                    by_root.insert(r, classes.len());
                    classes.push(vec![i]);
                }
            }
        }
        classes
    }
}

/// The complex `L̄_{k,≤n}` with its components.
pub fn enumerate_sublevel(
    graph: &PlumbingGraph,
    k: &CharElement,
    n: i64,
    cap: usize,
) -> Result<SublevelComplex, EnumerationError> {
    let (points, chi) = sorted_points(graph, k, n, cap)?;
    let mut sweep = LevelSweep::new(graph, &points);
    sweep.add_until(points.len());
    let mut component = vec![0; points.len()];
    for class in sweep.classes() {
        for &i in &class {
            component[i] = class[0];
        }
    }
    Ok(SublevelComplex {
        level: n,
        points,
        chi,
        component,
    })
}

/// The graded root `R_k` truncated at level `n_max`: vertices at level `n`
/// are the components of `L̄_{k,≤n}`, edges come from inclusion.
///
/// The ray marker is set only where connectivity above `n_max` is a theorem:
/// for the canonical class with `n_max ≥ 1` and a connected top level.
pub fn root_oracle(
    graph: &PlumbingGraph,
    k: &CharElement,
    n_max: i64,
    cap: usize,
) -> Result<GradedRoot, EnumerationError> {
    let (points, chi) = sorted_points(graph, k, n_max, cap)?;
    let Some(&lo) = chi.first() else {
        return Ok(GradedRoot::from_partitions(&[], false));
    };
    let mut sweep = LevelSweep::new(graph, &points);
    let mut levels = Vec::new();
    let mut end = 0;
    for n in lo..=n_max {
        while end < chi.len() && chi[end] <= n {
            end += 1;
        }
        sweep.add_until(end);
        levels.push((n, sweep.classes()));
    }
    let canonical = *k == graph.canonical_class();
    let connected_top = levels.last().is_some_and(|(_, c)| c.len() == 1);
    Ok(GradedRoot::from_partitions(
        &levels,
        canonical && n_max >= 1 && connected_top,
    ))
}

/// Structure of the component of the zero cycle in `L̄_{K,≤0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroComponentReport {
    /// Number of cycles in the component of `0`.
    pub size: usize,
    /// Number of components of `L̄_{K,≤0}`.
    pub components: usize,
    /// Members that are non-zero but not strictly negative, or have `χ ≠ 0`.
    pub violations: Vec<LatticeVector>,
}

impl ZeroComponentReport {
    /// Whether every non-zero member is negative with `χ = 0`.
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every non-zero cycle in the component of `0` in
/// `L̄_{K,≤0}` is negative with `χ = 0`.
pub fn component_zero_structure(
    graph: &PlumbingGraph,
    cap: usize,
) -> Result<ZeroComponentReport, EnumerationError> {
    let k = graph.canonical_class();
    let cx = enumerate_sublevel(graph, &k, 0, cap)?;
    let zero = LatticeVector::zero(graph.len());
    let z = cx.index_of(&zero).expect("χ(0) = 0 lies in the level-0 set");
    let label = cx.component[z];
    let mut size = 0;
    let mut violations = Vec::new();
    for (i, x) in cx.points.iter().enumerate() {
        if cx.component[i] != label {
            continue;
        }
        size += 1;
        if x.is_zero() {
            continue;
        }
        let negative = x.coeffs().iter().all(|&c| c <= 0);
        if !negative || cx.chi[i] != 0 {
            violations.push(x.clone());
        }
    }
    Ok(ZeroComponentReport {
        size,
        components: cx.component_count(),
        violations,
    })
}

/// Whether every component of `L̄_{k_r,≤n}` meets `S_{[k]}`, i.e. the
/// restriction to cycles with `(x + l'_{[k]}, b_j) ≤ 0` still surjects onto
/// the components.
pub fn restricted_surjects(
    graph: &PlumbingGraph,
    orbit: &SpincOrbit,
    n: i64,
    cap: usize,
) -> Result<bool, EnumerationError> {
    let cx = enumerate_sublevel(graph, orbit.k_r(), n, cap)?;
    let mut hit: HashMap<usize, bool> = HashMap::new();
    for (i, x) in cx.points.iter().enumerate() {
        let in_s = graph
            .basis_pairings(x)
            .iter()
            .zip(&orbit.pairings)
            .all(|(a, b)| a + b <= 0);
        let e = hit.entry(cx.component[i]).or_insert(false);
        *e |= in_s;
    }
    Ok(hit.values().all(|&b| b))
}

/// Multiset (sorted canonical encodings) of the truncated oracle roots of
/// all orbits, each normalized so that its minimum sits at level 0 and
/// truncated `depth` levels above the minimum.
pub fn orbit_root_multiset(
    graph: &PlumbingGraph,
    orbits: &[SpincOrbit],
    depth: i64,
    cap: usize,
) -> Result<Vec<String>, EnumerationError> {
    let mut codes = Vec::with_capacity(orbits.len());
    for o in orbits {
        let pts = sublevel_points(graph, o.k_r().values(), 0, cap)?;
        let min = pts.iter().map(|x| o.k_r().chi(graph, x)).min().unwrap_or(0);
        let root = root_oracle(graph, o.k_r(), min + depth, cap)?;
        codes.push(root.truncated(min + depth).shifted(-min).canonical_form());
    }
    codes.sort();
    Ok(codes)
}
