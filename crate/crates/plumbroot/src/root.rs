//! Graded roots, τ-functions and their `Z[U]`-modules.
//!
//! A graded root is an infinite tree with an integer grading `χ` that
//! becomes a single ray above some level. It is stored finitely: every vertex
//! up to the top level together with a flag telling whether the single top
//! vertex continues as an infinite ray (or whether the root was truncated).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{int, to_pq, Rational};

/// Errors raised by graded-root constructions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    /// A τ-function needs at least one value.
    #[error("τ-function has no values")]
    EmptyTau,
    /// The minima data violate a graded-root axiom; the triple (or pair)
    /// of indices names the failing condition.
    #[error("minima data violate {condition} at indices {indices:?}")]
    ConditionViolated {
        /// Which condition failed.
        condition: &'static str,
        /// The offending indices.
        indices: Vec<usize>,
    },
    /// The stored tree fails a graded-root axiom.
    #[error("graded-root axiom violated: {0}")]
    Invalid(String),
}

/// A vertex of a stored graded root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootVertex {
    /// Grading `χ(v)`.
    pub chi: i64,
    /// The unique neighbour one level up, if it is stored.
    pub parent: Option<usize>,
    /// Smallest label (τ-index, minimum index or point index) in the
    /// vertex; used for deterministic ordering and tie-breaks.
    pub label: usize,
}

/// A graded root stored up to its top level.
///
/// Vertices are sorted by `(χ, label)`. If `ray` is set the top level has a
/// single vertex above which the root is a single infinite ray; otherwise
/// the root is a truncation and the top level may hold several vertices.
#[derive(Debug, Clone)]
pub struct GradedRoot {
    vertices: Vec<RootVertex>,
    ray: bool,
}

impl GradedRoot {
    /// The root `R_n`: a single ray starting at level `n`.
    pub fn ray_from(n: i64) -> Self {
        GradedRoot {
            vertices: vec![RootVertex {
                chi: n,
                parent: None,
                label: 0,
            }],
            ray: true,
        }
    }

    /// Builds a root from nested partitions: `levels[t] = (χ_t, classes)`
    /// with consecutive gradings, where each class at level `t` is contained
    /// in a class at level `t + 1`. Labels are arbitrary `usize`s.
    pub fn from_partitions(levels: &[(i64, Vec<Vec<usize>>)], ray: bool) -> Self {
        let mut vertices: Vec<RootVertex> = Vec::new();
        // Process top-down so parents exist before children.
        let mut above: HashMap<usize, usize> = HashMap::new();
        for (t, (chi, classes)) in levels.iter().enumerate().rev() {
            if t + 1 < levels.len() {
                debug_assert_eq!(*chi + 1, levels[t + 1].0, "levels must be consecutive");
            }
            let mut here = HashMap::new();
            for class in classes {
                let label = *class.iter().min().expect("classes are non-empty");
                let parent = if t + 1 < levels.len() {
                    Some(*above.get(&class[0]).expect("class contained in a class one level up"))
                } else {
                    None
                };
                let id = vertices.len();
                vertices.push(RootVertex {
                    chi: *chi,
                    parent,
                    label,
                });
                for &l in class {
                    here.insert(l, id);
                }
            }
            above = here;
        }
        Self::normalized(vertices, ray)
    }

    /// Re-sorts vertices by `(χ, label)` and remaps parents.
    fn normalized(vertices: Vec<RootVertex>, ray: bool) -> Self {
        let mut order: Vec<usize> = (0..vertices.len()).collect();
        order.sort_by_key(|&i| (vertices[i].chi, vertices[i].label, i));
        let mut new_index = vec![0; vertices.len()];
        for (pos, &i) in order.iter().enumerate() {
            new_index[i] = pos;
        }
        let vertices = order
            .iter()
            .map(|&i| RootVertex {
                chi: vertices[i].chi,
                parent: vertices[i].parent.map(|p| new_index[p]),
                label: vertices[i].label,
            })
            .collect();
        GradedRoot { vertices, ray }
    }

    /// The stored vertices sorted by `(χ, label)`.
    pub fn vertices(&self) -> &[RootVertex] {
        &self.vertices
    }

    /// Whether the top vertex continues as an infinite ray.
    pub fn has_ray(&self) -> bool {
        self.ray
    }

    /// `min χ`.
    pub fn min_chi(&self) -> i64 {
        self.vertices.iter().map(|v| v.chi).min().unwrap_or(0)
    }

    /// Highest stored level.
    pub fn top_level(&self) -> i64 {
        self.vertices.iter().map(|v| v.chi).max().unwrap_or(0)
    }

    /// Smallest level from which on every level has exactly one vertex
    /// (only meaningful with a ray).
    pub fn stabilization_level(&self) -> i64 {
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        for v in &self.vertices {
            *counts.entry(v.chi).or_default() += 1;
        }
        let mut level = self.top_level();
        for (&chi, &c) in counts.iter().rev() {
            if c == 1 {
                level = chi;
            } else {
                break;
            }
        }
        level
    }

    /// Local minima `V₁` (vertices without stored children), sorted by
    /// `(χ, label)`.
    pub fn minima(&self) -> Vec<usize> {
        let mut has_child = vec![false; self.vertices.len()];
        for v in &self.vertices {
            if let Some(p) = v.parent {
                has_child[p] = true;
            }
        }
        (0..self.vertices.len()).filter(|&i| !has_child[i]).collect()
    }

    /// Number of vertices at level `n` (for `n` above the top level this is 1
    /// with a ray and 0 otherwise).
    pub fn count_at(&self, n: i64) -> usize {
        if n > self.top_level() {
            return usize::from(self.ray);
        }
        self.vertices.iter().filter(|v| v.chi == n).count()
    }

    /// The root `(R, χ)[r]` with every grading shifted by `r`.
    pub fn shifted(&self, r: i64) -> Self {
        GradedRoot {
            vertices: self
                .vertices
                .iter()
                .map(|v| RootVertex {
                    chi: v.chi + r,
                    ..v.clone()
                })
                .collect(),
            ray: self.ray,
        }
    }

    /// The sub-forest of vertices with `χ ≤ level`, the ray (if any) being
    /// continued up to `level`; the result carries no ray marker.
    pub fn truncated(&self, level: i64) -> Self {
        let keep: Vec<bool> = self.vertices.iter().map(|v| v.chi <= level).collect();
        let mut new_index = vec![usize::MAX; self.vertices.len()];
        let mut out = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if keep[i] {
                new_index[i] = out.len();
                out.push(v.clone());
            }
        }
        for v in out.iter_mut() {
            v.parent = v.parent.and_then(|p| keep[p].then(|| new_index[p]));
        }
        if self.ray {
            // Continue the ray up to the truncation level.
            let top = self.top_level();
            let mut below = out.iter().position(|v| v.chi == top && v.parent.is_none());
            for chi in top + 1..=level {
                let id = out.len();
                if let Some(b) = below {
                    out[b].parent = Some(id);
                }
                out.push(RootVertex {
                    chi,
                    parent: None,
                    label: 0,
                });
                below = Some(id);
            }
        }
        GradedRoot {
            vertices: out,
            ray: false,
        }
    }

    /// Checks the graded-root axioms on the stored part.
    pub fn validate(&self) -> Result<(), RootError> {
        let top = self.top_level();
        for (i, v) in self.vertices.iter().enumerate() {
            match v.parent {
                Some(p) => {
                    if self.vertices[p].chi != v.chi + 1 {
                        return Err(RootError::Invalid(format!(
                            "edge {i}-{p} joins levels {} and {}",
                            v.chi, self.vertices[p].chi
                        )));
                    }
                }
                None if v.chi != top => {
                    return Err(RootError::Invalid(format!(
                        "vertex {i} at level {} below the top {top} has no parent",
                        v.chi
                    )));
                }
                None => {}
            }
        }
        if self.ray && self.count_at(top) != 1 {
            return Err(RootError::Invalid(format!(
                "top level {top} of a rooted tree has {} vertices",
                self.count_at(top)
            )));
        }
        Ok(())
    }

    /// Canonical encoding of the stored forest, independent of labels.
    pub fn canonical_form(&self) -> String {
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        let mut tops = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            match v.parent {
                Some(p) => children[p].push(i),
                None => tops.push(i),
            }
        }
        // Bottom-up to avoid deep recursion.
        let mut code: Vec<String> = vec![String::new(); self.vertices.len()];
        for i in 0..self.vertices.len() {
            // vertices are sorted by χ, children have smaller χ
            let mut kids: Vec<&str> = children[i].iter().map(|&c| code[c].as_str()).collect();
            kids.sort_unstable();
            code[i] = format!("({}{})", self.vertices[i].chi, kids.concat());
        }
        let mut top_codes: Vec<&str> = tops.iter().map(|&t| code[t].as_str()).collect();
        top_codes.sort_unstable();
        format!(
            "{}{}",
            top_codes.concat(),
            if self.ray { "^" } else { "" }
        )
    }

    /// The `Z[U]`-module `H(R, χ)` via the greedy ordering of local minima:
    /// `v₁` is a global minimum, every further minimum `v` (by increasing
    /// `χ`, ties by label) contributes `T_{2χ(v)}(χ(w) − χ(v))` where `w`
    /// is its lowest ancestor shared with an earlier minimum.
    ///
    /// For a truncated root without a ray the minima whose branches do not
    /// meet below the top level are reported as towers clipped at the top.
    pub fn module(&self) -> ZUModule {
        let order = self.minima();
        self.module_with_order(&order)
    }

    /// [`module`](Self::module) with an explicit minima order (which must
    /// be sorted by non-decreasing `χ`).
    pub fn module_with_order(&self, minima: &[usize]) -> ZUModule {
        let mut covered = vec![false; self.vertices.len()];
        let mut tower = None;
        let mut finite = Vec::new();
        for &m in minima {
            let chi = self.vertices[m].chi;
            let mut cur = Some(m);
            let mut meet = None;
            while let Some(v) = cur {
                if covered[v] {
                    meet = Some(v);
                    break;
                }
                covered[v] = true;
                cur = self.vertices[v].parent;
            }
            match (tower.is_none(), meet) {
                (true, _) => tower = Some(int(2 * chi)),
                (false, Some(w)) => {
                    finite.push((int(2 * chi), (self.vertices[w].chi - chi) as u64));
                }
                (false, None) => {
                    // Truncated root: the branch is clipped at the top level.
                    finite.push((int(2 * chi), (self.top_level() + 1 - chi) as u64));
                }
            }
        }
        ZUModule::new(tower.unwrap_or_else(Rational::zero), finite)
    }

    /// Graphviz DOT rendering. Vertices are ranked by χ; each label shows χ
    /// and the absolute module degree `2χ + degree_shift`. A ray is drawn as
    /// one extra vertex with a dashed continuation.
    pub fn to_dot(&self, name: &str, degree_shift: &Rational) -> String {
        let mut out = String::new();
        out.push_str(&format!("digraph \"{name}\" {{\n"));
        out.push_str("  rankdir=BT;\n  node [shape=circle, fontsize=10];\n");
        let label = |chi: i64| {
            let deg = int(2 * chi) + degree_shift;
            format!("\"χ={chi}\\ndeg={}\"", fmt_rational(&deg))
        };
        let mut levels: BTreeMap<i64, Vec<String>> = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!("  v{i} [label={}];\n", label(v.chi)));
            levels.entry(v.chi).or_default().push(format!("v{i}"));
        }
        let top = self.top_level();
        if self.ray {
            out.push_str(&format!("  ray [label={}];\n", label(top + 1)));
            out.push_str("  ray_end [shape=point, style=invis];\n");
            levels.entry(top + 1).or_default().push("ray".into());
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if let Some(p) = v.parent {
                out.push_str(&format!("  v{i} -> v{p} [arrowhead=none];\n"));
            }
        }
        if self.ray {
            for (i, v) in self.vertices.iter().enumerate() {
                if v.parent.is_none() {
                    out.push_str(&format!("  v{i} -> ray [arrowhead=none];\n"));
                }
            }
            out.push_str("  ray -> ray_end [arrowhead=none, style=dashed];\n");
        }
        for names in levels.values() {
            out.push_str(&format!("  {{ rank=same; {} }}\n", names.join("; ")));
        }
        out.push_str("}\n");
        out
    }

    /// Plain-text listing, one line per level from the top down.
    pub fn to_text(&self) -> String {
        let mut levels: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            levels.entry(v.chi).or_default().push(i);
        }
        let mut out = String::new();
        if self.ray {
            out.push_str("  ...  (single ray)\n");
        }
        for (chi, ids) in levels.iter().rev() {
            let items: Vec<String> = ids
                .iter()
                .map(|&i| match self.vertices[i].parent {
                    Some(p) => format!("v{i}->v{p}"),
                    None => format!("v{i}"),
                })
                .collect();
            out.push_str(&format!("{chi:>5}: {}\n", items.join("  ")));
        }
        out
    }
}

impl PartialEq for GradedRoot {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_form() == other.canonical_form()
    }
}

impl Eq for GradedRoot {}

/// Formats a rational as an integer when possible, otherwise `p/q`.
pub fn fmt_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A τ-function `τ(0), …, τ(i*)`, with `certified` recording whether
/// `τ(i + 1) ≥ τ(i)` is proven for every `i ≥ i*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauFunction {
    values: Vec<i64>,
    certified: bool,
}

impl TauFunction {
    /// Wraps τ-values.
    pub fn new(values: Vec<i64>, certified: bool) -> Result<Self, RootError> {
        if values.is_empty() {
            return Err(RootError::EmptyTau);
        }
        Ok(TauFunction { values, certified })
    }

    /// Builds τ from `τ(0)` and the increments `Δτ(i) = τ(i+1) − τ(i)`.
    pub fn from_increments(tau0: i64, increments: &[i64], certified: bool) -> Self {
        let mut values = Vec::with_capacity(increments.len() + 1);
        values.push(tau0);
        for d in increments {
            let last = *values.last().expect("non-empty");
            values.push(last + d);
        }
        TauFunction { values, certified }
    }

    /// The stored values.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Whether the tail is proven non-decreasing.
    pub fn certified(&self) -> bool {
        self.certified
    }

    /// `min τ`.
    pub fn min(&self) -> i64 {
        *self.values.iter().min().expect("non-empty")
    }

    /// The prefix after which the stored values no longer descend.
    fn effective_len(&self) -> usize {
        let last_descent = (0..self.values.len().saturating_sub(1))
            .rev()
            .find(|&i| self.values[i + 1] < self.values[i]);
        last_descent.map_or(1, |i| i + 2)
    }

    /// The graded root `R_τ`: vertices at level `n` are the maximal runs of
    /// indices with `τ ≤ n`, the tail being non-decreasing.
    pub fn root(&self) -> GradedRoot {
        let vals = &self.values[..self.effective_len()];
        let lo = *vals.iter().min().expect("non-empty");
        let hi = *vals.iter().max().expect("non-empty");
        let mut levels = Vec::with_capacity((hi - lo + 1) as usize);
        for n in lo..=hi {
            let mut classes: Vec<Vec<usize>> = Vec::new();
            let mut run: Vec<usize> = Vec::new();
            for (i, &t) in vals.iter().enumerate() {
                if t <= n {
                    run.push(i);
                } else if !run.is_empty() {
                    classes.push(std::mem::take(&mut run));
                }
            }
            if !run.is_empty() {
                classes.push(run);
            }
            levels.push((n, classes));
        }
        GradedRoot::from_partitions(&levels, true)
    }

    /// `(rank H_red(R_τ), min τ)`. Uses the closed sum
    /// `−τ(0) + min τ + Σ max(τ(i) − τ(i+1), 0)` when `τ(1) > τ(0)` and the
    /// module of the root otherwise.
    pub fn rank_red(&self) -> (u64, i64) {
        let min = self.min();
        if self.values.len() >= 2 && self.values[1] > self.values[0] {
            let drops: i64 = self
                .values
                .windows(2)
                .map(|w| (w[0] - w[1]).max(0))
                .sum();
            let rank = -self.values[0] + min + drops;
            debug_assert!(rank >= 0);
            (rank as u64, min)
        } else {
            (self.root().module().finite_rank(), min)
        }
    }
}

/// Checks and builds the root of Example-style minima data: `n[i] = n_i`
/// and `m[i][j] = n_{ij}`.
pub fn root_from_minima(n: &[i64], m: &[Vec<i64>]) -> Result<GradedRoot, RootError> {
    let k = n.len();
    if k == 0 {
        return Err(RootError::EmptyTau);
    }
    let fail = |condition, indices: Vec<usize>| Err(RootError::ConditionViolated { condition, indices });
    if m.len() != k || m.iter().any(|r| r.len() != k) {
        return fail("square matrix shape", vec![k]);
    }
    for i in 0..k {
        if m[i][i] != n[i] {
            return fail("n_ii = n_i", vec![i]);
        }
        for j in 0..k {
            if m[i][j] != m[j][i] {
                return fail("symmetry n_ij = n_ji", vec![i, j]);
            }
            if m[i][j] < n[i].max(n[j]) {
                return fail("n_ij ≥ max(n_i, n_j)", vec![i, j]);
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                if m[j][l] > m[i][j].max(m[i][l]) {
                    return fail("n_jk ≤ max(n_ij, n_ik)", vec![i, j, l]);
                }
            }
        }
    }
    let lo = *n.iter().min().expect("non-empty");
    let hi = m.iter().flatten().copied().max().expect("non-empty");
    let mut levels = Vec::new();
    for level in lo..=hi {
        let active: Vec<usize> = (0..k).filter(|&i| n[i] <= level).collect();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &i in &active {
            match classes.iter_mut().find(|c| m[c[0]][i] <= level) {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        levels.push((level, classes));
    }
    Ok(GradedRoot::from_partitions(&levels, true))
}

/// A graded `Z[U]`-module `T⁺_r ⊕ ⨁ T_a(n)` with `deg U = −2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZUModule {
    tower: Rational,
    finite: Vec<(Rational, u64)>,
}

impl ZUModule {
    /// Builds a module; finite towers are kept sorted by `(degree, length)`.
    pub fn new(tower: Rational, mut finite: Vec<(Rational, u64)>) -> Self {
        finite.retain(|(_, n)| *n > 0);
        finite.sort();
        ZUModule { tower, finite }
    }

    /// Degree `r` of the infinite tower `T⁺_r`.
    pub fn tower_degree(&self) -> &Rational {
        &self.tower
    }

    /// Finite towers `(a, n)` for `T_a(n)`, sorted.
    pub fn finite_parts(&self) -> &[(Rational, u64)] {
        &self.finite
    }

    /// `Σ n`: the rank of the reduced part.
    pub fn finite_rank(&self) -> u64 {
        self.finite.iter().map(|(_, n)| n).sum()
    }

    /// `M[r]`: every degree shifted by `r`.
    pub fn shifted(&self, r: &Rational) -> Self {
        ZUModule {
            tower: &self.tower + r,
            finite: self.finite.iter().map(|(a, n)| (a + r, *n)).collect(),
        }
    }

    /// Whether this is a single tower without reduced part.
    pub fn is_tower(&self) -> bool {
        self.finite.is_empty()
    }
}

impl fmt::Display for ZUModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T+[{}]", fmt_rational(&self.tower))?;
        for (a, n) in &self.finite {
            write!(f, " (+) T[{}]({n})", fmt_rational(a))?;
        }
        Ok(())
    }
}

impl Serialize for ZUModule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Finite<'a>(&'a [(Rational, u64)]);
        impl Serialize for Finite<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for (a, n) in self.0 {
                    seq.serialize_element(&(to_pq(a), n))?;
                }
                seq.end()
            }
        }
        let mut st = s.serialize_struct("ZUModule", 2)?;
        st.serialize_field("tower", &to_pq(&self.tower))?;
        st.serialize_field("finite", &Finite(&self.finite))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn tau(v: &[i64]) -> TauFunction {
        TauFunction::new(v.to_vec(), true).unwrap()
    }

    #[test]
    fn constant_tau_is_single_ray() {
        let r = tau(&[0, 0, 0]).root();
        assert_eq!(r, GradedRoot::ray_from(0));
        assert!(r.module().is_tower());
        assert_eq!(tau(&[0, 0]).rank_red(), (0, 0));
    }

    #[test]
    fn two_minima_weakly_elliptic_shape() {
        let r = tau(&[0, 1, 0, 1, 2]).root();
        assert_eq!(r.vertices().len(), 3);
        assert_eq!(r.module(), ZUModule::new(int(0), vec![(int(0), 1)]));
        let m = root_from_minima(&[0, 0], &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(m, r);
    }

    #[test]
    fn minima_conditions_are_checked() {
        let err = root_from_minima(&[0, 0, 0], &[vec![0, 1, 3], vec![1, 0, 1], vec![3, 1, 0]]).unwrap_err();
        assert!(matches!(err, RootError::ConditionViolated { .. }));
    }

    #[test]
    fn shift_compatibility() {
        let r = tau(&[-3, -1, -2, 0, -2]).root();
        for s in [0, 1, -5] {
            assert_eq!(r.shifted(s).module(), r.module().shifted(&int(2 * s)));
        }
        let m = r.module().shifted(&rat(-5, 4));
        assert_eq!(m.tower_degree(), &rat(-29, 4));
    }

    #[test]
    fn dot_is_deterministic() {
        let r = GradedRoot::ray_from(0);
        let d = r.to_dot("R0", &int(0));
        assert_eq!(d, r.to_dot("R0", &int(0)));
        assert!(d.contains("v0 -> ray"));
    }

    #[test]
    fn module_pretty_and_json() {
        let m = ZUModule::new(int(-6), vec![(int(-4), 2), (int(-4), 1)]);
        assert_eq!(m.to_string(), "T+[-6] (+) T[-4](1) (+) T[-4](2)");
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"tower":"-6/1","finite":[["-4/1",1],["-4/1",2]]}"#);
    }
}
