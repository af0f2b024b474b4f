//! Shared generators and independent oracles for the integration tests.
//!
//! Everything here is deliberately written without reference to the
//! library's algorithms: brute-force box searches, floating-point
//! trigonometric sums and the classical correction-term recursion.

#![allow(dead_code)]

use num_integer::Integer;
use proptest::prelude::*;
use proptest::sample::Index;
use proptest::test_runner::{Config, RngSeed};
use plumbroot::lattice::DualVector;
use plumbroot::{PlumbingGraph, Rational};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic generator for the randomized suites.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Proptest configuration with a fixed seed and no failure persistence, so
/// that every run exercises the same cases.
pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed_7ee5),
        failure_persistence: None,
        ..Config::default()
    }
}

/// Strategy for negative-definite trees with at most `s_max` vertices and
/// decorations in `[−e_max, −1]`.
pub fn tree(s_max: usize, e_max: i64) -> impl Strategy<Value = PlumbingGraph> {
    (1..=s_max)
        .prop_flat_map(move |s| {
            (
                proptest::collection::vec(any::<Index>(), s - 1),
                proptest::collection::vec(1..=e_max, s),
            )
        })
        .prop_filter_map("negative definite", |(parents, e)| {
            let edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, p)| (p.index(i + 1), i + 1)).collect();
            let euler: Vec<i64> = e.iter().map(|v| -v).collect();
            PlumbingGraph::from_euler(&euler, &edges).ok()
        })
}

/// [`tree`] restricted to `|H| ≤ order_cap`.
pub fn small_tree(s_max: usize, e_max: i64, order_cap: u64) -> impl Strategy<Value = PlumbingGraph> {
    tree(s_max, e_max).prop_filter("small H", move |g| g.order() <= order_cap.into())
}

/// Random tree shape on `s` vertices: vertex `i > 0` attaches to a uniformly
/// chosen earlier vertex.
pub fn random_edges(rng: &mut ChaCha8Rng, s: usize) -> Vec<(usize, usize)> {
    (1..s).map(|i| (rng.gen_range(0..i), i)).collect()
}

fn degrees(s: usize, edges: &[(usize, usize)]) -> Vec<i64> {
    let mut deg = vec![0; s];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    deg
}

/// A random negative-definite tree with at most `s_max` vertices whose
/// decorations satisfy `−e_j ≥ δ_j − slack`, resampled until definite.
pub fn random_definite_tree(rng: &mut ChaCha8Rng, s_max: usize, slack: i64, extra: i64) -> PlumbingGraph {
    loop {
        let s = rng.gen_range(1..=s_max);
        let edges = random_edges(rng, s);
        let deg = degrees(s, &edges);
        let euler: Vec<i64> = deg
            .iter()
            .map(|&d| -(d - rng.gen_range(0..=slack) + rng.gen_range(0..=extra)).max(1))
            .collect();
        if let Ok(g) = PlumbingGraph::from_euler(&euler, &edges) {
            return g;
        }
    }
}

/// A random negative-definite tree with at most `s_max` vertices and
/// decorations biased towards `−1` and `−2` (otherwise uniform in
/// `[−e_max, −3]`), resampled until definite
/// and `|H| ≤ order_cap`.
pub fn random_small_tree(rng: &mut ChaCha8Rng, s_max: usize, e_max: i64, order_cap: u64) -> PlumbingGraph {
    loop {
        let s = rng.gen_range(1..=s_max);
        let edges = random_edges(rng, s);
        let euler: Vec<i64> = (0..s)
            .map(|_| match rng.gen_range(0..10) {
                0..=2 => -1,
                3..=5 => -2,
                _ => -rng.gen_range(3..=e_max.max(3)),
            })
            .collect();
        if let Ok(g) = PlumbingGraph::from_euler(&euler, &edges) {
            if g.order() <= order_cap.into() {
                return g;
            }
        }
    }
}

/// A random star-shaped tree (a node of decoration `−1`, `−2` or `−3` with
/// three or four short legs), resampled until definite, `|H| ≤ order_cap`
/// and not rational. These are the typical almost-rational but
/// non-rational inputs.
pub fn random_nonrational_star(rng: &mut ChaCha8Rng, s_max: usize, e_max: i64, order_cap: u64) -> PlumbingGraph {
    assert!(s_max >= 4);
    loop {
        let mut euler = vec![-rng.gen_range(1..=3)];
        let mut edges = Vec::new();
        let legs = if s_max >= 5 { rng.gen_range(3..=4) } else { 3 };
        let mut budget = s_max - 1 - legs;
        for _ in 0..legs {
            let extra = if budget > 0 { rng.gen_range(0..=budget.min(1)) } else { 0 };
            budget -= extra;
            let mut prev = 0;
            for _ in 0..=extra {
                euler.push(-rng.gen_range(2..=e_max));
                let v = euler.len() - 1;
                edges.push((prev, v));
                prev = v;
            }
        }
        let Ok(g) = PlumbingGraph::from_euler(&euler, &edges) else { continue };
        if g.order() <= order_cap.into() && !plumbroot::ar::is_rational(&g) {
            return g;
        }
    }
}

/// A random tree with `−e_j ≥ δ_j` (and hence rational once definite).
pub fn random_rational_tree(rng: &mut ChaCha8Rng, s_max: usize) -> PlumbingGraph {
    random_definite_tree(rng, s_max, 0, 2)
}

/// `χ_k(x) = −(k(x) + (x, x))/2` from first principles.
pub fn chi_brute(graph: &PlumbingGraph, k_values: &[i64], x: &[i64]) -> i64 {
    let s = graph.len();
    let mut kx = 0;
    let mut xx = 0;
    for i in 0..s {
        kx += k_values[i] * x[i];
        for j in 0..s {
            xx += x[i] * graph.form().b(i, j) * x[j];
        }
    }
    let twice = -(kx + xx);
    assert!(twice % 2 == 0, "characteristic element");
    twice / 2
}

/// All integer vectors in the box `[lo_j, hi_j]`.
pub fn box_points(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for (&a, &b) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|v| {
                (a..=b).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

/// `min χ_k` over the box `[−r, r]^s`.
pub fn chi_min_box(graph: &PlumbingGraph, k_values: &[i64], r: i64) -> i64 {
    let s = graph.len();
    box_points(&vec![-r; s], &vec![r; s])
        .iter()
        .map(|x| chi_brute(graph, k_values, x))
        .min()
        .expect("non-empty box")
}

/// The minimal element of `(l' + L) ∩ S_Q` by exhaustive search.
///
/// Every element `y` of `S_Q ∩ (l' + L)` with pairings `(y, b_j)` in the box
/// `[e_j + 1, 0]` is listed (the minimal element lies in this box); the
/// componentwise minimum of the list must itself be in the list.
pub fn distinguished_rep_box(graph: &PlumbingGraph, l_prime: &DualVector) -> DualVector {
    let s = graph.len();
    let lo: Vec<i64> = (0..s).map(|j| graph.euler(j) + 1).collect();
    let hi = vec![0; s];
    let candidates: Vec<DualVector> = box_points(&lo, &hi)
        .into_iter()
        .map(|p| graph.dual_from_int_pairings(&p))
        .filter(|y| y.sub(l_prime).to_lattice().is_some())
        .collect();
    assert!(!candidates.is_empty(), "the box contains the minimal element");
    let min = DualVector::new(
        (0..s)
            .map(|j| candidates.iter().map(|y| y.coeffs()[j].clone()).min().expect("non-empty"))
            .collect(),
    );
    assert!(candidates.contains(&min), "minimum is attained");
    min
}

/// Dedekind sum by the cotangent formula
/// `s(q, p) = (1/4p) Σ_{k=1}^{p−1} cot(πk/p) cot(πkq/p)`.
pub fn dedekind_cot(q: i64, p: i64) -> f64 {
    let pi = std::f64::consts::PI;
    let pf = p as f64;
    (1..p)
        .map(|k| {
            let a = pi * k as f64 / pf;
            let b = pi * (k * q).rem_euclid(p) as f64 / pf;
            1.0 / (a.tan() * b.tan())
        })
        .sum::<f64>()
        / (4.0 * pf)
}

/// The classical recursion for correction terms of `L(p, q)`:
/// `d(L(p,q), i) = −1/4 + (2i + 1 − p − q)²/(4pq) − d(L(q, r), j)` with
/// `r ≡ p`, `j ≡ i (mod q)`, returned for `i = 0, …, p − 1`.
pub fn os_lens_d(p: i64, q: i64) -> Vec<Rational> {
    fn d(p: i64, q: i64, i: i64) -> Rational {
        if p == 1 {
            return Rational::from_integer(0.into());
        }
        let t = 2 * i + 1 - p - q;
        Rational::new((t * t).into(), (4 * p * q).into()) - Rational::new(1.into(), 4.into()) - d(q, p.mod_floor(&q), i.mod_floor(&q))
    }
    (0..p).map(|i| d(p, q.mod_floor(&p), i)).collect()
}

/// Sorted copy of a list of rationals.
pub fn sorted(mut v: Vec<Rational>) -> Vec<Rational> {
    v.sort();
    v
}

/// `n` random certified almost-rational trees with at most `s_max`
/// vertices and `|H| ≤ order_cap`; every other sample is forced to be
/// non-rational. Returns each graph with its AR vertex.
pub fn ar_sample(rng: &mut ChaCha8Rng, n: usize, s_max: usize, order_cap: u64) -> Vec<(PlumbingGraph, usize)> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let g = if out.len() % 2 == 0 || s_max < 4 {
            random_small_tree(rng, s_max, 9, order_cap)
        } else {
            random_nonrational_star(rng, s_max, 9, order_cap)
        };
        if let Some(cert) = plumbroot::ar::classify(&g).certificate {
            out.push((g, cert.vertex));
        }
    }
    out
}
