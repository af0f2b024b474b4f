//! The almost-rational engine: the cycles `x(i)`, the τ-function and the
//! classification, checked against brute-force definitions and the oracle.

mod common;

use plumbroot::ar::{self, analyze, analyze_orbit, classify, x_sequence, ClassificationKind};
use plumbroot::catalog;
use plumbroot::enumerate::DEFAULT_POINT_CAP;
use plumbroot::lattice::LatticeVector;
use plumbroot::oracle::{enumerate_sublevel, root_oracle};
use plumbroot::spinc::{enumerate_spinc, SpincOrbit};
use plumbroot::{BlowupSite, PlumbingGraph};
use rand::Rng;

/// `(x + l', b_j)`.
fn pairing(g: &PlumbingGraph, o: &SpincOrbit, x: &LatticeVector, j: usize) -> i64 {
    g.pairing_with_basis(x, j) + o.pairings[j]
}

/// The connecting sequence from `x + b_{j₀}`: repeatedly add `b_j` for the
/// largest `j ≠ j₀` with positive pairing, recording `χ_{k_r}` after every
/// step.
fn connecting_sequence(g: &PlumbingGraph, j0: usize, o: &SpincOrbit, x: &LatticeVector) -> (LatticeVector, Vec<i64>) {
    let mut y = x.clone();
    y.add_basis(j0, 1);
    let mut chis = vec![o.k_r().chi(g, &y)];
    while let Some(j) = (0..g.len()).rev().find(|&j| j != j0 && pairing(g, o, &y, j) > 0) {
        y.add_basis(j, 1);
        chis.push(o.k_r().chi(g, &y));
    }
    (y, chis)
}

/// The minimal `x ≥ 0` with `x_{j₀} = i` and `(x + l', b_j) ≤ 0` for all
/// `j ≠ j₀`, by searching the box `[0, r]` in the other coordinates.
fn x_by_box(g: &PlumbingGraph, j0: usize, o: &SpincOrbit, i: i64, r: i64) -> Option<LatticeVector> {
    let s = g.len();
    let lo: Vec<i64> = (0..s).map(|j| if j == j0 { i } else { 0 }).collect();
    let hi: Vec<i64> = (0..s).map(|j| if j == j0 { i } else { r }).collect();
    let good: Vec<Vec<i64>> = common::box_points(&lo, &hi)
        .into_iter()
        .filter(|x| {
            let x = LatticeVector::new(x.clone());
            (0..s).all(|j| j == j0 || pairing(g, o, &x, j) <= 0)
        })
        .collect();
    let min: Vec<i64> = (0..s).map(|j| good.iter().map(|x| x[j]).min().unwrap_or(r)).collect();
    (good.contains(&min) && (0..s).all(|j| j == j0 || min[j] < hi[j])).then(|| LatticeVector::new(min))
}

#[test]
fn x_sequence_properties() {
    let mut rng = common::rng(21);
    for (g, j0) in common::ar_sample(&mut rng, 60, 6, 80) {
        for o in enumerate_spinc(&g).unwrap() {
            let xs = x_sequence(&g, j0, &o, 12);
            for (i, x) in xs.iter().enumerate() {
                assert_eq!(x[j0], i as i64);
                assert!(x.is_effective());
                for j in (0..g.len()).filter(|&j| j != j0) {
                    assert!(pairing(&g, &o, x, j) <= 0);
                }
                if let Some(next) = xs.get(i + 1) {
                    let mut lower = x.clone();
                    lower.add_basis(j0, 1);
                    assert!(lower.le(next));
                    let (end, chis) = connecting_sequence(&g, j0, &o, x);
                    assert_eq!(&end, next, "connecting sequence ends at x(i+1)");
                    assert!(chis.windows(2).all(|w| w[1] <= w[0]), "χ non-increasing: {chis:?}");
                }
            }
        }
    }
}

#[test]
fn x_sequence_matches_its_minimal_definition() {
    let mut rng = common::rng(22);
    let mut checked = 0;
    for (g, j0) in common::ar_sample(&mut rng, 40, 4, 40) {
        for o in enumerate_spinc(&g).unwrap() {
            let xs = x_sequence(&g, j0, &o, 3);
            for (i, x) in xs.iter().enumerate() {
                if let Some(b) = x_by_box(&g, j0, &o, i as i64, 10) {
                    assert_eq!(&b, x);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 200, "only {checked} cycles certified by the box");
}

#[test]
fn tau_bounds_chi_on_each_slice() {
    let mut rng = common::rng(23);
    for (g, j0) in common::ar_sample(&mut rng, 40, 5, 60) {
        for o in enumerate_spinc(&g).unwrap() {
            let r = analyze_orbit(&g, j0, &o);
            let cx = enumerate_sublevel(&g, o.k_r(), r.min_tau + 4, DEFAULT_POINT_CAP).unwrap();
            let last = *r.tau.last().unwrap();
            for (x, chi) in cx.points.iter().zip(&cx.chi) {
                let i = x[j0];
                if i >= 0 {
                    let bound = r.tau.get(i as usize).copied().unwrap_or(last);
                    assert!(*chi >= bound, "χ({x}) = {chi} < τ({i}) = {bound}");
                }
            }
        }
    }
}

#[test]
fn engine_root_equals_oracle_root() {
    let mut rng = common::rng(24);
    for (g, j0) in common::ar_sample(&mut rng, 40, 6, 100) {
        for o in enumerate_spinc(&g).unwrap() {
            let r = analyze_orbit(&g, j0, &o);
            assert!(r.certified);
            let top = r.min_tau + 6;
            let oracle = root_oracle(&g, o.k_r(), top, DEFAULT_POINT_CAP).unwrap();
            assert!(oracle.validate().is_ok());
            assert_eq!(r.root.truncated(top), oracle.truncated(top));
        }
    }
}

#[test]
fn rationality_predicates_agree() {
    let mut rng = common::rng(25);
    for (g, j0) in common::ar_sample(&mut rng, 80, 6, 200) {
        let o = plumbroot::spinc::canonical_orbit(&g);
        let r = analyze_orbit(&g, j0, &o);
        let rational = ar::is_rational(&g);
        let single_ray = (r.root.min_chi()..=r.root.top_level()).all(|n| r.root.count_at(n) == 1);
        let reduced_zero = r.module.finite_rank() == 0;
        assert_eq!(rational, single_ray);
        assert_eq!(rational, reduced_zero);
        assert_eq!(rational, ar::chi_of_fundamental_cycle(&g) == 1);
        if rational {
            assert_eq!(r.root.truncated(6), plumbroot::root::GradedRoot::ray_from(0).truncated(6));
        }
        let kind = classify(&g).kind;
        let nonneg = r.min_tau >= 0;
        let rat_or_elliptic = matches!(kind, ClassificationKind::Rational | ClassificationKind::WeaklyElliptic { .. });
        assert_eq!(nonneg, rat_or_elliptic, "{kind:?} min τ {}", r.min_tau);
    }
}

#[test]
fn seiberg_witten_sum_is_casson_walker() {
    let mut rng = common::rng(26);
    for (g, _) in common::ar_sample(&mut rng, 40, 6, 150) {
        let a = analyze(&g).unwrap();
        assert_eq!(a.sw_sum(), g.casson_walker());
        for r in &a.orbits {
            assert_eq!(r.chi_hf, r.rank_red as i64);
            let s = r.tau_function.rank_red();
            assert_eq!(s, (r.rank_red, r.min_tau));
        }
    }
}

#[test]
fn different_ar_vertices_give_the_same_root() {
    let mut rng = common::rng(27);
    let mut compared = 0;
    for (g, j0) in common::ar_sample(&mut rng, 60, 6, 60) {
        let others: Vec<usize> = (0..g.len())
            .filter(|&j| j != j0 && ar::ar_certificate_at(&g, j).is_some())
            .collect();
        for j1 in others {
            for o in enumerate_spinc(&g).unwrap() {
                let a = analyze_orbit(&g, j0, &o);
                let b = analyze_orbit(&g, j1, &o);
                assert_eq!(a.root, b.root);
                assert_eq!(a.d, b.d);
                compared += 1;
            }
        }
    }
    assert!(compared > 0);
}

#[test]
fn engine_roots_survive_blow_ups() {
    let mut rng = common::rng(28);
    let mut compared = 0;
    for (g, _) in common::ar_sample(&mut rng, 40, 5, 60) {
        let site = if !g.edges().is_empty() && rng.gen_bool(0.5) {
            let (a, b) = g.edges()[rng.gen_range(0..g.edges().len())];
            BlowupSite::Edge(g.id(a), g.id(b))
        } else {
            BlowupSite::Vertex(g.id(rng.gen_range(0..g.len())))
        };
        let up = g.blow_up(site).unwrap();
        let (Ok(a), Ok(b)) = (analyze(&g), analyze(&up)) else { continue };
        let codes = |an: &ar::Analysis| {
            let mut v: Vec<String> = an
                .orbits
                .iter()
                .map(|r| format!("{} {}", r.d, r.root.truncated(r.min_tau + 6).canonical_form()))
                .collect();
            v.sort();
            v
        };
        assert_eq!(codes(&a), codes(&b));
        compared += 1;
    }
    assert!(compared >= 20, "{compared}");
}

#[test]
fn catalog_graphs() {
    let e8 = catalog::e8();
    let a = analyze(&e8).unwrap();
    assert_eq!(a.orbits.len(), 1);
    assert_eq!(a.orbits[0].d, plumbroot::arith::int(2));
    assert!(a.orbits[0].module.is_tower());

    let ell = catalog::elliptic_length_one();
    let a = analyze(&ell).unwrap();
    assert_eq!(a.classification.kind, ClassificationKind::WeaklyElliptic { l: 1 });
    let can = &a.orbits[0];
    assert_eq!(can.min_tau, 0);
    assert_eq!(can.rank_red, 1);

    for g in [catalog::two_node_not_ar(), catalog::two_node_heavy_not_ar()] {
        assert!(matches!(analyze(&g), Err(ar::ArError::NotAr { .. })));
    }
}
