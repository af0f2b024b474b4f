//! Spin^c orbits, distinguished representatives and `m_k`.

mod common;

use std::collections::BTreeSet;

use plumbroot::arith::to_pq;
use plumbroot::enumerate::DEFAULT_POINT_CAP;
use plumbroot::lattice::{CharElement, DualVector, LatticeVector};
use plumbroot::spinc::{self, distinguished_rep, enumerate_spinc, in_s_q, involution, m_k};
use plumbroot::PlumbingGraph;
use proptest::prelude::*;

fn orbit_invariants_hold(g: &PlumbingGraph) -> Result<(), TestCaseError> {
    let orbits = enumerate_spinc(g).unwrap();
    prop_assert_eq!(orbits.len() as u64, u64::try_from(g.order()).unwrap());
    let mut seen = BTreeSet::new();
    for (i, o) in orbits.iter().enumerate() {
        prop_assert_eq!(o.index, i);
        let l = o.l_prime();
        prop_assert!(in_s_q(g, l));
        prop_assert!(l.is_effective());
        for j in 0..g.len() {
            prop_assert!(o.pairings[j] > g.euler(j));
            prop_assert!(o.pairings[j] <= 0);
        }
        // k_r is characteristic: k_r(b_j) + e_j is even.
        for (j, v) in o.k_r().values().iter().enumerate() {
            prop_assert_eq!((v + g.euler(j)).rem_euclid(2), 0);
        }
        prop_assert_eq!(&distinguished_rep(g, l).unwrap(), l);
        // Distinct orbits: representatives are pairwise inequivalent, which
        // for minimal elements of S_Q means pairwise distinct.
        prop_assert!(seen.insert(l.coeffs().iter().map(to_pq).collect::<Vec<_>>()));
    }
    for (a, b) in orbits.iter().zip(orbits.iter().skip(1)) {
        prop_assert!(a.l_prime().sub(b.l_prime()).to_lattice().is_none());
    }
    Ok(())
}

proptest! {
    #![proptest_config(common::config(128))]

    #[test]
    fn orbits_satisfy_their_invariants(g in common::small_tree(6, 5, 400)) {
        orbit_invariants_hold(&g)?;
    }

    #[test]
    fn distinguished_rep_matches_the_box_oracle(
        g in common::tree(4, 4),
        seed in proptest::collection::vec(-3i64..=3, 4),
    ) {
        let p = &seed[..g.len()];
        let l = g.dual_from_int_pairings(p);
        let rep = distinguished_rep(&g, &l).unwrap();
        prop_assert!(rep.sub(&l).to_lattice().is_some());
        prop_assert_eq!(rep, common::distinguished_rep_box(&g, &l));
        // The lattice shift of the input does not matter.
        let shifted = l.add_lattice(&LatticeVector::new(seed[..g.len()].iter().map(|v| 2 * v).collect()));
        prop_assert_eq!(distinguished_rep(&g, &shifted).unwrap(), common::distinguished_rep_box(&g, &l));
    }

    #[test]
    fn k_r_dominates_the_square_on_effective_cycles(
        g in common::small_tree(5, 5, 200),
        xs in proptest::collection::vec(0i64..=3, 5),
    ) {
        let x = LatticeVector::new(xs[..g.len()].to_vec());
        for o in enumerate_spinc(&g).unwrap() {
            prop_assert!(o.k_r().eval(&x) >= g.self_pairing(&x));
            prop_assert!(o.k_r().chi(&g, &(-&x)) >= 0);
        }
    }

    #[test]
    fn involution_is_a_permutation(g in common::small_tree(6, 5, 400)) {
        let orbits = enumerate_spinc(&g).unwrap();
        let inv = involution(&g, &orbits);
        let mut image = inv.clone();
        image.sort_unstable();
        prop_assert_eq!(image, (0..orbits.len()).collect::<Vec<_>>());
        for (i, &j) in inv.iter().enumerate() {
            prop_assert_eq!(inv[j], i);
            let sum = orbits[i].l_prime().add(orbits[j].l_prime());
            prop_assert!(sum.to_lattice().is_some());
        }
        prop_assert_eq!(inv[0], 0);
    }

    #[test]
    fn m_k_matches_a_box_search(g in common::small_tree(4, 4, 60)) {
        for o in enumerate_spinc(&g).unwrap() {
            let m = m_k(&g, o.k_r(), DEFAULT_POINT_CAP).unwrap();
            prop_assert!(m <= 0);
            prop_assert_eq!(m, common::chi_min_box(&g, o.k_r().values(), 4));
        }
    }
}

#[test]
fn canonical_orbit_is_the_canonical_class() {
    let g = PlumbingGraph::chain(&[-2, -5, -3]).unwrap();
    let o = spinc::canonical_orbit(&g);
    assert!(o.l_prime().is_zero());
    assert_eq!(o.k_r(), &g.canonical_class());
    assert_eq!(enumerate_spinc(&g).unwrap()[0], o);
}

#[test]
fn small_orbit_counts() {
    let one = PlumbingGraph::from_euler(&[-1], &[]).unwrap();
    let orbits = enumerate_spinc(&one).unwrap();
    assert_eq!(orbits.len(), 1);
    assert!(orbits[0].l_prime().is_zero());
    let two = PlumbingGraph::from_euler(&[-2], &[]).unwrap();
    assert_eq!(enumerate_spinc(&two).unwrap().len(), 2);
}

#[test]
fn rejects_non_integral_input() {
    let g = PlumbingGraph::chain(&[-2, -3]).unwrap();
    let half = DualVector::new(vec![plumbroot::arith::rat(1, 2), plumbroot::arith::rat(0, 1)]);
    assert!(distinguished_rep(&g, &half).is_err());
    assert!(CharElement::from_values(&g, vec![1, 2]).is_err());
}

#[test]
fn m_k_vanishes_on_rational_graphs() {
    let mut rng = common::rng(11);
    for _ in 0..20 {
        let g = common::random_rational_tree(&mut rng, 5);
        if g.order() > 300.into() {
            continue;
        }
        for o in enumerate_spinc(&g).unwrap() {
            assert_eq!(m_k(&g, o.k_r(), DEFAULT_POINT_CAP).unwrap(), 0);
        }
    }
}
