//! Acceptance suite: one PASS/FAIL line per criterion, with the tolerances
//! and time budgets pinned below.
//!
//! Run with `cargo test -p plumbroot --test acceptance -- --nocapture` to
//! see the report.

mod common;

use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::Zero;
use plumbroot::ar::{analyze, analyze_orbit, classify, fundamental_cycle, is_rational, ClassificationKind, XSequence};
use plumbroot::arith::{int, to_f64};
use plumbroot::catalog;
use plumbroot::enumerate::DEFAULT_POINT_CAP;
use plumbroot::lattice::LatticeVector;
use plumbroot::lens::{eval_neg_cf, k_squared_plus_s, lens_table, torsion_fourier_f64, LensSpace};
use plumbroot::oracle::{enumerate_sublevel, orbit_root_multiset, root_oracle};
use plumbroot::root::{GradedRoot, TauFunction, ZUModule};
use plumbroot::seifert::{
    dp_invariant, enumerate_seifert_spinc, k_squared_plus_s_star, seifert_k2s, spinc_orbit, tau_bound, verify_sw_identity,
    x_closed_form, Leg, SeifertData,
};
use plumbroot::spinc::{canonical_orbit, enumerate_spinc};
use plumbroot::{BlowupSite, Rational};
use rand::Rng;

/// Numeric tolerance of the lens Fourier-sum check.
const LENS_FOURIER_TOLERANCE: f64 = 1e-9;
/// Numeric tolerance of the Seifert extrapolation check.
const SEIFERT_NUMERIC_TOLERANCE: f64 = 1e-6;
/// Truncation depth above `min τ` for root comparisons.
const ROOT_DEPTH: i64 = 6;
/// Number of random AR trees compared with the oracle.
const ORACLE_TREES: usize = 300;
/// Number of random rational trees.
const RATIONAL_TREES: usize = 200;
/// Number of random blow-ups.
const BLOWUPS: usize = 100;
/// Largest lens-space order in the sweep.
const LENS_P_MAX: i64 = 200;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn seifert(e0: i64, legs: &[(i64, i64)]) -> SeifertData {
    SeifertData::new(e0, legs.iter().map(|&(a, w)| Leg::new(a, w).unwrap()).collect()).unwrap()
}

fn reference_seifert() -> Vec<(&'static str, SeifertData)> {
    vec![
        ("Σ(2,3,5)", seifert(-2, &[(2, 1), (3, 2), (5, 4)])),
        ("Σ(2,3,7)", seifert(-1, &[(2, 1), (3, 1), (7, 1)])),
        ("Σ(2,3,11)", seifert(-2, &[(2, 1), (3, 2), (11, 9)])),
        ("e0=-2 (2,1)(3,1)(5,1)", seifert(-2, &[(2, 1), (3, 1), (5, 1)])),
    ]
}

fn criterion_1() -> Check {
    let r1 = TauFunction::new(vec![-3, -1, -2, 0, -2], true).unwrap();
    let r2 = TauFunction::new(vec![-3, 0, -2, -1, -2], true).unwrap();
    let (root1, root2) = (r1.root(), r2.root());
    let expected = ZUModule::new(int(-6), vec![(int(-4), 1), (int(-4), 2)]);
    ensure(root1 != root2, || "roots coincide".into())?;
    ensure(root1.module() == expected && root2.module() == expected, || {
        format!("modules {} and {}", root1.module(), root2.module())
    })?;
    ensure(r1.rank_red().0 == 3 && r2.rank_red().0 == 3, || "rank differs from 3".into())?;
    Ok(format!("non-isomorphic roots, both {expected}, rank 3"))
}

fn criterion_2() -> Check {
    let mut rng = common::rng(2);
    let mut graphs = vec![catalog::e8()];
    graphs.extend((0..RATIONAL_TREES).map(|_| common::random_rational_tree(&mut rng, 8)));
    for g in &graphs {
        let c = classify(g);
        ensure(c.kind == ClassificationKind::Rational, || format!("{:?} classifies {c}", g.euler_numbers()))?;
        let j0 = c.certificate.ok_or("rational graph without AR vertex")?.vertex;
        let r = analyze_orbit(g, j0, &canonical_orbit(g));
        let ray = GradedRoot::ray_from(0).truncated(ROOT_DEPTH);
        let a = is_rational(g);
        let b = r.root.truncated(ROOT_DEPTH) == ray;
        let hc = r.module.finite_rank() == 0;
        let zero_set = enumerate_sublevel(g, &g.canonical_class(), 0, DEFAULT_POINT_CAP).map_err(|e| e.to_string())?;
        let a_prime = zero_set.component_count() == 1;
        ensure(a && b && hc && a_prime, || {
            format!("{:?}: rational {a}, R_can = R₀ {b}, H_red = 0 {hc}, level 0 connected {a_prime}", g.euler_numbers())
        })?;
    }
    Ok(format!("−E8 and {RATIONAL_TREES} random trees: Rational, R_can = R₀, H_red = 0, level 0 connected"))
}

fn criterion_3() -> Check {
    let g = catalog::elliptic_length_one();
    let c = classify(&g);
    ensure(c.kind == ClassificationKind::WeaklyElliptic { l: 1 }, || format!("classified {c}"))?;
    let j0 = c.certificate.ok_or("no AR vertex")?.vertex;
    let r = analyze_orbit(&g, j0, &canonical_orbit(&g));
    let expected = ZUModule::new(int(0), vec![(int(0), 1)]);
    ensure(r.root.module() == expected, || format!("module {}", r.root.module()))?;
    let cx = enumerate_sublevel(&g, &g.canonical_class(), 0, DEFAULT_POINT_CAP).map_err(|e| e.to_string())?;
    let zero = cx.index_of(&LatticeVector::zero(g.len())).ok_or("0 missing")?;
    let xmin = cx.index_of(&fundamental_cycle(&g)).ok_or("x_min missing")?;
    ensure(cx.component_count() == 2, || format!("{} components at level 0", cx.component_count()))?;
    ensure(cx.component[zero] != cx.component[xmin], || "0 and x_min share a component".into())?;
    ensure(cx.chi[zero] == 0 && cx.chi[xmin] == 0, || "minima not at χ = 0".into())?;
    Ok(format!("WeaklyElliptic l=1, module {expected}, minima 0 and x_min"))
}

fn criterion_4() -> Check {
    let mut rng = common::rng(4);
    let sample = common::ar_sample(&mut rng, ORACLE_TREES, 6, 150);
    let mut orbits = 0;
    let mut non_rational = 0;
    for (g, j0) in &sample {
        non_rational += usize::from(!is_rational(g));
        for o in enumerate_spinc(g).map_err(|e| e.to_string())? {
            let r = analyze_orbit(g, *j0, &o);
            let top = r.min_tau + ROOT_DEPTH;
            let oracle = root_oracle(g, o.k_r(), top, DEFAULT_POINT_CAP).map_err(|e| e.to_string())?;
            ensure(r.root.truncated(top) == oracle.truncated(top), || {
                format!("{:?} {:?} orbit {}: engine and oracle roots differ", g.euler_numbers(), g.edges(), o.index)
            })?;
            orbits += 1;
        }
    }
    Ok(format!("{ORACLE_TREES} AR trees ({non_rational} non-rational), {orbits} orbits agree"))
}

fn criterion_5() -> Check {
    let mut rng = common::rng(5);
    for _ in 0..BLOWUPS {
        let g = common::random_small_tree(&mut rng, 4, 5, 40);
        let site = if !g.edges().is_empty() && rng.gen_bool(0.5) {
            let (a, b) = g.edges()[rng.gen_range(0..g.edges().len())];
            BlowupSite::Edge(g.id(a), g.id(b))
        } else {
            BlowupSite::Vertex(g.id(rng.gen_range(0..g.len())))
        };
        let up = g.blow_up(site).map_err(|e| e.to_string())?;
        let codes = |h: &plumbroot::PlumbingGraph| -> Result<Vec<String>, String> {
            let orbits = enumerate_spinc(h).map_err(|e| e.to_string())?;
            orbit_root_multiset(h, &orbits, ROOT_DEPTH, DEFAULT_POINT_CAP).map_err(|e| e.to_string())
        };
        ensure(codes(&g)? == codes(&up)?, || format!("{:?} blown up at {site:?}", g.euler_numbers()))?;
    }
    Ok(format!("{BLOWUPS} random blow-ups preserve the root multiset"))
}

fn criterion_6() -> Check {
    let mut spaces = 0;
    let mut structures = 0;
    let mut worst = 0f64;
    for p in 2..=LENS_P_MAX {
        for q in (1..p).filter(|q| q.gcd(&p) == 1) {
            let lens = LensSpace::new(p, q).map_err(|e| e.to_string())?;
            let table = lens_table(&lens);
            let numeric = torsion_fourier_f64(&lens);
            let total: Rational = table.iter().map(|i| i.torsion.clone()).sum();
            ensure(total.is_zero(), || format!("L({p},{q}): Σ T = {total}"))?;
            let lambda_graph = lens.graph().casson_walker();
            for inv in &table {
                ensure(&inv.torsion - &inv.lambda / int(p) == &inv.d / int(2), || {
                    format!("L({p},{q}) a={}: T − λ/|H| ≠ d/2", inv.a)
                })?;
                ensure(inv.lambda == lambda_graph, || format!("L({p},{q}): λ {} ≠ {lambda_graph}", inv.lambda))?;
                let err = (numeric[inv.a as usize] - to_f64(&inv.torsion)).abs();
                worst = worst.max(err);
                ensure(err < LENS_FOURIER_TOLERANCE, || format!("L({p},{q}) a={}: Fourier error {err:e}", inv.a))?;
            }
            spaces += 1;
            structures += table.len();
        }
    }
    Ok(format!("{spaces} lens spaces, {structures} structures; worst Fourier error {worst:.1e}"))
}

fn criterion_7() -> Check {
    let mut orbits = 0;
    let mut worst = 0f64;
    for (name, d) in reference_seifert() {
        let report = verify_sw_identity(&d).map_err(|e| format!("{name}: {e}"))?;
        ensure(d.nu() < 3 || report.orbits.len() as i64 == d.order(), || format!("{name}: orbit count"))?;
        for o in &report.orbits {
            let err = (o.limit_approx - to_f64(&o.limit)).abs();
            worst = worst.max(err);
            ensure(err < SEIFERT_NUMERIC_TOLERANCE, || format!("{name} {}: numeric error {err:e}", o.spinc))?;
        }
        orbits += report.orbits.len();
    }
    let h29 = &reference_seifert()[3].1;
    ensure(h29.nu() == 3 && h29.order() > 1, || "ν = 3 datum must have |H| > 1".into())?;
    Ok(format!("4 data, {orbits} orbits exact; worst extrapolation error {worst:.1e}"))
}

fn criterion_8() -> Check {
    let mut chains = 0;
    for p in 2..=60i64 {
        for q in (1..p).filter(|q| q.gcd(&p) == 1) {
            let lens = LensSpace::new(p, q).map_err(|e| e.to_string())?;
            let expected = k_squared_plus_s(&lens);
            ensure(expected == lens.graph().k_squared_plus_s(), || format!("L({p},{q}): lens vs plumbing"))?;
            let cf = lens.cf();
            for c in 0..cf.len() {
                let mut legs = Vec::new();
                for part in [cf[..c].iter().rev().copied().collect::<Vec<_>>(), cf[c + 1..].to_vec()] {
                    if !part.is_empty() {
                        let (alpha, omega) = eval_neg_cf(&part);
                        legs.push(Leg::new(alpha, omega).map_err(|e| e.to_string())?);
                    }
                }
                ensure(k_squared_plus_s_star(-cf[c], &legs) == expected, || format!("L({p},{q}) centre {c}: star vs lens"))?;
                chains += 1;
            }
        }
    }
    let mut cycles = 0;
    for (name, d) in reference_seifert() {
        let g = d.graph().map_err(|e| e.to_string())?;
        ensure(seifert_k2s(&d) == g.k_squared_plus_s(), || format!("{name}: Seifert vs plumbing"))?;
        for sp in enumerate_seifert_spinc(&d).map_err(|e| e.to_string())? {
            let orbit = spinc_orbit(&d, &g, &sp).map_err(|e| e.to_string())?;
            let mut seq = XSequence::new(&g, 0, &orbit.pairings);
            for i in 0..=tau_bound(&d, &sp) {
                ensure(&x_closed_form(&d, &sp, i) == seq.current(), || format!("{name} {sp}: x({i}) differs"))?;
                seq.advance();
                cycles += 1;
            }
        }
    }
    Ok(format!("{chains} chain/centre choices and 4 Seifert data agree; {cycles} cycles x(i) match the ascent"))
}

fn criterion_9() -> Check {
    let mut parts = Vec::new();
    for ((name, d), expected) in reference_seifert().into_iter().take(2).zip([0, 1]) {
        let dp = dp_invariant(&d);
        let g = d.graph().map_err(|e| e.to_string())?;
        let a = analyze(&g).map_err(|e| e.to_string())?;
        let can = &a.orbits[0];
        let engine = can.chi_hf - can.min_tau;
        ensure(dp == expected && engine == expected, || format!("{name}: DP {dp}, engine {engine}, expected {expected}"))?;
        parts.push(format!("{name} → {dp}"));
    }
    Ok(parts.join(", "))
}

/// Every invariant of the specification, mapped to the automated test that
/// checks it.
const PROPERTY_TESTS: &[(&str, &str, &str)] = &[
    ("B·B⁻¹ = I, −B⁻¹ ≥ 0", "plumbing", "inverse_is_exact_and_nonpositive"),
    ("χ bilinearity", "plumbing", "chi_is_quadratic"),
    ("blow_down ∘ blow_up = id", "plumbing", "blow_down_inverts_blow_up"),
    ("K²+s, λ, |det| blow-up invariant", "plumbing", "blow_up_preserves_invariants"),
    ("orbit invariants", "spinc", "orbits_satisfy_their_invariants"),
    ("distinguished_rep idempotent / box oracle", "spinc", "distinguished_rep_matches_the_box_oracle"),
    ("k_r(x) ≥ x², χ_{k_r}(−x) ≥ 0", "spinc", "k_r_dominates_the_square_on_effective_cycles"),
    ("involution permutes orbits", "spinc", "involution_is_a_permutation"),
    ("roots from τ are valid", "graded_root", "roots_from_tau_are_valid"),
    ("R¹ ≠ R², equal modules", "graded_root", "roots_carry_more_than_modules"),
    ("module rank tie-break invariant", "graded_root", "module_rank_ignores_tie_breaks"),
    ("rank_red = module rank", "graded_root", "rank_red_equals_module_rank"),
    ("x(i) properties and connecting sequences", "ar_engine", "x_sequence_properties"),
    ("χ(x) ≥ τ(i) on slices", "ar_engine", "tau_bounds_chi_on_each_slice"),
    ("rational ⟺ ray ⟺ H_red = 0; min τ ≥ 0", "ar_engine", "rationality_predicates_agree"),
    ("engine roots blow-up invariant", "ar_engine", "engine_roots_survive_blow_ups"),
    ("AR vertex independence", "ar_engine", "different_ar_vertices_give_the_same_root"),
    ("oracle roots valid", "oracle", "oracle_roots_are_graded_roots"),
    ("shift law", "oracle", "shift_law"),
    ("oracle multiset blow-up invariant", "oracle", "blow_up_preserves_the_root_multiset"),
    ("restricted sublevel sets surject", "oracle", "restricted_cycles_reach_every_component"),
    ("lens identities, Σ T = 0", "lens", "torsion_identities"),
    ("lens λ = plumbing λ", "lens", "closed_forms_match_the_chain_graph"),
    ("lens d = engine d", "lens", "correction_terms_match_the_engine"),
    ("coefficient identities", "lens", "coefficient_identities"),
    ("continued-fraction table recursion", "lens", "continued_fraction_table_recursion"),
    ("seifert τ = engine τ, x(i) closed form", "seifert", "closed_forms_match_the_engine"),
    ("seifert K²+s = plumbing, order = |det|", "seifert", "closed_forms_match_the_engine"),
    ("Σ sw = λ, torsion identity", "seifert", "identities_hold_on_random_data"),
    ("leg inequalities", "seifert", "structures_solve_the_leg_inequalities"),
];

fn test_source(file: &str) -> &'static str {
    match file {
        "plumbing" => include_str!("plumbing.rs"),
        "spinc" => include_str!("spinc.rs"),
        "graded_root" => include_str!("graded_root.rs"),
        "ar_engine" => include_str!("ar_engine.rs"),
        "oracle" => include_str!("oracle.rs"),
        "lens" => include_str!("lens.rs"),
        "seifert" => include_str!("seifert.rs"),
        other => panic!("unknown test file {other}"),
    }
}

fn criterion_10() -> Check {
    for (property, file, test) in PROPERTY_TESTS {
        ensure(test_source(file).contains(&format!("fn {test}(")), || {
            format!("property '{property}' has no test {file}::{test}")
        })?;
    }
    Ok(format!("{} properties mapped to automated tests", PROPERTY_TESTS.len()))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "roots versus modules", budget: Duration::from_millis(1), run: criterion_1 },
    Criterion { id: 2, name: "rationality suite", budget: Duration::from_secs(10), run: criterion_2 },
    Criterion { id: 3, name: "weakly elliptic graph", budget: Duration::from_secs(10), run: criterion_3 },
    Criterion { id: 4, name: "oracle equivalence", budget: Duration::from_secs(600), run: criterion_4 },
    Criterion { id: 5, name: "blow-up invariance", budget: Duration::from_secs(600), run: criterion_5 },
    Criterion { id: 6, name: "lens identity sweep", budget: Duration::from_secs(300), run: criterion_6 },
    Criterion { id: 7, name: "Seifert identities", budget: Duration::from_secs(120), run: criterion_7 },
    Criterion { id: 8, name: "cross-formula consistency", budget: Duration::from_secs(600), run: criterion_8 },
    Criterion { id: 9, name: "DP invariant", budget: Duration::from_secs(60), run: criterion_9 },
    Criterion { id: 10, name: "property suite", budget: Duration::from_secs(1200), run: criterion_10 },
];

#[test]
fn acceptance() {
    let mut failures = Vec::new();
    for c in CRITERIA {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; exceeded budget {:?}", c.budget)),
            other => other,
        };
        match &outcome {
            Ok(detail) => println!("PASS {:>2} {} ({elapsed:.2?}): {detail}", c.id, c.name),
            Err(why) => {
                println!("FAIL {:>2} {} ({elapsed:.2?}): {why}", c.id, c.name);
                failures.push(c.id);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
