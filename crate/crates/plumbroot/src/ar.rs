//! Almost-rational graphs: classification, computation sequences `x(i)`,
//! τ-functions and per-orbit Heegaard Floer data.
//!
//! For a vertex `j₀` and an orbit with distinguished element `l'`, `x(i)` is
//! the minimal cycle with coefficient `i` at `j₀` satisfying
//! `(x + l', b_j) ≤ 0` for all `j ≠ j₀`; it is produced by Laufer ascents
//! over the vertices `J* = J \ {j₀}`. The τ-function is `τ(i) = χ_{k_r}(x(i))`
//! with increments `Δτ(i) = 1 − (x(i) + l', b_{j₀})`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{common_denominator, int, to_pq, Rational};
use crate::enumerate::EnumerationError;
use crate::graph::PlumbingGraph;
use crate::lattice::LatticeVector;
use crate::oracle;
use crate::root::{GradedRoot, TauFunction, ZUModule};
use crate::spinc::{self, laufer_ascent, SpincError, SpincOrbit};

/// Maximal number of decrements of `e_{j₀}` tried by the AR search.
pub const AR_DECREMENT_CAP: u32 = 64;
/// Largest period accepted for the certified stabilization bound.
pub const PERIOD_CAP: u64 = 1_000_000;
/// Window length of the uncertified stabilization heuristic.
pub const HEURISTIC_WINDOW: usize = 64;
/// Hard limit on the length of a heuristic τ computation.
pub const HEURISTIC_LIMIT: usize = 200_000;
/// Point cap used when the classification falls back to the oracle.
pub const CLASSIFY_ORACLE_CAP: usize = 2_000_000;

/// Errors of the AR engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArError {
    /// No vertex certifies the graph as almost rational.
    #[error("graph is not almost rational at any vertex within {bound} decrements")]
    NotAr {
        /// Decrement cap used by the search.
        bound: u32,
    },
    /// Spin^c enumeration failed.
    #[error(transparent)]
    Spinc(#[from] SpincError),
    /// Oracle enumeration failed.
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

/// Witness that replacing `e_{j₀}` by `e'_{j₀} ≤ e_{j₀}` gives a rational
/// graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArCertificate {
    /// Internal index of `j₀`.
    pub vertex: usize,
    /// The decoration `e'_{j₀}`.
    pub e_prime: i64,
}

/// Kinds of the classification, tested in this order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ClassificationKind {
    /// `χ(x_min) = 1`.
    Rational,
    /// `χ(x_min) = 0`; `l` is the number of `T₀(1)` summands of the
    /// canonical module.
    WeaklyElliptic {
        /// Length of the elliptic sequence.
        l: u64,
    },
    /// Almost rational at the certified vertex.
    Ar,
    /// No vertex certified within the decrement cap.
    NotArCertifiedUpTo {
        /// The cap.
        bound: u32,
    },
    /// Weakly elliptic invariants could not be determined.
    Unknown,
}

/// Classification of a graph together with an AR certificate if one was
/// found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    /// The kind.
    #[serde(flatten)]
    pub kind: ClassificationKind,
    /// The AR vertex, when the graph is certified almost rational.
    pub certificate: Option<ArCertificate>,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            ClassificationKind::Rational => write!(f, "Rational"),
            ClassificationKind::WeaklyElliptic { l } => write!(f, "WeaklyElliptic l={l}"),
            ClassificationKind::Ar => write!(f, "AR"),
            ClassificationKind::NotArCertifiedUpTo { bound } => {
                write!(f, "NotARCertifiedUpTo({bound})")
            }
            ClassificationKind::Unknown => write!(f, "Unknown"),
        }?;
        if let Some(c) = &self.certificate {
            write!(f, " [AR vertex index {} with e'={}]", c.vertex, c.e_prime)?;
        }
        Ok(())
    }
}

/// Artin's fundamental cycle: Laufer ascent from `b_start`.
pub fn fundamental_cycle_from(graph: &PlumbingGraph, start: usize) -> LatticeVector {
    let s = graph.len();
    laufer_ascent(graph, LatticeVector::basis(s, start), &vec![0; s], |_| true)
}

/// Artin's fundamental cycle `x_min`.
pub fn fundamental_cycle(graph: &PlumbingGraph) -> LatticeVector {
    fundamental_cycle_from(graph, 0)
}

/// `χ_K(x_min)`.
pub fn chi_of_fundamental_cycle(graph: &PlumbingGraph) -> i64 {
    graph.canonical_class().chi(graph, &fundamental_cycle(graph))
}

/// Laufer's criterion: the graph is rational iff `χ(x_min) = 1`.
pub fn is_rational(graph: &PlumbingGraph) -> bool {
    chi_of_fundamental_cycle(graph) == 1
}

/// Searches the vertices in order for an AR certificate.
///
/// For a candidate `j₀` the decoration is lowered one step at a time. Once
/// the fundamental cycle of the modified graph has coefficient 1 at `j₀`,
/// Laufer's sequence started at `b_{j₀}` never returns to `j₀`, so further
/// decrements cannot change its outcome and the vertex is abandoned.
pub fn find_ar_vertex(graph: &PlumbingGraph) -> Option<ArCertificate> {
    (0..graph.len()).find_map(|j0| ar_certificate_at(graph, j0))
}

/// The AR certificate at a given vertex, if any.
pub fn ar_certificate_at(graph: &PlumbingGraph, j0: usize) -> Option<ArCertificate> {
    let e0 = graph.euler(j0);
    for dec in 0..=i64::from(AR_DECREMENT_CAP) {
        let modified = graph
            .with_euler(j0, e0 - dec)
            .expect("decreasing a decoration preserves negative definiteness");
        let x = fundamental_cycle_from(&modified, j0);
        if modified.canonical_class().chi(&modified, &x) == 1 {
            return Some(ArCertificate {
                vertex: j0,
                e_prime: e0 - dec,
            });
        }
        if x[j0] == 1 {
            return None;
        }
    }
    None
}

/// Classifies the graph: rational, weakly elliptic, AR or not certified.
pub fn classify(graph: &PlumbingGraph) -> Classification {
    let chi = chi_of_fundamental_cycle(graph);
    if chi == 1 {
        return Classification {
            kind: ClassificationKind::Rational,
            certificate: Some(ArCertificate {
                vertex: 0,
                e_prime: graph.euler(0),
            }),
        };
    }
    let certificate = find_ar_vertex(graph);
    if chi == 0 {
        let l = match certificate {
            Some(c) => {
                let orbit = spinc::canonical_orbit(graph);
                Some(compute_tau(graph, c.vertex, &orbit).root().module().finite_rank())
            }
            None => oracle::enumerate_sublevel(
                graph,
                &graph.canonical_class(),
                0,
                CLASSIFY_ORACLE_CAP,
            )
            .ok()
            .map(|cx| cx.component_count() as u64 - 1),
        };
        return Classification {
            kind: l.map_or(ClassificationKind::Unknown, |l| ClassificationKind::WeaklyElliptic { l }),
            certificate,
        };
    }
    Classification {
        kind: if certificate.is_some() {
            ClassificationKind::Ar
        } else {
            ClassificationKind::NotArCertifiedUpTo {
                bound: AR_DECREMENT_CAP,
            }
        },
        certificate,
    }
}

/// Incremental generator of the cycles `x(0), x(1), …` for a vertex `j₀`.
pub struct XSequence<'a> {
    graph: &'a PlumbingGraph,
    j0: usize,
    pairings: Vec<i64>,
    current: LatticeVector,
}

impl<'a> XSequence<'a> {
    /// Starts the sequence for the orbit with pairings `(l', b_j)`.
    pub fn new(graph: &'a PlumbingGraph, j0: usize, pairings: &[i64]) -> Self {
        let s = graph.len();
        let x0 = laufer_ascent(graph, LatticeVector::zero(s), pairings, |j| j != j0);
        XSequence {
            graph,
            j0,
            pairings: pairings.to_vec(),
            current: x0,
        }
    }

    /// The current cycle `x(i)`.
    pub fn current(&self) -> &LatticeVector {
        &self.current
    }

    /// `(x(i) + l', b_{j₀})`.
    pub fn pairing_at_vertex(&self) -> i64 {
        self.graph.pairing_with_basis(&self.current, self.j0) + self.pairings[self.j0]
    }

    /// `Δτ(i) = 1 − (x(i) + l', b_{j₀})`.
    pub fn increment(&self) -> i64 {
        1 - self.pairing_at_vertex()
    }

    /// Advances to `x(i + 1)`: ascent over `J*` from `x(i) + b_{j₀}`.
    pub fn advance(&mut self) {
        let mut x = std::mem::replace(&mut self.current, LatticeVector::zero(0));
        x.add_basis(self.j0, 1);
        let j0 = self.j0;
        self.current = laufer_ascent(self.graph, x, &self.pairings, |j| j != j0);
    }
}

/// `x(0), …, x(i_max)`.
pub fn x_sequence(
    graph: &PlumbingGraph,
    j0: usize,
    orbit: &SpincOrbit,
    i_max: usize,
) -> Vec<LatticeVector> {
    let mut seq = XSequence::new(graph, j0, &orbit.pairings);
    let mut out = Vec::with_capacity(i_max + 1);
    out.push(seq.current().clone());
    for _ in 0..i_max {
        seq.advance();
        out.push(seq.current().clone());
    }
    out
}

/// Period data for `j₀`: with `c` the common denominator of `g_{j₀}`, the
/// cycle `D = −c·g_{j₀} ∈ L` pairs to zero with every `b_j`, `j ≠ j₀`, so
/// `x(i + P) = x(i) + D` with `P = D_{j₀}` and `Δτ(i + P) = Δτ(i) + c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Periodicity {
    /// `P`.
    pub period: u64,
    /// `c`.
    pub step: u64,
    /// `D = −c·g_{j₀}`.
    pub shift: LatticeVector,
}

/// The periodicity data of vertex `j0`, if `P` fits the cap.
pub fn periodicity(graph: &PlumbingGraph, j0: usize) -> Option<Periodicity> {
    let g = graph.dual_basis(j0);
    let c = common_denominator(g.coeffs().iter());
    let cq = Rational::from_integer(c.clone());
    let shift: Option<Vec<i64>> = g.coeffs().iter().map(|v| (-(v * &cq)).to_integer().to_i64()).collect();
    let shift = LatticeVector::new(shift?);
    let period = u64::try_from(shift[j0]).ok()?;
    if period == 0 || period > PERIOD_CAP {
        return None;
    }
    Some(Periodicity {
        period,
        step: c.to_u64()?,
        shift,
    })
}

/// The τ-function of an orbit at an AR vertex `j₀`, truncated at the first
/// index after which it is non-decreasing.
///
/// The bound is certified through [`periodicity`]: the increments over one
/// period determine all later increments, so the last negative increment
/// is known exactly. If the period is too large the stabilization is
/// detected heuristically and the result is flagged uncertified.
pub fn compute_tau(graph: &PlumbingGraph, j0: usize, orbit: &SpincOrbit) -> TauFunction {
    let mut seq = XSequence::new(graph, j0, &orbit.pairings);
    let tau0 = orbit.k_r().chi(graph, seq.current());
    match periodicity(graph, j0) {
        Some(per) => {
            let p = per.period as usize;
            let c = per.step as i64;
            let mut incs = Vec::with_capacity(p);
            for _ in 0..p {
                incs.push(seq.increment());
                seq.advance();
            }
            // Last index with a negative increment, over all residues.
            let mut last_bad: Option<u64> = None;
            for (r, &d) in incs.iter().enumerate() {
                if d < 0 {
                    let m = ((-d) as u64).div_ceil(c as u64) - 1;
                    let idx = r as u64 + m * per.period;
                    last_bad = Some(last_bad.map_or(idx, |b| b.max(idx)));
                }
            }
            let i_star = last_bad.map_or(0, |b| b as usize + 1);
            while incs.len() < i_star {
                let i = incs.len();
                let d = incs[i - p] + c;
                if cfg!(debug_assertions) {
                    debug_assert_eq!(d, seq.increment());
                    seq.advance();
                }
                incs.push(d);
            }
            incs.truncate(i_star);
            TauFunction::from_increments(tau0, &incs, true)
        }
        None => heuristic_tau(&mut seq, tau0),
    }
}

/// Uncertified stabilization: stop once the increments have been
/// non-negative and the difference vectors `x(i+1) − x(i)` periodic
/// throughout a full window.
fn heuristic_tau(seq: &mut XSequence<'_>, tau0: i64) -> TauFunction {
    let w = HEURISTIC_WINDOW;
    let mut incs = Vec::new();
    let mut diffs: Vec<LatticeVector> = Vec::new();
    while incs.len() < HEURISTIC_LIMIT {
        incs.push(seq.increment());
        let before = seq.current().clone();
        seq.advance();
        diffs.push(seq.current() - &before);
        let n = incs.len();
        if n >= 2 * w && incs[n - w..].iter().all(|&d| d >= 0) {
            let window = &diffs[n - w..];
            let periodic = (1..=w / 2).any(|p| (p..w).all(|t| window[t] == window[t - p]));
            if periodic {
                break;
            }
        }
    }
    let last_bad = incs.iter().rposition(|&d| d < 0);
    incs.truncate(last_bad.map_or(0, |b| b + 1));
    TauFunction::from_increments(tau0, &incs, false)
}

/// Heegaard Floer data of one spin^c orbit of an AR graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArReport {
    /// Orbit index.
    pub orbit: usize,
    /// `l'_{[k]}` in b-coordinates.
    #[serde(with = "crate::arith::serde_pq::vec")]
    pub l_prime: Vec<Rational>,
    /// `(l'_{[k]}, b_j)`.
    pub pairings: Vec<i64>,
    /// `d(M, [k]) = (k_r² + s)/4 − 2·min τ`.
    #[serde(with = "crate::arith::serde_pq")]
    pub d: Rational,
    /// Rank of the reduced module.
    pub rank_red: u64,
    /// `χ(HF⁺(−M, [k])) = rank_red`.
    pub chi_hf: i64,
    /// `sw^{OSz}(M, [k]) = χ(HF⁺(M, [k])) − d(M, [k])/2 = −rank_red − d/2`.
    #[serde(with = "crate::arith::serde_pq")]
    pub sw_osz: Rational,
    /// `min τ = min χ_{k_r}`.
    pub min_tau: i64,
    /// `k_r² + s`.
    #[serde(with = "crate::arith::serde_pq")]
    pub k_r_squared_plus_s: Rational,
    /// The τ values `τ(0..=i*)`.
    pub tau: Vec<i64>,
    /// Whether the τ truncation is certified.
    pub certified: bool,
    /// The absolutely graded module `H⁺(Γ, [k]) = H(R)[−(k_r² + s)/4]`.
    pub module: ZUModule,
    /// The graded root `(R_{k_r}, χ_{k_r})`.
    #[serde(skip)]
    pub root: GradedRoot,
    /// The τ-function.
    #[serde(skip)]
    pub tau_function: TauFunction,
}

impl ArReport {
    /// Degree shift `−(k_r² + s)/4` between relative and absolute module.
    pub fn degree_shift(&self) -> Rational {
        -&self.k_r_squared_plus_s / int(4)
    }
}

/// Analyzes one orbit using the AR vertex `j₀`.
pub fn analyze_orbit(graph: &PlumbingGraph, j0: usize, orbit: &SpincOrbit) -> ArReport {
    let tau = compute_tau(graph, j0, orbit);
    let root = tau.root();
    let k2s = spinc::k_r_squared_plus_s(graph, orbit);
    let shift = -&k2s / int(4);
    let module = root.module().shifted(&shift);
    let (rank_red, min_tau) = tau.rank_red();
    let d = &k2s / int(4) - int(2 * min_tau);
    let rank_q = Rational::from_integer(BigInt::from(rank_red));
    let sw_osz = -rank_q - &d / int(2);
    ArReport {
        orbit: orbit.index,
        l_prime: orbit.l_prime().coeffs().to_vec(),
        pairings: orbit.pairings.clone(),
        d,
        rank_red,
        chi_hf: rank_red as i64,
        sw_osz,
        min_tau,
        k_r_squared_plus_s: k2s,
        tau: tau.values().to_vec(),
        certified: tau.certified(),
        module,
        root,
        tau_function: tau,
    }
}

/// Full analysis of an AR graph: classification and one report per orbit.
#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    /// The classification.
    pub classification: Classification,
    /// `|H|`.
    pub order: String,
    /// Casson–Walker invariant `λ(M)`.
    pub casson_walker: String,
    /// Per-orbit reports in orbit order.
    pub orbits: Vec<ArReport>,
}

impl Analysis {
    /// `Σ_{[k]} sw^{OSz}`; equals `λ(M)` for AR graphs.
    pub fn sw_sum(&self) -> Rational {
        self.orbits.iter().fold(Rational::zero(), |acc, r| acc + &r.sw_osz)
    }
}

/// Classifies the graph and analyzes every spin^c orbit (in parallel,
/// merged in orbit order).
pub fn analyze(graph: &PlumbingGraph) -> Result<Analysis, ArError> {
    let classification = classify(graph);
    let cert = classification.certificate.ok_or(ArError::NotAr {
        bound: AR_DECREMENT_CAP,
    })?;
    let orbits = spinc::enumerate_spinc(graph)?;
    let reports = orbits
        .par_iter()
        .map(|o| analyze_orbit(graph, cert.vertex, o))
        .collect();
    Ok(Analysis {
        classification,
        order: graph.order().to_string(),
        casson_walker: to_pq(&graph.casson_walker()),
        orbits: reports,
    })
}
