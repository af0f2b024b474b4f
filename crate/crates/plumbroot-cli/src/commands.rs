//! Subcommand implementations. Every command builds its complete output in
//! memory before anything is written.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_integer::Integer;
use plumbroot::ar::{analyze, is_rational, Analysis, ArError, ArReport};
use plumbroot::arith::{to_f64, to_pq};
use plumbroot::enumerate::sublevel_points;
use plumbroot::lens::{lens_invariants, lens_table, torsion_fourier_f64, LensInvariants, LensSpace};
use plumbroot::oracle::root_oracle;
use plumbroot::root::GradedRoot;
use plumbroot::seifert::{verify_sw_identity, SeifertError, SeifertReport};
use plumbroot::spinc::{enumerate_spinc, k_r_squared_plus_s, SpincOrbit};
use plumbroot::{catalog, PlumbingGraph, Rational};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::args::{
    AnalyzeArgs, GraphInput, LensArgs, OracleArgs, OracleCaps, OrbitSelection, RootArgs, SeifertData, VerifyArgs,
    VerifySuite,
};
use crate::output::{write_all_atomically, Report, Table};

/// Tolerance of the numeric lens torsion check in `verify lens`.
pub const LENS_FOURIER_TOLERANCE: f64 = 1e-9;

/// Failures with a dedicated exit code.
#[derive(Debug, Error)]
pub enum Failure {
    /// The graph is not certified almost rational.
    #[error("{0}; the `oracle` subcommand computes roots of small graphs without this restriction")]
    NotAr(ArError),
    /// A verification suite found a counterexample.
    #[error("verification failed: {0}")]
    Mismatch(String),
}

/// The outcome of a subcommand: a report to print, or files already written.
pub enum Outcome {
    Report(Report),
    Written(Report),
}

/// A loaded graph with a name used for file prefixes.
struct NamedGraph {
    graph: PlumbingGraph,
    name: String,
}

fn load_graph_file(path: &Path) -> Result<NamedGraph> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).context("cannot read the graph from stdin")?
    } else {
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?
    };
    let graph = PlumbingGraph::from_json(&text).with_context(|| format!("in {}", path.display()))?;
    let name = path.file_stem().map_or("graph".into(), |s| s.to_string_lossy().into_owned());
    Ok(NamedGraph { graph, name })
}

fn load_graph(input: &GraphInput) -> Result<NamedGraph> {
    match (&input.graph, &input.catalog) {
        (Some(path), _) => load_graph_file(path),
        (None, Some(name)) => Ok(NamedGraph {
            graph: catalog::by_name(name).with_context(|| format!("unknown catalog graph {name}"))?,
            name: name.clone(),
        }),
        (None, None) => bail!("no graph given"),
    }
}

fn select<T>(items: Vec<T>, selection: &OrbitSelection) -> Result<Vec<T>> {
    let Some(wanted) = &selection.orbits else {
        return Ok(items);
    };
    let n = items.len();
    if let Some(bad) = wanted.iter().find(|&&i| i >= n) {
        bail!("orbit {bad} does not exist: the graph has {n} orbits");
    }
    let mut slots: Vec<Option<T>> = items.into_iter().map(Some).collect();
    wanted
        .iter()
        .map(|&i| slots[i].take().with_context(|| format!("orbit {i} selected twice")))
        .collect()
}

fn analyze_graph(graph: &PlumbingGraph) -> Result<Analysis> {
    analyze(graph).map_err(|e| match e {
        ArError::NotAr { .. } => Failure::NotAr(e).into(),
        other => anyhow::Error::new(other),
    })
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.into()
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let NamedGraph { graph, .. } = load_graph(&args.input)?;
    let analysis = analyze_graph(&graph)?;
    let total = analysis.orbits.len();
    let sw_ok = analysis.sw_sum() == graph.casson_walker();
    let orbits = select(analysis.orbits.clone(), &args.selection)?;
    let summary = vec![
        format!("classification: {}", analysis.classification),
        format!("|H|: {}", analysis.order),
        format!("casson_walker: {}", analysis.casson_walker),
        format!("orbits: {total}"),
        format!("sum of sw equals casson_walker: {}", yes_no(sw_ok)),
    ];
    let mut table = Table::new(&["orbit", "d", "rank_red", "chi_hf", "sw_osz", "min_tau", "certified", "module"]);
    for r in &orbits {
        table.push(vec![
            r.orbit.to_string(),
            to_pq(&r.d),
            r.rank_red.to_string(),
            r.chi_hf.to_string(),
            to_pq(&r.sw_osz),
            r.min_tau.to_string(),
            r.certified.to_string(),
            r.module.to_string(),
        ]);
    }
    let json = Analysis { orbits, ..analysis };
    Ok(Outcome::Report(Report::new(summary, table, json)?))
}

/// The oracle root of one orbit, `depth` levels above the minimum of χ.
fn oracle_root(graph: &PlumbingGraph, orbit: &SpincOrbit, caps: &OracleCaps) -> Result<(GradedRoot, i64)> {
    let k = orbit.k_r();
    let points = sublevel_points(graph, k.values(), 0, caps.point_cap)?;
    let min = points.iter().map(|x| k.chi(graph, x)).min().unwrap_or(0);
    let root = root_oracle(graph, k, min + caps.depth, caps.point_cap)?;
    Ok((root, min))
}

pub fn cmd_root(args: &RootArgs) -> Result<Outcome> {
    let NamedGraph { graph, name } = load_graph(&args.input)?;
    let prefix = args.prefix.clone().unwrap_or(name);
    let mut roots: Vec<(usize, GradedRoot, Rational)> = Vec::new();
    if args.oracle {
        for o in select(enumerate_spinc(&graph)?, &args.selection)? {
            let (root, _) = oracle_root(&graph, &o, &args.caps)?;
            roots.push((o.index, root, -k_r_squared_plus_s(&graph, &o) / Rational::from_integer(4.into())));
        }
    } else {
        for r in select(analyze_graph(&graph)?.orbits, &args.selection)? {
            let shift = r.degree_shift();
            roots.push((r.orbit, r.root, shift));
        }
    }
    let mut table = Table::new(&["orbit", "file", "vertices", "min_chi"]);
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    for (orbit, root, shift) in &roots {
        let stem = format!("{prefix}-orbit{orbit}");
        let path = args.out_dir.join(format!("{stem}.dot"));
        table.push(vec![
            orbit.to_string(),
            path.display().to_string(),
            root.vertices().len().to_string(),
            root.min_chi().to_string(),
        ]);
        files.push((path, root.to_dot(&stem, shift)));
    }
    std::fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    write_all_atomically(&files)?;
    let listing: Vec<_> = files.iter().map(|(p, _)| p.display().to_string()).collect();
    let source = if args.oracle { "oracle" } else { "engine" };
    let summary = vec![format!("wrote {} DOT files ({source} roots)", files.len())];
    Ok(Outcome::Written(Report::new(summary, table, json!({ "source": source, "files": listing }))?))
}

#[derive(Serialize)]
struct OracleOrbit {
    orbit: usize,
    min_chi: i64,
    top_level: i64,
    counts: Vec<(i64, usize)>,
    canonical_form: String,
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<Outcome> {
    let NamedGraph { graph, .. } = load_graph(&args.input)?;
    let orbits = select(enumerate_spinc(&graph)?, &args.selection)?;
    let mut table = Table::new(&["orbit", "min_chi", "components_at_min", "vertices"]);
    let mut summary = vec![format!("|H|: {}", graph.order()), format!("depth: {}", args.caps.depth)];
    let mut json = Vec::new();
    for o in &orbits {
        let (root, min) = oracle_root(&graph, o, &args.caps)?;
        let top = min + args.caps.depth;
        table.push(vec![
            o.index.to_string(),
            min.to_string(),
            root.count_at(min).to_string(),
            root.vertices().len().to_string(),
        ]);
        summary.push(format!("orbit {}:\n{}", o.index, root.to_text().trim_end()));
        json.push(OracleOrbit {
            orbit: o.index,
            min_chi: min,
            top_level: top,
            counts: (min..=top).map(|n| (n, root.count_at(n))).collect(),
            canonical_form: root.canonical_form(),
        });
    }
    Ok(Outcome::Report(Report::new(summary, table, json)?))
}

fn lens_report(lens: &LensSpace, rows: Vec<LensInvariants>) -> Result<Report> {
    let first = rows.first().context("no spin^c structure selected")?;
    let summary = vec![
        format!("L({}, {})", lens.p(), lens.q()),
        format!("continued fraction: {:?}", lens.cf()),
        format!("casson_walker: {}", to_pq(&first.lambda)),
    ];
    let mut table = Table::new(&["p", "q", "a", "d", "rank_red", "torsion", "lambda"]);
    for r in &rows {
        table.push(vec![
            r.p.to_string(),
            r.q.to_string(),
            r.a.to_string(),
            to_pq(&r.d),
            r.rank_red.to_string(),
            to_pq(&r.torsion),
            to_pq(&r.lambda),
        ]);
    }
    Report::new(summary, table, rows)
}

pub fn cmd_lens(args: &LensArgs) -> Result<Outcome> {
    let lens = LensSpace::new(args.p, args.q)?;
    let rows = if args.table {
        lens_table(&lens)
    } else {
        vec![lens_invariants(&lens, args.spinc.unwrap_or(0))?]
    };
    Ok(Outcome::Report(lens_report(&lens, rows)?))
}

fn seifert_failure(e: SeifertError) -> anyhow::Error {
    match e {
        SeifertError::IdentityViolated(_)
        | SeifertError::CountMismatch { .. }
        | SeifertError::RepresentativeMismatch { .. }
        | SeifertError::NonIntegralExponent(_) => Failure::Mismatch(e.to_string()).into(),
        other => anyhow::Error::new(other),
    }
}

fn seifert_report(data: &SeifertData) -> Result<(SeifertReport, Report)> {
    let datum = plumbroot::seifert::SeifertData::new(data.e0, data.legs.clone())?;
    let report = verify_sw_identity(&datum).map_err(seifert_failure)?;
    let legs: Vec<String> = report.legs.iter().map(|l| l.to_string()).collect();
    let summary = vec![
        format!("e0: {}, legs: {}", report.e0, legs.join(" ")),
        format!("e: {}", to_pq(&report.e)),
        format!("epsilon: {}", to_pq(&report.epsilon)),
        format!("|H|: {}", report.order),
        format!("K^2+s: {}", to_pq(&report.k_squared_plus_s)),
        format!("casson_walker: {}", to_pq(&report.lambda)),
        format!("dp: {}", report.dp),
    ];
    let mut table = Table::new(&[
        "spinc",
        "d",
        "rank_red",
        "chi_hf",
        "sw_osz",
        "min_tau",
        "certified",
        "torsion",
        "sw_tcw",
        "limit",
        "limit_approx",
    ]);
    for o in &report.orbits {
        table.push(vec![
            o.spinc.to_string(),
            to_pq(&o.d),
            o.rank_red.to_string(),
            o.chi_hf.to_string(),
            to_pq(&o.sw_osz),
            o.min_tau.to_string(),
            o.certified.to_string(),
            to_pq(&o.torsion),
            to_pq(&o.sw_tcw),
            to_pq(&o.limit),
            format!("{:.12e}", o.limit_approx),
        ]);
    }
    let rendered = Report::new(summary, table, &report)?;
    Ok((report, rendered))
}

pub fn cmd_seifert(data: &SeifertData) -> Result<Outcome> {
    Ok(Outcome::Report(seifert_report(data)?.1))
}

fn mismatch(msg: String) -> anyhow::Error {
    Failure::Mismatch(msg).into()
}

fn verify_lens(p_max: i64) -> Result<Report> {
    let (mut spaces, mut structures, mut worst) = (0usize, 0usize, 0f64);
    for p in 2..=p_max {
        for q in (1..p).filter(|q| q.gcd(&p) == 1) {
            let lens = LensSpace::new(p, q)?;
            let table = lens_table(&lens);
            let numeric = torsion_fourier_f64(&lens);
            let lambda_graph = lens.graph().casson_walker();
            let total: Rational = table.iter().map(|i| i.torsion.clone()).sum();
            if total != Rational::from_integer(0.into()) {
                return Err(mismatch(format!("L({p},{q}): torsion sums to {}", to_pq(&total))));
            }
            for inv in &table {
                if !inv.identity_holds() {
                    return Err(mismatch(format!("L({p},{q}) a={}: {}", inv.a, serde_json::to_string(inv)?)));
                }
                if inv.lambda != lambda_graph {
                    return Err(mismatch(format!(
                        "L({p},{q}): closed-form λ {} differs from the plumbing value {}",
                        to_pq(&inv.lambda),
                        to_pq(&lambda_graph)
                    )));
                }
                let err = (numeric[inv.a as usize] - to_f64(&inv.torsion)).abs();
                worst = worst.max(err);
                if err >= LENS_FOURIER_TOLERANCE {
                    return Err(mismatch(format!("L({p},{q}) a={}: Fourier sum off by {err:e}", inv.a)));
                }
            }
            spaces += 1;
            structures += table.len();
        }
    }
    let summary = vec![format!(
        "verified {spaces} lens spaces with p ≤ {p_max}, {structures} structures; worst Fourier error {worst:.1e}"
    )];
    let json = json!({ "p_max": p_max, "spaces": spaces, "structures": structures, "worst_fourier_error_approx": worst });
    Report::new(summary, Table::default(), json)
}

fn verify_oracle(path: &Path, caps: &OracleCaps) -> Result<Report> {
    let NamedGraph { graph, .. } = load_graph_file(path)?;
    let analysis = analyze_graph(&graph)?;
    if analysis.sw_sum() != graph.casson_walker() {
        return Err(mismatch(format!(
            "sum of sw is {}, casson_walker is {}",
            to_pq(&analysis.sw_sum()),
            to_pq(&graph.casson_walker())
        )));
    }
    let rational = is_rational(&graph);
    let canonical_ray = analysis.orbits[0].rank_red == 0 && analysis.orbits[0].min_tau == 0;
    if rational && !canonical_ray {
        return Err(mismatch("rational graph with a non-trivial canonical root".into()));
    }
    let orbits = enumerate_spinc(&graph)?;
    let mut table = Table::new(&["orbit", "min_tau", "levels", "agree"]);
    for (o, r) in orbits.iter().zip(&analysis.orbits) {
        let top = r.min_tau + caps.depth;
        let oracle = root_oracle(&graph, o.k_r(), top, caps.point_cap)?;
        if oracle.truncated(top) != r.root.truncated(top) {
            return Err(mismatch(orbit_dump(r, &oracle, top)));
        }
        table.push(vec![r.orbit.to_string(), r.min_tau.to_string(), format!("{}..={top}", r.min_tau), "yes".into()]);
    }
    let summary = vec![
        format!("classification: {}", analysis.classification),
        format!("engine and oracle agree on all {} orbits", orbits.len()),
    ];
    let json = json!({ "orbits": orbits.len(), "depth": caps.depth, "agree": true });
    Report::new(summary, table, json)
}

fn orbit_dump(r: &ArReport, oracle: &GradedRoot, top: i64) -> String {
    format!(
        "orbit {} (pairings {:?}) up to level {top}\nengine:\n{}oracle:\n{}",
        r.orbit,
        r.pairings,
        r.root.truncated(top).to_text(),
        oracle.truncated(top).to_text()
    )
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let report = match (&args.suite, &args.oracle) {
        (Some(VerifySuite::Lens { p_max }), _) => verify_lens(*p_max)?,
        (Some(VerifySuite::Seifert(data)), _) => {
            let (_, mut report) = seifert_report(data)?;
            report.summary.insert(0, "all Seifert identities hold".into());
            report
        }
        (None, Some(path)) => verify_oracle(path, &args.caps)?,
        (None, None) => bail!("choose a suite: `verify lens P_MAX`, `verify seifert --e0 .. --leg ..` or `verify --oracle GRAPH`"),
    };
    Ok(Outcome::Report(report))
}
