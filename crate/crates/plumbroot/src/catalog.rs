//! Named plumbing graphs used throughout the tests, the acceptance suite
//! and the CLI.

use crate::graph::PlumbingGraph;

fn build(vertices: &[(i64, i64)], edges: &[(i64, i64)]) -> PlumbingGraph {
    PlumbingGraph::new(vertices, edges).expect("catalog graphs are valid")
}

/// The `−E8` tree, all decorations `−2`, in Bourbaki order: the chain
/// `1–3–4–5–6–7–8` with vertex `2` attached to `4`.
pub fn e8() -> PlumbingGraph {
    let vertices: Vec<(i64, i64)> = (1..=8).map(|id| (id, -2)).collect();
    build(&vertices, &[(1, 3), (3, 4), (4, 2), (4, 5), (5, 6), (6, 7), (7, 8)])
}

/// A weakly elliptic graph with elliptic sequence of length one: a `−1`
/// centre joined to `−3`, `−4` and to the chain `−4 — −2`.
pub fn elliptic_length_one() -> PlumbingGraph {
    build(
        &[(0, -1), (1, -3), (2, -4), (3, -4), (4, -2)],
        &[(0, 1), (0, 2), (0, 3), (3, 4)],
    )
}

/// A graph with two nodes that is not almost rational: the chain
/// `−2 — −1 — −13 — −1 — −2` with a `−3` attached to each `−1`.
pub fn two_node_not_ar() -> PlumbingGraph {
    build(
        &[(0, -2), (1, -1), (2, -13), (3, -1), (4, -2), (5, -3), (6, -3)],
        &[(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (3, 6)],
    )
}

/// A graph that is not almost rational although deleting either `−2`
/// vertex leaves rational components: the chain `−4 — −2 — −2 — −4` where
/// both `−2` vertices carry two further `−4` leaves.
pub fn two_node_heavy_not_ar() -> PlumbingGraph {
    build(
        &[
            (0, -4),
            (1, -2),
            (2, -2),
            (3, -4),
            (4, -4),
            (5, -4),
            (6, -4),
            (7, -4),
        ],
        &[(0, 1), (1, 2), (2, 3), (1, 4), (1, 5), (2, 6), (2, 7)],
    )
}

/// Looks a catalog graph up by name.
pub fn by_name(name: &str) -> Option<PlumbingGraph> {
    match name {
        "e8" => Some(e8()),
        "elliptic" => Some(elliptic_length_one()),
        "two-node" => Some(two_node_not_ar()),
        "two-node-heavy" => Some(two_node_heavy_not_ar()),
        _ => None,
    }
}

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &["e8", "elliptic", "two-node", "two-node-heavy"];
