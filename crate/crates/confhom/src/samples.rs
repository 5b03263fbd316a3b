//! Named example graphs used across tests, benchmarks and documentation,
//! plus a seeded random-graph generator for property suites.

use crate::graph::Graph;
use rand::Rng;

fn build(vertices: &[&str], edges: &[(&str, &str)]) -> Graph {
    Graph::from_named_edges(
        vertices.iter().map(|s| s.to_string()).collect(),
        edges
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    )
    .expect("sample graph is valid")
}

/// Star with `n` edges: center `c`, leaves `l1..ln`.
pub fn star(n: usize) -> Graph {
    let leaves: Vec<String> = (1..=n).map(|j| format!("l{j}")).collect();
    let mut vertices: Vec<String> = vec!["c".to_string()];
    vertices.extend(leaves.iter().cloned());
    let edges = leaves
        .iter()
        .map(|l| ("c".to_string(), l.clone()))
        .collect();
    Graph::from_named_edges(vertices, edges).expect("star is valid")
}

/// Path with `n` edges on vertices `p0..pn`.
pub fn path(n: usize) -> Graph {
    assert!(n >= 1);
    let vertices: Vec<String> = (0..=n).map(|j| format!("p{j}")).collect();
    let edges = (0..n)
        .map(|j| (format!("p{j}"), format!("p{}", j + 1)))
        .collect();
    Graph::from_named_edges(vertices, edges).expect("path is valid")
}

/// A single closed interval.
pub fn interval() -> Graph {
    path(1)
}

/// The H shape: two degree-3 vertices `a`, `b` joined by an edge, each
/// carrying two leaf edges.
pub fn h_graph() -> Graph {
    build(
        &["a", "b", "a1", "a2", "b1", "b2"],
        &[
            ("a", "b"),
            ("a", "a1"),
            ("a", "a2"),
            ("b", "b1"),
            ("b", "b2"),
        ],
    )
}

/// Two vertices joined by three parallel edges.
pub fn theta() -> Graph {
    build(&["a", "b"], &[("a", "b"), ("a", "b"), ("a", "b")])
}

/// Complete graph on four vertices.
pub fn k4() -> Graph {
    build(
        &["a", "b", "c", "d"],
        &[
            ("a", "b"),
            ("a", "c"),
            ("a", "d"),
            ("b", "c"),
            ("b", "d"),
            ("c", "d"),
        ],
    )
}

/// Complete bipartite graph on parts of size three.
pub fn k33() -> Graph {
    let mut edges = Vec::new();
    for u in ["u1", "u2", "u3"] {
        for w in ["w1", "w2", "w3"] {
            edges.push((u, w));
        }
    }
    build(&["u1", "u2", "u3", "w1", "w2", "w3"], &edges)
}

/// One vertex with a loop (a circle).
pub fn loop_graph() -> Graph {
    build(&["v"], &[("v", "v")])
}

/// Two vertices joined by two parallel edges (also a circle, as a space).
pub fn doubled_edge() -> Graph {
    build(&["a", "b"], &[("a", "b"), ("a", "b")])
}

/// Forest of two disjoint intervals.
pub fn two_interval_forest() -> Graph {
    build(&["p", "q", "r", "s"], &[("p", "q"), ("r", "s")])
}

/// Disjoint union of a 3-star and an interval.
pub fn s3_disjoint_interval() -> Graph {
    build(
        &["c", "l1", "l2", "l3", "p", "q"],
        &[("c", "l1"), ("c", "l2"), ("c", "l3"), ("p", "q")],
    )
}

/// The graphs exercised by the acceptance checks: all trees first, then the
/// graphs with cycles.
pub fn test_graphs() -> Vec<(&'static str, Graph)> {
    vec![
        ("interval", interval()),
        ("star3", star(3)),
        ("star4", star(4)),
        ("star5", star(5)),
        ("h-graph", h_graph()),
        ("two-interval-forest", two_interval_forest()),
        ("star3+interval", s3_disjoint_interval()),
        ("loop", loop_graph()),
        ("doubled-edge", doubled_edge()),
        ("theta", theta()),
    ]
}

/// The tree members of `test_graphs`.
pub fn tree_test_graphs() -> Vec<(&'static str, Graph)> {
    test_graphs()
        .into_iter()
        .filter(|(_, g)| g.first_betti() == 0)
        .collect()
}

/// Random connected multigraph: a random spanning tree on `vertices` nodes
/// plus `extra` random edges (loops and parallels allowed). With at most six
/// non-leaf vertices the essential count stays small.
pub fn random_connected(rng: &mut impl Rng, vertices: usize, extra: usize) -> Graph {
    assert!(vertices >= 2);
    let names: Vec<String> = (0..vertices).map(|j| format!("v{j}")).collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    for j in 1..vertices {
        let parent = rng.gen_range(0..j);
        edges.push((names[parent].clone(), names[j].clone()));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..vertices);
        let b = rng.gen_range(0..vertices);
        edges.push((names[a].clone(), names[b].clone()));
    }
    Graph::from_named_edges(names, edges).expect("random graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roster_shapes() {
        assert_eq!(star(4).vertex_count(), 5);
        assert_eq!(star(4).essential_vertices().len(), 1);
        assert_eq!(h_graph().essential_vertices().len(), 2);
        assert_eq!(theta().first_betti(), 2);
        assert_eq!(k4().first_betti(), 3);
        assert_eq!(k33().first_betti(), 4);
        assert_eq!(loop_graph().first_betti(), 1);
        assert_eq!(doubled_edge().first_betti(), 1);
        assert_eq!(two_interval_forest().components().len(), 2);
        assert_eq!(s3_disjoint_interval().components().len(), 2);
        assert_eq!(tree_test_graphs().len(), 7);
    }

    #[test]
    fn random_graphs_are_connected_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..20 {
            let vertices = 2 + (round % 5);
            let g = random_connected(&mut rng, vertices, round % 4);
            assert!(g.is_connected(), "round {round}");
            assert!(g.essential_vertices().len() <= 6);
        }
        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        assert_eq!(
            random_connected(&mut a, 5, 2).canonical_json(),
            random_connected(&mut b, 5, 2).canonical_json()
        );
    }
}
