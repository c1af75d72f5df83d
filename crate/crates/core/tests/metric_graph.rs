use std::sync::Arc;

use ccl_core::combing::{CanonicalCombing, Combing};
use ccl_core::graph::io::{parse_graph, write_graph};
use ccl_core::graph::{ball, GraphBuilder, GraphPoint, MetricGraph};
use ccl_core::rational::{q, qi, Q};
use proptest::prelude::*;

fn graph_from(n: usize, edges: &[(usize, usize, i64, i64)]) -> MetricGraph {
    let mut b = GraphBuilder::with_vertices(n);
    for &(u, v, p, d) in edges {
        if u != v {
            b.add_edge(u, v, q(p as i128, d as i128)).unwrap();
        }
    }
    b.build()
}

/// All-pairs distances by Floyd-Warshall over rationals.
fn floyd(n: usize, edges: &[(usize, usize, i64, i64)]) -> Vec<Vec<Option<Q>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(qi(0));
    }
    for &(u, v, p, den) in edges {
        if u == v {
            continue;
        }
        let len = q(p as i128, den as i128);
        for (a, b) in [(u, v), (v, u)] {
            if d[a][b].is_none_or(|x| len < x) {
                d[a][b] = Some(len);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|x| a + b < x) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

fn edges_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize, i64, i64)>)> {
    (2usize..9).prop_flat_map(|n| {
        let edge = (0..n, 0..n, 1i64..7, prop_oneof![Just(1i64), Just(2), Just(3)]);
        (Just(n), prop::collection::vec(edge, 0..(2 * n)))
    })
}

proptest! {
    #[test]
    fn dijkstra_matches_floyd_warshall((n, edges) in edges_strategy()) {
        let g = graph_from(n, &edges);
        let oracle = floyd(n, &edges);
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(g.dist(u, v).ok(), oracle[u][v]);
            }
        }
    }

    #[test]
    fn canonical_lines_have_geodesic_prefixes((n, edges) in edges_strategy()) {
        let g = Arc::new(graph_from(n, &edges));
        let comb = CanonicalCombing::new(g.clone());
        for u in 0..n {
            for v in 0..n {
                let Ok(d) = g.dist(u, v) else { continue };
                let p = comb.line(u, v).unwrap();
                prop_assert_eq!(p.length(), d);
                prop_assert_eq!(p.start(), &GraphPoint::Vertex(u));
                prop_assert_eq!(p.end(), &GraphPoint::Vertex(v));
                // Every prefix of a geodesic is a geodesic.
                let seq = p.vertex_sequence().unwrap();
                for (i, &w) in seq.iter().enumerate() {
                    prop_assert_eq!(g.dist(u, w).unwrap(), p.cumulative()[i]);
                }
            }
        }
    }

    #[test]
    fn interchange_round_trip((n, edges) in edges_strategy()) {
        let g = graph_from(n, &edges);
        let text = write_graph(&g);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(write_graph(&back), text);
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(g.dist(u, v).ok(), back.dist(u, v).ok());
            }
        }
    }

    #[test]
    fn evaluation_is_proportional_to_arclength((n, edges) in edges_strategy(), k in 0i128..=8) {
        let g = Arc::new(graph_from(n, &edges));
        let comb = CanonicalCombing::new(g.clone());
        let t = q(k, 8);
        for v in 1..n {
            let Ok(d) = g.dist(0, v) else { continue };
            let p = comb.line(0, v).unwrap();
            let x = p.eval(&g, t).unwrap();
            prop_assert_eq!(g.point_distance(&GraphPoint::Vertex(0), &x).unwrap(), t * d);
            prop_assert_eq!(g.point_distance(&x, &GraphPoint::Vertex(v)).unwrap(), (qi(1) - t) * d);
        }
    }
}

#[test]
fn square_tie_break_goes_through_the_smaller_vertex() {
    let g = Arc::new(graph_from(4, &[(0, 1, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1), (3, 0, 1, 1)]));
    let p = CanonicalCombing::new(g).line(0, 2).unwrap();
    assert_eq!(p.vertex_sequence().unwrap(), vec![0, 1, 2]);
}

#[test]
fn disconnected_pairs_are_errors() {
    let g = graph_from(3, &[(0, 1, 1, 1)]);
    assert!(g.dist(0, 2).is_err());
    assert!(!g.is_connected());
}

#[test]
fn rejects_bad_edges() {
    let mut b = GraphBuilder::with_vertices(2);
    assert!(b.add_edge(0, 1, qi(0)).is_err());
    assert!(b.add_edge(0, 1, qi(-1)).is_err());
    assert!(b.add_edge(0, 5, qi(1)).is_err());
}

#[test]
fn parse_errors_are_reported() {
    assert!(parse_graph("this is not a graph").is_err());
}

#[test]
fn safe_core_distances_agree_with_the_ambient_graph() {
    // A 12-cycle with one chord; the ball around 0 cuts the cycle open.
    let mut edges: Vec<(usize, usize, i64, i64)> = (0..12).map(|i| (i, (i + 1) % 12, 1, 1)).collect();
    edges.push((3, 9, 5, 2));
    let g = graph_from(12, &edges);
    let b = ball(&g, 0, qi(4)).unwrap();
    let core = b.default_core();
    assert!(core.contains(&b.center));
    for &u in &core {
        for &v in &core {
            assert_eq!(b.graph.dist(u, v).unwrap(), g.dist(b.to_parent[u], b.to_parent[v]).unwrap());
        }
    }
}
