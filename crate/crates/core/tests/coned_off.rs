use std::f64::consts::PI;
use std::sync::Arc;

use ccl_core::combing::{CanonicalCombing, Combing};
use ccl_core::coned::spherical::{SphericalCone, SphericalConedSpace, SphericalPoint, TOLERANCE};
use ccl_core::coned::{
    build_coned_space, cone_crossings, Attachment, ConeLabel, ConeMetric, ConeSpec, ConedSpace, HatCombing,
};
use ccl_core::graph::{GraphBuilder, MetricGraph};
use ccl_core::group::{cayley_ball, Group, GroupSpec};
use ccl_core::rational::{qi, Q};
use proptest::prelude::*;

fn cycle_with_chords(n: usize, chords: &[(usize, usize)]) -> MetricGraph {
    let mut b = GraphBuilder::with_vertices(n);
    for i in 0..n {
        b.add_edge(i, (i + 1) % n, qi(1)).unwrap();
    }
    for &(u, v) in chords {
        if u != v {
            b.add_edge(u, v, qi(2)).unwrap();
        }
    }
    b.build()
}

fn spec_on(base: MetricGraph, fiber: &[usize], radius: Option<Q>) -> ConeSpec {
    let base = Arc::new(base);
    let mut verts: Vec<usize> = fiber.to_vec();
    verts.sort_unstable();
    verts.dedup();
    let attachments = verts.iter().map(|&v| Attachment { vertex: v, label: 0 }).collect();
    let mut spec = ConeSpec {
        base,
        attachments,
        labels: vec![ConeLabel { name: "H".into(), metric: ConeMetric::Graph, radius: qi(1) }],
    };
    spec.labels[0].radius = radius.unwrap_or_else(|| spec.max_fiber_diameter().unwrap() + qi(1));
    spec
}

/// Floyd-Warshall on the base plus one apex per label.
fn oracle(spec: &ConeSpec) -> Vec<Vec<Option<Q>>> {
    let n = spec.base.vertex_count();
    let m = n + spec.labels.len();
    let mut d = vec![vec![None::<Q>; m]; m];
    let relax = |d: &mut Vec<Vec<Option<Q>>>, a: usize, b: usize, len: Q| {
        if d[a][b].is_none_or(|x| len < x) {
            d[a][b] = Some(len);
            d[b][a] = Some(len);
        }
    };
    for i in 0..m {
        d[i][i] = Some(qi(0));
    }
    for e in spec.base.edges() {
        relax(&mut d, e.u, e.v, e.len);
    }
    for a in &spec.attachments {
        relax(&mut d, a.vertex, n + a.label, spec.labels[a.label].radius);
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|z| x + y < z) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

fn fixture() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<usize>)> {
    (4usize..10)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..3), prop::collection::vec(0..n, 1..4)))
}

proptest! {
    #[test]
    fn coned_distances_match_floyd_warshall((n, chords, fiber) in fixture()) {
        let spec = spec_on(cycle_with_chords(n, &chords), &fiber, None);
        prop_assert!(spec.validate().passed());
        let expected = oracle(&spec);
        let sp = build_coned_space(spec).unwrap();
        let m = sp.graph.vertex_count();
        for u in 0..m {
            for v in 0..m {
                prop_assert_eq!(sp.graph.dist(u, v).ok(), expected[u][v]);
            }
        }
    }

    #[test]
    fn base_embeds_isometrically_and_lines_cross_at_most_twice((n, chords, fiber) in fixture()) {
        let spec = spec_on(cycle_with_chords(n, &chords), &fiber, None);
        let sp = Arc::new(build_coned_space(spec).unwrap());
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(sp.graph.dist(u, v).unwrap(), sp.spec.base.dist(u, v).unwrap());
            }
        }
        let comb = HatCombing::new(sp.clone(), CanonicalCombing::new(sp.spec.base.clone()));
        let m = sp.graph.vertex_count();
        for u in 0..m {
            for v in 0..m {
                let line = comb.line(u, v).unwrap();
                prop_assert_eq!(line.length(), sp.graph.dist(u, v).unwrap());
                prop_assert!(cone_crossings(&sp, &line) <= 2);
            }
        }
    }

    #[test]
    fn spherical_distance_is_the_law_of_cosines(s in 0.0f64..=1.0, t in 0.0f64..=1.0, dx in 0.0f64..10.0, r in 0.5f64..4.0) {
        let theta = dx.min(PI);
        let expected = r * (s * s + t * t - 2.0 * s * t * theta.cos()).max(0.0).sqrt();
        prop_assert!((SphericalCone::new(r).distance(s, t, dx) - expected).abs() < 1e-9);
    }
}

#[test]
fn short_cones_fail_validation() {
    let spec = spec_on(cycle_with_chords(8, &[]), &[0, 4], Some(qi(1)));
    assert!(!spec.validate().passed());
    assert!(build_coned_space(spec).is_err());
}

#[test]
fn cone_spec_interchange_round_trip() {
    let spec = spec_on(cycle_with_chords(6, &[(0, 3)]), &[1, 2, 5], None);
    let text = spec.to_interchange();
    let back = ConeSpec::from_interchange(&text).unwrap();
    assert_eq!(back.to_interchange(), text);
    assert_eq!(back.attachments, spec.attachments);
    assert_eq!(back.labels, spec.labels);
}

#[test]
fn coset_cones_over_a_free_abelian_ball() {
    let g = Arc::new(Group::with_names(GroupSpec::FreeAbelian { rank: 2 }, vec!["x".into(), "y".into()]).unwrap());
    let ball = cayley_ball(g.clone(), None, 3).unwrap();
    let h = g.subgroup(&["x"]).unwrap();
    let spec = ConeSpec::from_cosets(&ball, &[h], ConeMetric::Graph, None).unwrap();
    // One cone per horizontal line y = -3..=3.
    assert_eq!(spec.labels.len(), 7);
    assert_eq!(spec.labels[0].radius, spec.max_fiber_diameter().unwrap() + qi(1));
    let sp: ConedSpace = build_coned_space(spec).unwrap();
    assert_eq!(sp.graph.vertex_count(), ball.space.graph.vertex_count() + 7);
    assert!(sp.spec.validate().passed());
}

#[test]
fn spherical_space_lines_have_their_distance_as_length() {
    let mut b = GraphBuilder::with_vertices(5);
    for i in 0..4 {
        b.add_edge(i, i + 1, qi(1)).unwrap();
    }
    let spec = ConeSpec {
        base: Arc::new(b.build()),
        attachments: [0, 2, 4].iter().map(|&v| Attachment { vertex: v, label: 0 }).collect(),
        labels: vec![ConeLabel { name: "S".into(), metric: ConeMetric::Spherical, radius: qi(2) }],
    };
    let sp = SphericalConedSpace::build(spec).unwrap();
    let points = [
        SphericalPoint::Base(1),
        SphericalPoint::Base(3),
        SphericalPoint::Apex(0),
        SphericalPoint::Cone { attachment: 2, s: 0.5 },
    ];
    for &p in &points {
        for &q in &points {
            let line = sp.line(p, q).unwrap();
            assert!((line.length() - sp.distance(p, q)).abs() < TOLERANCE);
            assert!(line.cone_crossings() <= 2);
        }
    }
    // Through the apex the distance is at most 2D.
    assert!(sp.distance(SphericalPoint::Base(0), SphericalPoint::Base(4)) <= 4.0 + TOLERANCE);
}
