use std::sync::Arc;

use super::*;
use crate::combing::{CanonicalCombing, OverrideCombing};
use crate::graph::{GeodesicPath, GraphBuilder, MetricGraph};
use crate::rational::{q, qi};
use crate::tree::{NodeKind, TreeOfSpaces};

fn cycle(n: usize) -> Arc<MetricGraph> {
    let mut b = GraphBuilder::with_vertices(n);
    for i in 0..n {
        b.add_edge(i, (i + 1) % n, qi(1)).unwrap();
    }
    Arc::new(b.build())
}

fn small_tree() -> Arc<MetricGraph> {
    let mut b = GraphBuilder::with_vertices(7);
    for (u, v, l) in [(0, 1, qi(1)), (1, 2, q(1, 2)), (1, 3, qi(2)), (3, 4, qi(1)), (3, 5, q(3, 2)), (0, 6, qi(1))] {
        b.add_edge(u, v, l).unwrap();
    }
    Arc::new(b.build())
}

fn all(g: &MetricGraph) -> Vec<VertexId> {
    (0..g.vertex_count()).collect()
}

/// Grid of a path in the parameter domain, computed without the tick engine.
fn slow_grid(p: &GeodesicPath) -> Vec<Q> {
    let mut g: Vec<Q> = (0..=8).map(|k| q(k, 8)).collect();
    if p.length() > qi(0) {
        g.extend(p.cumulative().iter().map(|c| c / p.length()));
    }
    g.sort();
    g.dedup();
    g
}

fn slow_gcc(comb: &dyn Combing, e: Q) -> Q {
    let g = comb.graph();
    let n = g.vertex_count();
    let mut worst = qi(0);
    for x1 in 0..n {
        for y1 in 0..n {
            let g1 = comb.line(x1, y1).unwrap();
            for x2 in 0..n {
                let dx = g.dist(x1, x2).unwrap();
                for y2 in 0..n {
                    let g2 = comb.line(x2, y2).unwrap();
                    for a in slow_grid(&g1) {
                        for b in slow_grid(&g2) {
                            let dy = g.point_distance(&g1.eval(g, a).unwrap(), &g2.eval(g, b).unwrap()).unwrap();
                            for k in 0..=8 {
                                let c = q(k, 8);
                                let lhs =
                                    g.point_distance(&g1.eval(g, c * a).unwrap(), &g2.eval(g, c * b).unwrap()).unwrap();
                                let need = lhs - (qi(1) - c) * e * dx - c * e * dy;
                                worst = worst.max(need);
                            }
                        }
                    }
                }
            }
        }
    }
    worst
}

fn slow_forward(comb: &dyn Combing, e: Q) -> Q {
    let g = comb.graph();
    let n = g.vertex_count();
    let mut worst = qi(0);
    for v in 0..n {
        for w1 in 0..n {
            for w2 in 0..n {
                let (g1, g2) = (comb.line(v, w1).unwrap(), comb.line(v, w2).unwrap());
                for k in 0..=8 {
                    let c = q(k, 8);
                    let lhs = g.point_distance(&g1.eval(g, c).unwrap(), &g2.eval(g, c).unwrap()).unwrap();
                    worst = worst.max(lhs - c * e * g.dist(w1, w2).unwrap());
                }
            }
        }
    }
    worst
}

#[test]
fn tree_certifies_with_zero_constants() {
    let g = small_tree();
    let comb = CanonicalCombing::new(g.clone());
    let cert = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
    assert!(cert.check_geodesic().unwrap().certified());
    assert!(cert.check_gcc(qi(1), qi(0)).unwrap().certified());
    assert!(cert.check_consistency(qi(0)).unwrap().certified());
    assert!(cert.check_forward(qi(1), qi(0)).unwrap().certified());
    assert!(cert.check_backward(qi(1), qi(0)).unwrap().certified());
    assert!(cert.check_bounded(qi(1), qi(0), qi(1), qi(0)).unwrap().certified());
    assert!(cert.check_quasigeodesic(qi(1), qi(0)).unwrap().certified());
}

#[test]
fn six_cycle_matches_slow_oracle() {
    let g = cycle(6);
    let comb = CanonicalCombing::new(g.clone());
    let cert = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
    let sweep = cert.gcc_sweep(&[qi(1), qi(2)]).unwrap();
    assert_eq!(sweep.samples.mode, SampleMode::Exhaustive);
    assert_eq!(sweep.minimal_at(&qi(1)).unwrap(), slow_gcc(&comb, qi(1)));
    assert_eq!(sweep.minimal_at(&qi(2)).unwrap(), slow_gcc(&comb, qi(2)));
    let fw = cert.forward_sweep(&[qi(1)]).unwrap();
    assert_eq!(fw.minimal_at(&qi(1)).unwrap(), slow_forward(&comb, qi(1)));
    assert_eq!(cert.consistency_sweep().unwrap().rows[0].minimal, qi(0));
}

#[test]
fn six_cycle_violation_replays() {
    let g = cycle(6);
    let comb = CanonicalCombing::new(g.clone());
    let cert = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
    let r = cert.check_gcc(qi(1), qi(0)).unwrap();
    assert!(!r.certified());
    assert!(replay(&comb, &r).unwrap());
    let min = r.minimal_q("C").unwrap();
    let ok = cert.check_gcc(qi(1), min).unwrap();
    assert!(ok.certified());
    assert!(!replay(&comb, &ok).unwrap());
    // Monotone in the profile.
    assert!(cert.check_gcc(qi(2), min).unwrap().certified());
    assert!(cert.check_gcc(qi(1), min + qi(1)).unwrap().certified());
    let fw = cert.check_forward(qi(1), qi(0)).unwrap();
    if !fw.certified() {
        assert!(replay(&comb, &fw).unwrap());
    }
}

fn detour() -> (Arc<MetricGraph>, OverrideCombing<CanonicalCombing>) {
    let mut b = GraphBuilder::with_vertices(6);
    for i in 0..4 {
        b.add_edge(i, i + 1, qi(1)).unwrap();
    }
    b.add_edge(4, 5, qi(1)).unwrap();
    let g = Arc::new(b.build());
    let mut comb = OverrideCombing::new(CanonicalCombing::new(g.clone()));
    let walk = GeodesicPath::from_vertices(&g, &[0, 1, 2, 3, 4, 5, 4]).unwrap();
    comb.set(0, 4, walk).unwrap();
    (g, comb)
}

#[test]
fn detour_minimal_k() {
    let (g, comb) = detour();
    let cert = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
    let sweep = cert.quasigeodesic_sweep(&[qi(1), qi(2)]).unwrap();
    assert_eq!(sweep.minimal_at(&qi(1)).unwrap(), q(5, 3));
    assert!(sweep.minimal_at(&qi(2)).unwrap() <= q(5, 3));
    let r = cert.check_quasigeodesic(qi(1), qi(1)).unwrap();
    assert!(!r.certified());
    assert!(replay(&comb, &r).unwrap());
    assert!(matches!(cert.check_gcc(qi(1), qi(0)), Err(CertifyError::NotGeodesic(0, 4))));
    assert!(!cert.check_geodesic().unwrap().certified());
}

#[test]
fn detour_parameter_regularity() {
    let (g, comb) = detour();
    let cert = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
    let k = q(5, 3);
    let big_c = cert.convexity_display(qi(1)).unwrap().rows[0].minimal;
    let theta = Theta::Affine { slope: qi(1), intercept: qi(2) * k };
    let r = cert.check_cc_full(qi(1), k, qi(1), big_c, &theta).unwrap();
    assert!(r.certified(), "{r:?}");
    let zero = Theta::Steps(vec![]);
    let bad = cert.check_cc_full(qi(1), k, qi(1), big_c, &zero).unwrap();
    assert!(!bad.certified());
    assert!(replay(&comb, &bad).unwrap());
}

#[test]
fn geodesic_regularity_with_identity() {
    let g = cycle(5);
    let comb = CanonicalCombing::new(g.clone());
    let cert = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
    let c = cert.gcc_sweep(&[qi(1)]).unwrap().rows[0].minimal;
    let r = cert.check_cc_full(qi(1), qi(0), qi(1), c, &Theta::Identity).unwrap();
    assert!(r.certified());
    assert_eq!(r.details["identity-theta"], "true");
}

#[test]
fn theta_parsing() {
    assert_eq!("identity".parse::<Theta>().unwrap(), Theta::Identity);
    assert_eq!("2x+1/3".parse::<Theta>().unwrap(), Theta::Affine { slope: qi(2), intercept: q(1, 3) });
    assert_eq!("0:1;2:3".parse::<Theta>().unwrap(), Theta::Steps(vec![(qi(0), qi(1)), (qi(2), qi(3))]));
    assert!("0:3;2:1".parse::<Theta>().is_err());
    let t = Theta::Steps(vec![(qi(1), qi(5))]);
    assert_eq!(t.eval(&q(1, 2)), qi(0));
    assert_eq!(t.eval(&qi(3)), qi(5));
}

#[test]
fn sampling_is_deterministic_and_parallel_safe() {
    let g = cycle(7);
    let comb = CanonicalCombing::new(g.clone());
    let plan = SamplePlan::sampled(3000, 11);
    let a = Certifier::new(&comb, all(&g), plan.clone().with_jobs(1)).unwrap();
    let b = Certifier::new(&comb, all(&g), plan.with_jobs(0)).unwrap();
    let ra = a.check_gcc(qi(1), qi(0)).unwrap();
    let rb = b.check_gcc(qi(1), qi(0)).unwrap();
    assert_eq!(ra.to_json(), rb.to_json());
    assert_eq!(ra.seed, Some(11));
    assert_eq!(ra.samples.mode, SampleMode::Sampled);
}

#[test]
fn thinness_on_glued_segments() {
    let mut gb = GraphBuilder::with_vertices(3);
    gb.add_edge(0, 1, qi(1)).unwrap();
    gb.add_edge(1, 2, qi(1)).unwrap();
    let tree = Arc::new(
        TreeOfSpaces::from_parts(
            gb.build(),
            vec![NodeKind::K, NodeKind::L, NodeKind::K],
            &[(0, 1), (1, 2)],
            vec![0, 1, 2],
        )
        .unwrap(),
    );
    let comb = CanonicalCombing::new(tree.z.clone());
    let cert = Certifier::new(&comb, vec![0, 1, 2], SamplePlan::exhaustive()).unwrap();
    let sel = ConvexSelector::Tree(tree.clone());
    let f = cert.check_thinness(&sel, qi(0), Direction::Forward).unwrap();
    assert!(f.certified(), "{f:?}");
    let b = cert.check_thinness(&sel, qi(0), Direction::Backward).unwrap();
    assert!(b.certified(), "{b:?}");
    assert!(matches!(cert.check_thinness(&sel, qi(1), Direction::Forward), Err(CertifyError::TriplesTooShort(_))));
}

#[test]
fn thinness_rejects_non_convex_subspace() {
    let g = cycle(6);
    let comb = CanonicalCombing::new(g.clone());
    let cert = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
    let sel = ConvexSelector::fixed(vec![0, 1, 2, 3]);
    assert!(matches!(cert.check_thinness(&sel, qi(0), Direction::Forward), Err(CertifyError::SubspaceNotConvex(_))));
}

#[test]
fn sufficiency_on_six_cycle() {
    let g = cycle(6);
    let comb = CanonicalCombing::new(g.clone());
    let cert = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
    let s = cert.cross_check_sufficiency(&[qi(1)], None).unwrap();
    assert!(s.report.certified(), "{:?}", s.checks);
    assert_eq!(s.checks.len(), 2);
}
