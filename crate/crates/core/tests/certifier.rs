use std::sync::Arc;

use ccl_core::certify::{Certifier, SampleMode, SamplePlan};
use ccl_core::combing::CanonicalCombing;
use ccl_core::graph::{GraphBuilder, MetricGraph};
use ccl_core::rational::{q, qi, Q};
use proptest::prelude::*;

/// Connected graph on at most 8 vertices: a random tree plus a few chords.
fn small_graph() -> impl Strategy<Value = Arc<MetricGraph>> {
    (3usize..=8).prop_flat_map(|n| {
        let lens = prop_oneof![Just(q(1, 2)), Just(qi(1)), Just(qi(2))];
        let parents = prop::collection::vec((any::<prop::sample::Index>(), lens.clone()), n - 1);
        let chords = prop::collection::vec((0..n, 0..n, lens), 0..3);
        (parents, chords).prop_map(move |(parents, chords)| {
            let mut b = GraphBuilder::with_vertices(n);
            for (v, (p, len)) in parents.into_iter().enumerate() {
                b.add_edge(p.index(v + 1), v + 1, len).unwrap();
            }
            for (u, v, len) in chords {
                if u != v {
                    b.add_edge(u, v, len).unwrap();
                }
            }
            Arc::new(b.build())
        })
    })
}

fn all(g: &MetricGraph) -> Vec<usize> {
    (0..g.vertex_count()).collect()
}

fn es() -> Vec<Q> {
    vec![qi(1), q(3, 2), qi(2), qi(3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_lines_certify_as_geodesic(g in small_graph()) {
        let comb = CanonicalCombing::new(g.clone());
        let cert = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
        prop_assert!(cert.check_geodesic().unwrap().certified());
    }

    #[test]
    fn verdicts_are_monotone_in_the_profile(g in small_graph()) {
        let comb = CanonicalCombing::new(g.clone());
        let cert = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
        let sweep = cert.gcc_sweep(&es()).unwrap();
        for e in es() {
            let c = sweep.minimal_at(&e).unwrap();
            prop_assert!(cert.check_gcc(e, c).unwrap().certified());
            prop_assert!(cert.check_gcc(e, c + qi(1)).unwrap().certified());
            if c > qi(0) {
                let below = (c - q(1, 16)).max(qi(0));
                prop_assert!(!cert.check_gcc(e, below).unwrap().certified());
            }
        }
        let lambdas = [qi(1), q(3, 2), qi(2), qi(4)];
        let qg = cert.quasigeodesic_sweep(&lambdas).unwrap();
        for w in qg.rows.windows(2) {
            prop_assert!(w[1].minimal <= w[0].minimal);
        }
        let k = cert.consistency_sweep().unwrap().rows[0].minimal;
        prop_assert!(cert.check_consistency(k).unwrap().certified());
        prop_assert!(cert.check_consistency(k + q(1, 2)).unwrap().certified());
    }

    #[test]
    fn sampling_never_overstates_the_exhaustive_minimum(g in small_graph(), seed in any::<u64>()) {
        let comb = CanonicalCombing::new(g.clone());
        let full = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
        let part = Certifier::new(&comb, all(&g), SamplePlan::sampled(40, seed)).unwrap();
        prop_assert_eq!(part.samples(3).mode, SampleMode::Sampled);
        let (fs, ps) = (full.gcc_sweep(&es()).unwrap(), part.gcc_sweep(&es()).unwrap());
        for e in es() {
            let (f, p) = (fs.minimal_at(&e).unwrap(), ps.minimal_at(&e).unwrap());
            prop_assert!(p <= f);
            // A violation found by sampling is a violation of the exhaustive check.
            let c = p - q(1, 16);
            if c >= qi(0) && !part.check_gcc(e, c).unwrap().certified() {
                prop_assert!(!full.check_gcc(e, c).unwrap().certified());
            }
        }
        let (fk, pk) = (full.consistency_sweep().unwrap(), part.consistency_sweep().unwrap());
        prop_assert!(pk.rows[0].minimal <= fk.rows[0].minimal);
    }

    #[test]
    fn reports_are_deterministic_and_independent_of_jobs(g in small_graph(), seed in any::<u64>()) {
        let comb = CanonicalCombing::new(g.clone());
        let plan = SamplePlan::sampled(200, seed);
        let seq = Certifier::new(&comb, all(&g), plan.clone().with_jobs(1)).unwrap();
        let par = Certifier::new(&comb, all(&g), plan.clone().with_jobs(0)).unwrap();
        let again = Certifier::new(&comb, all(&g), plan.with_jobs(3)).unwrap();
        let a = seq.gcc_sweep(&es()).unwrap();
        prop_assert_eq!(&a, &par.gcc_sweep(&es()).unwrap());
        prop_assert_eq!(&a, &again.gcc_sweep(&es()).unwrap());
        let r = seq.check_consistency(qi(0)).unwrap();
        prop_assert_eq!(r.to_json(), par.check_consistency(qi(0)).unwrap().to_json());
        prop_assert_eq!(r.seed, Some(seed));
    }
}

#[test]
fn empty_cores_are_refused() {
    let mut b = GraphBuilder::with_vertices(2);
    b.add_edge(0, 1, qi(1)).unwrap();
    let g = Arc::new(b.build());
    let comb = CanonicalCombing::new(g);
    assert!(Certifier::new(&comb, vec![], SamplePlan::exhaustive()).is_err());
    assert!(Certifier::new(&comb, vec![5], SamplePlan::exhaustive()).is_err());
}

#[test]
fn profiles_below_their_floor_are_refused() {
    let mut b = GraphBuilder::with_vertices(3);
    b.add_edge(0, 1, qi(1)).unwrap();
    b.add_edge(1, 2, qi(1)).unwrap();
    let g = Arc::new(b.build());
    let comb = CanonicalCombing::new(g.clone());
    let cert = Certifier::new(&comb, all(&g), SamplePlan::exhaustive()).unwrap();
    assert!(cert.check_gcc(q(1, 2), qi(1)).is_err());
    assert!(cert.check_gcc(qi(1), qi(-1)).is_err());
    assert!(cert.check_consistency(qi(-1)).is_err());
    assert!(cert.check_quasigeodesic(qi(1), qi(-1)).is_err());
}
