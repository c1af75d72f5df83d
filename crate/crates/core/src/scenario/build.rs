use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{CombingChoice, ScenarioConfig, SpaceSpec};
use super::{derive_seed, ScenarioError};
use crate::certify::ConvexSelector;
use crate::combing::{CanonicalCombing, Combing, OverrideCombing};
use crate::coned::spherical::SphericalConedSpace;
use crate::coned::{build_coned_space, Attachment, ConeLabel, ConeMetric, ConeSpec, ConedSpace, HatCombing};
use crate::graph::io::{parse_graph, write_graph};
use crate::graph::{GeodesicPath, GraphBuilder, MetricGraph, VertexId};
use crate::group::{cayley_ball, Group};
use crate::rational::{qi, Q};
use crate::tree::{
    build_coalescence, build_pushout, CombinedCombing, FamilyKind, NodeKind, TreeOfSpaces, VertexFamily,
};

/// A built space with its combing, core and convex subspaces.
pub struct BuiltSpace {
    pub kind: &'static str,
    pub combing: Arc<dyn Combing>,
    pub core: Vec<VertexId>,
    pub core_radius: Option<Q>,
    pub selector: Option<ConvexSelector>,
    pub tree: Option<Arc<TreeOfSpaces>>,
    pub family: Option<FamilyKind>,
    pub coned: Option<Arc<ConedSpace>>,
    pub spherical: Option<Arc<SphericalConedSpace>>,
    /// Serialized space: graph, cone or tree interchange text.
    pub interchange: String,
}

impl BuiltSpace {
    pub fn graph(&self) -> &MetricGraph {
        self.combing.graph()
    }

    fn plain(kind: &'static str, comb: Arc<dyn Combing>) -> Self {
        let n = comb.graph().vertex_count();
        let interchange = write_graph(comb.graph());
        BuiltSpace {
            kind,
            combing: comb,
            core: (0..n).collect(),
            core_radius: None,
            selector: None,
            tree: None,
            family: None,
            coned: None,
            spherical: None,
            interchange,
        }
    }
}

fn build_err(e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Build(e.to_string())
}

pub fn random_tree(vertices: usize, lengths: &[Q], seed: u64) -> MetricGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::with_vertices(vertices);
    for v in 1..vertices {
        let u = rng.gen_range(0..v);
        let len = lengths[rng.gen_range(0..lengths.len())];
        b.add_edge(u, v, len).expect("tree edge");
    }
    b.build()
}

pub fn cycle(n: usize, length: Q) -> MetricGraph {
    let mut b = GraphBuilder::with_vertices(n);
    for i in 0..n {
        b.add_edge(i, (i + 1) % n, length).expect("cycle edge");
    }
    b.build()
}

/// Path `0..=4` with unit edges and a pendant vertex 5 at 4.
pub fn detour() -> (Arc<MetricGraph>, OverrideCombing<CanonicalCombing>) {
    let mut b = GraphBuilder::with_vertices(6);
    for i in 0..5 {
        b.add_edge(i, i + 1, qi(1)).expect("path edge");
    }
    let g = Arc::new(b.build());
    let mut comb = OverrideCombing::new(CanonicalCombing::new(g.clone()));
    let walk = GeodesicPath::from_vertices(&g, &[0, 1, 2, 3, 4, 5, 4]).expect("walk");
    comb.set(0, 4, walk).expect("override");
    (g, comb)
}

/// Two `n`-cycles sharing vertex 0, with `T = K - L - K`.
pub fn glued_cycles(n: usize, length: Q) -> Result<TreeOfSpaces, ScenarioError> {
    let mut b = GraphBuilder::with_vertices(2 * n - 1);
    let second = |i: usize| if i.is_multiple_of(n) { 0 } else { n - 1 + i };
    for i in 0..n {
        b.add_edge(i, (i + 1) % n, length).map_err(build_err)?;
        b.add_edge(second(i), second(i + 1), length).map_err(build_err)?;
    }
    let mut xi = vec![0; 2 * n - 1];
    xi[0] = 1;
    for x in xi.iter_mut().skip(n) {
        *x = 2;
    }
    TreeOfSpaces::from_parts(b.build(), vec![NodeKind::K, NodeKind::L, NodeKind::K], &[(0, 1), (1, 2)], xi)
        .map_err(build_err)
}

fn family_kind(choice: CombingChoice) -> FamilyKind {
    match choice {
        CombingChoice::Canonical => FamilyKind::Independent,
        CombingChoice::TransportedEquivariant => FamilyKind::Transported,
    }
}

fn tree_space(
    kind: &'static str,
    tos: TreeOfSpaces,
    choice: CombingChoice,
    core_radius: Option<Q>,
) -> Result<BuiltSpace, ScenarioError> {
    let tos = Arc::new(tos);
    let fk = family_kind(choice);
    let family = VertexFamily::new(tos.clone(), fk).map_err(build_err)?;
    let comb: Arc<dyn Combing> = Arc::new(CombinedCombing::new(family));
    let core = match core_radius {
        Some(r) => {
            let center = tos.group.as_ref().and_then(|g| g.base_glued).unwrap_or(0);
            tos.core(center, r)
        }
        None => (0..tos.z.vertex_count()).collect(),
    };
    Ok(BuiltSpace {
        kind,
        interchange: tos.to_interchange(),
        combing: comb,
        core,
        core_radius,
        selector: Some(ConvexSelector::Tree(tos.clone())),
        tree: Some(tos),
        family: Some(fk),
        coned: None,
        spherical: None,
    })
}

pub fn build_space(cfg: &ScenarioConfig) -> Result<BuiltSpace, ScenarioError> {
    let choice = cfg.combing;
    let tree_only = |kind: &str| {
        if choice == CombingChoice::TransportedEquivariant {
            Err(ScenarioError::Config(format!("transported-equivariant combings need a tree of spaces, not `{kind}`")))
        } else {
            Ok(())
        }
    };
    let space = &cfg.space;
    match space {
        SpaceSpec::RandomTree { vertices, lengths } => {
            tree_only(space.kind())?;
            let seed = cfg.seed.ok_or_else(|| ScenarioError::Config("random trees need a seed".into()))?;
            let g = Arc::new(random_tree(*vertices, lengths, derive_seed(seed, "space")));
            Ok(BuiltSpace::plain(space.kind(), Arc::new(CanonicalCombing::new(g))))
        }
        SpaceSpec::Cycle { n, length } => {
            tree_only(space.kind())?;
            let g = Arc::new(cycle(*n, *length));
            Ok(BuiltSpace::plain(space.kind(), Arc::new(CanonicalCombing::new(g))))
        }
        SpaceSpec::Interchange { path } => {
            tree_only(space.kind())?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| ScenarioError::Config(format!("cannot read {}: {e}", path.display())))?;
            let g = parse_graph(&text).map_err(|e| ScenarioError::Config(format!("{}: {e}", path.display())))?;
            Ok(BuiltSpace::plain(space.kind(), Arc::new(CanonicalCombing::new(Arc::new(g)))))
        }
        SpaceSpec::Detour => {
            tree_only(space.kind())?;
            let (_, comb) = detour();
            Ok(BuiltSpace::plain(space.kind(), Arc::new(comb)))
        }
        SpaceSpec::GluedCycles { n, length } => {
            tree_only(space.kind())?;
            tree_space(space.kind(), glued_cycles(*n, *length)?, choice, None)
        }
        SpaceSpec::Coned { group, names, peripherals, radius, cone_radius, core_radius, apexes } => {
            tree_only(space.kind())?;
            let grp = if names.is_empty() {
                Group::new(group.clone())
            } else {
                Group::with_names(group.clone(), names.clone())
            }
            .map_err(|e| ScenarioError::Config(e.to_string()))?;
            let grp = Arc::new(grp);
            let subs = peripherals
                .iter()
                .map(|h| grp.subgroup(h))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ScenarioError::Config(e.to_string()))?;
            let ball = cayley_ball(grp, None, *radius).map_err(build_err)?;
            let spec = ConeSpec::from_cosets(&ball, &subs, ConeMetric::Graph, *cone_radius).map_err(build_err)?;
            let sp = Arc::new(build_coned_space(spec).map_err(build_err)?);
            let mut core = ball.within(*core_radius);
            if *apexes {
                let mut labels: Vec<usize> = sp
                    .spec
                    .attachments
                    .iter()
                    .filter(|a| core.binary_search(&a.vertex).is_ok())
                    .map(|a| a.label)
                    .collect();
                labels.sort_unstable();
                labels.dedup();
                core.extend(labels.into_iter().map(|l| sp.apex[l]));
            }
            let base: Vec<VertexId> = (0..sp.base_vertex_count()).collect();
            let comb: Arc<dyn Combing> =
                Arc::new(HatCombing::new(sp.clone(), CanonicalCombing::new(sp.spec.base.clone())));
            Ok(BuiltSpace {
                kind: space.kind(),
                combing: comb,
                core,
                core_radius: Some(qi(*core_radius as i128)),
                selector: Some(ConvexSelector::fixed(base)),
                tree: None,
                family: None,
                interchange: sp.to_interchange(),
                coned: Some(sp),
                spherical: None,
            })
        }
        SpaceSpec::Pushout { spec, params, core_radius } => {
            let tos = build_pushout(spec, params).map_err(build_err)?;
            tree_space(space.kind(), tos, choice, Some(*core_radius))
        }
        SpaceSpec::Coalescence { spec, params, core_radius } => {
            let tos = build_coalescence(spec, params).map_err(build_err)?;
            tree_space(space.kind(), tos, choice, Some(*core_radius))
        }
        SpaceSpec::Spherical { path_length, fiber, radius } => {
            tree_only(space.kind())?;
            let mut b = GraphBuilder::with_vertices(path_length + 1);
            for i in 0..*path_length {
                b.add_edge(i, i + 1, qi(1)).map_err(build_err)?;
            }
            let base = Arc::new(b.build());
            let spec = ConeSpec {
                base: base.clone(),
                attachments: fiber.iter().map(|&v| Attachment { vertex: v, label: 0 }).collect(),
                labels: vec![ConeLabel { name: "S".into(), metric: ConeMetric::Spherical, radius: *radius }],
            };
            let interchange = spec.to_interchange();
            let sph = Arc::new(SphericalConedSpace::build(spec).map_err(build_err)?);
            let mut built = BuiltSpace::plain(space.kind(), Arc::new(CanonicalCombing::new(base)));
            built.interchange = interchange;
            built.spherical = Some(sph);
            Ok(built)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_trees_are_trees() {
        let g = random_tree(40, &[qi(1), Q::new(1, 2)], 3);
        assert_eq!(g.edge_count(), 39);
        assert!(g.is_connected());
        assert_eq!(write_graph(&g), write_graph(&random_tree(40, &[qi(1), Q::new(1, 2)], 3)));
    }

    #[test]
    fn glued_cycles_structure() {
        let t = glued_cycles(6, qi(1)).unwrap();
        assert_eq!(t.z.vertex_count(), 11);
        assert_eq!(t.vertex_spaces[0], vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(t.vertex_spaces[2], vec![0, 6, 7, 8, 9, 10]);
        assert!(t.structural_suite(None).passed());
        assert_eq!(t.z.dist(3, 8).unwrap(), qi(6));
    }
}
