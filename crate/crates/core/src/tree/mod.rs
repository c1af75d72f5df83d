//! Trees of spaces: spike spaces glued along a Bass-Serre tree, the map
//! `xi: Z -> T`, and the bicombing obtained by concatenating vertex-space lines.

mod build;
mod combine;
mod spike;

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::coned::ValidationCheck;
use crate::graph::io::{parse_document, write_graph};
use crate::graph::{GraphBuilder, GraphError, MetricGraph, VertexId};
use crate::group::{Element, Group, GroupError, Point, Subgroup, SymbolicSpace};
use crate::rational::{qi, Q};

pub use build::{build_coalescence, build_pushout, GraphOfGroupsSpec, HnnBasepoints, TreeBuildParams, VertexGroupSpec};
pub use combine::{
    combing_equivariance, family_equivariance, CombinedCombing, EquivarianceReport, EquivarianceWitness, FamilyKind,
    VertexFamily,
};
pub use spike::{build_spike, SpikeKind, SpikeSpace, SpikeTip};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("unsupported group data: {0}")]
    UnsupportedGroup(String),
    #[error("truncation radius too small: {0}")]
    RadiusTooSmall(String),
    #[error("basepoint not fixed: {0}")]
    BasepointNotFixed(String),
    #[error("basepoints lie in the same orbit: {0}")]
    SameOrbitBasepoints(String),
    #[error("invalid specification: {0}")]
    SpecError(String),
    #[error("combing domain mismatch: {0}")]
    CombingDomainMismatch(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    /// Vertex-space node.
    K,
    /// Gluing-point node.
    L,
}

/// Vertex-space copy behind a K-node of a tree built from group data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyInfo {
    pub side: usize,
    pub rep: Element,
}

/// A spike tip of one copy and the glued point it was identified with.
#[derive(Clone, Debug)]
pub struct GlueRecord {
    pub node: usize,
    pub kind: usize,
    /// Element `h a tau` whose coset of the glued subgroup names the point.
    pub key_element: Element,
    pub glued: VertexId,
}

/// Group data behind a tree of spaces built by a constructor.
#[derive(Clone, Debug)]
pub struct GroupData {
    pub group: Arc<Group>,
    /// Stabilizer of the base glued point.
    pub glued_subgroup: Subgroup,
    pub side_subgroups: Vec<Subgroup>,
    /// First copy of each side, used as the reference for transported families.
    pub reference_copy: Vec<usize>,
    pub records: Vec<GlueRecord>,
    pub base_glued: Option<VertexId>,
}

#[derive(Clone, Debug)]
pub struct TreeOfSpaces {
    pub z: Arc<MetricGraph>,
    /// Bipartite tree with unit edges.
    pub t: Arc<MetricGraph>,
    pub kinds: Vec<NodeKind>,
    pub xi: Vec<usize>,
    /// `xi^{-1}(star(k))` for K-nodes, sorted; empty for L-nodes.
    pub vertex_spaces: Vec<Vec<VertexId>>,
    /// The point over each L-node.
    pub glued_point: Vec<Option<VertexId>>,
    pub copies: Vec<Option<CopyInfo>>,
    pub symbolic: Option<SymbolicSpace>,
    pub group: Option<GroupData>,
    pub spike_length: Option<Q>,
}

impl TreeOfSpaces {
    /// Assembles a tree of spaces from a graph, a bipartite tree and `xi`.
    pub fn from_parts(
        z: MetricGraph,
        kinds: Vec<NodeKind>,
        t_edges: &[(usize, usize)],
        xi: Vec<usize>,
    ) -> Result<TreeOfSpaces, TreeError> {
        if xi.len() != z.vertex_count() {
            return Err(TreeError::SpecError(format!("xi has {} entries for {} vertices", xi.len(), z.vertex_count())));
        }
        let mut tb = GraphBuilder::with_vertices(kinds.len());
        for &(a, b) in t_edges {
            tb.add_edge(a, b, qi(1))?;
        }
        if let Some(&bad) = xi.iter().find(|&&k| k >= kinds.len()) {
            return Err(TreeError::SpecError(format!("xi refers to missing tree node {bad}")));
        }
        let t = tb.build();
        let n_t = kinds.len();
        let mut fibers = vec![Vec::new(); n_t];
        for (v, &k) in xi.iter().enumerate() {
            fibers[k].push(v);
        }
        let glued_point =
            (0..n_t).map(|k| if kinds[k] == NodeKind::L { fibers[k].first().copied() } else { None }).collect();
        let vertex_spaces = (0..n_t)
            .map(|k| {
                if kinds[k] != NodeKind::K {
                    return Vec::new();
                }
                let mut set: BTreeSet<VertexId> = fibers[k].iter().copied().collect();
                for &(l, _) in t.neighbors(k) {
                    if kinds[l] == NodeKind::L {
                        set.extend(fibers[l].iter().copied());
                    }
                }
                set.into_iter().collect()
            })
            .collect();
        Ok(TreeOfSpaces {
            z: Arc::new(z),
            t: Arc::new(t),
            copies: vec![None; n_t],
            kinds,
            xi,
            vertex_spaces,
            glued_point,
            symbolic: None,
            group: None,
            spike_length: None,
        })
    }

    pub fn k_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.kinds.len()).filter(|&k| self.kinds[k] == NodeKind::K)
    }

    pub fn l_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.kinds.len()).filter(|&k| self.kinds[k] == NodeKind::L)
    }

    /// Vertices of `Z` within `radius` of `center`.
    pub fn core(&self, center: VertexId, radius: Q) -> Vec<VertexId> {
        let row = self.z.dist_row(center);
        (0..self.z.vertex_count()).filter(|&v| row[v] != u64::MAX && self.z.unscale(row[v]) <= radius).collect()
    }

    /// Point of `Z` with the given symbolic name.
    pub fn vertex_of(&self, p: &Point) -> Option<VertexId> {
        self.symbolic.as_ref().and_then(|s| s.vertex_of(p))
    }

    /// Structural checks; convexity is tested on pairs of `core` vertices
    /// (all vertices when `None`).
    pub fn structural_suite(&self, core: Option<&[VertexId]>) -> StructuralReport {
        let mut checks = Vec::new();
        let z = &self.z;
        let n_t = self.kinds.len();
        let xi_ok = self.xi.len() == z.vertex_count() && self.xi.iter().all(|&k| k < n_t);
        checks.push(check(
            "xi-defined",
            xi_ok,
            if xi_ok { "every vertex has an image" } else { "xi is partial" }.into(),
        ));

        let mut fiber_sizes = vec![0usize; n_t];
        for &k in &self.xi {
            fiber_sizes[k] += 1;
        }
        let bad_l = self.l_nodes().find(|&l| fiber_sizes[l] != 1);
        checks.push(check(
            "l-fibers-singleton",
            bad_l.is_none(),
            match bad_l {
                Some(l) => format!("L-node {l} has {} preimages", fiber_sizes[l]),
                None => "every L-node has exactly one preimage".into(),
            },
        ));

        let t = &self.t;
        let tree = t.is_connected() && t.edge_count() + 1 == n_t;
        checks.push(check(
            "t-is-tree",
            tree,
            format!("{} nodes, {} edges, connected: {}", n_t, t.edge_count(), t.is_connected()),
        ));
        let bip = t.edges().iter().find(|e| self.kinds[e.u] == self.kinds[e.v]);
        checks.push(check(
            "t-bipartite",
            bip.is_none(),
            match bip {
                Some(e) => format!("edge {}-{} joins nodes of the same kind", e.u, e.v),
                None => "every edge joins a K-node to an L-node".into(),
            },
        ));

        let mut xi_edges = None;
        for e in z.edges() {
            let (a, b) = (self.xi[e.u], self.xi[e.v]);
            if a != b && t.edge_between(a, b).is_none() {
                xi_edges.get_or_insert((e.u, e.v));
            }
        }
        checks.push(ValidationCheck {
            name: "xi-simplicial".into(),
            passed: xi_edges.is_none(),
            detail: match xi_edges {
                Some((u, v)) => format!("edge {u}-{v} maps across a non-edge of T"),
                None => "adjacent vertices map to equal or adjacent nodes".into(),
            },
            witness: xi_edges,
        });

        let in_core: Option<Vec<bool>> = core.map(|c| {
            let mut m = vec![false; z.vertex_count()];
            for &v in c {
                m[v] = true;
            }
            m
        });
        let mut convex_fail = None;
        let mut pairs = 0usize;
        for k in self.k_nodes() {
            let space = &self.vertex_spaces[k];
            let tested: Vec<VertexId> = match &in_core {
                Some(m) => space.iter().copied().filter(|&v| m[v]).collect(),
                None => space.clone(),
            };
            pairs += tested.len() * tested.len();
            if convex_fail.is_none() {
                convex_fail = z.convexity_violation(space, &tested);
            }
        }
        checks.push(ValidationCheck {
            name: "vertex-spaces-convex".into(),
            passed: convex_fail.is_none(),
            detail: match convex_fail {
                Some((u, v)) => format!("a geodesic from {u} to {v} leaves its vertex space"),
                None => format!("{pairs} pairs checked"),
            },
            witness: convex_fail,
        });

        if let Some(gd) = &self.group {
            checks.push(self.identification_check(gd));
            checks.push(self.stabilizer_check(gd));
        }
        StructuralReport { checks }
    }

    /// Tips share a glued point exactly when their keys agree modulo the glued subgroup.
    fn identification_check(&self, gd: &GroupData) -> ValidationCheck {
        let grp = &gd.group;
        let mut bad = None;
        let mut by_coset: HashMap<Element, VertexId> = HashMap::new();
        let mut by_point: HashMap<VertexId, Element> = HashMap::new();
        for r in &gd.records {
            let rep = grp.coset_rep(&r.key_element, &gd.glued_subgroup);
            if let Some(&other) = by_coset.get(&rep) {
                if other != r.glued {
                    bad.get_or_insert((other, r.glued));
                }
            }
            if let Some(other) = by_point.get(&r.glued) {
                if *other != rep {
                    bad.get_or_insert((r.glued, r.glued));
                }
            }
            by_coset.entry(rep.clone()).or_insert(r.glued);
            by_point.entry(r.glued).or_insert(rep.clone());
            if self.vertex_of(&Point::Glued { rep }) != Some(r.glued) {
                bad.get_or_insert((r.glued, r.glued));
            }
        }
        ValidationCheck {
            name: "spike-identifications".into(),
            passed: bad.is_none(),
            detail: match bad {
                Some((a, b)) => format!("glued points {a} and {b} disagree with the defining relation"),
                None => format!("{} spike tips identified as defined", gd.records.len()),
            },
            witness: bad,
        }
    }

    /// Tabled elements fix the base glued point exactly when they lie in the glued subgroup.
    fn stabilizer_check(&self, gd: &GroupData) -> ValidationCheck {
        let (Some(sym), Some(z0)) = (&self.symbolic, gd.base_glued) else {
            return check("stabilizer-bookkeeping", false, "no base glued point".into());
        };
        let grp = &gd.group;
        let table = element_ball(grp, &grp.basis_elements(), 2);
        let mut bad = None;
        let mut fixing = 0;
        for g in &table {
            let fixes = sym.fixes(g, z0);
            fixing += fixes as usize;
            if fixes != grp.contains(&gd.glued_subgroup, g) {
                bad.get_or_insert(grp.format(g));
            }
        }
        let gens: Vec<String> = gd.glued_subgroup.generators().iter().map(|&i| grp.names[i].clone()).collect();
        check(
            "stabilizer-bookkeeping",
            bad.is_none(),
            match bad {
                Some(g) => format!("{g} violates stabilizer = <{}>", gens.join(", ")),
                None => format!(
                    "{fixing} of {} tabled elements fix the glued point, matching <{}>",
                    table.len(),
                    gens.join(", ")
                ),
            },
        )
    }

    /// Graph interchange text followed by `tnode`, `tedge`, `xi` and `vspace` lines.
    pub fn to_interchange(&self) -> String {
        let mut out = write_graph(&self.z);
        for (k, kind) in self.kinds.iter().enumerate() {
            writeln!(out, "tnode {k} {}", if *kind == NodeKind::K { "K" } else { "L" }).unwrap();
        }
        for e in self.t.edges() {
            writeln!(out, "tedge {} {}", e.u, e.v).unwrap();
        }
        for (v, k) in self.xi.iter().enumerate() {
            writeln!(out, "xi {v} {k}").unwrap();
        }
        for k in self.k_nodes() {
            let list: Vec<String> = self.vertex_spaces[k].iter().map(|v| v.to_string()).collect();
            writeln!(out, "vspace {k} {}", list.join(" ")).unwrap();
        }
        out
    }

    pub fn from_interchange(text: &str) -> Result<TreeOfSpaces, TreeError> {
        let (z, ext) = parse_document(text)?;
        let mut kinds = Vec::new();
        let mut t_edges = Vec::new();
        let mut xi = vec![usize::MAX; z.vertex_count()];
        let mut spaces: Vec<(usize, Vec<VertexId>)> = Vec::new();
        for x in ext {
            let err = |m: &str| TreeError::Graph(GraphError::Parse { line: x.line, msg: m.to_string() });
            let nums = || -> Result<Vec<usize>, TreeError> {
                x.fields.iter().map(|f| f.parse::<usize>().map_err(|_| err("expected an integer"))).collect()
            };
            match x.keyword.as_str() {
                "tnode" => {
                    if x.fields.len() != 2 || x.fields[0].parse::<usize>().ok() != Some(kinds.len()) {
                        return Err(err("tnode lines must be numbered in order"));
                    }
                    kinds.push(match x.fields[1].as_str() {
                        "K" => NodeKind::K,
                        "L" => NodeKind::L,
                        _ => return Err(err("node kind must be K or L")),
                    });
                }
                "tedge" => match nums()?.as_slice() {
                    [a, b] => t_edges.push((*a, *b)),
                    _ => return Err(err("tedge needs two nodes")),
                },
                "xi" => match nums()?.as_slice() {
                    [v, k] if *v < xi.len() => xi[*v] = *k,
                    _ => return Err(err("xi needs a vertex and a node")),
                },
                "vspace" => {
                    let n = nums()?;
                    if n.is_empty() {
                        return Err(err("vspace needs a node"));
                    }
                    spaces.push((n[0], n[1..].to_vec()));
                }
                other => return Err(err(&format!("unexpected keyword `{other}`"))),
            }
        }
        if xi.contains(&usize::MAX) {
            return Err(TreeError::SpecError("xi missing for some vertex".into()));
        }
        let tos = TreeOfSpaces::from_parts(z, kinds, &t_edges, xi)?;
        for (k, list) in spaces {
            if tos.vertex_spaces.get(k) != Some(&list) {
                return Err(TreeError::SpecError(format!("vspace {k} disagrees with xi")));
            }
        }
        Ok(tos)
    }
}

fn check(name: &str, passed: bool, detail: String) -> ValidationCheck {
    ValidationCheck { name: name.into(), passed, detail, witness: None }
}

#[derive(Clone, Debug, Serialize)]
pub struct StructuralReport {
    pub checks: Vec<ValidationCheck>,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ValidationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Elements of word length at most `radius` over `gens`, in BFS order.
pub fn element_ball(group: &Group, gens: &[Element], radius: usize) -> Vec<Element> {
    let mut steps = gens.to_vec();
    steps.extend(gens.iter().map(|g| group.inv(g)));
    let mut out = vec![group.identity()];
    let mut seen: std::collections::HashSet<Element> = out.iter().cloned().collect();
    let mut frontier = out.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in &frontier {
            for s in &steps {
                let h = group.mul(g, s);
                if seen.insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two paths of length 2 glued at their midpoints' spikes.
    pub(crate) fn two_segments() -> TreeOfSpaces {
        let mut b = GraphBuilder::with_vertices(3);
        b.add_edge(0, 1, qi(1)).unwrap();
        b.add_edge(1, 2, qi(1)).unwrap();
        TreeOfSpaces::from_parts(
            b.build(),
            vec![NodeKind::K, NodeKind::L, NodeKind::K],
            &[(0, 1), (1, 2)],
            vec![0, 1, 2],
        )
        .unwrap()
    }

    #[test]
    fn segments_structure() {
        let t = two_segments();
        assert_eq!(t.vertex_spaces[0], vec![0, 1]);
        assert_eq!(t.vertex_spaces[2], vec![1, 2]);
        assert!(t.structural_suite(None).passed());
        let back = TreeOfSpaces::from_interchange(&t.to_interchange()).unwrap();
        assert_eq!(back.xi, t.xi);
        assert_eq!(back.vertex_spaces, t.vertex_spaces);
    }

    #[test]
    fn detects_cycle_in_t() {
        let b = GraphBuilder::with_vertices(3);
        let t = TreeOfSpaces::from_parts(
            b.build(),
            vec![NodeKind::K, NodeKind::L, NodeKind::K, NodeKind::L],
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
            vec![0, 1, 2],
        )
        .unwrap();
        let r = t.structural_suite(None);
        assert!(!r.check("t-is-tree").unwrap().passed);
        assert!(!r.check("l-fibers-singleton").unwrap().passed);
    }
}
