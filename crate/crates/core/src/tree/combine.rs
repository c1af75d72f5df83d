use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::{NodeKind, TreeError, TreeOfSpaces};
use crate::combing::{CanonicalCombing, Combing, CombingError};
use crate::graph::{EdgeId, GeodesicPath, GraphPoint, MetricGraph, VertexId};
use crate::group::{Element, SymbolicSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Canonical combing of each vertex space on its own.
    Independent,
    /// One canonical combing per side, moved to the other copies by the action.
    Transported,
}

struct Local {
    graph: Arc<MetricGraph>,
    to_z: Vec<VertexId>,
    edge_to_z: Vec<EdgeId>,
    from_z: HashMap<VertexId, VertexId>,
    comb: CanonicalCombing,
}

/// A combing `Gamma_k` of every vertex space `X_k`.
pub struct VertexFamily {
    tos: Arc<TreeOfSpaces>,
    kind: FamilyKind,
    locals: Vec<Option<Local>>,
}

/// Edge of `z` from `u` to `v` of length `len` with the least id.
fn matching_edge(z: &MetricGraph, u: VertexId, v: VertexId, len: crate::rational::Q) -> Option<EdgeId> {
    z.neighbors(u).iter().filter(|&&(w, e)| w == v && z.edge(e).len == len).map(|&(_, e)| e).min()
}

impl VertexFamily {
    pub fn new(tos: Arc<TreeOfSpaces>, kind: FamilyKind) -> Result<Self, TreeError> {
        if kind == FamilyKind::Transported && (tos.group.is_none() || tos.symbolic.is_none()) {
            return Err(TreeError::SpecError("transported families need group data".into()));
        }
        let locals = (0..tos.kinds.len())
            .map(|k| {
                if tos.kinds[k] != NodeKind::K {
                    return None;
                }
                let to_z = tos.vertex_spaces[k].clone();
                let (g, edge_to_z) = tos.z.induced(&to_z);
                let graph = Arc::new(g);
                let from_z = to_z.iter().enumerate().map(|(i, &v)| (v, i)).collect();
                Some(Local { comb: CanonicalCombing::new(graph.clone()), graph, to_z, edge_to_z, from_z })
            })
            .collect();
        Ok(VertexFamily { tos, kind, locals })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn tree(&self) -> &Arc<TreeOfSpaces> {
        &self.tos
    }

    fn local(&self, k: usize) -> Result<&Local, CombingError> {
        self.locals
            .get(k)
            .and_then(|l| l.as_ref())
            .ok_or_else(|| CombingError::InvalidPoint(format!("node {k} is not a vertex space")))
    }

    fn independent(&self, k: usize, x: VertexId, y: VertexId) -> Result<GeodesicPath, CombingError> {
        let loc = self.local(k)?;
        let (Some(&lx), Some(&ly)) = (loc.from_z.get(&x), loc.from_z.get(&y)) else {
            return Err(CombingError::InvalidPoint(format!("{x} or {y} outside vertex space {k}")));
        };
        let p = loc.comb.line(lx, ly)?;
        Ok(p.map_ids(&self.tos.z, |v| loc.to_z[v], |e| loc.edge_to_z[e], &loc.graph)?)
    }

    /// `Gamma_k(x, y)` as a path in `Z`.
    pub fn line(&self, k: usize, x: VertexId, y: VertexId) -> Result<GeodesicPath, CombingError> {
        match self.kind {
            FamilyKind::Independent => self.independent(k, x, y),
            FamilyKind::Transported => {
                let gd = self.tos.group.as_ref().unwrap();
                let sym = self.tos.symbolic.as_ref().unwrap();
                let info = self.tos.copies[k]
                    .as_ref()
                    .ok_or_else(|| CombingError::InvalidPoint(format!("node {k} is not a copy")))?;
                let r = gd.reference_copy[info.side];
                let rinfo = self.tos.copies[r].as_ref().unwrap();
                let grp = sym.group();
                let h = grp.mul(&info.rep, &grp.inv(&rinfo.rep));
                let hi = grp.inv(&h);
                let outside = || CombingError::InvalidPoint(format!("translate of {x}, {y} leaves the truncation"));
                let (rx, ry) = (sym.act(&hi, x).ok_or_else(outside)?, sym.act(&hi, y).ok_or_else(outside)?);
                let p = self.independent(r, rx, ry)?;
                translate_path(sym, &h, &p).ok_or_else(outside)
            }
        }
    }
}

/// `g . path` for a path through vertices, or `None` if it leaves the truncation.
pub(crate) fn translate_path(sym: &SymbolicSpace, g: &Element, path: &GeodesicPath) -> Option<GeodesicPath> {
    let z = &sym.graph;
    let mut verts = Vec::with_capacity(path.nodes().len());
    for p in path.nodes() {
        verts.push(sym.act(g, p.as_vertex()?)?);
    }
    let mut edges = Vec::with_capacity(path.edges().len());
    for (i, &e) in path.edges().iter().enumerate() {
        edges.push(matching_edge(z, verts[i], verts[i + 1], z.edge(e).len)?);
    }
    GeodesicPath::from_vertex_walk(z, &verts, &edges).ok()
}

/// Concatenation of vertex-space lines along the path in the tree.
pub struct CombinedCombing {
    family: VertexFamily,
}

impl CombinedCombing {
    pub fn new(family: VertexFamily) -> Self {
        CombinedCombing { family }
    }

    pub fn family(&self) -> &VertexFamily {
        &self.family
    }

    pub fn tree(&self) -> &Arc<TreeOfSpaces> {
        &self.family.tos
    }

    /// Points `v = v_0, v_1, .., v_{m+1} = w` with the vertex space joining each consecutive pair.
    pub fn waypoints(&self, v: VertexId, w: VertexId) -> Result<Vec<(VertexId, Option<usize>)>, CombingError> {
        let tos = &self.family.tos;
        let t = &tos.t;
        let (a, b) = (tos.xi[v], tos.xi[w]);
        let nodes = t.canonical_geodesic(a, b)?.vertex_sequence().unwrap_or_default();
        let mut out: Vec<(VertexId, Option<usize>)> = vec![(v, None)];
        let mut pending = if tos.kinds[a] == NodeKind::K { Some(a) } else { None };
        for &n in nodes.iter().skip(1) {
            match tos.kinds[n] {
                NodeKind::K => pending = Some(n),
                NodeKind::L => {
                    let p = tos.glued_point[n].ok_or(CombingError::Undefined(v, w))?;
                    if p != out.last().unwrap().0 {
                        out.push((p, pending));
                    }
                }
            }
        }
        if w != out.last().unwrap().0 {
            out.push((w, pending));
        }
        Ok(out)
    }
}

impl Combing for CombinedCombing {
    fn graph(&self) -> &MetricGraph {
        &self.family.tos.z
    }

    fn line(&self, v: VertexId, w: VertexId) -> Result<GeodesicPath, CombingError> {
        let z = &self.family.tos.z;
        z.check_vertex(v)?;
        z.check_vertex(w)?;
        let pts = self.waypoints(v, w)?;
        let mut path = GeodesicPath::constant(GraphPoint::Vertex(v));
        for pair in pts.windows(2) {
            let (p, _) = pair[0];
            let (q, k) = pair[1];
            let k = k.ok_or(CombingError::Undefined(p, q))?;
            path = path.concat(&self.family.line(k, p, q)?)?;
        }
        Ok(path)
    }

    fn describe(&self) -> String {
        format!("combined {:?} family over {} vertex spaces", self.family.kind, self.family.tos.k_nodes().count())
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EquivarianceWitness {
    pub element: String,
    pub x: VertexId,
    pub y: VertexId,
    /// Vertex space, for family checks.
    pub node: Option<usize>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EquivarianceReport {
    pub checked: usize,
    /// Pairs whose image leaves the truncation.
    pub skipped: usize,
    pub violations: usize,
    pub witness: Option<EquivarianceWitness>,
}

impl EquivarianceReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn same_path(a: &GeodesicPath, b: &GeodesicPath) -> bool {
    a.vertex_sequence() == b.vertex_sequence() && a.cumulative() == b.cumulative()
}

/// Checks `Gamma(g x, g y) = g . Gamma(x, y)` for all listed elements and pairs of `core`.
pub fn combing_equivariance(
    comb: &dyn Combing,
    sym: &SymbolicSpace,
    elements: &[Element],
    core: &[VertexId],
) -> Result<EquivarianceReport, CombingError> {
    let mut rep = EquivarianceReport { checked: 0, skipped: 0, violations: 0, witness: None };
    for g in elements {
        for &x in core {
            for &y in core {
                let (Some(gx), Some(gy)) = (sym.act(g, x), sym.act(g, y)) else {
                    rep.skipped += 1;
                    continue;
                };
                let path = comb.line(x, y)?;
                let Some(moved) = translate_path(sym, g, &path) else {
                    rep.skipped += 1;
                    continue;
                };
                rep.checked += 1;
                if !same_path(&comb.line(gx, gy)?, &moved) {
                    rep.violations += 1;
                    rep.witness.get_or_insert(EquivarianceWitness { element: sym.group().format(g), x, y, node: None });
                }
            }
        }
    }
    Ok(rep)
}

/// Checks `h . Gamma_k(x, y) = Gamma_{hk}(hx, hy)` over vertex spaces, restricted to `core`.
pub fn family_equivariance(
    family: &VertexFamily,
    elements: &[Element],
    core: &[VertexId],
) -> Result<EquivarianceReport, CombingError> {
    let tos = &family.tos;
    let sym =
        tos.symbolic.as_ref().ok_or_else(|| CombingError::InvalidPoint("family check needs group data".into()))?;
    let mut in_core = vec![false; tos.z.vertex_count()];
    for &v in core {
        in_core[v] = true;
    }
    let mut rep = EquivarianceReport { checked: 0, skipped: 0, violations: 0, witness: None };
    for h in elements {
        for k in tos.k_nodes() {
            let own: Vec<VertexId> = tos.vertex_spaces[k].iter().copied().filter(|&v| tos.xi[v] == k).collect();
            let Some(hk) = own.first().and_then(|&v| sym.act(h, v)).map(|v| tos.xi[v]) else {
                rep.skipped += 1;
                continue;
            };
            let space: Vec<VertexId> = tos.vertex_spaces[k].iter().copied().filter(|&v| in_core[v]).collect();
            for &x in &space {
                for &y in &space {
                    let (Some(hx), Some(hy)) = (sym.act(h, x), sym.act(h, y)) else {
                        rep.skipped += 1;
                        continue;
                    };
                    let moved = match family.line(k, x, y) {
                        Ok(p) => translate_path(sym, h, &p),
                        Err(_) => None,
                    };
                    let target = family.line(hk, hx, hy).ok();
                    let (Some(moved), Some(target)) = (moved, target) else {
                        rep.skipped += 1;
                        continue;
                    };
                    rep.checked += 1;
                    if !same_path(&moved, &target) {
                        rep.violations += 1;
                        rep.witness.get_or_insert(EquivarianceWitness {
                            element: sym.group().format(h),
                            x,
                            y,
                            node: Some(k),
                        });
                    }
                }
            }
        }
    }
    Ok(rep)
}
