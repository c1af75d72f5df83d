use std::sync::Arc;

use num_traits::{Signed, Zero};

use super::{ConeError, ConedSpace};
use crate::combing::{Combing, CombingError};
use crate::graph::{EdgeId, GeodesicPath, GraphPoint, MetricGraph, VertexId};
use crate::rational::{qi, Q};

/// A point of a coned graph: a base vertex, a point on the cone edge of an
/// attachment at `height` above the base, or an apex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConedPoint {
    Base(VertexId),
    Radial { attachment: usize, height: Q },
    Apex(usize),
}

/// Route from a point down to the base: points and edges walked, base vertex
/// reached, length, and the attachment used (`None` for base points).
struct Leg {
    nodes: Vec<GraphPoint>,
    edges: Vec<EdgeId>,
    base: VertexId,
    cost: Q,
    via: Option<usize>,
}

/// Extension of a combing on the base to the coned graph.
pub struct HatCombing<C: Combing> {
    space: Arc<ConedSpace>,
    base: C,
}

impl<C: Combing> HatCombing<C> {
    pub fn new(space: Arc<ConedSpace>, base: C) -> Self {
        HatCombing { space, base }
    }

    pub fn space(&self) -> &Arc<ConedSpace> {
        &self.space
    }

    pub fn base_combing(&self) -> &C {
        &self.base
    }

    pub fn point_of_vertex(&self, v: VertexId) -> Option<ConedPoint> {
        if self.space.is_base_vertex(v) {
            Some(ConedPoint::Base(v))
        } else {
            self.space.apex_label(v).map(ConedPoint::Apex)
        }
    }

    fn normalize(&self, p: ConedPoint) -> Result<ConedPoint, ConeError> {
        let sp = &self.space;
        match p {
            ConedPoint::Base(v) if sp.is_base_vertex(v) => Ok(p),
            ConedPoint::Apex(l) if l < sp.apex.len() => Ok(p),
            ConedPoint::Radial { attachment, height } if attachment < sp.cone_edge.len() => {
                let a = sp.spec.attachments[attachment];
                let d = sp.spec.labels[a.label].radius;
                if height.is_negative() || height > d {
                    Err(ConeError::InvalidConeSpec(format!("height {height} outside [0, {d}]")))
                } else if height.is_zero() {
                    Ok(ConedPoint::Base(a.vertex))
                } else if height == d {
                    Ok(ConedPoint::Apex(a.label))
                } else {
                    Ok(p)
                }
            }
            _ => Err(ConeError::InvalidConeSpec(format!("{p:?} is not a point of the coned space"))),
        }
    }

    pub fn graph_point(&self, p: ConedPoint) -> Result<GraphPoint, ConeError> {
        Ok(match self.normalize(p)? {
            ConedPoint::Base(v) => GraphPoint::Vertex(v),
            ConedPoint::Apex(l) => GraphPoint::Vertex(self.space.apex[l]),
            ConedPoint::Radial { attachment, height } => {
                GraphPoint::EdgeInterior { edge: self.space.cone_edge[attachment], offset: height }
            }
        })
    }

    fn legs(&self, p: ConedPoint) -> Vec<Leg> {
        let sp = &self.space;
        match p {
            ConedPoint::Base(v) => {
                vec![Leg { nodes: vec![GraphPoint::Vertex(v)], edges: vec![], base: v, cost: qi(0), via: None }]
            }
            ConedPoint::Apex(l) => {
                let d = sp.spec.labels[l].radius;
                sp.fibers[l]
                    .iter()
                    .map(|&e| {
                        let v = sp.spec.attachments[e].vertex;
                        Leg {
                            nodes: vec![GraphPoint::Vertex(sp.apex[l]), GraphPoint::Vertex(v)],
                            edges: vec![sp.cone_edge[e]],
                            base: v,
                            cost: d,
                            via: Some(e),
                        }
                    })
                    .collect()
            }
            ConedPoint::Radial { attachment, height } => {
                let a = sp.spec.attachments[attachment];
                let d = sp.spec.labels[a.label].radius;
                let here = GraphPoint::EdgeInterior { edge: sp.cone_edge[attachment], offset: height };
                let mut out = vec![Leg {
                    nodes: vec![here.clone(), GraphPoint::Vertex(a.vertex)],
                    edges: vec![sp.cone_edge[attachment]],
                    base: a.vertex,
                    cost: height,
                    via: Some(attachment),
                }];
                for &e in &sp.fibers[a.label] {
                    if e == attachment {
                        continue;
                    }
                    let v = sp.spec.attachments[e].vertex;
                    out.push(Leg {
                        nodes: vec![here.clone(), GraphPoint::Vertex(sp.apex[a.label]), GraphPoint::Vertex(v)],
                        edges: vec![sp.cone_edge[attachment], sp.cone_edge[e]],
                        base: v,
                        cost: d - height + d,
                        via: Some(e),
                    });
                }
                out.sort_by_key(|l| l.via);
                out
            }
        }
    }

    /// Route inside a single cone, when both points lie in the same one.
    fn within_cone(&self, p: ConedPoint, q: ConedPoint) -> Option<(Vec<GraphPoint>, Vec<EdgeId>, Q)> {
        let sp = &self.space;
        let place = |x: ConedPoint| -> Option<(usize, Option<(usize, Q)>)> {
            match x {
                ConedPoint::Apex(l) => Some((l, None)),
                ConedPoint::Radial { attachment, height } => {
                    Some((sp.spec.attachments[attachment].label, Some((attachment, height))))
                }
                ConedPoint::Base(_) => None,
            }
        };
        let (l1, r1) = place(p)?;
        let (l2, r2) = place(q)?;
        if l1 != l2 {
            return None;
        }
        let d = sp.spec.labels[l1].radius;
        let apex = GraphPoint::Vertex(sp.apex[l1]);
        let at = |e: usize, h: Q| GraphPoint::EdgeInterior { edge: sp.cone_edge[e], offset: h };
        Some(match (r1, r2) {
            (None, None) => (vec![apex], vec![], qi(0)),
            (Some((e, h)), None) => (vec![at(e, h), apex], vec![sp.cone_edge[e]], d - h),
            (None, Some((e, h))) => (vec![apex, at(e, h)], vec![sp.cone_edge[e]], d - h),
            (Some((e, h)), Some((f, k))) if e == f => {
                if h == k {
                    (vec![at(e, h)], vec![], qi(0))
                } else {
                    (vec![at(e, h), at(e, k)], vec![sp.cone_edge[e]], (h - k).abs())
                }
            }
            (Some((e, h)), Some((f, k))) => {
                (vec![at(e, h), apex, at(f, k)], vec![sp.cone_edge[e], sp.cone_edge[f]], d - h + d - k)
            }
        })
    }

    fn base_line(&self, x: VertexId, y: VertexId) -> Result<GeodesicPath, CombingError> {
        let path = self.base.line(x, y)?;
        let d = self.space.spec.base.dist(x, y)?;
        if path.length() != d {
            return Err(CombingError::NotGeodesicInput(x, y));
        }
        Ok(path)
    }

    /// The extended line from `p` to `q`.
    pub fn line_between(&self, p: ConedPoint, q: ConedPoint) -> Result<GeodesicPath, CombingError> {
        let bad = |e: ConeError| CombingError::InvalidPoint(e.to_string());
        let p = self.normalize(p).map_err(bad)?;
        let q = self.normalize(q).map_err(bad)?;
        let g: &MetricGraph = &self.space.graph;
        if p == q {
            return Ok(GeodesicPath::constant(self.graph_point(p).map_err(bad)?));
        }
        if let (ConedPoint::Base(x), ConedPoint::Base(y)) = (p, q) {
            return self.base_line(x, y);
        }
        let base = &self.space.spec.base;
        let (l1, l2) = (self.legs(p), self.legs(q));
        let mut best: Option<(Q, Option<usize>, Option<usize>, usize, usize)> = None;
        for (i, a) in l1.iter().enumerate() {
            let row = base.dist_row(a.base);
            for (j, b) in l2.iter().enumerate() {
                let raw = row[b.base];
                if raw == u64::MAX {
                    continue;
                }
                let total = a.cost + base.unscale(raw) + b.cost;
                let better = match &best {
                    None => true,
                    Some((t, e1, e2, _, _)) => (total, a.via, b.via) < (*t, *e1, *e2),
                };
                if better {
                    best = Some((total, a.via, b.via, i, j));
                }
            }
        }
        if let Some((nodes, edges, len)) = self.within_cone(p, q) {
            if best.as_ref().is_none_or(|b| len < b.0) {
                return Ok(GeodesicPath::from_points(g, nodes, edges)?);
            }
        }
        let (_, _, _, i, j) =
            best.ok_or_else(|| CombingError::InvalidPoint(format!("{p:?} and {q:?} are not connected")))?;
        let (a, b) = (&l1[i], &l2[j]);
        let mid = self.base_line(a.base, b.base)?;
        let first = GeodesicPath::from_points(g, a.nodes.clone(), a.edges.clone())?;
        let mut last_nodes = b.nodes.clone();
        last_nodes.reverse();
        let mut last_edges = b.edges.clone();
        last_edges.reverse();
        let last = GeodesicPath::from_points(g, last_nodes, last_edges)?;
        Ok(first.concat(&mid)?.concat(&last)?)
    }
}

impl<C: Combing> Combing for HatCombing<C> {
    fn graph(&self) -> &MetricGraph {
        &self.space.graph
    }

    fn line(&self, x: VertexId, y: VertexId) -> Result<GeodesicPath, CombingError> {
        let p = self.point_of_vertex(x).ok_or(CombingError::Undefined(x, y))?;
        let q = self.point_of_vertex(y).ok_or(CombingError::Undefined(x, y))?;
        self.line_between(p, q)
    }

    fn describe(&self) -> String {
        format!("extension of {} over {} cones", self.base.describe(), self.space.apex.len())
    }
}

/// Number of maximal runs of cone-edge segments along `path`.
pub fn cone_crossings(space: &ConedSpace, path: &GeodesicPath) -> usize {
    let mut runs = 0;
    let mut inside = false;
    for &e in path.edges() {
        let c = space.is_cone_edge(e);
        if c && !inside {
            runs += 1;
        }
        inside = c;
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combing::CanonicalCombing;
    use crate::coned::{build_coned_space, Attachment, ConeLabel, ConeMetric, ConeSpec};
    use crate::graph::GraphBuilder;
    use crate::rational::q;

    fn fixture() -> Arc<ConedSpace> {
        let mut b = GraphBuilder::with_vertices(5);
        for i in 0..4 {
            b.add_edge(i, i + 1, qi(1)).unwrap();
        }
        let spec = ConeSpec {
            base: Arc::new(b.build()),
            attachments: vec![
                Attachment { vertex: 0, label: 0 },
                Attachment { vertex: 1, label: 0 },
                Attachment { vertex: 3, label: 1 },
            ],
            labels: vec![
                ConeLabel { name: "A".into(), metric: ConeMetric::Graph, radius: qi(2) },
                ConeLabel { name: "B".into(), metric: ConeMetric::Graph, radius: qi(2) },
            ],
        };
        Arc::new(build_coned_space(spec).unwrap())
    }

    #[test]
    fn radial_breakpoint() {
        let sp = fixture();
        let h = HatCombing::new(sp.clone(), CanonicalCombing::new(sp.spec.base.clone()));
        let p = h.line_between(ConedPoint::Radial { attachment: 1, height: q(1, 2) }, ConedPoint::Base(3)).unwrap();
        assert_eq!(p.length(), q(5, 2));
        assert_eq!(p.breakpoints()[1], q(1, 5));
        assert_eq!(cone_crossings(&sp, &p), 1);
        let c = h.line_between(ConedPoint::Apex(0), ConedPoint::Apex(0)).unwrap();
        assert_eq!(c.segment_count(), 0);
    }

    #[test]
    fn lines_are_geodesic_and_cross_twice_at_most() {
        let sp = fixture();
        let h = HatCombing::new(sp.clone(), CanonicalCombing::new(sp.spec.base.clone()));
        let g = &sp.graph;
        for x in 0..g.vertex_count() {
            for y in 0..g.vertex_count() {
                let p = h.line(x, y).unwrap();
                assert_eq!(p.length(), g.dist(x, y).unwrap(), "{x} {y}");
                assert!(cone_crossings(&sp, &p) <= 2);
                if x < 5 && y < 5 {
                    assert_eq!(p, h.base_combing().line(x, y).unwrap());
                }
            }
        }
    }
}
