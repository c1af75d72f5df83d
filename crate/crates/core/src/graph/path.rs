use num_traits::{One, Signed, Zero};

use super::{EdgeId, GraphError, GraphPoint, MetricGraph, VertexId};
use crate::rational::Q;

/// Constant-speed path along a walk. Segment `i` runs from `nodes[i]` to
/// `nodes[i + 1]` inside edge `edges[i]`; every segment has positive length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicPath {
    nodes: Vec<GraphPoint>,
    edges: Vec<EdgeId>,
    cumulative: Vec<Q>,
}

fn position_on(g: &MetricGraph, edge: EdgeId, p: &GraphPoint) -> Result<Q, GraphError> {
    let e = g.edge(edge);
    match p {
        GraphPoint::Vertex(v) if *v == e.u => Ok(Q::zero()),
        GraphPoint::Vertex(v) if *v == e.v => Ok(e.len),
        GraphPoint::EdgeInterior { edge: f, offset } if *f == edge => Ok(*offset),
        _ => Err(GraphError::BadWalk(format!("point {p:?} is not on edge {edge}"))),
    }
}

impl GeodesicPath {
    pub fn constant(p: GraphPoint) -> Self {
        GeodesicPath { nodes: vec![p], edges: Vec::new(), cumulative: vec![Q::zero()] }
    }

    /// Builds a path from consecutive points and the edges carrying each segment.
    pub fn from_points(g: &MetricGraph, nodes: Vec<GraphPoint>, edges: Vec<EdgeId>) -> Result<Self, GraphError> {
        if nodes.is_empty() || edges.len() + 1 != nodes.len() {
            return Err(GraphError::BadWalk("need one more node than edges".into()));
        }
        let mut cumulative = vec![Q::zero()];
        for (i, &e) in edges.iter().enumerate() {
            if e >= g.edge_count() {
                return Err(GraphError::UnknownEdge(e));
            }
            g.check_point(&nodes[i])?;
            let a = position_on(g, e, &nodes[i])?;
            let b = position_on(g, e, &nodes[i + 1])?;
            let len = (b - a).abs();
            if len.is_zero() {
                return Err(GraphError::BadWalk(format!("segment {i} has zero length")));
            }
            cumulative.push(cumulative[i] + len);
        }
        g.check_point(nodes.last().unwrap())?;
        Ok(GeodesicPath { nodes, edges, cumulative })
    }

    pub fn from_vertex_walk(g: &MetricGraph, verts: &[VertexId], edges: &[EdgeId]) -> Result<Self, GraphError> {
        Self::from_points(g, verts.iter().map(|&v| GraphPoint::Vertex(v)).collect(), edges.to_vec())
    }

    /// Walk through consecutive adjacent vertices using the shortest joining edges.
    pub fn from_vertices(g: &MetricGraph, verts: &[VertexId]) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(verts.len().saturating_sub(1));
        for w in verts.windows(2) {
            let e = g
                .edge_between(w[0], w[1])
                .ok_or_else(|| GraphError::BadWalk(format!("{} and {} are not adjacent", w[0], w[1])))?;
            edges.push(e);
        }
        Self::from_vertex_walk(g, verts, &edges)
    }

    pub fn nodes(&self) -> &[GraphPoint] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// Arclength at each node.
    pub fn cumulative(&self) -> &[Q] {
        &self.cumulative
    }

    pub fn length(&self) -> Q {
        *self.cumulative.last().unwrap()
    }

    pub fn start(&self) -> &GraphPoint {
        &self.nodes[0]
    }

    pub fn end(&self) -> &GraphPoint {
        self.nodes.last().unwrap()
    }

    pub fn segment_count(&self) -> usize {
        self.edges.len()
    }

    /// Node parameters `t_i / t_total` in `[0, 1]`.
    pub fn breakpoints(&self) -> Vec<Q> {
        let total = self.length();
        if total.is_zero() {
            return vec![Q::zero()];
        }
        self.cumulative.iter().map(|c| c / total).collect()
    }

    pub fn vertex_sequence(&self) -> Option<Vec<VertexId>> {
        self.nodes.iter().map(|p| p.as_vertex()).collect()
    }

    /// Point at arclength `s` from the start.
    pub fn eval_arclength(&self, g: &MetricGraph, s: Q) -> Result<GraphPoint, GraphError> {
        let total = self.length();
        if s.is_negative() || s > total {
            return Err(GraphError::ParameterOutOfRange(s));
        }
        let i = self.cumulative.partition_point(|c| *c <= s);
        // cumulative[i-1] <= s < cumulative[i]
        if i == 0 {
            return Ok(self.nodes[0].clone());
        }
        let seg = i - 1;
        if self.cumulative[seg] == s || seg >= self.edges.len() {
            return Ok(self.nodes[seg].clone());
        }
        let e = self.edges[seg];
        let a = position_on(g, e, &self.nodes[seg])?;
        let b = position_on(g, e, &self.nodes[seg + 1])?;
        let local = s - self.cumulative[seg];
        let pos = if b > a { a + local } else { a - local };
        g.point_on_edge(e, pos)
    }

    /// Point at parameter `t` in `[0, 1]`, constant speed.
    pub fn eval(&self, g: &MetricGraph, t: Q) -> Result<GraphPoint, GraphError> {
        if t.is_negative() || t > Q::one() {
            return Err(GraphError::ParameterOutOfRange(t));
        }
        self.eval_arclength(g, t * self.length())
    }

    /// Appends `other`, whose start must coincide with this path's end.
    pub fn concat(&self, other: &GeodesicPath) -> Result<GeodesicPath, GraphError> {
        if self.end() != other.start() {
            return Err(GraphError::BadWalk(format!(
                "cannot join path ending at {:?} to path starting at {:?}",
                self.end(),
                other.start()
            )));
        }
        let mut out = self.clone();
        let base = self.length();
        for i in 0..other.edges.len() {
            out.edges.push(other.edges[i]);
            out.nodes.push(other.nodes[i + 1].clone());
            out.cumulative.push(base + other.cumulative[i + 1]);
        }
        Ok(out)
    }

    pub fn reversed(&self) -> GeodesicPath {
        let total = self.length();
        GeodesicPath {
            nodes: self.nodes.iter().rev().cloned().collect(),
            edges: self.edges.iter().rev().copied().collect(),
            cumulative: self.cumulative.iter().rev().map(|c| total - c).collect(),
        }
    }

    /// Relabels vertices and edges, e.g. to move a path into a larger graph.
    pub fn map_ids(
        &self,
        target: &MetricGraph,
        vmap: impl Fn(VertexId) -> VertexId,
        emap: impl Fn(EdgeId) -> EdgeId,
        source: &MetricGraph,
    ) -> Result<GeodesicPath, GraphError> {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for p in &self.nodes {
            nodes.push(match p {
                GraphPoint::Vertex(v) => GraphPoint::Vertex(vmap(*v)),
                GraphPoint::EdgeInterior { edge, offset } => {
                    let te = emap(*edge);
                    let se = source.edge(*edge);
                    let tg = target.edge(te);
                    let same = vmap(se.u) == tg.u;
                    let off = if same { *offset } else { tg.len - offset };
                    GraphPoint::EdgeInterior { edge: te, offset: off }
                }
            });
        }
        let edges = self.edges.iter().map(|&e| emap(e)).collect();
        GeodesicPath::from_points(target, nodes, edges)
    }

    /// Vertex indices of nodes that are vertices, with their node index.
    pub fn vertex_nodes(&self) -> impl Iterator<Item = (usize, VertexId)> + '_ {
        self.nodes.iter().enumerate().filter_map(|(i, p)| p.as_vertex().map(|v| (i, v)))
    }

    /// Sub-walk between node indices `i <= j`.
    pub fn subpath(&self, i: usize, j: usize) -> GeodesicPath {
        let base = self.cumulative[i];
        GeodesicPath {
            nodes: self.nodes[i..=j].to_vec(),
            edges: self.edges[i..j].to_vec(),
            cumulative: self.cumulative[i..=j].iter().map(|c| c - base).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::rational::{q, qi};

    fn path_graph(lens: &[Q]) -> MetricGraph {
        let mut b = GraphBuilder::with_vertices(lens.len() + 1);
        for (i, l) in lens.iter().enumerate() {
            b.add_edge(i, i + 1, *l).unwrap();
        }
        b.build()
    }

    #[test]
    fn eval_interpolates_on_segments() {
        let g = path_graph(&[qi(1), qi(3)]);
        let p = GeodesicPath::from_vertices(&g, &[0, 1, 2]).unwrap();
        assert_eq!(p.length(), qi(4));
        assert_eq!(p.eval(&g, q(1, 4)).unwrap(), GraphPoint::Vertex(1));
        assert_eq!(p.eval(&g, q(1, 2)).unwrap(), GraphPoint::EdgeInterior { edge: 1, offset: qi(1) });
        assert_eq!(p.eval(&g, qi(1)).unwrap(), GraphPoint::Vertex(2));
        assert_eq!(p.breakpoints(), vec![qi(0), q(1, 4), qi(1)]);
        let r = p.reversed();
        assert_eq!(r.eval(&g, q(1, 2)).unwrap(), GraphPoint::EdgeInterior { edge: 1, offset: qi(1) });
    }

    #[test]
    fn interior_start_points() {
        let g = path_graph(&[qi(2), qi(2)]);
        let start = GraphPoint::EdgeInterior { edge: 0, offset: q(1, 2) };
        let p = GeodesicPath::from_points(&g, vec![start, GraphPoint::Vertex(1), GraphPoint::Vertex(2)], vec![0, 1])
            .unwrap();
        assert_eq!(p.length(), q(7, 2));
        assert_eq!(p.eval_arclength(&g, qi(1)).unwrap(), GraphPoint::EdgeInterior { edge: 0, offset: q(3, 2) });
    }
}
