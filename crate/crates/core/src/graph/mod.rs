//! Finite metric graphs with exact rational edge lengths.

mod ball;
pub mod io;
mod metric;
mod path;

use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::{lcm_denominators, Q};
use crate::unionfind::UnionFind;

pub use ball::{ball, Ball};
pub use metric::Parent;
pub use path::GeodesicPath;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {edge} has non-positive length {len}")]
    InvalidLength { edge: EdgeId, len: Q },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertices {0} and {1} lie in different components")]
    DisconnectedPair(VertexId, VertexId),
    #[error("offset {offset} outside edge {edge} of length {len}")]
    OffsetOutOfRange { edge: EdgeId, offset: Q, len: Q },
    #[error("parameter {0} outside [0, 1]")]
    ParameterOutOfRange(Q),
    #[error("malformed walk: {0}")]
    BadWalk(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub len: Q,
}

impl Edge {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A point of the geometric realisation. Interior offsets are measured from
/// the edge's `u` endpoint and lie strictly between 0 and the edge length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphPoint {
    Vertex(VertexId),
    EdgeInterior { edge: EdgeId, offset: Q },
}

impl GraphPoint {
    pub fn as_vertex(&self) -> Option<VertexId> {
        match self {
            GraphPoint::Vertex(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices(n: usize) -> Self {
        GraphBuilder { labels: vec![String::new(); n], edges: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> VertexId {
        self.labels.push(label.into());
        self.labels.len() - 1
    }

    pub fn set_label(&mut self, v: VertexId, label: impl Into<String>) {
        self.labels[v] = label.into();
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, len: Q) -> Result<EdgeId, GraphError> {
        let n = self.labels.len();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::UnknownVertex(x));
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !len.is_positive() {
            return Err(GraphError::InvalidLength { edge: self.edges.len(), len });
        }
        self.edges.push(Edge { u, v, len });
        Ok(self.edges.len() - 1)
    }

    pub fn build(self) -> MetricGraph {
        MetricGraph::from_parts(self.labels, self.edges)
    }
}

/// Finite graph with positive rational edge lengths and a lazily cached
/// exact path metric.
#[derive(Debug)]
pub struct MetricGraph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    scale: i128,
    scaled: Vec<u64>,
    component: Vec<usize>,
    dist_rows: Vec<OnceLock<Box<[u64]>>>,
    spt_rows: Vec<OnceLock<Box<[Parent]>>>,
}

impl Clone for MetricGraph {
    fn clone(&self) -> Self {
        MetricGraph::from_parts(self.labels.clone(), self.edges.clone())
    }
}

impl MetricGraph {
    fn from_parts(labels: Vec<String>, edges: Vec<Edge>) -> Self {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        let mut uf = UnionFind::new(n);
        for (i, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
            uf.union(e.u, e.v);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        let scale = lcm_denominators(edges.iter().map(|e| &e.len));
        let scaled = edges
            .iter()
            .map(|e| {
                let s = e.len * Q::from_integer(scale);
                debug_assert!(s.is_integer());
                u64::try_from(s.to_integer()).expect("edge length overflows scaled range")
            })
            .collect();
        let (component, _) = uf.classes();
        MetricGraph {
            labels,
            edges,
            adj,
            scale,
            scaled,
            component,
            dist_rows: (0..n).map(|_| OnceLock::new()).collect(),
            spt_rows: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Neighbours as `(vertex, edge)` pairs sorted by vertex then edge id.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    /// Common denominator of all edge lengths.
    pub fn scale(&self) -> i128 {
        self.scale
    }

    /// Edge length multiplied by [`scale`](Self::scale).
    pub fn scaled_len(&self, e: EdgeId) -> u64 {
        self.scaled[e]
    }

    pub fn component(&self, v: VertexId) -> usize {
        self.component[v]
    }

    pub fn same_component(&self, u: VertexId, v: VertexId) -> bool {
        self.component[u] == self.component[v]
    }

    pub fn unscale(&self, x: u64) -> Q {
        Q::new(x as i128, self.scale)
    }

    /// Shortest edge joining `u` and `v`, smallest id among equals.
    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let a = &self.adj[u];
        let start = a.partition_point(|&(w, _)| w < v);
        a[start..].iter().take_while(|&&(w, _)| w == v).map(|&(_, e)| e).min_by_key(|&e| (self.scaled[e], e))
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v))
        }
    }

    /// Normalises a position on an edge: endpoints become vertices.
    pub fn point_on_edge(&self, edge: EdgeId, offset: Q) -> Result<GraphPoint, GraphError> {
        let e = self.edges.get(edge).ok_or(GraphError::UnknownEdge(edge))?;
        if offset.is_negative() || offset > e.len {
            return Err(GraphError::OffsetOutOfRange { edge, offset, len: e.len });
        }
        if offset.is_zero() {
            Ok(GraphPoint::Vertex(e.u))
        } else if offset == e.len {
            Ok(GraphPoint::Vertex(e.v))
        } else {
            Ok(GraphPoint::EdgeInterior { edge, offset })
        }
    }

    pub fn check_point(&self, p: &GraphPoint) -> Result<(), GraphError> {
        match p {
            GraphPoint::Vertex(v) => self.check_vertex(*v),
            GraphPoint::EdgeInterior { edge, offset } => {
                let e = self.edges.get(*edge).ok_or(GraphError::UnknownEdge(*edge))?;
                if !offset.is_positive() || *offset >= e.len {
                    return Err(GraphError::OffsetOutOfRange { edge: *edge, offset: *offset, len: e.len });
                }
                Ok(())
            }
        }
    }

    /// Subgraph induced on `vertices` (kept in the given order), with the
    /// parent edge id of every kept edge.
    pub fn induced(&self, vertices: &[VertexId]) -> (MetricGraph, Vec<EdgeId>) {
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut b = GraphBuilder::new();
        for &v in vertices {
            b.add_vertex(self.labels[v].clone());
        }
        let mut map = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if local[e.u] != usize::MAX && local[e.v] != usize::MAX {
                b.add_edge(local[e.u], local[e.v], e.len).expect("induced edge");
                map.push(i);
            }
        }
        (b.build(), map)
    }

    pub fn is_connected(&self) -> bool {
        self.component.iter().all(|&c| c == 0)
    }
}
