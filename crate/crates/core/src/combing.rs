//! Bicombings on metric graphs: a choice of path between every pair of vertices.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{GeodesicPath, GraphError, GraphPoint, MetricGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("input combing is not geodesic between {0} and {1}")]
    NotGeodesicInput(VertexId, VertexId),
    #[error("no line defined between {0} and {1}")]
    Undefined(VertexId, VertexId),
    #[error("invalid endpoint: {0}")]
    InvalidPoint(String),
}

pub trait Combing: Send + Sync {
    fn graph(&self) -> &MetricGraph;

    /// The path `Gamma(x, y)`, parametrised proportionally to arclength.
    fn line(&self, x: VertexId, y: VertexId) -> Result<GeodesicPath, CombingError>;

    fn describe(&self) -> String {
        "combing".to_string()
    }
}

impl<C: Combing + ?Sized> Combing for Arc<C> {
    fn graph(&self) -> &MetricGraph {
        (**self).graph()
    }

    fn line(&self, x: VertexId, y: VertexId) -> Result<GeodesicPath, CombingError> {
        (**self).line(x, y)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<C: Combing + ?Sized> Combing for &C {
    fn graph(&self) -> &MetricGraph {
        (**self).graph()
    }

    fn line(&self, x: VertexId, y: VertexId) -> Result<GeodesicPath, CombingError> {
        (**self).line(x, y)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// Geodesics read off per-source canonical shortest-path trees.
#[derive(Clone, Debug)]
pub struct CanonicalCombing {
    graph: Arc<MetricGraph>,
}

impl CanonicalCombing {
    pub fn new(graph: Arc<MetricGraph>) -> Self {
        CanonicalCombing { graph }
    }

    pub fn graph_arc(&self) -> &Arc<MetricGraph> {
        &self.graph
    }
}

impl Combing for CanonicalCombing {
    fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    fn line(&self, x: VertexId, y: VertexId) -> Result<GeodesicPath, CombingError> {
        Ok(self.graph.canonical_geodesic(x, y)?)
    }

    fn describe(&self) -> String {
        "canonical geodesic combing".to_string()
    }
}

/// A base combing with some lines replaced by explicit paths.
pub struct OverrideCombing<C> {
    base: C,
    overrides: HashMap<(VertexId, VertexId), GeodesicPath>,
}

impl<C: Combing> OverrideCombing<C> {
    pub fn new(base: C) -> Self {
        OverrideCombing { base, overrides: HashMap::new() }
    }

    /// Replaces `Gamma(x, y)`; the path must start at `x` and end at `y`.
    pub fn set(&mut self, x: VertexId, y: VertexId, path: GeodesicPath) -> Result<(), CombingError> {
        if path.start() != &GraphPoint::Vertex(x) || path.end() != &GraphPoint::Vertex(y) {
            return Err(CombingError::Graph(GraphError::BadWalk(format!(
                "override for ({x}, {y}) has wrong endpoints"
            ))));
        }
        self.overrides.insert((x, y), path);
        Ok(())
    }
}

impl<C: Combing> Combing for OverrideCombing<C> {
    fn graph(&self) -> &MetricGraph {
        self.base.graph()
    }

    fn line(&self, x: VertexId, y: VertexId) -> Result<GeodesicPath, CombingError> {
        match self.overrides.get(&(x, y)) {
            Some(p) => Ok(p.clone()),
            None => self.base.line(x, y),
        }
    }

    fn describe(&self) -> String {
        format!("{} with {} replaced lines", self.base.describe(), self.overrides.len())
    }
}

/// Checks that `Gamma(x, y)` has length `d(x, y)` for every listed pair.
pub fn verify_geodesic_on(comb: &dyn Combing, vertices: &[VertexId]) -> Result<(), CombingError> {
    let g = comb.graph();
    for &x in vertices {
        for &y in vertices {
            let p = comb.line(x, y)?;
            if p.length() != g.dist(x, y)? {
                return Err(CombingError::NotGeodesicInput(x, y));
            }
        }
    }
    Ok(())
}
