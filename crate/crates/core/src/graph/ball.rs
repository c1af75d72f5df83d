use num_traits::Signed;

use super::{GraphError, MetricGraph, VertexId};
use crate::rational::Q;

/// Induced subgraph on the closed metric ball `B(center, radius)`.
#[derive(Clone, Debug)]
pub struct Ball {
    pub graph: MetricGraph,
    /// Parent id of each local vertex; local ids follow parent order.
    pub to_parent: Vec<VertexId>,
    pub center: VertexId,
    pub radius: Q,
}

pub fn ball(g: &MetricGraph, center: VertexId, radius: Q) -> Result<Ball, GraphError> {
    g.check_vertex(center)?;
    if radius.is_negative() {
        return Err(GraphError::ParameterOutOfRange(radius));
    }
    let row = g.dist_row(center);
    let keep: Vec<VertexId> =
        (0..g.vertex_count()).filter(|&v| row[v] != u64::MAX && g.unscale(row[v]) <= radius).collect();
    let local_center = keep.binary_search(&center).expect("center kept");
    let (graph, _) = g.induced(&keep);
    Ok(Ball { graph, to_parent: keep, center: local_center, radius })
}

impl Ball {
    /// Local vertices whose distance to the centre is at most `radius - margin`.
    ///
    /// Geodesics between two such vertices stay inside the ball whenever
    /// `margin >= radius / 2`, so ball distances agree with ambient ones there.
    pub fn safe_core(&self, margin: Q) -> Vec<VertexId> {
        let cutoff = self.radius - margin;
        let row = self.graph.dist_row(self.center);
        (0..self.graph.vertex_count()).filter(|&v| row[v] != u64::MAX && self.graph.unscale(row[v]) <= cutoff).collect()
    }

    pub fn core_radius(&self) -> Q {
        self.radius / Q::from_integer(2)
    }

    pub fn default_core(&self) -> Vec<VertexId> {
        self.safe_core(self.radius - self.core_radius())
    }
}
