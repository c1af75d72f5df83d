use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::Zero;

use super::{EdgeId, GeodesicPath, GraphError, GraphPoint, MetricGraph, VertexId};
use crate::rational::Q;

pub const UNREACHABLE: u64 = u64::MAX;

/// Predecessor in the canonical shortest-path tree of some source.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parent {
    pub vertex: u32,
    pub edge: u32,
}

impl Parent {
    pub const NONE: Parent = Parent { vertex: u32::MAX, edge: u32::MAX };

    pub fn is_none(&self) -> bool {
        self.vertex == u32::MAX
    }
}

impl MetricGraph {
    fn dijkstra(&self, src: VertexId) -> Box<[u64]> {
        let n = self.vertex_count();
        let mut dist = vec![UNREACHABLE; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0;
        heap.push(Reverse((0u64, src)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, e) in &self.adj[v] {
                let nd = d + self.scaled[e];
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        dist.into_boxed_slice()
    }

    /// Scaled distances from `src`; `u64::MAX` marks other components.
    pub fn dist_row(&self, src: VertexId) -> &[u64] {
        self.dist_rows[src].get_or_init(|| self.dijkstra(src))
    }

    /// Canonical shortest-path tree of `src`: each vertex records its
    /// smallest-id predecessor, smallest edge id among parallel edges.
    pub fn spt_row(&self, src: VertexId) -> &[Parent] {
        self.spt_rows[src].get_or_init(|| {
            let dist = self.dist_row(src);
            let mut parent = vec![Parent::NONE; self.vertex_count()];
            for (w, slot) in parent.iter_mut().enumerate() {
                if w == src || dist[w] == UNREACHABLE {
                    continue;
                }
                for &(p, e) in &self.adj[w] {
                    if dist[p] != UNREACHABLE && dist[p] + self.scaled[e] == dist[w] {
                        *slot = Parent { vertex: p as u32, edge: e as u32 };
                        break;
                    }
                }
            }
            parent.into_boxed_slice()
        })
    }

    pub fn dist_scaled(&self, u: VertexId, v: VertexId) -> Option<u64> {
        let d = self.dist_row(u)[v];
        (d != UNREACHABLE).then_some(d)
    }

    pub fn dist(&self, u: VertexId, v: VertexId) -> Result<Q, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        self.dist_scaled(u, v).map(|d| self.unscale(d)).ok_or(GraphError::DisconnectedPair(u, v))
    }

    fn endpoints_with_offsets(&self, p: &GraphPoint) -> Vec<(VertexId, Q)> {
        match p {
            GraphPoint::Vertex(v) => vec![(*v, Q::zero())],
            GraphPoint::EdgeInterior { edge, offset } => {
                let e = &self.edges[*edge];
                vec![(e.u, *offset), (e.v, e.len - offset)]
            }
        }
    }

    /// Exact distance between two points of the geometric realisation.
    pub fn point_distance(&self, p: &GraphPoint, q: &GraphPoint) -> Result<Q, GraphError> {
        self.check_point(p)?;
        self.check_point(q)?;
        let mut best: Option<Q> = None;
        if let (GraphPoint::EdgeInterior { edge: e1, offset: o1 }, GraphPoint::EdgeInterior { edge: e2, offset: o2 }) =
            (p, q)
        {
            if e1 == e2 {
                best = Some(if o1 > o2 { o1 - o2 } else { o2 - o1 });
            }
        }
        for (x, dx) in self.endpoints_with_offsets(p) {
            let row = self.dist_row(x);
            for (y, dy) in self.endpoints_with_offsets(q) {
                if row[y] == UNREACHABLE {
                    continue;
                }
                let c = dx + self.unscale(row[y]) + dy;
                if best.is_none_or(|b| c < b) {
                    best = Some(c);
                }
            }
        }
        best.ok_or_else(|| {
            let a = self.endpoints_with_offsets(p)[0].0;
            let b = self.endpoints_with_offsets(q)[0].0;
            GraphError::DisconnectedPair(a, b)
        })
    }

    /// Geodesic from `u` to `v` under the canonical tie-break.
    pub fn canonical_geodesic(&self, u: VertexId, v: VertexId) -> Result<GeodesicPath, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if !self.same_component(u, v) {
            return Err(GraphError::DisconnectedPair(u, v));
        }
        let spt = self.spt_row(u);
        let mut verts = vec![v];
        let mut edges: Vec<EdgeId> = Vec::new();
        let mut cur = v;
        while cur != u {
            let p = spt[cur];
            edges.push(p.edge as usize);
            cur = p.vertex as usize;
            verts.push(cur);
        }
        verts.reverse();
        edges.reverse();
        GeodesicPath::from_vertex_walk(self, &verts, &edges)
    }

    /// First pair of `tested` vertices with a geodesic leaving `set`, if any.
    ///
    /// `set` must be sorted. A pair fails when the induced distance differs
    /// from the ambient one or some outside neighbour of `set` lies on a
    /// geodesic between them.
    pub fn convexity_violation(&self, set: &[VertexId], tested: &[VertexId]) -> Option<(VertexId, VertexId)> {
        if tested.is_empty() {
            return None;
        }
        let mut inside = vec![false; self.vertex_count()];
        for &v in set {
            inside[v] = true;
        }
        let mut boundary: Vec<VertexId> =
            set.iter().flat_map(|&v| self.neighbors(v).iter().map(|&(w, _)| w)).filter(|&w| !inside[w]).collect();
        boundary.sort_unstable();
        boundary.dedup();
        let (local, _) = self.induced(set);
        for &u in tested {
            let row = self.dist_row(u);
            let lrow = local.dist_row(set.binary_search(&u).ok()?);
            for &v in tested {
                let lv = set.binary_search(&v).ok()?;
                if lrow[lv] == UNREACHABLE || self.unscale(row[v]) != local.unscale(lrow[lv]) {
                    return Some((u, v));
                }
                let vr = self.dist_row(v);
                for &w in &boundary {
                    if row[w] != UNREACHABLE && vr[w] != UNREACHABLE && row[w] + vr[w] == row[v] {
                        return Some((u, v));
                    }
                }
            }
        }
        None
    }

    /// Eccentricity-style helper: largest finite distance between listed vertices.
    pub fn diameter_of(&self, vertices: &[VertexId]) -> Q {
        let mut best = 0u64;
        for &u in vertices {
            let row = self.dist_row(u);
            for &v in vertices {
                if row[v] != UNREACHABLE {
                    best = best.max(row[v]);
                }
            }
        }
        self.unscale(best)
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::{GraphBuilder, GraphPoint};
    use crate::rational::{q, qi};

    fn cycle(n: usize) -> crate::graph::MetricGraph {
        let mut b = GraphBuilder::with_vertices(n);
        for i in 0..n {
            b.add_edge(i, (i + 1) % n, qi(1)).unwrap();
        }
        b.build()
    }

    #[test]
    fn four_cycle_tie_break_goes_through_lower_vertex() {
        let g = cycle(4);
        let p = g.canonical_geodesic(0, 2).unwrap();
        assert_eq!(p.vertex_sequence().unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn point_distance_same_edge_and_across() {
        let g = cycle(4);
        let a = GraphPoint::EdgeInterior { edge: 0, offset: q(1, 4) };
        let b = GraphPoint::EdgeInterior { edge: 0, offset: q(3, 4) };
        assert_eq!(g.point_distance(&a, &b).unwrap(), q(1, 2));
        let c = GraphPoint::EdgeInterior { edge: 2, offset: q(1, 2) };
        // edge 2 joins 2 and 3; a sits 1/4 from vertex 0
        assert_eq!(g.point_distance(&a, &c).unwrap(), q(7, 4));
    }

    #[test]
    fn parallel_edges_pick_shortest() {
        let mut b = GraphBuilder::with_vertices(2);
        b.add_edge(0, 1, qi(3)).unwrap();
        b.add_edge(0, 1, qi(2)).unwrap();
        let g = b.build();
        assert_eq!(g.dist(0, 1).unwrap(), qi(2));
        let p = g.canonical_geodesic(0, 1).unwrap();
        assert_eq!(p.edges(), &[1]);
    }
}
