//! Integer evaluation of combing lines.
//!
//! Lengths are measured in ticks: graph-scaled units times [`SUBDIV`]. Every
//! grid position `k/8 * L`, every breakpoint and every `c * position` with
//! `c = k/8` lands on a whole tick, so the hot loops never touch rationals.

use std::sync::Arc;

use crate::combing::{Combing, CombingError};
use crate::graph::{GeodesicPath, GraphPoint, MetricGraph, VertexId};
use crate::rational::Q;

pub type Tick = i64;

pub const SUBDIV: i64 = 64;
pub const GRID_STEPS: i64 = 8;
const FAR: Tick = i64::MAX / 8;
const NO_EDGE: u32 = u32::MAX;

/// A point of the realisation: vertex (`a == b`) or interior of `edge`, at
/// distance `oa` from endpoint `a` (the edge's `u`) and `ob` from `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Loc {
    pub edge: u32,
    pub a: u32,
    pub b: u32,
    pub oa: Tick,
    pub ob: Tick,
}

impl Loc {
    pub fn vertex(v: VertexId) -> Loc {
        Loc { edge: NO_EDGE, a: v as u32, b: v as u32, oa: 0, ob: 0 }
    }

    pub fn is_vertex(&self) -> bool {
        self.edge == NO_EDGE
    }

    pub fn as_vertex(&self) -> Option<VertexId> {
        self.is_vertex().then_some(self.a as usize)
    }
}

/// Distances, points and conversions for one graph.
pub struct Metric<'g> {
    pub graph: &'g MetricGraph,
    edge_ticks: Vec<Tick>,
}

impl<'g> Metric<'g> {
    pub fn new(graph: &'g MetricGraph) -> Self {
        let edge_ticks = (0..graph.edge_count()).map(|e| graph.scaled_len(e) as i64 * SUBDIV).collect();
        Metric { graph, edge_ticks }
    }

    pub fn ticks_per_unit(&self) -> i128 {
        self.graph.scale() * SUBDIV as i128
    }

    pub fn to_q(&self, t: i128, den: i128) -> Q {
        Q::new(t, den * self.ticks_per_unit())
    }

    pub fn ticks(&self, x: &Q) -> Option<Tick> {
        let s = x * Q::from_integer(self.ticks_per_unit());
        s.is_integer().then(|| *s.numer() as i64)
    }

    #[inline]
    pub fn vdist(&self, u: u32, v: u32) -> Tick {
        let d = self.graph.dist_row(u as usize)[v as usize];
        if d == u64::MAX {
            FAR
        } else {
            d as i64 * SUBDIV
        }
    }

    #[inline]
    pub fn dist(&self, p: &Loc, q: &Loc) -> Tick {
        let mut best = self.vdist(p.a, q.a) + p.oa + q.oa;
        if p.edge != NO_EDGE || q.edge != NO_EDGE {
            best = best
                .min(self.vdist(p.a, q.b) + p.oa + q.ob)
                .min(self.vdist(p.b, q.a) + p.ob + q.oa)
                .min(self.vdist(p.b, q.b) + p.ob + q.ob);
            if p.edge == q.edge {
                best = best.min((p.oa - q.oa).abs());
            }
        }
        best
    }

    pub fn loc(&self, p: &GraphPoint) -> Option<Loc> {
        match p {
            GraphPoint::Vertex(v) => Some(Loc::vertex(*v)),
            GraphPoint::EdgeInterior { edge, offset } => {
                let e = self.graph.edge(*edge);
                let oa = self.ticks(offset)?;
                Some(Loc { edge: *edge as u32, a: e.u as u32, b: e.v as u32, oa, ob: self.edge_ticks[*edge] - oa })
            }
        }
    }

    fn on_edge(&self, edge: usize, from_u: Tick) -> Loc {
        let e = self.graph.edge(edge);
        let len = self.edge_ticks[edge];
        if from_u <= 0 {
            Loc::vertex(e.u)
        } else if from_u >= len {
            Loc::vertex(e.v)
        } else {
            Loc { edge: edge as u32, a: e.u as u32, b: e.v as u32, oa: from_u, ob: len - from_u }
        }
    }

    fn offset_from_u(&self, edge: usize, p: &Loc) -> Tick {
        if p.edge == edge as u32 {
            p.oa
        } else if p.a as usize == self.graph.edge(edge).u {
            0
        } else {
            self.edge_ticks[edge]
        }
    }

    pub fn fast_path(&self, path: &GeodesicPath, x: VertexId, y: VertexId) -> Option<FastPath> {
        let nodes: Vec<Loc> = path.nodes().iter().map(|p| self.loc(p)).collect::<Option<_>>()?;
        let cum: Vec<Tick> = path.cumulative().iter().map(|c| self.ticks(c)).collect::<Option<_>>()?;
        let edges = path.edges().to_vec();
        let mut offsets = Vec::with_capacity(edges.len());
        for (i, &e) in edges.iter().enumerate() {
            offsets.push((self.offset_from_u(e, &nodes[i]), self.offset_from_u(e, &nodes[i + 1])));
        }
        let len = *cum.last().unwrap_or(&0);
        let mut grid: Vec<Tick> = (0..=GRID_STEPS).map(|k| k * len / GRID_STEPS).collect();
        grid.extend(cum.iter().copied());
        grid.sort_unstable();
        grid.dedup();
        Some(FastPath { x, y, nodes, cum, edges, offsets, len, grid })
    }
}

/// A combing line with integer breakpoints.
#[derive(Clone, Debug)]
pub struct FastPath {
    pub x: VertexId,
    pub y: VertexId,
    pub nodes: Vec<Loc>,
    pub cum: Vec<Tick>,
    pub edges: Vec<usize>,
    offsets: Vec<(Tick, Tick)>,
    pub len: Tick,
    /// Arclength positions of `{k/8} ∪ breakpoints`, ascending.
    pub grid: Vec<Tick>,
}

impl FastPath {
    /// The point at arclength `s`, clamped to `[0, len]`.
    pub fn at(&self, m: &Metric, s: Tick) -> Loc {
        if s <= 0 || self.edges.is_empty() {
            return self.nodes[0];
        }
        if s >= self.len {
            return *self.nodes.last().unwrap();
        }
        let i = self.cum.partition_point(|&c| c <= s) - 1;
        if self.cum[i] == s {
            return self.nodes[i];
        }
        let (p0, p1) = self.offsets[i];
        let step = s - self.cum[i];
        let pos = if p1 >= p0 { p0 + step } else { p0 - step };
        m.on_edge(self.edges[i], pos)
    }

    /// Parameter of an arclength position.
    pub fn param(&self, s: Tick) -> Q {
        if self.len == 0 {
            Q::from_integer(0)
        } else {
            Q::new(s as i128, self.len as i128)
        }
    }

    /// Positions of vertex nodes, with the vertex.
    pub fn vertex_positions(&self) -> impl Iterator<Item = (Tick, VertexId)> + '_ {
        self.nodes.iter().zip(&self.cum).filter_map(|(n, &c)| n.as_vertex().map(|v| (c, v)))
    }

    /// The same line traversed backwards.
    pub fn reversed(&self) -> FastPath {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        let mut edges = self.edges.clone();
        edges.reverse();
        let offsets: Vec<(Tick, Tick)> = self.offsets.iter().rev().map(|&(a, b)| (b, a)).collect();
        let cum: Vec<Tick> = self.cum.iter().rev().map(|&c| self.len - c).collect();
        let mut grid: Vec<Tick> = self.grid.iter().rev().map(|&c| self.len - c).collect();
        grid.sort_unstable();
        FastPath { x: self.y, y: self.x, nodes, cum, edges, offsets, len: self.len, grid }
    }

    /// Distance from `p` to the part of the path up to node `last`.
    pub fn distance_to_prefix(&self, m: &Metric, p: &Loc, last: usize) -> Tick {
        let mut best = self.nodes[..=last].iter().map(|n| m.dist(p, n)).min().unwrap_or(FAR);
        if p.edge != NO_EDGE {
            for i in 0..last {
                if self.edges[i] as u32 == p.edge {
                    let (lo, hi) = minmax(self.offsets[i].0, self.offsets[i].1);
                    if lo <= p.oa && p.oa <= hi {
                        best = 0;
                    }
                }
            }
        }
        best
    }

    /// Distance from `p` to the image of the path.
    pub fn distance_to(&self, m: &Metric, p: &Loc) -> Tick {
        let mut best = self.nodes.iter().map(|n| m.dist(p, n)).min().unwrap_or(FAR);
        if p.edge != NO_EDGE {
            for (i, &e) in self.edges.iter().enumerate() {
                if e as u32 == p.edge {
                    let (lo, hi) = minmax(self.offsets[i].0, self.offsets[i].1);
                    if lo <= p.oa && p.oa <= hi {
                        best = 0;
                    }
                }
            }
        }
        best
    }
}

fn minmax(a: Tick, b: Tick) -> (Tick, Tick) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Converts a combing line, rejecting paths whose points leave the tick lattice.
pub fn fetch(m: &Metric, comb: &dyn Combing, x: VertexId, y: VertexId) -> Result<Arc<FastPath>, CombingError> {
    let path = comb.line(x, y)?;
    if path.start() != &GraphPoint::Vertex(x) || path.end() != &GraphPoint::Vertex(y) {
        return Err(CombingError::InvalidPoint(format!("line ({x}, {y}) has the wrong endpoints")));
    }
    m.fast_path(&path, x, y)
        .map(Arc::new)
        .ok_or_else(|| CombingError::InvalidPoint(format!("line ({x}, {y}) has breakpoints off the graph scale")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::rational::{q, qi};

    fn square() -> MetricGraph {
        let mut b = GraphBuilder::with_vertices(4);
        b.add_edge(0, 1, qi(1)).unwrap();
        b.add_edge(1, 2, q(1, 2)).unwrap();
        b.add_edge(2, 3, qi(1)).unwrap();
        b.add_edge(3, 0, q(1, 2)).unwrap();
        b.build()
    }

    #[test]
    fn fast_and_exact_evaluation_agree() {
        let g = square();
        let m = Metric::new(&g);
        let path = g.canonical_geodesic(0, 2).unwrap();
        let f = m.fast_path(&path, 0, 2).unwrap();
        assert_eq!(m.to_q(f.len as i128, 1), qi(3) / 2);
        for &s in &f.grid {
            let exact = path.eval(&g, f.param(s)).unwrap();
            assert_eq!(m.loc(&exact).unwrap(), f.at(&m, s));
            for &t in &f.grid {
                let other = path.eval(&g, f.param(t)).unwrap();
                let d = g.point_distance(&exact, &other).unwrap();
                assert_eq!(m.to_q(m.dist(&f.at(&m, s), &f.at(&m, t)) as i128, 1), d);
            }
        }
    }

    #[test]
    fn distance_to_path_sees_interior_points() {
        let g = square();
        let m = Metric::new(&g);
        let f = m.fast_path(&g.canonical_geodesic(0, 1).unwrap(), 0, 1).unwrap();
        let mid = f.at(&m, f.len / 2);
        assert_eq!(f.distance_to(&m, &mid), 0);
        assert_eq!(f.distance_to(&m, &Loc::vertex(2)), m.ticks(&q(1, 2)).unwrap());
    }
}
