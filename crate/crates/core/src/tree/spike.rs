use std::collections::HashMap;
use std::sync::Arc;

use super::TreeError;
use crate::graph::{GraphBuilder, VertexId};
use crate::group::{Element, Point, Subgroup, SymbolicSpace};
use crate::rational::Q;

/// One family of spikes: a subgroup fixing a basepoint.
#[derive(Clone, Debug)]
pub struct SpikeKind {
    pub subgroup: Subgroup,
    pub basepoint: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpikeTip {
    /// Index into the spike kinds passed to [`build_spike`].
    pub kind: usize,
    /// Coset representative translating the basepoint.
    pub rep: Element,
    pub vertex: VertexId,
    pub attached_to: VertexId,
}

/// `X` with a pendant edge of length `spike_length` at every translate of each
/// basepoint, one per coset of the kind's subgroup. Vertices of `X` keep their ids.
#[derive(Clone, Debug)]
pub struct SpikeSpace {
    pub space: SymbolicSpace,
    pub base_vertices: usize,
    pub tips: Vec<SpikeTip>,
    pub spike_length: Q,
    /// Offset of the spike kinds in the action context's tip list.
    pub kind_offset: usize,
}

impl SpikeSpace {
    pub fn is_tip(&self, v: VertexId) -> bool {
        v >= self.base_vertices
    }

    pub fn tip_of(&self, v: VertexId) -> Option<&SpikeTip> {
        v.checked_sub(self.base_vertices).and_then(|i| self.tips.get(i))
    }
}

/// Spikes `x` at `a . basepoint` for every `a` in `table`.
pub fn build_spike(
    x: &SymbolicSpace,
    kinds: &[SpikeKind],
    table: &[Element],
    spike_length: Q,
) -> Result<SpikeSpace, TreeError> {
    if spike_length <= Q::from_integer(0) {
        return Err(TreeError::SpecError(format!("spike length {spike_length} must be positive")));
    }
    let grp = x.group();
    for k in kinds {
        if k.basepoint >= x.graph.vertex_count() {
            return Err(TreeError::SpecError(format!("basepoint {} outside the space", k.basepoint)));
        }
        for g in k.subgroup.generators() {
            let s = grp.basis(g);
            if !x.fixes(&s, k.basepoint) {
                return Err(TreeError::BasepointNotFixed(format!("{} moves {}", grp.format(&s), x.label(k.basepoint))));
            }
        }
    }
    let mut ctx = (*x.ctx).clone();
    let kind_offset = ctx.tips.len();
    ctx.tips.extend(kinds.iter().map(|k| k.subgroup.clone()));
    let n = x.graph.vertex_count();
    let mut b = GraphBuilder::new();
    for v in 0..n {
        b.add_vertex(x.graph.label(v));
    }
    for e in x.graph.edges() {
        b.add_edge(e.u, e.v, e.len)?;
    }
    let mut points = x.points.clone();
    let mut tips = Vec::new();
    let mut seen: HashMap<(usize, Element), VertexId> = HashMap::new();
    for (j, k) in kinds.iter().enumerate() {
        for a in table {
            let rep = grp.coset_rep(a, &k.subgroup);
            if seen.contains_key(&(j, rep.clone())) {
                continue;
            }
            let Some(at) = x.act(a, k.basepoint) else { continue };
            let p = Point::Tip { kind: kind_offset + j, rep: rep.clone() };
            let v = b.add_vertex(ctx.format_point(&p));
            b.add_edge(at, v, spike_length)?;
            points.push(p);
            seen.insert((j, rep.clone()), v);
            tips.push(SpikeTip { kind: j, rep, vertex: v, attached_to: at });
        }
    }
    let space = SymbolicSpace::new(Arc::new(ctx), Arc::new(b.build()), points);
    Ok(SpikeSpace { space, base_vertices: n, tips, spike_length, kind_offset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cayley_ball, Group, GroupSpec};
    use crate::rational::{q, qi};

    #[test]
    fn one_spike_per_point_of_z() {
        let z = Arc::new(Group::new(GroupSpec::Free { rank: 1 }).unwrap());
        let ball = cayley_ball(z.clone(), None, 3).unwrap();
        let one = ball.vertex(&z.identity()).unwrap();
        let kinds = [SpikeKind { subgroup: Subgroup::trivial(1), basepoint: one }];
        let s = build_spike(&ball.space, &kinds, &ball.elements(), q(1, 2)).unwrap();
        assert_eq!(s.tips.len(), 7);
        assert_eq!(s.space.graph.vertex_count(), 14);
        for t in &s.tips {
            assert_eq!(s.space.graph.degree(t.vertex), 1);
        }
        let a2 = ball.vertex(&z.parse("a^2").unwrap()).unwrap();
        let t1 = s.tips.iter().find(|t| t.attached_to == one).unwrap().vertex;
        let t2 = s.tips.iter().find(|t| t.attached_to == a2).unwrap().vertex;
        assert_eq!(s.space.graph.dist(t1, t2).unwrap(), q(1, 2) + qi(2) + q(1, 2));
        assert_eq!(s.space.graph.dist(one, a2).unwrap(), qi(2));
    }

    #[test]
    fn full_stabilizer_gives_one_spike() {
        let z = Arc::new(Group::new(GroupSpec::Free { rank: 1 }).unwrap());
        let h = z.subgroup(&["a"]).unwrap();
        let c = crate::group::coned_cayley_ball(z.clone(), None, vec![h.clone()], 2, q(1, 2)).unwrap();
        let apex = c.cone_vertex(0, &z.identity()).unwrap();
        let elems: Vec<_> = c
            .within(2)
            .iter()
            .map(|&v| match &c.space.points[v] {
                Point::Elem(g) => g.clone(),
                _ => unreachable!(),
            })
            .collect();
        let s = build_spike(&c.space, &[SpikeKind { subgroup: h, basepoint: apex }], &elems, qi(1)).unwrap();
        assert_eq!(s.tips.len(), 1);
        let one = c.vertex(&z.identity()).unwrap();
        let bad = build_spike(
            &c.space,
            &[SpikeKind { subgroup: z.subgroup(&["a"]).unwrap(), basepoint: one }],
            &elems,
            qi(1),
        );
        assert!(matches!(bad, Err(TreeError::BasepointNotFixed(_))));
    }
}
