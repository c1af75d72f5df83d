use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use num_traits::Signed;

use super::{ActionContext, Element, Group, GroupError, Point, Subgroup, SymbolicSpace};
use crate::graph::{GraphBuilder, VertexId};
use crate::rational::{qi, Q};

/// Ball of radius `radius` in the Cayley graph, vertices in BFS order.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub space: SymbolicSpace,
    pub radius: usize,
    pub generators: Vec<Element>,
    /// Word length of each group vertex.
    pub word_length: Vec<usize>,
}

impl CayleyBall {
    pub fn elements(&self) -> Vec<Element> {
        self.space
            .points
            .iter()
            .filter_map(|p| match p {
                Point::Elem(g) => Some(g.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn vertex(&self, g: &Element) -> Option<VertexId> {
        self.space.vertex_of(&Point::Elem(g.clone()))
    }

    /// Group vertices of word length at most `r`.
    pub fn within(&self, r: usize) -> Vec<VertexId> {
        (0..self.word_length.len()).filter(|&v| self.word_length[v] <= r).collect()
    }
}

fn bfs_elements(group: &Group, gens: &[Element], radius: usize) -> (Vec<Element>, Vec<usize>) {
    let mut steps: Vec<Element> = gens.to_vec();
    steps.extend(gens.iter().map(|s| group.inv(s)));
    let id = group.identity();
    let mut seen: HashMap<Element, usize> = HashMap::new();
    let mut order = vec![id.clone()];
    let mut len = vec![0usize];
    seen.insert(id, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if len[i] == radius {
            continue;
        }
        for s in &steps {
            let h = group.mul(&order[i], s);
            if !seen.contains_key(&h) {
                seen.insert(h.clone(), order.len());
                order.push(h);
                len.push(len[i] + 1);
                queue.push_back(order.len() - 1);
            }
        }
    }
    (order, len)
}

/// Cayley-graph ball with unit edges; `gens` defaults to the basis generators.
pub fn cayley_ball(group: Arc<Group>, gens: Option<Vec<Element>>, radius: usize) -> Result<CayleyBall, GroupError> {
    let gens = gens.unwrap_or_else(|| group.basis_elements());
    if gens.is_empty() {
        return Err(GroupError::UnsupportedGroup("empty generating set".into()));
    }
    let (elems, word_length) = bfs_elements(&group, &gens, radius);
    let index: HashMap<&Element, usize> = elems.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut b = GraphBuilder::new();
    for g in &elems {
        b.add_vertex(group.format(g));
    }
    let mut added: HashSet<(usize, usize, usize)> = HashSet::new();
    for (i, g) in elems.iter().enumerate() {
        for (j, s) in gens.iter().enumerate() {
            let h = group.mul(g, s);
            if let Some(&k) = index.get(&h) {
                if k != i && added.insert((i.min(k), i.max(k), j)) {
                    b.add_edge(i, k, qi(1)).expect("cayley edge");
                }
            }
        }
    }
    let points = elems.into_iter().map(Point::Elem).collect();
    let ctx = Arc::new(ActionContext::new(group));
    let space = SymbolicSpace::new(ctx, Arc::new(b.build()), points);
    Ok(CayleyBall { space, radius, generators: gens, word_length })
}

/// Cayley ball with one cone vertex per coset of each peripheral subgroup
/// meeting the ball, joined to the coset members by edges of `cone_length`.
#[derive(Clone, Debug)]
pub struct ConedCayleyBall {
    pub space: SymbolicSpace,
    pub radius: usize,
    pub generators: Vec<Element>,
    pub peripherals: Vec<Subgroup>,
    pub cone_length: Q,
    /// Number of group vertices; cone vertices follow.
    pub group_vertices: usize,
    pub word_length: Vec<usize>,
}

impl ConedCayleyBall {
    pub fn vertex(&self, g: &Element) -> Option<VertexId> {
        self.space.vertex_of(&Point::Elem(g.clone()))
    }

    pub fn cone_vertex(&self, sub: usize, g: &Element) -> Option<VertexId> {
        let rep = self.space.group().coset_rep(g, &self.peripherals[sub]);
        self.space.vertex_of(&Point::Coset { sub, rep })
    }

    pub fn within(&self, r: usize) -> Vec<VertexId> {
        (0..self.group_vertices).filter(|&v| self.word_length[v] <= r).collect()
    }

    pub fn is_cone_vertex(&self, v: VertexId) -> bool {
        v >= self.group_vertices
    }
}

pub fn coned_cayley_ball(
    group: Arc<Group>,
    gens: Option<Vec<Element>>,
    peripherals: Vec<Subgroup>,
    radius: usize,
    cone_length: Q,
) -> Result<ConedCayleyBall, GroupError> {
    if !cone_length.is_positive() {
        return Err(GroupError::UnsupportedGroup(format!("cone length {cone_length} must be positive")));
    }
    for h in &peripherals {
        if h.mask.len() != group.rank() {
            return Err(GroupError::UnsupportedGroup("peripheral subgroup of wrong rank".into()));
        }
    }
    let base = cayley_ball(group.clone(), gens, radius)?;
    let n = base.space.graph.vertex_count();
    let mut b = GraphBuilder::new();
    for v in 0..n {
        b.add_vertex(base.space.graph.label(v));
    }
    for e in base.space.graph.edges() {
        b.add_edge(e.u, e.v, e.len).unwrap();
    }
    let mut points = base.space.points.clone();
    let mut ctx = ActionContext::new(group.clone());
    ctx.subgroups = peripherals.clone();
    let mut cone_index: HashMap<(usize, Element), usize> = HashMap::new();
    for (i, h) in peripherals.iter().enumerate() {
        for v in 0..n {
            let Point::Elem(g) = &base.space.points[v] else { unreachable!() };
            let rep = group.coset_rep(g, h);
            let c = *cone_index.entry((i, rep.clone())).or_insert_with(|| {
                let p = Point::Coset { sub: i, rep: rep.clone() };
                let id = b.add_vertex(ctx.format_point(&p));
                points.push(p);
                id
            });
            b.add_edge(c, v, cone_length).unwrap();
        }
    }
    let space = SymbolicSpace::new(Arc::new(ctx), Arc::new(b.build()), points);
    Ok(ConedCayleyBall {
        space,
        radius,
        generators: base.generators,
        peripherals,
        cone_length,
        group_vertices: n,
        word_length: base.word_length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::rational::q;

    fn f2xz() -> Arc<Group> {
        Arc::new(
            Group::with_names(
                GroupSpec::Product { factors: vec![GroupSpec::Free { rank: 2 }, GroupSpec::FreeAbelian { rank: 1 }] },
                vec!["a".into(), "b".into(), "z".into()],
            )
            .unwrap(),
        )
    }

    #[test]
    fn ball_sizes() {
        let z2 = Arc::new(Group::new(GroupSpec::FreeAbelian { rank: 2 }).unwrap());
        let b = cayley_ball(z2, None, 3).unwrap();
        assert_eq!(b.space.graph.vertex_count(), 25);
        let pts: Vec<(i64, i64)> = (-3..=3i64)
            .flat_map(|x| (-3..=3i64).map(move |y| (x, y)))
            .filter(|(x, y)| x.abs() + y.abs() <= 3)
            .collect();
        let unit_pairs = pts
            .iter()
            .flat_map(|p| pts.iter().map(move |r| (p, r)))
            .filter(|(p, r)| (p.0 - r.0).abs() + (p.1 - r.1).abs() == 1)
            .count();
        assert_eq!(b.space.graph.edge_count(), unit_pairs / 2);
        let f2 = Arc::new(Group::new(GroupSpec::Free { rank: 2 }).unwrap());
        let b = cayley_ball(f2, None, 3).unwrap();
        assert_eq!(b.space.graph.vertex_count(), 1 + 4 + 12 + 36);
        assert_eq!(b.space.graph.edge_count(), 52);
    }

    #[test]
    fn cone_shortcuts() {
        let g = f2xz();
        let h = g.subgroup(&["a"]).unwrap();
        let c = coned_cayley_ball(g.clone(), None, vec![h], 6, q(1, 2)).unwrap();
        let one = c.vertex(&g.identity()).unwrap();
        let a5 = c.vertex(&g.parse("a^5").unwrap()).unwrap();
        assert_eq!(c.space.graph.dist(one, a5).unwrap(), qi(1));
        let plain = coned_cayley_ball(g.clone(), None, vec![], 2, q(1, 2)).unwrap();
        let cay = cayley_ball(g, None, 2).unwrap();
        assert_eq!(crate::graph::io::write_graph(&plain.space.graph), crate::graph::io::write_graph(&cay.space.graph));
    }
}
