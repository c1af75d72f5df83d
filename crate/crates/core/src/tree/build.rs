use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::spike::{build_spike, SpikeKind, SpikeSpace};
use super::{element_ball, CopyInfo, GlueRecord, GroupData, NodeKind, TreeError, TreeOfSpaces};
use crate::graph::{GraphBuilder, VertexId};
use crate::group::{coned_cayley_ball, ActionContext, Element, Group, GroupSpec, Point, Subgroup, SymbolicSpace};
use crate::rational::{q, qi, serde_q, Q};
use crate::unionfind::UnionFind;

/// A vertex group with its peripheral structure and the subgroup fixing the
/// basepoint of its spikes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexGroupSpec {
    pub group: GroupSpec,
    #[serde(default)]
    pub names: Vec<String>,
    #[serde(default)]
    pub peripherals: Vec<Vec<String>>,
    /// Generators of the basepoint stabilizer.
    #[serde(default)]
    pub k: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HnnBasepoints {
    /// `x` is the identity vertex and `y` a pendant vertex attached to it.
    Decorated,
    /// Both basepoints are group vertices.
    Elements { x: String, y: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphOfGroupsSpec {
    Amalgam {
        left: VertexGroupSpec,
        right: VertexGroupSpec,
        /// Generators of the edge group; only the trivial group is supported.
        #[serde(default)]
        edge_group: Vec<String>,
    },
    Hnn {
        base: VertexGroupSpec,
        /// Generators of the image `L` of the edge group.
        #[serde(default)]
        l: Vec<String>,
        #[serde(default)]
        edge_group: Vec<String>,
        #[serde(default = "default_stable_letter")]
        stable_letter: String,
        basepoints: HnnBasepoints,
    },
}

fn default_stable_letter() -> String {
    "t".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeBuildParams {
    /// Word-length radius of each vertex space.
    pub radius: usize,
    /// Number of vertex-space hops from the base copy.
    pub tree_radius: usize,
    #[serde(with = "serde_q", default = "default_spike")]
    pub spike_length: Q,
    #[serde(with = "serde_q", default = "default_cone")]
    pub cone_length: Q,
    /// Keep only points whose anchor element has word length at most this.
    #[serde(default)]
    pub element_radius: Option<usize>,
}

fn default_spike() -> Q {
    qi(1)
}

fn default_cone() -> Q {
    q(1, 2)
}

impl Default for TreeBuildParams {
    fn default() -> Self {
        TreeBuildParams { radius: 3, tree_radius: 2, spike_length: qi(1), cone_length: q(1, 2), element_radius: None }
    }
}

fn names_or_default(v: &VertexGroupSpec) -> Vec<String> {
    if v.names.is_empty() {
        crate::group::default_names(v.group.basis_count())
    } else {
        v.names.clone()
    }
}

/// Vertex space of one side: coned Cayley ball relative to the peripherals and
/// `K`, with `x` the cone vertex of `K` (or the identity when `K` is trivial).
struct SideSpace {
    group: Arc<Group>,
    space: SymbolicSpace,
    elements: Vec<Element>,
    k: Subgroup,
    x: VertexId,
}

fn side_space(v: &VertexGroupSpec, params: &TreeBuildParams) -> Result<SideSpace, TreeError> {
    let group = Arc::new(Group::with_names(v.group.clone(), names_or_default(v))?);
    let mut peripherals = v.peripherals.iter().map(|h| group.subgroup(h)).collect::<Result<Vec<_>, _>>()?;
    let k = group.subgroup(&v.k)?;
    if !k.is_trivial() && !peripherals.contains(&k) {
        peripherals.push(k.clone());
    }
    let coned = coned_cayley_ball(group.clone(), None, peripherals.clone(), params.radius, params.cone_length)?;
    let x = if k.is_trivial() {
        coned.vertex(&group.identity()).expect("identity in ball")
    } else {
        let sub = peripherals.iter().position(|h| *h == k).unwrap();
        coned.cone_vertex(sub, &group.identity()).expect("cone vertex of K")
    };
    let elements = (0..coned.group_vertices)
        .map(|v| match &coned.space.points[v] {
            Point::Elem(g) => g.clone(),
            _ => unreachable!(),
        })
        .collect();
    Ok(SideSpace { group, space: coned.space, elements, k, x })
}

struct Side {
    factor: usize,
    spiked: SpikeSpace,
    /// Right multiplier of each spike kind before reducing modulo the glued subgroup.
    twists: Vec<Element>,
}

pub fn build_pushout(spec: &GraphOfGroupsSpec, params: &TreeBuildParams) -> Result<TreeOfSpaces, TreeError> {
    let GraphOfGroupsSpec::Amalgam { left, right, edge_group } = spec else {
        return Err(TreeError::SpecError("pushout needs an amalgam".into()));
    };
    if !edge_group.is_empty() {
        return Err(TreeError::UnsupportedGroup("only trivial edge groups are supported".into()));
    }
    let mut names = names_or_default(left);
    names.extend(names_or_default(right));
    let g = Arc::new(Group::with_names(
        GroupSpec::FreeProduct { factors: vec![left.group.clone(), right.group.clone()] },
        names,
    )?);
    let a = side_space(left, params)?;
    let b = side_space(right, params)?;
    let glued = g.free_product_subgroup(&[(0, &a.k), (1, &b.k)]);
    let mut sides = Vec::new();
    for (f, s) in [a, b].into_iter().enumerate() {
        let kinds = [SpikeKind { subgroup: Subgroup::trivial(s.group.rank()), basepoint: s.x }];
        let spiked = build_spike(&s.space, &kinds, &s.elements, params.spike_length)?;
        sides.push(Side { factor: f, spiked, twists: vec![g.identity()] });
    }
    assemble(g, sides, glued, params)
}

pub fn build_coalescence(spec: &GraphOfGroupsSpec, params: &TreeBuildParams) -> Result<TreeOfSpaces, TreeError> {
    let GraphOfGroupsSpec::Hnn { base, l, edge_group, stable_letter, basepoints } = spec else {
        return Err(TreeError::SpecError("coalescence needs an HNN extension".into()));
    };
    if !edge_group.is_empty() {
        return Err(TreeError::UnsupportedGroup("only trivial edge groups are supported".into()));
    }
    let mut names = names_or_default(base);
    if names.contains(stable_letter) {
        return Err(TreeError::SpecError(format!("stable letter {stable_letter} clashes with a generator")));
    }
    names.push(stable_letter.clone());
    let g = Arc::new(Group::with_names(
        GroupSpec::FreeProduct { factors: vec![base.group.clone(), GroupSpec::Free { rank: 1 }] },
        names,
    )?);
    let side = side_space(base, params)?;
    let ag = side.group.clone();
    let l_sub = ag.subgroup(l)?;
    let (space, x, y) = match basepoints {
        HnnBasepoints::Decorated => {
            let kinds = [SpikeKind { subgroup: Subgroup::trivial(ag.rank()), basepoint: side.x }];
            let dec = build_spike(&side.space, &kinds, &side.elements, params.spike_length)?;
            let one = ag.identity();
            let y = dec.tips.iter().find(|t| t.rep == one).map(|t| t.vertex).expect("pendant at the identity");
            (dec.space, side.x, y)
        }
        HnnBasepoints::Elements { x, y } => {
            let vx = side
                .space
                .vertex_of(&Point::Elem(ag.parse(x)?))
                .ok_or_else(|| TreeError::RadiusTooSmall(format!("{x} outside the vertex space")))?;
            let vy = side
                .space
                .vertex_of(&Point::Elem(ag.parse(y)?))
                .ok_or_else(|| TreeError::RadiusTooSmall(format!("{y} outside the vertex space")))?;
            (side.space.clone(), vx, vy)
        }
    };
    if side.k == l_sub {
        if let Some(a) = side.elements.iter().find(|a| space.act(a, x) == Some(y)) {
            return Err(TreeError::SameOrbitBasepoints(format!(
                "{} maps {} to {}",
                ag.format(a),
                space.label(x),
                space.label(y)
            )));
        }
    }
    for (name, v, sub) in [("x", x, &side.k), ("y", y, &l_sub)] {
        for a in &side.elements {
            if space.fixes(a, v) != ag.contains(sub, a) {
                return Err(TreeError::BasepointNotFixed(format!(
                    "stabilizer of {name} disagrees with its subgroup at {}",
                    ag.format(a)
                )));
            }
        }
    }
    let trivial = Subgroup::trivial(ag.rank());
    let kinds = [SpikeKind { subgroup: trivial.clone(), basepoint: x }, SpikeKind { subgroup: trivial, basepoint: y }];
    let spiked = build_spike(&space, &kinds, &side.elements, params.spike_length)?;
    let t = g.basis(g.rank() - 1);
    let glued = Subgroup::trivial(g.rank());
    let sides = vec![Side { factor: 0, spiked, twists: vec![g.identity(), t] }];
    assemble(g, sides, glued, params)
}

fn word_length(g: &Group, x: &Element) -> usize {
    g.spec.word(x).iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
}

/// Anchor element of a vertex-space point, used by the element-radius filter.
fn anchor(p: &Point) -> Option<&Element> {
    match p {
        Point::Elem(a) | Point::Coset { rep: a, .. } | Point::Tip { rep: a, .. } => Some(a),
        _ => None,
    }
}

enum Raw {
    Vertex(Point),
    Tip { key: Element },
}

fn assemble(
    g: Arc<Group>,
    sides: Vec<Side>,
    glued: Subgroup,
    params: &TreeBuildParams,
) -> Result<TreeOfSpaces, TreeError> {
    let mut ctx = ActionContext::new(g.clone());
    for s in &sides {
        ctx.add_side(s.factor, s.spiked.space.ctx.clone());
    }
    ctx.glued = Some(glued.clone());
    let ctx = Arc::new(ctx);
    let side_masks: Vec<Subgroup> = sides.iter().map(|s| g.factor_subgroup(s.factor)).collect();
    let p_table = element_ball(&g, &glued.generators().iter().map(|&i| g.basis(i)).collect::<Vec<_>>(), params.radius);
    let keep = |e: &Element| params.element_radius.is_none_or(|r| word_length(&g, e) <= r);

    let mut raws: Vec<Raw> = Vec::new();
    let mut raw_edges: Vec<(usize, usize, Q)> = Vec::new();
    let mut raw_node: Vec<usize> = Vec::new();
    let mut copies: Vec<(CopyInfo, usize)> = Vec::new();
    let mut copy_index: HashMap<(usize, Element), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut tip_records: Vec<(usize, usize, Element, usize)> = Vec::new();
    let mut start = CopyInfo { side: 0, rep: g.identity() };
    start.rep = g.coset_rep(&start.rep, &side_masks[0]);
    copy_index.insert((0, start.rep.clone()), 0);
    copies.push((start, 0));
    queue.push_back(0usize);
    let mut kept_copies: Vec<usize> = Vec::new();

    while let Some(c) = queue.pop_front() {
        let (info, depth) = copies[c].clone();
        let side = &sides[info.side];
        let sp = &side.spiked;
        let factor = side.factor;
        let mut local: HashMap<VertexId, usize> = HashMap::new();
        for v in 0..sp.base_vertices {
            let inner = &sp.space.points[v];
            if let Some(a) = anchor(inner) {
                if !keep(&g.mul(&info.rep, &g.spec.embed_factor(factor, a))) {
                    continue;
                }
            }
            local.insert(v, raws.len());
            raw_node.push(c);
            raws.push(Raw::Vertex(Point::Copy {
                side: info.side,
                rep: info.rep.clone(),
                inner: Box::new(inner.clone()),
            }));
        }
        if local.is_empty() {
            continue;
        }
        kept_copies.push(c);
        for e in sp.space.graph.edges() {
            if let (Some(&u), Some(&v)) = (local.get(&e.u), local.get(&e.v)) {
                raw_edges.push((u, v, e.len));
            }
        }
        let mut keys = Vec::new();
        for tip in &sp.tips {
            let Some(&at) = local.get(&tip.attached_to) else { continue };
            let key_element = g.mul(&g.mul(&info.rep, &g.spec.embed_factor(factor, &tip.rep)), &side.twists[tip.kind]);
            let key = g.coset_rep(&key_element, &glued);
            if !keep(&key) {
                continue;
            }
            let r = raws.len();
            raws.push(Raw::Tip { key: key.clone() });
            raw_node.push(usize::MAX);
            raw_edges.push((at, r, sp.spike_length));
            tip_records.push((c, tip.kind, key_element, r));
            keys.push(key);
        }
        if depth >= params.tree_radius {
            continue;
        }
        for key in keys {
            for p in &p_table {
                let gp = g.mul(&key, p);
                for (s2, side2) in sides.iter().enumerate() {
                    for tw in &side2.twists {
                        let h = g.coset_rep(&g.mul(&gp, &g.inv(tw)), &side_masks[s2]);
                        if let std::collections::hash_map::Entry::Vacant(e) = copy_index.entry((s2, h.clone())) {
                            e.insert(copies.len());
                            copies.push((CopyInfo { side: s2, rep: h }, depth + 1));
                            queue.push_back(copies.len() - 1);
                        }
                    }
                }
            }
        }
    }

    let mut uf = UnionFind::new(raws.len());
    let mut first_tip: HashMap<Element, usize> = HashMap::new();
    for (i, r) in raws.iter().enumerate() {
        if let Raw::Tip { key } = r {
            match first_tip.get(key) {
                Some(&j) => {
                    uf.union(i, j);
                }
                None => {
                    first_tip.insert(key.clone(), i);
                }
            }
        }
    }
    let (class, count) = uf.classes();
    let mut points: Vec<Option<Point>> = vec![None; count];
    for (i, r) in raws.iter().enumerate() {
        if points[class[i]].is_none() {
            points[class[i]] = Some(match r {
                Raw::Vertex(p) => p.clone(),
                Raw::Tip { key } => Point::Glued { rep: key.clone() },
            });
        }
    }
    let points: Vec<Point> = points.into_iter().map(|p| p.expect("class point")).collect();

    // Tree nodes: kept copies in order, then glued points in order of appearance.
    let mut node_of_copy = vec![usize::MAX; copies.len()];
    let mut kinds = Vec::new();
    let mut copy_infos = Vec::new();
    for &c in &kept_copies {
        node_of_copy[c] = kinds.len();
        kinds.push(NodeKind::K);
        copy_infos.push(Some(copies[c].0.clone()));
    }
    let mut xi = vec![usize::MAX; count];
    for (i, r) in raws.iter().enumerate() {
        match r {
            Raw::Vertex(_) => xi[class[i]] = node_of_copy[raw_node[i]],
            Raw::Tip { .. } => {
                if xi[class[i]] == usize::MAX {
                    xi[class[i]] = kinds.len();
                    kinds.push(NodeKind::L);
                    copy_infos.push(None);
                }
            }
        }
    }
    let mut zb = GraphBuilder::new();
    let labels: Vec<String> = points.iter().map(|p| ctx.format_point(p)).collect();
    for l in &labels {
        zb.add_vertex(l.clone());
    }
    for &(u, v, len) in &raw_edges {
        zb.add_edge(class[u], class[v], len)?;
    }
    let mut t_edges = Vec::new();
    let mut seen_t = std::collections::HashSet::new();
    for &(c, _, _, r) in &tip_records {
        let pair = (node_of_copy[c], xi[class[r]]);
        if seen_t.insert(pair) {
            t_edges.push(pair);
        }
    }
    let z = zb.build();
    let zarc_points = points.clone();
    let mut tos = TreeOfSpaces::from_parts(z, kinds, &t_edges, xi)?;
    tos.copies = copy_infos;
    tos.spike_length = Some(params.spike_length);
    let sym = SymbolicSpace::new(ctx, tos.z.clone(), zarc_points);
    let base_glued = sym.vertex_of(&Point::Glued { rep: g.coset_rep(&sides[0].twists[0], &glued) });
    let mut reference_copy = vec![usize::MAX; sides.len()];
    for k in tos.k_nodes() {
        let s = tos.copies[k].as_ref().unwrap().side;
        if reference_copy[s] == usize::MAX {
            reference_copy[s] = k;
        }
    }
    let records = tip_records
        .into_iter()
        .map(|(c, kind, key_element, r)| GlueRecord { node: node_of_copy[c], kind, key_element, glued: class[r] })
        .collect();
    tos.group = Some(GroupData {
        group: g,
        glued_subgroup: glued,
        side_subgroups: side_masks,
        reference_copy,
        records,
        base_glued,
    });
    tos.symbolic = Some(sym);
    Ok(tos)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_side(name: &str) -> VertexGroupSpec {
        VertexGroupSpec { group: GroupSpec::Free { rank: 1 }, names: vec![name.into()], peripherals: vec![], k: vec![] }
    }

    pub(crate) fn zz() -> GraphOfGroupsSpec {
        GraphOfGroupsSpec::Amalgam { left: z_side("a"), right: z_side("b"), edge_group: vec![] }
    }

    #[test]
    fn pushout_of_two_lines() {
        let params = TreeBuildParams { radius: 2, tree_radius: 2, ..Default::default() };
        let tos = build_pushout(&zz(), &params).unwrap();
        let r = tos.structural_suite(None);
        assert!(r.passed(), "{r:?}");
        let sym = tos.symbolic.as_ref().unwrap();
        let g = sym.group();
        let z0 = tos.group.as_ref().unwrap().base_glued.unwrap();
        assert_eq!(tos.xi.iter().filter(|&&k| k == tos.xi[z0]).count(), 1);
        let x_copy = tos.k_nodes().next().unwrap();
        let x1 = tos.vertex_spaces[x_copy].iter().filter(|&&v| tos.xi[v] == x_copy).count();
        assert_eq!(x1, 5);
        let one_a = sym
            .vertex_of(&Point::Copy { side: 0, rep: g.identity(), inner: Box::new(Point::Elem(Element::Free(vec![]))) })
            .unwrap();
        assert_eq!(tos.z.dist(one_a, z0).unwrap(), qi(1));
    }

    #[test]
    fn hnn_rejects_same_orbit() {
        let spec = GraphOfGroupsSpec::Hnn {
            base: z_side("a"),
            l: vec![],
            edge_group: vec![],
            stable_letter: "t".into(),
            basepoints: HnnBasepoints::Elements { x: "1".into(), y: "a".into() },
        };
        let r = build_coalescence(&spec, &TreeBuildParams::default());
        assert!(matches!(r, Err(TreeError::SameOrbitBasepoints(_))));
    }
}
