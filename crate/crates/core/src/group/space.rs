use std::collections::HashMap;
use std::sync::Arc;

use super::{Element, Group, Subgroup};
use crate::graph::{MetricGraph, VertexId};

/// Symbolic name of a vertex in a space built from group data. The group acts
/// on names by left multiplication followed by canonical coset reduction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    /// Group element (Cayley graph vertex).
    Elem(Element),
    /// Cone vertex of the coset `rep H_sub`.
    Coset { sub: usize, rep: Element },
    /// Spike vertex of the coset `rep C_kind`.
    Tip { kind: usize, rep: Element },
    /// Point `inner` of the vertex-space copy indexed by the coset `rep A_side`.
    Copy { side: usize, rep: Element, inner: Box<Point> },
    /// Glued point of a tree of spaces, indexed by the coset `rep P`.
    Glued { rep: Element },
}

#[derive(Clone, Debug)]
pub struct SideContext {
    /// Free-product factor carrying this side's vertex group.
    pub factor: usize,
    pub ctx: Arc<ActionContext>,
    mask: Subgroup,
}

/// Subgroups needed to act on symbolic points.
#[derive(Clone, Debug)]
pub struct ActionContext {
    pub group: Arc<Group>,
    pub subgroups: Vec<Subgroup>,
    pub tips: Vec<Subgroup>,
    pub sides: Vec<SideContext>,
    pub glued: Option<Subgroup>,
}

impl ActionContext {
    pub fn new(group: Arc<Group>) -> Self {
        ActionContext { group, subgroups: Vec::new(), tips: Vec::new(), sides: Vec::new(), glued: None }
    }

    pub fn add_side(&mut self, factor: usize, ctx: Arc<ActionContext>) -> usize {
        let mask = self.group.factor_subgroup(factor);
        self.sides.push(SideContext { factor, ctx, mask });
        self.sides.len() - 1
    }

    pub fn act_point(&self, g: &Element, p: &Point) -> Point {
        let grp = &self.group;
        match p {
            Point::Elem(h) => Point::Elem(grp.mul(g, h)),
            Point::Coset { sub, rep } => {
                Point::Coset { sub: *sub, rep: grp.coset_rep(&grp.mul(g, rep), &self.subgroups[*sub]) }
            }
            Point::Tip { kind, rep } => {
                Point::Tip { kind: *kind, rep: grp.coset_rep(&grp.mul(g, rep), &self.tips[*kind]) }
            }
            Point::Copy { side, rep, inner } => {
                let sc = &self.sides[*side];
                let gh = grp.mul(g, rep);
                let new_rep = grp.coset_rep(&gh, &sc.mask);
                let a = grp.mul(&grp.inv(&new_rep), &gh);
                let a = grp.spec.project_factor(sc.factor, &a).expect("coset quotient lies in the factor");
                Point::Copy { side: *side, rep: new_rep, inner: Box::new(sc.ctx.act_point(&a, inner)) }
            }
            Point::Glued { rep } => {
                let p = self.glued.as_ref().expect("glued subgroup");
                Point::Glued { rep: grp.coset_rep(&grp.mul(g, rep), p) }
            }
        }
    }

    pub fn format_point(&self, p: &Point) -> String {
        let grp = &self.group;
        match p {
            Point::Elem(h) => grp.format(h),
            Point::Coset { sub, rep } => format!("[{}]H{sub}", grp.format(rep)),
            Point::Tip { kind, rep } => format!("<{}>C{kind}", grp.format(rep)),
            Point::Copy { side, rep, inner } => {
                format!("{}@{side}:{}", grp.format(rep), self.sides[*side].ctx.format_point(inner))
            }
            Point::Glued { rep } => format!("z[{}]", grp.format(rep)),
        }
    }
}

/// A metric graph whose vertices carry symbolic names, so that group
/// elements act on it.
#[derive(Clone, Debug)]
pub struct SymbolicSpace {
    pub ctx: Arc<ActionContext>,
    pub graph: Arc<MetricGraph>,
    pub points: Vec<Point>,
    index: HashMap<Point, VertexId>,
}

impl SymbolicSpace {
    pub fn new(ctx: Arc<ActionContext>, graph: Arc<MetricGraph>, points: Vec<Point>) -> Self {
        assert_eq!(graph.vertex_count(), points.len(), "one point per vertex");
        let index = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        SymbolicSpace { ctx, graph, points, index }
    }

    pub fn group(&self) -> &Group {
        &self.ctx.group
    }

    pub fn vertex_of(&self, p: &Point) -> Option<VertexId> {
        self.index.get(p).copied()
    }

    /// `g . v`, or `None` when the image falls outside the truncation.
    pub fn act(&self, g: &Element, v: VertexId) -> Option<VertexId> {
        self.vertex_of(&self.ctx.act_point(g, &self.points[v]))
    }

    pub fn fixes(&self, g: &Element, v: VertexId) -> bool {
        self.act(g, v) == Some(v)
    }

    pub fn label(&self, v: VertexId) -> String {
        self.ctx.format_point(&self.points[v])
    }

    pub fn ball_action(&self, elements: &[Element]) -> BallAction {
        let n = self.graph.vertex_count();
        BallAction {
            elements: elements.to_vec(),
            images: elements.iter().map(|g| (0..n).map(|v| self.act(g, v)).collect()).collect(),
        }
    }
}

/// Action table of finitely many group elements on a truncated space.
#[derive(Clone, Debug)]
pub struct BallAction {
    pub elements: Vec<Element>,
    pub images: Vec<Vec<Option<VertexId>>>,
}

impl BallAction {
    pub fn image(&self, g: usize, v: VertexId) -> Option<VertexId> {
        self.images[g][v]
    }

    /// Pairs `(u, v)` among `core` where `d(g u, g v) != d(u, v)`, if any.
    pub fn isometry_violation(&self, graph: &MetricGraph, core: &[VertexId]) -> Option<(usize, VertexId, VertexId)> {
        for g in 0..self.elements.len() {
            for &u in core {
                let Some(gu) = self.image(g, u) else { continue };
                for &v in core {
                    let Some(gv) = self.image(g, v) else { continue };
                    if graph.dist_scaled(u, v) != graph.dist_scaled(gu, gv) {
                        return Some((g, u, v));
                    }
                }
            }
        }
        None
    }
}
