//! Coning off families of discrete subsets of a metric graph.

mod extend;
pub mod spherical;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::io::{parse_document, write_graph};
use crate::graph::{EdgeId, GraphBuilder, GraphError, MetricGraph, VertexId};
use crate::group::{CayleyBall, Element, Point, Subgroup};
use crate::rational::{parse_q, qi, to_f64, Q};

pub use extend::{cone_crossings, ConedPoint, HatCombing};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("invalid cone specification: {0}")]
    InvalidConeSpec(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("input combing is not geodesic: {0}")]
    NotGeodesicInput(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeMetric {
    Graph,
    Spherical,
}

impl ConeMetric {
    fn keyword(&self) -> &'static str {
        match self {
            ConeMetric::Graph => "graph",
            ConeMetric::Spherical => "spherical",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeLabel {
    pub name: String,
    pub metric: ConeMetric,
    /// Cone radius: distance from the apex to every attachment point.
    pub radius: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Attachment {
    pub vertex: VertexId,
    pub label: usize,
}

/// The data `(X, psi, phi)` plus a cone metric per label. Attachment `e` is
/// glued to `psi(e) = attachments[e].vertex` and belongs to the cone of
/// `phi(e) = attachments[e].label`.
#[derive(Clone, Debug)]
pub struct ConeSpec {
    pub base: Arc<MetricGraph>,
    pub attachments: Vec<Attachment>,
    pub labels: Vec<ConeLabel>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Offending attachment pair, when there is one.
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ValidationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

impl ConeSpec {
    /// Attachments of each label, in attachment order.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.labels.len()];
        for (e, a) in self.attachments.iter().enumerate() {
            if a.label < out.len() {
                out[a.label].push(e);
            }
        }
        out
    }

    /// Largest base distance between two attachment points of one fiber.
    pub fn max_fiber_diameter(&self) -> Option<Q> {
        let mut best = qi(0);
        for fib in self.fibers() {
            for &e in &fib {
                let row = self.base.dist_row(self.attachments[e].vertex);
                for &f in &fib {
                    let d = row[self.attachments[f].vertex];
                    if d == u64::MAX {
                        return None;
                    }
                    best = best.max(self.base.unscale(d));
                }
            }
        }
        Some(best)
    }

    /// One cone per coset of each subgroup meeting the ball, attached at the
    /// coset members. `radius` defaults to the largest fiber diameter plus one.
    pub fn from_cosets(
        ball: &CayleyBall,
        subgroups: &[Subgroup],
        metric: ConeMetric,
        radius: Option<Q>,
    ) -> Result<ConeSpec, ConeError> {
        let grp = ball.space.group();
        let mut labels = Vec::new();
        let mut attachments = Vec::new();
        for (i, h) in subgroups.iter().enumerate() {
            let mut reps: HashMap<Element, usize> = HashMap::new();
            for v in 0..ball.space.graph.vertex_count() {
                let Point::Elem(g) = &ball.space.points[v] else {
                    continue;
                };
                let rep = grp.coset_rep(g, h);
                let label = *reps.entry(rep.clone()).or_insert_with(|| {
                    labels.push(ConeLabel { name: format!("[{}]H{i}", grp.format(&rep)), metric, radius: qi(1) });
                    labels.len() - 1
                });
                attachments.push(Attachment { vertex: v, label });
            }
        }
        attachments.sort_by_key(|a| (a.label, a.vertex));
        let mut spec = ConeSpec { base: ball.space.graph.clone(), attachments, labels };
        let d = match radius {
            Some(d) => d,
            None => {
                spec.max_fiber_diameter()
                    .ok_or_else(|| ConeError::InvalidConeSpec("fiber spans several components".into()))?
                    + qi(1)
            }
        };
        for l in &mut spec.labels {
            l.radius = d;
        }
        Ok(spec)
    }

    fn cone_distance_on_base(&self, label: &ConeLabel, dx: Q) -> f64 {
        match label.metric {
            ConeMetric::Graph => to_f64(&(label.radius * qi(2))),
            ConeMetric::Spherical => {
                spherical::SphericalCone::new(to_f64(&label.radius)).distance(1.0, 1.0, to_f64(&dx))
            }
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let n = self.base.vertex_count();
        let fibers = self.fibers();

        let mut bad_vertex = None;
        let mut seen: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut dup = None;
        for (e, a) in self.attachments.iter().enumerate() {
            if a.vertex >= n || a.label >= self.labels.len() {
                bad_vertex.get_or_insert(e);
            } else if let Some(&f) = seen.get(&a.vertex) {
                dup.get_or_insert((f, e));
            } else {
                seen.insert(a.vertex, e);
            }
        }
        checks.push(ValidationCheck {
            name: "attachment-injective".into(),
            passed: bad_vertex.is_none() && dup.is_none(),
            detail: match (bad_vertex, dup) {
                (Some(e), _) => format!("attachment {e} refers to a missing vertex or label"),
                (None, Some((e, f))) => format!("attachments {e} and {f} share a vertex"),
                _ => "attachment map is injective".into(),
            },
            witness: dup,
        });
        let empty = fibers.iter().position(|f| f.is_empty());
        checks.push(ValidationCheck {
            name: "labeling-surjective".into(),
            passed: empty.is_none(),
            detail: match empty {
                Some(l) => format!("label {l} has no attachment"),
                None => "every label has an attachment".into(),
            },
            witness: None,
        });
        if bad_vertex.is_some() {
            return ValidationReport { checks };
        }

        // Finite fibers in a finite graph realise nearest points; only
        // connectivity can fail.
        let mut disconnected = None;
        for fib in &fibers {
            for &e in fib {
                for &f in fib {
                    if !self.base.same_component(self.attachments[e].vertex, self.attachments[f].vertex) {
                        disconnected.get_or_insert((e, f));
                    }
                }
            }
        }
        checks.push(ValidationCheck {
            name: "relative-discreteness".into(),
            passed: disconnected.is_none(),
            detail: if disconnected.is_some() {
                "a fiber meets several components".into()
            } else {
                "fibers are finite; nearest points are realised".into()
            },
            witness: disconnected,
        });

        let radius0 = self.labels.first().map(|l| l.radius);
        let uneven = self.labels.iter().position(|l| Some(l.radius) != radius0 || !l.radius.is_positive());
        checks.push(ValidationCheck {
            name: "radial-homogeneity".into(),
            passed: uneven.is_none(),
            detail: match uneven {
                Some(l) => {
                    format!("label {l} has radius {} instead of a common positive radius", self.labels[l].radius)
                }
                None => "all attachment points lie at the common cone radius".into(),
            },
            witness: None,
        });

        let mut decreasing = None;
        let mut strict: Option<(usize, usize)> = None;
        let mut strict_gap = qi(0);
        for (l, fib) in fibers.iter().enumerate() {
            let label = &self.labels[l];
            for (i, &e) in fib.iter().enumerate() {
                let row = self.base.dist_row(self.attachments[e].vertex);
                for &f in &fib[i + 1..] {
                    let raw = row[self.attachments[f].vertex];
                    if raw == u64::MAX {
                        continue;
                    }
                    let dx = self.base.unscale(raw);
                    let ok = match label.metric {
                        ConeMetric::Graph => dx <= label.radius * qi(2),
                        ConeMetric::Spherical => to_f64(&dx) <= self.cone_distance_on_base(label, dx) + 1e-9,
                    };
                    if !ok && decreasing.is_none() {
                        decreasing = Some((e, f));
                    }
                    if label.metric == ConeMetric::Graph
                        && dx >= label.radius
                        && (strict.is_none() || dx - label.radius > strict_gap)
                    {
                        strict = Some((e, f));
                        strict_gap = dx - label.radius;
                    }
                }
            }
        }
        checks.push(ValidationCheck {
            name: "decreasing-distance".into(),
            passed: decreasing.is_none(),
            detail: match decreasing {
                Some((e, f)) => {
                    format!("attachments {e} and {f} are closer through the cone than in the base")
                }
                None => "base distance never exceeds cone distance within a fiber".into(),
            },
            witness: decreasing,
        });
        checks.push(ValidationCheck {
            name: "graph-cone-strict-bound".into(),
            passed: strict.is_none(),
            detail: match strict {
                Some((e, f)) => format!(
                    "attachments {e} and {f} are at base distance {} against cone radius {}",
                    strict_gap + self.labels[self.attachments[e].label].radius,
                    self.labels[self.attachments[e].label].radius
                ),
                None => "fiber diameters stay below the cone radius".into(),
            },
            witness: strict,
        });
        ValidationReport { checks }
    }

    /// Base graph followed by `cone` and `attach` lines.
    pub fn to_interchange(&self) -> String {
        let mut out = write_graph(&self.base);
        for l in &self.labels {
            writeln!(out, "cone {} {} {}", l.name, l.metric.keyword(), l.radius).unwrap();
        }
        for a in &self.attachments {
            writeln!(out, "attach {} {}", self.labels[a.label].name, a.vertex).unwrap();
        }
        out
    }

    pub fn from_interchange(text: &str) -> Result<ConeSpec, ConeError> {
        let (g, ext) = parse_document(text)?;
        let mut labels: Vec<ConeLabel> = Vec::new();
        let mut attachments = Vec::new();
        for x in ext {
            let err = |m: &str| ConeError::Graph(GraphError::Parse { line: x.line, msg: m.to_string() });
            match x.keyword.as_str() {
                "cone" => {
                    if x.fields.len() != 3 {
                        return Err(err("cone needs <label> <metric> <D>"));
                    }
                    let metric = match x.fields[1].as_str() {
                        "graph" => ConeMetric::Graph,
                        "spherical" => ConeMetric::Spherical,
                        _ => return Err(err("unknown cone metric")),
                    };
                    let radius = parse_q(&x.fields[2]).map_err(|e| err(&e.to_string()))?;
                    if labels.iter().any(|l| l.name == x.fields[0]) {
                        return Err(err("duplicate cone label"));
                    }
                    labels.push(ConeLabel { name: x.fields[0].clone(), metric, radius });
                }
                "attach" => {
                    if x.fields.len() != 2 {
                        return Err(err("attach needs <label> <vertex>"));
                    }
                    let label =
                        labels.iter().position(|l| l.name == x.fields[0]).ok_or_else(|| err("unknown cone label"))?;
                    let vertex: usize = x.fields[1].parse().map_err(|_| err("bad vertex"))?;
                    attachments.push(Attachment { vertex, label });
                }
                other => return Err(err(&format!("unexpected keyword `{other}`"))),
            }
        }
        Ok(ConeSpec { base: Arc::new(g), attachments, labels })
    }
}

/// The coned-off graph: base vertices keep their ids, apexes follow, and the
/// base edges keep their ids with the cone edges after them.
#[derive(Clone, Debug)]
pub struct ConedSpace {
    pub spec: ConeSpec,
    pub graph: Arc<MetricGraph>,
    pub apex: Vec<VertexId>,
    /// Cone edge of each attachment, oriented from `psi(e)` to the apex.
    pub cone_edge: Vec<EdgeId>,
    pub fibers: Vec<Vec<usize>>,
}

impl ConedSpace {
    pub fn base_vertex_count(&self) -> usize {
        self.spec.base.vertex_count()
    }

    pub fn base_edge_count(&self) -> usize {
        self.spec.base.edge_count()
    }

    pub fn is_base_vertex(&self, v: VertexId) -> bool {
        v < self.base_vertex_count()
    }

    pub fn is_cone_edge(&self, e: EdgeId) -> bool {
        e >= self.base_edge_count()
    }

    /// Label of an apex vertex.
    pub fn apex_label(&self, v: VertexId) -> Option<usize> {
        v.checked_sub(self.base_vertex_count()).filter(|&l| l < self.apex.len())
    }

    pub fn radius(&self) -> Q {
        self.spec.labels.first().map(|l| l.radius).unwrap_or(qi(0))
    }

    pub fn to_interchange(&self) -> String {
        self.spec.to_interchange()
    }
}

/// Validates and builds; only graph cones give a graph.
pub fn build_coned_space(spec: ConeSpec) -> Result<ConedSpace, ConeError> {
    let report = spec.validate();
    if !report.passed() {
        let msg = report.failures().iter().map(|c| c.detail.clone()).collect::<Vec<_>>().join("; ");
        return Err(ConeError::InvalidConeSpec(msg));
    }
    build_coned_space_unchecked(spec)
}

/// Builds the coned graph without checking the cone conditions.
pub fn build_coned_space_unchecked(spec: ConeSpec) -> Result<ConedSpace, ConeError> {
    if spec.labels.iter().any(|l| l.metric != ConeMetric::Graph) {
        return Err(ConeError::InvalidConeSpec(
            "spherical cones are realised by SphericalConedSpace, not as a graph".into(),
        ));
    }
    let base = &spec.base;
    let n = base.vertex_count();
    let mut b = GraphBuilder::new();
    for v in 0..n {
        b.add_vertex(base.label(v));
    }
    for e in base.edges() {
        b.add_edge(e.u, e.v, e.len)?;
    }
    let apex: Vec<VertexId> = spec.labels.iter().map(|l| b.add_vertex(format!("apex {}", l.name))).collect();
    let mut cone_edge = Vec::with_capacity(spec.attachments.len());
    for a in &spec.attachments {
        if a.vertex >= n || a.label >= apex.len() {
            return Err(ConeError::InvalidConeSpec("attachment out of range".into()));
        }
        cone_edge.push(b.add_edge(a.vertex, apex[a.label], spec.labels[a.label].radius)?);
    }
    let fibers = spec.fibers();
    Ok(ConedSpace { graph: Arc::new(b.build()), apex, cone_edge, fibers, spec })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_path(n: usize) -> Arc<MetricGraph> {
        let mut b = GraphBuilder::with_vertices(n);
        for i in 0..n - 1 {
            b.add_edge(i, i + 1, qi(1)).unwrap();
        }
        Arc::new(b.build())
    }

    fn spec_on_path(d: Q, fiber: &[VertexId]) -> ConeSpec {
        ConeSpec {
            base: unit_path(4),
            attachments: fiber.iter().map(|&v| Attachment { vertex: v, label: 0 }).collect(),
            labels: vec![ConeLabel { name: "L".into(), metric: ConeMetric::Graph, radius: d }],
        }
    }

    #[test]
    fn single_point_fiber_passes() {
        assert!(spec_on_path(qi(1), &[2]).validate().passed());
    }

    #[test]
    fn strict_bound_witness() {
        let ok = spec_on_path(qi(3), &[0, 1, 2]).validate();
        assert!(ok.passed());
        let bad = spec_on_path(qi(1), &[0, 1, 2]).validate();
        assert!(bad.check("decreasing-distance").unwrap().passed);
        let s = bad.check("graph-cone-strict-bound").unwrap();
        assert!(!s.passed);
        assert_eq!(s.witness, Some((0, 2)));
        assert!(matches!(build_coned_space(spec_on_path(qi(1), &[0, 1, 2])), Err(ConeError::InvalidConeSpec(_))));
    }

    #[test]
    fn short_cone_shortcuts_far_pair() {
        let sp = build_coned_space_unchecked(spec_on_path(qi(1), &[0, 3])).unwrap();
        assert_eq!(sp.graph.dist(0, 3).unwrap(), qi(2));
        let sp = build_coned_space(spec_on_path(qi(4), &[0, 3])).unwrap();
        assert_eq!(sp.graph.dist(0, 3).unwrap(), qi(3));
    }

    #[test]
    fn interchange_round_trip() {
        let s = spec_on_path(qi(3), &[0, 2]);
        let text = s.to_interchange();
        assert!(text.ends_with("cone L graph 3\nattach L 0\nattach L 2\n"));
        let back = ConeSpec::from_interchange(&text).unwrap();
        assert_eq!(back.attachments, s.attachments);
        assert_eq!(back.labels, s.labels);
    }
}
