use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::engine::{FastPath, Loc, Tick, GRID_STEPS};
use super::{Best, CertReport, Certifier, CertifyError, Hit, Witness};
use crate::graph::VertexId;
use crate::rational::{fmt_q, Q};
use crate::tree::{NodeKind, TreeOfSpaces};

/// Where the convex subspace of a triple comes from.
#[derive(Clone, Debug)]
pub enum ConvexSelector {
    /// One subspace for every triple; sorted vertex ids.
    Fixed(Vec<VertexId>),
    /// The vertex space (or glued point) over the median of the three images in `T`.
    Tree(Arc<TreeOfSpaces>),
}

impl ConvexSelector {
    pub fn fixed(mut vertices: Vec<VertexId>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        ConvexSelector::Fixed(vertices)
    }

    fn subspace<'s>(&'s self, triple: &[VertexId; 3]) -> Subspace<'s> {
        match self {
            ConvexSelector::Fixed(v) => Subspace::Set(v),
            ConvexSelector::Tree(tree) => {
                let nodes = triple.map(|v| tree.xi[v]);
                let rows = nodes.map(|k| tree.t.dist_row(k));
                let median = (0..tree.kinds.len())
                    .min_by_key(|&k| rows.iter().map(|r| r[k]).sum::<u64>())
                    .expect("non-empty tree");
                match tree.kinds[median] {
                    NodeKind::K => Subspace::Set(&tree.vertex_spaces[median]),
                    NodeKind::L => Subspace::Point(tree.glued_point[median]),
                }
            }
        }
    }
}

enum Subspace<'s> {
    Set(&'s [VertexId]),
    Point(Option<VertexId>),
}

impl Subspace<'_> {
    fn contains(&self, v: VertexId) -> bool {
        match self {
            Subspace::Set(s) => s.binary_search(&v).is_ok(),
            Subspace::Point(p) => *p == Some(v),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn property(self) -> &'static str {
        match self {
            Direction::Forward => "thinness-forward",
            Direction::Backward => "thinness-backward",
        }
    }
}

pub(crate) enum Outcome {
    Skipped,
    Missed,
    Items(Items),
}

pub(crate) struct Items {
    /// Fellow-travel constant of the outer segments.
    pub fellow: Q,
    /// `d(a,b) - max{c1,c1'} d(w1,w2)` (forward) or its backward mirror.
    pub slack_ends: Q,
    /// Near-additivity defect.
    pub slack_sum: Q,
    pub restriction: bool,
    pub params: Vec<(&'static str, String)>,
}

/// First and last vertex nodes of `path` inside `x`.
fn span(path: &FastPath, x: &Subspace) -> Option<(usize, usize)> {
    let inside: Vec<usize> =
        (0..path.nodes.len()).filter(|&i| path.nodes[i].as_vertex().is_some_and(|v| x.contains(v))).collect();
    Some((*inside.first()?, *inside.last()?))
}

#[derive(Clone)]
struct ThinAcc {
    fellow: Best<Q>,
    ends: Best<Q>,
    sum: Best<Q>,
    restriction: Best<Q>,
    missed: Best<Q>,
    considered: usize,
    skipped: usize,
    missed_count: usize,
    restriction_failures: usize,
}

impl ThinAcc {
    fn new() -> Self {
        ThinAcc {
            fellow: Best::empty(),
            ends: Best::empty(),
            sum: Best::empty(),
            restriction: Best::empty(),
            missed: Best::empty(),
            considered: 0,
            skipped: 0,
            missed_count: 0,
            restriction_failures: 0,
        }
    }

    fn merge(self, o: Self) -> Self {
        ThinAcc {
            fellow: self.fellow.merge(o.fellow),
            ends: self.ends.merge(o.ends),
            sum: self.sum.merge(o.sum),
            restriction: self.restriction.merge(o.restriction),
            missed: self.missed.merge(o.missed),
            considered: self.considered + o.considered,
            skipped: self.skipped + o.skipped,
            missed_count: self.missed_count + o.missed_count,
            restriction_failures: self.restriction_failures + o.restriction_failures,
        }
    }
}

impl<'a> Certifier<'a> {
    /// Evaluates the thinness items on one triple: `(v, w1, w2)` forward,
    /// `(v1, v2, w)` backward.
    pub(crate) fn thin_triple(
        &self,
        selector: &ConvexSelector,
        d: Tick,
        dir: Direction,
        t: [VertexId; 3],
    ) -> Result<Outcome, CertifyError> {
        let m = &self.metric;
        // Both variants are read along lines leaving the shared endpoint.
        let (shared, e1, e2) = match dir {
            Direction::Forward => (t[0], t[1], t[2]),
            Direction::Backward => (t[2], t[0], t[1]),
        };
        let (s, u1, u2) = (shared as u32, e1 as u32, e2 as u32);
        if m.vdist(s, u1).min(m.vdist(s, u2)) <= 2 * d {
            return Ok(Outcome::Skipped);
        }
        let (g1, g2) = match dir {
            Direction::Forward => (self.line_between(shared, e1)?, self.line_between(shared, e2)?),
            Direction::Backward => (
                Arc::new(self.line_between(e1, shared)?.reversed()),
                Arc::new(self.line_between(e2, shared)?.reversed()),
            ),
        };
        let x = selector.subspace(&t);
        let (Some((i0, i1)), Some((j0, j1))) = (span(&g1, &x), span(&g2, &x)) else {
            return Ok(Outcome::Missed);
        };
        // Item 1: the segments from the shared endpoint to the first points in X.
        let (p1, p2) = (g1.nodes[i0], g2.nodes[j0]);
        let mut fellow = m.dist(&g1.nodes[0], &g2.nodes[0]).max(m.dist(&p1, &p2));
        for (ga, ia, gb, ib) in [(&g1, i0, &g2, j0), (&g2, j0, &g1, i0)] {
            let stop = ga.cum[ia];
            let mut probes: Vec<Tick> = (0..=GRID_STEPS).map(|k| k * stop / GRID_STEPS).collect();
            probes.extend(ga.cum[..=ia].iter().copied());
            for s in probes {
                let p: Loc = ga.at(m, s);
                fellow = fellow.max(gb.distance_to_prefix(m, &p, ib));
            }
        }
        // Items 2 and 4 in terms of the far endpoints and the last points in X.
        let (a, b) = (g1.nodes[i1], g2.nodes[j1]);
        let (f1, f2) = (*g1.nodes.last().unwrap(), *g2.nodes.last().unwrap());
        let dab = m.dist(&a, &b) as i128;
        let dff = m.dist(&f1, &f2) as i128;
        let c1 = Q::new(g1.cum[i1] as i128, g1.len as i128);
        let c2 = Q::new(g2.cum[j1] as i128, g2.len as i128);
        let cmax = c1.max(c2);
        let slack_ends = m.to_q(dab, 1) - cmax * m.to_q(dff, 1);
        let sum = m.dist(&f1, &a) as i128 + dab + m.dist(&b, &f2) as i128 - dff;
        // Item 3: the middle segments are combing lines.
        let restriction = [(&g1, i0, i1), (&g2, j0, j1)].into_iter().all(|(g, lo, hi)| {
            let (from, to) = (g.nodes[lo].a as usize, g.nodes[hi].a as usize);
            let expect = match dir {
                Direction::Forward => self.line_between(from, to),
                Direction::Backward => self.line_between(to, from).map(|p| Arc::new(p.reversed())),
            };
            match expect {
                Ok(e) => e.nodes[..] == g.nodes[lo..=hi] && e.edges[..] == g.edges[lo..hi],
                Err(_) => false,
            }
        });
        let param = |g: &FastPath, i: usize| {
            let c = g.param(g.cum[i]);
            match dir {
                Direction::Forward => c,
                Direction::Backward => Q::from_integer(1) - c,
            }
        };
        let names = match dir {
            Direction::Forward => ["c0", "c0'", "c1", "c1'"],
            Direction::Backward => ["c1", "c1'", "c0", "c0'"],
        };
        Ok(Outcome::Items(Items {
            fellow: m.to_q(fellow as i128, 1),
            slack_ends,
            slack_sum: m.to_q(sum, 1),
            restriction,
            params: vec![
                (names[0], fmt_q(&param(&g1, i0))),
                (names[1], fmt_q(&param(&g2, j0))),
                (names[2], fmt_q(&param(&g1, i1))),
                (names[3], fmt_q(&param(&g2, j1))),
            ],
        }))
    }

    /// Items (1)-(4) of coarse `(C, D, E)`-thinness for all sampled triples
    /// longer than `2D`. `C` and `E` belong to the subspace certification and
    /// are not re-checked here.
    pub fn check_thinness(&self, selector: &ConvexSelector, d: Q, dir: Direction) -> Result<CertReport, CertifyError> {
        if d < Q::from_integer(0) {
            return Err(CertifyError::InvalidProfile("D must be non-negative".into()));
        }
        let m = &self.metric;
        let d_ticks = m
            .ticks(&d)
            .ok_or_else(|| CertifyError::InvalidProfile(format!("D = {} is off the graph scale", fmt_q(&d))))?;
        if let ConvexSelector::Fixed(set) = selector {
            let tested: Vec<VertexId> = self.core().iter().copied().filter(|v| set.binary_search(v).is_ok()).collect();
            if let Some((u, v)) = m.graph.convexity_violation(set, &tested) {
                return Err(CertifyError::SubspaceNotConvex(format!("a geodesic from {u} to {v} leaves the subspace")));
            }
        }
        self.require_geodesic()?;
        let core = self.core();
        let one = Q::from_integer(1);
        let (acc, samples) = self.run(
            dir.property(),
            3,
            ThinAcc::new(),
            |idx, t, acc| {
                let triple = [core[t[0]], core[t[1]], core[t[2]]];
                let hit = |params: &[(&'static str, String)], lhs: Q| Hit {
                    tuple: triple.to_vec(),
                    params: params.to_vec(),
                    lhs,
                };
                match self.thin_triple(selector, d_ticks, dir, triple)? {
                    Outcome::Skipped => acc.skipped += 1,
                    Outcome::Missed => {
                        acc.missed_count += 1;
                        acc.missed.offer(one, idx, || hit(&[], one));
                    }
                    Outcome::Items(it) => {
                        acc.considered += 1;
                        acc.fellow.offer(it.fellow, idx, || hit(&it.params, it.fellow));
                        acc.ends.offer(it.slack_ends, idx, || hit(&it.params, it.slack_ends));
                        acc.sum.offer(it.slack_sum, idx, || hit(&it.params, it.slack_sum));
                        if !it.restriction {
                            acc.restriction_failures += 1;
                            acc.restriction.offer(one, idx, || hit(&it.params, one));
                        }
                    }
                }
                Ok(())
            },
            ThinAcc::merge,
        )?;
        if acc.considered + acc.missed_count == 0 {
            return Err(CertifyError::TriplesTooShort(acc.skipped));
        }
        let zero = Q::from_integer(0);
        let get = |b: &Best<Q>| b.value.unwrap_or(zero).max(zero);
        let (fellow, ends, sum) = (get(&acc.fellow), get(&acc.ends), get(&acc.sum));
        let four = Q::from_integer(4) * d;
        let fellow_ok = fellow <= d;
        let ends_ok = ends <= four;
        let sum_ok = sum <= four;
        let ok = acc.missed_count == 0 && acc.restriction_failures == 0 && fellow_ok && ends_ok && sum_ok;
        let witness_of = |b: &Best<Q>, item: &str, bound: Q| -> Option<Witness> {
            let h = b.hit.as_ref()?;
            let mut params: std::collections::BTreeMap<String, String> =
                h.params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            params.insert("item".into(), item.into());
            Some(Witness { vertices: h.tuple.clone(), params, lhs: fmt_q(&h.lhs), rhs: fmt_q(&bound) })
        };
        let witness = if acc.missed_count > 0 {
            witness_of(&acc.missed, "meets-subspace", zero)
        } else if !fellow_ok {
            witness_of(&acc.fellow, "fellow-travel", d)
        } else if !ends_ok {
            witness_of(&acc.ends, "endpoint-distance", four)
        } else if acc.restriction_failures > 0 {
            witness_of(&acc.restriction, "restriction", zero)
        } else if !sum_ok {
            witness_of(&acc.sum, "near-additivity", four)
        } else {
            None
        };
        let mut r = self.report(dir.property(), &[("D", d)], ok, witness, samples);
        r.minimal.insert("fellow".into(), fmt_q(&fellow));
        r.minimal.insert("slack-ends".into(), fmt_q(&ends));
        r.minimal.insert("slack-sum".into(), fmt_q(&sum));
        let needed = fellow.max(ends / Q::from_integer(4)).max(sum / Q::from_integer(4));
        r.minimal.insert("D".into(), fmt_q(&needed));
        let eight = Q::from_integer(8) * d;
        r.details.insert("considered".into(), acc.considered.to_string());
        r.details.insert("skipped-short".into(), acc.skipped.to_string());
        r.details.insert("missed-subspace".into(), acc.missed_count.to_string());
        r.details.insert("restriction-failures".into(), acc.restriction_failures.to_string());
        r.details.insert("fellow-within-D".into(), fellow_ok.to_string());
        r.details.insert("fellow-within-2D".into(), (fellow <= d + d).to_string());
        r.details.insert("slack-within-4D".into(), (ends_ok && sum_ok).to_string());
        r.details.insert("slack-within-8D".into(), (ends <= eight && sum <= eight).to_string());
        Ok(r)
    }
}
