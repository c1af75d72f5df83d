//! Probes of relative geometric actions on truncations.

use serde::Serialize;

use super::{ConedCayleyBall, Element, GroupError, Point, SymbolicSpace};
use crate::graph::{MetricGraph, VertexId};
use crate::par;
use crate::rational::{qi, serde_q, Q};

/// Largest pairwise distance among `vertices`; `None` if some pair is disconnected.
pub fn relative_diameter(graph: &MetricGraph, vertices: &[VertexId]) -> Option<Q> {
    let mut best = 0u64;
    for &u in vertices {
        let row = graph.dist_row(u);
        for &v in vertices {
            if row[v] == u64::MAX {
                return None;
            }
            best = best.max(row[v]);
        }
    }
    Some(graph.unscale(best))
}

/// Relative diameter of a set of group elements in a coned Cayley ball.
pub fn relative_diameter_of(coned: &ConedCayleyBall, elements: &[Element]) -> Result<Q, GroupError> {
    let grp = coned.space.group();
    let vs = elements
        .iter()
        .map(|g| coned.vertex(g).ok_or_else(|| GroupError::ElementOutsideBall(grp.format(g))))
        .collect::<Result<Vec<_>, _>>()?;
    relative_diameter(&coned.space.graph, &vs).ok_or_else(|| GroupError::BallTooSmall("disconnected elements".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct PropernessReport {
    #[serde(with = "serde_q")]
    pub r: Q,
    /// `|V_r|` within the action table.
    pub count: usize,
    /// Relative diameter of `V_r`; `None` when some pair is unreachable.
    #[serde(with = "serde_q::option")]
    pub relative_diameter: Option<Q>,
    /// Some element of `V_r` has the maximal word length of the table, so
    /// the true `V_r` may be larger than the tabulated one.
    pub touches_boundary: bool,
    pub table_radius: usize,
}

/// Computes `V_r = {g : d(x*, g x*) <= r}` over the group vertices of
/// `reference` with word length at most `table_radius`, and its diameter in
/// `reference`.
pub fn relative_properness_probe(
    target: &SymbolicSpace,
    basepoint: VertexId,
    reference: &ConedCayleyBall,
    table_radius: usize,
    r: Q,
    safe_radius: Q,
) -> Result<PropernessReport, GroupError> {
    if r > safe_radius {
        return Err(GroupError::BallTooSmall(format!("probe radius {r} exceeds safe radius {safe_radius}")));
    }
    let row = target.graph.dist_row(basepoint);
    let mut members = Vec::new();
    let mut touches = false;
    for v in reference.within(table_radius) {
        let Point::Elem(g) = &reference.space.points[v] else {
            continue;
        };
        let Some(gx) = target.act(g, basepoint) else {
            continue;
        };
        if row[gx] != u64::MAX && target.graph.unscale(row[gx]) <= r {
            members.push(v);
            touches |= reference.word_length[v] == table_radius;
        }
    }
    Ok(PropernessReport {
        r,
        count: members.len(),
        relative_diameter: relative_diameter(&reference.space.graph, &members),
        touches_boundary: touches,
        table_radius,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QiPoint {
    #[serde(with = "serde_q")]
    pub lambda: Q,
    #[serde(with = "serde_q")]
    pub k: Q,
}

#[derive(Clone, Debug, Serialize)]
pub struct QiReport {
    pub pairs: usize,
    /// `max d(Phi x, Phi y) / d(x, y)`.
    #[serde(with = "serde_q")]
    pub expansion: Q,
    /// `max d(x, y) / d(Phi x, Phi y)`; `None` when distinct points collapse.
    #[serde(with = "serde_q::option")]
    pub contraction: Option<Q>,
    /// Minimal additive constant for each multiplicative constant on the grid.
    pub frontier: Vec<QiPoint>,
    /// Grid point with the least additive constant (smallest lambda on ties).
    pub best: QiPoint,
    /// Largest distance from a target core vertex to the image.
    #[serde(with = "serde_q")]
    pub density_radius: Q,
    #[serde(with = "serde_q")]
    pub source_diameter: Q,
    /// Set when even the best constants are comparable to the truncation
    /// size, i.e. the data give no evidence of a quasi-isometry.
    pub not_qi: bool,
}

pub fn default_lambda_grid() -> Vec<Q> {
    vec![qi(1), Q::new(3, 2), qi(2), qi(3), qi(5)]
}

/// Empirical quasi-isometry constants of `map` over pairs of `source_core`.
pub fn schwarz_milnor_probe(
    source: &MetricGraph,
    source_core: &[VertexId],
    target: &MetricGraph,
    map: &dyn Fn(VertexId) -> Option<VertexId>,
    target_core: &[VertexId],
    lambdas: &[Q],
    jobs: usize,
) -> Result<QiReport, GroupError> {
    let images: Vec<VertexId> = source_core
        .iter()
        .map(|&v| map(v).ok_or_else(|| GroupError::BallTooSmall(format!("map undefined at vertex {v}"))))
        .collect::<Result<_, _>>()?;
    #[derive(Clone)]
    struct Acc {
        expansion: Q,
        contraction: Option<Q>,
        collapsed: bool,
        k: Vec<Q>,
        diam: Q,
        pairs: usize,
    }
    let identity = Acc {
        expansion: qi(0),
        contraction: Some(qi(0)),
        collapsed: false,
        k: vec![qi(0); lambdas.len()],
        diam: qi(0),
        pairs: 0,
    };
    let n = source_core.len();
    let acc = par::map_reduce(
        n,
        jobs,
        identity.clone(),
        |i| {
            let mut a = identity.clone();
            let srow = source.dist_row(source_core[i]);
            let trow = target.dist_row(images[i]);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (ds, dt) = (srow[source_core[j]], trow[images[j]]);
                if ds == u64::MAX || dt == u64::MAX {
                    continue;
                }
                let d = source.unscale(ds);
                let e = target.unscale(dt);
                a.pairs += 1;
                a.diam = a.diam.max(d);
                a.expansion = a.expansion.max(e / d);
                if e == qi(0) {
                    a.collapsed = true;
                } else if let Some(c) = a.contraction.as_mut() {
                    *c = (*c).max(d / e);
                }
                for (l, k) in lambdas.iter().zip(a.k.iter_mut()) {
                    let over = e - l * d;
                    let under = d / l - e;
                    *k = (*k).max(over).max(under);
                }
            }
            a
        },
        |mut x, y| {
            x.expansion = x.expansion.max(y.expansion);
            x.collapsed |= y.collapsed;
            x.contraction = match (x.contraction, y.contraction) {
                (Some(p), Some(q)) => Some(p.max(q)),
                _ => None,
            };
            for (p, q) in x.k.iter_mut().zip(y.k) {
                *p = (*p).max(q);
            }
            x.diam = x.diam.max(y.diam);
            x.pairs += y.pairs;
            x
        },
    );
    let frontier: Vec<QiPoint> = lambdas.iter().zip(&acc.k).map(|(l, k)| QiPoint { lambda: *l, k: *k }).collect();
    let best = frontier
        .iter()
        .min_by(|a, b| a.k.cmp(&b.k).then(a.lambda.cmp(&b.lambda)))
        .cloned()
        .unwrap_or(QiPoint { lambda: qi(1), k: qi(0) });
    let mut density = qi(0);
    let image_set: Vec<VertexId> = (0..source.vertex_count()).filter_map(map).collect();
    for &t in target_core {
        let row = target.dist_row(t);
        let m = image_set.iter().map(|&x| row[x]).min().unwrap_or(u64::MAX);
        if m != u64::MAX {
            density = density.max(target.unscale(m));
        }
    }
    let not_qi = acc.pairs > 0 && best.k * qi(2) * best.lambda >= acc.diam;
    Ok(QiReport {
        pairs: acc.pairs,
        expansion: acc.expansion,
        contraction: if acc.collapsed { None } else { acc.contraction },
        frontier,
        best,
        density_radius: density,
        source_diameter: acc.diam,
        not_qi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{coned_cayley_ball, Group, GroupSpec};
    use crate::rational::q;
    use std::sync::Arc;

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
    fn relative_diameters_on_f2xz() {
        let g = f2xz();
        let h = g.subgroup(&["a"]).unwrap();
        let c = coned_cayley_ball(g.clone(), None, vec![h], 6, q(1, 2)).unwrap();
        let one = vec![g.identity()];
        assert_eq!(relative_diameter_of(&c, &one).unwrap(), qi(0));
        let zs: Vec<_> = (-3..=3).map(|k| g.parse(&format!("z^{k}")).unwrap()).collect();
        assert_eq!(relative_diameter_of(&c, &zs).unwrap(), qi(6));
        let far = vec![g.parse("b^7").unwrap()];
        assert!(matches!(relative_diameter_of(&c, &far), Err(GroupError::ElementOutsideBall(_))));
    }

    #[test]
    fn identity_map_is_isometric() {
        let g = f2xz();
        let c = coned_cayley_ball(g, None, vec![], 2, q(1, 2)).unwrap();
        let core = c.within(1);
        let gr = &c.space.graph;
        let rep = schwarz_milnor_probe(gr, &core, gr, &|v| Some(v), &core, &default_lambda_grid(), 1).unwrap();
        assert_eq!(rep.best.lambda, qi(1));
        assert_eq!(rep.best.k, qi(0));
        assert!(!rep.not_qi);
        let collapse = schwarz_milnor_probe(gr, &core, gr, &|_| Some(0), &core, &default_lambda_grid(), 1).unwrap();
        assert_eq!(collapse.density_radius, qi(1));
        assert!(collapse.contraction.is_none());
        assert!(collapse.not_qi);
    }
}
