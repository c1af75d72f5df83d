//! Cones with the spherical (Euclidean sector) metric. Distances come from the
//! cosine formula; geodesics inside a cone are straight segments of the
//! planar development of the sector spanned by two attachment points.

use std::f64::consts::PI;

use super::{ConeError, ConeMetric, ConeSpec};
use crate::combing::{CanonicalCombing, Combing, CombingError};
use crate::graph::{GeodesicPath, GraphPoint, VertexId};
use crate::rational::{to_f64, Q};

pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalCone {
    pub radius: f64,
}

impl SphericalCone {
    pub fn new(radius: f64) -> Self {
        SphericalCone { radius }
    }

    /// Distance between `(x, s)` and `(y, t)` where `dx = d_X(x, y)` and the
    /// radial coordinates run from 0 at the apex to 1 at the base.
    pub fn distance(&self, s: f64, t: f64, dx: f64) -> f64 {
        let d = self.radius;
        let c = dx.min(PI).cos();
        ((d * s).powi(2) + (d * t).powi(2) - 2.0 * d * d * s * t * c).max(0.0).sqrt()
    }

    /// Point at fraction `u` of the geodesic from `(x, s)` to `(y, t)`, as a
    /// radial coordinate and a fraction of the angle from `x` towards `y`.
    pub fn develop(&self, s: f64, t: f64, dx: f64, u: f64) -> (f64, f64) {
        let theta = dx.min(PI);
        let (ax, ay) = (s, 0.0);
        let (bx, by) = (t * theta.cos(), t * theta.sin());
        let (px, py) = ((1.0 - u) * ax + u * bx, (1.0 - u) * ay + u * by);
        let r = px.hypot(py);
        let phi = if theta <= 0.0 || r <= TOLERANCE {
            0.0
        } else if theta >= PI && px < 0.0 {
            1.0
        } else {
            py.atan2(px).clamp(0.0, theta) / theta
        };
        (r, phi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SphericalPoint {
    Base(VertexId),
    /// Point over attachment `attachment` at radial coordinate `s` in (0, 1].
    Cone {
        attachment: usize,
        s: f64,
    },
    Apex(usize),
}

/// Location reached by a spherical path.
#[derive(Clone, Debug, PartialEq)]
pub enum SphericalLocation {
    Base(GraphPoint),
    /// Point of the sector between attachments `from` and `to` of `label`.
    Sector {
        label: usize,
        from: usize,
        to: usize,
        s: f64,
        phi: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum SphericalPiece {
    Base(GeodesicPath),
    Sector { label: usize, from: usize, to: usize, s_from: f64, s_to: f64, dx: f64, length: f64 },
}

impl SphericalPiece {
    pub fn length(&self) -> f64 {
        match self {
            SphericalPiece::Base(p) => to_f64(&p.length()),
            SphericalPiece::Sector { length, .. } => *length,
        }
    }

    pub fn is_cone(&self) -> bool {
        matches!(self, SphericalPiece::Sector { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphericalPath {
    pub pieces: Vec<SphericalPiece>,
}

impl SphericalPath {
    pub fn length(&self) -> f64 {
        self.pieces.iter().map(SphericalPiece::length).sum()
    }

    pub fn cone_crossings(&self) -> usize {
        let mut runs = 0;
        let mut inside = false;
        for p in &self.pieces {
            if p.is_cone() && !inside {
                runs += 1;
            }
            inside = p.is_cone();
        }
        runs
    }
}

/// A base graph with spherical cones over finite fibers, carrying the induced
/// length metric.
#[derive(Clone, Debug)]
pub struct SphericalConedSpace {
    pub spec: ConeSpec,
    pub fibers: Vec<Vec<usize>>,
    base: CanonicalCombing,
    /// Base distances, all pairs.
    dx: Vec<Vec<f64>>,
    /// Distances in the coned space between base vertices.
    induced: Vec<Vec<f64>>,
}

impl SphericalConedSpace {
    pub fn build(spec: ConeSpec) -> Result<Self, ConeError> {
        let report = spec.validate();
        if !report.passed() {
            let msg = report.failures().iter().map(|c| c.detail.clone()).collect::<Vec<_>>().join("; ");
            return Err(ConeError::InvalidConeSpec(msg));
        }
        if spec.labels.iter().any(|l| l.metric != ConeMetric::Spherical) {
            return Err(ConeError::InvalidConeSpec("all cones must be spherical".into()));
        }
        let g = spec.base.clone();
        let n = g.vertex_count();
        let dx: Vec<Vec<f64>> = (0..n)
            .map(|u| {
                g.dist_row(u)
                    .iter()
                    .map(|&d| if d == u64::MAX { f64::INFINITY } else { to_f64(&g.unscale(d)) })
                    .collect()
            })
            .collect();
        let mut induced = dx.clone();
        let fibers = spec.fibers();
        for (l, fib) in fibers.iter().enumerate() {
            let cone = SphericalCone::new(to_f64(&spec.labels[l].radius));
            for &e in fib {
                for &f in fib {
                    let (a, b) = (spec.attachments[e].vertex, spec.attachments[f].vertex);
                    let c = cone.distance(1.0, 1.0, dx[a][b]);
                    if c < induced[a][b] {
                        induced[a][b] = c;
                    }
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = induced[i][k] + induced[k][j];
                    if via < induced[i][j] {
                        induced[i][j] = via;
                    }
                }
            }
        }
        Ok(SphericalConedSpace { base: CanonicalCombing::new(g), fibers, dx, induced, spec })
    }

    fn cone(&self, label: usize) -> SphericalCone {
        SphericalCone::new(to_f64(&self.spec.labels[label].radius))
    }

    pub fn base_distance(&self, u: VertexId, v: VertexId) -> f64 {
        self.induced[u][v]
    }

    /// `(label, attachment, s)` of a cone point; the apex has no attachment.
    fn place(&self, p: SphericalPoint) -> Option<(usize, Option<usize>, f64)> {
        match p {
            SphericalPoint::Base(_) => None,
            SphericalPoint::Apex(l) => Some((l, None, 0.0)),
            SphericalPoint::Cone { attachment, s } => {
                Some((self.spec.attachments[attachment].label, Some(attachment), s))
            }
        }
    }

    fn sector(&self, label: usize, from: Option<usize>, s_from: f64, to: Option<usize>, s_to: f64) -> SphericalPiece {
        let from_e = from.or(to).unwrap_or(self.fibers[label][0]);
        let to_e = to.unwrap_or(from_e);
        let dx = if from.is_some() && to.is_some() {
            self.dx[self.spec.attachments[from_e].vertex][self.spec.attachments[to_e].vertex]
        } else {
            0.0
        };
        let length = self.cone(label).distance(s_from, s_to, dx);
        SphericalPiece::Sector { label, from: from_e, to: to_e, s_from, s_to, dx, length }
    }

    /// Ways to leave `p` for the base: first piece (if any), base vertex, attachment used.
    fn legs(&self, p: SphericalPoint) -> Vec<(Option<SphericalPiece>, VertexId, Option<usize>)> {
        match self.place(p) {
            None => {
                let SphericalPoint::Base(v) = p else { unreachable!() };
                vec![(None, v, None)]
            }
            Some((l, e, s)) => self.fibers[l]
                .iter()
                .map(|&f| (Some(self.sector(l, e, s, Some(f), 1.0)), self.spec.attachments[f].vertex, Some(f)))
                .collect(),
        }
    }

    pub fn distance(&self, p: SphericalPoint, q: SphericalPoint) -> f64 {
        let mut best = f64::INFINITY;
        if let (Some((l1, e1, s1)), Some((l2, e2, s2))) = (self.place(p), self.place(q)) {
            if l1 == l2 {
                best = self.sector(l1, e1, s1, e2, s2).length();
            }
        }
        for (a, u, _) in self.legs(p) {
            for (b, v, _) in self.legs(q) {
                let la = a.as_ref().map_or(0.0, SphericalPiece::length);
                let lb = b.as_ref().map_or(0.0, SphericalPiece::length);
                best = best.min(la + self.induced[u][v] + lb);
            }
        }
        best
    }

    /// Extended line: within the cone when strictly shorter, otherwise down
    /// into the base, along the base combing, and up again. Entry and exit
    /// attachments minimise length, ties broken by attachment ids.
    pub fn line(&self, p: SphericalPoint, q: SphericalPoint) -> Result<SphericalPath, CombingError> {
        if p == q {
            return Ok(SphericalPath { pieces: Vec::new() });
        }
        let mut best: Option<(f64, Option<usize>, Option<usize>, SphericalPath)> = None;
        for (a, u, e1) in self.legs(p) {
            for (b, v, e2) in self.legs(q) {
                if self.dx[u][v].is_infinite() {
                    continue;
                }
                let mid = self.base.line(u, v)?;
                let mut pieces = Vec::new();
                pieces.extend(a.clone());
                if mid.segment_count() > 0 {
                    pieces.push(SphericalPiece::Base(mid));
                }
                if let Some(SphericalPiece::Sector { label, from, to, s_from, s_to, dx, length }) = b {
                    pieces.push(SphericalPiece::Sector {
                        label,
                        from: to,
                        to: from,
                        s_from: s_to,
                        s_to: s_from,
                        dx,
                        length,
                    });
                }
                let path = SphericalPath { pieces };
                let len = path.length();
                let better = match &best {
                    None => true,
                    Some((l, x, y, _)) => len < l - TOLERANCE || ((len - l).abs() <= TOLERANCE && (e1, e2) < (*x, *y)),
                };
                if better {
                    best = Some((len, e1, e2, path));
                }
            }
        }
        if let (Some((l1, e1, s1)), Some((l2, e2, s2))) = (self.place(p), self.place(q)) {
            if l1 == l2 {
                let piece = self.sector(l1, e1, s1, e2, s2);
                if best.as_ref().is_none_or(|b| piece.length() < b.0 - TOLERANCE) {
                    return Ok(SphericalPath { pieces: vec![piece] });
                }
            }
        }
        best.map(|b| b.3).ok_or_else(|| CombingError::InvalidPoint(format!("{p:?} and {q:?} are not connected")))
    }

    /// Location at fraction `t` of `path`.
    pub fn eval(&self, path: &SphericalPath, t: f64) -> Result<Option<SphericalLocation>, CombingError> {
        let total = path.length();
        let mut target = t.clamp(0.0, 1.0) * total;
        for (i, piece) in path.pieces.iter().enumerate() {
            let len = piece.length();
            if target <= len || i + 1 == path.pieces.len() {
                let u = if len > 0.0 { (target / len).clamp(0.0, 1.0) } else { 0.0 };
                return Ok(Some(match piece {
                    SphericalPiece::Base(p) => {
                        let q = Q::new((u * (1u64 << 30) as f64).round() as i128, 1 << 30);
                        SphericalLocation::Base(p.eval(self.base.graph(), q)?)
                    }
                    SphericalPiece::Sector { label, from, to, s_from, s_to, dx, .. } => {
                        let (s, phi) = self.cone(*label).develop(*s_from, *s_to, *dx, u);
                        SphericalLocation::Sector { label: *label, from: *from, to: *to, s, phi }
                    }
                }));
            }
            target -= len;
        }
        Ok(None)
    }
}

/// Checks that `line(p, q)` has length `distance(p, q)` within tolerance for
/// all pairs of `points`; returns the worst discrepancy.
pub fn worst_length_defect(space: &SphericalConedSpace, points: &[SphericalPoint]) -> Result<f64, CombingError> {
    let mut worst: f64 = 0.0;
    for &p in points {
        for &q in points {
            let path = space.line(p, q)?;
            worst = worst.max((path.length() - space.distance(p, q)).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coned::{Attachment, ConeLabel};
    use crate::graph::GraphBuilder;
    use crate::rational::qi;
    use std::sync::Arc;

    #[test]
    fn cosine_formula() {
        let c = SphericalCone::new(1.0);
        assert!((c.distance(1.0, 1.0, PI / 2.0) - 2f64.sqrt()).abs() < TOLERANCE);
        assert!((c.distance(1.0, 1.0, PI) - 2.0).abs() < TOLERANCE);
        assert!((c.distance(1.0, 1.0, 7.0) - 2.0).abs() < TOLERANCE);
        let (r, phi) = c.develop(1.0, 1.0, PI / 2.0, 0.5);
        assert!((r - 0.5f64.sqrt()).abs() < TOLERANCE);
        assert!((phi - 0.5).abs() < TOLERANCE);
    }

    fn fixture(d: i128) -> ConeSpec {
        let mut b = GraphBuilder::with_vertices(4);
        for i in 0..3 {
            b.add_edge(i, i + 1, qi(1)).unwrap();
        }
        ConeSpec {
            base: Arc::new(b.build()),
            attachments: vec![Attachment { vertex: 0, label: 0 }, Attachment { vertex: 3, label: 0 }],
            labels: vec![ConeLabel { name: "S".into(), metric: ConeMetric::Spherical, radius: qi(d) }],
        }
    }

    #[test]
    fn decreasing_distance_needs_large_radius() {
        assert!(!fixture(1).validate().passed());
        assert!(SphericalConedSpace::build(fixture(1)).is_err());
        assert!(fixture(2).validate().passed());
    }

    #[test]
    fn lines_have_distance_length() {
        let sp = SphericalConedSpace::build(fixture(2)).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                assert!((sp.base_distance(u, v) - (u as f64 - v as f64).abs()).abs() < TOLERANCE);
            }
        }
        let pts = vec![
            SphericalPoint::Base(0),
            SphericalPoint::Base(2),
            SphericalPoint::Apex(0),
            SphericalPoint::Cone { attachment: 0, s: 0.5 },
            SphericalPoint::Cone { attachment: 1, s: 0.25 },
        ];
        assert!(worst_length_defect(&sp, &pts).unwrap() < TOLERANCE);
        for &p in &pts {
            for &q in &pts {
                let path = sp.line(p, q).unwrap();
                assert!(path.cone_crossings() <= 2);
                let mid = sp.eval(&path, 0.5).unwrap();
                assert_eq!(mid.is_some(), !path.pieces.is_empty());
            }
        }
    }
}
