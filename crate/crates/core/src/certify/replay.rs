use num_traits::Signed;

use super::engine::Tick;
use super::thin::{ConvexSelector, Direction, Outcome};
use super::{CertReport, Certifier, CertifyError, Theta, Witness};
use crate::combing::Combing;
use crate::graph::{GraphPoint, VertexId};
use crate::rational::{parse_q, Q};

fn param(w: &Witness, key: &str) -> Result<Q, CertifyError> {
    w.params
        .get(key)
        .and_then(|s| parse_q(s).ok())
        .ok_or_else(|| CertifyError::Replay(format!("witness lacks `{key}`")))
}

fn profile(r: &CertReport, key: &str) -> Result<Q, CertifyError> {
    r.profile
        .get(key)
        .and_then(|s| parse_q(s).ok())
        .ok_or_else(|| CertifyError::Replay(format!("profile lacks `{key}`")))
}

fn vertices<const N: usize>(w: &Witness) -> Result<[VertexId; N], CertifyError> {
    w.vertices.clone().try_into().map_err(|_| CertifyError::Replay(format!("expected {N} vertices")))
}

struct Slow<'c> {
    comb: &'c dyn Combing,
}

impl Slow<'_> {
    fn at(&self, x: VertexId, y: VertexId, t: Q) -> Result<GraphPoint, CertifyError> {
        let g = self.comb.graph();
        Ok(self.comb.line(x, y)?.eval(g, t)?)
    }

    fn d(&self, p: &GraphPoint, q: &GraphPoint) -> Result<Q, CertifyError> {
        Ok(self.comb.graph().point_distance(p, q)?)
    }

    fn dv(&self, x: VertexId, y: VertexId) -> Result<Q, CertifyError> {
        Ok(self.comb.graph().dist(x, y)?)
    }

    /// `(lhs, violated)` of the quasi-geodesic bounds.
    fn quasi(&self, w: &Witness, lambda: Q, k: Q) -> Result<(Q, bool), CertifyError> {
        let [x, y] = vertices(w)?;
        let (s, t) = (param(w, "s")?, param(w, "t")?);
        let lhs = self.d(&self.at(x, y, s)?, &self.at(x, y, t)?)?;
        let gap = (t - s).abs() * self.dv(x, y)?;
        let upper = w.params.get("side").is_none_or(|s| s == "upper");
        let violated = if upper { lhs > lambda * gap + k } else { lhs < gap / lambda - k };
        Ok((lhs, violated))
    }

    fn convexity(&self, w: &Witness, e: Q, c_bound: Q) -> Result<(Q, bool), CertifyError> {
        let [x1, y1, x2, y2] = vertices(w)?;
        let (a, b, c) = (param(w, "a")?, param(w, "b")?, param(w, "c")?);
        let lhs = self.d(&self.at(x1, y1, c * a)?, &self.at(x2, y2, c * b)?)?;
        let dy = self.d(&self.at(x1, y1, a)?, &self.at(x2, y2, b)?)?;
        let one = Q::from_integer(1);
        let rhs = (one - c) * e * self.dv(x1, x2)? + c * e * dy + c_bound;
        Ok((lhs, lhs > rhs))
    }

    fn regularity(&self, w: &Witness, theta: &Theta) -> Result<(Q, bool), CertifyError> {
        let [x1, y1, x2, y2] = vertices(w)?;
        let (t, s) = (param(w, "t")?, param(w, "s")?);
        let lhs = (t * self.dv(x1, y1)? - s * self.dv(x2, y2)?).abs();
        let arg = self.dv(x1, x2)? + self.d(&self.at(x1, y1, t)?, &self.at(x2, y2, s)?)?;
        Ok((lhs, lhs > theta.eval(&arg)))
    }
}

/// Re-evaluates a violation witness with exact rational arithmetic.
///
/// Returns `true` when the witness still violates the report's profile and
/// its left-hand side matches the recorded value. Reports without a witness
/// return `false`. Thinness reports need [`Certifier::replay_thinness`].
pub fn replay(comb: &dyn Combing, report: &CertReport) -> Result<bool, CertifyError> {
    let Some(w) = &report.witness else { return Ok(false) };
    let slow = Slow { comb };
    let one = Q::from_integer(1);
    let (lhs, violated) = match report.property.as_str() {
        "geodesic" => {
            let [x, y] = vertices(w)?;
            let len = comb.line(x, y)?.length();
            (len, len != slow.dv(x, y)?)
        }
        "quasigeodesic" => slow.quasi(w, profile(report, "lambda")?, profile(report, "k")?)?,
        "gcc" => slow.convexity(w, profile(report, "E")?, profile(report, "C")?)?,
        "cc-full" => match w.params.get("item").map(String::as_str) {
            Some("quasi-geodesic") => slow.quasi(w, profile(report, "lambda")?, profile(report, "k")?)?,
            Some("convexity") => slow.convexity(w, profile(report, "E")?, profile(report, "C")?)?,
            Some("regularity") => {
                let theta: Theta = report
                    .profile
                    .get("theta")
                    .ok_or_else(|| CertifyError::Replay("profile lacks theta".into()))?
                    .parse()?;
                slow.regularity(w, &theta)?
            }
            other => return Err(CertifyError::Replay(format!("unknown item {other:?}"))),
        },
        "consistency" => {
            let [x, y] = vertices(w)?;
            let (a, c) = (param(w, "a")?, param(w, "c")?);
            let z = slow
                .at(x, y, a)?
                .as_vertex()
                .ok_or_else(|| CertifyError::Replay("consistency witness is not at a vertex".into()))?;
            let lhs = slow.d(&slow.at(x, z, c)?, &slow.at(x, y, c * a)?)?;
            (lhs, lhs > profile(report, "K")?)
        }
        "forward" | "backward" => {
            let [p, q, r] = vertices(w)?;
            let c = param(w, "c")?;
            let (e, bound) = (profile(report, "E")?, profile(report, "C")?);
            if report.property == "forward" {
                let lhs = slow.d(&slow.at(p, q, c)?, &slow.at(p, r, c)?)?;
                (lhs, lhs > c * e * slow.dv(q, r)? + bound)
            } else {
                let lhs = slow.d(&slow.at(p, r, c)?, &slow.at(q, r, c)?)?;
                (lhs, lhs > (one - c) * e * slow.dv(p, q)? + bound)
            }
        }
        "bounded" => {
            let [x1, y1, x2, y2] = vertices(w)?;
            let t = param(w, "t")?;
            let lhs = slow.d(&slow.at(x1, y1, t)?, &slow.at(x2, y2, t)?)?;
            let big = slow.dv(x1, x2)?.max(slow.dv(y1, y2)?);
            (lhs, lhs > profile(report, "c1")? * big + profile(report, "c2")?)
        }
        other => return Err(CertifyError::Replay(format!("no replay for `{other}`"))),
    };
    let recorded = parse_q(&w.lhs).map_err(|_| CertifyError::Replay("bad lhs".into()))?;
    Ok(violated && lhs == recorded)
}

impl<'a> Certifier<'a> {
    /// Replays a thinness witness by re-evaluating its triple.
    pub fn replay_thinness(&self, selector: &ConvexSelector, report: &CertReport) -> Result<bool, CertifyError> {
        let Some(w) = &report.witness else { return Ok(false) };
        let dir = match report.property.as_str() {
            "thinness-forward" => Direction::Forward,
            "thinness-backward" => Direction::Backward,
            other => return Err(CertifyError::Replay(format!("`{other}` is not a thinness report"))),
        };
        let d = profile(report, "D")?;
        let ticks: Tick =
            self.metric.ticks(&d).ok_or_else(|| CertifyError::Replay("D is off the graph scale".into()))?;
        let triple = vertices::<3>(w)?;
        let four = Q::from_integer(4) * d;
        let item = w.params.get("item").map(String::as_str).unwrap_or("");
        Ok(match (self.thin_triple(selector, ticks, dir, triple)?, item) {
            (Outcome::Missed, "meets-subspace") => true,
            (Outcome::Items(it), "fellow-travel") => it.fellow > d && parse_q(&w.lhs).ok() == Some(it.fellow),
            (Outcome::Items(it), "endpoint-distance") => {
                it.slack_ends > four && parse_q(&w.lhs).ok() == Some(it.slack_ends)
            }
            (Outcome::Items(it), "near-additivity") => {
                it.slack_sum > four && parse_q(&w.lhs).ok() == Some(it.slack_sum)
            }
            (Outcome::Items(it), "restriction") => !it.restriction,
            _ => false,
        })
    }
}
