use std::collections::BTreeMap;

use num_traits::Signed;

use super::engine::{FastPath, Loc, Metric, Tick, GRID_STEPS};
use super::{merge_all, parts, Best, CertReport, Certifier, CertifyError, Hit, Sweep, SweepRow};
use crate::rational::{fmt_q, q, Q};

/// The `E` values of a convexity sweep, as `(numerator, denominator)`.
pub const DEFAULT_E_GRID: [(i128, i128); 5] = [(1, 1), (3, 2), (2, 1), (3, 1), (5, 1)];

pub fn default_e_grid() -> Vec<Q> {
    DEFAULT_E_GRID.iter().map(|&(n, d)| q(n, d)).collect()
}

const G: usize = GRID_STEPS as usize;

/// Non-decreasing control function for parameter regularity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Theta {
    Identity,
    Affine {
        slope: Q,
        intercept: Q,
    },
    /// `theta(x)` is the value of the last step whose threshold is `<= x`, else 0.
    Steps(Vec<(Q, Q)>),
}

impl Theta {
    pub fn eval(&self, x: &Q) -> Q {
        match self {
            Theta::Identity => *x,
            Theta::Affine { slope, intercept } => slope * x + intercept,
            Theta::Steps(steps) => {
                steps.iter().take_while(|(t, _)| t <= x).last().map(|(_, v)| *v).unwrap_or_else(|| Q::from_integer(0))
            }
        }
    }

    pub fn validate(&self) -> Result<(), CertifyError> {
        let zero = Q::from_integer(0);
        let ok = match self {
            Theta::Identity => true,
            Theta::Affine { slope, intercept } => *slope >= zero && *intercept >= zero,
            Theta::Steps(steps) => {
                steps.iter().all(|(_, v)| *v >= zero) && steps.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(CertifyError::InvalidProfile("theta must be non-decreasing and non-negative".into()))
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Theta::Identity => "identity".into(),
            Theta::Affine { slope, intercept } => format!("{}x+{}", fmt_q(slope), fmt_q(intercept)),
            Theta::Steps(s) => {
                s.iter().map(|(t, v)| format!("{}:{}", fmt_q(t), fmt_q(v))).collect::<Vec<_>>().join(";")
            }
        }
    }
}

impl std::str::FromStr for Theta {
    type Err = CertifyError;

    /// Parses `identity`, `<slope>x+<intercept>` or `t:v;t:v;...`.
    fn from_str(s: &str) -> Result<Theta, CertifyError> {
        let s = s.trim();
        let bad = || CertifyError::InvalidProfile(format!("cannot parse theta `{s}`"));
        let num = |x: &str| crate::rational::parse_q(x.trim()).map_err(|_| bad());
        let theta = if s == "identity" || s == "id" {
            Theta::Identity
        } else if let Some((slope, intercept)) = s.split_once("x+") {
            Theta::Affine { slope: num(slope)?, intercept: num(intercept)? }
        } else if let Some(slope) = s.strip_suffix('x') {
            Theta::Affine { slope: num(slope)?, intercept: Q::from_integer(0) }
        } else {
            let steps = s
                .split(';')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    let (t, v) = p.split_once(':').ok_or_else(bad)?;
                    Ok((num(t)?, num(v)?))
                })
                .collect::<Result<Vec<_>, CertifyError>>()?;
            Theta::Steps(steps)
        };
        theta.validate()?;
        Ok(theta)
    }
}

fn at_least(name: &str, x: &Q, min: i128) -> Result<(), CertifyError> {
    if *x < Q::from_integer(min) {
        Err(CertifyError::InvalidProfile(format!("{name} = {} must be at least {min}", fmt_q(x))))
    } else {
        Ok(())
    }
}

/// Points `k/8 * s` for `k = 0..=8` on `path`.
fn scaled_points(m: &Metric, path: &FastPath, s: Tick) -> [Loc; G + 1] {
    std::array::from_fn(|k| path.at(m, k as i64 * s / GRID_STEPS))
}

fn frac(k: usize) -> String {
    fmt_q(&q(k as i128, G as i128))
}

impl<'a> Certifier<'a> {
    /// Every core line has length equal to the distance of its endpoints.
    pub fn check_geodesic(&self) -> Result<CertReport, CertifyError> {
        let n = self.core().len();
        let m = &self.metric;
        let mut worst: Option<(Tick, usize, usize)> = None;
        for i in 0..n {
            for j in 0..n {
                let p = self.line(i, j);
                let d = m.vdist(self.core()[i] as u32, self.core()[j] as u32);
                let excess = p.len - d;
                if worst.is_none_or(|(w, _, _)| excess > w) {
                    worst = Some((excess, i, j));
                }
            }
        }
        let (excess, i, j) = worst.expect("non-empty core");
        let samples = super::Samples { mode: super::SampleMode::Exhaustive, arity: 2, tuples: n * n, core_size: n };
        let (x, y) = (self.core()[i], self.core()[j]);
        let witness = (excess != 0).then(|| super::Witness {
            vertices: vec![x, y],
            params: BTreeMap::new(),
            lhs: fmt_q(&m.to_q(self.line(i, j).len as i128, 1)),
            rhs: fmt_q(&m.to_q(m.vdist(x as u32, y as u32) as i128, 1)),
        });
        let mut r = self.report("geodesic", &[], excess == 0, witness, samples);
        r.minimal.insert("excess".into(), fmt_q(&m.to_q(excess.max(0) as i128, 1)));
        Ok(r)
    }

    pub(crate) fn require_geodesic(&self) -> Result<(), CertifyError> {
        let r = self.check_geodesic()?;
        match r.witness {
            Some(w) => Err(CertifyError::NotGeodesic(w.vertices[0], w.vertices[1])),
            None => Ok(()),
        }
    }

    fn quasigeodesic_best(&self, lambdas: &[Q]) -> Result<(Vec<Best<Q>>, super::Samples), CertifyError> {
        for l in lambdas {
            at_least("lambda", l, 1)?;
        }
        let m = &self.metric;
        let ls: Vec<(i128, i128)> = lambdas.iter().map(parts).collect();
        let core = self.core();
        self.run(
            "quasigeodesic",
            2,
            vec![Best::<Q>::empty(); ls.len()],
            |idx, t, acc| {
                let path = self.line(t[0], t[1]);
                let d = m.vdist(core[t[0]] as u32, core[t[1]] as u32) as i128;
                let len = path.len.max(1) as i128;
                let pts: Vec<Loc> = path.grid.iter().map(|&s| path.at(m, s)).collect();
                for (slot, &(p, qd)) in ls.iter().enumerate() {
                    // Values carry denominator p * qd * len ticks.
                    let mut local: Option<(i128, usize, usize, bool)> = None;
                    for (a, &sa) in path.grid.iter().enumerate() {
                        for (b, &sb) in path.grid.iter().enumerate().skip(a + 1) {
                            let gap = (sb - sa) as i128 * d;
                            let lhs = m.dist(&pts[a], &pts[b]) as i128 * len;
                            let upper = p * (qd * lhs - p * gap);
                            let lower = qd * (qd * gap - p * lhs);
                            for (v, up) in [(upper, true), (lower, false)] {
                                if local.is_none_or(|(w, ..)| v > w) {
                                    local = Some((v, a, b, up));
                                }
                            }
                        }
                    }
                    if let Some((v, a, b, up)) = local {
                        let value = m.to_q(v, p * qd * len);
                        acc[slot].offer(value, idx, || Hit {
                            tuple: vec![core[t[0]], core[t[1]]],
                            params: vec![
                                ("s", fmt_q(&path.param(path.grid[a]))),
                                ("t", fmt_q(&path.param(path.grid[b]))),
                                ("side", if up { "upper" } else { "lower" }.into()),
                            ],
                            lhs: m.to_q(m.dist(&pts[a], &pts[b]) as i128, 1),
                        });
                    }
                }
                Ok(())
            },
            merge_all,
        )
    }

    /// Witness of the quasi-geodesic bounds at additive constant `k`; `rhs`
    /// is the bound on the failing side.
    fn quasigeodesic_witness(&self, best: &Best<Q>, k: Q) -> Option<super::Witness> {
        let upper = best.hit.as_ref()?.params.iter().any(|(n, v)| *n == "side" && v == "upper");
        self.witness_q(best, |lhs, v| if upper { lhs - v + k } else { lhs + v - k })
    }

    fn clamp(v: &Option<Q>) -> Q {
        let zero = Q::from_integer(0);
        v.filter(|x| *x > zero).unwrap_or(zero)
    }

    /// Minimal `k` for each `lambda`.
    pub fn quasigeodesic_sweep(&self, lambdas: &[Q]) -> Result<Sweep, CertifyError> {
        let (best, samples) = self.quasigeodesic_best(lambdas)?;
        let rows = lambdas
            .iter()
            .zip(&best)
            .map(|(l, b)| {
                let k = Self::clamp(&b.value);
                SweepRow { param: *l, minimal: k, witness: self.quasigeodesic_witness(b, k) }
            })
            .collect();
        Ok(self.sweep("quasigeodesic", "lambda", "k", rows, samples))
    }

    pub(crate) fn witness_q(&self, best: &Best<Q>, rhs: impl Fn(Q, Q) -> Q) -> Option<super::Witness> {
        let hit = best.hit.as_ref()?;
        let value = best.value?;
        Some(super::Witness {
            vertices: hit.tuple.clone(),
            params: hit.params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            lhs: fmt_q(&hit.lhs),
            rhs: fmt_q(&rhs(hit.lhs, value)),
        })
    }

    pub fn check_quasigeodesic(&self, lambda: Q, k: Q) -> Result<CertReport, CertifyError> {
        at_least("k", &k, 0)?;
        let (best, samples) = self.quasigeodesic_best(&[lambda])?;
        let minimal = Self::clamp(&best[0].value);
        let ok = minimal <= k;
        let witness = if ok { None } else { self.quasigeodesic_witness(&best[0], k) };
        let mut r = self.report("quasigeodesic", &[("lambda", lambda), ("k", k)], ok, witness, samples);
        r.minimal.insert("k".into(), fmt_q(&minimal));
        Ok(r)
    }

    /// Minimal `C` of the geodesic convexity display for each `E`.
    pub fn gcc_sweep(&self, es: &[Q]) -> Result<Sweep, CertifyError> {
        self.require_geodesic()?;
        for e in es {
            at_least("E", e, 1)?;
        }
        let m = &self.metric;
        let ev: Vec<(i128, i128)> = es.iter().map(parts).collect();
        let core = self.core();
        let (best, samples) = self.run(
            "gcc",
            4,
            vec![Best::<i128>::empty(); ev.len()],
            |idx, t, acc| {
                let g1 = self.line(t[0], t[1]);
                let g2 = self.line(t[2], t[3]);
                let dx = m.vdist(core[t[0]] as u32, core[t[2]] as u32) as i128;
                let p1: Vec<_> = g1.grid.iter().map(|&s| scaled_points(m, g1, s)).collect();
                let p2: Vec<_> = g2.grid.iter().map(|&s| scaled_points(m, g2, s)).collect();
                for (ia, pa) in p1.iter().enumerate() {
                    for (ib, pb) in p2.iter().enumerate() {
                        let dy = m.dist(&pa[G], &pb[G]) as i128;
                        for k in 1..=G {
                            let lhs = m.dist(&pa[k], &pb[k]) as i128;
                            let kk = k as i128;
                            for (slot, &(p, qd)) in ev.iter().enumerate() {
                                let den = 8 * qd;
                                let need = den * lhs - p * ((8 - kk) * dx + kk * dy);
                                acc[slot].offer(need, idx, || Hit {
                                    tuple: t.iter().map(|&i| core[i]).collect(),
                                    params: vec![
                                        ("a", fmt_q(&g1.param(g1.grid[ia]))),
                                        ("b", fmt_q(&g2.param(g2.grid[ib]))),
                                        ("c", frac(k)),
                                    ],
                                    lhs: den * lhs,
                                });
                            }
                        }
                    }
                }
                Ok(())
            },
            merge_all,
        )?;
        Ok(self.int_sweep("gcc", "E", "C", es, &ev, &best, samples))
    }

    fn int_sweep(
        &self,
        property: &str,
        param: &str,
        constant: &str,
        values: &[Q],
        ev: &[(i128, i128)],
        best: &[Best<i128>],
        samples: super::Samples,
    ) -> Sweep {
        let rows = values
            .iter()
            .zip(ev)
            .zip(best)
            .map(|((e, &(_, qd)), b)| {
                let den = 8 * qd;
                let c = self.minimal_int(b, den);
                SweepRow { param: *e, minimal: c, witness: self.witness_int(b, den, c) }
            })
            .collect();
        self.sweep(property, param, constant, rows, samples)
    }

    fn sweep_check(&self, sweep: Sweep, profile: &[(&str, Q)], bound_name: &str, bound: Q) -> CertReport {
        let row = &sweep.rows[0];
        let ok = row.minimal <= bound;
        let witness = if ok {
            None
        } else {
            row.witness.clone().map(|mut w| {
                let rhs = crate::rational::parse_q(&w.rhs).unwrap() - row.minimal + bound;
                w.rhs = fmt_q(&rhs);
                w
            })
        };
        let mut r = self.report(&sweep.property, profile, ok, witness, sweep.samples);
        r.minimal.insert(bound_name.into(), fmt_q(&row.minimal));
        r
    }

    pub fn check_gcc(&self, e: Q, c: Q) -> Result<CertReport, CertifyError> {
        at_least("C", &c, 0)?;
        let sweep = self.gcc_sweep(&[e])?;
        Ok(self.sweep_check(sweep, &[("E", e), ("C", c)], "C", c))
    }

    /// Minimal `K` of coarse consistency.
    pub fn consistency_sweep(&self) -> Result<Sweep, CertifyError> {
        let m = &self.metric;
        let core = self.core();
        let (best, samples) = self.run(
            "consistency",
            2,
            vec![Best::<i128>::empty()],
            |idx, t, acc| {
                let g = self.line(t[0], t[1]);
                for (pa, z) in g.vertex_positions() {
                    let gz = self.line_between(core[t[0]], z)?;
                    for k in 1..G {
                        let kk = k as i64;
                        let lhs = m.dist(&gz.at(m, kk * gz.len / GRID_STEPS), &g.at(m, kk * pa / GRID_STEPS)) as i128;
                        acc[0].offer(8 * lhs, idx, || Hit {
                            tuple: vec![core[t[0]], core[t[1]]],
                            params: vec![("a", fmt_q(&g.param(pa))), ("c", frac(k))],
                            lhs: 8 * lhs,
                        });
                    }
                }
                Ok(())
            },
            merge_all,
        )?;
        Ok(self.int_sweep("consistency", "-", "K", &[Q::from_integer(0)], &[(0, 1)], &best, samples))
    }

    pub fn check_consistency(&self, k: Q) -> Result<CertReport, CertifyError> {
        at_least("K", &k, 0)?;
        let sweep = self.consistency_sweep()?;
        Ok(self.sweep_check(sweep, &[("K", k)], "K", k))
    }

    fn convexity_sweep(&self, es: &[Q], forward: bool) -> Result<Sweep, CertifyError> {
        self.require_geodesic()?;
        for e in es {
            at_least("E", e, 1)?;
        }
        let m = &self.metric;
        let ev: Vec<(i128, i128)> = es.iter().map(parts).collect();
        let core = self.core();
        let name = if forward { "forward" } else { "backward" };
        let (best, samples) = self.run(
            name,
            3,
            vec![Best::<i128>::empty(); ev.len()],
            |idx, t, acc| {
                let (g1, g2, d) = if forward {
                    (self.line(t[0], t[1]), self.line(t[0], t[2]), m.vdist(core[t[1]] as u32, core[t[2]] as u32))
                } else {
                    (self.line(t[0], t[2]), self.line(t[1], t[2]), m.vdist(core[t[0]] as u32, core[t[1]] as u32))
                };
                let d = d as i128;
                for k in 0..=G {
                    let kk = k as i64;
                    let lhs = m.dist(&g1.at(m, kk * g1.len / GRID_STEPS), &g2.at(m, kk * g2.len / GRID_STEPS)) as i128;
                    let weight = if forward { kk as i128 } else { 8 - kk as i128 };
                    for (slot, &(p, qd)) in ev.iter().enumerate() {
                        let den = 8 * qd;
                        let need = den * lhs - p * weight * d;
                        acc[slot].offer(need, idx, || Hit {
                            tuple: t.iter().map(|&i| core[i]).collect(),
                            params: vec![("c", frac(k))],
                            lhs: den * lhs,
                        });
                    }
                }
                Ok(())
            },
            merge_all,
        )?;
        Ok(self.int_sweep(name, "E", "C", es, &ev, &best, samples))
    }

    /// Minimal `C` of `d(g(v,w1)(c), g(v,w2)(c)) <= cE d(w1,w2) + C` per `E`.
    pub fn forward_sweep(&self, es: &[Q]) -> Result<Sweep, CertifyError> {
        self.convexity_sweep(es, true)
    }

    /// Minimal `C` of `d(g(v1,w)(c), g(v2,w)(c)) <= (1-c)E d(v1,v2) + C` per `E`.
    pub fn backward_sweep(&self, es: &[Q]) -> Result<Sweep, CertifyError> {
        self.convexity_sweep(es, false)
    }

    pub fn check_forward(&self, e: Q, c: Q) -> Result<CertReport, CertifyError> {
        at_least("C", &c, 0)?;
        Ok(self.sweep_check(self.forward_sweep(&[e])?, &[("E", e), ("C", c)], "C", c))
    }

    pub fn check_backward(&self, e: Q, c: Q) -> Result<CertReport, CertifyError> {
        at_least("C", &c, 0)?;
        Ok(self.sweep_check(self.backward_sweep(&[e])?, &[("E", e), ("C", c)], "C", c))
    }

    /// Minimal `c2` for each `c1` of the bounded display.
    pub fn bounded_sweep(&self, c1s: &[Q]) -> Result<Sweep, CertifyError> {
        for c in c1s {
            at_least("c1", c, 0)?;
        }
        let m = &self.metric;
        let cv: Vec<(i128, i128)> = c1s.iter().map(parts).collect();
        let core = self.core();
        let (best, samples) = self.run(
            "bounded",
            4,
            vec![Best::<i128>::empty(); cv.len()],
            |idx, t, acc| {
                let g1 = self.line(t[0], t[1]);
                let g2 = self.line(t[2], t[3]);
                let dx = m.vdist(core[t[0]] as u32, core[t[2]] as u32);
                let dy = m.vdist(core[t[1]] as u32, core[t[3]] as u32);
                let big = dx.max(dy) as i128;
                for k in 0..=G {
                    let kk = k as i64;
                    let lhs = m.dist(&g1.at(m, kk * g1.len / GRID_STEPS), &g2.at(m, kk * g2.len / GRID_STEPS)) as i128;
                    for (slot, &(p, qd)) in cv.iter().enumerate() {
                        let den = 8 * qd;
                        let need = den * lhs - 8 * p * big;
                        acc[slot].offer(need, idx, || Hit {
                            tuple: t.iter().map(|&i| core[i]).collect(),
                            params: vec![("t", frac(k))],
                            lhs: den * lhs,
                        });
                    }
                }
                Ok(())
            },
            merge_all,
        )?;
        Ok(self.int_sweep("bounded", "c1", "c2", c1s, &cv, &best, samples))
    }

    /// The bounded display at `(c1, c2)` for a `(lambda, k)`-quasi-geodesic combing.
    pub fn check_bounded(&self, lambda: Q, k: Q, c1: Q, c2: Q) -> Result<CertReport, CertifyError> {
        at_least("c2", &c2, 0)?;
        let qg = self.check_quasigeodesic(lambda, k)?;
        if !qg.certified() {
            return Err(CertifyError::NotQuasiGeodesic { lambda: fmt_q(&lambda), k: fmt_q(&k) });
        }
        let sweep = self.bounded_sweep(&[c1])?;
        Ok(self.sweep_check(sweep, &[("lambda", lambda), ("k", k), ("c1", c1), ("c2", c2)], "c2", c2))
    }

    /// Largest `|t d1 - s d2| - theta(d(x1,x2) + d(g1(t), g2(s)))` over the sample.
    fn regularity(&self, theta: &Theta) -> Result<(Best<Q>, super::Samples), CertifyError> {
        let m = &self.metric;
        let core = self.core();
        let (best, samples) = self.run(
            "regularity",
            4,
            Best::<Q>::empty(),
            |idx, t, acc| {
                let g1 = self.line(t[0], t[1]);
                let g2 = self.line(t[2], t[3]);
                let d1 = m.to_q(m.vdist(core[t[0]] as u32, core[t[1]] as u32) as i128, 1);
                let d2 = m.to_q(m.vdist(core[t[2]] as u32, core[t[3]] as u32) as i128, 1);
                let dx = m.vdist(core[t[0]] as u32, core[t[2]] as u32) as i128;
                let p2: Vec<Loc> = g2.grid.iter().map(|&s| g2.at(m, s)).collect();
                for &sa in &g1.grid {
                    let pa = g1.at(m, sa);
                    let ta = g1.param(sa);
                    for (ib, &sb) in g2.grid.iter().enumerate() {
                        let sbq = g2.param(sb);
                        let lhs = (ta * d1 - sbq * d2).abs();
                        let arg = m.to_q(dx + m.dist(&pa, &p2[ib]) as i128, 1);
                        let rhs = theta.eval(&arg);
                        acc.offer(lhs - rhs, idx, || Hit {
                            tuple: t.iter().map(|&i| core[i]).collect(),
                            params: vec![("t", fmt_q(&ta)), ("s", fmt_q(&sbq)), ("theta-arg", fmt_q(&arg))],
                            lhs,
                        });
                    }
                }
                Ok(())
            },
            |a, b| a.merge(b),
        )?;
        Ok((best, samples))
    }

    /// Both items of the coarse convexity definition plus quasi-geodesicity.
    pub fn check_cc_full(&self, lambda: Q, k: Q, e: Q, c: Q, theta: &Theta) -> Result<CertReport, CertifyError> {
        theta.validate()?;
        at_least("E", &e, 1)?;
        at_least("C", &c, 0)?;
        let qg = self.check_quasigeodesic(lambda, k)?;
        let convex = self.convexity_display(e)?;
        let (reg, samples) = self.regularity(theta)?;
        let zero = Q::from_integer(0);
        let reg_ok = reg.value.is_none_or(|v| v <= zero);
        let convex_ok = convex.rows[0].minimal <= c;
        let geodesic = self.check_geodesic()?.certified();
        let identity_ok = if geodesic {
            let (id, _) = self.regularity(&Theta::Identity)?;
            Some(id.value.is_none_or(|v| v <= zero))
        } else {
            None
        };
        let ok = qg.certified() && convex_ok && reg_ok && identity_ok != Some(false);
        let witness = if !qg.certified() {
            qg.witness.clone().map(|w| tag(w, "quasi-geodesic"))
        } else if !convex_ok {
            convex.rows[0].witness.clone().map(|mut w| {
                let rhs = crate::rational::parse_q(&w.rhs).unwrap() - convex.rows[0].minimal + c;
                w.rhs = fmt_q(&rhs);
                tag(w, "convexity")
            })
        } else if !reg_ok {
            self.witness_q(&reg, |lhs, v| lhs - v).map(|w| tag(w, "regularity"))
        } else {
            None
        };
        let mut r = self.report("cc-full", &[("lambda", lambda), ("k", k), ("E", e), ("C", c)], ok, witness, samples);
        r.profile.insert("theta".into(), theta.describe());
        r.minimal.insert("k".into(), qg.minimal["k"].clone());
        r.minimal.insert("C".into(), fmt_q(&convex.rows[0].minimal));
        r.details.insert("quasi-geodesic".into(), qg.certified().to_string());
        r.details.insert("convexity".into(), convex_ok.to_string());
        r.details.insert("regularity".into(), reg_ok.to_string());
        if let Some(id) = identity_ok {
            r.details.insert("identity-theta".into(), id.to_string());
        }
        Ok(r)
    }

    /// The convexity display without the geodesic precondition.
    pub fn convexity_display(&self, e: Q) -> Result<Sweep, CertifyError> {
        let m = &self.metric;
        let ev = [parts(&e)];
        let core = self.core();
        let (best, samples) = self.run(
            "gcc",
            4,
            vec![Best::<i128>::empty()],
            |idx, t, acc| {
                let g1 = self.line(t[0], t[1]);
                let g2 = self.line(t[2], t[3]);
                let dx = m.vdist(core[t[0]] as u32, core[t[2]] as u32) as i128;
                let p1: Vec<_> = g1.grid.iter().map(|&s| scaled_points(m, g1, s)).collect();
                let p2: Vec<_> = g2.grid.iter().map(|&s| scaled_points(m, g2, s)).collect();
                let (p, qd) = ev[0];
                for (ia, pa) in p1.iter().enumerate() {
                    for (ib, pb) in p2.iter().enumerate() {
                        let dy = m.dist(&pa[G], &pb[G]) as i128;
                        for k in 0..=G {
                            let lhs = m.dist(&pa[k], &pb[k]) as i128;
                            let kk = k as i128;
                            let den = 8 * qd;
                            let need = den * lhs - p * ((8 - kk) * dx + kk * dy);
                            acc[0].offer(need, idx, || Hit {
                                tuple: t.iter().map(|&i| core[i]).collect(),
                                params: vec![
                                    ("a", fmt_q(&g1.param(g1.grid[ia]))),
                                    ("b", fmt_q(&g2.param(g2.grid[ib]))),
                                    ("c", frac(k)),
                                ],
                                lhs: den * lhs,
                            });
                        }
                    }
                }
                Ok(())
            },
            merge_all,
        )?;
        Ok(self.int_sweep("gcc", "E", "C", &[e], &ev, &best, samples))
    }

    /// Minimal constants of the two premises of the `(E, 2C)` bound.
    pub(crate) fn gccc_premise_sweeps(&self, es: &[Q]) -> Result<(Sweep, Sweep), CertifyError> {
        self.require_geodesic()?;
        let m = &self.metric;
        let ev: Vec<(i128, i128)> = es.iter().map(parts).collect();
        let core = self.core();
        let (best1, s1) = self.run(
            "gccc-1",
            3,
            vec![Best::<i128>::empty(); ev.len()],
            |idx, t, acc| {
                let g1 = self.line(t[0], t[1]);
                let g2 = self.line(t[0], t[2]);
                let p1: Vec<_> = g1.grid.iter().map(|&s| scaled_points(m, g1, s)).collect();
                let p2: Vec<_> = g2.grid.iter().map(|&s| scaled_points(m, g2, s)).collect();
                for (ia, pa) in p1.iter().enumerate() {
                    for (ib, pb) in p2.iter().enumerate() {
                        let dy = m.dist(&pa[G], &pb[G]) as i128;
                        for k in 0..=G {
                            let lhs = m.dist(&pa[k], &pb[k]) as i128;
                            for (slot, &(p, qd)) in ev.iter().enumerate() {
                                let den = 8 * qd;
                                let need = den * lhs - p * k as i128 * dy;
                                acc[slot].offer(need, idx, || Hit {
                                    tuple: t.iter().map(|&i| core[i]).collect(),
                                    params: vec![
                                        ("a", fmt_q(&g1.param(g1.grid[ia]))),
                                        ("b", fmt_q(&g2.param(g2.grid[ib]))),
                                        ("c", frac(k)),
                                    ],
                                    lhs: den * lhs,
                                });
                            }
                        }
                    }
                }
                Ok(())
            },
            merge_all,
        )?;
        let (best2, s2) = self.run(
            "gccc-2",
            3,
            vec![Best::<i128>::empty(); ev.len()],
            |idx, t, acc| {
                let g1 = self.line(t[0], t[2]);
                let dx = m.vdist(core[t[0]] as u32, core[t[1]] as u32) as i128;
                for (pa, y) in g1.vertex_positions() {
                    let g2 = self.line_between(core[t[1]], y)?;
                    for k in 0..=G {
                        let kk = k as i64;
                        let lhs = m.dist(&g1.at(m, kk * pa / GRID_STEPS), &g2.at(m, kk * g2.len / GRID_STEPS)) as i128;
                        for (slot, &(p, qd)) in ev.iter().enumerate() {
                            let den = 8 * qd;
                            let need = den * lhs - p * (8 - kk as i128) * dx;
                            acc[slot].offer(need, idx, || Hit {
                                tuple: t.iter().map(|&i| core[i]).collect(),
                                params: vec![("a", fmt_q(&g1.param(pa))), ("c", frac(k))],
                                lhs: den * lhs,
                            });
                        }
                    }
                }
                Ok(())
            },
            merge_all,
        )?;
        Ok((
            self.int_sweep("gccc-1", "E", "C", es, &ev, &best1, s1),
            self.int_sweep("gccc-2", "E", "C", es, &ev, &best2, s2),
        ))
    }
}

fn tag(mut w: super::Witness, item: &str) -> super::Witness {
    w.params.insert("item".into(), item.into());
    w
}
