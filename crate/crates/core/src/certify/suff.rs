use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::thin::{ConvexSelector, Direction};
use super::{CertReport, Certifier, CertifyError, Sweep};
use crate::graph::VertexId;
use crate::rational::{fmt_q, Q};
use crate::tree::NodeKind;

/// Thinness premise: the convex subspaces and the fellow-travel constant.
#[derive(Clone, Debug)]
pub struct ThinPremise {
    pub selector: ConvexSelector,
    pub d: Q,
}

/// One implication tested on brute-forced constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    #[serde(with = "crate::rational::serde_q")]
    pub e: Q,
    pub premise: BTreeMap<String, String>,
    pub premise_certified: bool,
    /// `E` at which the conclusion is measured.
    #[serde(with = "crate::rational::serde_q")]
    pub conclusion_e: Q,
    /// Minimal conclusion constant found.
    #[serde(with = "crate::rational::serde_q")]
    pub conclusion: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub budget: Q,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SufficiencyReport {
    pub report: CertReport,
    pub checks: Vec<CrossCheck>,
}

fn at(s: &Sweep, e: &Q) -> Q {
    s.minimal_at(e).expect("swept value")
}

fn premise(pairs: &[(&str, Q)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), fmt_q(v))).collect()
}

impl<'a> Certifier<'a> {
    /// Minimal gcc constant of the combing restricted to `subspace`.
    fn subspace_gcc(&self, subspace: &[VertexId], es: &[Q]) -> Result<Vec<Q>, CertifyError> {
        let mut worst = vec![Q::from_integer(0); es.len()];
        let core: Vec<VertexId> = self.core().iter().copied().filter(|v| subspace.binary_search(v).is_ok()).collect();
        if core.len() < 2 {
            return Ok(worst);
        }
        let sub = Certifier::new(self.combing(), core, self.plan().clone())?;
        let sweep = sub.gcc_sweep(es)?;
        for (w, e) in worst.iter_mut().zip(es) {
            *w = at(&sweep, e);
        }
        Ok(worst)
    }

    /// Tests the three sufficiency results on minimal constants measured here:
    /// the two-item bound gives `(E, 2C)`, consistency with forward and
    /// backward convexity gives `(E, 2C + 4K)`, and thinness gives forward and
    /// backward convexity at `E + 2` within `6ED + 12D + C`.
    pub fn cross_check_sufficiency(
        &self,
        es: &[Q],
        thin: Option<&ThinPremise>,
    ) -> Result<SufficiencyReport, CertifyError> {
        let two = Q::from_integer(2);
        let mut all_es: Vec<Q> = es.to_vec();
        if thin.is_some() {
            all_es.extend(es.iter().map(|e| e + two));
        }
        all_es.sort();
        all_es.dedup();
        let gcc = self.gcc_sweep(&all_es)?;
        let fw = self.forward_sweep(&all_es)?;
        let bw = self.backward_sweep(&all_es)?;
        let k = self.consistency_sweep()?.rows[0].minimal;
        let (item1, item2) = self.gccc_premise_sweeps(es)?;
        let mut checks = Vec::new();
        for e in es {
            let c = at(&item1, e).max(at(&item2, e));
            let concl = at(&gcc, e);
            checks.push(CrossCheck {
                name: "two-item".into(),
                e: *e,
                premise: premise(&[("E", *e), ("C", c)]),
                premise_certified: true,
                conclusion_e: *e,
                conclusion: concl,
                budget: two * c,
                holds: concl <= two * c,
            });
            let c = at(&fw, e).max(at(&bw, e));
            let budget = two * c + Q::from_integer(4) * k;
            checks.push(CrossCheck {
                name: "consistent-convex".into(),
                e: *e,
                premise: premise(&[("E", *e), ("C", c), ("K", k)]),
                premise_certified: true,
                conclusion_e: *e,
                conclusion: concl,
                budget,
                holds: concl <= budget,
            });
        }
        let mut notes = BTreeMap::new();
        if let Some(tp) = thin {
            let d = tp.d;
            let f = self.check_thinness(&tp.selector, d, Direction::Forward)?;
            let b = self.check_thinness(&tp.selector, d, Direction::Backward)?;
            let certified = f.certified() && b.certified();
            notes.insert("thin-forward".to_string(), f.verdict_text());
            notes.insert("thin-backward".to_string(), b.verdict_text());
            let cx = match &tp.selector {
                ConvexSelector::Fixed(set) => self.subspace_gcc(set, es)?,
                ConvexSelector::Tree(tree) => {
                    let mut worst = vec![Q::from_integer(0); es.len()];
                    for node in tree.k_nodes() {
                        debug_assert_eq!(tree.kinds[node], NodeKind::K);
                        let got = self.subspace_gcc(&tree.vertex_spaces[node], es)?;
                        for (w, g) in worst.iter_mut().zip(got) {
                            *w = (*w).max(g);
                        }
                    }
                    worst
                }
            };
            for (e, cx) in es.iter().zip(cx) {
                let e2 = e + two;
                let budget = Q::from_integer(6) * e * d + Q::from_integer(12) * d + cx;
                for (name, sweep) in [("thin-forward", &fw), ("thin-backward", &bw)] {
                    let concl = at(sweep, &e2);
                    checks.push(CrossCheck {
                        name: name.into(),
                        e: *e,
                        premise: premise(&[("E", *e), ("C", cx), ("D", d)]),
                        premise_certified: certified,
                        conclusion_e: e2,
                        conclusion: concl,
                        budget,
                        holds: !certified || concl <= budget,
                    });
                }
                let concl = at(&gcc, &e2);
                let total = two * budget + Q::from_integer(4) * k;
                checks.push(CrossCheck {
                    name: "consistent-thin".into(),
                    e: *e,
                    premise: premise(&[("E", *e), ("C", cx), ("D", d), ("K", k)]),
                    premise_certified: certified,
                    conclusion_e: e2,
                    conclusion: concl,
                    budget: total,
                    holds: !certified || concl <= total,
                });
            }
        }
        if !checks.iter().any(|c| c.premise_certified) {
            return Err(CertifyError::PremiseNotCertified("no premise certified".into()));
        }
        let ok = checks.iter().all(|c| c.holds);
        let mut report = self.report("sufficiency", &[], ok, None, gcc.samples.clone());
        report.minimal.insert("K".into(), fmt_q(&k));
        for c in &checks {
            report.details.insert(
                format!("{}@{}", c.name, fmt_q(&c.e)),
                format!(
                    "{} <= {}: {}{}",
                    fmt_q(&c.conclusion),
                    fmt_q(&c.budget),
                    c.holds,
                    if c.premise_certified { "" } else { " (premise not certified)" }
                ),
            );
        }
        report.details.extend(notes);
        Ok(SufficiencyReport { report, checks })
    }
}

impl CertReport {
    pub(crate) fn verdict_text(&self) -> String {
        match self.verdict {
            super::Verdict::Certified => "certified".into(),
            super::Verdict::Violated => "violated".into(),
        }
    }
}
