//! Finite certification of bicombing inequalities.
//!
//! Every check runs over tuples of core vertices (all of them when the tuple
//! count is small, a seeded sample otherwise) and over a fixed parameter grid.
//! Verdicts are relative to the supplied core.

mod checks;
pub mod engine;
mod replay;
mod suff;
mod thin;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combing::{Combing, CombingError};
use crate::graph::{GraphError, VertexId};
use crate::par;
use crate::rational::{fmt_q, Q};
use engine::{FastPath, Metric};

pub use checks::{default_e_grid, Theta, DEFAULT_E_GRID};
pub use replay::replay;
pub use suff::{CrossCheck, SufficiencyReport, ThinPremise};
pub use thin::{ConvexSelector, Direction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("line ({0}, {1}) is not geodesic")]
    NotGeodesic(VertexId, VertexId),
    #[error("combing is not ({lambda}, {k})-quasi-geodesic")]
    NotQuasiGeodesic { lambda: String, k: String },
    #[error("subspace is not convex: {0}")]
    SubspaceNotConvex(String),
    #[error("no triple is longer than 2D ({0} skipped)")]
    TriplesTooShort(usize),
    #[error("premise not certified: {0}")]
    PremiseNotCertified(String),
    #[error("vertex {0} is outside the core")]
    OutsideCore(VertexId),
    #[error("the core is empty")]
    EmptyCore,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("cannot replay: {0}")]
    Replay(String),
    #[error(transparent)]
    Combing(#[from] CombingError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How tuples are chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    /// Enumerate every tuple when there are at most this many.
    pub exhaustive_limit: usize,
    /// Number of seeded tuples otherwise.
    pub samples: usize,
    pub seed: u64,
    /// Worker threads; `0` lets the runtime decide, `1` is sequential.
    pub jobs: usize,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan { exhaustive_limit: 100_000, samples: 100_000, seed: 0, jobs: par::jobs_from_env() }
    }
}

impl SamplePlan {
    pub fn exhaustive() -> Self {
        SamplePlan { exhaustive_limit: usize::MAX, ..Default::default() }
    }

    pub fn sampled(samples: usize, seed: u64) -> Self {
        SamplePlan { exhaustive_limit: 0, samples, seed, ..Default::default() }
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Samples {
    pub mode: SampleMode,
    pub arity: usize,
    pub tuples: usize,
    pub core_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    Violated,
}

/// A tuple and parameters where an inequality fails (or is tightest).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub vertices: Vec<VertexId>,
    pub params: BTreeMap<String, String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertReport {
    pub property: String,
    pub profile: BTreeMap<String, String>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub samples: Samples,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core_radius: Option<String>,
    /// Smallest constants the sample supports.
    #[serde(default)]
    pub minimal: BTreeMap<String, String>,
    #[serde(default)]
    pub details: BTreeMap<String, String>,
}

impl CertReport {
    pub fn certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn minimal_q(&self, key: &str) -> Option<Q> {
        self.minimal.get(key).and_then(|s| crate::rational::parse_q(s).ok())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

/// One row of a minimal-constant sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(with = "crate::rational::serde_q")]
    pub param: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub minimal: Q,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sweep {
    pub property: String,
    /// Name of the swept parameter (`E`, `lambda`, `c1`).
    pub param: String,
    /// Name of the minimised constant.
    pub constant: String,
    pub rows: Vec<SweepRow>,
    pub samples: Samples,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core_radius: Option<String>,
}

impl Sweep {
    pub fn minimal_at(&self, param: &Q) -> Option<Q> {
        self.rows.iter().find(|r| &r.param == param).map(|r| r.minimal)
    }

    /// `fixture,property,param,value,minimal,mode,tuples` rows without header.
    pub fn csv_rows(&self, fixture: &str) -> Vec<String> {
        let mode = match self.samples.mode {
            SampleMode::Exhaustive => "exhaustive",
            SampleMode::Sampled => "sampled",
        };
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{fixture},{},{},{},{},{mode},{}",
                    self.property,
                    self.param,
                    fmt_q(&r.param),
                    fmt_q(&r.minimal),
                    self.samples.tuples
                )
            })
            .collect()
    }
}

pub const CSV_HEADER: &str = "fixture,property,param,value,minimal,mode,tuples";

/// Running maximum with a deterministic tie-break on the tuple index.
#[derive(Clone, Debug)]
pub(crate) struct Best<V> {
    pub value: Option<V>,
    pub idx: usize,
    pub hit: Option<Hit<V>>,
}

#[derive(Clone, Debug)]
pub(crate) struct Hit<V> {
    pub tuple: Vec<VertexId>,
    pub params: Vec<(&'static str, String)>,
    pub lhs: V,
}

impl<V: Ord + Clone> Best<V> {
    pub fn empty() -> Self {
        Best { value: None, idx: usize::MAX, hit: None }
    }

    fn beats(&self, value: &V, idx: usize) -> bool {
        match &self.value {
            None => true,
            Some(cur) => value > cur || (value == cur && idx < self.idx),
        }
    }

    #[inline]
    pub fn offer(&mut self, value: V, idx: usize, hit: impl FnOnce() -> Hit<V>) {
        if self.beats(&value, idx) {
            self.hit = Some(hit());
            self.value = Some(value);
            self.idx = idx;
        }
    }

    pub fn merge(self, other: Self) -> Self {
        match &other.value {
            Some(v) if self.beats(v, other.idx) => other,
            _ => self,
        }
    }
}

pub(crate) fn merge_all<V: Ord + Clone>(a: Vec<Best<V>>, b: Vec<Best<V>>) -> Vec<Best<V>> {
    a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()
}

const CHUNK: usize = 32;

/// Certification context: a combing, a core and a sample plan.
pub struct Certifier<'a> {
    comb: &'a dyn Combing,
    pub(crate) metric: Metric<'a>,
    core: Vec<VertexId>,
    plan: SamplePlan,
    core_radius: Option<Q>,
    paths: Vec<Arc<FastPath>>,
    index: Vec<u32>,
}

impl<'a> Certifier<'a> {
    /// Computes every line between core vertices up front.
    pub fn new(comb: &'a dyn Combing, core: Vec<VertexId>, plan: SamplePlan) -> Result<Self, CertifyError> {
        if core.is_empty() {
            return Err(CertifyError::EmptyCore);
        }
        let graph = comb.graph();
        for &v in &core {
            graph.check_vertex(v)?;
        }
        let metric = Metric::new(graph);
        let n = core.len();
        let fetched = par::map_collect(n * n, plan.jobs, |i| engine::fetch(&metric, comb, core[i / n], core[i % n]));
        let paths = fetched.into_iter().collect::<Result<Vec<_>, _>>()?;
        let mut index = vec![u32::MAX; graph.vertex_count()];
        for (i, &v) in core.iter().enumerate() {
            index[v] = i as u32;
        }
        Ok(Certifier { comb, metric, core, plan, core_radius: None, paths, index })
    }

    /// Records the radius the core was cut at.
    pub fn with_core_radius(mut self, r: Q) -> Self {
        self.core_radius = Some(r);
        self
    }

    pub fn core(&self) -> &[VertexId] {
        &self.core
    }

    pub fn plan(&self) -> &SamplePlan {
        &self.plan
    }

    pub fn combing(&self) -> &'a dyn Combing {
        self.comb
    }

    pub(crate) fn line(&self, i: usize, j: usize) -> &FastPath {
        &self.paths[i * self.core.len() + j]
    }

    /// A line between arbitrary vertices, cached when both lie in the core.
    pub(crate) fn line_between(&self, x: VertexId, y: VertexId) -> Result<Arc<FastPath>, CertifyError> {
        let (i, j) = (self.index[x], self.index[y]);
        if i != u32::MAX && j != u32::MAX {
            return Ok(self.paths[i as usize * self.core.len() + j as usize].clone());
        }
        Ok(engine::fetch(&self.metric, self.comb, x, y)?)
    }

    pub fn samples(&self, arity: usize) -> Samples {
        let n = self.core.len();
        let total = (n as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
        if total <= self.plan.exhaustive_limit as u128 {
            Samples { mode: SampleMode::Exhaustive, arity, tuples: total as usize, core_size: n }
        } else {
            Samples { mode: SampleMode::Sampled, arity, tuples: self.plan.samples, core_size: n }
        }
    }

    fn seed_for(&self, stream: &str) -> u64 {
        stream
            .bytes()
            .fold(self.plan.seed ^ 0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
    }

    /// Runs `f` over the tuples of `arity` core indices and folds with `merge`.
    pub(crate) fn run<A, F, M>(
        &self,
        stream: &str,
        arity: usize,
        identity: A,
        f: F,
        merge: M,
    ) -> Result<(A, Samples), CertifyError>
    where
        A: Clone + Send + Sync,
        F: Fn(usize, &[usize], &mut A) -> Result<(), CertifyError> + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        let samples = self.samples(arity);
        let n = self.core.len();
        let table: Option<Vec<u32>> = match samples.mode {
            SampleMode::Exhaustive => None,
            SampleMode::Sampled => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed_for(stream));
                Some((0..samples.tuples * arity).map(|_| rng.gen_range(0..n) as u32).collect())
            }
        };
        let count = samples.tuples;
        let chunks = count.div_ceil(CHUNK);
        type Acc<A> = (A, Option<(usize, CertifyError)>);
        let (acc, err): Acc<A> = par::map_reduce(
            chunks,
            self.plan.jobs,
            (identity.clone(), None),
            |c| {
                let mut acc = identity.clone();
                let mut tuple = vec![0usize; arity];
                for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                    match &table {
                        Some(t) => {
                            for (k, slot) in tuple.iter_mut().enumerate() {
                                *slot = t[i * arity + k] as usize;
                            }
                        }
                        None => {
                            let mut r = i;
                            for slot in tuple.iter_mut().rev() {
                                *slot = r % n;
                                r /= n;
                            }
                        }
                    }
                    if let Err(e) = f(i, &tuple, &mut acc) {
                        return (acc, Some((i, e)));
                    }
                }
                (acc, None)
            },
            |(a, ea), (b, eb)| {
                let err = match (ea, eb) {
                    (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                    (x, y) => x.or(y),
                };
                (merge(a, b), err)
            },
        );
        match err {
            Some((_, e)) => Err(e),
            None => Ok((acc, samples)),
        }
    }

    pub(crate) fn report(
        &self,
        property: &str,
        profile: &[(&str, Q)],
        certified: bool,
        witness: Option<Witness>,
        samples: Samples,
    ) -> CertReport {
        CertReport {
            property: property.to_string(),
            profile: profile.iter().map(|(k, v)| (k.to_string(), fmt_q(v))).collect(),
            verdict: if certified { Verdict::Certified } else { Verdict::Violated },
            witness,
            seed: (samples.mode == SampleMode::Sampled).then_some(self.plan.seed),
            samples,
            core_radius: self.core_radius.map(|r| fmt_q(&r)),
            minimal: BTreeMap::new(),
            details: BTreeMap::new(),
        }
    }

    pub(crate) fn sweep(
        &self,
        property: &str,
        param: &str,
        constant: &str,
        rows: Vec<SweepRow>,
        samples: Samples,
    ) -> Sweep {
        Sweep {
            property: property.into(),
            param: param.into(),
            constant: constant.into(),
            rows,
            seed: (samples.mode == SampleMode::Sampled).then_some(self.plan.seed),
            samples,
            core_radius: self.core_radius.map(|r| fmt_q(&r)),
        }
    }

    /// Builds a witness from an integer hit whose values carry denominator `den` ticks.
    pub(crate) fn witness_int(&self, best: &Best<i128>, den: i128, bound: Q) -> Option<Witness> {
        let hit = best.hit.as_ref()?;
        let value = best.value?;
        let lhs = self.metric.to_q(hit.lhs, den);
        let rhs = self.metric.to_q(hit.lhs - value, den) + bound;
        Some(Witness {
            vertices: hit.tuple.clone(),
            params: hit.params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            lhs: fmt_q(&lhs),
            rhs: fmt_q(&rhs),
        })
    }

    /// Smallest non-negative constant covering an integer maximum.
    pub(crate) fn minimal_int(&self, best: &Best<i128>, den: i128) -> Q {
        match best.value {
            Some(v) if v > 0 => self.metric.to_q(v, den),
            _ => Q::from_integer(0),
        }
    }
}

/// Splits a positive rational into `(numerator, denominator)`.
pub(crate) fn parts(x: &Q) -> (i128, i128) {
    (*x.numer(), *x.denom())
}

#[cfg(test)]
mod tests;
