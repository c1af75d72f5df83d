use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::build::{build_space, BuiltSpace};
use super::config::{CheckSpec, Growth, ProbeSpec, ScenarioConfig};
use super::{derive_seed, ScenarioError};
use crate::certify::{
    CertReport, Certifier, CertifyError, ConvexSelector, SampleMode, SamplePlan, Sweep, ThinPremise, CSV_HEADER,
};
use crate::coned::cone_crossings;
use crate::coned::spherical::{worst_length_defect, SphericalCone, SphericalPoint, TOLERANCE};
use crate::group::probe::{default_lambda_grid, relative_properness_probe, schwarz_milnor_probe};
use crate::group::{cayley_ball, coned_cayley_ball, Group, GroupSpec, Point};
use crate::rational::{fmt_q, qi, Q};
use crate::tree::{build_pushout, element_ball, GraphOfGroupsSpec, TreeBuildParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    /// Build the space and write it out.
    Build,
    /// Build and run checks and probes.
    Certify,
    /// Run the probes only.
    Probe,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub stage: Stage,
    pub seed: Option<u64>,
    pub radius: Option<usize>,
    pub jobs: usize,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { stage: Stage::Certify, seed: None, radius: None, jobs: crate::par::jobs_from_env(), out_dir: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceSummary {
    pub kind: String,
    pub vertices: usize,
    pub edges: usize,
    pub core_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub core_radius: Option<String>,
    pub combing: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub report: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_file: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub stage: Stage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSummary>,
    pub checks: Vec<CheckResult>,
    pub probes: Vec<CheckResult>,
    pub passed: bool,
}

impl ScenarioReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn probe(&self, name: &str) -> Option<&CheckResult> {
        self.probes.iter().find(|c| c.name == name)
    }
}

#[derive(Debug)]
pub struct ScenarioOutcome {
    pub report: ScenarioReport,
    pub sweeps: Vec<Sweep>,
    /// Violated reports, one per failing certifier check.
    pub witnesses: Vec<(String, Value)>,
    pub files: Vec<PathBuf>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.report.passed
    }

    pub fn sweep_csv(&self, fixture: &str) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for s in &self.sweeps {
            for row in s.csv_rows(fixture) {
                out.push_str(&row);
                out.push('\n');
            }
        }
        out
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    seed: Option<u64>,
    jobs: usize,
    sweeps: Vec<Sweep>,
    witnesses: Vec<(String, Value)>,
}

fn arity(c: &CheckSpec) -> usize {
    match c {
        CheckSpec::Geodesic
        | CheckSpec::Quasigeodesic { .. }
        | CheckSpec::QuasigeodesicSweep { .. }
        | CheckSpec::Consistency { .. } => 2,
        CheckSpec::Forward { .. } | CheckSpec::Backward { .. } | CheckSpec::Thinness { .. } => 3,
        _ => 4,
    }
}

fn cert_result(name: &str, r: Result<CertReport, CertifyError>) -> (CheckResult, Option<CertReport>) {
    match r {
        Ok(rep) => {
            let passed = rep.certified();
            let failed = (!passed).then(|| rep.clone());
            (CheckResult { name: name.into(), passed, error: None, report: to_value(&rep), witness_file: None }, failed)
        }
        Err(e) => (failure(name, e.to_string()), None),
    }
}

fn failure(name: &str, msg: String) -> CheckResult {
    CheckResult { name: name.into(), passed: false, error: Some(msg), report: Value::Null, witness_file: None }
}

impl Ctx<'_> {
    fn plan(&self) -> SamplePlan {
        SamplePlan {
            exhaustive_limit: self.cfg.sampling.exhaustive_limit,
            samples: self.cfg.sampling.samples,
            seed: self.seed.unwrap_or(0),
            jobs: self.jobs,
        }
    }

    fn selector(&self, built: &BuiltSpace, subspace: &[usize]) -> Result<ConvexSelector, ScenarioError> {
        if !subspace.is_empty() {
            return Ok(ConvexSelector::fixed(subspace.to_vec()));
        }
        built
            .selector
            .clone()
            .ok_or_else(|| ScenarioError::Config(format!("`{}` spaces need an explicit subspace", built.kind)))
    }

    fn sweep_result(
        &mut self,
        name: &str,
        r: Result<Sweep, CertifyError>,
        pass: impl Fn(&Sweep) -> bool,
    ) -> CheckResult {
        match r {
            Ok(s) => {
                let passed = pass(&s);
                let out =
                    CheckResult { name: name.into(), passed, error: None, report: to_value(&s), witness_file: None };
                self.sweeps.push(s);
                out
            }
            Err(e) => failure(name, e.to_string()),
        }
    }

    fn run_check(
        &mut self,
        built: &BuiltSpace,
        cert: &Certifier,
        spec: &CheckSpec,
    ) -> Result<CheckResult, ScenarioError> {
        let name = spec.name();
        if self.seed.is_none() && cert.samples(arity(spec)).mode == SampleMode::Sampled {
            return Err(ScenarioError::Config(format!(
                "check `{name}` samples a core of {} vertices and needs a seed",
                cert.core().len()
            )));
        }
        let (res, failed) = match spec {
            CheckSpec::Geodesic => cert_result(name, cert.check_geodesic()),
            CheckSpec::Quasigeodesic { lambda, k } => cert_result(name, cert.check_quasigeodesic(*lambda, *k)),
            CheckSpec::QuasigeodesicSweep { lambdas } => {
                (self.sweep_result(name, cert.quasigeodesic_sweep(lambdas), |_| true), None)
            }
            CheckSpec::Gcc { e, c } => cert_result(name, cert.check_gcc(*e, *c)),
            CheckSpec::GccSweep { es, max_e, max_c } => {
                let (max_e, max_c) = (*max_e, *max_c);
                let pass = move |s: &Sweep| {
                    s.rows.iter().any(|r| max_e.is_none_or(|m| r.param <= m) && max_c.is_none_or(|m| r.minimal <= m))
                };
                (self.sweep_result(name, cert.gcc_sweep(es), pass), None)
            }
            CheckSpec::Consistency { k } => cert_result(name, cert.check_consistency(*k)),
            CheckSpec::Forward { e, c } => cert_result(name, cert.check_forward(*e, *c)),
            CheckSpec::Backward { e, c } => cert_result(name, cert.check_backward(*e, *c)),
            CheckSpec::Bounded { lambda, k, c1, c2 } => cert_result(name, cert.check_bounded(*lambda, *k, *c1, *c2)),
            CheckSpec::CcFull { lambda, k, e, c, theta } => {
                let theta = theta.parse().map_err(|e: CertifyError| ScenarioError::Config(e.to_string()))?;
                cert_result(name, cert.check_cc_full(*lambda, *k, *e, *c, &theta))
            }
            CheckSpec::Thinness { d, direction, subspace } => {
                let sel = self.selector(built, subspace)?;
                cert_result(name, cert.check_thinness(&sel, *d, *direction))
            }
            CheckSpec::Sufficiency { es, d, subspace } => {
                let premise = match d {
                    Some(d) => Some(ThinPremise { selector: self.selector(built, subspace)?, d: *d }),
                    None => None,
                };
                match cert.cross_check_sufficiency(es, premise.as_ref()) {
                    Ok(s) => {
                        let passed = s.report.certified();
                        let v = to_value(&s);
                        if !passed {
                            self.witnesses.push((name.to_string(), v.clone()));
                        }
                        (CheckResult { name: name.into(), passed, error: None, report: v, witness_file: None }, None)
                    }
                    Err(e) => (failure(name, e.to_string()), None),
                }
            }
            CheckSpec::Structural | CheckSpec::ConeValidation | CheckSpec::Equivariance { .. } => {
                unreachable!("structural checks run without a certifier")
            }
        };
        if let Some(rep) = failed {
            self.witnesses.push((name.to_string(), to_value(&rep)));
        }
        Ok(res)
    }
}

fn structural_check(built: &BuiltSpace, spec: &CheckSpec) -> Result<CheckResult, ScenarioError> {
    let name = spec.name();
    match spec {
        CheckSpec::Structural => {
            let tos = built
                .tree
                .as_ref()
                .ok_or_else(|| ScenarioError::Config("structural checks need a tree of spaces".into()))?;
            let rep = tos.structural_suite(Some(&built.core));
            Ok(CheckResult {
                name: name.into(),
                passed: rep.passed(),
                error: None,
                report: to_value(&rep),
                witness_file: None,
            })
        }
        CheckSpec::ConeValidation => {
            if let Some(sph) = &built.spherical {
                let validation = sph.spec.validate();
                let mut points: Vec<SphericalPoint> =
                    (0..sph.spec.base.vertex_count()).map(SphericalPoint::Base).collect();
                for e in 0..sph.spec.attachments.len() {
                    for s in [0.25, 0.5, 1.0] {
                        points.push(SphericalPoint::Cone { attachment: e, s });
                    }
                }
                let defect = worst_length_defect(sph, &points).map_err(|e| ScenarioError::Build(e.to_string()))?;
                let passed = validation.passed() && defect <= TOLERANCE;
                let report = json!({ "validation": validation, "points": points.len(), "worst_length_defect": defect });
                return Ok(CheckResult { name: name.into(), passed, error: None, report, witness_file: None });
            }
            let sp = built
                .coned
                .as_ref()
                .ok_or_else(|| ScenarioError::Config("cone validation needs a coned space".into()))?;
            let validation = sp.spec.validate();
            let base = &sp.spec.base;
            let g = &sp.graph;
            let base_core: Vec<usize> = built.core.iter().copied().filter(|&v| sp.is_base_vertex(v)).collect();
            let mut embedding_failures = 0usize;
            let mut embedding_witness = None;
            for &u in &base_core {
                for &v in &base_core {
                    if g.dist_scaled(u, v).map(|d| g.unscale(d)) != base.dist_scaled(u, v).map(|d| base.unscale(d)) {
                        embedding_failures += 1;
                        embedding_witness.get_or_insert((u, v));
                    }
                }
            }
            let mut max_crossings = 0usize;
            let mut crossing_witness = None;
            let mut pairs = 0usize;
            for &u in &built.core {
                for &v in &built.core {
                    let path = built.combing.line(u, v).map_err(|e| ScenarioError::Build(e.to_string()))?;
                    let c = cone_crossings(sp, &path);
                    pairs += 1;
                    if c > max_crossings {
                        max_crossings = c;
                        if c > 2 {
                            crossing_witness.get_or_insert((u, v));
                        }
                    }
                }
            }
            let passed = validation.passed() && embedding_failures == 0 && max_crossings <= 2;
            let report = json!({
                "validation": validation,
                "embedding_pairs": base_core.len() * base_core.len(),
                "embedding_failures": embedding_failures,
                "embedding_witness": embedding_witness,
                "crossing_pairs": pairs,
                "max_cone_crossings": max_crossings,
                "crossing_witness": crossing_witness,
                "cone_radius": fmt_q(&sp.radius()),
            });
            Ok(CheckResult { name: name.into(), passed, error: None, report, witness_file: None })
        }
        CheckSpec::Equivariance { radius } => {
            let tos = built
                .tree
                .as_ref()
                .ok_or_else(|| ScenarioError::Config("equivariance needs a tree of spaces".into()))?;
            let (Some(sym), Some(gd)) = (&tos.symbolic, &tos.group) else {
                return Err(ScenarioError::Config("equivariance needs group data".into()));
            };
            let elements = element_ball(&gd.group, &gd.group.basis_elements(), *radius);
            let rep = crate::tree::combing_equivariance(built.combing.as_ref(), sym, &elements, &built.core)
                .map_err(|e| ScenarioError::Build(e.to_string()))?;
            let passed = rep.passed() && rep.checked > 0;
            Ok(CheckResult { name: name.into(), passed, error: None, report: to_value(&rep), witness_file: None })
        }
        _ => unreachable!("certifier checks run through the certifier"),
    }
}

fn named_group(spec: &GroupSpec, names: &[String]) -> Result<Arc<Group>, ScenarioError> {
    let g = if names.is_empty() { Group::new(spec.clone()) } else { Group::with_names(spec.clone(), names.to_vec()) };
    g.map(Arc::new).map_err(|e| ScenarioError::Config(e.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn relative_properness(
    group: &GroupSpec,
    names: &[String],
    target: &[Vec<String>],
    reference: &[Vec<String>],
    radii: &[usize],
    probe_radius: Q,
    cone_length: Q,
    expect: Growth,
) -> Result<CheckResult, ScenarioError> {
    let grp = named_group(group, names)?;
    let subs = |hs: &[Vec<String>]| {
        hs.iter()
            .map(|h| grp.subgroup(h))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ScenarioError::Config(e.to_string()))
    };
    let (ts, rs) = (subs(target)?, subs(reference)?);
    let margin = (probe_radius.ceil().to_integer() as usize) + 1;
    let mut rows = Vec::new();
    let mut diameters = Vec::new();
    for &t in radii {
        let outer = t + margin;
        let tgt = coned_cayley_ball(grp.clone(), None, ts.clone(), outer, cone_length)
            .map_err(|e| ScenarioError::Build(e.to_string()))?;
        let refb = coned_cayley_ball(grp.clone(), None, rs.clone(), t, cone_length)
            .map_err(|e| ScenarioError::Build(e.to_string()))?;
        let base = tgt.vertex(&grp.identity()).expect("identity in ball");
        let safe = qi(outer as i128) / qi(2);
        let rep = relative_properness_probe(&tgt.space, base, &refb, t, probe_radius, safe)
            .map_err(|e| ScenarioError::Build(e.to_string()))?;
        diameters.push(rep.relative_diameter);
        rows.push(to_value(&rep));
    }
    let passed = diameters.iter().all(|d| d.is_some())
        && match expect {
            Growth::Bounded => diameters.windows(2).all(|w| w[0] == w[1]),
            Growth::Increasing => diameters.windows(2).all(|w| w[0] < w[1]),
        };
    let report = json!({
        "expect": expect,
        "probe_radius": fmt_q(&probe_radius),
        "truncation_radii": radii,
        "rows": rows,
    });
    Ok(CheckResult { name: "relative-properness".into(), passed, error: None, report, witness_file: None })
}

#[allow(clippy::too_many_arguments)]
fn qi_probe(
    source: &GroupSpec,
    names: &[String],
    target: &GraphOfGroupsSpec,
    radii: &[usize],
    tree_radius: usize,
    core_radius: Option<usize>,
    max_k: Option<Q>,
    jobs: usize,
) -> Result<CheckResult, ScenarioError> {
    let src = named_group(source, names)?;
    let core_radius = core_radius.unwrap_or(radii.iter().min().copied().unwrap_or(1) / 2);
    let mut rows = Vec::new();
    let mut best_k = Vec::new();
    for &r in radii {
        let ball = cayley_ball(src.clone(), None, r).map_err(|e| ScenarioError::Build(e.to_string()))?;
        let params = TreeBuildParams { radius: r, tree_radius, ..Default::default() };
        let tos = build_pushout(target, &params).map_err(|e| ScenarioError::Build(e.to_string()))?;
        let (Some(sym), Some(gd)) = (&tos.symbolic, &tos.group) else {
            return Err(ScenarioError::Build("pushout without group data".into()));
        };
        let z0 = gd.base_glued.ok_or_else(|| ScenarioError::Build("no base glued point".into()))?;
        let tg = sym.group();
        let index: Vec<usize> = src
            .names
            .iter()
            .map(|n| tg.generator(n))
            .collect::<Result<_, _>>()
            .map_err(|e| ScenarioError::Config(format!("source generator missing from target: {e}")))?;
        let map = |v: usize| -> Option<usize> {
            let Point::Elem(g) = &ball.space.points[v] else { return None };
            let word: Vec<(usize, i64)> = src.spec.word(g).into_iter().map(|(i, e)| (index[i], e)).collect();
            sym.act(&tg.from_word(&word), z0)
        };
        let core = ball.within(core_radius);
        let target_core = tos.core(z0, qi(core_radius as i128));
        let rep =
            schwarz_milnor_probe(&ball.space.graph, &core, &tos.z, &map, &target_core, &default_lambda_grid(), jobs)
                .map_err(|e| ScenarioError::Build(e.to_string()))?;
        best_k.push(rep.best.k);
        rows.push(json!({ "radius": r, "report": rep }));
    }
    let non_increasing = best_k.windows(2).all(|w| w[1] <= w[0]);
    let within = max_k.is_none_or(|m| best_k.iter().all(|k| *k <= m));
    let report = json!({
        "core_radius": core_radius,
        "radii": radii,
        "non_increasing": non_increasing,
        "max_k": max_k.map(|m| fmt_q(&m)),
        "rows": rows,
    });
    Ok(CheckResult { name: "qi".into(), passed: non_increasing && within, error: None, report, witness_file: None })
}

/// Distance between `(s, 0)` and `(t, theta)` in the planar development, by coordinates.
fn developed_distance(radius: f64, s: f64, t: f64, dx: f64) -> f64 {
    let theta = dx.min(PI);
    let (ax, ay) = (radius * s, 0.0);
    let (bx, by) = (radius * t * theta.cos(), radius * t * theta.sin());
    (ax - bx).hypot(ay - by)
}

fn spherical_formula(triples: usize, radius: Q, seed: u64) -> CheckResult {
    let d = crate::rational::to_f64(&radius);
    let cone = SphericalCone::new(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut worst_degenerate: f64 = 0.0;
    for _ in 0..triples {
        let s: f64 = rng.gen_range(0.0..=1.0);
        let t: f64 = rng.gen_range(0.0..=1.0);
        let dx: f64 = rng.gen_range(0.0..PI);
        worst = worst.max((cone.distance(s, t, dx) - developed_distance(d, s, t, dx)).abs());
        let far: f64 = rng.gen_range(PI..4.0 * PI);
        worst_degenerate = worst_degenerate.max((cone.distance(s, t, far) - d * (s + t)).abs());
    }
    let passed = worst <= 1e-9 && worst_degenerate <= 1e-12;
    let report = json!({
        "triples": triples,
        "radius": fmt_q(&radius),
        "max_error": worst,
        "max_degenerate_error": worst_degenerate,
        "tolerance": 1e-9,
        "degenerate_tolerance": 1e-12,
    });
    CheckResult { name: "spherical-formula".into(), passed, error: None, report, witness_file: None }
}

fn run_probe(ctx: &Ctx, p: &ProbeSpec) -> Result<CheckResult, ScenarioError> {
    match p {
        ProbeSpec::RelativeProperness {
            group,
            names,
            target,
            reference,
            truncation_radii,
            probe_radius,
            cone_length,
            expect,
        } => {
            relative_properness(group, names, target, reference, truncation_radii, *probe_radius, *cone_length, *expect)
        }
        ProbeSpec::Qi { source, names, target, radii, tree_radius, core_radius, max_k } => {
            qi_probe(source, names, target, radii, *tree_radius, *core_radius, *max_k, ctx.jobs)
        }
        ProbeSpec::SphericalFormula { triples, radius } => {
            let seed = ctx.seed.ok_or_else(|| ScenarioError::Config("spherical formula probe needs a seed".into()))?;
            Ok(spherical_formula(*triples, *radius, derive_seed(seed, "spherical-formula")))
        }
    }
}

/// Builds the space, runs the requested stage and writes the outputs.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<ScenarioOutcome, ScenarioError> {
    let mut cfg = cfg.clone();
    if let Some(s) = opts.seed {
        cfg.seed = Some(s);
    }
    if let Some(r) = opts.radius {
        if !cfg.space.set_radius(r) {
            return Err(ScenarioError::Config(format!("`{}` spaces have no radius to override", cfg.space.kind())));
        }
    }
    cfg.validate()?;
    let mut ctx = Ctx { cfg: &cfg, seed: cfg.seed, jobs: opts.jobs, sweeps: Vec::new(), witnesses: Vec::new() };
    let mut checks = Vec::new();
    let mut probes = Vec::new();
    let mut summary = None;
    let mut interchange = None;
    if opts.stage != Stage::Probe {
        let built = build_space(&cfg)?;
        summary = Some(SpaceSummary {
            kind: built.kind.to_string(),
            vertices: built.graph().vertex_count(),
            edges: built.graph().edge_count(),
            core_size: built.core.len(),
            core_radius: built.core_radius.map(|r| fmt_q(&r)),
            combing: built.combing.describe(),
        });
        if opts.stage == Stage::Certify {
            let needs_cert = cfg.checks.iter().any(|c| c.uses_certifier());
            let cert = if needs_cert {
                let c = Certifier::new(built.combing.as_ref(), built.core.clone(), ctx.plan())
                    .map_err(|e| ScenarioError::Build(e.to_string()))?;
                Some(match built.core_radius {
                    Some(r) => c.with_core_radius(r),
                    None => c,
                })
            } else {
                None
            };
            for spec in &cfg.checks {
                let res = match &cert {
                    Some(cert) if spec.uses_certifier() => ctx.run_check(&built, cert, spec)?,
                    _ => structural_check(&built, spec)?,
                };
                checks.push(res);
            }
        }
        interchange = Some(built.interchange);
    }
    if opts.stage != Stage::Build {
        for p in &cfg.probes {
            probes.push(run_probe(&ctx, p)?);
        }
    }
    let passed = checks.iter().chain(&probes).all(|c| c.passed);
    let mut report = ScenarioReport {
        scenario: cfg.name.clone(),
        stage: opts.stage,
        seed: cfg.seed,
        space: summary,
        checks,
        probes,
        passed,
    };
    let witnesses = std::mem::take(&mut ctx.witnesses);
    let sweeps = std::mem::take(&mut ctx.sweeps);
    let mut files = Vec::new();
    let dir = opts.out_dir.clone().or_else(|| cfg.output.dir.clone());
    if let Some(dir) = dir {
        std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let mut wfiles: BTreeMap<String, String> = BTreeMap::new();
        for (i, (name, value)) in witnesses.iter().enumerate() {
            let file = format!("{}.witness-{i}-{name}.json", cfg.name);
            write(&dir.join(&file), &serde_json::to_string_pretty(value).expect("json"), &mut files)?;
            wfiles.entry(name.clone()).or_insert(file);
        }
        for c in &mut report.checks {
            if !c.passed {
                c.witness_file = wfiles.get(&c.name).cloned();
            }
        }
        if let Some(text) = &interchange {
            write(&dir.join(format!("{}.graph", cfg.name)), text, &mut files)?;
        }
        write(&dir.join(format!("{}.report.json", cfg.name)), &report.to_json(), &mut files)?;
        let outcome = ScenarioOutcome { report, sweeps, witnesses, files: Vec::new() };
        if !outcome.sweeps.is_empty() {
            write(&dir.join(format!("{}.sweeps.csv", cfg.name)), &outcome.sweep_csv(&cfg.name), &mut files)?;
        }
        return Ok(ScenarioOutcome { files, ..outcome });
    }
    Ok(ScenarioOutcome { report, sweeps, witnesses, files })
}

fn io_err(path: &Path, e: std::io::Error) -> ScenarioError {
    ScenarioError::Io(format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str, files: &mut Vec<PathBuf>) -> Result<(), ScenarioError> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))?;
    files.push(path.to_path_buf());
    Ok(())
}
