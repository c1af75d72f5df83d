//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use ccl_core::certify::{replay, CertReport, Certifier, ConvexSelector, SamplePlan, ThinPremise};
use ccl_core::combing::CanonicalCombing;
use ccl_core::par::jobs_from_env;
use ccl_core::rational::{fmt_q, parse_q, q, qi, Q};
use ccl_core::scenario::{
    build_space, builtin, catalog, cycle, random_tree, run_scenario, CheckSpec, RunOptions, ScenarioOutcome, Stage,
};
use ccl_core::tree::{build_pushout, TreeBuildParams};

type Outcome = Result<String, String>;

fn run(name: &str) -> Result<ScenarioOutcome, String> {
    let cfg = builtin(name).map_err(|e| e.to_string())?;
    run_scenario(&cfg, &RunOptions { stage: Stage::Certify, out_dir: None, ..RunOptions::default() })
        .map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn tree_baseline() -> Outcome {
    let lengths = [q(1, 2), qi(1), q(3, 2), qi(2)];
    let mut sizes = Vec::new();
    for seed in 0..20u64 {
        let n = 10 + 10 * seed as usize;
        let g = std::sync::Arc::new(random_tree(n, &lengths, seed));
        let comb = CanonicalCombing::new(g);
        let plan = SamplePlan { exhaustive_limit: 100_000, samples: 3000, seed, jobs: jobs_from_env() };
        let cert = Certifier::new(&comb, (0..n).collect(), plan).map_err(|e| e.to_string())?;
        let reports = [
            cert.check_geodesic(),
            cert.check_gcc(qi(1), qi(0)),
            cert.check_consistency(qi(0)),
            cert.check_bounded(qi(1), qi(0), qi(1), qi(0)),
        ];
        for r in reports {
            let r = r.map_err(|e| format!("seed {seed}: {e}"))?;
            ensure(r.certified(), format!("seed {seed}, {n} vertices: {} violated", r.property))?;
        }
        sizes.push(n);
    }
    Ok(format!("20 seeds, {}..{} vertices: geodesic, gcc (1,0), K = 0, bounded (1,0,1,0)", sizes[0], sizes[19]))
}

fn combination_constants() -> Outcome {
    let cfg = builtin("combination-cycles").map_err(|e| e.to_string())?;
    let built = build_space(&cfg).map_err(|e| e.to_string())?;
    let tree = built.tree.as_ref().expect("tree of spaces");
    let comb = built.combing.as_ref();
    let plan = SamplePlan::exhaustive().with_jobs(jobs_from_env());
    let e = qi(1);
    let (mut big_c, mut k, mut c2, mut consistency) = (qi(0), qi(0), qi(0), qi(0));
    for node in tree.k_nodes() {
        let cert = Certifier::new(comb, tree.vertex_spaces[node].clone(), plan.clone()).map_err(|e| e.to_string())?;
        let err = |e: ccl_core::certify::CertifyError| e.to_string();
        big_c = big_c.max(cert.gcc_sweep(&[e]).map_err(err)?.rows[0].minimal);
        k = k.max(cert.quasigeodesic_sweep(&[qi(1)]).map_err(err)?.rows[0].minimal);
        c2 = c2.max(cert.bounded_sweep(&[qi(1)]).map_err(err)?.rows[0].minimal);
        consistency = consistency.max(cert.consistency_sweep().map_err(err)?.rows[0].minimal);
    }
    let (lambda, c1) = (qi(1), qi(1));
    let cert = Certifier::new(comb, built.core.clone(), plan).map_err(|e| e.to_string())?.with_core_radius(qi(6));
    let err = |e: ccl_core::certify::CertifyError| e.to_string();
    let checks = [
        cert.check_gcc(e + qi(2), qi(6) * big_c).map_err(err)?,
        cert.check_quasigeodesic(lambda, qi(2) * k).map_err(err)?,
        cert.check_bounded(lambda, qi(2) * k, lambda * c1, qi(2) * k + c1 + c2).map_err(err)?,
        cert.check_consistency(big_c).map_err(err)?,
    ];
    for r in &checks {
        ensure(r.certified(), format!("{} violated at {:?}", r.property, r.profile))?;
    }
    Ok(format!(
        "vertex spaces (E,C) = (1,{}), k = {}, c2 = {}, K = {}; combined certifies gcc (3,{}), qg (1,{}), bounded (1,{},1,{}), K = {}",
        fmt_q(&big_c),
        fmt_q(&k),
        fmt_q(&c2),
        fmt_q(&consistency),
        fmt_q(&(qi(6) * big_c)),
        fmt_q(&(qi(2) * k)),
        fmt_q(&(qi(2) * k)),
        fmt_q(&(qi(2) * k + c1 + c2)),
        fmt_q(&big_c)
    ))
}

fn report_q(v: &serde_json::Value, key: &str) -> Result<Q, String> {
    let s = v[key].as_str().ok_or_else(|| format!("missing {key}"))?;
    parse_q(s).map_err(|e| e.to_string())
}

fn coned_extension() -> Outcome {
    let out = run("f2xz-coned")?;
    let r = &out.report;
    let cone = r.check("cone-validation").ok_or("no cone validation")?;
    ensure(cone.passed, format!("cone validation failed: {}", cone.report))?;
    let d = report_q(&cone.report, "cone_radius")?;
    ensure(r.check("geodesic").is_some_and(|c| c.passed), "hat combing is not geodesic")?;
    let sweep = out.sweeps.iter().find(|s| s.property == "gcc").ok_or("no gcc sweep")?;
    let row = sweep
        .rows
        .iter()
        .find(|row| row.param <= qi(3) && row.minimal <= qi(6) * row.param * d + qi(12) * d)
        .ok_or("no E <= 3 with C within 6ED + 12D")?;
    Ok(format!(
        "D = {}, crossings <= {}, embedding pairs {}, gcc certifies at (E,C) = ({},{}) within bound {}",
        fmt_q(&d),
        cone.report["max_cone_crossings"],
        cone.report["embedding_pairs"],
        fmt_q(&row.param),
        fmt_q(&row.minimal),
        fmt_q(&(qi(6) * row.param * d + qi(12) * d))
    ))
}

fn spherical_formula() -> Outcome {
    let out = run("spherical-cone")?;
    let p = out.report.probe("spherical-formula").ok_or("no probe")?;
    ensure(out.report.passed, format!("spherical scenario failed: {}", p.report))?;
    Ok(format!(
        "{} triples, max error {:e}, degenerate max error {:e}",
        p.report["triples"],
        p.report["max_error"].as_f64().unwrap_or(f64::NAN),
        p.report["max_degenerate_error"].as_f64().unwrap_or(f64::NAN)
    ))
}

fn structure() -> Outcome {
    let mut names = Vec::new();
    for scenario in ["amalgam-f2", "hnn-z2"] {
        let out = run(scenario)?;
        let c = out.report.check("structural").ok_or("no structural check")?;
        ensure(c.passed, format!("{scenario}: {}", c.report))?;
        names = c.report["checks"]
            .as_array()
            .map(|a| a.iter().filter_map(|x| x["name"].as_str().map(str::to_string)).collect())
            .unwrap_or_default();
    }
    let cfg = builtin("amalgam-f2").map_err(|e| e.to_string())?;
    let ccl_core::scenario::SpaceSpec::Pushout { spec, .. } = &cfg.space else {
        return Err("amalgam-f2 is not a pushout".into());
    };
    for ell in [q(1, 2), qi(1), qi(2)] {
        let params = TreeBuildParams { radius: 3, tree_radius: 2, spike_length: ell, ..TreeBuildParams::default() };
        let tos = build_pushout(spec, &params).map_err(|e| e.to_string())?;
        let z0 = tos.group.as_ref().and_then(|g| g.base_glued).ok_or("no glued point")?;
        let core = tos.core(z0, qi(2));
        let rep = tos.structural_suite(Some(&core));
        ensure(rep.passed(), format!("spike length {}: {rep:?}", fmt_q(&ell)))?;
    }
    Ok(format!("Z*Z and HNN(Z^2) pass [{}]; Z*Z also at spike lengths 1/2, 1, 2", names.join(", ")))
}

fn schwarz_milnor() -> Outcome {
    let out = run("amalgam-f2")?;
    let p = out.report.probe("qi").ok_or("no qi probe")?;
    let rows: Vec<String> = p.report["rows"]
        .as_array()
        .ok_or("no rows")?
        .iter()
        .map(|r| format!("r={}: ({}, {})", r["radius"], r["report"]["best"]["lambda"], r["report"]["best"]["k"]))
        .collect();
    ensure(p.passed, format!("constants not non-increasing or above the pinned bound: {}", rows.join("; ")))?;
    Ok(format!(
        "best (lambda, k) {}; pinned k <= {}",
        rows.join(", ").replace('"', ""),
        p.report["max_k"].as_str().unwrap_or("none")
    ))
}

fn diameters(out: &ScenarioOutcome) -> Result<Vec<String>, String> {
    let p = out.report.probe("relative-properness").ok_or("no relative properness probe")?;
    ensure(p.passed, format!("unexpected growth: {}", p.report))?;
    Ok(p.report["rows"]
        .as_array()
        .ok_or("no rows")?
        .iter()
        .map(|r| r["relative_diameter"].as_str().unwrap_or("none").to_string())
        .collect())
}

fn relative_properness() -> Outcome {
    let bounded = diameters(&run("f2xz-coned")?)?;
    let growing = diameters(&run("z3-relative")?)?;
    Ok(format!(
        "F2xZ with <a>: relative diameters [{}] bounded; Z^3 with <x> only: [{}] strictly increasing",
        bounded.join(", "),
        growing.join(", ")
    ))
}

fn sufficiency() -> Outcome {
    let g = std::sync::Arc::new(cycle(6, qi(1)));
    let comb = CanonicalCombing::new(g);
    let cert = Certifier::new(&comb, (0..6).collect(), SamplePlan::exhaustive()).map_err(|e| e.to_string())?;
    let pins: BTreeMap<Q, Q> =
        [(qi(1), q(9, 4)), (q(3, 2), q(31, 16)), (qi(2), q(13, 8)), (qi(3), qi(1)), (qi(5), qi(0))]
            .into_iter()
            .collect();
    let es: Vec<Q> = pins.keys().copied().collect();
    let sweep = cert.gcc_sweep(&es).map_err(|e| e.to_string())?;
    for (e, c) in &pins {
        ensure(sweep.minimal_at(e) == Some(*c), format!("6-cycle C at E = {} moved from {}", fmt_q(e), fmt_q(c)))?;
    }
    let s = cert.cross_check_sufficiency(&[qi(1), qi(2)], None).map_err(|e| e.to_string())?;
    ensure(s.report.certified(), format!("6-cycle: {:?}", s.checks))?;
    let mut total = s.checks.len();

    let cfg = builtin("f2xz-coned").map_err(|e| e.to_string())?;
    let mut cfg = cfg;
    cfg.space.set_radius(4);
    let built = build_space(&cfg).map_err(|e| e.to_string())?;
    let plan = SamplePlan { exhaustive_limit: 100_000, samples: 1500, seed: 1, jobs: jobs_from_env() };
    let cert = Certifier::new(built.combing.as_ref(), built.core.clone(), plan).map_err(|e| e.to_string())?;
    let d = built.coned.as_ref().map(|c| c.radius()).ok_or("no cone radius")?;
    let premise = ThinPremise { selector: built.selector.clone().unwrap_or_else(|| ConvexSelector::fixed(vec![])), d };
    let s = cert.cross_check_sufficiency(&[qi(1)], Some(&premise)).map_err(|e| e.to_string())?;
    ensure(s.report.certified(), format!("coned: {:?}", s.checks))?;
    total += s.checks.len();
    let applied = s.checks.iter().filter(|c| c.premise_certified).count();
    Ok(format!(
        "6-cycle C pinned at E = 1, 3/2, 2, 3, 5 -> 9/4, 31/16, 13/8, 1, 0; {total} implications hold ({applied} with certified premises on the coned fixture, D = {})",
        fmt_q(&d)
    ))
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(Result::ok)
                .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap_or_default()))
                .collect()
        })
        .unwrap_or_default()
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut count = 0;
    let mut scenarios: Vec<_> = catalog().iter().map(|e| e.config()).collect();
    let mut failing = builtin("six-cycle").map_err(|e| e.to_string())?;
    failing.name = "six-cycle-strict".into();
    failing.checks = vec![
        CheckSpec::Gcc { e: qi(1), c: qi(0) },
        CheckSpec::Forward { e: qi(1), c: qi(0) },
        CheckSpec::Bounded { lambda: qi(1), k: qi(0), c1: qi(1), c2: qi(0) },
    ];
    let mut detour = builtin("detour").map_err(|e| e.to_string())?;
    detour.name = "detour-strict".into();
    detour.checks = vec![CheckSpec::Quasigeodesic { lambda: qi(1), k: qi(1) }, CheckSpec::Geodesic];
    scenarios.push(failing);
    scenarios.push(detour);
    let mut replayed = 0;
    for cfg in &scenarios {
        let (a, b) = (tmp.path().join("a").join(&cfg.name), tmp.path().join("b").join(&cfg.name));
        for (dir, jobs) in [(&a, 1), (&b, 0)] {
            let opts = RunOptions { stage: Stage::Certify, jobs, out_dir: Some(dir.clone()), ..RunOptions::default() };
            run_scenario(cfg, &opts).map_err(|e| format!("{}: {e}", cfg.name))?;
        }
        let (fa, fb) = (files(&a), files(&b));
        ensure(!fa.is_empty() && fa == fb, format!("{}: outputs differ between runs", cfg.name))?;
        let built = build_space(cfg).map_err(|e| e.to_string())?;
        for (name, bytes) in fa.iter().filter(|(n, _)| n.contains(".witness-")) {
            let report: CertReport = serde_json::from_slice(bytes).map_err(|e| format!("{name}: {e}"))?;
            let again = replay(built.combing.as_ref(), &report).map_err(|e| format!("{name}: {e}"))?;
            ensure(again, format!("{name} does not replay"))?;
            replayed += 1;
        }
        count += 1;
    }
    ensure(replayed >= 4, format!("only {replayed} witnesses replayed"))?;
    Ok(format!("{count} scenarios byte-identical across runs (1 and all workers); {replayed} witnesses replay"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("tree baseline", tree_baseline),
        ("combination constants", combination_constants),
        ("coned-off extension", coned_extension),
        ("spherical cone formula", spherical_formula),
        ("pushout and coalescence structure", structure),
        ("relative Schwarz-Milnor", schwarz_milnor),
        ("relative properness dichotomy", relative_properness),
        ("sufficiency cross-checks", sufficiency),
        ("determinism and witness replay", determinism),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {} PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
