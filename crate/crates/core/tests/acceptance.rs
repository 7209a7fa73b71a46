//! Acceptance run: ten checks over the benchmark suite, the solver and the
//! dialect emitters. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{
    all_supports, applied_magnitude, applied_resultant, oracle_solve, rel_diff, specs,
    stable_supports,
};
use frameforge::codegen::{emit, Dialect};
use frameforge::harness::{generate_suite, run_suite, BenchProblem, SuiteConfig, SUITE_SIZE};
use frameforge::model::to_canonical_json;
use frameforge::pipeline::compile;
use frameforge::problem::FrameProblemSpec;
use frameforge::solver::solve;
use frameforge::verify::{parse_script, DialectErrorKind};
use frameforge::{
    DistributedLoad, ElementEnd, ElementKind, ElementRecord, FrameModel, NodeRecord, PointLoad,
    SectionProperties, SupportKind, SupportRecord, UnitSystem, COORD_TOL,
};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn suite() -> Vec<BenchProblem> {
    generate_suite(&SuiteConfig::default()).expect("default suite")
}

fn model_of(spec: &FrameProblemSpec) -> FrameModel {
    compile(spec, COORD_TOL).expect("compiles").model
}

/// `n` reproducible samples from `strategy`.
fn sample<S: Strategy>(strategy: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..n)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy").current())
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn round_trip_suite() -> Outcome {
    let problems = suite();
    let start = Instant::now();
    let report = run_suite(&problems, &Dialect::ALL, COORD_TOL);
    let elapsed = start.elapsed();
    ensure(report.cells.len() == SUITE_SIZE * 3, || {
        format!("{} cells", report.cells.len())
    })?;
    let failed: Vec<String> = report
        .cells
        .iter()
        .filter(|c| !(c.emitted && c.parsed_back && c.model_equivalent))
        .map(|c| format!("{} {}: {:?}", c.problem, c.dialect, c.failure))
        .collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    let acc: Vec<String> = report
        .accuracy
        .iter()
        .map(|(d, a)| format!("{} {:.0}%", d.program(), a * 100.0))
        .collect();
    Ok(format!(
        "60/60 cells equivalent ({}) in {:.2?}",
        acc.join(", "),
        elapsed
    ))
}

fn solution_consistency() -> Outcome {
    let report = run_suite(&suite(), &Dialect::ALL, COORD_TOL);
    let mut worst = 0.0f64;
    for c in &report.cells {
        ensure(c.solution_equivalent, || {
            format!("{} {}: {:?}", c.problem, c.dialect, c.failure)
        })?;
        worst = worst.max(c.max_rel_diff.unwrap_or(f64::INFINITY));
    }
    ensure(worst <= 1e-9, || {
        format!("max relative difference {worst:e}")
    })?;
    Ok(format!(
        "60/60 solutions agree, max relative difference {worst:e}"
    ))
}

fn member(id: u32, kind: ElementKind, i: u32, j: u32, section: &str) -> ElementRecord {
    ElementRecord {
        id,
        kind,
        end_i: ElementEnd::Node(i),
        end_j: ElementEnd::Node(j),
        section: section.into(),
        description: String::new(),
    }
}

fn closed_forms() -> Outcome {
    let (e, a, i) = (2.0e8, 0.04, 2.0e-4);
    let (l, p) = (3.5, 12.0);
    // vertical cantilever, lateral tip load
    let cantilever = FrameModel {
        units: UnitSystem::KN_M,
        nodes: vec![NodeRecord::new(1, 0.0, 0.0), NodeRecord::new(2, 0.0, l)],
        supports: vec![SupportRecord {
            node_id: 1,
            kind: SupportKind::Fixed,
        }],
        sections: vec![SectionProperties::new("COL", e, a, i)],
        elements: vec![member(1, ElementKind::Column, 1, 2, "COL")],
        point_loads: vec![PointLoad {
            node_id: 2,
            fx: p,
            fy: 0.0,
            mz: 0.0,
        }],
        distributed_loads: vec![],
        provenance: "cantilever".into(),
    };
    let s = solve(&cantilever).map_err(|e| e.to_string())?;
    let tip = s.displacement(2).unwrap();
    let want = p * l.powi(3) / (3.0 * e * i);
    let d1 = rel_diff(tip.ux, want, 0.0);
    ensure(d1 <= 1e-9, || {
        format!("tip deflection {} vs {want}", tip.ux)
    })?;
    let want_rot = -p * l * l / (2.0 * e * i);
    let d2 = rel_diff(tip.rz, want_rot, 0.0);
    ensure(d2 <= 1e-9, || {
        format!("tip rotation {} vs {want_rot}", tip.rz)
    })?;

    // fixed-fixed girder under a downward UDL
    let (span, q) = (6.0, 5.0);
    let beam = FrameModel {
        units: UnitSystem::KN_M,
        nodes: vec![NodeRecord::new(1, 0.0, 0.0), NodeRecord::new(2, span, 0.0)],
        supports: vec![
            SupportRecord {
                node_id: 1,
                kind: SupportKind::Fixed,
            },
            SupportRecord {
                node_id: 2,
                kind: SupportKind::Fixed,
            },
        ],
        sections: vec![SectionProperties::new("GIR", e, 0.03, 1.5e-4)],
        elements: vec![member(1, ElementKind::Girder, 1, 2, "GIR")],
        point_loads: vec![],
        distributed_loads: vec![DistributedLoad {
            element_id: 1,
            w_transverse: -q,
        }],
        provenance: "fixed-fixed".into(),
    };
    let s = solve(&beam).map_err(|e| e.to_string())?;
    let r = s.element(1).unwrap();
    let end = q * span * span / 12.0;
    let mid = q * span * span / 24.0;
    let samples = &r.diagram;
    let centre = samples[samples.len() / 2];
    ensure((centre.x - span / 2.0).abs() < 1e-12, || {
        "no midspan station".into()
    })?;
    let checks = [
        (r.end_forces[2], end),
        (r.end_forces[5], -end),
        (samples[0].moment, -end),
        (samples[samples.len() - 1].moment, -end),
        (centre.moment, mid),
        (s.reaction(1).unwrap().mz, end),
        (s.reaction(2).unwrap().mz, -end),
    ];
    let worst = checks
        .iter()
        .fold(d1.max(d2), |m, &(a, b)| m.max(rel_diff(a, b, 0.0)));
    ensure(worst <= 1e-9, || format!("fixed-fixed moments {checks:?}"))?;
    Ok(format!(
        "PL^3/3EI, PL^2/2EI, wL^2/12 and wL^2/24 within {worst:e}"
    ))
}

/// Every regular and irregular layout of up to three bays and three
/// stories that stays within `max_dof`.
fn small_layouts(max_dof: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for bays in 1..=3usize {
        for code in 0..3usize.pow(bays as u32) {
            let per_bay: Vec<usize> = (0..bays)
                .map(|b| code / 3usize.pow(b as u32) % 3 + 1)
                .collect();
            let spec = common::spec(&per_bay, 5.0, 3.0);
            if 3 * model_of(&spec).nodes.len() <= max_dof {
                out.push(per_bay);
            }
        }
    }
    out
}

fn oracle_equivalence() -> Outcome {
    const MAX_DOF: usize = 30;
    let mut models: Vec<(String, FrameModel)> = suite()
        .iter()
        .map(|p| (p.name.clone(), model_of(&p.spec)))
        .filter(|(_, m)| 3 * m.nodes.len() <= MAX_DOF)
        .collect();
    for per_bay in small_layouts(MAX_DOF) {
        for support in stable_supports() {
            let mut spec = common::spec(&per_bay, 6.0, 3.5);
            spec.support_kind = support;
            models.push((format!("{per_bay:?} {support}"), model_of(&spec)));
        }
    }
    let mut worst = 0.0f64;
    for (name, model) in &models {
        let got = solve(model).map_err(|e| format!("{name}: {e}"))?;
        let want = oracle_solve(model);
        let u_scale = want
            .displacements
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let r_scale = want
            .reactions
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        for (q, n) in model.nodes.iter().enumerate() {
            let d = got.displacement(n.id).unwrap();
            for (a, b) in [d.ux, d.uy, d.rz].into_iter().zip(want.displacements[q]) {
                worst = worst.max(rel_diff(a, b, u_scale));
            }
            let r = got.reaction(n.id).map_or([0.0; 3], |r| [r.fx, r.fy, r.mz]);
            for (a, b) in r.into_iter().zip(want.reactions[q]) {
                worst = worst.max(rel_diff(a, b, r_scale));
            }
        }
        ensure(worst <= 1e-9, || {
            format!("{name}: relative difference {worst:e}")
        })?;
    }
    Ok(format!(
        "{} frames of at most {MAX_DOF} DOF, max relative difference {worst:e}",
        models.len()
    ))
}

fn equilibrium() -> Outcome {
    let specs = sample(specs(4, 6, stable_supports()), 200);
    let mut worst = 0.0f64;
    for (k, spec) in specs.iter().enumerate() {
        let model = model_of(spec);
        let sol = solve(&model).map_err(|e| format!("spec {k}: {e}"))?;
        let mut r = [0.0; 3];
        for re in &sol.reactions {
            let n = model.nodes.iter().find(|n| n.id == re.node_id).unwrap();
            r[0] += re.fx;
            r[1] += re.fy;
            r[2] += re.mz + n.x * re.fy - n.y * re.fx;
        }
        let applied = applied_resultant(&model);
        let scale = applied_magnitude(&model) + 1.0;
        for c in 0..3 {
            let res = (r[c] + applied[c]).abs() / scale;
            worst = worst.max(res);
            ensure(res <= 1e-8, || {
                format!("spec {k} component {c}: residual {res:e}")
            })?;
        }
    }
    Ok(format!(
        "200 random frames balanced, max relative residual {worst:e}"
    ))
}

fn count_laws() -> Outcome {
    let count = |m: &FrameModel, k: ElementKind| m.elements.iter().filter(|e| e.kind == k).count();
    let mut checked = 0;
    let regular = suite()
        .into_iter()
        .map(|p| p.spec)
        .filter(FrameProblemSpec::is_regular)
        .chain((1..=6).flat_map(|b| (1..=8).map(move |s| common::spec(&vec![s; b], 6.0, 3.0))));
    for spec in regular {
        let (b, s) = (spec.n_bays, spec.stories_per_bay[0]);
        let m = model_of(&spec);
        let got = (
            m.nodes.len(),
            count(&m, ElementKind::Column),
            count(&m, ElementKind::Girder),
        );
        let want = ((b + 1) * (s + 1), (b + 1) * s, b * s);
        ensure(got == want, || {
            format!("{b} bays x {s} stories: {got:?} vs {want:?}")
        })?;
        checked += 1;
    }
    let m = model_of(&common::spec(&[3, 2, 4], 6.0, 3.0));
    let got = (
        m.nodes.len(),
        count(&m, ElementKind::Column),
        count(&m, ElementKind::Girder),
    );
    ensure(got == (18, 14, 9), || format!("3-2-4 frame gives {got:?}"))?;
    Ok(format!(
        "{checked} regular frames obey the laws; 3-2-4 gives 18/14/9"
    ))
}

fn syntax_fidelity() -> Outcome {
    let mut n = 0;
    for p in suite() {
        let model = model_of(&p.spec);
        let s2k = emit(&model, Dialect::Sap2000S2k, COORD_TOL)
            .map_err(|e| e.to_string())?
            .text;
        ensure(s2k.contains("TABLE:  \"LOAD PATTERN DEFINITIONS\""), || {
            format!("{}: no load pattern table", p.name)
        })?;
        let joints: Vec<&str> = s2k
            .lines()
            .skip_while(|l| *l != "TABLE:  \"JOINT COORDINATES\"")
            .skip(1)
            .take_while(|l| !l.is_empty())
            .collect();
        ensure(joints.len() == model.nodes.len(), || {
            format!("{}: joint rows", p.name)
        })?;
        for row in &joints {
            let keys: Vec<&str> = row
                .split_whitespace()
                .filter_map(|kv| kv.split_once('=').map(|(k, _)| k))
                .collect();
            ensure(["XorR", "Y", "Z"].iter().all(|k| keys.contains(k)), || {
                format!("{}: joint row without XorR/Y/Z: {row}", p.name)
            })?;
        }
        let conn = s2k.find("TABLE:  \"CONNECTIVITY - FRAME\"");
        let assign = s2k.find("TABLE:  \"FRAME SECTION ASSIGNMENTS\"");
        ensure(
            matches!((conn, assign), (Some(c), Some(a)) if c < a),
            || {
                format!(
                    "{}: connectivity does not precede section assignment",
                    p.name
                )
            },
        )?;

        let e2k = emit(&model, Dialect::EtabsE2k, COORD_TOL)
            .map_err(|e| e.to_string())?
            .text;
        ensure(e2k.contains("$ STORIES - IN SEQUENCE FROM TOP"), || {
            format!("{}: no stories", p.name)
        })?;
        let stories = e2k
            .lines()
            .filter(|l| l.trim_start().starts_with("STORY "))
            .count();
        ensure(stories == p.spec.max_stories() + 1, || {
            format!("{}: {stories} story records", p.name)
        })?;
        // plan points per column line, never one record per 3-D node
        let points = e2k
            .lines()
            .filter(|l| l.trim_start().starts_with("POINT "))
            .count();
        ensure(points == p.spec.n_bays + 1, || {
            format!("{}: {points} plan points", p.name)
        })?;
        let lines = e2k
            .lines()
            .filter(|l| l.trim_start().starts_with("LINE "))
            .count();
        ensure(lines == 2 * p.spec.n_bays + 1, || {
            format!("{}: {lines} line objects", p.name)
        })?;
        let assigns_have_story = e2k
            .lines()
            .filter(|l| {
                l.trim_start().starts_with("LINEASSIGN")
                    || l.trim_start().starts_with("POINTASSIGN")
            })
            .all(|l| {
                l.split('"')
                    .nth(3)
                    .is_some_and(|s| s.starts_with("STORY") || s == "BASE")
            });
        ensure(assigns_have_story, || {
            format!("{}: assignment without a story", p.name)
        })?;
        ensure(
            !e2k.lines()
                .any(|l| l.starts_with("node ") || l.starts_with("element ")),
            || format!("{}: global node/element list", p.name),
        )?;
        n += 1;
    }
    Ok(format!("{n} S2K and {n} E2K files checked"))
}

fn no_reference_errors() -> Outcome {
    let specs = sample(specs(4, 6, all_supports()), 500);
    let (mut dup, mut undef, mut other, mut parsed) = (0, 0, 0, 0);
    for spec in &specs {
        let model = model_of(spec);
        for d in Dialect::ALL {
            let text = emit(&model, d, COORD_TOL).map_err(|e| e.to_string())?.text;
            match parse_script(d, &text) {
                Ok(_) => parsed += 1,
                Err(e) => match e.kind {
                    DialectErrorKind::DuplicateDefinition => dup += 1,
                    DialectErrorKind::UndefinedReference => undef += 1,
                    DialectErrorKind::Syntax => other += 1,
                },
            }
        }
    }
    ensure(dup == 0 && undef == 0 && other == 0, || {
        format!("{dup} duplicate, {undef} undefined, {other} syntax errors")
    })?;
    Ok(format!(
        "500 specs, {parsed} scripts parsed, 0 DUPLICATE_DEFINITION, 0 UNDEFINED_REFERENCE"
    ))
}

fn determinism() -> Outcome {
    let problems = suite();
    ensure(problems == suite(), || "suite generation differs".into())?;
    let first = run_suite(&problems, &Dialect::ALL, COORD_TOL).to_json();
    for k in 2..=10 {
        let again = run_suite(&problems, &Dialect::ALL, COORD_TOL).to_json();
        ensure(again == first, || format!("report {k} differs"))?;
    }
    for p in &problems {
        let (a, b) = (model_of(&p.spec), model_of(&p.spec));
        ensure(to_canonical_json(&a) == to_canonical_json(&b), || {
            format!("{}: IR differs", p.name)
        })?;
        for d in Dialect::ALL {
            let x = emit(&a, d, COORD_TOL).map_err(|e| e.to_string())?;
            let y = emit(&b, d, COORD_TOL).map_err(|e| e.to_string())?;
            ensure(x.text == y.text, || {
                format!("{} {d}: output differs", p.name)
            })?;
        }
    }
    Ok(format!(
        "10 reports byte-identical ({} bytes); emitters byte-stable",
        first.len()
    ))
}

fn end_to_end_time() -> Outcome {
    let start = Instant::now();
    let problems = suite();
    let report = run_suite(&problems, &Dialect::ALL, COORD_TOL);
    let elapsed = start.elapsed();
    ensure(report.all_passed, || "some cells failed".into())?;
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "20 x 3 compile, emit, parse, solve and compare in {elapsed:.2?}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("round-trip suite 20 x 3 at 100%", round_trip_suite),
        ("solution consistency at 1e-9", solution_consistency),
        ("closed-form solver checks", closed_forms),
        ("oracle equivalence up to 30 DOF", oracle_equivalence),
        ("equilibrium on 200 random frames", equilibrium),
        ("topology count laws", count_laws),
        ("S2K/E2K syntax fidelity", syntax_fidelity),
        (
            "no duplicate/undefined errors on 500 fuzzed specs",
            no_reference_errors,
        ),
        ("determinism across 10 repeats", determinism),
        ("end-to-end under 10 s", end_to_end_time),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {}/10 passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
