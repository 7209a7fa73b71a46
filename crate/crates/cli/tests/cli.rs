use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use frameforge::codegen::Dialect;
use frameforge::harness::{generate_suite, run_suite, SuiteConfig};
use frameforge::model::{from_json, to_canonical_json};
use frameforge::COORD_TOL;
use tempfile::TempDir;

fn frames(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../frames")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frameforge"))
        .args(args)
        .env_remove("FRAMEFORGE_TOL")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Compiles the portal frame for all targets with the IR into a temp dir.
fn compiled_portal() -> TempDir {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "compile",
        s(&frames("portal.frame")),
        "--target",
        "all",
        "--emit-ir",
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir
}

#[test]
fn compile_all_writes_three_scripts() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "compile",
        s(&frames("portal.frame")),
        "--target",
        "all",
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    for ext in ["tcl", "s2k", "e2k"] {
        assert!(dir.path().join(format!("portal.{ext}")).is_file(), "{ext}");
    }
    assert!(!dir.path().join("portal.frame.json").exists());
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn compile_single_target_with_ir() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "compile",
        s(&frames("portal.frame")),
        "--target",
        "etabs",
        "--emit-ir",
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    let mut names: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["portal.e2k", "portal.frame.json"]);
    let ir = fs::read_to_string(dir.path().join("portal.frame.json")).unwrap();
    let model = from_json(&ir).unwrap();
    assert_eq!(to_canonical_json(&model), ir);
}

#[test]
fn compile_missing_section_exits_2() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(frames("portal.frame")).unwrap();
    let bad = dir.path().join("bad.frame");
    fs::write(&bad, text.replace("[SUPPORTS] base = fixed\n", "")).unwrap();
    let out = run(&["compile", s(&bad), "--out-dir", s(dir.path())]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("MISSING_SECTION"), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
}

#[test]
fn compile_missing_input_exits_3() {
    let out = run(&["compile", "/nonexistent/portal.frame"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn template_target_is_the_default() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(frames("portal.frame")).unwrap();
    let input = dir.path().join("p.frame");
    fs::write(&input, format!("{text}[TARGET] software = sap2000\n")).unwrap();
    let out = run(&["compile", s(&input), "--out-dir", s(dir.path())]);
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("p.s2k").is_file());
    assert!(!dir.path().join("p.tcl").exists());
}

#[test]
fn verify_fresh_scripts_against_their_ir() {
    let dir = compiled_portal();
    let ir = dir.path().join("portal.frame.json");
    for ext in ["tcl", "s2k", "e2k"] {
        let out = run(&[
            "verify",
            s(&dir.path().join(format!("portal.{ext}"))),
            s(&ir),
        ]);
        assert_eq!(code(&out), 0, "{ext}: {}", stderr(&out));
        assert_eq!(stdout(&out), "equivalent\n");
    }
}

#[test]
fn verify_deleted_element_exits_4() {
    let dir = compiled_portal();
    let tcl = dir.path().join("portal.tcl");
    let text = fs::read_to_string(&tcl).unwrap();
    let edited: String = text
        .lines()
        .filter(|l| !l.starts_with("element elasticBeamColumn 2 "))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(edited.lines().count() + 1, text.lines().count());
    fs::write(&tcl, edited).unwrap();
    let out = run(&["verify", s(&tcl), s(&dir.path().join("portal.frame.json"))]);
    assert_eq!(code(&out), 4);
    let report = stdout(&out);
    assert!(report.starts_with("not equivalent"), "{report}");
    assert_eq!(
        report
            .lines()
            .filter(|l| l.trim_start().starts_with("element:"))
            .count(),
        1,
        "{report}"
    );
}

#[test]
fn verify_truncated_script_reports_a_line() {
    let dir = compiled_portal();
    let s2k = dir.path().join("portal.s2k");
    let text = fs::read_to_string(&s2k).unwrap();
    fs::write(&s2k, &text[..text.len() / 2]).unwrap();
    let out = run(&["verify", s(&s2k), s(&dir.path().join("portal.frame.json"))]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line "), "{}", stderr(&out));
}

#[test]
fn verify_unknown_extension_is_a_usage_error() {
    let dir = compiled_portal();
    let out = run(&[
        "verify",
        s(&dir.path().join("portal.frame.json")),
        s(&dir.path().join("portal.frame.json")),
    ]);
    assert_eq!(code(&out), 64);
}

#[test]
fn solve_portal_writes_results() {
    let dir = TempDir::new().unwrap();
    let result = dir.path().join("portal.solution.json");
    let out = run(&["solve", s(&frames("portal.frame")), s(&result)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(json["displacements"].as_array().unwrap().len(), 4);
    assert_eq!(json["reactions"].as_array().unwrap().len(), 2);
    assert_eq!(json["elements"][0]["diagram"].as_array().unwrap().len(), 11);
    assert!(stdout(&out).contains("max displacement: node"));
}

#[test]
fn solve_accepts_ir_and_samples() {
    let dir = compiled_portal();
    let result = dir.path().join("r.json");
    let out = run(&[
        "solve",
        s(&dir.path().join("portal.frame.json")),
        s(&result),
        "--samples",
        "21",
    ]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&result).unwrap()).unwrap();
    for e in json["elements"].as_array().unwrap() {
        assert_eq!(e["diagram"].as_array().unwrap().len(), 21);
    }
    let out = run(&[
        "solve",
        s(&dir.path().join("portal.frame.json")),
        s(&result),
        "--samples",
        "1",
    ]);
    assert_eq!(code(&out), 64);
}

#[test]
fn solve_unsupported_frame_exits_5() {
    let dir = compiled_portal();
    let text = fs::read_to_string(dir.path().join("portal.frame.json")).unwrap();
    let mut model = from_json(&text).unwrap();
    // lift the frame off the base level so an unsupported base is not a
    // validation error, then drop the supports
    for n in &mut model.nodes {
        n.y += 1.0;
    }
    model.supports.clear();
    let ir = dir.path().join("floating.frame.json");
    fs::write(&ir, to_canonical_json(&model)).unwrap();
    let out = run(&["solve", s(&ir), s(&dir.path().join("r.json"))]);
    assert_eq!(code(&out), 5, "{}", stderr(&out));
    assert!(stderr(&out).contains("SINGULAR_SYSTEM"));
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn solve_invalid_ir_exits_2() {
    let dir = compiled_portal();
    let ir = dir.path().join("portal.frame.json");
    let text = fs::read_to_string(&ir).unwrap();
    fs::write(&ir, text.replace("\"name\": \"GIR\"", "\"name\": \"GIR2\"")).unwrap();
    let out = run(&["solve", s(&ir), s(&dir.path().join("r.json"))]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("DANGLING_SECTION_REF"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn bench_dialects_none_is_a_usage_error() {
    let out = run(&["bench", "--dialects", "none"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn bench_matches_the_library_and_repeats_identically() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "bench",
        s(&frames("bench.toml")),
        "--dialects",
        "all",
        "--repeat",
        "10",
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("10 repeats, reports identical"));
    let written = fs::read_to_string(dir.path().join("bench_report.json")).unwrap();

    let suite = generate_suite(&SuiteConfig::default()).unwrap();
    let report = run_suite(&suite, &Dialect::ALL, COORD_TOL);
    assert_eq!(written, report.to_json());
    assert_eq!(
        fs::read_to_string(dir.path().join("bench_report.txt")).unwrap(),
        report.to_table(false)
    );
    let passing = stdout(&out)
        .lines()
        .filter(|l| l.starts_with('P') && l.split_whitespace().nth(6) == Some("yes"))
        .count();
    assert_eq!(passing, 60);
}

#[test]
fn bench_bad_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bench.toml");
    fs::write(&cfg, "bays = []\n").unwrap();
    let out = run(&["bench", s(&cfg), "--out-dir", s(dir.path())]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("CONFIG_ERROR"));
}

#[test]
fn bad_tolerance_env_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_frameforge"))
        .args(["solve", s(&frames("portal.frame")), "/dev/null"])
        .env("FRAMEFORGE_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 64);
}
