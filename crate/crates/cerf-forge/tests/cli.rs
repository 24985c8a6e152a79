use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cerf-forge")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn cerf-forge")
}

fn run_on(args: &[&str], file: &str) -> Output {
    let path = fixture(file);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    let leaked: &'static str = Box::leak(p.into_boxed_str());
    full.push(leaked);
    run(&full)
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(bin())
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn cerf-forge");
    child.stdin.as_mut().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().expect("wait for cerf-forge")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not json ({}): {}", e, String::from_utf8_lossy(&out.stdout))
    })
}

fn stderr_code(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap_or_else(|e| {
        panic!("stderr is not json ({}): {}", e, String::from_utf8_lossy(&out.stderr))
    });
    v["code"].as_str().expect("code field").to_string()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn validate_accepts_every_good_fixture() {
    for f in [
        "cp2.json",
        "cp2bar.json",
        "s4.json",
        "s1s3.json",
        "cp2_sum.json",
        "stdgk_g5k2.json",
        "sphere_morse.json",
        "torus_morse.json",
        "genus2_morse.json",
        "surface_from.json",
        "surface_to.json",
        "surface_other_span.json",
    ] {
        let out = run_on(&["validate"], f);
        assert_eq!(exit_code(&out), 0, "{} rejected: {}", f, String::from_utf8_lossy(&out.stderr));
        let report = stdout_json(&out);
        assert_eq!(report["valid"], Value::Bool(true), "{}", f);
    }
}

#[test]
fn malformed_documents_fail_with_stable_codes() {
    for (f, code) in [
        ("not_json.json", "MALFORMED_JSON"),
        ("bad_version.json", "UNKNOWN_VERSION"),
        ("bad_kind.json", "UNKNOWN_KIND"),
        ("unknown_field.json", "MALFORMED_PAYLOAD"),
        ("dup_height.json", "DUPLICATE_HEIGHT"),
        ("dangling_circle.json", "DANGLING_CIRCLE_ID"),
        ("not_unimodular.json", "NOT_UNIMODULAR"),
    ] {
        let out = run_on(&["validate"], f);
        assert_eq!(exit_code(&out), 1, "{} should exit 1", f);
        assert!(out.stdout.is_empty(), "{} wrote a report to stdout", f);
        assert_eq!(stderr_code(&out), code, "{}", f);
    }
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["frobnicate"]);
    assert_eq!(exit_code(&out), 2);

    let out = run(&["interpolate"]);
    assert_eq!(exit_code(&out), 2);
    assert_eq!(stderr_code(&out), "USAGE");

    let out = run_on(&["invariants", "--format", "svg"], "cp2.json");
    assert_eq!(exit_code(&out), 2);
    assert_eq!(stderr_code(&out), "USAGE");

    let out = run(&["enumerate", "nonsense"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn invariants_report_the_catalog_values() {
    for (f, chi, h1, sigma) in [
        ("s4.json", 2, 0, 0),
        ("cp2.json", 3, 0, 1),
        ("cp2bar.json", 3, 0, -1),
        ("s1s3.json", 0, 1, 0),
        ("cp2_sum.json", 4, 0, 0),
    ] {
        let out = run_on(&["invariants"], f);
        assert_eq!(exit_code(&out), 0, "{}: {}", f, String::from_utf8_lossy(&out.stderr));
        let v = stdout_json(&out);
        assert_eq!(v["chi"], Value::from(chi), "{}", f);
        assert_eq!(v["h1_rank"], Value::from(h1), "{}", f);
        assert_eq!(v["sigma"], Value::from(sigma), "{}", f);
        assert_eq!(v.as_object().unwrap().len(), 3, "{}: exactly three keys", f);
    }
}

#[test]
fn invariants_accepts_the_trisection_flag() {
    let path = fixture("cp2.json");
    let out = run(&["invariants", "--trisection", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_json(&out)["sigma"], Value::from(1));
}

#[test]
fn enumerate_reports_both_censuses() {
    let out = run(&["enumerate", "figure1"]);
    assert_eq!(exit_code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["count"], Value::from(4));
    let genera: Vec<i64> =
        v["entries"].as_array().unwrap().iter().map(|e| e["genus"].as_i64().unwrap()).collect();
    assert_eq!(genera.iter().filter(|&&g| g == 0).count(), 3);
    assert_eq!(genera.iter().filter(|&&g| g == 1).count(), 1);

    let out = run(&["enumerate", "triple"]);
    assert_eq!(exit_code(&out), 0);
    let v = stdout_json(&out);
    for e in v["entries"].as_array().unwrap() {
        let profile = (e["genus"].as_i64().unwrap(), e["boundary_circles"].as_i64().unwrap());
        assert!(profile == (0, 5) || profile == (1, 3), "unexpected profile {:?}", profile);
    }
}

#[test]
fn reading_from_stdin_matches_reading_from_file() {
    let text = std::fs::read_to_string(fixture("cp2.json")).unwrap();
    let from_stdin = run_stdin(&["invariants"], &text);
    let from_file = run_on(&["invariants"], "cp2.json");
    assert_eq!(exit_code(&from_stdin), 0);
    assert_eq!(from_stdin.stdout, from_file.stdout);
}

#[test]
fn cut_system_output_is_itself_a_valid_document() {
    let out = run_on(&["cut-system"], "genus2_morse.json");
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = String::from_utf8(out.stdout).unwrap();
    let again = run_stdin(&["validate"], &doc);
    assert_eq!(exit_code(&again), 0, "{}", String::from_utf8_lossy(&again.stderr));
    let v = stdout_json(&again);
    assert_eq!(v["kind"], Value::from("surface"));
    assert_eq!(v["genus"], Value::from(2));
}

#[test]
fn reeb_reports_the_torus_cycle() {
    let out = run_on(&["reeb"], "torus_morse.json");
    assert_eq!(exit_code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["genus"], Value::from(1));
    assert_eq!(v["cycles"].as_array().unwrap().len(), 1);
}

#[test]
fn compiled_projective_family_round_trips_through_the_cli() {
    let out = run_on(&["compile-trisection"], "cp2.json");
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let family = String::from_utf8(out.stdout).unwrap();

    let types = run_stdin(&["classify-interval"], &family);
    assert_eq!(exit_code(&types), 0);
    let v = stdout_json(&types);
    assert_eq!(v["type1"], Value::from(3));
    assert_eq!(v["type0"], Value::from(0));

    let assembled = run_stdin(&["assemble-s1"], &family);
    assert_eq!(exit_code(&assembled), 0);
    let v = stdout_json(&assembled);
    assert_eq!(v["closes"], Value::Bool(true));
    assert_eq!(v["surgeries"].as_array().unwrap().len(), 3);

    let rendered = run_stdin(&["render"], &family);
    assert_eq!(exit_code(&rendered), 0);
    let svg = String::from_utf8(rendered.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("class=\"crossing\"").count(), 3);
}

#[test]
fn assemble_b1_reports_the_interval_record() {
    use cerf_forge::catalog::{plain_segment, toral_switch_segment};
    use cerf_forge::doc::{serialize_document, Document};
    use cerf_forge::family_one::CerfGraphic1;
    use cerf_forge::surface::{CutSystem, HomologyClass};

    let graphic = CerfGraphic1 {
        genus: 1,
        cyclic: false,
        segments: vec![
            plain_segment(1),
            toral_switch_segment(HomologyClass(vec![1, 0]), HomologyClass(vec![0, 1])),
            plain_segment(1),
        ],
    };
    let doc =
        Document::Graphic1 { graphic, start_system: CutSystem::from_rows(1, &[vec![1, 0]]) };
    let text = serialize_document(&doc);

    let out = run_stdin(&["validate"], &text);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let out = run_stdin(&["assemble-b1"], &text);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["k"], Value::from(0));
    assert_eq!(v["surgeries"].as_array().unwrap().len(), 1);
    assert_eq!(v["boundary_h1"]["rank"], Value::from(0));

    // A cyclic command on a non-cyclic family is a validation error.
    let out = run_stdin(&["assemble-s1"], &text);
    assert_eq!(exit_code(&out), 1);
    assert_eq!(stderr_code(&out), "INVALID_GRAPHIC");
}

#[test]
fn render_rejects_json_format_and_wrong_kinds() {
    let out = run_on(&["render", "--format", "json"], "cp2.json");
    assert_eq!(exit_code(&out), 2);
    assert_eq!(stderr_code(&out), "USAGE");

    let out = run_on(&["render"], "cp2.json");
    assert_eq!(exit_code(&out), 1);
    assert_eq!(stderr_code(&out), "UNEXPECTED_KIND");
}

#[test]
fn interpolate_reports_moves_and_rejects_span_mismatch() {
    let from = fixture("surface_from.json");
    let to = fixture("surface_to.json");
    let out = run(&["interpolate", from.to_str().unwrap(), to.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!(v["within_bound"].as_bool().unwrap());
    assert!(!v["moves"].as_array().unwrap().is_empty());

    let other = fixture("surface_other_span.json");
    let out = run(&["interpolate", from.to_str().unwrap(), other.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    assert_eq!(stderr_code(&out), "SPAN_MISMATCH");
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = std::env::temp_dir().join("cerf_forge_cli_out");
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("census.json");
    let out = run(&["enumerate", "figure1", "--output", target.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(written["count"], Value::from(4));
    std::fs::remove_file(&target).ok();
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["enumerate", "triple"],
        vec!["compile-trisection", fixture("cp2.json").to_str().unwrap()],
        vec!["invariants", fixture("stdgk_g5k2.json").to_str().unwrap()],
        vec!["reeb", fixture("genus2_morse.json").to_str().unwrap()],
    ] {
        let a = run(&args.iter().map(|s| &**s).collect::<Vec<_>>());
        let b = run(&args.iter().map(|s| &**s).collect::<Vec<_>>());
        assert_eq!(exit_code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "nondeterministic output for {:?}", args);
    }
}
