use arcsection_cli::{run_json, run_spec, JobSpec, Report};
use serde_json::Value;
use std::io::Write;
use std::process::{Command, Stdio};

const QUARTIC: &str = "z^4-4*x*z+3*y^2";
const FOUR_LINES: &str = "z^3-(x-y)*(x+y)*(x-2*y)*(x+2*y)";

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../schemas/report.schema.json"))
        .expect("schema file");
    let v: Value = serde_json::from_str(&text).expect("schema is JSON");
    jsonschema::validator_for(&v).expect("schema compiles")
}

fn assert_valid(report: &Value) {
    let s = schema();
    let errors: Vec<String> = s.iter_errors(report).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

fn binary(args: &[&str], stdin: &str) -> (i32, Value, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_arcsection"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let report: Value = serde_json::from_slice(&out.stdout).expect("report on stdout");
    (
        out.status.code().unwrap(),
        report,
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn cycle_types(r: &Value) -> Vec<Vec<Vec<u64>>> {
    r["crossings"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "tracked")
        .map(|c| serde_json::from_value(c["cycle_types"].clone()).unwrap())
        .collect()
}

#[test]
fn quartic_analysis_from_stdin() {
    let job = format!(r#"{{"surface":"{QUARTIC}","projection":"z","tasks":["analyze"]}}"#);
    let (code, r, _) = binary(&["--no-prune"], &job);
    assert_eq!(code, 0);
    assert_valid(&r);
    assert_eq!(r["verdict"]["exists_irreducible"], "no");
    assert_eq!(r["echo"]["prune"], false);
    let d = r["discriminant"].as_str().unwrap();
    assert!(d == "-y^6 + x^4" || d == "y^6 - x^4", "{d}");
    let mut seconds: Vec<Vec<u64>> = cycle_types(&r).into_iter().map(|t| t[1].clone()).collect();
    seconds.sort();
    let mut firsts: Vec<Vec<u64>> = cycle_types(&r).into_iter().map(|t| t[0].clone()).collect();
    firsts.sort();
    let mut all: Vec<Vec<u64>> = firsts.into_iter().chain(seconds).collect();
    all.retain(|t| t.iter().any(|&k| k > 1));
    all.sort();
    assert_eq!(all, vec![vec![2, 1, 1], vec![2, 1, 1], vec![2, 2], vec![3, 1]]);
    for c in r["crossings"].as_array().unwrap() {
        assert_eq!(c["has_transitive"], false);
        assert_eq!(c["commute"], true);
    }
}

#[test]
fn user_arc_section_on_four_lines() {
    let job = format!(
        r#"{{"surface":"{FOUR_LINES}","projection":"z","tasks":["section"],"arc":["t-t^3","t+t^3"]}}"#
    );
    let (code, r, _) = binary(&[], &job);
    assert_eq!(code, 0);
    assert_valid(&r);
    assert_eq!(r["section"]["report"]["branch_count"], 3);
}

#[test]
fn generic_loop_on_suspension() {
    let (code, r, _) = binary(
        &["--braids"],
        r#"{"surface":"z^2-x^3-y^3","projection":"z","tasks":["generic"]}"#,
    );
    assert_eq!(code, 0);
    assert_valid(&r);
    assert_eq!(r["generic"]["permutation"], "(1,2)");
    assert_eq!(r["generic"]["section"]["irreducible"], true);
    assert!(r["generic"]["braid"].is_string());
}

#[test]
fn invalid_jobs_exit_with_two() {
    for job in [
        r#"{"surface":"z^2-x","projection":"z","tasks":["section"]}"#,
        r#"{"surface":"z^2-x","projection":"z","tasks":[]}"#,
        r#"{"surface":"z^2-x+1","projection":"z","tasks":["generic"]}"#,
        r#"{"surface":"z^2-x","projection":"z","tasks":["section"],"arc":["t^2","t^4"]}"#,
        "not json",
    ] {
        let (code, r, _) = binary(&[], job);
        assert_eq!(code, 2, "{job}");
        assert_valid(&r);
        assert_eq!(r["exit_code"], 2);
        assert!(r["errors"].as_array().unwrap().iter().any(|e| e["code"] == "invalid_input"));
    }
}

#[test]
fn flags_override_the_job_and_are_echoed() {
    let (code, r, _) = binary(
        &["--seed", "9", "--precision-digits", "12", "--braids"],
        r#"{"surface":"z^2-x^3-y^3","projection":"z","tasks":["generic"]}"#,
    );
    assert_eq!(code, 0);
    assert_eq!(r["echo"]["seed"], 9);
    assert_eq!(r["echo"]["precision"]["working_digits"], 12);
    assert_eq!(r["echo"]["braids"], true);
    let (code, _, _) = binary(
        &["--precision-digits", "40"],
        r#"{"surface":"z^2-x^3-y^3","projection":"z","tasks":["generic"]}"#,
    );
    assert_eq!(code, 2);
}

#[test]
fn files_and_svg_output() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("job.json");
    let out = dir.path().join("report.json");
    let svg = dir.path().join("svg");
    std::fs::write(
        &job,
        format!(r#"{{"surface":"{QUARTIC}","projection":"z","tasks":["analyze","generic"]}}"#),
    )
    .unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_arcsection"))
        .args(["--in", job.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .args(["--svg", svg.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_valid(&r);
    let mut names: Vec<String> = std::fs::read_dir(&svg)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert!(names.contains(&"dual-graph.svg".to_string()));
    assert!(names.contains(&"generic-loop.svg".to_string()));
    assert!(names.iter().any(|n| n.starts_with("crossing-") && n.ends_with("loop2.svg")));
    for n in &names {
        let body = std::fs::read_to_string(svg.join(n)).unwrap();
        assert!(body.starts_with("<svg") && body.trim_end().ends_with("</svg>"), "{n}");
    }
}

#[test]
fn echo_reproduces_the_report() {
    let jobs = [
        format!(r#"{{"surface":"{QUARTIC}","projection":"z","tasks":["analyze","cone-discriminant"],"seed":4}}"#),
        r#"{"surface":"z^2-x*(x-y^2)","projection":[0,"1/3",1],"tasks":["analyze","screen-branches","tangent-cone"]}"#
            .to_string(),
        format!(r#"{{"surface":"{FOUR_LINES}","projection":"z","tasks":["section","reduce-witness"],"arc":["t","t^2+t^3"]}}"#),
    ];
    for job in jobs {
        let first: Report = run_json(&job);
        assert_valid(&serde_json::to_value(&first).unwrap());
        let echo: JobSpec = serde_json::from_value(serde_json::to_value(&first.echo).unwrap()).unwrap();
        let second = run_spec(echo);
        assert_eq!(first.without_timings(), second.without_timings(), "{job}");
    }
}

#[test]
fn tiny_step_budget_is_a_certification_failure() {
    let job = format!(
        r#"{{"surface":"{QUARTIC}","projection":"z","tasks":["analyze"],"precision":{{"step_cap":64}}}}"#
    );
    let r = run_json(&job);
    assert_valid(&serde_json::to_value(&r).unwrap());
    assert_eq!(r.verdict.as_ref().unwrap().exists_irreducible, arcsection::decide::Existence::Unknown);
    assert_eq!(r.exit_code, 3);
    assert!(r.errors.iter().any(|e| e.code == "certification"));
}
