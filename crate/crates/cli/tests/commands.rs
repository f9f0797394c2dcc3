#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;

use anameter::render::parse_csv_table;
use anameter::{default_taxonomy, save_evaluation, Evaluation, Mode};
use anameter_cli::{run, EXIT_IO, EXIT_NO_SCORE, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};
use serde_json::Value;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(dir: &Path, args: &[&str]) -> Out {
    let mut argv = vec!["anameter", "--data-dir", dir.to_str().unwrap()];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, e: &Evaluation) -> String {
    let path = dir.join(name);
    std::fs::write(&path, save_evaluation(e)).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn init_creates_an_empty_grid_once() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["init", "GPS-Nav", "alice", "adaptability"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(dir.path().join("gps-nav-alice-adaptability.json").is_file());

    let json = cli(dir.path(), &["--format", "json", "score", "gps-nav-alice-adaptability"]);
    assert_eq!(json.code, EXIT_OK);
    let v: Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(v["degrees"]["global"]["percent"], 0.0);

    let again = cli(dir.path(), &["init", "GPS-Nav", "alice", "adaptability"]);
    assert_eq!(again.code, EXIT_IO);
    assert!(again.stderr.contains("already exists"));
}

#[test]
fn init_with_unknown_taxonomy_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["--taxonomy", "missing@9", "init", "S", "e", "adaptivity"]);
    assert_eq!(out.code, EXIT_VALIDATION);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn usage_errors_and_help() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(dir.path(), &["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(cli(dir.path(), &["init", "only-system"]).code, EXIT_USAGE);
    assert_eq!(cli(dir.path(), &["--format", "xml", "score", "x"]).code, EXIT_USAGE);
    assert_eq!(cli(dir.path(), &["init", "S", "e", "sometimes"]).code, EXIT_USAGE);
    let help = cli(dir.path(), &["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("compare"));
}

#[test]
fn worked_example_score_in_every_format() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "worked.json", &common::worked_example());

    let md = cli(dir.path(), &["score", &f]);
    assert_eq!(md.code, EXIT_OK);
    assert!(md.stdout.contains("| AA | 20.83 % | 27.08 % | 19.79 % | **22.57 %** |"), "{}", md.stdout);

    let json = cli(dir.path(), &["--format", "json", "score", "worked"]);
    let v: Value = serde_json::from_str(&json.stdout).unwrap();
    let ga = v["degrees"]["global"]["percent"].as_f64().unwrap();
    assert!((ga - 22.569444444444443).abs() < 1e-9);
    assert_eq!(v["rounded"]["global"], 22.57);

    let csv = cli(dir.path(), &["--format", "csv", "--decimals", "1", "score", "worked.json"]);
    assert!(csv.stdout.contains("AA,20.8,27.1,19.8,22.6"), "{}", csv.stdout);
}

#[test]
fn all_na_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let t = default_taxonomy();
    let mut e = Evaluation::new(&t, "Nothing", "bob", Mode::Adaptivity);
    for (_, sa) in t.sub_aspects() {
        for (_, sf) in t.sub_factors() {
            e.set_na(&t, &sa.id, &sf.id, true).unwrap();
        }
    }
    let f = write(dir.path(), "na.json", &e);
    let out = cli(dir.path(), &["score", &f]);
    assert_eq!(out.code, EXIT_NO_SCORE);
    assert!(out.stderr.contains("no score"));

    // Still a valid document.
    assert_eq!(cli(dir.path(), &["validate", &f]).code, EXIT_OK);

    std::fs::write(dir.path().join("broken.json"), "{ not json").unwrap();
    assert_eq!(cli(dir.path(), &["score", "broken"]).code, EXIT_VALIDATION);
    assert_eq!(cli(dir.path(), &["score", "absent.json"]).code, EXIT_IO);
}

#[test]
fn validate_reports_dangling_ids_and_bad_taxonomies() {
    let dir = tempfile::tempdir().unwrap();
    let text = common::WORKED_JSON.replace("\"myopia\"", "\"astigmatism\"");
    std::fs::write(dir.path().join("bad.json"), text).unwrap();
    let out = cli(dir.path(), &["validate", "bad"]);
    assert_eq!(out.code, EXIT_VALIDATION);
    assert!(out.stderr.contains("astigmatism"), "{}", out.stderr);

    let tax = String::from_utf8(anameter::save_taxonomy(&default_taxonomy())).unwrap();
    std::fs::write(dir.path().join("tax.json"), &tax).unwrap();
    let ok = cli(dir.path(), &["validate", "tax.json"]);
    assert_eq!(ok.code, EXIT_OK, "{}", ok.stderr);
    assert!(ok.stdout.contains("96 micro-grids"));

    let dup = tax.replacen("\"control\"", "\"presentation\"", 1);
    std::fs::write(dir.path().join("dup.json"), dup).unwrap();
    let out = cli(dir.path(), &["validate", "dup.json"]);
    assert_eq!(out.code, EXIT_VALIDATION);
    assert!(out.stderr.contains("presentation"), "{}", out.stderr);
}

#[test]
fn compare_with_self_and_with_empty_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "worked.json", &common::worked_example());
    let same = cli(dir.path(), &["compare", &f, &f]);
    assert_eq!(same.code, EXIT_OK);
    assert!(same.stdout.contains("No differences."));

    let t = default_taxonomy();
    let empty = Evaluation::new(&t, "Worked example", "baseline", Mode::Adaptability);
    let b = write(dir.path(), "empty.json", &empty);
    let out = cli(dir.path(), &["--format", "json", "compare", &b, &f]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert!((v["global"]["delta"].as_f64().unwrap() - 22.569444444444443).abs() < 1e-9);

    let other_mode = Evaluation::new(&t, "Worked example", "x", Mode::Adaptivity);
    let m = write(dir.path(), "adaptivity.json", &other_mode);
    assert_eq!(cli(dir.path(), &["compare", &m, &f]).code, EXIT_VALIDATION);
}

#[test]
fn merge_of_one_equals_score() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "worked.json", &common::worked_example());
    let scored = cli(dir.path(), &["--format", "csv", "score", &f]);
    let merged = cli(dir.path(), &["--format", "csv", "merge", &f]);
    assert_eq!(merged.code, EXIT_OK);
    assert_eq!(scored.stdout, merged.stdout);

    let s: Value = serde_json::from_str(&cli(dir.path(), &["--format", "json", "score", &f]).stdout).unwrap();
    let m: Value = serde_json::from_str(&cli(dir.path(), &["--format", "json", "merge", &f]).stdout).unwrap();
    assert_eq!(s["degrees"], m["degrees"]);

    assert_eq!(cli(dir.path(), &["merge", &f, &f]).code, EXIT_VALIDATION);
}

#[test]
fn export_csv_round_trips_the_la_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "worked.json", &common::worked_example());
    let target = dir.path().join("out.csv");
    let out = cli(dir.path(), &["--format", "csv", "export", &f, "--output", target.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let table = parse_csv_table(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let rows = ["User", "Interaction platform", "Environment", "Activity"];
    let cols = ["Presentation", "Control", "Abstraction"];
    for (r, row) in rows.iter().enumerate() {
        for (c, col) in cols.iter().enumerate() {
            let got = table.cell(row, col).unwrap().unwrap();
            assert!((got - common::WORKED_LA[r][c]).abs() < 0.005, "{row}/{col}");
        }
    }
}

#[test]
fn extra_taxonomy_in_data_dir() {
    let dir = tempfile::tempdir().unwrap();
    let custom = dir.path().join("taxonomies");
    std::fs::create_dir(&custom).unwrap();
    let mut t = default_taxonomy();
    t.version = "1.1".into();
    std::fs::write(custom.join("v11.json"), anameter::save_taxonomy(&t)).unwrap();
    let out = cli(dir.path(), &["--taxonomy", "anameter@1.1", "init", "Sys", "eve", "adaptivity"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("sys-eve-adaptivity.json")).unwrap()).unwrap();
    assert_eq!(v["taxonomy"]["version"], "1.1");
    assert_eq!(cli(dir.path(), &["score", "sys-eve-adaptivity"]).code, EXIT_OK);
}

#[test]
fn binary_reads_data_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_anameter"))
        .args(["init", "Env", "dana", "adaptability"])
        .env("ANAMETER_DATA_DIR", dir.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(dir.path().join("env-dana-adaptability.json").is_file());

    let usage = std::process::Command::new(env!("CARGO_BIN_EXE_anameter")).output().unwrap();
    assert_eq!(usage.status.code(), Some(EXIT_USAGE));
}
