use std::path::Path;
use std::process::{Command, Output};

fn levy(args: &[&str]) -> Output {
    levy_in(args, None)
}

fn levy_in(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_levy"));
    cmd.args(args);
    match cache {
        Some(dir) => cmd.env("LEVY_CACHE_DIR", dir),
        None => cmd.env("LEVY_CACHE_DIR", std::env::temp_dir().join("levy-cli-test-empty-cache")),
    };
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn eval_single_point() {
    let o = levy(&["eval", "--alpha", "1/2", "--x", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# levy ") && header.contains("alpha=1/2"), "{header}");
    assert_eq!(lines.next(), Some("x,g_alpha"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("1,0.2196956447338612"), "{row}");
    assert_eq!(lines.next(), None);
}

#[test]
fn eval_json() {
    let o = levy(&["eval", "--alpha", "1/3", "--x", "0.5:2:4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["columns"], serde_json::json!(["x", "g_alpha"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["meta"]["alpha"], "1/3");
}

#[test]
fn verify_char_passes() {
    let o = levy(&["verify", "--suite", "char", "--alpha", "1/3", "--tol", "1e-8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"][0]["grid"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_failure_exits_2_and_lists_it() {
    let o = levy(&["verify", "--suite", "char", "--alpha", "1/2", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], false);
    assert_eq!(v["failures"].as_array().unwrap().len(), 1);
}

#[test]
fn compose_checked_against_closed_form() {
    let o = levy(&["compose", "--alpha", "1/2", "--beta", "1/2", "--check-against", "1/4", "--tol", "1e-7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r[3] <= 1e-7));

    let o = levy(&["compose", "--alpha", "1/2", "--beta", "1/2", "--check-against", "1/4", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(2));

    let o = levy(&["compose", "--alpha", "1/2", "--beta", "1/2", "--check-against", "1/3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_indices_name_the_constraint() {
    for bad in ["2/2", "3/2", "2/4", "0/3", "x"] {
        let o = levy(&["eval", "--alpha", bad, "--x", "1"]);
        assert_eq!(o.status.code(), Some(1), "{bad}");
        let msg = stderr(&o);
        if bad != "x" {
            assert!(msg.contains("l < k") && msg.contains("gcd"), "{msg}");
        }
    }
}

#[test]
fn config_errors_exit_1() {
    for args in [
        &["eval", "--alpha", "1/2", "--bogus", "1"][..],
        &["eval", "--alpha", "1/2", "--x", "1:0:5"],
        &["eval", "--alpha", "1/2", "--x", "0:1:5log"],
        &["eval", "--alpha", "1/2", "--x", "-1"],
        &["eval", "--alpha", "1/5", "--x", "1"],
        &["subordinate", "--alpha", "1/2", "--tau", "0"],
        &["frobnicate"],
    ] {
        assert_eq!(levy(args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(levy(&["--help"]).status.code(), Some(0));
}

#[test]
fn subordinate_csv() {
    let o = levy(&["subordinate", "--alpha", "1/2", "--tau", "2", "--x", "-3:3:7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    for key in ["alpha=1/2", "tau=2", "abs_tol=", "rel_tol="] {
        assert!(header.contains(key), "{header}");
    }
    assert!(text.lines().any(|l| l == "x,p_alpha"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 7);
    for i in 0..3 {
        assert_eq!(rows[i][1], rows[6 - i][1]);
        assert!(rows[i][1] < rows[i + 1][1]);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = levy(&["compose", "--alpha", "1/2", "--beta", "1/3", "--x", "0.1:20:15log", "--output", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let fresh = levy_in(&["eval", "--alpha", "1/8", "--x", "0.01,1,100"], Some(dir.path()));
    assert_eq!(fresh.status.code(), Some(0), "{}", stderr(&fresh));

    let o = levy_in(&["cache", "save", "--alpha", "1/8"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file = dir.path().join("g-1-8.json");
    assert!(file.exists());

    let o = levy_in(&["cache", "load", "--alpha", "1/8"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["alpha"], "1/8");

    let cached = levy_in(&["eval", "--alpha", "1/8", "--x", "0.01,1,100"], Some(dir.path()));
    assert_eq!(cached.stdout, fresh.stdout);

    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(&file, text.replacen("\"u_lo\": -", "\"u_lo\": -1", 1)).unwrap();
    let o = levy_in(&["eval", "--alpha", "1/8", "--x", "1"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("checksum"), "{}", stderr(&o));

    let o = levy_in(&["cache", "save", "--alpha", "1/2"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1));
}
