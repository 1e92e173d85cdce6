use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn maslov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maslov")).args(args).output().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn jump_search_worked_problem() {
    let o = maslov(&["jump-search", "--input", &data("worked_problem.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["certificate"]["n"], 10, "{v}");
}

#[test]
fn theorem_r6_exit_codes() {
    let ok = maslov(&["theorem-r6", "--input", &data("scenario_r6.json")]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    for bad in ["hyperbolic_r6.json", "saddle_r6.json"] {
        let o = maslov(&["theorem-r6", "--input", &data(bad)]);
        assert_eq!(o.status.code(), Some(2), "{bad}");
    }
}

#[test]
fn input_errors_exit_3() {
    let dir = std::env::temp_dir().join(format!("maslov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("broken.json");
    std::fs::write(&f, r#"{"schema": 1, "records": [{"label": "x", "n": 2, "descriptor": {"p_minus": 1}, "tau": "1"}]}"#).unwrap();
    let o = maslov(&["jump-search", "--input", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("records[0].i1"));
    assert_eq!(maslov(&["no-such-command"]).status.code(), Some(3));
}

#[test]
fn oracle_i1_ellipsoid() {
    let o = maslov(&["oracle-i1", "--input", &data("ellipsoid_r6.json"), "--orbit", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["i1"], 7);
}
