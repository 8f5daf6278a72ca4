use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const TWO_POINT: &str = r#"{"components":[{"atom":{"at":-1.0,"w":0.5}},{"atom":{"at":1.0,"w":0.5}}]}"#;
const UNIFORM: &str = r#"{"components":[{"uniform":{"lo":-1.0,"hi":1.0,"w":1.0}}]}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_regretlab"));
    c.env_remove("REGRETLAB_THREADS");
    c
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(cmd: &mut Command) -> (i32, Vec<Value>, String) {
    let out = cmd.output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines = stdout.lines().map(|l| serde_json::from_str(l).expect(l)).collect();
    (out.status.code().unwrap(), lines, String::from_utf8(out.stderr).unwrap())
}

#[test]
fn theta_of_symmetric_noise() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "sym.json", UNIFORM);
    let (code, out, _) = run(bin().args(["theta", "--dist"]).arg(&f));
    assert_eq!(code, 0);
    assert_eq!(out.len(), 1);
    assert_eq!(out[0]["theta"].as_f64().unwrap(), 0.0);
    for key in ["v_plus", "v_minus", "side_regret_pos", "side_regret_neg", "balance_gap"] {
        assert!(out[0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn theta_of_equal_revenue_builder() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "er.json", r#"{"equal_revenue":{"c":403.4287934927351}}"#);
    let (code, out, _) = run(bin().args(["theta", "--slabs", "4000", "--dist"]).arg(&f));
    assert_eq!(code, 0);
    assert!((out[0]["theta"].as_f64().unwrap() + 0.75).abs() < 2e-3);
}

#[test]
fn malformed_instance_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"noises": [], "values": [1.0]}"#);
    let pol = write(dir.path(), "pol.json", r#"{"offset":{"thetas":[0.0]}}"#);
    let (code, out, err) = run(bin().args(["regret", "--exact", "--instance"]).arg(&bad).arg("--policy").arg(&pol));
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("error"));

    let garbage = write(dir.path(), "garbage.json", "{not json");
    let (code, _, _) = run(bin().args(["regret", "--exact", "--instance"]).arg(&garbage).arg("--policy").arg(&pol));
    assert_eq!(code, 2);
}

#[test]
fn regret_exact_and_mc_agree() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", &format!(r#"{{"noises":[{TWO_POINT},{UNIFORM}],"values":[0.3,0.0]}}"#));
    let pol = write(dir.path(), "pol.json", r#"{"offset":{"thetas":[0.0,0.0]}}"#);
    let (code, ex, _) = run(bin().args(["regret", "--exact", "--instance"]).arg(&inst).arg("--policy").arg(&pol));
    assert_eq!(code, 0);
    assert_eq!(ex[0]["kind"], "exact");
    let base = ["regret", "--mc", "50000", "--seed", "3", "--instance"];
    let (_, mc, _) = run(bin().args(base).arg(&inst).arg("--policy").arg(&pol));
    let (_, again, _) = run(bin().args(base).arg(&inst).arg("--policy").arg(&pol).env("REGRETLAB_THREADS", "1"));
    assert_eq!(mc, again, "seeded runs must not depend on the thread count");
    let (e, m, se) =
        (ex[0]["value"].as_f64().unwrap(), mc[0]["value"].as_f64().unwrap(), mc[0]["std_error"].as_f64().unwrap());
    assert!((e - m).abs() <= 4.0 * se, "{e} vs {m} ± {se}");
}

#[test]
fn bad_thread_count_exits_2() {
    let (code, _, err) = run(bin().args(["reproduce", "--example", "deterministic"]).env("REGRETLAB_THREADS", "zero"));
    assert_eq!(code, 2);
    assert!(err.contains("REGRETLAB_THREADS"));
}

#[test]
fn binary_policy_worstcase() {
    let dir = tempfile::tempdir().unwrap();
    let noise = write(dir.path(), "a.json", TWO_POINT);
    let pol = write(
        dir.path(),
        "pol.json",
        r#"{"binary":{"segments":[{"to":-1,"a":0,"b":0},{"from":-1,"to":1,"a":0.5,"b":0.5},{"from":1,"a":0,"b":1}]}}"#,
    );
    let (code, out, _) = run(bin().args(["worstcase", "--noises"]).arg(&noise).arg("--policy").arg(&pol));
    assert_eq!(code, 0);
    assert!((out[0]["regret"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-9);
}

#[test]
fn offset_worstcase_reports_exact_for_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let noises = write(dir.path(), "n.json", &format!("[{TWO_POINT},{TWO_POINT}]"));
    let pol = write(dir.path(), "pol.json", r#"{"offset":{"thetas":[0.0,0.0]}}"#);
    let (code, out, _) = run(bin()
        .args(["worstcase", "--restarts", "2", "--seed", "1", "--noises"])
        .arg(&noises)
        .arg("--policy")
        .arg(&pol));
    assert_eq!(code, 0);
    let found = out[0]["regret"]["value"].as_f64().unwrap();
    let exact = out[0]["exact_worstcase"]["regret"].as_f64().unwrap();
    assert!(found <= exact + 1e-9);
}

#[test]
fn bound_binary_and_multi() {
    let dir = tempfile::tempdir().unwrap();
    let noises = write(dir.path(), "n.json", &format!(r#"{{"noises":[{TWO_POINT},{UNIFORM}]}}"#));
    let (code, out, _) = run(bin().args(["bound", "--noises"]).arg(&noises));
    assert_eq!(code, 0);
    assert_eq!(out.len(), 2);
    assert!((out[0]["bound"].as_f64().unwrap() - 3.0 / 32.0).abs() < 1e-12);
    assert!(out.iter().all(|r| r["ratio_ok"] == true));

    let (code, out, _) = run(bin().args(["bound", "--multi", "--tol", "1e-5", "--noises"]).arg(&noises));
    assert_eq!(code, 0);
    assert!(out[0]["bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn bound_of_point_mass_fails() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", r#"{"components":[{"atom":{"at":0.5,"w":1.0}}]}"#);
    let (code, _, err) = run(bin().args(["bound", "--noises"]).arg(&f));
    assert_eq!(code, 1);
    assert!(err.contains("degenerate"));
}

#[test]
fn linearize_single_competitor() {
    let dir = tempfile::tempdir().unwrap();
    let noises =
        write(dir.path(), "n.json", &format!(r#"[{{"components":[{{"atom":{{"at":0,"w":1}}}}]}},{TWO_POINT}]"#));
    let (code, out, _) = run(bin().args(["linearize", "--noises"]).arg(&noises));
    assert_eq!(code, 0);
    let sol = &out[0]["solution"];
    assert_eq!(sol["v_star"][1].as_f64().unwrap(), -1.0);
    assert_eq!(sol["p_star"][1].as_f64().unwrap(), 0.5);
    assert_eq!(sol["b"].as_f64().unwrap(), 0.5);
    assert_eq!(sol["index_set"], serde_json::json!([1]));
    assert_eq!(out[0]["structure"]["index_set_ok"], true);

    let no_ref = write(dir.path(), "m.json", &format!("[{TWO_POINT},{TWO_POINT}]"));
    assert_eq!(run(bin().args(["linearize", "--noises"]).arg(&no_ref)).0, 2);
}

#[test]
fn reproduce_examples() {
    let (code, out, _) = run(bin().args(["reproduce", "--example", "expectation", "--c", "403.4288"]));
    assert_eq!(code, 0);
    assert_eq!(out[0]["pass"], true);
    for ex in ["deterministic", "monotone", "symmetric"] {
        let (code, out, _) = run(bin().args(["reproduce", "--example", ex]));
        assert_eq!(code, 0, "{ex}");
        assert_eq!(out[0]["pass"], true);
    }
    let (code, _, _) = run(bin().args(["reproduce", "--example", "monotone", "--alpha", "0.3"]));
    assert_eq!(code, 2);
}

#[test]
fn selftest_passes() {
    let (code, out, err) = run(bin().args(["selftest", "--seed", "5"]));
    assert_eq!(code, 0, "{err}");
    assert_eq!(out[0]["pass"], true);
}

#[test]
fn outputs_are_deterministic() {
    let args = ["reproduce", "--example", "binary24", "--count", "4", "--seed", "9"];
    let (_, a, _) = run(bin().args(args));
    let (_, b, _) = run(bin().args(args));
    assert_eq!(a, b);
}
