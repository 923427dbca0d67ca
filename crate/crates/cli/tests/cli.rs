use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn rotrap(args: &[&str]) -> Output {
    rotrap_env(args, &[])
}

fn rotrap_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rotrap"));
    c.args(args).env_remove("ROTRAP_THREADS").env_remove("RUST_LOG");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("spawn rotrap")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rotrap-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn bifurcation_reports_critical_omega() {
    let v = json(&rotrap(&["-q", "bifurcation"]));
    let w = v["result"]["omega_c"].as_f64().unwrap();
    assert!((w - 3.026037).abs() < 1e-4, "{w}");
    assert_eq!(v["units"]["omega_c"], "1/time");
}

#[test]
fn optimum_in_fast_regime() {
    let v = json(&rotrap(&["-q", "optimum", "--omega", "1e9", "--eps", "1e-3"]));
    assert_eq!(v["result"]["regime"], "fast");
    let r = v["result"]["r0_opt"].as_f64().unwrap();
    assert!((r - 0.70686).abs() < 1e-3, "{r}");
}

#[test]
fn csv_has_hash_header_and_format_toggles() {
    let o = rotrap(&["-q", "mass-curve", "--omega", "2", "--points", "4"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let mut lines = s.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("# rotrap"), "{head}");
    assert!(head.contains("r0 [length]"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split(',').count() == 3));

    let v = json(&rotrap(&["-q", "--format", "json", "mass-curve", "--omega", "2", "--points", "4"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);

    let c = stdout(&rotrap(&["-q", "--format", "csv", "bifurcation"]));
    assert!(c.starts_with('#'));
    assert_eq!(c.lines().count(), 2);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["no-such-command"],
        vec!["optimum", "--eps", "1.5"],
        vec!["optimum", "--omega", "abc"],
        vec!["mass-curve", "--points", "1"],
        vec!["--config", "/nonexistent/rotrap.conf", "bifurcation"],
    ] {
        let o = rotrap(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn numerical_failure_exits_1() {
    let o = rotrap(&["bifurcation", "--bracket", "4", "6"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(rotrap(&["--help"]).status.code(), Some(0));
    assert_eq!(rotrap(&["--version"]).status.code(), Some(0));
}

#[test]
fn config_precedence_and_echo() {
    let cfg = temp_file("prec.conf", "# trap settings\nomega = 7\neps = 0.002\nunused_key = 1\n");
    let cfg = cfg.to_str().unwrap();
    let o = rotrap(&["--config", cfg, "optimum", "--omega", "5"]);
    let err = stderr(&o);
    let v = json(&o);
    assert_eq!(v["result"]["omega"].as_f64(), Some(5.0));
    assert_eq!(v["result"]["eps"].as_f64(), Some(0.002));
    assert!(err.contains("resolved omega = 5 (flag)"), "{err}");
    assert!(err.contains("resolved eps = 0.002 (config)"), "{err}");
    assert!(err.contains("unused-key"), "{err}");

    let q = rotrap(&["-q", "--config", cfg, "optimum"]);
    assert!(!stderr(&q).contains("resolved"));
    assert_eq!(json(&q)["result"]["omega"].as_f64(), Some(7.0));

    let bad = temp_file("bad.conf", "omega 7\n");
    let o = rotrap(&["--config", bad.to_str().unwrap(), "optimum"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn threads_from_env_flag_and_config() {
    let args = ["-q", "simulate", "interval", "--agents", "40", "--points", "5"];
    let o = rotrap_env(&["simulate", "interval", "--agents", "1", "--x", "0.1"], &[("ROTRAP_THREADS", "2")]);
    assert!(stderr(&o).contains("resolved threads = 2 (env)"), "{}", stderr(&o));
    let cfg = temp_file("thr.conf", "threads = 3\n");
    let o = rotrap_env(
        &["--config", cfg.to_str().unwrap(), "simulate", "interval", "--agents", "1", "--x", "0.1"],
        &[("ROTRAP_THREADS", "2")],
    );
    assert!(stderr(&o).contains("resolved threads = 3 (config)"), "{}", stderr(&o));

    let base = rotrap(&args);
    let env = rotrap_env(&args, &[("ROTRAP_THREADS", "3")]);
    let mut flag_args = vec!["--threads", "1"];
    flag_args.extend_from_slice(&args);
    let flag = rotrap(&flag_args);
    assert!(base.status.success());
    assert_eq!(base.stdout, env.stdout);
    assert_eq!(base.stdout, flag.stdout);
}

#[test]
fn disk_simulation_is_byte_identical_across_runs() {
    let args = ["-q", "simulate", "disk", "--agents", "20", "--grid", "3", "--dl", "0.05", "--seed", "4"];
    let a = rotrap(&args);
    let b = rotrap(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    assert!(s.starts_with("# rotrap"));
    assert!(s.lines().count() > 1);
}

#[test]
fn output_file_matches_stdout() {
    let p = std::env::temp_dir().join(format!("rotrap-out-{}.csv", std::process::id()));
    let o = rotrap(&["-q", "-o", p.to_str().unwrap(), "mass-curve", "--points", "3"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let direct = rotrap(&["-q", "mass-curve", "--points", "3"]);
    assert_eq!(fs::read(&p).unwrap(), direct.stdout);
    let _ = fs::remove_file(p);
}
