use std::path::{Path, PathBuf};
use std::process::Command;

fn cwave(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cwave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(mode: &str, config: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec![
        mode,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = cwave(&args);
    if !o.status.success() {
        eprintln!("{}", String::from_utf8_lossy(&o.stderr));
    }
    o.status.code().unwrap()
}

fn json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const RADIAL: &str = r#"
[potential]
class = "A1"
symmetry = "radial"
unknown = { type = "gaussian", amplitude = 0.3 }

[geometry]
receiver = "origin"
t_max = 4.0
samples = 64

[solver]
n = 256

[inversion]
n = 64
"#;

#[test]
fn zero_potential_forward_gives_zero_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "zero.toml", "[geometry]\nsamples = 16\n");
    assert_eq!(run("forward", &cfg, &dir.path().join("out"), &[]), 0);
    let csv = std::fs::read_to_string(dir.path().join("out/trace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,u1_reg,u2_reg"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 16);
    for row in rows {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(&cols[1..], &[0.0, 0.0]);
    }
    let meta = json(dir.path().join("out/trace.json"));
    assert_eq!(meta["receiver"], "origin");
    assert_eq!(meta["extra"]["config"]["solver"]["n"], 256);
}

#[test]
fn geomcheck_matches_analytic_area() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.toml",
        "[geomcheck]\ntwo_tau = 2.0\nn_phi = 64\nn_theta = 128\n",
    );
    assert_eq!(run("geomcheck", &cfg, dir.path(), &[]), 0);
    let v = json(dir.path().join("geomcheck.json"));
    assert!(v["check"]["area_rel_residual"].as_f64().unwrap() < 1e-8);
    assert!((v["check"]["area_exact"].as_f64().unwrap() - 10.411).abs() < 1e-3);
}

#[test]
fn identity_run_closes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "i.toml",
        "[potential]\nunknown = { type = \"constant\", value = 0.1 }\n[identity]\ntau = 0.5\nn = 512\n",
    );
    assert_eq!(run("identity", &cfg, dir.path(), &[]), 0);
    let v = json(dir.path().join("identity.json"));
    assert!(v["identity"]["rel_residual"].as_f64().unwrap() <= 1e-3);
    assert!(v["audit"].is_null());
}

#[test]
fn round_trip_recovers_configured_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.toml", RADIAL);
    assert_eq!(run("invert", &cfg, &dir.path().join("ls"), &[]), 0);
    let v = json(dir.path().join("ls/report.json"));
    assert!(v["reference_sup_error"].as_f64().unwrap() <= 1e-2, "{v}");
    assert!(dir.path().join("ls/profile.csv").is_file());

    // forward to a file, then invert that file with Gauss–Newton
    assert_eq!(run("forward", &cfg, &dir.path().join("fw"), &[]), 0);
    let body = format!(
        "{RADIAL}method = \"gauss_newton\"\ntrace = \"{}\"\n",
        dir.path().join("fw/trace.csv").display()
    );
    let cfg = write_config(dir.path(), "gn.toml", &body);
    assert_eq!(run("invert", &cfg, &dir.path().join("gn"), &[]), 0);
    let v = json(dir.path().join("gn/report.json"));
    assert_eq!(v["report"]["method"], "gauss_newton");
    assert!(v["report"]["misfit_sup"].as_f64().unwrap() < 1e-6);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{RADIAL}\n[inversion.noise]\nsigma = 1e-4\nseed = 11\n");
    let cfg = write_config(dir.path(), "d.toml", &body);
    for (k, threads) in ["1", "3"].iter().enumerate() {
        assert_eq!(
            run(
                "invert",
                &cfg,
                &dir.path().join(format!("o{k}")),
                &["--threads", threads]
            ),
            0
        );
        assert_eq!(
            run(
                "forward",
                &cfg,
                &dir.path().join(format!("f{k}")),
                &["--threads", threads]
            ),
            0
        );
    }
    for f in [
        "o0/report.json",
        "o0/profile.csv",
        "f0/trace.csv",
        "f0/trace.json",
    ] {
        let other = f.replacen('0', "1", 1);
        assert_eq!(
            std::fs::read(dir.path().join(f)).unwrap(),
            std::fs::read(dir.path().join(other)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn validation_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cases = [
        ("syntax", "[potential\n"),
        ("unknown_key", "[geometry]\nhorizon = 3.0\n"),
        ("focus_short", "[potential]\nsymmetry = \"ellipsoidal\"\n[geometry]\nreceiver = \"focus\"\nt_max = 1.0\n"),
        ("eta", "[geometry]\nt_max = 3.0\n[solver]\neta_max = 2.0\n"),
        ("missing_file", "[potential]\nunknown = { type = \"csv\", path = \"nope.csv\" }\n"),
        ("mismatch", "mode = \"identity\"\n"),
        ("a2_without_prescribed", "[potential]\nclass = \"A2\"\n"),
    ];
    for (name, body) in cases {
        let cfg = write_config(dir.path(), &format!("{name}.toml"), body);
        assert_eq!(run("forward", &cfg, &out, &[]), 2, "{name}");
    }
    assert_eq!(
        cwave(&["forward", "--config", "/nonexistent/cfg.toml"])
            .status
            .code(),
        Some(2)
    );
    assert!(!out.join("error.json").exists());
}

#[test]
fn numerical_failures_exit_with_3_and_write_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "general.toml",
        "[potential]\nclass = \"General\"\n[inversion]\nn = 8\n",
    );
    let out = dir.path().join("out");
    assert_eq!(run("invert", &cfg, &out, &[]), 3);
    let v = json(out.join("error.json"));
    assert_eq!(v["error"], "ClassUnderdetermined");

    // inversion grid finer than the sampled trace
    let cfg = write_config(dir.path(), "grid.toml", &RADIAL.replace("n = 64", "n = 96"));
    assert_eq!(run("invert", &cfg, &out, &[]), 3);
    assert_eq!(json(out.join("error.json"))["error"], "InvalidGrid");
}

#[test]
fn csv_profiles_resolve_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.csv"), "r,b\n0,0.2\n1,0.1\n2,0.0\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "[potential]\nunknown = { type = \"csv\", path = \"b.csv\" }\n[geometry]\nsamples = 8\n",
    );
    assert_eq!(run("forward", &cfg, &dir.path().join("o"), &[]), 0);
}
