use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driven-dicke")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["spectrum", "sweep", "dynamics", "symmetry", "rates"] {
        assert!(text.contains(cmd), "{cmd} missing from usage");
    }
    assert_eq!(run(&["sweep", "--help"]).status.code(), Some(0));
}

#[test]
fn unknown_flag_exits_two() {
    assert_eq!(run(&["spectrum", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn invalid_config_exits_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out_str = out_dir.to_string_lossy().into_owned();
    let cfg = write_config(dir.path(), "[model]\nn = 0\n");
    let out = run(&["spectrum", "--config", &cfg, "--out", &out_str]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());
    let cfg = write_config(dir.path(), "[model\nn = 2\n");
    assert_eq!(run(&["spectrum", "--config", &cfg, "--out", &out_str]).status.code(), Some(2));
    assert!(!out_dir.exists());
    assert_eq!(run(&["spectrum"]).status.code(), Some(2));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[model]\nn = 3\nomega = 2.0\n[disorder]\nkind = \"gaussian\"\nscale = 10.0\nseed = 1\n\
                [dynamics]\nt_min = 0.0\nt_max = 10.0\nsamples = 101\ngrid = \"linear\"\ninitial = \"excited\"\n\
                fit_window = { t_min = 0.5, t_max = 10.0 }\n";
    let cfg = write_config(dir.path(), body);
    let out = dir.path().join("out").to_string_lossy().into_owned();
    let mut first = Vec::new();
    for _ in 0..2 {
        for cmd in ["spectrum", "dynamics", "rates"] {
            let o = run(&[cmd, "--config", &cfg, "--out", &out, "--seed", "42"]);
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        }
        let files: Vec<Vec<u8>> = ["spectrum.json", "spectrum.csv", "trace.csv", "fits.json", "rates.json"]
            .iter()
            .map(|f| std::fs::read(dir.path().join("out").join(f)).unwrap())
            .collect();
        if first.is_empty() {
            first = files;
        } else {
            assert_eq!(first, files);
        }
    }
    let json: serde_json::Value = serde_json::from_slice(&first[0]).unwrap();
    assert_eq!(json["config"]["seed"], 42);
    assert_eq!(json["config"]["detunings"].as_array().unwrap().len(), 3);
    assert!(json["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn symmetry_and_sweep_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[model]\nn = 3\n[disorder]\nkind = \"equidistant\"\ndelta_omega = 1.0\n\
                [sweep]\nomega = { values = [0.5, 50.0] }\ndelta_omega = { values = [0.0, 2.0] }\n";
    let cfg = write_config(dir.path(), body);
    let out = dir.path().join("out");
    let out_s = out.to_string_lossy().into_owned();
    assert_eq!(run(&["symmetry", "--config", &cfg, "--out", &out_s]).status.code(), Some(0));
    assert!(std::fs::read_to_string(out.join("symmetry.txt")).unwrap().contains("D_3"));
    let o = run(&["sweep", "--config", &cfg, "--out", &out_s, "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("omega_drive,delta_omega,re_lambda1,im_lambda1,subradiant_count,errors"));
    assert_eq!(lines.count(), 4);
}
