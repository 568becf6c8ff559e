use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ioncav_cli::config::{parse_config, to_toml};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn read_config(name: &str) -> String {
    std::fs::read_to_string(configs().join(name)).unwrap()
}

fn ioncav(dir: &Path, experiment: &str, config: &str, extra: &[&str]) -> Output {
    let path = dir.join("in.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_ioncav"))
        .arg(experiment)
        .arg("--config")
        .arg(&path)
        .args(extra)
        .output()
        .unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k]).collect()
}

#[test]
fn shipped_configs_round_trip() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let parsed = parse_config(&text).unwrap();
        assert_eq!(parse_config(&to_toml(&parsed.config)).unwrap(), parsed);
    }
}

#[test]
fn misspelled_key_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = read_config("squeeze.toml").replace("lambda1", "lamda1");
    let out = ioncav(dir.path(), "squeeze", &text, &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.starts_with("error[config]: "), "{err}");
    assert!(err.contains("did you mean `lambda1`"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn single_level_cavity_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = read_config("squeeze.toml").replace("N_cav = 64", "N_cav = 1");
    let out = ioncav(dir.path(), "squeeze", &text, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("N_cav"));
}

#[test]
fn invalid_regime_exits_with_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = read_config("squeeze.toml").replace("Delta = 3e6", "Delta = 4e5");
    let out = ioncav(dir.path(), "squeeze", &text, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).starts_with("error[precondition]: "));
}

#[test]
fn short_motional_space_exits_with_truncation_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = read_config("filter.toml")
        .replace("beta = 0.5", "beta = 3.0")
        .replace("N_vib = 32", "N_vib = 4");
    let out = ioncav(dir.path(), "filter", &text, &[]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).starts_with("error[truncation]: "));
}

#[test]
fn squeeze_final_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = ioncav(dir.path(), "squeeze", &read_config("squeeze.toml"), &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = table(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header[0], "t_seconds");
    let r = column(&header, &rows, "r");
    let rate = column(&header, &rows, "R_percent");
    assert!((r.last().unwrap() - 1.2).abs() < 1e-9);
    assert!((rate.last().unwrap() - 90.93).abs() < 0.01);
}

#[test]
fn zero_detuning_gives_flat_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let text = read_config("regimes.toml").replace(
        "delta_list = [0.0, -22.22222222222222, 5.555555555555555]",
        "delta_list = [0.0]",
    );
    let out = ioncav(dir.path(), "regimes", &text, &[]);
    let (header, rows) = table(&String::from_utf8(out.stdout).unwrap());
    let f = column(&header, &rows, "F_abs");
    assert_eq!(f.len(), 41);
    assert!(f.iter().all(|x| (x - f[0]).abs() < 1e-12 * f[0]));
    assert!(column(&header, &rows, "regime_code")
        .iter()
        .all(|&c| c == 2.0));
}

#[test]
fn filter_without_pairing_stays_dark() {
    let dir = tempfile::tempdir().unwrap();
    let text = read_config("filter.toml").replace("xi_ii = [0.0, -1000.0]", "xi_ii = 0.0");
    let out = ioncav(dir.path(), "filter", &text, &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = table(&String::from_utf8(out.stdout).unwrap());
    for name in ["n_RS", "n_RS_closed_form", "n_NS"] {
        assert!(
            column(&header, &rows, name).iter().all(|&x| x == 0.0),
            "{name}"
        );
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let text = read_config("filter.toml");
    for format in ["csv", "json"] {
        let mut results = Vec::new();
        for tag in ["a", "b"] {
            let path = dir.path().join(format!("{tag}.{format}"));
            let out = ioncav(
                dir.path(),
                "filter",
                &text,
                &["--out", path.to_str().unwrap()],
            );
            assert!(out.status.success(), "{}", stderr(&out));
            let mut files = vec![std::fs::read(&path).unwrap()];
            if format == "csv" {
                files.push(std::fs::read(dir.path().join(format!("{tag}.csv.meta.json"))).unwrap());
            }
            assert!(dir.path().join(format!("{tag}.{format}.run.json")).exists());
            results.push(files);
        }
        assert_eq!(results[0], results[1], "{format}");
    }
}

#[test]
fn json_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let text = read_config("squeeze.toml");
    let csv = ioncav(dir.path(), "squeeze", &text, &["--format", "csv"]);
    let json = ioncav(dir.path(), "squeeze", &text, &["--format", "json"]);
    let (header, rows) = table(&String::from_utf8(csv.stdout).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["columns"], serde_json::json!(header));
    assert_eq!(v["rows"][3][1].as_f64().unwrap(), rows[3][1]);
    assert_eq!(v["metadata"]["experiment"], "squeeze");
    assert_eq!(v["metadata"]["validity"]["regime"], "weak");
}

#[test]
fn sweep_stacks_runs_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = ioncav(
        dir.path(),
        "params",
        &read_config("params.toml"),
        &["--sweep", "Delta=3e6:1.2e7:4"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = table(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header[0], "sweep_system.Delta");
    assert_eq!(
        column(&header, &rows, "sweep_system.Delta"),
        vec![3e6, 6e6, 9e6, 1.2e7]
    );
    // ω_ii ∝ 1/Δ in the weak table
    let w = column(&header, &rows, "omega_ii");
    assert!((w[0] / w[3] - 4.0).abs() < 1e-12);
}

#[test]
fn explicit_experiment_must_match() {
    let dir = tempfile::tempdir().unwrap();
    let out = ioncav(dir.path(), "filter", &read_config("squeeze.toml"), &[]);
    assert_eq!(out.status.code(), Some(2));
}
