use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_reslab"))
}

fn benchmark() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/tanh1.json")
}

#[test]
fn check_passes_on_the_benchmark() {
    let out = bin().arg("check").arg(benchmark()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("passed"));
}

#[test]
fn hypothesis_failure_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let original = std::fs::read_to_string(benchmark()).unwrap();
    let above_barrier = original.replace("\"E0\": 0.5", "\"E0\": 1.5");
    let uncoupled = original.replacen("\"value\": 1.0", "\"value\": 0.0", 1);
    assert_ne!(uncoupled, original);
    for (name, text) in [("above.json", above_barrier), ("uncoupled.json", uncoupled)] {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        for args in [vec!["check"], vec!["pseudo", "--h", "0.1"]] {
            let out = bin().args(&args[..1]).arg(&path).args(&args[1..]).output().unwrap();
            assert_eq!(out.status.code(), Some(2), "{name} {args:?}");
        }
    }
}

#[test]
fn config_errors_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(benchmark()).unwrap().replacen("\"tanh\"", "\"gauss\"", 1);
    let path = dir.path().join("unknown.json");
    std::fs::write(&path, text).unwrap();
    assert_eq!(bin().arg("check").arg(&path).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("check").arg(dir.path().join("missing.json")).output().unwrap().status.code(), Some(1));
    let out = bin().args(["pseudo"]).arg(benchmark()).args(["--h", "1.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pseudo_and_shoot_print_csv() {
    for (cmd, method) in [("pseudo", "pseudo,"), ("shoot", "shooting,")] {
        let out = bin().arg(cmd).arg(benchmark()).args(["--h", "0.1"]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "method,h,n,re_E,im_E,residual,stability");
        assert_eq!(lines.len(), 7, "{cmd}: {text}");
        assert!(lines[1..].iter().all(|l| l.starts_with(method)));
    }
}

#[test]
fn sweep_writes_outputs_and_plotdata_regenerates_them() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "problem": benchmark(),
        "h_list": [0.2, 0.1],
        "methods": ["pseudo", "spectral", "shooting"],
        "output_dir": dir.path().join("out"),
    });
    let path = dir.path().join("sweep.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    let out = bin().arg("sweep").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out_dir = dir.path().join("out");
    for f in ["resonances.csv", "report.json", "scatter_h0.2.csv", "scatter_h0.1.csv", "distance_vs_h.csv", "width_ratio_vs_h.csv"] {
        assert!(out_dir.join(f).exists(), "{f} missing");
    }
    let before = std::fs::read(out_dir.join("distance_vs_h.csv")).unwrap();
    let again = dir.path().join("again");
    let out = bin().arg("plotdata").arg(out_dir.join("report.json")).arg("--out").arg(&again).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(again.join("distance_vs_h.csv")).unwrap(), before);
}
