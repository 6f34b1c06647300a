use std::path::Path;
use std::process::Command;

const CONFIG: &str = r#"
dims = [16, 16]
sampling_ratio = 4.0
trials = 2
seed = 1
output_dir = "out"

[wavelet]
levels = 2
family = { kind = "haar" }

[reconstruction]
max_iter = 5000
tol_fixed_point = 1e-4

[[schemes]]
name = "iid"
kind = "iid"
density = { kind = "optimal" }
"#;

fn vds(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_vds"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn subcommands_write_their_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    for cmd in ["density", "scheme", "reconstruct", "benchmark"] {
        let out = vds(&[cmd, "--config", &cfg, "--threads", "1"]);
        assert!(
            out.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = dir.path().join("out");
    for f in [
        "density.vdsg",
        "density.json",
        "iid.scheme.json",
        "iid.pbm",
        "iid.recon.vdsg",
        "benchmark.csv",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn seed_and_out_flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let run = |seed: &str, out: &str| {
        let target = dir.path().join(out);
        let o = vds(&[
            "benchmark",
            "--config",
            &cfg,
            "--seed",
            seed,
            "--out",
            target.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read(target.join("benchmark.csv")).unwrap()
    };
    let a = run("9", "a");
    assert_eq!(a, run("9", "b"));
    assert_ne!(a, run("10", "c"));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &CONFIG.replace("sampling_ratio = 4.0", "sampling_ratio = 0.5"),
    );
    let out = vds(&["density", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sampling_ratio"));
    assert_eq!(
        vds(&["density", "--config", "/nonexistent.toml"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(vds(&["density"]).status.code(), Some(1));
}

#[test]
fn non_convergence_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = CONFIG
        .replace("max_iter = 5000", "max_iter = 2")
        .replace("tol_fixed_point = 1e-4", "tol_fixed_point = 1e-12");
    let cfg = write_config(dir.path(), &text);
    assert_eq!(
        vds(&["reconstruct", "--config", &cfg]).status.code(),
        Some(2)
    );
}
