use std::path::Path;

use vds::experiment::{
    cmd_density, cmd_reconstruct, cmd_scheme, run_benchmark, BenchmarkTable, ExperimentConfig,
    Overrides, PreparedScheme,
};
use vds::grid::RealGrid;
use vds::sampler_tsp::Trajectory;
use vds::scheme::SamplingScheme;
use vds::VdsError;

const BASE: &str = r#"
dims = [16, 16]
sampling_ratio = 4.0
m1_fraction = 0.1
trials = 2
seed = 3

[wavelet]
levels = 2
family = { kind = "haar" }

[reconstruction]
max_iter = 200
"#;

fn config(schemes: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(&format!("{BASE}\n{schemes}"), Path::new(".")).unwrap()
}

const ALL_KINDS: &str = r#"
[[schemes]]
name = "iid"
kind = "iid"
density = { kind = "optimal" }
[[schemes]]
name = "mixed"
kind = "mixed"
density = { kind = "polynomial", exponent = 1.0 }
[[schemes]]
name = "markov"
kind = "markov"
alpha = 0.05
periodic = true
density = { kind = "polynomial", exponent = 2.0 }
[[schemes]]
name = "tsp"
kind = "tsp"
density = { kind = "polynomial", exponent = 2.0 }
[[schemes]]
name = "spiral"
kind = "spiral"
[[schemes]]
name = "radial"
kind = "radial"
[[schemes]]
name = "radial_random"
kind = "radial_random"
"#;

#[test]
fn every_scheme_is_calibrated_to_m() {
    let cfg = config(ALL_KINDS);
    let model = cfg.model().unwrap();
    assert_eq!(cfg.target_m(), 64);
    for spec in &cfg.schemes {
        let prepared = PreparedScheme::new(spec, &cfg, &model).unwrap();
        for seed in 0..3 {
            let s = prepared.draw(seed).unwrap();
            s.check_invariants().unwrap();
            assert_eq!(s.m(), 64, "{}", spec.name);
        }
    }
}

#[test]
fn config_errors_are_reported() {
    let bad = |text: &str| match ExperimentConfig::from_toml_str(text, Path::new(".")) {
        Err(VdsError::Config(_)) => {}
        other => panic!("expected a config error, got {other:?}"),
    };
    bad(&BASE.replace("sampling_ratio = 4.0", "sampling_ratio = 1.0"));
    bad(&BASE.replace("trials = 2", "trials = 0"));
    bad(&BASE.replace("[16, 16]", "[16, 12]"));
    bad(&format!("{BASE}\nunknown_key = 1"));
    bad(&format!(
        "{BASE}\n[phantom]\nkind = \"file\"\npath = \"missing.vdsg\""
    ));
    bad(&format!("{BASE}{}", "[[schemes]]\nname = \"a\"\nkind = \"radial\"\n[[schemes]]\nname = \"a\"\nkind = \"radial\"\n"));
    bad(&format!("{BASE}{}", "[[schemes]]\nname = \"m\"\nkind = \"markov\"\nalpha = 2.0\ndensity = { kind = \"uniform\" }\n"));
}

#[test]
fn config_round_trips_through_toml() {
    let cfg = ExperimentConfig::from_toml_str(&format!("{BASE}\n{ALL_KINDS}"), Path::new("/data"))
        .unwrap();
    assert_eq!(cfg.output_dir, Path::new("/data/out"));
    let text = cfg.to_toml_string().unwrap();
    let back = ExperimentConfig::from_toml_str(&text, Path::new("/")).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn full_sampling_gives_the_sentinel() {
    let mut cfg = config("[[schemes]]\nname = \"full\"\nkind = \"full\"\n");
    cfg.trials = 1;
    let table = run_benchmark(&cfg).unwrap();
    let row = table.row("full").unwrap();
    assert_eq!(row.mean_psnr, f64::INFINITY);
    assert_eq!(row.max_psnr, f64::INFINITY);
    assert_eq!(row.converged, 1);
}

#[test]
fn benchmark_is_deterministic() {
    let cfg = config(ALL_KINDS);
    let a = run_benchmark(&cfg).unwrap().to_csv();
    let b = run_benchmark(&cfg).unwrap().to_csv();
    assert_eq!(a, b);
    assert_eq!(BenchmarkTable::from_csv(&a).unwrap().to_csv(), a);
    let reseeded = run_benchmark(&cfg.clone().with_overrides(&Overrides {
        seed: Some(4),
        out: None,
    }))
    .unwrap()
    .to_csv();
    assert_ne!(a, reseeded);
}

#[test]
fn written_files_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(ALL_KINDS).with_overrides(&Overrides {
        seed: None,
        out: Some(dir.path().to_path_buf()),
    });
    for path in cmd_density(&cfg).unwrap() {
        if path.extension().unwrap() == "vdsg" {
            let g = RealGrid::load(&path).unwrap();
            assert_eq!(RealGrid::from_vdsg_bytes(&g.to_vdsg_bytes()).unwrap(), g);
        }
    }
    let files = cmd_scheme(&cfg).unwrap();
    let mut curves = 0;
    for path in &files {
        let text = std::fs::read_to_string(path).unwrap();
        let name = path.file_name().unwrap().to_str().unwrap();
        if name.ends_with(".scheme.json") {
            let s = SamplingScheme::from_json(&text).unwrap();
            assert_eq!(SamplingScheme::from_json(&s.to_json().unwrap()).unwrap(), s);
        } else if name.ends_with(".trajectory.csv") {
            let t = Trajectory::from_csv(&text).unwrap();
            assert_eq!(Trajectory::from_csv(&t.to_csv()).unwrap().to_csv(), text);
            curves += 1;
        } else {
            assert!(text.starts_with("P1\n16 16\n"), "{name}");
        }
    }
    assert_eq!(curves, 2);
    match cmd_reconstruct(&cfg) {
        Err(VdsError::NotConverged { .. }) | Ok(_) => {}
        Err(e) => panic!("{e}"),
    }
    assert!(dir.path().join("tsp.recon.vdsg").exists());
    assert!(dir.path().join("tsp.metrics.json").exists());
}
