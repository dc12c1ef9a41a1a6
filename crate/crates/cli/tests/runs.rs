use std::process::Command;

use hdlss_tda::persistence::Filtration;
use hdlss_tda_cli::report::records_to_csv;
use hdlss_tda_cli::{
    emit_report, run, run_curse, run_eigengap, run_mitigation, CliError, Experiment, ExperimentConfig, Format,
    ShapeKind,
};

fn small(experiment: Experiment) -> ExperimentConfig {
    ExperimentConfig {
        experiment,
        n: 12,
        d_grid: vec![50, 500],
        reps: 3,
        seed: 7,
        ..ExperimentConfig::default()
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { out: dir.path().to_path_buf(), ..small(Experiment::Curse) };
    let a = std::fs::read(emit_report(&run(&cfg).unwrap(), Format::Csv).unwrap()).unwrap();
    let b = std::fs::read(emit_report(&run(&cfg).unwrap(), Format::Csv).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = ExperimentConfig { seed: 8, ..cfg.clone() };
    assert_ne!(records_to_csv(&run(&other).unwrap().records).unwrap().as_bytes(), &a[..]);
}

#[test]
fn records_are_traceable() {
    let cfg = small(Experiment::Curse);
    let report = run_curse(&cfg).unwrap();
    // 2 grid points x 3 seeds x 2 degrees x (2 distances + 2 persistence stats)
    assert_eq!(report.records.len(), 2 * 3 * 2 * 4);
    for d in &cfg.d_grid {
        let seeds: std::collections::BTreeSet<u64> = report.records.iter().filter(|r| r.d == *d).map(|r| r.seed).collect();
        assert_eq!(seeds.len(), 3);
    }
    assert!(report.aggregate.per_d[0].normalized.contains_key("degree0/bottleneck_over_sqrt_d"));
}

#[test]
fn zero_original_cloud_makes_compression_equal_noise_compression() {
    let cfg = ExperimentConfig { shape: ShapeKind::Zeros, ..small(Experiment::Mitigation) };
    let report = run_mitigation(&cfg).unwrap();
    let pair = |target: &str, metric: &str, degree: usize| -> Vec<f64> {
        report
            .records
            .iter()
            .filter(|r| r.target_pair == target && r.metric == metric && r.degree == Some(degree))
            .map(|r| r.value.as_f64())
            .collect()
    };
    for degree in [0, 1] {
        assert!(pair("compressed_vs_compressed_noise", "bottleneck", degree).iter().all(|&v| v == 0.0));
        assert!(pair("compressed_vs_compressed_noise", "hausdorff", degree).iter().all(|&v| v == 0.0));
    }
}

#[test]
fn cech_curse_grows_like_sqrt_d() {
    let cfg = ExperimentConfig {
        n: 6,
        s: 5,
        shape: ShapeKind::UniformSquare,
        filtration: Filtration::Cech,
        d_grid: vec![100, 1600, 25_600],
        degrees: vec![0, 1],
        reps: 5,
        ..small(Experiment::Curse)
    };
    let report = run_curse(&cfg).unwrap();
    for degree in [0, 1] {
        let key = format!("degree{degree}/bottleneck/original_vs_observed");
        let scaled: Vec<f64> = cfg
            .d_grid
            .iter()
            .map(|&d| report.median(d, &key).unwrap().as_f64() / (d as f64).sqrt())
            .collect();
        let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0_f64), |(l, h), &v| (l.min(v), h.max(v)));
        assert!(hi <= 2.0 * lo, "degree {degree}: {scaled:?}");
    }
}

#[test]
fn mitigation_rejects_cech() {
    let cfg = ExperimentConfig { filtration: Filtration::Cech, ..small(Experiment::Mitigation) };
    assert!(matches!(run_mitigation(&cfg), Err(CliError::Unsupported(_))));
}

#[test]
fn resource_guard_fires_before_work() {
    let cfg = ExperimentConfig { n: 500, degrees: vec![1], max_simplices: 1_000_000, ..small(Experiment::Curse) };
    let err = run_curse(&cfg).unwrap_err();
    assert!(matches!(err, CliError::Resource(_)));
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("20833750"), "{err}");
}

#[test]
fn eigengap_run_fits_when_grid_is_long_enough() {
    let cfg = ExperimentConfig { n: 5, d_grid: vec![20, 80, 320, 1280], reps: 60, ..small(Experiment::Eigengap) };
    let report = run_eigengap(&cfg).unwrap();
    let means: Vec<f64> = report.records.iter().filter(|r| r.metric == "mean_min_gap").map(|r| r.value.as_f64()).collect();
    assert!(means.windows(2).all(|w| w[1] > w[0]), "{means:?}");
    assert!(report.aggregate.extras.contains_key("fit_x"));
}

#[test]
fn config_file_and_overrides() {
    let mut cfg = ExperimentConfig::parse_ini(
        "# desk run\n[run]\nexperiment = mitigation\nn = 30\nd-grid = 1e2, 1e3\nnu = 0.02 ; inline\n",
    )
    .unwrap();
    assert_eq!(cfg.experiment, Experiment::Mitigation);
    assert_eq!(cfg.d_grid, vec![100, 1000]);
    assert_eq!(cfg.nu, 0.02);
    cfg.set("n", "25").unwrap();
    assert_eq!(cfg.n, 25);
    assert!(ExperimentConfig::parse_ini("bogus = 1").is_err());
    assert!(ExperimentConfig::parse_ini("n = -3").is_err());
    let empty = ExperimentConfig { d_grid: vec![], ..ExperimentConfig::default() };
    assert!(empty.validate().is_err());
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hdlss-tda"))
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let status = |args: &[&str]| bin().args(args).args(["--out", out]).output().unwrap().status.code();
    assert_eq!(status(&["--experiment", "curse", "--n", "8", "--d-grid", "10,100", "--reps", "2"]), Some(0));
    assert_eq!(status(&["--experiment", "nonsense"]), Some(1));
    assert_eq!(status(&["--experiment", "curse", "--d-grid", ""]), Some(1));
    assert_eq!(status(&["--experiment", "curse", "--n", "300", "--max-simplices", "1000"]), Some(2));

    let cfg_path = dir.path().join("run.ini");
    std::fs::write(&cfg_path, "experiment = curse\nn = 8\nd_grid = 10, 100\nreps = 2\nformat = csv\n").unwrap();
    let output = bin().args(["--config", cfg_path.to_str().unwrap(), "--seed", "3", "--out", out]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let written = String::from_utf8(output.stdout).unwrap();
    assert!(written.trim().ends_with(".csv"), "{written}");
}
