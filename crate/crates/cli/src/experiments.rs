use std::time::Instant;

use hdlss_tda::metrics::{
    bottleneck_distance, hausdorff_distance, max_persistence, max_relative_persistence, DistanceValue,
};
use hdlss_tda::numerics::derive_seed;
use hdlss_tda::pca::{compress, compress_as, eigen_closeness_report, CloudSource};
use hdlss_tda::persistence::{cech_complex, compute_diagrams, rips_complex, Filtration, PersistenceDiagram};
use hdlss_tda::pointcloud::{gen_noise, gen_original, observe, pairwise_distances, PointCloud};
use hdlss_tda::randmat::eigengap_experiment;
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::oracles;
use crate::report::{ExperimentReport, OracleResult, Record};

pub const ORIGINAL_VS_OBSERVED: &str = "original_vs_observed";
pub const ORIGINAL_VS_COMPRESSED: &str = "original_vs_compressed";
pub const COMPRESSED_VS_NOISE: &str = "compressed_vs_compressed_noise";

fn diagrams(cloud: &PointCloud, filtration: Filtration, max_degree: usize) -> Result<Vec<PersistenceDiagram>> {
    let complex = match filtration {
        Filtration::Rips => rips_complex(&pairwise_distances(cloud), max_degree)?,
        Filtration::Cech => cech_complex(cloud, max_degree)?,
    };
    Ok(compute_diagrams(&complex)?)
}

/// Seed of replicate `rep`; all clouds of that replicate derive from it.
pub fn replicate_seed(config: &ExperimentConfig, rep: usize) -> u64 {
    derive_seed(config.seed, &[rep as u64])
}

fn noise_seed(rep_seed: u64, d: usize) -> u64 {
    derive_seed(rep_seed, &[d as u64, 1])
}

struct Cell<'a> {
    config: &'a ExperimentConfig,
    d: usize,
    seed: u64,
    records: Vec<Record>,
}

impl Cell<'_> {
    fn push(&mut self, degree: Option<usize>, metric: &str, pair: &str, value: DistanceValue) {
        self.records.push(Record {
            experiment: self.config.experiment.to_string(),
            d: self.d,
            seed: self.seed,
            degree,
            metric: metric.to_string(),
            target_pair: pair.to_string(),
            value,
            runtime_ms: None,
        });
    }

    fn compare(&mut self, pair: &str, left: &[PersistenceDiagram], right: &[PersistenceDiagram]) -> Result<()> {
        for &k in &self.config.degrees {
            let b = bottleneck_distance(&left[k], &right[k])?.value;
            let h = hausdorff_distance(&left[k], &right[k], false)?.value;
            self.push(Some(k), "bottleneck", pair, b);
            self.push(Some(k), "hausdorff", pair, h);
        }
        Ok(())
    }
}

fn prepare(config: &ExperimentConfig, expected: Experiment) -> Result<()> {
    if config.experiment != expected {
        return Err(CliError::Config(format!("expected a {expected} config, got {}", config.experiment)));
    }
    config.validate()?;
    config.check_resources()
}

fn cells(config: &ExperimentConfig) -> Vec<(usize, usize)> {
    config.d_grid.iter().flat_map(|&d| (0..config.reps).map(move |rep| (d, rep))).collect()
}

/// Runs every (d, replicate) cell in parallel; output order follows the grid.
fn run_cells<F>(config: &ExperimentConfig, body: F) -> Result<(Vec<Record>, Vec<OracleResult>)>
where
    F: Fn(&mut Cell, &mut Vec<OracleResult>) -> Result<()> + Sync,
{
    let results: Vec<(Vec<Record>, Vec<OracleResult>)> = cells(config)
        .into_par_iter()
        .map(|(d, rep)| {
            let start = Instant::now();
            let mut cell = Cell { config, d, seed: replicate_seed(config, rep), records: Vec::new() };
            let mut checks = Vec::new();
            body(&mut cell, &mut checks)?;
            if config.timing {
                let ms = start.elapsed().as_millis() as u64;
                cell.records.iter_mut().for_each(|r| r.runtime_ms = Some(ms));
            }
            Ok((cell.records, checks))
        })
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    let mut checks = Vec::new();
    for (r, c) in results {
        records.extend(r);
        checks.extend(c);
    }
    Ok((records, checks))
}

fn clouds(config: &ExperimentConfig, d: usize, seed: u64) -> Result<(PointCloud, PointCloud, PointCloud)> {
    let p = gen_original(&config.shape.to_shape(config.n, config.s), config.n, config.s, d, seed)?;
    let e = gen_noise(config.n, d, config.nu, noise_seed(seed, d))?;
    let observed = observe(&p, &e)?;
    Ok((p, e, observed))
}

/// Original versus observed diagrams across the d grid.
pub fn run_curse(config: &ExperimentConfig) -> Result<ExperimentReport> {
    prepare(config, Experiment::Curse)?;
    let max_degree = config.max_degree();
    let (records, _) = run_cells(config, |cell, _| {
        let (p, _, observed) = clouds(config, cell.d, cell.seed)?;
        let dp = diagrams(&p, config.filtration, max_degree)?;
        let dq = diagrams(&observed, config.filtration, max_degree)?;
        cell.compare(ORIGINAL_VS_OBSERVED, &dp, &dq)?;
        for &k in &config.degrees {
            cell.push(Some(k), "max_persistence", "observed", DistanceValue::Finite(max_persistence(&dq[k])));
            let rel = max_relative_persistence(&dq[k])?;
            cell.push(Some(k), "max_relative_persistence", "observed", DistanceValue::Finite(rel));
        }
        Ok(())
    })?;
    Ok(ExperimentReport::new(config.clone(), records, Vec::new()))
}

/// Original, observed, normalized-PCA compressed and compressed-noise
/// diagrams side by side, plus the eigenvector perturbation bound per cell.
pub fn run_mitigation(config: &ExperimentConfig) -> Result<ExperimentReport> {
    prepare(config, Experiment::Mitigation)?;
    let max_degree = config.max_degree();
    let s = config.s;
    let (records, checks) = run_cells(config, |cell, checks| {
        let (p, e, observed) = clouds(config, cell.d, cell.seed)?;
        let compressed = compress(&observed, s, true)?.to_point_cloud()?;
        let compressed_noise = compress_as(&e, s, true, CloudSource::Noise)?.to_point_cloud()?;
        let dp = diagrams(&p, Filtration::Rips, max_degree)?;
        let dq = diagrams(&observed, Filtration::Rips, max_degree)?;
        let dc = diagrams(&compressed, Filtration::Rips, max_degree)?;
        let de = diagrams(&compressed_noise, Filtration::Rips, max_degree)?;
        cell.compare(ORIGINAL_VS_OBSERVED, &dp, &dq)?;
        cell.compare(ORIGINAL_VS_COMPRESSED, &dp, &dc)?;
        cell.compare(COMPRESSED_VS_NOISE, &dc, &de)?;

        let dk = eigen_closeness_report(&observed, &e, s)?;
        let worst = dk.distances.iter().copied().fold(0.0, f64::max);
        cell.push(None, "eigenvector_distance", "observed_vs_noise", DistanceValue::Finite(worst));
        let bound = if dk.bound.is_finite() { DistanceValue::Finite(dk.bound) } else { DistanceValue::Infinite };
        cell.push(None, "davis_kahan_bound", "observed_vs_noise", bound);
        if worst > dk.bound {
            checks.push(OracleResult {
                name: "davis_kahan".into(),
                passed: false,
                deviation: worst - dk.bound,
                tolerance: 0.0,
                detail: format!("d={}, seed={}: distance {worst} above bound {}", cell.d, cell.seed, dk.bound),
            });
        }
        Ok(())
    })?;
    let runs = config.d_grid.len() * config.reps;
    let violations = checks.len();
    let mut oracles = vec![OracleResult {
        name: "davis_kahan".into(),
        passed: violations == 0,
        deviation: checks.iter().map(|c| c.deviation).fold(0.0, f64::max),
        tolerance: 0.0,
        detail: format!("{violations} violations in {runs} runs"),
    }];
    oracles.extend(checks);
    Ok(ExperimentReport::new(config.clone(), records, oracles))
}

/// Mean minimum eigengap of `W_n(I, d)` over the d grid, with a square-root
/// fit when the grid has at least four points.
pub fn run_eigengap(config: &ExperimentConfig) -> Result<ExperimentReport> {
    prepare(config, Experiment::Eigengap)?;
    let points = config
        .d_grid
        .par_iter()
        .map(|&d| Ok(eigengap_experiment(config.n, &[d], config.reps, config.seed)?.grid[0]))
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    for p in &points {
        for (metric, v) in [("mean_min_gap", p.mean_min_gap), ("std_err", p.std_err)] {
            records.push(Record {
                experiment: config.experiment.to_string(),
                d: p.d,
                seed: config.seed,
                degree: None,
                metric: metric.into(),
                target_pair: "wishart".into(),
                value: DistanceValue::Finite(v),
                runtime_ms: None,
            });
        }
    }
    let mut report = ExperimentReport::new(config.clone(), records, Vec::new());
    if points.len() >= 4 {
        let series = hdlss_tda::randmat::EigengapSeries { n: config.n, reps: config.reps, grid: points };
        if let Ok(fit) = series.fit() {
            let extras = &mut report.aggregate.extras;
            extras.insert("fit_x".into(), fit.x);
            extras.insert("fit_y".into(), fit.y);
            extras.insert("fit_z".into(), fit.z);
            extras.insert("fit_rss".into(), fit.rss);
        }
    }
    Ok(report)
}

fn oracle_record(config: &ExperimentConfig, d: usize, metric: &str, pair: &str, v: f64) -> Record {
    Record {
        experiment: config.experiment.to_string(),
        d,
        seed: config.seed,
        degree: None,
        metric: metric.into(),
        target_pair: pair.into(),
        value: if v.is_infinite() { DistanceValue::Infinite } else { DistanceValue::Finite(v) },
        runtime_ms: None,
    }
}

/// Monte-Carlo Weingarten battery at `N = n` with `reps` Haar samples, 4σ.
pub fn run_weingarten_check(config: &ExperimentConfig) -> Result<ExperimentReport> {
    prepare(config, Experiment::WeingartenCheck)?;
    let mut records = Vec::new();
    let mut oracles = Vec::new();
    for (oracle, estimate, exact) in oracles::check_weingarten(config.n, config.reps, 4.0, config.seed)? {
        let label = oracle.name.trim_start_matches("weingarten_").to_string();
        records.push(oracle_record(config, config.n, "mc_estimate", &label, estimate));
        records.push(oracle_record(config, config.n, "exact", &label, exact));
        oracles.push(oracle);
    }
    Ok(ExperimentReport::new(config.clone(), records, oracles))
}

fn simplex_oracles(config: &ExperimentConfig, max_n: usize) -> Result<(Vec<Record>, Vec<OracleResult>)> {
    let mut jobs = Vec::new();
    for &d in &config.d_grid {
        for n in 3..=max_n {
            jobs.push((Filtration::Rips, n, d));
            if n <= 12 {
                jobs.push((Filtration::Cech, n, d));
            }
        }
    }
    let results = jobs
        .into_par_iter()
        .map(|(f, n, d)| oracles::check_simplex(f, n, config.nu * d as f64).map(|o| (d, o)))
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    let mut out = Vec::new();
    for (d, o) in results {
        records.push(oracle_record(config, d, "max_deviation", &o.name, o.deviation));
        out.push(o);
    }
    Ok((records, out))
}

/// Regular-simplex diagrams for `3..=n` vertices and both filtrations.
pub fn run_simplex_check(config: &ExperimentConfig) -> Result<ExperimentReport> {
    prepare(config, Experiment::SimplexCheck)?;
    let (records, oracles) = simplex_oracles(config, config.n)?;
    Ok(ExperimentReport::new(config.clone(), records, oracles))
}

/// The full oracle battery at fixed sizes: simplex diagrams (n = 3..7),
/// bottleneck against exhaustive matching and Hausdorff domination (500
/// pairs each), Weingarten Monte-Carlo (N = 4, 10^5 samples) and the
/// compressed-noise moments (n = 10, s = 3, d = 2000, 2000 replications).
/// Only `seed`, `nu` and `d_grid` are taken from the config.
pub fn run_validation_suite(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.d_grid.is_empty() || config.nu.is_nan() || config.nu <= 0.0 {
        return Err(CliError::Config("validation needs a nonempty d_grid and nu > 0".into()));
    }
    let seed = config.seed;
    let (mut records, mut results) = simplex_oracles(config, 7)?;
    results.push(oracles::check_bottleneck(500, derive_seed(seed, &[1]))?);
    results.push(oracles::check_domination(500, derive_seed(seed, &[2]))?);
    for (oracle, estimate, exact) in oracles::check_weingarten(4, 100_000, 4.0, derive_seed(seed, &[3]))? {
        let label = oracle.name.trim_start_matches("weingarten_").to_string();
        records.push(oracle_record(config, 4, "mc_estimate", &label, estimate));
        records.push(oracle_record(config, 4, "exact", &label, exact));
        results.push(oracle);
    }
    results.extend(oracles::check_moments(10, 3, 2000, 2000, derive_seed(seed, &[4]))?);
    Ok(ExperimentReport::new(config.clone(), records, results))
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    match config.experiment {
        Experiment::Curse => run_curse(config),
        Experiment::Mitigation => run_mitigation(config),
        Experiment::Eigengap => run_eigengap(config),
        Experiment::WeingartenCheck => run_weingarten_check(config),
        Experiment::SimplexCheck => run_simplex_check(config),
        Experiment::Validation => run_validation_suite(config),
    }
}
