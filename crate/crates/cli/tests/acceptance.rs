//! Acceptance criteria, one line each. Exits nonzero if any criterion fails.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use hdlss_tda::metrics::{bottleneck_distance, hausdorff_distance};
use hdlss_tda::numerics::{derive_seed, haar_orthogonal_with, seeded_rng};
use hdlss_tda::pca::compress;
use hdlss_tda::persistence::{cech_complex, compute_diagrams, regular_simplex_cloud, rips_complex, PersistenceDiagram};
use hdlss_tda::pointcloud::{gen_noise, pairwise_distances};
use hdlss_tda::randmat::{wg_o2, wg_o4, Monomial, O4Pattern};
use hdlss_tda_cli::{run_curse, run_eigengap, run_mitigation, Experiment, ExperimentConfig, ExperimentReport};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

fn choose(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

const SCALES: [(f64, f64); 3] = [(0.01, 100.0), (0.01, 10_000.0), (1e-5, 1000.0)];

fn rips_simplex() -> Outcome {
    let mut worst = 0.0_f64;
    for n in 3..=7 {
        for (nu, d) in SCALES {
            let cloud = regular_simplex_cloud(n, nu * d).unwrap();
            let dgms = compute_diagrams(&rips_complex(&pairwise_distances(&cloud), n - 2).unwrap()).unwrap();
            let death = (2.0 * nu * d).sqrt() / 2.0;
            let d0 = &dgms[0];
            if d0.total_multiplicity() != n - 1 || dgms[1..].iter().any(|g| !g.is_empty()) {
                return outcome(false, format!("n={n}: wrong multiplicities"));
            }
            for p in d0.points() {
                worst = worst.max(p.birth.abs()).max((p.death - death).abs());
            }
        }
    }
    outcome(worst <= 1e-9, format!("n=3..7, max coordinate error {worst:.2e}"))
}

/// Rank of the top reduced homology of the N-skeleton of an (n-1)-simplex
/// from its face counts: the reduced Euler characteristic.
fn skeleton_betti(n: usize, big_n: usize) -> usize {
    let chi: i64 = (0..=big_n + 1).map(|k| if k % 2 == 0 { 1 } else { -1 } * choose(n, k) as i64).sum();
    (if big_n.is_multiple_of(2) { -chi } else { chi }) as usize
}

fn cech_simplex() -> Outcome {
    let mut worst = 0.0_f64;
    for n in 3..=6 {
        for (nu, d) in SCALES {
            let scale = nu * d;
            let dgms = compute_diagrams(&cech_complex(&regular_simplex_cloud(n, scale).unwrap(), n - 2).unwrap()).unwrap();
            for (big_n, dg) in dgms.iter().enumerate() {
                let k = big_n as f64;
                let (b, dd) = ((scale * k / (k + 1.0)).sqrt(), (scale * (k + 1.0) / (k + 2.0)).sqrt());
                let mult = skeleton_betti(n, big_n);
                if mult != choose(n - 1, big_n + 1) || dg.total_multiplicity() != mult {
                    return outcome(false, format!("n={n}, N={big_n}: multiplicity {} vs {mult}", dg.total_multiplicity()));
                }
                for p in dg.points() {
                    worst = worst.max((p.birth - b).abs()).max((p.death - dd).abs());
                }
            }
        }
    }
    outcome(worst <= 1e-9, format!("n=3..6, all N, max coordinate error {worst:.2e}"))
}

fn random_diagram(rng: &mut impl Rng) -> PersistenceDiagram {
    let count = rng.random_range(0..=5);
    let pairs: Vec<(f64, f64)> = (0..count)
        .map(|_| {
            let b = rng.random_range(0..6) as f64 * 0.25;
            let p = if rng.random_bool(0.5) { rng.random_range(1..6) as f64 * 0.25 } else { rng.random_range(0.01..1.5) };
            (b, b + p)
        })
        .collect();
    PersistenceDiagram::from_pairs(0, pairs).unwrap()
}

fn points(d: &PersistenceDiagram) -> Vec<(f64, f64)> {
    d.points().iter().flat_map(|p| std::iter::repeat_n((p.birth, p.death), p.multiplicity)).collect()
}

/// Tries every assignment of each left point to a right point or the
/// diagonal; leftover right points go to the diagonal.
fn brute_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn rec(i: usize, a: &[(f64, f64)], b: &[(f64, f64)], taken: &mut [bool], cost: f64) -> f64 {
        if i == a.len() {
            return b.iter().zip(taken.iter()).filter(|(_, t)| !**t).map(|(q, _)| (q.1 - q.0) / 2.0).fold(cost, f64::max);
        }
        let mut best = rec(i + 1, a, b, taken, cost.max((a[i].1 - a[i].0) / 2.0));
        for j in 0..b.len() {
            if !taken[j] {
                taken[j] = true;
                let c = (a[i].0 - b[j].0).abs().max((a[i].1 - b[j].1).abs());
                best = best.min(rec(i + 1, a, b, taken, cost.max(c)));
                taken[j] = false;
            }
        }
        best
    }
    rec(0, a, b, &mut vec![false; b.len()], 0.0)
}

fn bottleneck_exactness() -> Outcome {
    let mut rng = seeded_rng(2024, 0);
    let mismatches = (0..500)
        .filter(|_| {
            let (a, b) = (random_diagram(&mut rng), random_diagram(&mut rng));
            bottleneck_distance(&a, &b).unwrap().value.as_f64() != brute_bottleneck(&points(&a), &points(&b))
        })
        .count();
    outcome(mismatches == 0, format!("{mismatches} mismatches in 500 pairs"))
}

fn domination() -> Outcome {
    let mut rng = seeded_rng(2025, 0);
    let violations = (0..500)
        .filter(|_| {
            let (a, b) = (random_diagram(&mut rng), random_diagram(&mut rng));
            hausdorff_distance(&a, &b, true).unwrap().value.as_f64() > bottleneck_distance(&a, &b).unwrap().value.as_f64()
        })
        .count();
    outcome(violations == 0, format!("{violations} violations in 500 trials"))
}

fn weingarten() -> Outcome {
    let n = 4;
    let r = |x: num_rational::Rational64| *x.numer() as f64 / *x.denom() as f64;
    let mut battery: Vec<(Monomial, f64)> = vec![
        (Monomial::new(vec![(1, 1), (1, 1)]), r(wg_o2(n, 1, 1, 1).unwrap())),
        (Monomial::new(vec![(2, 3), (4, 3)]), r(wg_o2(n, 2, 4, 3).unwrap())),
    ];
    for p in [
        O4Pattern::Squares { m: 1, t: 1, k: 1, q: 1 },
        O4Pattern::Squares { m: 2, t: 2, k: 1, q: 3 },
        O4Pattern::Squares { m: 1, t: 3, k: 2, q: 2 },
        O4Pattern::Squares { m: 1, t: 2, k: 3, q: 4 },
        O4Pattern::Mixed { m: 1, t: 1, m2: 2, t2: 2, k: 1, q: 1 },
        O4Pattern::Mixed { m: 1, t: 1, m2: 3, t2: 3, k: 2, q: 4 },
        O4Pattern::Mixed { m: 1, t: 2, m2: 2, t2: 1, k: 1, q: 3 },
        O4Pattern::Mixed { m: 2, t: 4, m2: 4, t2: 2, k: 3, q: 3 },
        O4Pattern::Mixed { m: 1, t: 2, m2: 3, t2: 4, k: 1, q: 2 },
        O4Pattern::Mixed { m: 1, t: 1, m2: 1, t2: 2, k: 1, q: 4 },
    ] {
        battery.push((p.monomial(), r(wg_o4(n, p).unwrap())));
    }
    let samples = 100_000;
    let mut rng = seeded_rng(4, 0);
    let mut sums = vec![(0.0, 0.0); battery.len()];
    for _ in 0..samples {
        let g = haar_orthogonal_with(&mut rng, n).unwrap();
        for ((mono, _), (s, s2)) in battery.iter().zip(sums.iter_mut()) {
            let v: f64 = mono.entries.iter().map(|&(i, j)| g[(i - 1, j - 1)]).product();
            *s += v;
            *s2 += v * v;
        }
    }
    let m = samples as f64;
    let mut worst_z = 0.0_f64;
    for ((_, exact), (s, s2)) in battery.iter().zip(&sums) {
        let mean = s / m;
        let se = ((s2 / m - mean * mean) * m / (m - 1.0) / m).sqrt();
        worst_z = worst_z.max((mean - exact).abs() / se);
    }
    outcome(worst_z <= 4.0, format!("12 patterns at N=4, 1e5 samples, max |z| = {worst_z:.4}"))
}

/// Statistics of `||x_1 - x_2||^2` for one fixed pair. The average over all
/// pairs of a single cloud is identically `2s`, so pairs are not pooled.
fn compressed_moments() -> Outcome {
    let (n, s, d, reps) = (10, 3, 2000, 2000);
    let values: Vec<f64> = (0..reps)
        .map(|rep| {
            let c = compress(&gen_noise(n, d, 1.0, derive_seed(5, &[rep as u64])).unwrap(), s, true).unwrap();
            c.points[0].iter().zip(&c.points[1]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        })
        .collect();
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let (mean_err, var_err) = ((mean - 6.0).abs() / 6.0, (var - 144.0 / 11.0).abs() / (144.0 / 11.0));
    outcome(
        mean_err <= 0.05 && var_err <= 0.15,
        format!("mean {mean:.4} (target 6, err {:.2}%), variance {var:.4} (target 13.0909, err {:.2}%)", 100.0 * mean_err, 100.0 * var_err),
    )
}

fn eigengap() -> Outcome {
    let cfg = ExperimentConfig {
        experiment: Experiment::Eigengap,
        n: 10,
        d_grid: vec![200, 800, 3200],
        reps: 500,
        ..ExperimentConfig::default()
    };
    let report = run_eigengap(&cfg).unwrap();
    let means: Vec<f64> = report.records.iter().filter(|r| r.metric == "mean_min_gap").map(|r| r.value.as_f64()).collect();
    let ratio = means[2] / means[1];
    outcome(
        means.windows(2).all(|w| w[1] > w[0]) && (1.5..=2.5).contains(&ratio),
        format!("means {means:.3?}, mean(3200)/mean(800) = {ratio:.3}"),
    )
}

fn desk_config(experiment: Experiment) -> ExperimentConfig {
    ExperimentConfig { experiment, d_grid: vec![100, 1000, 10_000], ..ExperimentConfig::default() }
}

/// Median per d of one (degree, metric, target) series, from raw records.
fn medians(report: &ExperimentReport, degree: Option<usize>, metric: &str, target: &str) -> BTreeMap<usize, f64> {
    let mut by_d: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in &report.records {
        if r.degree == degree && r.metric == metric && r.target_pair == target {
            by_d.entry(r.d).or_default().push(r.value.as_f64());
        }
    }
    by_d.into_iter().map(|(d, v)| (d, median(v))).collect()
}

fn curse(report: &ExperimentReport) -> Outcome {
    let nu = report.aggregate.config.nu;
    let db = medians(report, Some(0), "bottleneck", "original_vs_observed");
    let scaled = db[&10_000] * 4.0 / (2.0 * nu * 10_000.0).sqrt();
    let dh: Vec<f64> = medians(report, Some(1), "hausdorff", "original_vs_observed").into_values().collect();
    outcome(
        (0.85..=1.15).contains(&scaled) && dh.windows(2).all(|w| w[1] > w[0]),
        format!("d_B*4/sqrt(2 nu d) at 1e4 = {scaled:.4}; median d_H(D1) = {dh:.3?}"),
    )
}

fn mitigation(report: &ExperimentReport) -> Outcome {
    let compressed = medians(report, Some(1), "hausdorff", "original_vs_compressed");
    let observed = medians(report, Some(1), "hausdorff", "original_vs_observed");
    let (rc, ro) = (compressed[&10_000] / compressed[&100], observed[&10_000] / observed[&100]);
    let mut decreasing = true;
    let mut noise_series = Vec::new();
    for k in &report.aggregate.config.degrees {
        let v: Vec<f64> = medians(report, Some(*k), "bottleneck", "compressed_vs_compressed_noise").into_values().collect();
        decreasing &= v.windows(2).all(|w| w[1] < w[0]);
        noise_series.push(format!("D{k} {v:.3?}"));
    }
    outcome(
        rc <= 2.0 && ro >= 5.0 && decreasing,
        format!(
            "d_H(D1(P),D1(P^)) 1e4/1e2 = {rc:.3} (<= 2); d_H(D1(P),D1(P')) 1e4/1e2 = {ro:.3} (>= 5); d_B(P^, E^) {}",
            noise_series.join(", ")
        ),
    )
}

fn davis_kahan(report: &ExperimentReport) -> Outcome {
    let mut cells: BTreeMap<(usize, u64), (f64, f64)> = BTreeMap::new();
    for r in &report.records {
        let e = cells.entry((r.d, r.seed)).or_insert((f64::NAN, f64::NAN));
        match r.metric.as_str() {
            "eigenvector_distance" => e.0 = r.value.as_f64(),
            "davis_kahan_bound" => e.1 = r.value.as_f64(),
            _ => {}
        }
    }
    let violations = cells.values().filter(|(dist, bound)| dist.is_nan() || dist > bound).count();
    outcome(violations == 0, format!("{violations} violations in {} runs", cells.len()))
}

fn main() {
    let mut rows: Vec<(&str, Outcome, Duration, Duration)> = Vec::new();
    let mut timed = |name: &'static str, limit: u64, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let out = f();
        rows.push((name, out, start.elapsed(), Duration::from_secs(limit)));
        let (name, out, took, limit) = rows.last().unwrap();
        let ok = out.passed && took <= limit;
        println!("{} {name}: {} [{:.2?}, limit {:?}]", if ok { "PASS" } else { "FAIL" }, out.detail, took, limit);
    };
    timed("simplex oracle (rips)", 1, &rips_simplex);
    timed("simplex oracle (cech)", 10, &cech_simplex);
    timed("bottleneck exactness", 30, &bottleneck_exactness);
    timed("metric domination", 30, &domination);
    timed("weingarten closed forms", 60, &weingarten);
    timed("compressed-noise moments", 300, &compressed_moments);
    timed("eigengap divergence", 300, &eigengap);

    let curse_report = OnceCell::new();
    timed("curse demonstration", 600, &|| curse(curse_report.get_or_init(|| run_curse(&desk_config(Experiment::Curse)).unwrap())));
    let mitigation_report = OnceCell::new();
    timed("mitigation", 900, &|| {
        mitigation(mitigation_report.get_or_init(|| run_mitigation(&desk_config(Experiment::Mitigation)).unwrap()))
    });
    timed("davis-kahan bound", 900, &|| davis_kahan(mitigation_report.get().unwrap()));

    let failed = rows.iter().filter(|(_, o, took, limit)| !o.passed || took > limit).count();
    println!("\n{} of {} acceptance criteria passed", rows.len() - failed, rows.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
