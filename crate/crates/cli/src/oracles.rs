//! Validation battery: each check compares library output against an
//! independent closed form or brute force and reports its deviation.

use hdlss_tda::metrics::{bottleneck_distance, hausdorff_distance};
use hdlss_tda::numerics::{derive_seed, seeded_rng};
use hdlss_tda::pca::compress;
use hdlss_tda::persistence::{
    analytic_simplex_diagram, cech_complex, compute_diagrams, regular_simplex_cloud, rips_complex, Filtration,
    PersistenceDiagram,
};
use hdlss_tda::pointcloud::{gen_noise, pairwise_distances};
use hdlss_tda::randmat::{mc_haar_moment, moment_oracle, wg_o2, wg_o4, Monomial, O4Pattern};
use num_rational::Rational64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::report::OracleResult;

pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Largest coordinate error of `computed` against a diagram with at most
/// one distinct point, or `inf` if the multiplicities differ.
fn simplex_deviation(computed: &PersistenceDiagram, expected: &PersistenceDiagram) -> f64 {
    if computed.total_multiplicity() != expected.total_multiplicity() {
        return f64::INFINITY;
    }
    let Some(e) = expected.points().first() else {
        return 0.0;
    };
    computed
        .points()
        .iter()
        .map(|p| (p.birth - e.birth).abs().max((p.death - e.death).abs()))
        .fold(0.0, f64::max)
}

/// Diagrams of the regular simplex on `n` vertices with squared edge `2 scale`
/// against the closed forms, all degrees `0..=n-2`.
pub fn check_simplex(filtration: Filtration, n: usize, scale: f64) -> Result<OracleResult> {
    let cloud = regular_simplex_cloud(n, scale)?;
    let complex = match filtration {
        Filtration::Rips => rips_complex(&pairwise_distances(&cloud), n - 2)?,
        Filtration::Cech => cech_complex(&cloud, n - 2)?,
    };
    let computed = compute_diagrams(&complex)?;
    let mut deviation = 0.0_f64;
    let mut passed = true;
    for (degree, got) in computed.iter().enumerate() {
        let expected = analytic_simplex_diagram(filtration, n, scale, degree)?;
        deviation = deviation.max(simplex_deviation(got, &expected));
        passed &= got.matches_within(&expected, SIMPLEX_TOLERANCE);
    }
    Ok(OracleResult {
        name: format!("simplex_{filtration}_n{n}"),
        passed: passed && deviation <= SIMPLEX_TOLERANCE,
        deviation,
        tolerance: SIMPLEX_TOLERANCE,
        detail: format!("scale={scale}, degrees 0..={}", n - 2),
    })
}

fn expanded(d: &PersistenceDiagram) -> Vec<(f64, f64)> {
    d.points()
        .iter()
        .flat_map(|p| std::iter::repeat_n((p.birth, p.death), p.multiplicity))
        .collect()
}

/// Bottleneck cost by enumerating every partial matching.
pub fn exhaustive_bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
    fn go(i: usize, a: &[(f64, f64)], b: &[(f64, f64)], used: &mut [bool], acc: f64, best: &mut f64) {
        if acc >= *best {
            return;
        }
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, u)| !**u)
                .map(|(q, _)| (q.1 - q.0) / 2.0)
                .fold(acc, f64::max);
            *best = best.min(rest);
            return;
        }
        let p = a[i];
        go(i + 1, a, b, used, acc.max((p.1 - p.0) / 2.0), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                let c = (p.0 - b[j].0).abs().max((p.1 - b[j].1).abs());
                go(i + 1, a, b, used, acc.max(c), best);
                used[j] = false;
            }
        }
    }
    let (a, b) = (expanded(a), expanded(b));
    let mut best = f64::INFINITY;
    go(0, &a, &b, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

/// Random diagram with up to `max_points` points on a coarse grid, so ties
/// and repeated points are common.
pub fn random_diagram(rng: &mut impl Rng, max_points: usize) -> PersistenceDiagram {
    let count = rng.random_range(0..=max_points);
    let pairs: Vec<(f64, f64)> = (0..count)
        .map(|_| {
            let b = rng.random_range(0..10) as f64 * 0.125;
            let p = if rng.random_bool(0.5) {
                rng.random_range(1..10) as f64 * 0.125
            } else {
                rng.random_range(0.01..1.5)
            };
            (b, b + p)
        })
        .collect();
    PersistenceDiagram::from_pairs(0, pairs).expect("valid random pairs")
}

/// Fast bottleneck against the exhaustive matcher; exact equality.
pub fn check_bottleneck(trials: usize, seed: u64) -> Result<OracleResult> {
    let mut rng = seeded_rng(seed, 0);
    let (mut mismatches, mut deviation) = (0, 0.0_f64);
    for _ in 0..trials {
        let (a, b) = (random_diagram(&mut rng, 5), random_diagram(&mut rng, 5));
        let fast = bottleneck_distance(&a, &b)?.value.as_f64();
        let slow = exhaustive_bottleneck(&a, &b);
        if fast != slow {
            mismatches += 1;
            deviation = deviation.max((fast - slow).abs());
        }
    }
    Ok(OracleResult {
        name: "bottleneck_exhaustive".into(),
        passed: mismatches == 0,
        deviation,
        tolerance: 0.0,
        detail: format!("{mismatches} mismatches in {trials} pairs"),
    })
}

/// `d_H` with the diagonal never exceeds `d_B`.
pub fn check_domination(trials: usize, seed: u64) -> Result<OracleResult> {
    let mut rng = seeded_rng(seed, 1);
    let (mut violations, mut worst) = (0, f64::NEG_INFINITY);
    for _ in 0..trials {
        let (a, b) = (random_diagram(&mut rng, 5), random_diagram(&mut rng, 5));
        let h = hausdorff_distance(&a, &b, true)?.value.as_f64();
        let db = bottleneck_distance(&a, &b)?.value.as_f64();
        worst = worst.max(h - db);
        if h > db {
            violations += 1;
        }
    }
    Ok(OracleResult {
        name: "hausdorff_domination".into(),
        passed: violations == 0,
        deviation: worst.max(0.0),
        tolerance: 0.0,
        detail: format!("{violations} violations in {trials} trials"),
    })
}

/// Twelve degree-2 and degree-4 index patterns with their exact moments
/// over `O(N)`, `N >= 4`.
pub fn weingarten_battery(n: usize) -> Result<Vec<(String, Monomial, Rational64)>> {
    let mut out = vec![
        ("g11*g11".to_string(), Monomial::new(vec![(1, 1), (1, 1)]), wg_o2(n, 1, 1, 1)?),
        ("g13*g23".to_string(), Monomial::new(vec![(1, 3), (2, 3)]), wg_o2(n, 1, 2, 3)?),
    ];
    let patterns = [
        O4Pattern::Squares { m: 1, t: 1, k: 1, q: 1 },
        O4Pattern::Squares { m: 1, t: 1, k: 1, q: 2 },
        O4Pattern::Squares { m: 1, t: 2, k: 1, q: 1 },
        O4Pattern::Squares { m: 1, t: 2, k: 1, q: 2 },
        O4Pattern::Mixed { m: 1, t: 1, m2: 2, t2: 2, k: 1, q: 1 },
        O4Pattern::Mixed { m: 1, t: 1, m2: 2, t2: 2, k: 1, q: 2 },
        O4Pattern::Mixed { m: 1, t: 2, m2: 2, t2: 1, k: 1, q: 3 },
        O4Pattern::Mixed { m: 1, t: 2, m2: 2, t2: 1, k: 2, q: 2 },
        O4Pattern::Mixed { m: 1, t: 2, m2: 3, t2: 4, k: 1, q: 2 },
        O4Pattern::Mixed { m: 1, t: 1, m2: 1, t2: 2, k: 3, q: 4 },
    ];
    for p in patterns {
        let mono = p.monomial();
        let label = mono.entries.iter().map(|(i, j)| format!("g{i}{j}")).collect::<Vec<_>>().join("*");
        out.push((label, mono, wg_o4(n, p)?));
    }
    Ok(out)
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Monte-Carlo estimates of the battery within `sigmas` standard errors.
pub fn check_weingarten(n: usize, samples: usize, sigmas: f64, seed: u64) -> Result<Vec<(OracleResult, f64, f64)>> {
    weingarten_battery(n)?
        .into_par_iter()
        .enumerate()
        .map(|(i, (label, mono, exact))| {
            let mc = mc_haar_moment(n, &mono, samples, derive_seed(seed, &[i as u64]))?;
            let exact = to_f64(exact);
            let deviation = (mc.estimate - exact).abs();
            let z = if mc.std_err > 0.0 { deviation / mc.std_err } else { 0.0 };
            let oracle = OracleResult {
                name: format!("weingarten_{label}"),
                passed: deviation <= sigmas * mc.std_err + 1e-12,
                deviation,
                tolerance: sigmas * mc.std_err,
                detail: format!("N={n}, exact={exact}, estimate={}, z={z:.3}", mc.estimate),
            };
            Ok((oracle, mc.estimate, exact))
        })
        .collect()
}

/// Sample mean and variance of `||x_1 - x_2||^2` for the normalized PCA
/// scores of pure Gaussian noise. A single fixed pair is used because the
/// all-pairs average of one cloud is identically `2s`.
pub fn compressed_noise_moments(n: usize, s: usize, d: usize, reps: usize, seed: u64) -> Result<(f64, f64)> {
    let values: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let e = gen_noise(n, d, 1.0, derive_seed(seed, &[rep as u64]))?;
            let c = compress(&e, s, true)?;
            Ok(c.points[0].iter().zip(&c.points[1]).map(|(a, b)| (a - b).powi(2)).sum())
        })
        .collect::<Result<_>>()?;
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok((mean, var))
}

pub fn check_moments(n: usize, s: usize, d: usize, reps: usize, seed: u64) -> Result<Vec<OracleResult>> {
    let oracle = moment_oracle(n, s)?;
    let (mean, var) = compressed_noise_moments(n, s, d, reps, seed)?;
    let rel = |got: f64, want: f64| (got - want).abs() / want;
    Ok(vec![
        OracleResult {
            name: "compressed_noise_mean".into(),
            passed: rel(mean, oracle.mean_f64()) <= 0.05,
            deviation: rel(mean, oracle.mean_f64()),
            tolerance: 0.05,
            detail: format!("n={n}, s={s}, d={d}, reps={reps}: mean {mean} vs {}", oracle.mean),
        },
        OracleResult {
            name: "compressed_noise_variance".into(),
            passed: rel(var, oracle.variance_f64()) <= 0.15,
            deviation: rel(var, oracle.variance_f64()),
            tolerance: 0.15,
            detail: format!("n={n}, s={s}, d={d}, reps={reps}: variance {var} vs {}", oracle.variance),
        },
    ])
}
