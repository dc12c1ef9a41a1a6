use hdlss_tda::numerics::derive_seed;
use hdlss_tda::randmat::{
    eigengap_experiment, haar_moment_exact, mc_haar_moment, min_eigengap, sample_wishart, wg_o2, wg_o4,
    wishart_eigenvalues, Monomial, O4Pattern,
};

#[test]
fn case_tables_match_pairing_sum() {
    for n in 2..=4 {
        let r = 1..=n;
        for m in r.clone() {
            for t in r.clone() {
                for k in r.clone() {
                    assert_eq!(wg_o2(n, m, t, k).unwrap(), haar_moment_exact(n, &Monomial::new(vec![(m, k), (t, k)])).unwrap());
                    for q in r.clone() {
                        let sq = O4Pattern::Squares { m, t, k, q };
                        assert_eq!(wg_o4(n, sq).unwrap(), haar_moment_exact(n, &sq.monomial()).unwrap(), "{sq:?}");
                        for m2 in r.clone() {
                            for t2 in r.clone() {
                                if (m, t) == (m2, t2) {
                                    continue;
                                }
                                let mx = O4Pattern::Mixed { m, t, m2, t2, k, q };
                                assert_eq!(wg_o4(n, mx).unwrap(), haar_moment_exact(n, &mx.monomial()).unwrap(), "{mx:?}");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn monte_carlo_agrees_with_exact_moments() {
    let patterns = [
        O4Pattern::Squares { m: 1, t: 1, k: 1, q: 1 },
        O4Pattern::Squares { m: 1, t: 2, k: 1, q: 2 },
        O4Pattern::Mixed { m: 1, t: 1, m2: 2, t2: 2, k: 1, q: 2 },
    ];
    for (i, p) in patterns.iter().enumerate() {
        let exact = haar_moment_exact(3, &p.monomial()).unwrap();
        let exact = *exact.numer() as f64 / *exact.denom() as f64;
        let mc = mc_haar_moment(3, &p.monomial(), 20_000, i as u64).unwrap();
        assert!((mc.estimate - exact).abs() <= 4.0 * mc.std_err + 1e-12, "{p:?} {mc:?} {exact}");
    }
}

#[test]
fn wishart_eigenvalues_concentrate_near_d() {
    let (n, d) = (5, 4000);
    let ok = (0..100)
        .filter(|&rep| {
            let eigs = wishart_eigenvalues(&sample_wishart(n, d, derive_seed(3, &[rep])).unwrap()).unwrap();
            eigs.iter().all(|l| (l / d as f64 - 1.0).abs() <= 0.1)
        })
        .count();
    assert!(ok >= 95, "{ok}");
}

#[test]
fn wishart_trace_mean() {
    let (n, d, reps) = (4, 300, 400);
    let mean = (0..reps)
        .map(|rep| sample_wishart(n, d, rep).unwrap().trace() / (n * d) as f64)
        .sum::<f64>()
        / reps as f64;
    assert!((mean - 1.0).abs() <= 0.02, "{mean}");
}

#[test]
fn eigengaps_are_positive() {
    let series = eigengap_experiment(6, &[10, 40], 50, 1).unwrap();
    assert!(series.grid.iter().all(|p| p.mean_min_gap > 0.0));
    assert!(min_eigengap(&[3.0, 1.0, 0.5]).unwrap() == 0.5);
}

#[test]
#[ignore = "long run"]
fn large_scale_sqrt_fit() {
    let grid: Vec<usize> = (150..=2000).step_by(185).collect();
    let series = eigengap_experiment(100, &grid, 200, 2024).unwrap();
    let fit = series.fit().unwrap();
    assert!((0.02..=0.05).contains(&fit.x), "{fit:?}");
}
