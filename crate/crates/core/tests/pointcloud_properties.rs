use hdlss_tda::numerics::{derive_seed, spectral_decomposition};
use hdlss_tda::pointcloud::{gen_noise, gen_original, geometry_report, observe, pairwise_distances, PointCloud, Shape};
use proptest::prelude::*;

#[test]
fn noise_norms_concentrate() {
    let (n, d, nu) = (5, 10_000, 0.01);
    let hits = (0..100)
        .filter(|&seed| {
            let e = gen_noise(n, d, nu, seed).unwrap();
            let r = e.point(0).iter().map(|x| x * x).sum::<f64>() / (nu * d as f64);
            (0.95..=1.05).contains(&r)
        })
        .count();
    assert!(hits >= 95, "{hits}");
}

#[test]
fn pairwise_noise_distances_concentrate() {
    let (n, d, nu) = (6, 4000, 1.0);
    let ok = (0..200)
        .filter(|&seed| {
            let e = gen_noise(n, d, nu, derive_seed(seed, &[1])).unwrap();
            geometry_report(&e, nu).unwrap().max_pair_dev / (d as f64).sqrt() <= 0.1
        })
        .count();
    assert!(ok >= 190, "{ok}");
}

#[test]
fn noise_gram_is_nonsingular() {
    for seed in 0..100 {
        let e = gen_noise(8, 200, 1.0, seed).unwrap();
        let g = e.gram();
        let sd = spectral_decomposition(&g, 1e-8 * g.frobenius_norm()).unwrap();
        assert!(sd.eigenvalues.last().copied().unwrap() > 1e-6 * sd.eigenvalues[0]);
    }
}

#[test]
fn noise_points_are_nearly_orthogonal() {
    let d = 5000;
    let ok = (0..100)
        .filter(|&seed| {
            let e = gen_noise(6, d, 0.5, seed).unwrap();
            geometry_report(&e, 0.5).unwrap().max_abs_cos * (d as f64).sqrt() <= 10.0
        })
        .count();
    assert!(ok >= 90, "{ok}");
}

#[test]
fn observed_cloud_adds_coordinatewise() {
    let p = gen_original(&Shape::Circle, 8, 2, 50, 0).unwrap();
    let e = gen_noise(8, 50, 0.1, 1).unwrap();
    let obs = observe(&p, &e).unwrap();
    for i in 0..8 {
        for k in 0..50 {
            assert_eq!(obs.point(i)[k], p.point(i)[k] + e.point(i)[k]);
        }
    }
    assert!(observe(&p, &gen_noise(7, 50, 0.1, 1).unwrap()).is_err());
}

#[test]
fn csv_round_trip() {
    let c = gen_original(&Shape::UniformSquare, 7, 3, 9, 4).unwrap();
    assert_eq!(PointCloud::from_csv(&c.to_csv()).unwrap(), c);
}

proptest! {
    #[test]
    fn distances_are_translation_invariant(seed in 0u64..1000, shift in prop::collection::vec(-50.0f64..50.0, 12)) {
        let c = gen_noise(5, 12, 1.0, seed).unwrap();
        let a = pairwise_distances(&c);
        let b = pairwise_distances(&c.translated(&shift).unwrap());
        prop_assert!(a.sub(&b).unwrap().max_abs() <= 1e-9);
    }
}
