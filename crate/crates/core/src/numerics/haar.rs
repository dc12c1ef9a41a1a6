use super::{gaussian_matrix_with, seeded_rng, Matrix, Rng};
use crate::error::{invalid, Result};

/// Haar-distributed orthogonal `n x n` matrix: the `Q` factor of a standard
/// Gaussian matrix, normalised so that `R` has a positive diagonal.
pub fn haar_orthogonal(n: usize, seed: u64) -> Result<Matrix> {
    haar_orthogonal_with(&mut seeded_rng(seed, 0), n)
}

pub fn haar_orthogonal_with(rng: &mut Rng, n: usize) -> Result<Matrix> {
    if n == 0 {
        return invalid("orthogonal matrix size must be at least 1");
    }
    let mut a = gaussian_matrix_with(rng, n, n, 1.0)?;
    let mut q = Matrix::identity(n);
    // sign of R's diagonal entries
    let mut signs = vec![1.0; n];

    for k in 0..n {
        let norm = (k..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>().sqrt();
        if k == n - 1 || norm == 0.0 {
            if a[(k, k)] < 0.0 {
                signs[k] = -1.0;
            }
            continue;
        }
        let x0 = a[(k, k)];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        // Householder vector v = x - alpha e_k, stored in `h`
        let mut h: Vec<f64> = (k..n).map(|i| a[(i, k)]).collect();
        h[0] -= alpha;
        let hn = h.iter().map(|x| x * x).sum::<f64>().sqrt();
        if hn == 0.0 {
            if alpha < 0.0 {
                signs[k] = -1.0;
            }
            continue;
        }
        h.iter_mut().for_each(|x| *x /= hn);

        // A <- H A on the trailing block
        for j in k..n {
            let dot: f64 = h.iter().enumerate().map(|(t, hv)| hv * a[(k + t, j)]).sum();
            for (t, hv) in h.iter().enumerate() {
                a[(k + t, j)] -= 2.0 * hv * dot;
            }
        }
        // Q <- Q H
        for i in 0..n {
            let dot: f64 = h.iter().enumerate().map(|(t, hv)| q[(i, k + t)] * hv).sum();
            for (t, hv) in h.iter().enumerate() {
                q[(i, k + t)] -= 2.0 * dot * hv;
            }
        }
        if alpha < 0.0 {
            signs[k] = -1.0;
        }
    }

    for (j, s) in signs.iter().enumerate() {
        if *s < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_is_a_sign() {
        let mut seen = [false; 2];
        for seed in 0..64 {
            let q = haar_orthogonal(1, seed).unwrap();
            let v = q[(0, 0)];
            assert!(v == 1.0 || v == -1.0);
            seen[usize::from(v > 0.0)] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn columns_are_orthonormal() {
        for seed in 0..20 {
            let q = haar_orthogonal(4, seed).unwrap();
            let qtq = q.transpose().matmul(&q).unwrap();
            assert!(qtq.sub(&Matrix::identity(4)).unwrap().max_abs() <= 1e-12);
        }
    }

    #[test]
    fn r_factor_has_positive_diagonal() {
        // Q^T G = R must be upper triangular with a positive diagonal.
        let mut rng = seeded_rng(3, 0);
        let g = gaussian_matrix_with(&mut rng.clone(), 5, 5, 1.0).unwrap();
        let q = haar_orthogonal_with(&mut rng, 5).unwrap();
        let r = q.transpose().matmul(&g).unwrap();
        for i in 0..5 {
            assert!(r[(i, i)] > 0.0);
            for j in 0..i {
                assert!(r[(i, j)].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_size_rejected() {
        assert!(haar_orthogonal(0, 1).is_err());
    }
}
