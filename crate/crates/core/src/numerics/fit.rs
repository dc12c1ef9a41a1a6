use serde::{Deserialize, Serialize};

use super::solve_dense;
use crate::error::{invalid, Error, Result};

/// Least-squares parameters of `value ≈ x * sqrt(d - y) + z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrtFitParams {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub rss: f64,
}

impl SqrtFitParams {
    pub fn predict(&self, d: f64) -> f64 {
        self.x * (d - self.y).sqrt() + self.z
    }
}

const MAX_GRID_STEPS: usize = 4000;
const FINE_GRID_LEVELS: i32 = 30;
const MAX_GN_ITERATIONS: usize = 200;

/// Fits `x * sqrt(d - y) + z` by a grid over the shift `y` (with `x`, `z`
/// solved in closed form at each grid point) followed by Gauss–Newton
/// refinement of all three parameters.
pub fn fit_sqrt_model(ds: &[f64], values: &[f64]) -> Result<SqrtFitParams> {
    if ds.len() != values.len() {
        return invalid(format!("{} abscissae but {} values", ds.len(), values.len()));
    }
    if ds.len() < 4 {
        return invalid(format!("need at least 4 points, got {}", ds.len()));
    }
    if ds.iter().chain(values).any(|v| !v.is_finite()) {
        return invalid("fit data must be finite");
    }
    if ds.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("abscissae must be strictly increasing");
    }

    let first = ds[0];
    let span = ds[ds.len() - 1] - first;
    let step = ds.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let coarse = ((4.0 * span / step).ceil() as usize).clamp(1, MAX_GRID_STEPS);
    let shifts = (1..=coarse)
        .map(|k| first - step * k as f64)
        .chain((1..=FINE_GRID_LEVELS).map(|j| first - step * 2f64.powi(-j)));

    let mut best: Option<SqrtFitParams> = None;
    for y in shifts {
        if let Some(p) = profile(ds, values, y) {
            if best.is_none_or(|b| p.rss < b.rss) {
                best = Some(p);
            }
        }
    }
    let start = best.ok_or_else(|| Error::NumericFailure {
        message: "no admissible shift on the grid".into(),
        residual: f64::NAN,
    })?;
    let refined = gauss_newton(ds, values, start);
    if ![refined.x, refined.y, refined.z, refined.rss].iter().all(|v| v.is_finite()) {
        return Err(Error::NumericFailure {
            message: "Gauss-Newton refinement produced non-finite parameters".into(),
            residual: refined.rss,
        });
    }
    Ok(refined)
}

fn rss(ds: &[f64], values: &[f64], x: f64, y: f64, z: f64) -> f64 {
    ds.iter()
        .zip(values)
        .map(|(d, v)| (v - x * (d - y).sqrt() - z).powi(2))
        .sum()
}

/// Best `(x, z)` for a fixed shift; `None` if `y` is not below every abscissa.
fn profile(ds: &[f64], values: &[f64], y: f64) -> Option<SqrtFitParams> {
    if !(y < ds[0]) {
        return None;
    }
    let m = ds.len() as f64;
    let f: Vec<f64> = ds.iter().map(|d| (d - y).sqrt()).collect();
    let fbar = f.iter().sum::<f64>() / m;
    let vbar = values.iter().sum::<f64>() / m;
    let sff: f64 = f.iter().map(|a| (a - fbar).powi(2)).sum();
    let sfv: f64 = f.iter().zip(values).map(|(a, v)| (a - fbar) * (v - vbar)).sum();
    if !(sff > 0.0) {
        return None;
    }
    let x = sfv / sff;
    let z = vbar - x * fbar;
    Some(SqrtFitParams { x, y, z, rss: rss(ds, values, x, y, z) })
}

fn gauss_newton(ds: &[f64], values: &[f64], start: SqrtFitParams) -> SqrtFitParams {
    let mut cur = start;
    for _ in 0..MAX_GN_ITERATIONS {
        if cur.rss == 0.0 {
            break;
        }
        // normal equations J^T J delta = J^T r
        let mut jtj = [0.0; 9];
        let mut jtr = [0.0; 3];
        for (d, v) in ds.iter().zip(values) {
            let root = (d - cur.y).sqrt();
            let row = [root, -cur.x / (2.0 * root), 1.0];
            let r = v - cur.x * root - cur.z;
            for a in 0..3 {
                jtr[a] += row[a] * r;
                for b in 0..3 {
                    jtj[3 * a + b] += row[a] * row[b];
                }
            }
        }
        let Some(delta) = solve_dense(jtj.to_vec(), jtr.to_vec(), 1e-14) else {
            break;
        };
        let mut scale = 1.0;
        let mut accepted = None;
        while scale > 1e-12 {
            let (x, y, z) = (cur.x + scale * delta[0], cur.y + scale * delta[1], cur.z + scale * delta[2]);
            if y < ds[0] {
                let r = rss(ds, values, x, y, z);
                if r < cur.rss {
                    accepted = Some(SqrtFitParams { x, y, z, rss: r });
                    break;
                }
            }
            scale *= 0.5;
        }
        match accepted {
            Some(next) => {
                let gain = cur.rss - next.rss;
                cur = next;
                if gain <= 1e-15 * cur.rss.max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            None => break,
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_recovery() {
        let ds: Vec<f64> = (2..=20).map(|k| 10.0 * k as f64).collect();
        let vs: Vec<f64> = ds.iter().map(|d| 2.0 * (d - 10.0).sqrt() + 1.0).collect();
        let p = fit_sqrt_model(&ds, &vs).unwrap();
        assert!((p.x - 2.0).abs() < 1e-6, "{p:?}");
        assert!((p.y - 10.0).abs() < 1e-6, "{p:?}");
        assert!((p.z - 1.0).abs() < 1e-6, "{p:?}");
        assert!(p.rss <= 1e-10);
    }

    #[test]
    fn noiseless_recovery_off_grid() {
        // shift 13.7 is not on the coarse grid; Gauss-Newton has to find it
        let ds: Vec<f64> = (2..=20).map(|k| 10.0 * k as f64).collect();
        let vs: Vec<f64> = ds.iter().map(|d| 0.5 * (d - 13.7).sqrt() - 3.0).collect();
        let p = fit_sqrt_model(&ds, &vs).unwrap();
        assert!((p.x - 0.5).abs() < 1e-6 && (p.y - 13.7).abs() < 1e-5 && (p.z + 3.0).abs() < 1e-5, "{p:?}");
    }

    #[test]
    fn constant_data_gives_zero_scale() {
        let ds = [1.0, 2.0, 3.0, 4.0, 5.0];
        let p = fit_sqrt_model(&ds, &[4.0; 5]).unwrap();
        assert!(p.x.abs() < 1e-6);
        assert!((p.z - 4.0).abs() < 1e-6 || p.rss < 1e-12);
    }

    #[test]
    fn argument_checks() {
        assert!(fit_sqrt_model(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_sqrt_model(&[1.0, 2.0, 2.0, 3.0], &[1.0; 4]).is_err());
        assert!(fit_sqrt_model(&[1.0, 2.0, 3.0, 4.0], &[1.0; 3]).is_err());
    }

    #[test]
    fn shift_stays_below_data() {
        let ds = [101.0, 150.0, 200.0, 400.0, 800.0];
        let vs: Vec<f64> = ds.iter().map(|d: &f64| 0.035 * (d - 100.7).sqrt()).collect();
        let p = fit_sqrt_model(&ds, &vs).unwrap();
        assert!(p.y < 101.0);
        assert!((p.x - 0.035).abs() < 1e-6, "{p:?}");
    }
}
