//! Original, noise and observed point clouds.
//!
//! An original cloud lives in the first `s` coordinates of `R^d` (the
//! essential dimension) and is exactly zero elsewhere. Noise clouds carry
//! i.i.d. `N(0, nu)` coordinates and the observed cloud is their pointwise sum.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{seeded_rng, Matrix};

/// `n` points in `R^d`, the first `essential_dim` coordinates of which carry
/// the signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    d: usize,
    essential_dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(d: usize, essential_dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return invalid("a point cloud needs at least one point");
        }
        if d == 0 || essential_dim == 0 || essential_dim > d {
            return invalid(format!("need 1 <= s <= d, got s={essential_dim}, d={d}"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != d {
                return invalid(format!("point {i} has {} coordinates, expected {d}", p.len()));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return invalid(format!("point {i} has a non-finite coordinate"));
            }
        }
        Ok(Self { d, essential_dim, points })
    }

    /// Cloud with every coordinate potentially active (`s = d`).
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let d = points.first().map_or(0, Vec::len);
        Self::new(d, d, points)
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn essential_dim(&self) -> usize {
        self.essential_dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Same points shifted by `offset`.
    pub fn translated(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.d {
            return invalid("offset length must equal the ambient dimension");
        }
        let points = self
            .points
            .iter()
            .map(|p| p.iter().zip(offset).map(|(a, b)| a + b).collect())
            .collect();
        Self::new(self.d, self.d, points)
    }

    /// `n x n` matrix of inner products `<z_i, z_j>`.
    pub fn gram(&self) -> Matrix {
        let n = self.len();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = dot(&self.points[i], &self.points[j]);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    /// Serialises as CSV: a `# d=<d> n=<n> s=<s>` header then one point per row.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# d={} n={} s={}\n", self.d, self.len(), self.essential_dim);
        for p in &self.points {
            let mut first = true;
            for v in p {
                if !first {
                    out.push(',');
                }
                first = false;
                write!(out, "{v}").expect("writing to a String cannot fail");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidArgument("empty point-cloud file".into()))?;
        let fields = header
            .strip_prefix('#')
            .ok_or_else(|| Error::InvalidArgument("missing '# d=.. n=.. s=..' header".into()))?;
        let (mut d, mut n, mut s) = (None, None, None);
        for kv in fields.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("bad header field '{kv}'")))?;
            let v: usize = v
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad header value '{kv}'")))?;
            match k {
                "d" => d = Some(v),
                "n" => n = Some(v),
                "s" => s = Some(v),
                _ => return invalid(format!("unknown header field '{k}'")),
            }
        }
        let (Some(d), Some(n), Some(s)) = (d, n, s) else {
            return invalid("header must define d, n and s");
        };
        let points = lines
            .map(|l| {
                l.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::InvalidArgument(format!("bad coordinate '{t}'")))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if points.len() != n {
            return invalid(format!("header says n={n} but file has {} rows", points.len()));
        }
        Self::new(d, s, points)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Built-in original shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `n` equispaced points on the unit circle in coordinates 1–2.
    Circle,
    /// Uniform samples from the cube `[-1, 1]^s`.
    UniformSquare,
    /// Caller-supplied points in `R^s`, embedded verbatim.
    CustomPoints(Vec<Vec<f64>>),
}

/// Generates an original cloud of `n` points in `R^d` supported on the first
/// `s` coordinates.
pub fn gen_original(shape: &Shape, n: usize, s: usize, d: usize, seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return invalid("cloud size must be positive");
    }
    if s == 0 || s > d {
        return invalid(format!("essential dimension must satisfy 1 <= s <= d, got s={s}, d={d}"));
    }
    let heads: Vec<Vec<f64>> = match shape {
        Shape::Circle => {
            if s < 2 {
                return invalid("circle needs s >= 2");
            }
            (0..n)
                .map(|k| {
                    let angle = TAU * k as f64 / n as f64;
                    let mut head = vec![0.0; s];
                    head[0] = angle.cos();
                    head[1] = angle.sin();
                    head
                })
                .collect()
        }
        Shape::UniformSquare => {
            let mut rng = seeded_rng(seed, 0);
            (0..n)
                .map(|_| (0..s).map(|_| rng.random_range(-1.0..=1.0)).collect())
                .collect()
        }
        Shape::CustomPoints(pts) => {
            if pts.len() != n {
                return invalid(format!("expected {n} custom points, got {}", pts.len()));
            }
            if let Some(bad) = pts.iter().position(|p| p.len() != s) {
                return invalid(format!("custom point {bad} does not have {s} coordinates"));
            }
            pts.clone()
        }
    };
    let points = heads
        .into_iter()
        .map(|mut head| {
            head.resize(d, 0.0);
            head
        })
        .collect();
    PointCloud::new(d, s, points)
}

/// `n` points with i.i.d. `N(0, nu)` coordinates in `R^d`.
pub fn gen_noise(n: usize, d: usize, nu: f64, seed: u64) -> Result<PointCloud> {
    if n == 0 || d == 0 {
        return invalid(format!("noise cloud needs n, d >= 1, got n={n}, d={d}"));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return invalid(format!("noise variance must be positive, got {nu}"));
    }
    let sd = nu.sqrt();
    let mut rng = seeded_rng(seed, 0);
    let points = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    sd * z
                })
                .collect()
        })
        .collect();
    PointCloud::new(d, d, points)
}

/// Observed cloud `x'_i = x_i + e_i`.
pub fn observe(original: &PointCloud, noise: &PointCloud) -> Result<PointCloud> {
    if original.len() != noise.len() || original.d != noise.d {
        return invalid(format!(
            "shape mismatch: original is {}x{}, noise is {}x{}",
            original.len(),
            original.d,
            noise.len(),
            noise.d
        ));
    }
    let points = original
        .points
        .iter()
        .zip(&noise.points)
        .map(|(x, e)| x.iter().zip(e).map(|(a, b)| a + b).collect())
        .collect();
    PointCloud::new(original.d, original.d, points)
}

/// Euclidean distance matrix of a cloud.
pub fn pairwise_distances(cloud: &PointCloud) -> Matrix {
    let n = cloud.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = distance(&cloud.points[i], &cloud.points[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// How far an observed cloud is from the regular-simplex limit shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub nu: f64,
    pub d: usize,
    /// `max_i | ||x'_i|| - sqrt(nu d) |`
    pub max_norm_dev: f64,
    /// `max_{i<j} | ||x'_i - x'_j|| - sqrt(2 nu d) |`
    pub max_pair_dev: f64,
    /// `max_{i<j} |cos angle(x'_i, x'_j)|`
    pub max_abs_cos: f64,
}

pub fn geometry_report(cloud: &PointCloud, nu: f64) -> Result<GeometryReport> {
    if cloud.len() < 2 {
        return invalid("geometry report needs at least two points");
    }
    if !(nu > 0.0) {
        return invalid(format!("noise variance must be positive, got {nu}"));
    }
    let d = cloud.d;
    let norm_target = (nu * d as f64).sqrt();
    let pair_target = (2.0 * nu * d as f64).sqrt();
    let norms: Vec<f64> = cloud.points.iter().map(|p| norm(p)).collect();
    let max_norm_dev = norms.iter().map(|r| (r - norm_target).abs()).fold(0.0, f64::max);
    let mut max_pair_dev = 0.0_f64;
    let mut max_abs_cos = 0.0_f64;
    for i in 0..cloud.len() {
        for j in (i + 1)..cloud.len() {
            let (a, b) = (&cloud.points[i], &cloud.points[j]);
            max_pair_dev = max_pair_dev.max((distance(a, b) - pair_target).abs());
            let denom = norms[i] * norms[j];
            if denom > 0.0 {
                max_abs_cos = max_abs_cos.max((dot(a, b) / denom).abs().min(1.0));
            }
        }
    }
    Ok(GeometryReport { nu, d, max_norm_dev, max_pair_dev, max_abs_cos })
}
