use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::meb::{meb_radius_from_sq_dists, MAX_MEB_POINTS};
use crate::error::{invalid, Error, Result};
use crate::numerics::Matrix;
use crate::pointcloud::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filtration {
    Rips,
    Cech,
}

impl fmt::Display for Filtration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Filtration::Rips => "rips",
            Filtration::Cech => "cech",
        })
    }
}

impl FromStr for Filtration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rips" => Ok(Filtration::Rips),
            "cech" | "čech" => Ok(Filtration::Cech),
            other => invalid(format!("unknown filtration '{other}'")),
        }
    }
}

/// A simplex (strictly increasing vertex list) and the radius at which it enters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simplex {
    pub vertices: Vec<usize>,
    pub value: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

fn filtration_order(a: &Simplex, b: &Simplex) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then(a.vertices.len().cmp(&b.vertices.len()))
        .then_with(|| a.vertices.cmp(&b.vertices))
}

/// Face-closed simplicial filtration, sorted by (value, dimension, vertices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredComplex {
    n_vertices: usize,
    max_hom_dim: usize,
    simplices: Vec<Simplex>,
}

impl FilteredComplex {
    /// Validates and sorts a filtration. Simplices must have sorted distinct
    /// vertices below `n_vertices`, finite non-negative values, every facet
    /// present with a value no larger than the simplex, and dimension at most
    /// `max_hom_dim + 1`.
    pub fn new(n_vertices: usize, max_hom_dim: usize, mut simplices: Vec<Simplex>) -> Result<Self> {
        let mut values: HashMap<&[usize], f64> = HashMap::with_capacity(simplices.len());
        for s in &simplices {
            if s.vertices.is_empty() {
                return invalid("simplices need at least one vertex");
            }
            if s.vertices.windows(2).any(|w| w[0] >= w[1]) {
                return invalid(format!("vertices {:?} are not strictly increasing", s.vertices));
            }
            if s.vertices.iter().any(|&v| v >= n_vertices) {
                return invalid(format!("simplex {:?} uses a vertex >= {n_vertices}", s.vertices));
            }
            if s.dim() > max_hom_dim + 1 {
                return invalid(format!("simplex {:?} exceeds dimension {}", s.vertices, max_hom_dim + 1));
            }
            if !(s.value.is_finite() && s.value >= 0.0) {
                return invalid(format!("simplex {:?} has invalid value {}", s.vertices, s.value));
            }
            if values.insert(&s.vertices, s.value).is_some() {
                return invalid(format!("duplicate simplex {:?}", s.vertices));
            }
        }
        for s in &simplices {
            if s.vertices.len() < 2 {
                continue;
            }
            for skip in 0..s.vertices.len() {
                let facet: Vec<usize> = facet_without(&s.vertices, skip);
                match values.get(facet.as_slice()) {
                    None => return invalid(format!("facet {facet:?} of {:?} is missing", s.vertices)),
                    Some(&v) if v > s.value => {
                        return invalid(format!("facet {facet:?} enters after its coface {:?}", s.vertices))
                    }
                    Some(_) => {}
                }
            }
        }
        simplices.sort_by(filtration_order);
        Ok(Self { n_vertices, max_hom_dim, simplices })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Highest homology degree the complex is built to resolve.
    pub fn max_hom_dim(&self) -> usize {
        self.max_hom_dim
    }

    /// Largest simplex dimension present.
    pub fn max_dim(&self) -> usize {
        self.simplices.iter().map(Simplex::dim).max().unwrap_or(0)
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Value of the simplex with exactly these (sorted) vertices.
    pub fn value_of(&self, vertices: &[usize]) -> Option<f64> {
        self.simplices.iter().find(|s| s.vertices == vertices).map(|s| s.value)
    }
}

pub(crate) fn facet_without(vertices: &[usize], skip: usize) -> Vec<usize> {
    vertices
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, v)| *v)
        .collect()
}

/// Number of simplices in a full complex on `n` vertices resolving homology
/// up to degree `max_hom_dim`: `sum_{k=1}^{N+2} C(n, k)`.
pub fn predicted_simplex_count(n: usize, max_hom_dim: usize) -> u128 {
    (1..=(max_hom_dim + 2).min(n)).map(|k| super::binomial(n, k)).sum()
}

fn check_sizes(n: usize, max_hom_dim: usize) -> Result<()> {
    if n < 2 {
        return invalid(format!("need at least two points, got {n}"));
    }
    if max_hom_dim + 2 > n {
        return invalid(format!(
            "homology degree {max_hom_dim} is trivial for {n} points (must be <= n - 2)"
        ));
    }
    Ok(())
}

/// Lexicographic `k`-subsets of `0..n`.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 || k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Rips filtration from a distance matrix: a simplex enters at half its
/// largest edge length; vertices enter at 0.
pub fn rips_complex(dist: &Matrix, max_hom_dim: usize) -> Result<FilteredComplex> {
    if !dist.is_square() {
        return invalid("distance matrix must be square");
    }
    let n = dist.rows();
    check_sizes(n, max_hom_dim)?;
    if dist.asymmetry() > 1e-12 * dist.max_abs().max(1.0) {
        return invalid("distance matrix must be symmetric");
    }
    if (0..n).any(|i| dist[(i, i)] != 0.0) {
        return invalid("distance matrix must have a zero diagonal");
    }
    if dist.as_slice().iter().any(|v| *v < 0.0) {
        return invalid("distances must be non-negative");
    }
    let mut simplices = Vec::new();
    for k in 1..=(max_hom_dim + 2) {
        for_each_subset(n, k, |sub| {
            let mut value = 0.0_f64;
            for (a, &i) in sub.iter().enumerate() {
                for &j in &sub[a + 1..] {
                    value = value.max(dist[(i, j)] / 2.0);
                }
            }
            simplices.push(Simplex { vertices: sub.to_vec(), value });
        });
    }
    FilteredComplex::new(n, max_hom_dim, simplices)
}

/// Čech filtration: a simplex enters at the radius of the smallest ball
/// enclosing its points.
pub fn cech_complex(cloud: &PointCloud, max_hom_dim: usize) -> Result<FilteredComplex> {
    let n = cloud.len();
    check_sizes(n, max_hom_dim)?;
    if max_hom_dim + 2 > MAX_MEB_POINTS {
        return invalid(format!("Čech simplices are limited to {MAX_MEB_POINTS} vertices"));
    }
    let sq = Matrix::from_fn(n, n, |i, j| {
        let (a, b) = (cloud.point(i), cloud.point(j));
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    });
    let mut values: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut simplices = Vec::new();
    for k in 1..=(max_hom_dim + 2) {
        for_each_subset(n, k, |sub| {
            let mut value = meb_radius_from_sq_dists(&sq, sub);
            // keep the filtration monotone under last-bit rounding
            if k > 1 {
                for skip in 0..k {
                    value = value.max(values[&facet_without(sub, skip)]);
                }
            }
            values.insert(sub.to_vec(), value);
            simplices.push(Simplex { vertices: sub.to_vec(), value });
        });
    }
    FilteredComplex::new(n, max_hom_dim, simplices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointcloud::pairwise_distances;

    fn square() -> PointCloud {
        PointCloud::from_points(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn subsets_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(predicted_simplex_count(4, 1), 4 + 6 + 4);
    }

    #[test]
    fn rips_equilateral() {
        let d = Matrix::from_rows(&[vec![0.0, 2.0, 2.0], vec![2.0, 0.0, 2.0], vec![2.0, 2.0, 0.0]]).unwrap();
        let k = rips_complex(&d, 1).unwrap();
        assert_eq!(k.len(), 7);
        assert_eq!(k.value_of(&[0, 1]), Some(1.0));
        assert_eq!(k.value_of(&[0, 1, 2]), Some(1.0));
        assert_eq!(k.value_of(&[2]), Some(0.0));
    }

    #[test]
    fn rips_square() {
        let k = rips_complex(&pairwise_distances(&square()), 1).unwrap();
        assert_eq!(k.value_of(&[0, 1]), Some(0.5));
        assert_eq!(k.value_of(&[1, 2]), Some(0.5));
        assert!((k.value_of(&[0, 2]).unwrap() - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(k.max_dim(), 2);
    }

    #[test]
    fn rips_rejects_trivial_degree() {
        let d = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(rips_complex(&d, 1).is_err());
        assert!(rips_complex(&d, 0).is_ok());
        let bad = Matrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert!(rips_complex(&bad, 0).is_err());
    }

    #[test]
    fn cech_small_cases() {
        let two = PointCloud::from_points(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(cech_complex(&two, 0).unwrap().value_of(&[0, 1]), Some(1.0));
        let tri = PointCloud::from_points(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let k = cech_complex(&tri, 1).unwrap();
        assert!((k.value_of(&[0, 1, 2]).unwrap() - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(cech_complex(&tri, 2).is_err());
    }

    #[test]
    fn complex_validation() {
        let missing_face = vec![
            Simplex { vertices: vec![0], value: 0.0 },
            Simplex { vertices: vec![0, 1], value: 1.0 },
        ];
        assert!(FilteredComplex::new(2, 0, missing_face).is_err());
        let late_face = vec![
            Simplex { vertices: vec![0], value: 0.0 },
            Simplex { vertices: vec![1], value: 2.0 },
            Simplex { vertices: vec![0, 1], value: 1.0 },
        ];
        assert!(FilteredComplex::new(2, 0, late_face).is_err());
        let unsorted = vec![Simplex { vertices: vec![1, 0], value: 0.0 }];
        assert!(FilteredComplex::new(2, 0, unsorted).is_err());
    }

    #[test]
    fn sort_order_breaks_ties_by_dimension_then_vertices() {
        let d = Matrix::from_rows(&[vec![0.0, 2.0, 2.0], vec![2.0, 0.0, 2.0], vec![2.0, 2.0, 0.0]]).unwrap();
        let k = rips_complex(&d, 1).unwrap();
        let order: Vec<Vec<usize>> = k.simplices().iter().map(|s| s.vertices.clone()).collect();
        assert_eq!(
            order,
            vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
    }
}
