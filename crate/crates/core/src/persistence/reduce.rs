use std::collections::HashMap;

use super::complex::facet_without;
use super::{DiagramPoint, FilteredComplex, PersistenceDiagram};
use crate::error::{invalid, Result};

/// Column-reduction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Left-to-right column additions over the whole matrix.
    #[default]
    Standard,
    /// Reduces dimensions from the top down and zeroes every column whose
    /// index already appeared as a pivot.
    Clearing,
}

const NONE: usize = usize::MAX;

/// Reduced persistent homology over Z/2 in degrees `0..=max_hom_dim`.
pub fn compute_diagrams(complex: &FilteredComplex) -> Result<Vec<PersistenceDiagram>> {
    compute_diagrams_with(complex, Reduction::Standard)
}

pub fn compute_diagrams_with(complex: &FilteredComplex, reduction: Reduction) -> Result<Vec<PersistenceDiagram>> {
    let simplices = complex.simplices();
    // column 0 is the empty simplex at value 0 (augmented chain complex)
    let m = simplices.len() + 1;
    let index: HashMap<&[usize], usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices.as_slice(), i + 1))
        .collect();
    let value = |col: usize| if col == 0 { 0.0 } else { simplices[col - 1].value };
    // dimension shifted by one so the empty simplex is 0
    let shifted_dim = |col: usize| if col == 0 { 0 } else { simplices[col - 1].vertices.len() };

    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(m);
    columns.push(Vec::new());
    for s in simplices {
        let mut col: Vec<usize> = if s.vertices.len() == 1 {
            vec![0]
        } else {
            (0..s.vertices.len())
                .map(|skip| {
                    let facet = facet_without(&s.vertices, skip);
                    index.get(facet.as_slice()).copied().ok_or_else(|| {
                        crate::Error::InvalidArgument(format!("facet {facet:?} missing from complex"))
                    })
                })
                .collect::<Result<_>>()?
        };
        col.sort_unstable();
        columns.push(col);
    }

    let mut owner = vec![NONE; m];
    match reduction {
        Reduction::Standard => {
            for j in 0..m {
                reduce_column(&mut columns, &mut owner, j);
            }
        }
        Reduction::Clearing => {
            let top = (0..m).map(shifted_dim).max().unwrap_or(0);
            let mut cleared = vec![false; m];
            for dim in (0..=top).rev() {
                for j in (0..m).filter(|&j| shifted_dim(j) == dim) {
                    if cleared[j] {
                        columns[j].clear();
                        continue;
                    }
                    if let Some(low) = reduce_column(&mut columns, &mut owner, j) {
                        cleared[low] = true;
                    }
                }
            }
        }
    }

    let n_degrees = complex.max_hom_dim() + 1;
    let mut buckets: Vec<Vec<DiagramPoint>> = vec![Vec::new(); n_degrees];
    for (row, &col) in owner.iter().enumerate() {
        if col == NONE || row == 0 {
            continue;
        }
        let degree = shifted_dim(row) - 1;
        if degree >= n_degrees {
            continue;
        }
        let (birth, death) = (value(row), value(col));
        if death > birth {
            buckets[degree].push(DiagramPoint { birth, death, multiplicity: 1 });
        }
    }

    // every non-pivot row with a zero column is an essential class
    for row in 0..m {
        let deg = shifted_dim(row);
        if owner[row] == NONE && columns[row].is_empty() && deg >= 1 && deg <= n_degrees {
            return invalid(format!(
                "degree {} class born at {} never dies; the complex is not acyclic up to degree {}",
                deg - 1,
                value(row),
                n_degrees - 1
            ));
        }
    }

    buckets
        .into_iter()
        .enumerate()
        .map(|(deg, pts)| PersistenceDiagram::new(deg, pts))
        .collect()
}

/// Reduces column `j` against earlier pivots; returns its pivot row.
fn reduce_column(columns: &mut [Vec<usize>], owner: &mut [usize], j: usize) -> Option<usize> {
    let mut col = std::mem::take(&mut columns[j]);
    while let Some(&low) = col.last() {
        let other = owner[low];
        if other == NONE {
            owner[low] = j;
            columns[j] = col;
            return Some(low);
        }
        col = symmetric_difference(&col, &columns[other]);
    }
    columns[j] = col;
    None
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
