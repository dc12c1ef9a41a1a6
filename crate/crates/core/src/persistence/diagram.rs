use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
    pub multiplicity: usize,
}

impl DiagramPoint {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// Finite persistence pairs of one homology degree. Identical pairs are
/// merged into one entry with a multiplicity; entries are sorted by
/// (birth, death).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    degree: usize,
    pairs: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    pub fn empty(degree: usize) -> Self {
        Self { degree, pairs: Vec::new() }
    }

    /// Builds a diagram, merging entries with bitwise-equal coordinates.
    /// Requires `0 <= birth < death < inf` and positive multiplicities.
    pub fn new(degree: usize, points: impl IntoIterator<Item = DiagramPoint>) -> Result<Self> {
        let mut pairs: Vec<DiagramPoint> = Vec::new();
        for p in points {
            if !(p.birth.is_finite() && p.death.is_finite()) {
                return Err(Error::InvalidDiagram(format!("non-finite pair ({}, {})", p.birth, p.death)));
            }
            if !(p.birth >= 0.0 && p.birth < p.death) {
                return Err(Error::InvalidDiagram(format!(
                    "pair ({}, {}) violates 0 <= birth < death",
                    p.birth, p.death
                )));
            }
            if p.multiplicity == 0 {
                return Err(Error::InvalidDiagram("multiplicity must be positive".into()));
            }
            pairs.push(p);
        }
        pairs.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
        let mut merged: Vec<DiagramPoint> = Vec::with_capacity(pairs.len());
        for p in pairs {
            match merged.last_mut() {
                Some(last) if last.birth == p.birth && last.death == p.death => last.multiplicity += p.multiplicity,
                _ => merged.push(p),
            }
        }
        Ok(Self { degree, pairs: merged })
    }

    /// Diagram from raw `(birth, death)` pairs, each with multiplicity one.
    pub fn from_pairs(degree: usize, pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        Self::new(
            degree,
            pairs.into_iter().map(|(birth, death)| DiagramPoint { birth, death, multiplicity: 1 }),
        )
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Distinct entries.
    pub fn points(&self) -> &[DiagramPoint] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Number of pairs counted with multiplicity.
    pub fn total_multiplicity(&self) -> usize {
        self.pairs.iter().map(|p| p.multiplicity).sum()
    }

    /// Whether the two diagrams agree as multisets once points closer than
    /// `tol` (in L-infinity) are identified. Intended for diagrams whose
    /// distinct clusters are separated by more than `2 tol`.
    pub fn matches_within(&self, other: &Self, tol: f64) -> bool {
        if self.degree != other.degree || self.total_multiplicity() != other.total_multiplicity() {
            return false;
        }
        let near = |a: &DiagramPoint, b: &DiagramPoint| {
            (a.birth - b.birth).abs() <= tol && (a.death - b.death).abs() <= tol
        };
        let mass = |d: &Self, p: &DiagramPoint| -> usize {
            d.pairs.iter().filter(|q| near(p, q)).map(|q| q.multiplicity).sum()
        };
        self.pairs.iter().chain(&other.pairs).all(|p| mass(self, p) == mass(other, p))
    }
}

/// CSV with header `degree,birth,death,multiplicity`, one row per distinct pair.
pub fn diagrams_to_csv(diagrams: &[PersistenceDiagram]) -> String {
    let mut out = String::from("degree,birth,death,multiplicity\n");
    for d in diagrams {
        for p in &d.pairs {
            writeln!(out, "{},{},{},{}", d.degree, p.birth, p.death, p.multiplicity)
                .expect("writing to a String cannot fail");
        }
    }
    out
}

/// Parses the CSV written by [`diagrams_to_csv`]. Degrees `0..=max_degree`
/// are always returned, empty where no rows exist.
pub fn diagrams_from_csv(text: &str, max_degree: usize) -> Result<Vec<PersistenceDiagram>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == "degree,birth,death,multiplicity" => {}
        _ => return invalid("missing 'degree,birth,death,multiplicity' header"),
    }
    let mut buckets: Vec<Vec<DiagramPoint>> = vec![Vec::new(); max_degree + 1];
    for line in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return invalid(format!("expected 4 fields in '{line}'"));
        }
        let bad = |what: &str| Error::InvalidArgument(format!("bad {what} in '{line}'"));
        let degree: usize = fields[0].parse().map_err(|_| bad("degree"))?;
        let birth: f64 = fields[1].parse().map_err(|_| bad("birth"))?;
        let death: f64 = fields[2].parse().map_err(|_| bad("death"))?;
        let multiplicity: usize = fields[3].parse().map_err(|_| bad("multiplicity"))?;
        if degree > max_degree {
            return invalid(format!("degree {degree} exceeds {max_degree}"));
        }
        buckets[degree].push(DiagramPoint { birth, death, multiplicity });
    }
    buckets
        .into_iter()
        .enumerate()
        .map(|(deg, pts)| PersistenceDiagram::new(deg, pts))
        .collect()
}
