//! Distances between persistence diagrams and persistence summaries.
//!
//! The bottleneck distance works on diagonal-augmented diagrams: every point
//! may be matched to the diagonal at cost `persistence / 2`. The Hausdorff
//! distance ignores multiplicities and comes in two flavours: on the raw
//! point sets (where an empty set is infinitely far from a non-empty one) or
//! with the diagonal added to both sides.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::persistence::{DiagramPoint, PersistenceDiagram};

/// Cap on the number of points (counted with multiplicity) a diagram may
/// expand to for matching.
pub const MAX_EXPANDED_POINTS: usize = 10_000;

/// A distance that may be `+inf`. Serialises as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceValue {
    Finite(f64),
    Infinite,
}

impl DistanceValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, DistanceValue::Infinite)
    }

    /// `f64::INFINITY` for the infinite case.
    pub fn as_f64(&self) -> f64 {
        match self {
            DistanceValue::Finite(v) => *v,
            DistanceValue::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            DistanceValue::Finite(v) => Some(*v),
            DistanceValue::Infinite => None,
        }
    }
}

impl fmt::Display for DistanceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceValue::Finite(v) => write!(f, "{v}"),
            DistanceValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for DistanceValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DistanceValue::Finite(v) => s.serialize_f64(*v),
            DistanceValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for DistanceValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(DistanceValue::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(DistanceValue::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

/// One endpoint of a witness: an entry of a diagram (index into
/// [`PersistenceDiagram::points`]) or the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Point(usize),
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub left: Endpoint,
    pub right: Endpoint,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Optimal matching, diagonal-to-diagonal pairs omitted.
    Matching(Vec<MatchedPair>),
    /// The pair realising a Hausdorff distance.
    PointPair(MatchedPair),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramDistanceResult {
    pub value: DistanceValue,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

/// Metric name used in serialised records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Bottleneck,
    Hausdorff,
    HausdorffDiagonal,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Bottleneck => "bottleneck",
            Metric::Hausdorff => "hausdorff",
            Metric::HausdorffDiagonal => "hausdorff_diagonal",
        })
    }
}

/// JSON record `{degree, metric, value | "inf", witness?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRecord {
    pub degree: usize,
    pub metric: Metric,
    pub value: DistanceValue,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

impl DistanceRecord {
    pub fn new(degree: usize, metric: Metric, result: DiagramDistanceResult) -> Self {
        Self { degree, metric, value: result.value, witness: result.witness }
    }
}

fn linf(a: &DiagramPoint, b: &DiagramPoint) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

fn diagonal_cost(a: &DiagramPoint) -> f64 {
    (a.death - a.birth) / 2.0
}

fn check_degrees(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<()> {
    if a.degree() != b.degree() {
        return invalid(format!("cannot compare degree {} with degree {}", a.degree(), b.degree()));
    }
    Ok(())
}

/// Points repeated by multiplicity, each tagged with its entry index.
fn expand(d: &PersistenceDiagram) -> Result<Vec<(usize, DiagramPoint)>> {
    let total = d.total_multiplicity();
    if total > MAX_EXPANDED_POINTS {
        return Err(Error::Resource(format!(
            "diagram expands to {total} points, above the matching cap of {MAX_EXPANDED_POINTS}"
        )));
    }
    let mut out = Vec::with_capacity(total);
    for (i, p) in d.points().iter().enumerate() {
        out.extend(std::iter::repeat_n((i, *p), p.multiplicity));
    }
    Ok(out)
}

/// Exact bottleneck distance between diagonal-augmented diagrams.
///
/// The optimum is one of the finitely many matching costs (point-to-point
/// L-infinity distances and half-persistences), so a binary search over the
/// sorted candidates with a perfect-matching feasibility test returns it
/// exactly.
pub fn bottleneck_distance(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> Result<DiagramDistanceResult> {
    check_degrees(d1, d2)?;
    let a = expand(d1)?;
    let b = expand(d2)?;
    if a.is_empty() && b.is_empty() {
        return Ok(DiagramDistanceResult { value: DistanceValue::Finite(0.0), witness: Some(Witness::Matching(Vec::new())) });
    }

    let mut candidates: Vec<f64> = Vec::with_capacity(a.len() * b.len() + a.len() + b.len() + 1);
    candidates.push(0.0);
    for (_, p) in &a {
        candidates.push(diagonal_cost(p));
        for (_, q) in &b {
            candidates.push(linf(p, q));
        }
    }
    candidates.extend(b.iter().map(|(_, q)| diagonal_cost(q)));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let graph = ThresholdGraph::new(&a, &b);
    // matching everything to the diagonal is always feasible at the largest candidate
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if graph.perfect_matching(candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let value = candidates[lo];
    let assignment = graph
        .perfect_matching(value)
        .expect("the largest candidate always admits a perfect matching");
    let witness = graph.witness(&assignment);
    Ok(DiagramDistanceResult { value: DistanceValue::Finite(value), witness: Some(Witness::Matching(witness)) })
}

/// Bipartite graph between `A ∪ diag(B)` and `B ∪ diag(A)`: left node
/// `i < |A|` is point `a_i`, left node `|A| + j` is the diagonal copy
/// reserved for `b_j`; right nodes symmetrically.
struct ThresholdGraph<'a> {
    a: &'a [(usize, DiagramPoint)],
    b: &'a [(usize, DiagramPoint)],
}

impl<'a> ThresholdGraph<'a> {
    fn new(a: &'a [(usize, DiagramPoint)], b: &'a [(usize, DiagramPoint)]) -> Self {
        Self { a, b }
    }

    fn size(&self) -> usize {
        self.a.len() + self.b.len()
    }

    fn cost(&self, left: usize, right: usize) -> Option<f64> {
        let (na, nb) = (self.a.len(), self.b.len());
        match (left < na, right < nb) {
            (true, true) => Some(linf(&self.a[left].1, &self.b[right].1)),
            // a_i to its own diagonal copy
            (true, false) => (right - nb == left).then(|| diagonal_cost(&self.a[left].1)),
            // b_j to its own diagonal copy
            (false, true) => (left - na == right).then(|| diagonal_cost(&self.b[right].1)),
            (false, false) => Some(0.0),
        }
    }

    /// Right-node assignment for each left node, if a perfect matching using
    /// only edges of cost `<= t` exists.
    fn perfect_matching(&self, t: f64) -> Option<Vec<usize>> {
        let size = self.size();
        let adjacency: Vec<Vec<usize>> = (0..size)
            .map(|l| (0..size).filter(|&r| self.cost(l, r).is_some_and(|c| c <= t)).collect())
            .collect();
        let mut match_right = vec![usize::MAX; size];
        for l in 0..size {
            let mut visited = vec![false; size];
            if !augment(l, &adjacency, &mut match_right, &mut visited) {
                return None;
            }
        }
        let mut match_left = vec![usize::MAX; size];
        for (r, &l) in match_right.iter().enumerate() {
            match_left[l] = r;
        }
        Some(match_left)
    }

    fn witness(&self, assignment: &[usize]) -> Vec<MatchedPair> {
        let (na, nb) = (self.a.len(), self.b.len());
        assignment
            .iter()
            .enumerate()
            .filter(|(l, r)| *l < na || **r < nb)
            .map(|(l, &r)| MatchedPair {
                left: if l < na { Endpoint::Point(self.a[l].0) } else { Endpoint::Diagonal },
                right: if r < nb { Endpoint::Point(self.b[r].0) } else { Endpoint::Diagonal },
                cost: self.cost(l, r).expect("assigned edges exist"),
            })
            .collect()
    }
}

/// Kuhn's augmenting path search from left node `l`.
fn augment(l: usize, adjacency: &[Vec<usize>], match_right: &mut [usize], visited: &mut [bool]) -> bool {
    for &r in &adjacency[l] {
        if visited[r] {
            continue;
        }
        visited[r] = true;
        if match_right[r] == usize::MAX || augment(match_right[r], adjacency, match_right, visited) {
            match_right[r] = l;
            return true;
        }
    }
    false
}

/// Hausdorff distance in the L-infinity norm. Multiplicities are ignored.
///
/// With `include_diagonal`, both sides are augmented with the diagonal, so a
/// point may also be matched to the diagonal at half its persistence. Without
/// it the raw conventions apply: `d_H(∅, ∅) = 0` and `d_H(A, ∅) = +inf` for
/// non-empty `A`.
pub fn hausdorff_distance(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    include_diagonal: bool,
) -> Result<DiagramDistanceResult> {
    check_degrees(d1, d2)?;
    let (p1, p2) = (d1.points(), d2.points());
    if !include_diagonal {
        match (p1.is_empty(), p2.is_empty()) {
            (true, true) => return Ok(DiagramDistanceResult { value: DistanceValue::Finite(0.0), witness: None }),
            (true, false) | (false, true) => {
                return Ok(DiagramDistanceResult { value: DistanceValue::Infinite, witness: None })
            }
            (false, false) => {}
        }
    }

    let mut worst: Option<MatchedPair> = None;
    let mut consider = |pair: MatchedPair| {
        if worst.is_none_or(|w| pair.cost > w.cost) {
            worst = Some(pair);
        }
    };
    for (i, p) in p1.iter().enumerate() {
        let nearest = nearest(p, p2, include_diagonal);
        consider(MatchedPair { left: Endpoint::Point(i), right: nearest.0, cost: nearest.1 });
    }
    for (j, q) in p2.iter().enumerate() {
        let nearest = nearest(q, p1, include_diagonal);
        consider(MatchedPair { left: nearest.0, right: Endpoint::Point(j), cost: nearest.1 });
    }
    // with the diagonal on both sides, diagonal points sit at distance 0
    match worst {
        Some(w) => Ok(DiagramDistanceResult { value: DistanceValue::Finite(w.cost), witness: Some(Witness::PointPair(w)) }),
        None => Ok(DiagramDistanceResult { value: DistanceValue::Finite(0.0), witness: None }),
    }
}

fn nearest(p: &DiagramPoint, others: &[DiagramPoint], include_diagonal: bool) -> (Endpoint, f64) {
    let mut best = if include_diagonal {
        (Endpoint::Diagonal, diagonal_cost(p))
    } else {
        (Endpoint::Diagonal, f64::INFINITY)
    };
    for (j, q) in others.iter().enumerate() {
        let c = linf(p, q);
        if c < best.1 {
            best = (Endpoint::Point(j), c);
        }
    }
    best
}

/// Largest `death - birth`; zero for an empty diagram.
pub fn max_persistence(d: &PersistenceDiagram) -> f64 {
    d.points().iter().map(DiagramPoint::persistence).fold(0.0, f64::max)
}

/// Largest `(death - birth) / death`; zero for an empty diagram.
pub fn max_relative_persistence(d: &PersistenceDiagram) -> Result<f64> {
    let mut best = 0.0_f64;
    for p in d.points() {
        if !(p.death > 0.0) {
            return Err(Error::InvalidDiagram(format!("pair ({}, {}) has zero death", p.birth, p.death)));
        }
        best = best.max(p.persistence() / p.death);
    }
    Ok(best)
}
