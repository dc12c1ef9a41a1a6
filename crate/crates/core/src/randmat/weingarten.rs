//! Degree-2 and degree-4 moments of entries of a Haar-distributed orthogonal
//! matrix. Indices are 1-based, matching the usual `g_{mk}` notation.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::{haar_orthogonal_with, seeded_rng};

fn check_index(n: usize, idx: usize) -> Result<()> {
    if idx == 0 || idx > n {
        return invalid(format!("index {idx} is outside [1, {n}]"));
    }
    Ok(())
}

fn ratio(num: i64, den: i64) -> Rational64 {
    Rational64::new(num, den)
}

/// `E[g_{mk} g_{tk}]` over `O(N)`: `1/N` if `m = t`, else 0.
pub fn wg_o2(n: usize, m: usize, t: usize, k: usize) -> Result<Rational64> {
    for idx in [m, t, k] {
        check_index(n, idx)?;
    }
    Ok(if m == t { ratio(1, n as i64) } else { Rational64::from_integer(0) })
}

/// Index patterns with a closed-form degree-4 moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum O4Pattern {
    /// `g_{mk}^2 g_{tq}^2`
    Squares { m: usize, t: usize, k: usize, q: usize },
    /// `g_{mk} g_{tq} g_{m'k} g_{t'q}` with `(m, t) != (m', t')`
    Mixed { m: usize, t: usize, m2: usize, t2: usize, k: usize, q: usize },
}

impl O4Pattern {
    /// The four `(row, column)` entries of the monomial.
    pub fn monomial(&self) -> Monomial {
        match *self {
            O4Pattern::Squares { m, t, k, q } => Monomial::new(vec![(m, k), (m, k), (t, q), (t, q)]),
            O4Pattern::Mixed { m, t, m2, t2, k, q } => Monomial::new(vec![(m, k), (t, q), (m2, k), (t2, q)]),
        }
    }
}

/// Exact `E` of a degree-4 pattern over `O(N)`, `N >= 2`, from the case tables.
pub fn wg_o4(n: usize, pattern: O4Pattern) -> Result<Rational64> {
    if n < 2 {
        return invalid("degree-4 orthogonal moments need N >= 2");
    }
    let n_i = n as i64;
    let same = ratio(1, n_i * (n_i + 2));
    let cross = ratio(-1, n_i * (n_i - 1) * (n_i + 2));
    match pattern {
        O4Pattern::Squares { m, t, k, q } => {
            for idx in [m, t, k, q] {
                check_index(n, idx)?;
            }
            Ok(match (k == q, m == t) {
                (true, true) => ratio(3, n_i * (n_i + 2)),
                (true, false) | (false, true) => same,
                (false, false) => ratio(n_i + 1, n_i * (n_i - 1) * (n_i + 2)),
            })
        }
        O4Pattern::Mixed { m, t, m2, t2, k, q } => {
            for idx in [m, t, m2, t2, k, q] {
                check_index(n, idx)?;
            }
            if (m, t) == (m2, t2) {
                return invalid("mixed pattern requires (m, t) != (m', t')");
            }
            let paired = m == t && m2 == t2 && m != m2;
            let swapped = m == t2 && t == m2 && m != t;
            Ok(match (k == q, paired || swapped) {
                (true, true) => same,
                (false, true) => cross,
                (_, false) => Rational64::from_integer(0),
            })
        }
    }
}

/// A product of entries `g_{row,col}` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub entries: Vec<(usize, usize)>,
}

impl Monomial {
    pub fn new(entries: Vec<(usize, usize)>) -> Self {
        Self { entries }
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }
}

/// Exact moment of a degree-2 or degree-4 monomial via the Weingarten
/// pairing sum `sum_{p, r} delta_p(rows) delta_r(cols) Wg(p, r)`.
pub fn haar_moment_exact(n: usize, monomial: &Monomial) -> Result<Rational64> {
    for &(i, j) in &monomial.entries {
        check_index(n, i)?;
        check_index(n, j)?;
    }
    let e = &monomial.entries;
    match monomial.degree() {
        2 => Ok(if e[0].0 == e[1].0 && e[0].1 == e[1].1 { ratio(1, n as i64) } else { Rational64::from_integer(0) }),
        4 => {
            if n < 2 {
                return invalid("degree-4 orthogonal moments need N >= 2");
            }
            let n_i = n as i64;
            let den = n_i * (n_i - 1) * (n_i + 2);
            const PAIRINGS: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
            let matches = |pairing: &[(usize, usize); 2], key: fn(&(usize, usize)) -> usize| {
                pairing.iter().all(|&(a, b)| key(&e[a]) == key(&e[b]))
            };
            let mut total = Rational64::from_integer(0);
            for (a, row_pairing) in PAIRINGS.iter().enumerate() {
                if !matches(row_pairing, |x| x.0) {
                    continue;
                }
                for (b, col_pairing) in PAIRINGS.iter().enumerate() {
                    if !matches(col_pairing, |x| x.1) {
                        continue;
                    }
                    total += if a == b { ratio(n_i + 1, den) } else { ratio(-1, den) };
                }
            }
            Ok(total)
        }
        other => invalid(format!("only degree 2 and 4 monomials are supported, got degree {other}")),
    }
}

/// First two moments of `||ê_i - ê_j||^2` for normalized-PCA scores of a
/// Gaussian noise cloud: mean `2s`, variance `(-8s^2 + 8(n-1)s)/(n+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentOracle {
    pub n: usize,
    pub s: usize,
    pub mean: Rational64,
    pub variance: Rational64,
}

impl MomentOracle {
    pub fn mean_f64(&self) -> f64 {
        *self.mean.numer() as f64 / *self.mean.denom() as f64
    }

    pub fn variance_f64(&self) -> f64 {
        *self.variance.numer() as f64 / *self.variance.denom() as f64
    }
}

pub fn moment_oracle(n: usize, s: usize) -> Result<MomentOracle> {
    if n < 2 {
        return invalid("moment oracle needs n >= 2");
    }
    if s == 0 || s >= n {
        return invalid(format!("need 1 <= s <= n - 1, got s={s}, n={n}"));
    }
    let (n_i, s_i) = (n as i64, s as i64);
    Ok(MomentOracle {
        n,
        s,
        mean: Rational64::from_integer(2 * s_i),
        variance: ratio(-8 * s_i * s_i + 8 * (n_i - 1) * s_i, n_i + 1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_err: f64,
}

/// Monte-Carlo average of a monomial over `reps` Haar-orthogonal samples.
pub fn mc_haar_moment(n: usize, monomial: &Monomial, reps: usize, seed: u64) -> Result<McEstimate> {
    if !matches!(monomial.degree(), 2 | 4) {
        return invalid(format!("only degree 2 and 4 monomials are supported, got {}", monomial.degree()));
    }
    if reps < 100 {
        return invalid(format!("need at least 100 replicates, got {reps}"));
    }
    for &(i, j) in &monomial.entries {
        check_index(n, i)?;
        check_index(n, j)?;
    }
    let mut rng = seeded_rng(seed, 0);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..reps {
        let q = haar_orthogonal_with(&mut rng, n)?;
        let v: f64 = monomial.entries.iter().map(|&(i, j)| q[(i - 1, j - 1)]).product();
        sum += v;
        sum_sq += v * v;
    }
    let m = reps as f64;
    let estimate = sum / m;
    let var = ((sum_sq - m * estimate * estimate) / (m - 1.0)).max(0.0);
    Ok(McEstimate { estimate, std_err: (var / m).sqrt() })
}
