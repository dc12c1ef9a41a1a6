use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use hdlss_tda::metrics::DistanceValue;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Format};
use crate::error::{CliError, Result};

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub experiment: String,
    pub d: usize,
    pub seed: u64,
    pub degree: Option<usize>,
    pub metric: String,
    pub target_pair: String,
    pub value: DistanceValue,
    pub runtime_ms: Option<u64>,
}

impl Record {
    /// Grouping key used in the aggregate, e.g. `degree1/hausdorff/original_vs_observed`.
    pub fn series_key(&self) -> String {
        match self.degree {
            Some(k) => format!("degree{k}/{}/{}", self.metric, self.target_pair),
            None => format!("{}/{}", self.metric, self.target_pair),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub name: String,
    pub passed: bool,
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerD {
    pub d: usize,
    pub medians: BTreeMap<String, DistanceValue>,
    pub iqr: BTreeMap<String, DistanceValue>,
    /// Derived from the medians: `bottleneck_over_sqrt_d` and
    /// `bottleneck_minus_leading` (leading term `sqrt(2 nu d)/4`).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub normalized: BTreeMap<String, DistanceValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Vanishing,
    Bounded,
    Growing,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub config: ExperimentConfig,
    pub per_d: Vec<PerD>,
    pub trend_labels: BTreeMap<String, Trend>,
    /// Similarity class per `degree{k}/{target_pair}`.
    pub classification: BTreeMap<String, String>,
    pub oracle_results: Vec<OracleResult>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<Record>,
    pub aggregate: Aggregate,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig, records: Vec<Record>, oracle_results: Vec<OracleResult>) -> Self {
        let aggregate = aggregate(config, &records, oracle_results);
        Self { records, aggregate }
    }

    pub fn oracles_passed(&self) -> bool {
        self.aggregate.oracle_results.iter().all(|o| o.passed)
    }

    /// Median of a series at `d`, if recorded.
    pub fn median(&self, d: usize, key: &str) -> Option<DistanceValue> {
        self.aggregate.per_d.iter().find(|p| p.d == d)?.medians.get(key).copied()
    }
}

/// Type-7 (linear interpolation) quantile of sorted values; `+inf` sorts last.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    if lo == hi || sorted[lo] == sorted[hi] {
        return sorted[lo];
    }
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn dv(v: f64) -> DistanceValue {
    if v.is_infinite() {
        DistanceValue::Infinite
    } else {
        DistanceValue::Finite(v)
    }
}

/// Labels a series of medians ordered by increasing `d`.
pub fn trend_label(medians: &[DistanceValue]) -> Trend {
    if medians.iter().any(|m| m.is_infinite()) {
        return Trend::Unbounded;
    }
    let v: Vec<f64> = medians.iter().map(|m| m.as_f64()).collect();
    if v.len() < 2 {
        return Trend::Bounded;
    }
    let (first, last) = (v[0], v[v.len() - 1]);
    if v.windows(2).all(|w| w[1] > w[0]) && last >= 2.0 * first {
        Trend::Growing
    } else if v.windows(2).all(|w| w[1] < w[0]) && last <= first / 2.0 {
        Trend::Vanishing
    } else {
        Trend::Bounded
    }
}

/// Empirical similarity class from the bottleneck and Hausdorff labels.
pub fn classify(bottleneck: Trend, hausdorff: Option<Trend>) -> String {
    match bottleneck {
        Trend::Growing | Trend::Unbounded => "strong bottleneck inconsistency".into(),
        Trend::Vanishing => "bottleneck consistency".into(),
        Trend::Bounded => match hausdorff {
            Some(Trend::Vanishing) => "bottleneck inconsistency (sub-class I)".into(),
            Some(Trend::Bounded) => "bottleneck inconsistency (sub-class II)".into(),
            Some(_) => "bottleneck inconsistency (sub-class III)".into(),
            None => "bottleneck inconsistency".into(),
        },
    }
}

/// Computes medians, IQRs, trend labels and classes from the records alone.
pub fn aggregate(config: ExperimentConfig, records: &[Record], oracle_results: Vec<OracleResult>) -> Aggregate {
    let mut cells: BTreeMap<usize, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for r in records {
        cells.entry(r.d).or_default().entry(r.series_key()).or_default().push(r.value.as_f64());
    }
    let mut per_d = Vec::with_capacity(cells.len());
    for (d, series) in cells {
        let mut medians = BTreeMap::new();
        let mut iqr = BTreeMap::new();
        for (key, mut values) in series {
            values.sort_by(f64::total_cmp);
            medians.insert(key.clone(), dv(quantile(&values, 0.5)));
            let (q1, q3) = (quantile(&values, 0.25), quantile(&values, 0.75));
            iqr.insert(key, if q3.is_infinite() { DistanceValue::Infinite } else { dv(q3 - q1) });
        }
        let mut normalized = BTreeMap::new();
        if config.experiment == crate::config::Experiment::Curse {
            let leading = (2.0 * config.nu * d as f64).sqrt() / 4.0;
            for (key, m) in &medians {
                if let Some(rest) = key.strip_suffix("/bottleneck/original_vs_observed") {
                    normalized.insert(format!("{rest}/bottleneck_over_sqrt_d"), dv(m.as_f64() / (d as f64).sqrt()));
                    normalized.insert(format!("{rest}/bottleneck_minus_leading"), dv(m.as_f64() - leading));
                }
            }
        }
        per_d.push(PerD { d, medians, iqr, normalized });
    }

    let mut trend_labels = BTreeMap::new();
    if per_d.len() >= 2 {
        let keys: Vec<String> = per_d[0].medians.keys().cloned().collect();
        for key in keys {
            let is_distance = key.contains("/bottleneck/") || key.contains("/hausdorff/");
            let series: Option<Vec<DistanceValue>> = per_d.iter().map(|p| p.medians.get(&key).copied()).collect();
            if let (true, Some(series)) = (is_distance, series) {
                trend_labels.insert(key, trend_label(&series));
            }
        }
    }
    let mut classification = BTreeMap::new();
    for (key, label) in &trend_labels {
        if let Some((degree, pair)) = key.split_once("/bottleneck/") {
            if pair.starts_with("original_vs_") {
                let h = trend_labels.get(&format!("{degree}/hausdorff/{pair}")).copied();
                classification.insert(format!("{degree}/{pair}"), classify(*label, h));
            }
        }
    }
    Aggregate { config, per_d, trend_labels, classification, oracle_results, extras: BTreeMap::new() }
}

pub fn records_to_csv(records: &[Record]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["experiment", "d", "seed", "degree", "metric", "target_pair", "value", "runtime_ms"])?;
    for r in records {
        w.write_record([
            r.experiment.clone(),
            r.d.to_string(),
            r.seed.to_string(),
            r.degree.map(|k| k.to_string()).unwrap_or_default(),
            r.metric.clone(),
            r.target_pair.clone(),
            r.value.to_string(),
            r.runtime_ms.map(|t| t.to_string()).unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt(s: &str) -> Option<&str> {
    if s.is_empty() {
        None
    } else {
        Some(s)
    }
}

pub fn records_from_csv(text: &str) -> Result<Vec<Record>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let bad = |what: &str| CliError::Config(format!("bad {what} in CSV row {:?}", row));
        out.push(Record {
            experiment: field(0).to_string(),
            d: field(1).parse().map_err(|_| bad("d"))?,
            seed: field(2).parse().map_err(|_| bad("seed"))?,
            degree: opt(field(3)).map(|s| s.parse()).transpose().map_err(|_| bad("degree"))?,
            metric: field(4).to_string(),
            target_pair: field(5).to_string(),
            value: match field(6) {
                "inf" => DistanceValue::Infinite,
                s => DistanceValue::Finite(s.parse().map_err(|_| bad("value"))?),
            },
            runtime_ms: opt(field(7)).map(|s| s.parse()).transpose().map_err(|_| bad("runtime_ms"))?,
        });
    }
    Ok(out)
}

/// First 12 hex digits of the SHA-256 of the config's JSON form.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let json = serde_json::to_string(config).expect("config serialises");
    Sha256::digest(json.as_bytes()).iter().take(6).map(|b| format!("{b:02x}")).collect()
}

pub fn output_path(config: &ExperimentConfig, format: Format) -> PathBuf {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    config.out.join(format!("{}-{}.{ext}", config.experiment, config_hash(config)))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

/// Writes the per-record CSV or the JSON aggregate under `config.out`,
/// overwriting any previous file for the same config.
pub fn emit_report(report: &ExperimentReport, format: Format) -> Result<PathBuf> {
    let path = output_path(&report.aggregate.config, format);
    let contents = match format {
        Format::Csv => records_to_csv(&report.records)?,
        Format::Json => serde_json::to_string_pretty(&report.aggregate)? + "\n",
    };
    write(&path, &contents)?;
    Ok(path)
}
