//! Batch routing and benchmark runs, and the CSV/JSON files they produce.
//!
//! Route runs write `summary.csv` (one row per region, runtime included)
//! and `trend.csv` (one row per region and round). Bench runs write
//! `table.csv` and `manifest.json`, which contain no timing and are
//! byte-identical across runs with the same inputs; per-run timing goes to
//! the optional `timing.csv`.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::design_io::{generate_region, parse_region, DesignIoError, GeneratorParams, RegionDescriptor};
use crate::env::{rrr_iterate, EnvConfig, EnvError, RrrConfig};
use crate::heuristics::{exhaustive_best_order, OrderingPolicy, PolicyError};
use crate::metrics::{self, MetricsSnapshot};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: DesignIoError },
    #[error(transparent)]
    Design(#[from] DesignIoError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl ReportError {
    /// Input problems exit with 2; everything else is a routing failure.
    pub fn is_input_error(&self) -> bool {
        matches!(self, ReportError::Read { .. } | ReportError::Parse { .. } | ReportError::Design(_))
    }
}

pub fn load_region(path: &Path) -> Result<RegionDescriptor, ReportError> {
    let bytes = fs::read(path).map_err(|source| ReportError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_region(&bytes).map_err(|source| ReportError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// `count` generated regions with consecutive seeds from `seed`.
pub fn generate_regions(count: u32, seed: u64, params: &GeneratorParams) -> Result<Vec<RegionDescriptor>, ReportError> {
    (0..count as u64)
        .map(|i| generate_region(seed + i, params).map_err(ReportError::from))
        .collect()
}

/// An ordering policy, or the brute-force best order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicyChoice {
    Heuristic(OrderingPolicy),
    Exhaustive,
}

impl PolicyChoice {
    pub fn resolve(&self, region: &RegionDescriptor, env: EnvConfig) -> Result<OrderingPolicy, PolicyError> {
        match self {
            PolicyChoice::Heuristic(p) => Ok(p.clone()),
            PolicyChoice::Exhaustive => Ok(OrderingPolicy::Explicit(exhaustive_best_order(region, env)?.0)),
        }
    }
}

impl fmt::Display for PolicyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyChoice::Heuristic(p) => write!(f, "{p}"),
            PolicyChoice::Exhaustive => f.write_str("exhaustive"),
        }
    }
}

impl FromStr for PolicyChoice {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("exhaustive") {
            Ok(PolicyChoice::Exhaustive)
        } else {
            s.parse().map(PolicyChoice::Heuristic)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct MetricColumns {
    wirelength: u64,
    vias: u64,
    open: u64,
    short: u64,
    spacing: u64,
    min_area: u64,
    drv: u64,
    /// Real-unit cost.
    cost: f64,
}

impl MetricColumns {
    fn new(s: &MetricsSnapshot, env: &EnvConfig) -> Self {
        Self {
            wirelength: s.wirelength,
            vias: s.via_count,
            open: s.drv.open,
            short: s.drv.short,
            spacing: s.drv.spacing,
            min_area: s.drv.min_area,
            drv: s.drv_count(),
            cost: metrics::cost(s, &env.weights).real(),
        }
    }

    fn fields(&self) -> [String; 8] {
        [
            self.wirelength.to_string(),
            self.vias.to_string(),
            self.open.to_string(),
            self.short.to_string(),
            self.spacing.to_string(),
            self.min_area.to_string(),
            self.drv.to_string(),
            self.cost.to_string(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct RouteResult {
    pub region: String,
    pub policy: String,
    pub snapshots: Vec<MetricsSnapshot>,
    pub runtime_secs: f64,
}

impl RouteResult {
    pub fn final_snapshot(&self) -> MetricsSnapshot {
        *self.snapshots.last().expect("initial routing")
    }
}

/// Rip-up-and-reroute of one region under `policy`.
pub fn route_region(
    region: &RegionDescriptor,
    policy: &PolicyChoice,
    iterations: u32,
    env: EnvConfig,
) -> Result<RouteResult, ReportError> {
    let started = Instant::now();
    let resolved = policy.resolve(region, env)?;
    let config = RrrConfig {
        env,
        overlap_penalty: env.weights.drv,
        measure_runtime: true,
        ..RrrConfig::default()
    };
    let out = rrr_iterate(region, &resolved, iterations, &config)?;
    Ok(RouteResult {
        region: region.name.clone(),
        policy: policy.to_string(),
        snapshots: out.snapshots,
        runtime_secs: started.elapsed().as_secs_f64(),
    })
}

fn csv_writer(w: impl Write) -> csv::Writer<impl Write> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

/// Final metrics per region: `region,policy,iterations,wirelength,vias,open,short,spacing,min_area,drv,cost,runtime_secs`.
pub fn write_summary_csv(results: &[RouteResult], env: &EnvConfig, w: impl Write) -> Result<(), ReportError> {
    let mut w = csv_writer(w);
    w.write_record([
        "region", "policy", "iterations", "wirelength", "vias", "open", "short", "spacing", "min_area", "drv", "cost",
        "runtime_secs",
    ])?;
    for r in results {
        let mut rec = vec![r.region.clone(), r.policy.clone(), (r.snapshots.len() - 1).to_string()];
        rec.extend(MetricColumns::new(&r.final_snapshot(), env).fields());
        rec.push(r.runtime_secs.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One row per region and round, round 0 being the initial routing.
pub fn write_trend_csv(results: &[RouteResult], env: &EnvConfig, w: impl Write) -> Result<(), ReportError> {
    let mut w = csv_writer(w);
    w.write_record([
        "region", "iteration", "wirelength", "vias", "open", "short", "spacing", "min_area", "drv", "cost",
    ])?;
    for r in results {
        for (iteration, s) in r.snapshots.iter().enumerate() {
            let mut rec = vec![r.region.clone(), iteration.to_string()];
            rec.extend(MetricColumns::new(s, env).fields());
            w.write_record(&rec)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn write_file(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> Result<(), ReportError>) -> Result<(), ReportError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    fs::write(path, buf).map_err(|source| ReportError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `summary.csv` and `trend.csv` under `dir`.
pub fn write_route_reports(dir: &Path, results: &[RouteResult], env: &EnvConfig) -> Result<(), ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    write_file(&dir.join("summary.csv"), |b| write_summary_csv(results, env, b))?;
    write_file(&dir.join("trend.csv"), |b| write_trend_csv(results, env, b))
}

/// A region to benchmark, or the reason it could not be loaded.
#[derive(Debug, Clone)]
pub enum BenchInput {
    Region(RegionDescriptor),
    Failed { name: String, error: String },
}

impl BenchInput {
    fn name(&self) -> &str {
        match self {
            BenchInput::Region(r) => &r.name,
            BenchInput::Failed { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub region: String,
    pub policy: String,
    pub nets: usize,
    pub pins: usize,
    pub outcome: Result<MetricsSnapshot, String>,
    pub runtime_secs: f64,
}

/// Every input under every policy, ordered by input and then by the
/// policy order given. Regions run in parallel; row order is fixed.
pub fn run_bench(inputs: &[BenchInput], policies: &[PolicyChoice], iterations: u32, env: EnvConfig) -> Vec<BenchRow> {
    let jobs: Vec<(&BenchInput, &PolicyChoice)> =
        inputs.iter().flat_map(|i| policies.iter().map(move |p| (i, p))).collect();
    jobs.par_iter()
        .map(|&(input, policy)| {
            let (nets, pins, outcome, runtime_secs) = match input {
                BenchInput::Region(r) => {
                    let outcome = route_region(r, policy, iterations, env);
                    let secs = outcome.as_ref().map_or(0.0, |o| o.runtime_secs);
                    (
                        r.nets.len(),
                        r.pin_count(),
                        outcome.map(|o| o.final_snapshot()).map_err(|e| e.to_string()),
                        secs,
                    )
                }
                BenchInput::Failed { error, .. } => (0, 0, Err(error.clone()), 0.0),
            };
            BenchRow {
                region: input.name().to_string(),
                policy: policy.to_string(),
                nets,
                pins,
                outcome,
                runtime_secs,
            }
        })
        .collect()
}

/// `region,policy,nets,pins,wirelength,vias,open,short,spacing,min_area,drv,cost,status`;
/// failed runs leave the metric columns empty and carry the error as status.
pub fn write_table_csv(rows: &[BenchRow], env: &EnvConfig, w: impl Write) -> Result<(), ReportError> {
    let mut w = csv_writer(w);
    w.write_record([
        "region", "policy", "nets", "pins", "wirelength", "vias", "open", "short", "spacing", "min_area", "drv", "cost",
        "status",
    ])?;
    for r in rows {
        let mut rec = vec![r.region.clone(), r.policy.clone(), r.nets.to_string(), r.pins.to_string()];
        match &r.outcome {
            Ok(s) => {
                rec.extend(MetricColumns::new(s, env).fields());
                rec.push("ok".into());
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 8));
                rec.push(e.clone());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_timing_csv(rows: &[BenchRow], w: impl Write) -> Result<(), ReportError> {
    let mut w = csv_writer(w);
    w.write_record(["region", "policy", "runtime_secs"])?;
    for r in rows {
        w.write_record([r.region.clone(), r.policy.clone(), r.runtime_secs.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchManifest {
    pub version: String,
    pub regions: Vec<String>,
    pub policies: Vec<String>,
    pub iterations: u32,
    pub rows: usize,
    pub failures: usize,
    pub weights: crate::metrics::CostWeights,
    pub rules: crate::drc::DrcRules,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorManifest>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorManifest {
    pub count: u32,
    pub seed: u64,
    pub params: GeneratorParams,
}

/// Writes `table.csv` and `manifest.json`, plus `timing.csv` when asked.
pub fn write_bench_reports(
    dir: &Path,
    rows: &[BenchRow],
    manifest: &BenchManifest,
    env: &EnvConfig,
    timing: bool,
) -> Result<(), ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    write_file(&dir.join("table.csv"), |b| write_table_csv(rows, env, b))?;
    write_file(&dir.join("manifest.json"), |b| {
        serde_json::to_writer_pretty(&mut *b, manifest).expect("serializable manifest");
        b.push(b'\n');
        Ok(())
    })?;
    if timing {
        write_file(&dir.join("timing.csv"), |b| write_timing_csv(rows, b))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design_io::fig1_fixture;

    #[test]
    fn policy_choice_names() {
        assert_eq!("exhaustive".parse::<PolicyChoice>().unwrap(), PolicyChoice::Exhaustive);
        assert_eq!(
            "min-hpwl".parse::<PolicyChoice>().unwrap(),
            PolicyChoice::Heuristic(OrderingPolicy::MinHpwlFirst)
        );
        assert!("nope".parse::<PolicyChoice>().is_err());
    }

    #[test]
    fn trend_has_a_row_per_round() {
        let env = EnvConfig::default();
        let r = route_region(&fig1_fixture(), &PolicyChoice::Heuristic(OrderingPolicy::Fifo), 5, env).unwrap();
        let mut buf = Vec::new();
        write_trend_csv(&[r], &env, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 6);
        assert!(text.starts_with("region,iteration,wirelength"));
    }

    #[test]
    fn exhaustive_route_is_clean() {
        let r = route_region(&fig1_fixture(), &PolicyChoice::Exhaustive, 1, EnvConfig::default()).unwrap();
        assert_eq!(r.snapshots[0].drv_count(), 0);
        assert_eq!(r.final_snapshot().drv_count(), 0);
    }

    #[test]
    fn failures_stay_in_the_table() {
        let inputs = vec![
            BenchInput::Region(fig1_fixture()),
            BenchInput::Failed {
                name: "missing".into(),
                error: "no such file".into(),
            },
        ];
        let policies = [PolicyChoice::Heuristic(OrderingPolicy::Fifo)];
        let rows = run_bench(&inputs, &policies, 1, EnvConfig::default());
        assert_eq!(rows.len(), 2);
        let mut buf = Vec::new();
        write_table_csv(&rows, &EnvConfig::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(2).unwrap().ends_with(",,,,,,,,no such file"));
    }
}
