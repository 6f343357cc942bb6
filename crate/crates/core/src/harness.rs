//! Experiment grids: policy x oracle x instance x seed, aggregated into
//! competitive-ratio tables.
//!
//! A cell's ratio is `misses / opt` on one instance. Randomized policies are
//! averaged over `repetitions` policy seeds with the oracle seed held fixed
//! per instance, and the per-instance means are then averaged across
//! instances. Cells run in parallel; results are merged by their
//! `(instance, policy, oracle, repetition)` key so output is byte-stable.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{ingest_csv, load_trace, lower_bound_instance, zipf_trace, IngestionSpec, LowerBoundSpec};
use crate::oracle::OracleSpec;
use crate::policy::{opt_cost, simulate_detailed, PolicyConfig, PolicyKind, SimOptions, SimReport};
use crate::sampling::{derive_seed, PRNG_ALGORITHM};
use crate::trace::Trace;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_REPETITIONS: usize = 10;
/// Environment variable naming the directory that relative input paths
/// are resolved against.
pub const DATA_DIR_ENV: &str = "PAGING_SIM_DATA_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceSource {
    Csv(IngestionSpec),
    /// A trace in the export format (`page` header, one id per line).
    File {
        path: PathBuf,
    },
    Zipf {
        length: usize,
        universe: usize,
        exponent: f64,
        seed: u64,
    },
    LowerBound(LowerBoundSpec),
}

impl TraceSource {
    pub fn name(&self) -> String {
        match self {
            TraceSource::Csv(spec) => format!("csv:{}", spec.path.display()),
            TraceSource::File { path } => format!("file:{}", path.display()),
            TraceSource::Zipf {
                length,
                universe,
                exponent,
                seed,
            } => format!("zipf(n={length},u={universe},s={exponent},seed={seed})"),
            TraceSource::LowerBound(s) => format!("lower_bound(k={},phases={},seed={})", s.k, s.phases, s.seed),
        }
    }

    fn resolve(&mut self, data_dir: Option<&Path>) {
        let Some(dir) = data_dir else { return };
        let path = match self {
            TraceSource::Csv(spec) => &mut spec.path,
            TraceSource::File { path } => path,
            _ => return,
        };
        if path.is_relative() {
            *path = dir.join(&*path);
        }
    }

    fn min_distinct(&self) -> Option<usize> {
        match self {
            TraceSource::Csv(spec) => spec.min_distinct,
            _ => None,
        }
    }

    pub fn load(&self) -> Result<Trace> {
        match self {
            TraceSource::Csv(spec) => ingest_csv(spec).map(|i| i.trace),
            TraceSource::File { path } => load_trace(path),
            TraceSource::Zipf {
                length,
                universe,
                exponent,
                seed,
            } => zipf_trace(*length, *universe, *exponent, *seed),
            TraceSource::LowerBound(spec) => lower_bound_instance(spec),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instances: Vec<TraceSource>,
    pub k: usize,
    pub policies: Vec<PolicyConfig>,
    pub oracles: Vec<OracleSpec>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

fn default_repetitions() -> usize {
    DEFAULT_REPETITIONS
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::io(path, e),
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Makes relative input paths relative to `data_dir`.
    pub fn resolve_paths(&mut self, data_dir: Option<&Path>) {
        for source in &mut self.instances {
            source.resolve(data_dir);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::ZeroCacheSize);
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        if self.instances.is_empty() {
            return Err(Error::Config("no instances configured".into()));
        }
        for p in &self.policies {
            p.validate()?;
        }
        for o in &self.oracles {
            o.validate()?;
        }
        if !self.policies.is_empty() && self.oracles.is_empty() {
            return Err(Error::Config("no oracles configured".into()));
        }
        Ok(())
    }

    fn runs_for(&self, policy: &PolicyConfig) -> usize {
        if policy.policy.is_randomized() {
            self.repetitions
        } else {
            1
        }
    }
}

/// A loaded, non-trivial instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub trace: Trace,
    pub opt_cost: u64,
}

/// Loads every source, drops the trivial ones (fewer distinct pages than
/// `min_distinct`, default `k`) and computes each instance's optimum.
pub fn load_instances(config: &ExperimentConfig) -> Result<(Vec<Instance>, Vec<String>)> {
    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    for source in &config.instances {
        let trace = source.load()?;
        let name = source.name();
        if trace.universe_size() < source.min_distinct().unwrap_or(config.k) {
            skipped.push(name);
        } else {
            kept.push((name, trace));
        }
    }
    if kept.is_empty() {
        return Err(Error::NoNonTrivialInstances);
    }
    let instances = kept
        .into_par_iter()
        .map(|(name, trace)| {
            let opt = opt_cost(&trace, config.k)?;
            Ok(Instance {
                name,
                trace,
                opt_cost: opt,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((instances, skipped))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub instance: usize,
    pub policy: usize,
    pub oracle: usize,
    pub repetition: usize,
}

/// Oracle seed depends only on the instance; policy seed only on the
/// repetition.
pub fn cell_specs(config: &ExperimentConfig, key: CellKey) -> (PolicyConfig, OracleSpec) {
    let policy = &config.policies[key.policy];
    let oracle = &config.oracles[key.oracle];
    let oracle = match oracle {
        OracleSpec::Lognormal { seed, .. } => oracle.with_seed(derive_seed(*seed, key.instance as u64)),
        other => other.clone(),
    };
    let policy = policy
        .clone()
        .with_seed(derive_seed(policy.seed, key.repetition as u64));
    (policy, oracle)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub key: CellKey,
    pub report: SimReport,
    /// Length of the run's query log, for end-to-end accounting checks.
    pub log_len: usize,
}

/// Runs a single cell in isolation.
pub fn run_cell(config: &ExperimentConfig, instance: &Instance, key: CellKey) -> Result<CellResult> {
    let (policy, oracle) = cell_specs(config, key);
    let out = simulate_detailed(
        &policy,
        &instance.trace,
        config.k,
        &oracle,
        &SimOptions {
            opt_cost: Some(instance.opt_cost),
            record_evictions: false,
        },
    )?;
    Ok(CellResult {
        key,
        report: out.report,
        log_len: out.log.count(),
    })
}

/// Runs every cell, in parallel, sorted by key.
pub fn run_cells(config: &ExperimentConfig, instances: &[Instance]) -> Result<Vec<CellResult>> {
    let mut keys = Vec::new();
    for instance in 0..instances.len() {
        for (pi, policy) in config.policies.iter().enumerate() {
            for oracle in 0..config.oracles.len() {
                for repetition in 0..config.runs_for(policy) {
                    keys.push(CellKey {
                        instance,
                        policy: pi,
                        oracle,
                        repetition,
                    });
                }
            }
        }
    }
    let mut cells = keys
        .into_par_iter()
        .map(|key| run_cell(config, &instances[key.instance], key))
        .collect::<Result<Vec<_>>>()?;
    cells.sort_by_key(|c| c.key);
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub instance: String,
    pub trace_len: usize,
    pub opt_cost: u64,
    pub runs: usize,
    pub mean_misses: f64,
    pub mean_ratio: f64,
    pub mean_queries: f64,
    pub mean_eta: f64,
    pub mean_inversions: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub policy: String,
    pub oracle: String,
    pub mean_ratio: f64,
    pub mean_queries: f64,
    pub mean_query_fraction: f64,
    pub mean_eta: f64,
    pub mean_inversions: f64,
    pub instances: Vec<InstanceResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub prng: String,
    pub averaging: String,
    pub skipped_instances: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub schema: u32,
    pub k: usize,
    pub repetitions: usize,
    pub metadata: TableMetadata,
    pub rows: Vec<ResultRow>,
}

const AVERAGING_NOTE: &str = "ratio = misses/opt per run; randomized policies averaged over repetitions \
with the oracle seed fixed per instance; per-instance means averaged across instances";

pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let (instances, skipped) = load_instances(config)?;
    let cells = run_cells(config, &instances)?;
    Ok(aggregate(config, &instances, skipped, &cells))
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn aggregate(
    config: &ExperimentConfig,
    instances: &[Instance],
    skipped: Vec<String>,
    cells: &[CellResult],
) -> ResultTable {
    let mut rows = Vec::new();
    for (pi, policy) in config.policies.iter().enumerate() {
        for (oi, oracle) in config.oracles.iter().enumerate() {
            let mut per_instance = Vec::with_capacity(instances.len());
            let mut fractions = Vec::with_capacity(instances.len());
            for (ii, inst) in instances.iter().enumerate() {
                let runs: Vec<&SimReport> = cells
                    .iter()
                    .filter(|c| c.key.instance == ii && c.key.policy == pi && c.key.oracle == oi)
                    .map(|c| &c.report)
                    .collect();
                let mean_queries = mean(runs.iter().map(|r| r.queries as f64));
                fractions.push(mean_queries / inst.trace.len() as f64);
                per_instance.push(InstanceResult {
                    instance: inst.name.clone(),
                    trace_len: inst.trace.len(),
                    opt_cost: inst.opt_cost,
                    runs: runs.len(),
                    mean_misses: mean(runs.iter().map(|r| r.misses as f64)),
                    mean_ratio: mean(runs.iter().map(|r| r.ratio)),
                    mean_queries,
                    mean_eta: mean(runs.iter().map(|r| r.eta)),
                    mean_inversions: mean(runs.iter().map(|r| r.inversions as f64)),
                });
            }
            rows.push(ResultRow {
                policy: policy.label(),
                oracle: oracle.label(),
                mean_ratio: mean(per_instance.iter().map(|i| i.mean_ratio)),
                mean_queries: mean(per_instance.iter().map(|i| i.mean_queries)),
                mean_query_fraction: mean(fractions),
                mean_eta: mean(per_instance.iter().map(|i| i.mean_eta)),
                mean_inversions: mean(per_instance.iter().map(|i| i.mean_inversions)),
                instances: per_instance,
            });
        }
    }
    ResultTable {
        schema: SCHEMA_VERSION,
        k: config.k,
        repetitions: config.repetitions,
        metadata: TableMetadata {
            prng: PRNG_ALGORITHM.to_string(),
            averaging: AVERAGING_NOTE.to_string(),
            skipped_instances: skipped,
        },
        rows,
    }
}

/// `x` rounded to 6 significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

impl ResultTable {
    /// The table with every float rounded to 6 significant digits, as emitted.
    pub fn rounded(&self) -> ResultTable {
        let mut t = self.clone();
        for row in &mut t.rows {
            for v in [
                &mut row.mean_ratio,
                &mut row.mean_queries,
                &mut row.mean_query_fraction,
                &mut row.mean_eta,
                &mut row.mean_inversions,
            ] {
                *v = round_sig6(*v);
            }
            for inst in &mut row.instances {
                for v in [
                    &mut inst.mean_misses,
                    &mut inst.mean_ratio,
                    &mut inst.mean_queries,
                    &mut inst.mean_eta,
                    &mut inst.mean_inversions,
                ] {
                    *v = round_sig6(*v);
                }
            }
        }
        t
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("policy,oracle,mean_ratio,mean_queries,mean_query_fraction,mean_eta,mean_inversions\n");
        for r in &self.rounded().rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(&r.policy),
                csv_field(&r.oracle),
                r.mean_ratio,
                r.mean_queries,
                r.mean_query_fraction,
                r.mean_eta,
                r.mean_inversions
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.rounded())?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<ResultTable> {
        let table: ResultTable = serde_json::from_str(text)?;
        if table.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported result schema {}", table.schema)));
        }
        Ok(table)
    }

    pub fn row(&self, policy: &str, oracle: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.policy == policy && r.oracle == oracle)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn emit_results(table: &ResultTable, format: OutputFormat, path: &Path) -> Result<()> {
    let body = match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json()?,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryBudget {
    /// Queries per request.
    pub fraction: f64,
    pub per_miss: f64,
}

pub fn query_budget_report(report: &SimReport, trace: &Trace) -> QueryBudget {
    let q = report.queries as f64;
    QueryBudget {
        fraction: q / trace.len() as f64,
        per_miss: if report.misses == 0 {
            0.0
        } else {
            q / report.misses as f64
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub b: usize,
    pub sigma: f64,
    pub ratio: f64,
    pub stderr: f64,
    pub runs: usize,
}

/// Mean competitive ratio of AdaptiveQuery-b under lognormal noise for every
/// `(b, sigma)` pair, over instances x repetitions.
pub fn sweep_b_sigma(
    b_values: &[usize],
    sigma_values: &[f64],
    instances: &[Trace],
    k: usize,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<SweepCell>> {
    if b_values.is_empty() || sigma_values.is_empty() || instances.is_empty() {
        return Err(Error::Config("sweep needs at least one b, sigma and instance".into()));
    }
    if repetitions == 0 {
        return Err(Error::Config("repetitions must be >= 1".into()));
    }
    let opts = instances
        .par_iter()
        .map(|t| opt_cost(t, k))
        .collect::<Result<Vec<_>>>()?;

    let mut jobs = Vec::new();
    for (bi, &b) in b_values.iter().enumerate() {
        for (si, &sigma) in sigma_values.iter().enumerate() {
            for ii in 0..instances.len() {
                for rep in 0..repetitions {
                    jobs.push((bi, si, b, sigma, ii, rep));
                }
            }
        }
    }
    let ratios = jobs
        .into_par_iter()
        .map(|(bi, si, b, sigma, ii, rep)| {
            let oracle = OracleSpec::lognormal(sigma, derive_seed(seed, ii as u64));
            let policy = PolicyConfig::adaptive(b).with_seed(derive_seed(seed ^ 0x5eed, rep as u64));
            let out = simulate_detailed(
                &policy,
                &instances[ii],
                k,
                &oracle,
                &SimOptions {
                    opt_cost: Some(opts[ii]),
                    record_evictions: false,
                },
            )?;
            Ok(((bi, si), out.report.ratio))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::new();
    for (bi, &b) in b_values.iter().enumerate() {
        for (si, &sigma) in sigma_values.iter().enumerate() {
            let xs: Vec<f64> = ratios
                .iter()
                .filter(|(key, _)| *key == (bi, si))
                .map(|&(_, r)| r)
                .collect();
            let (m, se) = mean_stderr(&xs);
            cells.push(SweepCell {
                b,
                sigma,
                ratio: m,
                stderr: se,
                runs: xs.len(),
            });
        }
    }
    Ok(cells)
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = mean(xs.iter().copied());
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

pub fn sweep_to_csv(cells: &[SweepCell]) -> String {
    let mut out = String::from("b,sigma,ratio,stderr\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            c.b,
            round_sig6(c.sigma),
            round_sig6(c.ratio),
            round_sig6(c.stderr)
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub b: usize,
    pub ratio: f64,
    pub queries_per_opt: f64,
    /// Minimum queries per unit of OPT any `(c + 4)`-competitive algorithm
    /// needs, for the largest integer `c` with `c + 4 >= ratio` and
    /// `1 <= c <= ln k`; `None` when no such `c` exists.
    pub required_queries_per_opt: Option<f64>,
}

/// AdaptiveQuery on lower-bound instances with a perfect oracle: measured
/// ratio and query volume per OPT miss against the minimum query volume
/// required at that competitiveness.
pub fn lower_bound_tradeoff(k: usize, phases: usize, b_values: &[usize], seeds: u64) -> Result<Vec<TradeoffRow>> {
    let traces = (0..seeds)
        .map(|s| lower_bound_instance(&LowerBoundSpec { k, phases, seed: s }))
        .collect::<Result<Vec<_>>>()?;
    b_values
        .iter()
        .map(|&b| {
            let runs = traces
                .par_iter()
                .enumerate()
                .map(|(s, trace)| {
                    let policy = PolicyConfig::adaptive(b).with_seed(s as u64);
                    let r = crate::policy::simulate(&policy, trace, k, &OracleSpec::Perfect)?;
                    Ok((r.ratio, r.queries as f64 / r.opt_cost as f64))
                })
                .collect::<Result<Vec<_>>>()?;
            let ratio = mean(runs.iter().map(|r| r.0));
            let queries_per_opt = mean(runs.iter().map(|r| r.1));
            Ok(TradeoffRow {
                b,
                ratio,
                queries_per_opt,
                required_queries_per_opt: required_queries(ratio, k),
            })
        })
        .collect()
}

fn required_queries(ratio: f64, k: usize) -> Option<f64> {
    let ln_k = (k as f64).ln();
    let c = (ratio - 4.0).ceil().max(1.0);
    (c <= ln_k.floor()).then(|| c * (k as f64).powf(1.0 / c) / (12.0 * ((k + 1) as f64).ln()))
}

/// Policies whose cells depend on the oracle at all.
pub fn uses_oracle(kind: PolicyKind) -> bool {
    !matches!(kind, PolicyKind::FiF | PolicyKind::Lru | PolicyKind::RandomMarker)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zipf_source(seed: u64) -> TraceSource {
        TraceSource::Zipf {
            length: 3000,
            universe: 300,
            exponent: 0.8,
            seed,
        }
    }

    fn config(policies: Vec<PolicyConfig>, oracles: Vec<OracleSpec>) -> ExperimentConfig {
        ExperimentConfig {
            instances: vec![zipf_source(1), zipf_source(2)],
            k: 40,
            policies,
            oracles,
            repetitions: 3,
            output: None,
        }
    }

    #[test]
    fn fif_self_ratio_is_one() {
        let table = run_experiment(&config(
            vec![PolicyConfig::new(PolicyKind::FiF)],
            vec![OracleSpec::lognormal(2.0, 1)],
        ))
        .unwrap();
        let row = &table.rows[0];
        assert_eq!(row.mean_ratio, 1.0);
        assert!(row.instances.iter().all(|i| i.mean_ratio == 1.0 && i.runs == 1));
    }

    #[test]
    fn blind_oracle_perfect_is_one() {
        let table = run_experiment(&config(
            vec![PolicyConfig::new(PolicyKind::BlindOracle)],
            vec![OracleSpec::Perfect, OracleSpec::lognormal(0.0, 4)],
        ))
        .unwrap();
        for row in &table.rows {
            assert_eq!(row.mean_ratio, 1.0, "{}", row.oracle);
            assert_eq!(row.mean_query_fraction, 1.0);
        }
    }

    #[test]
    fn adaptive_b1_equals_random_marker_per_instance() {
        let table = run_experiment(&config(
            vec![PolicyConfig::new(PolicyKind::RandomMarker), PolicyConfig::adaptive(1)],
            vec![OracleSpec::lognormal(4.0, 2)],
        ))
        .unwrap();
        let (a, b) = (&table.rows[0], &table.rows[1]);
        for (x, y) in a.instances.iter().zip(&b.instances) {
            assert_eq!(x.mean_misses, y.mean_misses);
        }
    }

    #[test]
    fn ratios_at_least_one_and_accounting() {
        let cfg = config(
            vec![
                PolicyConfig::new(PolicyKind::Lru),
                PolicyConfig::new(PolicyKind::RobustOracle),
                PolicyConfig::naive(0.3),
                PolicyConfig::adaptive(4),
            ],
            vec![OracleSpec::MeanInterval, OracleSpec::lognormal(3.0, 9)],
        );
        let (instances, _) = load_instances(&cfg).unwrap();
        let cells = run_cells(&cfg, &instances).unwrap();
        for c in &cells {
            assert!(c.report.ratio >= 1.0 - 1e-9, "{:?}", c.key);
            assert_eq!(c.report.queries as usize, c.log_len);
        }
        // rerunning any cell alone reproduces it
        for c in cells.iter().step_by(7) {
            let again = run_cell(&cfg, &instances[c.key.instance], c.key).unwrap();
            assert_eq!(&again, c);
        }
    }

    #[test]
    fn trivial_instances_filtered() {
        let mut cfg = config(vec![PolicyConfig::new(PolicyKind::FiF)], vec![OracleSpec::Perfect]);
        cfg.k = 5000;
        assert!(matches!(run_experiment(&cfg), Err(Error::NoNonTrivialInstances)));
        cfg.k = 40;
        cfg.instances.push(TraceSource::Zipf {
            length: 100,
            universe: 10,
            exponent: 1.0,
            seed: 0,
        });
        let table = run_experiment(&cfg).unwrap();
        assert_eq!(table.metadata.skipped_instances.len(), 1);
        assert_eq!(table.rows[0].instances.len(), 2);
    }

    #[test]
    fn empty_policy_table_is_header_only() {
        let table = run_experiment(&config(vec![], vec![])).unwrap();
        assert_eq!(
            table.to_csv(),
            "policy,oracle,mean_ratio,mean_queries,mean_query_fraction,mean_eta,mean_inversions\n"
        );
    }

    #[test]
    fn json_round_trip() {
        let table = run_experiment(&config(
            vec![PolicyConfig::adaptive(2), PolicyConfig::new(PolicyKind::LvMarker)],
            vec![OracleSpec::lognormal(2.0, 5)],
        ))
        .unwrap();
        let parsed = ResultTable::from_json(&table.to_json().unwrap()).unwrap();
        assert_eq!(parsed, table.rounded());
        assert!(table.to_json().unwrap().contains("\"schema\": 1"));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig6(1.23456789), 1.23457);
        assert_eq!(round_sig6(2800.0), 2800.0);
        assert_eq!(round_sig6(0.000123456789), 0.000123457);
        assert_eq!(round_sig6(0.0), 0.0);
    }

    #[test]
    fn query_budget_examples() {
        let trace = crate::trace::build_trace((0..100u64).map(|i| i % 13)).unwrap();
        let r = crate::policy::simulate(
            &PolicyConfig::new(PolicyKind::RandomMarker),
            &trace,
            5,
            &OracleSpec::Perfect,
        )
        .unwrap();
        assert_eq!(
            query_budget_report(&r, &trace),
            QueryBudget {
                fraction: 0.0,
                per_miss: 0.0
            }
        );

        let mut synthetic = r.clone();
        synthetic.queries = 2800;
        synthetic.misses = 350;
        let long = crate::trace::build_trace((0..25_000u64).map(|i| i % 600)).unwrap();
        let q = query_budget_report(&synthetic, &long);
        assert_eq!(q.fraction, 0.112);
        assert_eq!(q.per_miss, 8.0);
    }

    #[test]
    fn sweep_shapes_and_b1_flat() {
        let traces: Vec<Trace> = (0..2).map(|s| zipf_trace(2000, 200, 0.8, s).unwrap()).collect();
        let cells = sweep_b_sigma(&[1, 4], &[0.0, 3.0], &traces, 30, 3, 11).unwrap();
        assert_eq!(cells.len(), 4);
        // b = 1 never looks at the prediction value
        assert_eq!(cells[0].ratio, cells[1].ratio);
        assert!(cells.iter().all(|c| c.runs == 6 && c.ratio >= 1.0));
        let csv = sweep_to_csv(&cells);
        assert!(csv.starts_with("b,sigma,ratio,stderr\n1,0,"));
    }

    #[test]
    fn config_json_parses() {
        let text = r#"{
            "instances": [
                {"kind": "zipf", "length": 100, "universe": 20, "exponent": 0.8, "seed": 1},
                {"kind": "lower_bound", "k": 4, "phases": 3, "seed": 2},
                {"kind": "csv", "path": "trips.csv", "column": "start station id"},
                {"kind": "file", "path": "t.txt"}
            ],
            "k": 4,
            "policies": [{"policy": "AdaptiveQuery", "b": 2}, {"policy": "LRU"}],
            "oracles": [{"kind": "lognormal", "sigma": 2.0, "seed": 7}, {"kind": "mean_interval"}],
            "output": {"path": "out.json", "format": "json"}
        }"#;
        let mut cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.repetitions, DEFAULT_REPETITIONS);
        cfg.resolve_paths(Some(Path::new("/data")));
        match &cfg.instances[2] {
            TraceSource::Csv(spec) => {
                assert_eq!(spec.path, Path::new("/data/trips.csv"));
                assert_eq!(spec.limit, 25_000);
            }
            other => panic!("{other:?}"),
        }
        cfg.validate().unwrap();
    }

    #[test]
    fn tradeoff_rows() {
        let rows = lower_bound_tradeoff(8, 20, &[1, 7], 3).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[1].ratio <= rows[0].ratio);
        assert!(rows[0].queries_per_opt <= rows[1].queries_per_opt);
        for r in &rows {
            if let Some(req) = r.required_queries_per_opt {
                assert!(r.queries_per_opt >= req, "{r:?}");
            }
        }
    }
}
