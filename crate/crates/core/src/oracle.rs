//! Next-arrival prediction oracles with full query accounting.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{PageId, Trace};

/// Stream reserved for oracle noise, disjoint from the policy streams.
const ORACLE_STREAM: u64 = 0x0AC1E;

/// How predictions are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    /// Returns the true next arrival.
    Perfect,
    /// True next arrival plus `LogNormal(0, sigma)` noise.
    Lognormal {
        sigma: f64,
        seed: u64,
        /// Draw a fresh sample on every call instead of reusing the one
        /// drawn for the same (page, arrival).
        #[serde(default)]
        resample: bool,
    },
    /// Last request time plus the page's mean inter-request gap.
    MeanInterval,
    /// Always predicts `value`. Used to model a useless predictor.
    Constant { value: f64 },
    /// Predicts `len + 2 - actual`, inverting the true arrival order.
    Reversed,
}

impl OracleSpec {
    pub fn lognormal(sigma: f64, seed: u64) -> Self {
        OracleSpec::Lognormal {
            sigma,
            seed,
            resample: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OracleSpec::Lognormal { sigma, .. } if !(*sigma >= 0.0 && sigma.is_finite()) => Err(Error::Config(
                format!("lognormal sigma must be finite and >= 0, got {sigma}"),
            )),
            OracleSpec::Constant { value } if !value.is_finite() => {
                Err(Error::Config("constant prediction must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// The same oracle with its noise seed replaced; no-op for noiseless kinds.
    pub fn with_seed(&self, new_seed: u64) -> Self {
        match self {
            OracleSpec::Lognormal { sigma, resample, .. } => OracleSpec::Lognormal {
                sigma: *sigma,
                seed: new_seed,
                resample: *resample,
            },
            other => other.clone(),
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for OracleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleSpec::Perfect => write!(f, "perfect"),
            OracleSpec::Lognormal { sigma, .. } => write!(f, "lognormal(sigma={sigma})"),
            OracleSpec::MeanInterval => write!(f, "mean"),
            OracleSpec::Constant { value } => write!(f, "constant({value})"),
            OracleSpec::Reversed => write!(f, "reversed"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub page: PageId,
    pub time: usize,
    pub predicted: f64,
    pub actual: usize,
}

/// Append-only record of every oracle call, repeats included.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryLog {
    records: Vec<QueryRecord>,
}

impl QueryLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records(records: Vec<QueryRecord>) -> Self {
        QueryLog { records }
    }

    pub fn push(&mut self, record: QueryRecord) {
        self.records.push(record);
    }

    pub fn count(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> &[QueryRecord] {
        &self.records
    }

    /// Writes `page,time,predicted,actual` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["page", "time", "predicted", "actual"])?;
        for r in &self.records {
            writer.write_record([
                r.page.to_string(),
                r.time.to_string(),
                r.predicted.to_string(),
                r.actual.to_string(),
            ])?;
        }
        writer.flush().map_err(|e| Error::io("<query log>", e))?;
        Ok(())
    }
}

/// Total absolute prediction error over the logged queries.
pub fn total_error(log: &QueryLog) -> f64 {
    log.records.iter().map(|r| (r.predicted - r.actual as f64).abs()).sum()
}

/// Number of unordered record pairs whose predicted order contradicts the
/// actual order: `predicted_p >= predicted_q` while `actual_p < actual_q`.
pub fn count_inversions(log: &QueryLog) -> u64 {
    count_inversions_in(&log.records)
}

pub(crate) fn count_inversions_in(records: &[QueryRecord]) -> u64 {
    let n = records.len();
    if n < 2 {
        return 0;
    }

    let mut predicted: Vec<f64> = records.iter().map(|r| r.predicted).collect();
    predicted.sort_by(f64::total_cmp);
    predicted.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);
    let rank = |x: f64| predicted.partition_point(|p| p.total_cmp(&x) == Ordering::Less);

    let mut by_actual: Vec<&QueryRecord> = records.iter().collect();
    by_actual.sort_by_key(|r| r.actual);

    let mut tree = Fenwick::new(predicted.len());
    let mut inserted = 0u64;
    let mut inversions = 0u64;
    let mut start = 0;
    while start < n {
        let actual = by_actual[start].actual;
        let end = start + by_actual[start..].partition_point(|r| r.actual == actual);
        // Everything already inserted has a strictly smaller actual arrival.
        for r in &by_actual[start..end] {
            let below = tree.prefix(rank(r.predicted));
            inversions += inserted - below;
        }
        for r in &by_actual[start..end] {
            tree.add(rank(r.predicted));
            inserted += 1;
        }
        start = end;
    }
    inversions
}

struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: vec![0; n + 1] }
    }

    fn add(&mut self, idx: usize) {
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of inserted indices strictly below `idx`.
    fn prefix(&self, idx: usize) -> u64 {
        let mut i = idx;
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }
}

/// A stateful oracle instance. One per simulation run.
pub struct Oracle {
    spec: OracleSpec,
    noise: Option<(LogNormal<f64>, ChaCha8Rng)>,
    memo: HashMap<(u32, usize), f64>,
    log: QueryLog,
}

impl Oracle {
    pub fn new(spec: &OracleSpec) -> Result<Self> {
        spec.validate()?;
        let noise = match *spec {
            OracleSpec::Lognormal { sigma, seed, .. } => {
                let dist = LogNormal::new(0.0, sigma).map_err(|e| Error::Config(format!("lognormal: {e}")))?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(ORACLE_STREAM);
                Some((dist, rng))
            }
            _ => None,
        };
        Ok(Oracle {
            spec: spec.clone(),
            noise,
            memo: HashMap::new(),
            log: QueryLog::new(),
        })
    }

    pub fn spec(&self) -> &OracleSpec {
        &self.spec
    }

    /// Predicted next arrival of `page` after time `t`. Every call is logged.
    /// Pages absent from the trace are predicted and recorded at the sentinel.
    pub fn query(&mut self, trace: &Trace, page: PageId, t: usize) -> f64 {
        match trace.slot_of(page) {
            Some(slot) => self.query_slot(trace, slot, t),
            None => {
                let sentinel = trace.sentinel();
                self.log.push(QueryRecord {
                    page,
                    time: t,
                    predicted: sentinel as f64,
                    actual: sentinel,
                });
                sentinel as f64
            }
        }
    }

    pub(crate) fn query_slot(&mut self, trace: &Trace, slot: u32, t: usize) -> f64 {
        let actual = trace.next_request_after(slot, t);
        let predicted = match &self.spec {
            OracleSpec::Perfect => actual as f64,
            OracleSpec::Lognormal { resample, .. } => {
                let (dist, rng) = self.noise.as_mut().expect("lognormal oracle has noise");
                let noise = if *resample {
                    dist.sample(rng)
                } else {
                    *self.memo.entry((slot, actual)).or_insert_with(|| dist.sample(rng))
                };
                actual as f64 + noise
            }
            OracleSpec::MeanInterval => mean_interval_prediction(trace, slot, t),
            OracleSpec::Constant { value } => *value,
            OracleSpec::Reversed => (trace.len() + 2 - actual) as f64,
        };
        self.log.push(QueryRecord {
            page: trace.page_of_slot(slot),
            time: t,
            predicted,
            actual,
        });
        predicted
    }

    pub fn log(&self) -> &QueryLog {
        &self.log
    }

    pub fn query_count(&self) -> usize {
        self.log.count()
    }

    pub fn into_log(self) -> QueryLog {
        self.log
    }
}

/// `last + mean gap`, computed from requests at or before `t`. Pages seen
/// fewer than twice use the trace length as their gap; unseen pages get the
/// sentinel.
fn mean_interval_prediction(trace: &Trace, slot: u32, t: usize) -> f64 {
    let occ = trace.occurrences(slot);
    let seen = occ.partition_point(|&x| x <= t);
    match seen {
        0 => trace.sentinel() as f64,
        1 => (occ[0] + trace.len()) as f64,
        n => {
            let first = occ[0] as f64;
            let last = occ[n - 1] as f64;
            last + (last - first) / (n - 1) as f64
        }
    }
}
