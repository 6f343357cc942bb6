//! Trace sources: adversarial lower-bound instances, Zipf workloads and
//! CSV event logs.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{build_trace, PageId, Trace};

pub const DEFAULT_INGEST_LIMIT: usize = 25_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundSpec {
    pub k: usize,
    pub phases: usize,
    pub seed: u64,
}

impl LowerBoundSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || self.phases < 1 {
            return Err(Error::Config(format!(
                "lower-bound instance needs k >= 2 and phases >= 1, got k={} phases={}",
                self.k, self.phases
            )));
        }
        Ok(())
    }

    /// Requests in every phase after the first: the clean page, then for
    /// `m = 1..k-1` a block of `m * k + 1` requests.
    pub fn phase_len(&self) -> usize {
        let k = self.k;
        1 + k * k * (k - 1) / 2 + (k - 1)
    }

    pub fn total_len(&self) -> usize {
        self.k + (self.phases - 1) * self.phase_len()
    }
}

/// Phase 1 requests `k` fresh pages once each. Every later phase requests a
/// fresh page `f`, then, for a uniformly random ordering `p_1..p_k` of the
/// previous phase's pages, `f, <f>^k p_k, <f p_k>^k p_{k-1}, ...,
/// <f p_k .. p_3>^k p_2`. `p_1` is never requested again.
pub fn lower_bound_instance(spec: &LowerBoundSpec) -> Result<Trace> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pages = lower_bound_pages(spec.k, spec.phases, |ps| ps.shuffle(&mut rng));
    build_trace(pages)
}

/// Construction with an explicit permutation step. `permute` receives the
/// previous phase's pages in ascending order and reorders them into
/// `p_1..p_k`.
pub(crate) fn lower_bound_pages(k: usize, phases: usize, mut permute: impl FnMut(&mut Vec<u64>)) -> Vec<u64> {
    let mut out: Vec<u64> = (0..k as u64).collect();
    let mut current: Vec<u64> = out.clone();
    for clean in (k as u64..).take(phases.saturating_sub(1)) {
        let mut perm = current.clone();
        perm.sort_unstable();
        permute(&mut perm);

        out.push(clean);
        // prefix grows f, f p_k, f p_k p_{k-1}, ...
        let mut prefix = vec![clean];
        for m in 1..k {
            for _ in 0..k {
                out.extend_from_slice(&prefix);
            }
            let stale = perm[k - m];
            out.push(stale);
            prefix.push(stale);
        }

        current = prefix;
    }
    out
}

/// `length` i.i.d. draws from Zipf(`exponent`) over pages `0..universe`;
/// page 0 is the most popular.
pub fn zipf_trace(length: usize, universe: usize, exponent: f64, seed: u64) -> Result<Trace> {
    if length == 0 || universe == 0 {
        return Err(Error::Config("zipf trace needs length >= 1 and universe >= 1".into()));
    }
    let dist =
        Zipf::new(universe as u64, exponent).map_err(|e| Error::Config(format!("zipf exponent {exponent}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pages: Vec<u64> = (0..length).map(|_| dist.sample(&mut rng) as u64 - 1).collect();
    build_trace(pages)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestionSpec {
    pub path: PathBuf,
    pub column: String,
    #[serde(default = "default_limit")]
    pub limit: usize,
    /// Fewer distinct pages than this marks the instance trivial. Defaults
    /// to the cache size at the point of use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_distinct: Option<usize>,
}

fn default_limit() -> usize {
    DEFAULT_INGEST_LIMIT
}

impl IngestionSpec {
    pub fn new(path: impl Into<PathBuf>, column: impl Into<String>) -> Self {
        IngestionSpec {
            path: path.into(),
            column: column.into(),
            limit: DEFAULT_INGEST_LIMIT,
            min_distinct: None,
        }
    }
}

/// A trace read from CSV, with `keys[id]` the original key of `PageId(id)`.
#[derive(Debug, Clone)]
pub struct IngestedTrace {
    pub trace: Trace,
    pub keys: Vec<String>,
    pub skipped_rows: usize,
    pub min_distinct: Option<usize>,
}

impl IngestedTrace {
    pub fn distinct(&self) -> usize {
        self.keys.len()
    }

    /// Too few distinct pages for a size-`k` cache to ever evict.
    pub fn is_trivial(&self, k: usize) -> bool {
        self.distinct() < self.min_distinct.unwrap_or(k)
    }

    pub fn intern_map(&self) -> BTreeMap<String, u64> {
        self.keys
            .iter()
            .enumerate()
            .map(|(i, key)| (key.clone(), i as u64))
            .collect()
    }
}

/// Reads events in file order and interns the `column` values as pages in
/// order of first appearance. Rows that fail to parse, or have an empty
/// key, are skipped and counted.
pub fn ingest_csv(spec: &IngestionSpec) -> Result<IngestedTrace> {
    if spec.limit == 0 {
        return Err(Error::Config("ingestion limit must be >= 1".into()));
    }
    let file = File::open(&spec.path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(spec.path.clone()),
        _ => Error::io(&spec.path, e),
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file));
    let column = reader
        .headers()?
        .iter()
        .position(|h| h.trim() == spec.column)
        .ok_or_else(|| Error::MissingColumn {
            path: spec.path.clone(),
            column: spec.column.clone(),
        })?;

    let mut ids: HashMap<String, u64> = HashMap::new();
    let mut keys: Vec<String> = Vec::new();
    let mut requests: Vec<u64> = Vec::new();
    let mut skipped = 0;
    for row in reader.records() {
        if requests.len() >= spec.limit {
            break;
        }
        let record = match row {
            Ok(r) => r,
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let key = match record.get(column).map(str::trim) {
            Some(k) if !k.is_empty() => k,
            _ => {
                skipped += 1;
                continue;
            }
        };
        let id = match ids.get(key) {
            Some(&id) => id,
            None => {
                let id = keys.len() as u64;
                ids.insert(key.to_string(), id);
                keys.push(key.to_string());
                id
            }
        };
        requests.push(id);
    }
    if requests.is_empty() {
        return Err(Error::NoRows(spec.path.clone()));
    }

    Ok(IngestedTrace {
        trace: build_trace(requests)?,
        keys,
        skipped_rows: skipped,
        min_distinct: spec.min_distinct,
    })
}

/// Header line of exported traces.
pub const TRACE_HEADER: &str = "page";

/// Writes the trace as a `page` header followed by one id per line.
pub fn export_trace(trace: &Trace, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(out, "{TRACE_HEADER}")?;
        for page in trace.requests() {
            writeln!(out, "{page}")?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

pub fn write_intern_map(map: &BTreeMap<String, u64>, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, map)?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| Error::io(path, e))
}

/// Reads a trace written by [`export_trace`]. The header line is optional.
pub fn load_trace(path: &Path) -> Result<Trace> {
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::io(path, e),
    })?;
    let mut pages = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || (idx == 0 && line == TRACE_HEADER) {
            continue;
        }
        let id: u64 = line.parse().map_err(|_| Error::MalformedTrace {
            path: path.to_path_buf(),
            reason: format!("line {}: `{line}` is not a page id", idx + 1),
        })?;
        pages.push(PageId(id));
    }
    if pages.is_empty() {
        return Err(Error::NoRows(path.to_path_buf()));
    }
    build_trace(pages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::decompose_phases;

    #[test]
    fn lower_bound_fixed_permutation() {
        // identity ordering: p_1 = a = 0, p_2 = b = 1
        assert_eq!(lower_bound_pages(2, 2, |_| {}), vec![0, 1, 2, 2, 2, 1]);
        assert_eq!(lower_bound_pages(2, 1, |_| {}), vec![0, 1]);
    }

    #[test]
    fn lower_bound_k3_unrolled() {
        // p = (0, 1, 2): f=3, <3>^3 2, <3 2>^3 1
        let expected = vec![0, 1, 2, 3, 3, 3, 3, 2, 3, 2, 3, 2, 3, 2, 1];
        assert_eq!(lower_bound_pages(3, 2, |_| {}), expected);
        let spec = LowerBoundSpec {
            k: 3,
            phases: 2,
            seed: 0,
        };
        assert_eq!(spec.total_len(), expected.len());
    }

    #[test]
    fn lower_bound_shape() {
        for k in [2, 3, 5, 8] {
            for phases in [1, 2, 6] {
                for seed in 0..3 {
                    let spec = LowerBoundSpec { k, phases, seed };
                    let trace = lower_bound_instance(&spec).unwrap();
                    assert_eq!(trace.len(), spec.total_len());
                    let ph = decompose_phases(&trace, k).unwrap();
                    assert_eq!(ph.num_phases(), phases);
                    assert_eq!(ph.ell(0), k);
                    for h in 1..phases {
                        assert_eq!(ph.ell(h), 1);
                        assert_eq!(ph.distinct_pages(h).len(), k);
                        // exactly one stale page goes unrequested
                        let stale = ph.stale_rank_order(h).unwrap();
                        let requested = ph.distinct_pages(h);
                        assert_eq!(stale.iter().filter(|p| !requested.contains(p)).count(), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn lower_bound_seeded() {
        let spec = LowerBoundSpec {
            k: 6,
            phases: 4,
            seed: 17,
        };
        let a = lower_bound_instance(&spec).unwrap();
        let b = lower_bound_instance(&spec).unwrap();
        assert_eq!(a.requests(), b.requests());
        let c = lower_bound_instance(&LowerBoundSpec { seed: 18, ..spec }).unwrap();
        assert_ne!(a.requests(), c.requests());
    }

    #[test]
    fn lower_bound_rejects_bad_spec() {
        assert!(lower_bound_instance(&LowerBoundSpec {
            k: 1,
            phases: 3,
            seed: 0
        })
        .is_err());
        assert!(lower_bound_instance(&LowerBoundSpec {
            k: 3,
            phases: 0,
            seed: 0
        })
        .is_err());
    }

    #[test]
    fn zipf_basics() {
        let single = zipf_trace(50, 1, 1.2, 3).unwrap();
        assert!(single.requests().iter().all(|&p| p == PageId(0)));
        let a = zipf_trace(1000, 100, 0.8, 5).unwrap();
        let b = zipf_trace(1000, 100, 0.8, 5).unwrap();
        assert_eq!(a.requests(), b.requests());
        assert!(a.requests().iter().all(|p| p.0 < 100));
        assert!(zipf_trace(0, 10, 1.0, 0).is_err());
        assert!(zipf_trace(10, 10, -1.0, 0).is_err());
    }

    #[test]
    fn zipf_uniform_at_zero_exponent() {
        let n = 100_000;
        let universe = 10;
        let trace = zipf_trace(n, universe, 0.0, 99).unwrap();
        let mut counts = vec![0usize; universe];
        for p in trace.requests() {
            counts[p.0 as usize] += 1;
        }
        let p = 1.0 / universe as f64;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts {
            assert!((c as f64 - n as f64 * p).abs() <= 3.0 * sd, "{counts:?}");
        }
    }

    fn write_tmp(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn ingest_interns_and_truncates() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "trips.csv", "start,end\ns1,x\ns2,y\ns1,z\n");
        let got = ingest_csv(&IngestionSpec::new(&path, "start")).unwrap();
        assert_eq!(got.trace.requests(), &[PageId(0), PageId(1), PageId(0)]);
        assert_eq!(got.intern_map(), BTreeMap::from([("s1".into(), 0), ("s2".into(), 1)]));

        let spec = IngestionSpec {
            limit: 2,
            ..IngestionSpec::new(&path, "start")
        };
        let got = ingest_csv(&spec).unwrap();
        assert_eq!(got.trace.requests(), &[PageId(0), PageId(1)]);
    }

    #[test]
    fn ingest_quoted_and_malformed_rows() {
        let dir = tempfile::tempdir().unwrap();
        let body = "id,\"start station\"\n1,\"A, B\"\n2\n3,\n4,C\n5,\"A, B\"\n";
        let path = write_tmp(&dir, "t.csv", body);
        let got = ingest_csv(&IngestionSpec::new(&path, "start station")).unwrap();
        assert_eq!(got.keys, vec!["A, B".to_string(), "C".to_string()]);
        assert_eq!(got.trace.len(), 3);
        assert_eq!(got.skipped_rows, 2);
    }

    #[test]
    fn ingest_errors() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.csv");
        assert!(matches!(
            ingest_csv(&IngestionSpec::new(&missing, "a")),
            Err(Error::MissingFile(_))
        ));
        let path = write_tmp(&dir, "h.csv", "a,b\n1,2\n");
        assert!(matches!(
            ingest_csv(&IngestionSpec::new(&path, "c")),
            Err(Error::MissingColumn { .. })
        ));
        let empty = write_tmp(&dir, "e.csv", "a,b\n");
        assert!(matches!(
            ingest_csv(&IngestionSpec::new(&empty, "a")),
            Err(Error::NoRows(_))
        ));
    }

    #[test]
    fn triviality_filter() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = String::from("station\n");
        for i in 0..499 {
            body.push_str(&format!("st{i}\n"));
        }
        let path = write_tmp(&dir, "m.csv", &body);
        let got = ingest_csv(&IngestionSpec::new(&path, "station")).unwrap();
        assert_eq!(got.distinct(), 499);
        assert!(got.is_trivial(500));
        assert!(!got.is_trivial(499));
    }

    #[test]
    fn export_ingest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let trace = build_trace([7u64, 3, 7, 1000, 3, 5]).unwrap();
        let path = dir.path().join("trace.txt");
        export_trace(&trace, &path).unwrap();

        let loaded = load_trace(&path).unwrap();
        assert_eq!(loaded.requests(), trace.requests());

        let ingested = ingest_csv(&IngestionSpec::new(&path, TRACE_HEADER)).unwrap();
        let decoded: Vec<PageId> = ingested
            .trace
            .requests()
            .iter()
            .map(|p| PageId(ingested.keys[p.0 as usize].parse().unwrap()))
            .collect();
        assert_eq!(decoded, trace.requests());

        let map_path = dir.path().join("map.json");
        write_intern_map(&ingested.intern_map(), &map_path).unwrap();
        let map: BTreeMap<String, u64> = serde_json::from_str(&std::fs::read_to_string(&map_path).unwrap()).unwrap();
        assert_eq!(map, ingested.intern_map());
    }

    #[test]
    fn load_trace_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "bad.txt", "page\n1\nx\n");
        assert!(matches!(load_trace(&path), Err(Error::MalformedTrace { .. })));
    }
}
