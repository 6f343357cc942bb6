//! Trace-driven paging simulator for eviction policies that consult a
//! next-arrival oracle under a query budget.
//!
//! - [`trace`]: request traces, next-arrival index, marking phases.
//! - [`oracle`]: prediction oracles, query log, error and inversion counts.
//! - [`policy`]: eviction policies and the simulation loop.
//! - [`instances`]: lower-bound instances, Zipf workloads, CSV ingestion.
//! - [`harness`]: experiment grids and result tables.

pub mod error;
pub mod harness;
pub mod instances;
pub mod oracle;
pub mod policy;
pub mod sampling;
pub mod trace;

pub use error::{Error, Result};
pub use oracle::{count_inversions, total_error, Oracle, OracleSpec, QueryLog, QueryRecord};
pub use policy::{simulate, simulate_detailed, PolicyConfig, PolicyKind, SimOptions, SimReport};
pub use trace::{build_trace, decompose_phases, PageId, PhaseStructure, Trace};
