//! Activity-graph analytics for EOSIO action-trace corpora.
//!
//! The pipeline runs: [`trace`] parses JSON-lines action records, [`ingest`]
//! classifies them into account-creation, vote, transfer and
//! contract-authorization events, [`graph`] aggregates events into weighted
//! digraphs, [`builders`] adds per-activity checks, [`metrics`] computes the
//! metric suite, and [`sample`] / [`export`] prepare data for renderers.
//! [`synth`] generates corpora with known ground truth.

pub mod account;
pub mod amount;
pub mod builders;
pub mod export;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod sample;
pub mod store;
pub mod synth;
pub mod trace;

pub use account::{AccountError, AccountId};
pub use builders::{
    build_acg, build_activity, build_avg, build_cag, build_mtg, BuildDiagnostics, BuildError,
    DiagnosticsConfig,
};
pub use graph::{
    build_graph, degree_views, undirected_projection, ActivityGraph, DegreeHistogram,
    DegreeViews, Edge, GraphBuilder, GraphError, NodeId, UndirectedGraph,
};
pub use ingest::{
    classify, ingest_corpus, ingest_reader, ingest_records, Activity, ActivityEvent,
    IngestStats, SystemAccounts,
};
pub use metrics::{full_report, MetricsReport, PowerLawFit};
pub use trace::{parse_record, ActionKind, ActionRecord, RecordError, RecordErrorKind};
