//! Core of the documentary generator: a validated clip bank, seeded
//! constrained assembly of 2-4 minute documentaries, playlist exports and
//! session exposure analytics.

pub mod analytics;
pub mod clipbank;
pub mod export;
pub mod feasibility;
pub mod generator;
pub mod rng;
pub mod topic;

pub use analytics::{
    AnalyticsError, CoverageReport, SessionEntry, SessionLog, Simulation, SimulationPolicy,
    append_entry, coverage_report, simulate,
};
pub use clipbank::{
    BankStats, Clip, ClipBank, ClipId, Finding, FindingCode, Interviewee, IntervieweeId, LoadError,
    Severity, ValidationReport, bank_stats, load_bank, validate_bank,
};
pub use export::{ExportFormat, render, to_edl_csv, to_json_manifest, to_m3u};
pub use feasibility::{
    DEFAULT_EXACT_SEARCH_CAP, FeasibilityReport, InfeasibleReason, ORACLE_POOL_CAP, feasible,
    feasible_with_cap, oracle_enumerate,
};
pub use generator::{
    Documentary, FilterSelection, GenerateError, GenerationConstraints, filter_candidates,
    generate, generate_with_cap,
};
pub use topic::Topic;
