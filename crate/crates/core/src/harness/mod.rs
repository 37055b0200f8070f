//! Experiment generators, metrics and CSV output.

pub mod experiment;
pub mod generators;

pub use experiment::{run_experiment, write_csv, ExperimentConfig, ExperimentKind, RunMetrics, CSV_HEADER};
pub use generators::{
    corrupt_advice, derive_seed, drift_instance, gen_synthetic, gen_synthetic_with, ingest_edge_list,
    parse_edge_list, EdgeListSystem,
};
