//! File formats, instance generators, tables and the benchmark harness.

pub mod bench;
pub mod generate;
pub mod native;
pub mod orlib;
pub mod table;

pub use bench::{
    run_benchmark, BenchConfig, BenchSummary, BenchTable, KRule, ResultRow, RowStatus, SolverKind,
};
pub use generate::{generate_pmpdc, generate_profiles};
pub use native::{parse_native, to_native_string, NativeBody, NativeFile, SensorScenario};
pub use orlib::{parse_orlib_pmedian, shortest_paths, CoverageRule};
