//! Benchmark harness behind the `quesadilla` command-line tool.

pub mod bench;

pub use bench::{read_csv, run_bench, write_csv, BenchConfig, BenchRecord};
