//! Library half of the `qmap` command-line tools: scenario family presets
//! and the benchmark/tuning builders the binary wires to subcommands.

pub mod bench;
pub mod families;
pub mod tune;

pub use bench::{bench_scaling, bench_table, bench_trace, ScalingArgs, TableArgs, TraceArgs};
pub use families::{family, family_names, table_families, Family, FAMILIES};
pub use tune::{bench_tune, TuneArgs, TuneOutput};
