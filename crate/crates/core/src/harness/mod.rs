//! Instance generation, differential campaigns against the oracle,
//! shrinking, invariant batteries and scaling benchmarks.

pub mod battery;
pub mod bench;
pub mod differential;
pub mod generate;
pub mod shrink;

pub use battery::{run_battery, BatteryCheck, BatteryReport};
pub use bench::{bench_scaling, to_csv, write_csv, BenchConfig, ScalingRow};
pub use differential::{
    analyze, classify, differential_run, satisfiable_extending, Analysis, CampaignConfig,
    CampaignReport, Classification, DiscrepancyKind, DiscrepancyReport, Summary,
};
pub use generate::{generate, sampled_specs, split_seed, Generator, InstanceSpec};
pub use shrink::shrink;
