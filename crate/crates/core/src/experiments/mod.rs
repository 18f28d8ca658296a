//! Seeded experiments: the instability example, randomized checks of the
//! stability and approximation bounds, and the 1-skeleton timing comparison.

mod bench;
mod demo;
mod stability;

pub use bench::{bench_instance, bench_skeleton, BenchConfig, BenchReport};
pub use demo::{demo_instability, demo_instance, DemoReport};
pub use stability::{verify_stability, ExperimentReport, Theorem, TrialRecord, VerifyConfig};
