//! Benchmark harness, scaling fits, lower-bound reference curve and the
//! plumbing behind the `qutrit` binary.

pub mod bench;
pub mod error;
pub mod fit;
pub mod lower_bound;
pub mod records;
pub mod verify;

pub use bench::{
    run_bench, sample_angles, synth_record, synthesize, Algorithm, BenchConfig, BenchReport, SynthOptions, Synthesis,
    TargetGate, T3_THETA,
};
pub use error::{CliError, ExitClass, Result};
pub use fit::{fit_records, fit_runtime, ols, FitResult, LinearFit, RuntimeFit};
pub use lower_bound::{lower_bound, lower_bound_line, LowerBoundLine};
pub use records::{read_csv, write_csv, BenchRecord};
pub use verify::{verify_word, Verification};
