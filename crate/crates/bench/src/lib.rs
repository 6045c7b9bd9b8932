//! Experiment harness around `jppc-core`: scenario files, seeded scenario
//! generation, the fixed-position comparison strategies, parameter sweeps,
//! timing tables and CSV/JSON output. The `jppc` binary is a thin CLI over
//! this crate.

pub mod baselines;
pub mod check;
pub mod experiment;
pub mod scenario_file;
pub mod sweep;
pub mod timing;

pub use baselines::{run_baseline, solve_joint, BaselineKind, RunOptions};
pub use experiment::{generate_scenario, generate_scenario_k, trial_rng, ExperimentSpec, SolverChoice, Sweep, SweepVariable};
pub use scenario_file::{parse_scenario, read_scenario, write_scenario, ScenarioFile};
pub use sweep::{read_csv, sweep, write_csv, write_sidecar, SweepRow, TraceRow};
pub use timing::{timing_table, TimingRow};
