//! Experiment configuration, Monte Carlo runs, sweeps and CSV output.

mod config;
mod csv;
mod run;

pub use config::{AreaConfig, ChannelConfig, Geometry, ScenarioConfig, Scheme, SweepAxis, UserQos};
pub use csv::{csv_header, csv_row, write_csv};
pub use run::{
    fixed_cardinality_solve, ibs_ts_solve, ogbs_pt_solve, pbs_bd_pt_solve, pbs_tdma_pt_solve,
    run_experiment, sweep, AnyPolicy, Experiment, FrameRecord, Infeasibility, Outcome, RunResult,
    Solution,
};
