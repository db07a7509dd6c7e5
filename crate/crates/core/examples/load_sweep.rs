//! Load sweep of a scenario file, written as CSV to stdout.
//!
//! `cargo run --release --example load_sweep -- configs/single_load.toml ogbs-pt`

use std::io::stdout;

use dmimo::harness::{sweep, write_csv, ScenarioConfig, Scheme, SweepAxis};

fn main() -> dmimo::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/single_load.toml").into());
    let mut cfg = ScenarioConfig::load(path.as_ref())?;
    if let Some(s) = args.next() {
        cfg.scheme = s.parse::<Scheme>()?;
        cfg.validate()?;
    }
    cfg.frames = 2000;
    let loads = [200.0, 500.0, 800.0];
    let results = sweep(&cfg, SweepAxis::Load, &loads)?;
    write_csv(
        &mut stdout().lock(),
        &results,
        Some((SweepAxis::Load, &loads)),
        &cfg.qos()?,
        cfg.channel.frame_s,
    )
}
