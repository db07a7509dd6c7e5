mod common;

use common::{config, with};
use dmimo::harness::{sweep, write_csv, RunResult, ScenarioConfig, Scheme, SweepAxis};

fn csv_under(threads: usize, cfg: &ScenarioConfig, values: &[f64]) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap();
    let results: Vec<RunResult> = pool
        .install(|| sweep(cfg, SweepAxis::Load, values))
        .unwrap();
    let mut out = Vec::new();
    write_csv(
        &mut out,
        &results,
        Some((SweepAxis::Load, values)),
        &cfg.qos().unwrap(),
        cfg.channel.frame_s,
    )
    .unwrap();
    out
}

#[test]
fn single_user_csv_is_identical_across_worker_counts() {
    for scheme in [
        Scheme::IbsTs,
        Scheme::OgbsPt,
        Scheme::FixedL,
        Scheme::OptimalTs,
    ] {
        let cfg = with(config("single_load"), scheme, 1000);
        let one = csv_under(1, &cfg, &[400.0, 1000.0]);
        let four = csv_under(4, &cfg, &[400.0, 1000.0]);
        assert_eq!(one, four, "{scheme}");
    }
}

#[test]
fn multi_user_csv_is_identical_across_worker_counts() {
    for scheme in [Scheme::PbsBdPt, Scheme::SemirandomTdmaPt] {
        let cfg = with(config("multi_load"), scheme, 300);
        let one = csv_under(1, &cfg, &[200.0]);
        let three = csv_under(3, &cfg, &[200.0]);
        assert_eq!(one, three, "{scheme}");
    }
}

#[test]
fn seed_changes_the_outcome() {
    let a = with(config("single_load"), Scheme::OgbsPt, 600);
    let mut b = a.clone();
    b.seed = 2;
    assert_ne!(csv_under(2, &a, &[600.0]), csv_under(2, &b, &[600.0]));
}
