#![allow(dead_code)]

use std::path::PathBuf;

use dmimo::harness::{ScenarioConfig, Scheme};

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(format!("{name}.toml"))
}

pub fn config(name: &str) -> ScenarioConfig {
    ScenarioConfig::load(&config_path(name)).expect("bundled config loads")
}

pub fn with(mut cfg: ScenarioConfig, scheme: Scheme, frames: usize) -> ScenarioConfig {
    cfg.scheme = scheme;
    cfg.frames = frames;
    cfg.validate().expect("valid override");
    cfg
}
