#![allow(dead_code)]

use std::path::PathBuf;

use lexatlas::ingest::{ingest, IngestOutput};
use lexatlas::IngestConfig;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn json_fixture(name: &str) -> serde_json::Value {
    serde_json::from_str(&read_fixture(name)).unwrap()
}

pub fn ingest_fixtures(names: &[&str], lang: &str) -> IngestOutput {
    let files: Vec<PathBuf> = names.iter().map(|n| fixture(n)).collect();
    ingest(&files, lang, &IngestConfig::default()).unwrap()
}
