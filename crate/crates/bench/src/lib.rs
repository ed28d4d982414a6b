//! Shared fixtures for the benchmarks.

use fronts::MapSpec;

/// A map from the core crate's surface catalog.
pub fn surface(name: &str) -> MapSpec {
    let path = format!("{}/../core/surfaces/{name}.map", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    MapSpec::parse(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}
