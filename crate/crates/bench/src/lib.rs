//! Criterion benchmarks for sphereqa; see `benches/`.
