//! Criterion benchmarks for the stabilizer engine; see `benches/`.
