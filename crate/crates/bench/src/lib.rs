//! Criterion benchmarks for the coefficient algorithms live under `benches/`.
