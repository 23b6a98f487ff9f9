//! Criterion benchmarks for `skglass-core` live under `benches/`.
