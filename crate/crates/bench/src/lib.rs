//! Criterion benchmarks for `stripstab`; see `benches/`.
