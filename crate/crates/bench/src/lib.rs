//! Benchmarks for the cotile pipeline live in `benches/`.
