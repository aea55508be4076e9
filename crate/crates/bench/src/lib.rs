//! Criterion benchmarks for the chevweil kernels; see `benches/kernels.rs`.
