//! Criterion benchmarks for the `fglab` kernels; see `benches/kernels.rs`.
