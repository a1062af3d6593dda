//! Criterion benchmarks for the rigidspec kernels; see `benches/kernels.rs`.
