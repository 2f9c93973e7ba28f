//! Criterion benchmarks for the superdark kernels; see `benches/`.
