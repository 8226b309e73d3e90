//! Criterion benchmarks for the approxlab kernels; see `benches/`.
