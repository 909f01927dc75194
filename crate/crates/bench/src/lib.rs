//! Criterion benchmarks for the flow kernels; see `benches/`.
