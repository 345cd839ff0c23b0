//! Criterion benchmarks for sqzkit-core live in benches/.
