//! Criterion benchmarks for `cocycle-core`; see `benches/`.
