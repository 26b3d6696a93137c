//! Criterion benchmarks for the core algorithms; see the `benches/`
//! directory. This library target is intentionally empty.
