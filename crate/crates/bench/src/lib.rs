//! Benchmark-only crate; see `benches/solves.rs`.
