//! Benchmarks of the `fqh-core` kernels live in `benches/kernels.rs`; run them
//! with `cargo bench -p fqh-bench`.
