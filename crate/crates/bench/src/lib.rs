//! Benchmarks for the rotating-euler toolkit live in `benches/`; run them with
//! `cargo bench -p rotating-euler-bench`.
