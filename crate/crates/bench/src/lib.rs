//! Criterion benchmarks for quantization, the discrete transforms and Rips persistence live
//! under `benches/`; run them with `cargo bench -p qupid-bench`.
