//! Criterion benchmarks for path simulation, cycle sampling and the PDE
//! drift computation. Run with `cargo bench -p epp-bench`.
