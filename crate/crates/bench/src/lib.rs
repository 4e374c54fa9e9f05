// Benchmarks live in benches/; this crate exists for the bench target.
