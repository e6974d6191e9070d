//! Benchmarks live in `benches/`; see `invsat_core::harness::bench` for the CSV scaling table.
