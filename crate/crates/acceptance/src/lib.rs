//! Holds the `acceptance` test binary (`tests/acceptance.rs`). Kept as its own
//! workspace member so that `cargo test --workspace` runs it after every
//! other suite.
