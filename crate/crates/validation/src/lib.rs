//! Acceptance criteria for `graph-energy`; everything lives in
//! `tests/acceptance.rs`.
//!
//! The suite is a separate package so that `cargo test --workspace` runs it
//! after every other test binary.
