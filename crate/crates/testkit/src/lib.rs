//! Test oracles and synthetic data.
//!
//! Everything here works on plain `Vec` rows and its own dense solver so
//! that it shares no code path with the library under test.

#![allow(clippy::needless_range_loop)]

pub mod oracle;
pub mod synthetic;
