//! Generalized linear models for hospital length-of-stay counts.
//!
//! The crate covers the whole analysis path: typed CSV ingestion
//! ([`ingest`]), the study cleaning recipe ([`preprocess`]), dummy
//! encoding and seeded train/test splitting ([`design`]), IRLS fitting with
//! Wald inference ([`glm`]), forward stepwise selection under AIC or BIC
//! ([`stepwise`]) and residual / goodness-of-fit diagnostics
//! ([`diagnostics`]). Fitted models persist as JSON through [`model_io`].

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod design;
pub mod diagnostics;
pub mod error;
pub mod glm;
pub mod ingest;
pub mod model_io;
pub mod preprocess;
pub mod special;
pub mod stats;
pub mod stepwise;

pub use design::{DesignMatrix, SplitSpec, Term, TermKind, INTERCEPT};
pub use error::{Error, Result};
pub use glm::{Family, FitOptions, GlmFit};
pub use ingest::{ColumnKind, ColumnSchema, RawTable, Schema};
pub use preprocess::{CleaningReport, FactorSpec};
pub use stepwise::{Criterion, SelectionTrace};
