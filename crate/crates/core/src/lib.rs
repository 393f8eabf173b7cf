//! Exact enumeration and verification engine for the anticanonical degrees of
//! non-Gorenstein Q-factorial canonical Fano threefolds of Picard number one.
//!
//! The pipeline runs bottom-up:
//!
//! * [`arith`]: exact rationals and divisibility helpers,
//! * [`basket`]: Reid baskets and the Riemann–Roch identities,
//! * [`sieve`]: the index-regime candidate tables,
//! * [`filters`]: Fano-index, `J_A` and torsion filters producing the survivor table,
//! * [`classify`]: the full pipeline with the exclusions applied,
//! * [`curves`]: singular-curve configurations and the two exclusion audits,
//! * [`wps`]: weighted projective space invariants,
//! * [`report`]: table artifacts in Markdown, CSV and JSON.

pub mod arith;
pub mod basket;
pub mod classify;
pub mod curves;
pub mod error;
pub mod filters;
pub mod report;
pub mod sieve;
pub mod wps;

pub use arith::Rational;
pub use basket::{Basket, BasketPoint};
pub use error::{Error, Result};
