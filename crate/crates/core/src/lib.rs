//! Scenario engine for manual cocoa pollination.
//!
//! Country profiles feed per-hectare yield scenarios ([`yields`]), which give
//! a world supply shock and a long-run equilibrium price ([`market`]). Farm
//! income under those prices ([`income`]) drives the break-even labour
//! analysis ([`breakeven`]). [`winwin`] sizes the adoption that only offsets
//! production losses, [`trial`] reads field-trial records and [`replicate`]
//! regenerates the published tables and figure datasets.

// Guards are written as `!(x > 0.0)` so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod breakeven;
pub mod config;
pub mod error;
pub mod income;
pub mod market;
pub mod profile;
pub mod replicate;
pub mod sweep;
pub mod trial;
pub mod winwin;
pub mod yields;

pub use error::{Error, Result};
