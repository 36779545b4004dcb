//! Exact and Monte Carlo evaluation of a two-phase impulse-control inventory
//! policy: running costs, occupation and ordering measures, escape masses.
//!
//! * [`model`]: costs, order addressing and per-order records;
//! * [`oracle`]: closed-form values for both demand models;
//! * [`det`]: exact engine for constant unit demand;
//! * [`sde`]: Monte Carlo engine for Brownian demand;
//! * [`measures`]: occupation and ordering measures, escape masses, costs;
//! * [`campaign`]: parallel, order-independent replication runs.

pub mod campaign;
pub mod det;
pub mod error;
pub mod histogram;
pub mod measures;
pub mod model;
pub mod oracle;
pub mod sde;
pub mod trace;

pub use error::{Error, Result};
