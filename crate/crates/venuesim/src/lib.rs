//! Deterministic generator of indoor crowd-movement trajectory datasets.
//!
//! Simulates a three-day academic conference in a two-floor gridded venue:
//! a seeded roster of people moves between scheduled activities under energy,
//! interest, permission and congestion constraints, while scripted anomaly
//! events are forced on top of the normal behavior. The fused, deduplicated
//! cell-entry stream is written as CSV together with a machine-readable
//! ground-truth report, and a validator checks any such dataset for physical
//! consistency and for the fingerprints of the builtin events.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod generate;
pub mod groundtruth;
pub mod events;
pub mod model;
pub mod pipeline;
pub mod rng;
pub mod profile;
pub mod record;
pub mod routing;
pub mod sim;
pub mod stats;
pub mod timebase;
pub mod validate;

pub use error::{Result, SimError, Window};
