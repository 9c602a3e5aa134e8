//! Monte-Carlo simulation of energy consumption in a decentralized wireless
//! network whose nodes relay each other's packets (cooperate) or refuse to
//! (defect), choosing from local fitness signals only.
//!
//! The crate is layered bottom-up:
//!
//! * [`geometry`] places nodes in a disk and answers distance queries.
//! * [`channel`] holds the power-adaptation and relay-selection math.
//! * [`engine`] runs slots and iterations, tracking energy and fitness.
//! * [`strategy`] maps fitness history to the next cooperator flag.
//! * [`metrics`] normalizes against the all-defector baseline and aggregates.
//! * [`config`] and [`experiment`] drive batches and write CSV reports.

pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod metrics;
pub mod seed;
pub mod strategy;

pub use error::{Error, Result};
