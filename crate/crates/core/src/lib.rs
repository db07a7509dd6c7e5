//! Solvers and a Monte Carlo harness for QoS-aware base-station selection in
//! distributed MIMO downlinks.

// Guards of the form `!(x > 0.0)` are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod dual;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod multi;
pub mod qos;
pub mod scheme;
pub mod single;

pub use error::{Error, Result};
