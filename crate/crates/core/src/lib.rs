#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approximant;
pub mod asymptotics;
pub mod catalog;
pub mod error;
pub mod harness;
pub mod quadrature;
pub mod quench;

pub use error::{Error, Result};
