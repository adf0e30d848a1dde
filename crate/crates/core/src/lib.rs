#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod construct;
pub mod designs;
pub mod enumerate;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod harness;
pub mod measures;
pub mod population;
pub mod rng;
pub mod walker;

pub use error::{Error, Result};
