// `!(x >= 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adiabatic;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fockalg;
pub mod model;

pub use error::{Error, ErrorClass, Result};
