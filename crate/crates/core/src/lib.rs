// `!(x > 0.0)` is used on purpose so NaN parameters are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod channel;
pub mod error;
pub mod frontend;
pub mod harness;
pub mod rng;
pub mod rxdsp;
pub mod shaping;
pub mod sigcore;
pub mod txdsp;

pub use error::{Error, Result, Stage};
