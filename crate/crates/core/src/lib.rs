//! Selecting the best of several items from noisy observations `s = v + a`,
//! with the noise law known. The offset rule picks the item maximizing
//! `s_i - θ(A_i)`; this crate computes θ, evaluates regret exactly or by
//! simulation, searches for bad value vectors, and certifies lower bounds on
//! what any rule can achieve.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dist;
pub mod error;
pub mod linearize;
pub mod lowerbound;
pub mod numeric;
pub mod offset;
pub mod policy;
pub mod regret;
pub mod reproduce;
pub mod selftest;

pub use error::{Error, Result};
