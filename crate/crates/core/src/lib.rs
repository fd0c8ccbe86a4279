//! Toric anti-self-dual conformal 4-metrics from holomorphic seed data.
//!
//! A seed is a holomorphic involution τ near 0 together with a τ-odd map
//! φ into ℂ². Contour integrals of φ against square roots with two cuts give
//! the potential G and its derivatives, from which the conformal class on the
//! space of lines is assembled. The crate also ships the numerical tensor
//! calculus used to verify that the Weyl curvature is one-sided.

// Index loops mirror the tensor notation; `!(x > 0.0)` also rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bridge;
pub mod cech;
pub mod complex;
pub mod config;
pub mod curvature;
pub mod dsl;
pub mod error;
pub mod gen_engine;
pub mod holo;
pub mod kahler;
pub mod so_engine;

pub use error::{Error, Result};
