//! Exact arithmetic for Witt groups of rational bilinear forms, point-scale
//! cobordism of self-dual complexes, polarized Hodge structures and
//! χ_y-genus sign calculus.

pub mod arith;
pub mod cobordism;
pub mod error;
pub mod forms;
pub mod gen;
pub mod genus;
pub mod hodge;
pub mod json;
pub mod linalg;
pub mod poly;
pub mod suites;
pub mod witt;

pub use error::{Error, Result};
