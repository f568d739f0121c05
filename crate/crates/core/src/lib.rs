//! Exact tools for simplicial distributions on 1-dimensional measurement
//! scenarios: construction, validation, vertex and contextuality tests,
//! classification of the vertices of cycle scenarios, bundle morphisms and
//! gluing-based vertex detection.
//!
//! Everything is exact rational arithmetic; the crate is `no_std` and only
//! needs `alloc`.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod bundle;
pub mod cycleclass;
pub mod dist;
mod error;
pub mod fixtures;
pub mod glue;
pub mod homotopy;
pub mod lpcore;
pub mod oracle;
pub mod rational;
pub mod space;

pub use error::{Error, Result};
pub use rational::Rational;
