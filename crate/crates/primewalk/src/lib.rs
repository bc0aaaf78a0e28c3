#![no_std]
//! Divisibility graphs on integer windows, walk counting, walk shapes and
//! their encodings, and combinatorial sieves with composite moduli.

extern crate alloc;

pub mod arith;
pub mod codec;
pub mod coloring;
pub mod divgraph;
pub mod error;
pub mod exact;
pub mod geom;
pub mod shapes;
pub mod sieve;
pub mod walks;

pub use error::{Error, Result};
