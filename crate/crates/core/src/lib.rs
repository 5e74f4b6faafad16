//! Zero-shot multi-objective topology search for photonic tensor cores.

pub mod cli;
pub mod cost;
pub mod device;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod pdk;
pub mod proxy;
pub mod rng;
pub mod search;
pub mod topology;

pub use error::{Error, Result};
