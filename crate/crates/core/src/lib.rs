//! Coded caching with shared caches: placement, delivery planning, the index
//! coding view of delivery, error-correcting delivery and a channel simulator.

pub mod delivery;
pub mod ecc;
pub mod error;
pub mod gf2;
pub mod indexcoding;
pub mod model;
pub mod packet;
pub mod sim;

pub use error::{Error, Result};
