//! System model: parameters, combinatorics and SC prefetching.

pub mod combinatorics;
pub mod config;
pub mod placement;

pub use combinatorics::{binomial, choose, enumerate_subsets, CacheSet};
pub use config::{Association, DemandVector, Relabeled, System, SystemConfig, SystemSpec};
pub use placement::{sc_place, MessageIndex, Placement, SubfileId, SubfileWire};
