//! Delivery as index coding with side information: instance construction,
//! receiver decoding, the `B(d)` lower-bound set and exhaustive α/κ oracles.

mod bounds;
mod instance;
mod oracle;

pub use bounds::{
    bounds_report, construct_b, message_indices, profile_bound, BoundsReport, OracleOptions,
};
pub use instance::{build_icsi, is_decodable, receiver_decode, IcsiInstance, Receiver};
pub use oracle::{
    alpha_bruteforce, is_generalized_independent, kappa_bruteforce, kappa_search, KappaResult, DEFAULT_ALPHA_LIMIT,
    DEFAULT_GI_LIMIT, DEFAULT_KAPPA_LIMIT,
};
