//! End-to-end delivery over an error-injecting broadcast channel, rate
//! curves with and without error correction, convex envelopes and demand
//! sweeps.

mod envelope;
mod rates;
mod session;
mod sweep;

pub use envelope::{convex_envelope, Envelope};
pub use rates::{optimal_ecc_worst_rate, rate_table, CodedLength, EccRatePoint, RateRow, RateTable};
pub use session::{
    run_session, run_session_with_code, ChannelConfig, CodeSummary, ErrorMode, PatternFailure,
    SessionReport, UserStatus, MAX_LISTED_FAILURES,
};
pub use sweep::{demand_sweep, DemandCount, DemandSource, SweepReport, DEFAULT_SWEEP_LIMIT, MAX_LISTED_DEMANDS};
