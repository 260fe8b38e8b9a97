//! Delivery planning: the SC worst-case scheme, the improved scheme for
//! repeated demands, and closed-form transmission counts.
//!
//! Both planners work on the canonical (occupancy-sorted) relabeling of the
//! caches internally and report cache sets in the caller's original labels.

mod counts;
mod improved;
mod plan;
mod sc;

pub use counts::{
    predicted_count_thm3, worst_case_count, worst_case_count_for_profile, worst_case_rate_points,
    RatePoint,
};
pub use improved::{eliminate_redundant, improved_delivery, select_leaders, Elimination};
pub use plan::{
    Eliminated, PlanWire, Rate, Scheme, Term, Transmission, TransmissionPlan, TransmissionWire,
};
pub use sc::{sc_delivery, sc_rounds};

use crate::error::Result;
use crate::model::{Association, DemandVector, SystemConfig};

/// Dispatches to the planner for `scheme`.
pub fn plan(
    scheme: Scheme,
    cfg: &SystemConfig,
    assoc: &Association,
    d: &DemandVector,
) -> Result<TransmissionPlan> {
    match scheme {
        Scheme::ScWorst => sc_delivery(cfg, assoc, d),
        Scheme::Improved => improved_delivery(cfg, assoc, d),
    }
}
