//! Single-user BS selection: subset heuristics, the time-sharing rate
//! envelope, and per-frame mode decisions.

mod envelope;
mod policy;
mod selection;

pub use envelope::{
    lagrangian_subdifferential, rate_envelope, theorem1_usage, usage_to_alpha, RateEnvelope,
};
pub use policy::{
    fixed_cardinality, probabilistic_capacity, probabilistic_mode, time_sharing_capacity,
    SingleFrame, SingleScheme, SingleUserPolicy,
};
pub use selection::{
    binomial, exhaustive_chain, exhaustive_select, incremental_chain, incremental_select,
    ordered_gain_chain, ordered_gain_select, subset_rate, SubsetSelection, ENUMERATION_LIMIT,
};
