//! Multi-user BS selection: BD precoding and TDMA over priority or random
//! subsets, with per-frame inner power or time splits.

mod alloc;
mod bd;
mod policy;
mod priority;

pub use alloc::{
    bd_power_alloc, mode_objective, select_mode, solve_delta, solve_zeta, tdma_time_alloc, BdUser,
    UserPower, ZetaSolution,
};
pub use bd::{
    bd_antenna_profile, bd_gains, bd_precoders, projected_channel, BdDecomposition, BD_RANK_TOL,
};
pub use policy::{
    full_cooperation_rates, Access, MultiFrame, MultiUserAllocation, MultiUserPolicy, Selection,
    Split,
};
pub use priority::{
    priority_chain, priority_order, priority_select, semi_random_select, PriorityOrder,
};
