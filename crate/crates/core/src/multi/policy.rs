use crate::channel::{Deployment, FadingState};
use crate::error::{Error, Result};
use crate::linalg::{mimo_capacity, transmit_power_profile, ComplexMatrix};
use crate::metrics::{per_bs_radiated_power, PowerPolicy};
use crate::qos::QoSSpec;
use crate::scheme::{FrameDecision, FramePolicy, ModeUse};

use super::alloc::{mode_objective, solve_delta, solve_zeta, tdma_time_alloc, BdUser};
use super::bd::{bd_antenna_profile, bd_gains};
use super::priority::{priority_chain, semi_random_select};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    /// Simultaneous service with block-diagonalization precoding.
    Bd,
    /// One user at a time, full power, time shares per frame.
    Tdma,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    /// Round-robin over a fixed user order.
    Priority(Vec<usize>),
    /// Uniform subsets, drawn from `seed`.
    SemiRandom { seed: u64 },
}

/// How the chosen mode is shared among users.
#[derive(Debug, Clone, PartialEq)]
pub enum Split {
    Silent,
    Power { powers: Vec<f64>, zeta: f64 },
    Time { shares: Vec<f64>, delta: f64 },
}

impl Split {
    fn values(&self) -> Vec<f64> {
        match self {
            Split::Silent => Vec::new(),
            Split::Power { powers, .. } => powers.clone(),
            Split::Time { shares, .. } => shares.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiUserAllocation {
    pub mode: usize,
    pub subset: Vec<usize>,
    pub split: Split,
    pub rates: Vec<f64>,
    pub lambda: Vec<f64>,
}

/// λ-independent data of one frame: the subset for each `L` and either the
/// BD gains `[L][user]` or the full-power rates `[L][user]`.
#[derive(Debug, Clone)]
pub struct MultiFrame {
    pub subsets: Vec<Vec<usize>>,
    pub bd_gains: Vec<Vec<Vec<f64>>>,
    pub tdma_rates: Vec<Vec<f64>>,
}

/// Rate of every user served alone by all BSs at full-mode power.
pub fn full_cooperation_rates(
    state: &FadingState,
    power: &PowerPolicy,
    bt: f64,
) -> Result<Vec<f64>> {
    let all: Vec<usize> = (0..state.num_bs()).collect();
    let p = power.power(all.len());
    (0..state.num_users())
        .map(|n| mimo_capacity(&state.user_channel(n, &all), p, bt))
        .collect()
}

#[derive(Debug, Clone)]
pub struct MultiUserPolicy {
    pub access: Access,
    pub selection: Selection,
    pub qos: Vec<QoSSpec>,
    pub power: PowerPolicy,
    pub bt: f64,
    pub deployment: Deployment,
}

impl MultiUserPolicy {
    pub fn new(
        access: Access,
        selection: Selection,
        qos: Vec<QoSSpec>,
        power: PowerPolicy,
        bt: f64,
        deployment: Deployment,
    ) -> Result<Self> {
        let k = deployment.num_users();
        if qos.len() != k {
            return Err(Error::InvalidArgument(format!(
                "{} QoS specs for {k} users",
                qos.len()
            )));
        }
        if let Selection::Priority(order) = &selection {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != (0..k).collect::<Vec<_>>() {
                return Err(Error::InvalidArgument(format!(
                    "priority order {order:?} is not a permutation of 0..{k}"
                )));
            }
        }
        Ok(Self {
            access,
            selection,
            qos,
            power,
            bt,
            deployment,
        })
    }

    fn thetas(&self) -> Vec<f64> {
        self.qos.iter().map(|q| q.theta).collect()
    }

    fn channels(&self, state: &FadingState, subset: &[usize]) -> Vec<ComplexMatrix> {
        (0..state.num_users())
            .map(|n| state.user_channel(n, subset))
            .collect()
    }

    /// Per-user rates and split of mode `l` at `lambda`.
    pub fn mode_allocation(
        &self,
        frame: &MultiFrame,
        l: usize,
        lambda: &[f64],
    ) -> (Vec<f64>, Split) {
        let k = self.qos.len();
        if l == 0 {
            return (vec![0.0; k], Split::Silent);
        }
        match self.access {
            Access::Bd => {
                let users: Vec<BdUser> = frame.bd_gains[l]
                    .iter()
                    .zip(&self.qos)
                    .zip(lambda)
                    .map(|((g, q), &lam)| BdUser {
                        gains: g,
                        theta: q.theta,
                        lambda: lam,
                    })
                    .collect();
                match solve_zeta(&users, self.power.power(l), self.bt) {
                    None => (vec![0.0; k], Split::Silent),
                    Some(sol) => (
                        sol.users.iter().map(|u| u.rate).collect(),
                        Split::Power {
                            powers: sol.users.iter().map(|u| u.power).collect(),
                            zeta: sol.zeta,
                        },
                    ),
                }
            }
            Access::Tdma => {
                let rates = &frame.tdma_rates[l];
                let thetas = self.thetas();
                match solve_delta(rates, &thetas, lambda) {
                    None => (vec![0.0; k], Split::Silent),
                    Some(delta) => {
                        let shares = tdma_time_alloc(rates, &thetas, lambda, delta);
                        (
                            shares.iter().zip(rates).map(|(t, r)| t * r).collect(),
                            Split::Time { shares, delta },
                        )
                    }
                }
            }
        }
    }

    /// Mode with the smallest `L + Σ λ_n e^{-θ_n R_n}`; lowest `L` on ties.
    pub fn allocate(&self, frame: &MultiFrame, lambda: &[f64]) -> MultiUserAllocation {
        let thetas = self.thetas();
        let mut best = (0usize, vec![0.0; self.qos.len()], Split::Silent);
        let mut best_obj = mode_objective(0, &best.1, &thetas, lambda);
        for l in 1..frame.subsets.len() {
            // The objective of mode l is at least l.
            if l as f64 >= best_obj {
                break;
            }
            let (rates, split) = self.mode_allocation(frame, l, lambda);
            let obj = mode_objective(l, &rates, &thetas, lambda);
            if obj < best_obj {
                best_obj = obj;
                best = (l, rates, split);
            }
        }
        MultiUserAllocation {
            mode: best.0,
            subset: frame.subsets[best.0].clone(),
            split: best.2,
            rates: best.1,
            lambda: lambda.to_vec(),
        }
    }
}

impl FramePolicy for MultiUserPolicy {
    type Frame = MultiFrame;

    fn num_users(&self) -> usize {
        self.qos.len()
    }

    fn prepare(&self, state: &FadingState) -> Result<MultiFrame> {
        let k_bs = state.num_bs();
        let subsets: Vec<Vec<usize>> = match &self.selection {
            Selection::Priority(order) => {
                let gains: Vec<Vec<f64>> = (0..state.num_users())
                    .map(|n| state.aggregate_gains(n))
                    .collect();
                priority_chain(&gains, order)
            }
            Selection::SemiRandom { seed } => (0..=k_bs)
                .map(|l| semi_random_select(k_bs, l, *seed, state.frame))
                .collect(),
        };
        let mut bd = vec![Vec::new()];
        let mut tdma = vec![vec![0.0; state.num_users()]];
        for (l, subset) in subsets.iter().enumerate().skip(1) {
            let channels = self.channels(state, subset);
            match self.access {
                Access::Bd => bd.push(bd_gains(&channels)?),
                Access::Tdma => tdma.push(
                    channels
                        .iter()
                        .map(|h| mimo_capacity(h, self.power.power(l), self.bt))
                        .collect::<Result<Vec<f64>>>()?,
                ),
            }
        }
        Ok(MultiFrame {
            subsets,
            bd_gains: bd,
            tdma_rates: tdma,
        })
    }

    fn evaluate(&self, frame: &MultiFrame, lambda: &[f64], rates: &mut [f64]) -> f64 {
        let a = self.allocate(frame, lambda);
        rates.copy_from_slice(&a.rates);
        a.mode as f64
    }

    fn decide(&self, frame: &MultiFrame, lambda: &[f64]) -> FrameDecision {
        let a = self.allocate(frame, lambda);
        FrameDecision {
            usage: a.mode as f64,
            modes: vec![ModeUse {
                subset: a.subset,
                weight: 1.0,
            }],
            rates: a.rates,
            split: a.split.values(),
        }
    }

    fn radiated_power(
        &self,
        state: &FadingState,
        _frame: &MultiFrame,
        decision: &FrameDecision,
    ) -> Result<Vec<f64>> {
        let subset = &decision.modes[0].subset;
        let mut antenna = vec![0.0; self.deployment.antennas_in(subset)];
        if subset.is_empty() || decision.split.is_empty() {
            return Ok(vec![0.0; self.deployment.num_bs()]);
        }
        let channels = self.channels(state, subset);
        for (n, &x) in decision.split.iter().enumerate() {
            if x <= 0.0 {
                continue;
            }
            let profile = match self.access {
                Access::Bd => bd_antenna_profile(&channels, n, x)?,
                Access::Tdma => {
                    transmit_power_profile(&channels[n], self.power.power(subset.len()))?
                        .into_iter()
                        .map(|p| p * x)
                        .collect()
                }
            };
            antenna.iter_mut().zip(profile).for_each(|(a, p)| *a += p);
        }
        Ok(per_bs_radiated_power(&self.deployment, subset, &antenna))
    }
}
