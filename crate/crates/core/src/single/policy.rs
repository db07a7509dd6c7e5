use crate::channel::{Deployment, FadingState};
use crate::error::{Error, Result};
use crate::linalg::transmit_power_profile;
use crate::metrics::{per_bs_radiated_power, PowerPolicy};
use crate::qos::{effective_capacity, QoSSpec};
use crate::scheme::{FrameDecision, FramePolicy, ModeUse};

use super::envelope::{rate_envelope, theorem1_usage, usage_to_alpha, RateEnvelope};
use super::selection::{exhaustive_chain, incremental_chain, ordered_gain_chain, SubsetSelection};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleScheme {
    /// Greedy subsets, time sharing on the rate envelope.
    IbsTs,
    /// Ordered-gain subsets, one mode per frame.
    OgbsPt,
    /// Ordered-gain subsets at one cardinality for every frame.
    FixedL,
    /// Exhaustive subsets, time sharing on the rate envelope.
    OptimalTs,
}

impl SingleScheme {
    pub fn uses_envelope(self) -> bool {
        matches!(self, SingleScheme::IbsTs | SingleScheme::OptimalTs)
    }
}

/// Minimizer of `L + λ e^{-θ R_L}` over the modes; the lowest `L` wins ties.
pub fn probabilistic_mode(rates: &[f64], theta: f64, lambda: f64) -> usize {
    let mut best = (0, f64::INFINITY);
    for (l, r) in rates.iter().enumerate() {
        let obj = l as f64 + lambda * (-theta * r).exp();
        if obj < best.1 {
            best = (l, obj);
        }
    }
    best.0
}

/// Smallest `L ≥ 1` whose sample-average `e^{-θ R_L}` meets the target.
pub fn fixed_cardinality(per_frame_rates: &[Vec<f64>], qos: &QoSSpec) -> Option<usize> {
    let k = per_frame_rates.first()?.len() - 1;
    let n = per_frame_rates.len() as f64;
    (1..=k).find(|&l| {
        let mean = per_frame_rates
            .iter()
            .map(|r| (-qos.theta * r[l]).exp())
            .sum::<f64>()
            / n;
        mean <= qos.target()
    })
}

fn check_weights(rates: &[Vec<f64>], weights: &[Vec<f64>], theta: f64) -> Result<()> {
    if !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "θ must be positive, got {theta}"
        )));
    }
    if rates.is_empty() || rates.len() != weights.len() {
        return Err(Error::InvalidArgument(
            "need one weight vector per frame and at least one frame".into(),
        ));
    }
    for (r, w) in rates.iter().zip(weights) {
        if r.len() != w.len()
            || w.iter().any(|x| !(*x >= 0.0))
            || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidArgument(
                "mode weights must be a distribution over the frame's modes".into(),
            ));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("mode rates".into()));
        }
    }
    Ok(())
}

/// Effective capacity when every frame time-shares its modes, `alpha[k][L]`
/// of the frame going to mode `L`.
pub fn time_sharing_capacity(rates: &[Vec<f64>], alpha: &[Vec<f64>], theta: f64) -> Result<f64> {
    check_weights(rates, alpha, theta)?;
    let service: Vec<f64> = rates
        .iter()
        .zip(alpha)
        .map(|(r, a)| r.iter().zip(a).map(|(r, a)| r * a).sum())
        .collect();
    effective_capacity(&service, theta)
}

/// Effective capacity when every frame uses one mode, mode `L` with
/// probability `phi[k][L]`.
pub fn probabilistic_capacity(rates: &[Vec<f64>], phi: &[Vec<f64>], theta: f64) -> Result<f64> {
    check_weights(rates, phi, theta)?;
    let rmin = rates
        .iter()
        .zip(phi)
        .flat_map(|(r, p)| r.iter().zip(p).filter(|(_, p)| **p > 0.0).map(|(r, _)| *r))
        .fold(f64::INFINITY, f64::min);
    let mean = rates
        .iter()
        .zip(phi)
        .map(|(r, p)| {
            r.iter()
                .zip(p)
                .map(|(r, p)| p * (-theta * (r - rmin)).exp())
                .sum::<f64>()
        })
        .sum::<f64>()
        / rates.len() as f64;
    Ok(rmin - mean.ln() / theta)
}

#[derive(Debug, Clone)]
pub struct SingleFrame {
    /// Selection for each `L = 0..=K_bs`.
    pub chain: Vec<SubsetSelection>,
    pub envelope: Option<RateEnvelope>,
}

impl SingleFrame {
    pub fn rates(&self) -> Vec<f64> {
        self.chain.iter().map(|s| s.rate).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SingleUserPolicy {
    pub scheme: SingleScheme,
    pub qos: QoSSpec,
    pub power: PowerPolicy,
    pub bt: f64,
    pub deployment: Deployment,
    /// Cardinality used by [`SingleScheme::FixedL`].
    pub fixed_l: Option<usize>,
}

impl SingleUserPolicy {
    pub fn new(
        scheme: SingleScheme,
        qos: QoSSpec,
        power: PowerPolicy,
        bt: f64,
        deployment: Deployment,
    ) -> Result<Self> {
        if deployment.num_users() != 1 {
            return Err(Error::InvalidArgument(format!(
                "single-user schemes need exactly one user, got {}",
                deployment.num_users()
            )));
        }
        Ok(Self {
            scheme,
            qos,
            power,
            bt,
            deployment,
            fixed_l: None,
        })
    }

    fn theta(&self) -> f64 {
        self.qos.theta
    }

    /// `(usage, rate)` at multiplier `lambda`.
    pub fn choose(&self, frame: &SingleFrame, lambda: f64) -> (f64, f64) {
        match self.scheme {
            SingleScheme::IbsTs | SingleScheme::OptimalTs => {
                let env = frame
                    .envelope
                    .as_ref()
                    .expect("time-sharing frames carry an envelope");
                let usage = theorem1_usage(env, self.theta(), lambda);
                (usage, env.value(usage))
            }
            SingleScheme::OgbsPt => {
                let l = probabilistic_mode(&frame.rates(), self.theta(), lambda);
                (l as f64, frame.chain[l].rate)
            }
            SingleScheme::FixedL => {
                let l = self
                    .fixed_l
                    .expect("fixed cardinality chosen before evaluation");
                (l as f64, frame.chain[l].rate)
            }
        }
    }
}

impl FramePolicy for SingleUserPolicy {
    type Frame = SingleFrame;

    fn num_users(&self) -> usize {
        1
    }

    fn prepare(&self, state: &FadingState) -> Result<SingleFrame> {
        let chain = match self.scheme {
            SingleScheme::IbsTs => incremental_chain(state, 0, &self.power, self.bt)?,
            SingleScheme::OptimalTs => exhaustive_chain(state, 0, &self.power, self.bt)?,
            SingleScheme::OgbsPt | SingleScheme::FixedL => {
                ordered_gain_chain(state, 0, &self.power, self.bt)?
            }
        };
        let envelope = if self.scheme.uses_envelope() {
            Some(rate_envelope(
                &chain.iter().map(|s| s.rate).collect::<Vec<_>>(),
            )?)
        } else {
            None
        };
        Ok(SingleFrame { chain, envelope })
    }

    fn evaluate(&self, frame: &SingleFrame, lambda: &[f64], rates: &mut [f64]) -> f64 {
        let (usage, rate) = self.choose(frame, lambda[0]);
        rates[0] = rate;
        usage
    }

    fn decide(&self, frame: &SingleFrame, lambda: &[f64]) -> FrameDecision {
        let (usage, rate) = self.choose(frame, lambda[0]);
        let modes = if let Some(env) = frame
            .envelope
            .as_ref()
            .filter(|_| self.scheme.uses_envelope())
        {
            usage_to_alpha(env, usage)
                .expect("usage lies on the envelope")
                .into_iter()
                .enumerate()
                .filter(|&(_, a)| a > 0.0)
                .map(|(l, a)| ModeUse {
                    subset: frame.chain[l].subset.clone(),
                    weight: a,
                })
                .collect()
        } else {
            vec![ModeUse {
                subset: frame.chain[usage as usize].subset.clone(),
                weight: 1.0,
            }]
        };
        FrameDecision {
            usage,
            modes,
            rates: vec![rate],
            split: Vec::new(),
        }
    }

    fn radiated_power(
        &self,
        state: &FadingState,
        _frame: &SingleFrame,
        decision: &FrameDecision,
    ) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.deployment.num_bs()];
        for mode in decision.modes.iter().filter(|m| !m.subset.is_empty()) {
            let h = state.user_channel(0, &mode.subset);
            let profile = transmit_power_profile(&h, self.power.power(mode.subset.len()))?;
            let per_bs = per_bs_radiated_power(&self.deployment, &mode.subset, &profile);
            out.iter_mut()
                .zip(per_bs)
                .for_each(|(o, p)| *o += mode.weight * p);
        }
        Ok(out)
    }
}
