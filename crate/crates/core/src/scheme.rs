//! Common interface for per-frame selection policies driven by multipliers.

use rayon::prelude::*;

use crate::channel::{ChannelModel, FadingState};
use crate::dual::DualProblem;
use crate::error::Result;
use crate::qos::QoSSpec;

/// One mode used in a frame: its BS subset and its time share (`α_L`) or 1
/// for a one-hot mode choice.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUse {
    pub subset: Vec<usize>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameDecision {
    /// BSs used in this frame (fractional under time sharing).
    pub usage: f64,
    pub modes: Vec<ModeUse>,
    /// Service delivered to each user, nats/frame.
    pub rates: Vec<f64>,
    /// Per-user power or time share of the chosen mode; empty when unused.
    pub split: Vec<f64>,
}

/// A scheme splits into a λ-independent per-frame precomputation and a cheap
/// λ-dependent decision on top of it.
pub trait FramePolicy: Sync {
    type Frame: Send + Sync;

    fn num_users(&self) -> usize;

    fn prepare(&self, state: &FadingState) -> Result<Self::Frame>;

    /// Per-user service rates at `lambda`; returns the BS usage.
    fn evaluate(&self, frame: &Self::Frame, lambda: &[f64], rates: &mut [f64]) -> f64;

    fn decide(&self, frame: &Self::Frame, lambda: &[f64]) -> FrameDecision;

    /// Power radiated by each BS (length `K_bs`) under `decision`.
    fn radiated_power(
        &self,
        state: &FadingState,
        frame: &Self::Frame,
        decision: &FrameDecision,
    ) -> Result<Vec<f64>>;
}

/// Prepare frames `first..first + count` of the fading process.
pub fn prepare_frames<P: FramePolicy>(
    policy: &P,
    model: &ChannelModel,
    seed: u64,
    first: u64,
    count: usize,
) -> Result<Vec<P::Frame>> {
    (0..count as u64)
        .into_par_iter()
        .map(|k| policy.prepare(&model.draw(seed, first + k)))
        .collect()
}

/// A policy over a fixed frame set, seen as a dual problem with residuals
/// `e^{-θ_n R_n} - e^{-θ_n C̄_n}`.
pub struct PolicyProblem<'a, P: FramePolicy> {
    pub policy: &'a P,
    pub frames: &'a [P::Frame],
    pub qos: &'a [QoSSpec],
}

impl<P: FramePolicy> DualProblem for PolicyProblem<'_, P> {
    fn num_constraints(&self) -> usize {
        self.qos.len()
    }

    fn num_frames(&self) -> usize {
        self.frames.len()
    }

    fn frame_residuals(&self, frame: usize, lambda: &[f64], out: &mut [f64]) {
        self.policy.evaluate(&self.frames[frame], lambda, out);
        for (r, q) in out.iter_mut().zip(self.qos) {
            *r = (-q.theta * *r).exp() - q.target();
        }
    }
}
