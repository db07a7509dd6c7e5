//! Projected dual ascent on the Lagrange multipliers of the QoS constraints.
//!
//! Two drivers share one problem interface: a batch mode that steps on the
//! exact sample-average residual over a fixed frame set, and a streaming mode
//! that steps on an autoregressive estimate updated one frame at a time.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-frame constraint residuals at a given multiplier vector. Residuals
/// must be non-increasing in each multiplier.
pub trait DualProblem: Sync {
    fn num_constraints(&self) -> usize;
    fn num_frames(&self) -> usize;
    fn frame_residuals(&self, frame: usize, lambda: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrackerMode {
    Batch,
    Streaming,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    pub mode: TrackerMode,
    /// Gradient step ϵ (initial λ increment in adaptive batch mode).
    pub step: f64,
    /// Autoregressive filter factor ϑ.
    pub filter: f64,
    pub budget: usize,
    /// Streaming iterations excluded from the λ average.
    pub warmup: usize,
    pub tolerance: f64,
    pub lambda_init: f64,
    /// λ at or above this with a positive residual signals infeasibility.
    pub ceiling: f64,
    /// Batch mode: move each component by its own step in the direction of
    /// its residual, halving the step on a sign change and growing it by half
    /// otherwise. When false, the step is `step * residual`.
    pub adaptive: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            mode: TrackerMode::Batch,
            step: 0.01,
            filter: 0.99,
            budget: 100_000,
            warmup: 1_000,
            tolerance: 1e-4,
            lambda_init: 1.0,
            ceiling: 1e9,
            adaptive: true,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!(
                "tracker step must be positive, got {}",
                self.step
            )));
        }
        if !(self.filter > 0.0 && self.filter < 1.0) {
            return Err(Error::Config(format!(
                "tracker filter must lie in (0, 1), got {}",
                self.filter
            )));
        }
        if self.budget == 0
            || !(self.tolerance > 0.0)
            || !(self.lambda_init >= 0.0)
            || !(self.ceiling > 0.0)
        {
            return Err(Error::Config(
                "tracker budget, tolerance, ceiling must be positive; λ0 >= 0".into(),
            ));
        }
        if self.mode == TrackerMode::Streaming && self.warmup >= self.budget {
            return Err(Error::Config(
                "streaming warm-up must be shorter than the budget".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackReport {
    pub lambda: Vec<f64>,
    /// Sample-average residuals over the problem's frames at `lambda`.
    pub residuals: Vec<f64>,
    pub converged: bool,
    /// Batch mode stopped because the step collapsed at a jump of the
    /// sample-average residual rather than at an exact root.
    pub stalled: bool,
    pub infeasible: Vec<bool>,
    pub iterations: usize,
    /// Max minus min of each λ over the final stretch of iterations.
    pub oscillation: Vec<f64>,
}

impl TrackReport {
    pub fn any_infeasible(&self) -> bool {
        self.infeasible.iter().any(|&x| x)
    }
}

/// Frames per partial sum. Fixed so sums do not depend on the worker count.
const CHUNK: usize = 64;

/// Sample-average residuals over all frames of `problem`.
pub fn mean_residuals<P: DualProblem + ?Sized>(problem: &P, lambda: &[f64]) -> Vec<f64> {
    let n = problem.num_constraints();
    let frames = problem.num_frames();
    let partials: Vec<Vec<f64>> = (0..frames.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; n];
            let mut buf = vec![0.0; n];
            for f in c * CHUNK..((c + 1) * CHUNK).min(frames) {
                problem.frame_residuals(f, lambda, &mut buf);
                acc.iter_mut().zip(&buf).for_each(|(a, b)| *a += b);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for p in &partials {
        total.iter_mut().zip(p).for_each(|(t, x)| *t += x);
    }
    total.iter_mut().for_each(|t| *t /= frames.max(1) as f64);
    total
}

pub fn track<P: DualProblem + ?Sized>(problem: &P, cfg: &TrackerConfig) -> Result<TrackReport> {
    cfg.validate()?;
    if problem.num_frames() == 0 {
        return Err(Error::InvalidArgument(
            "tracking needs at least one frame".into(),
        ));
    }
    Ok(match cfg.mode {
        TrackerMode::Batch => track_batch(problem, cfg),
        TrackerMode::Streaming => track_streaming(problem, cfg),
    })
}

fn satisfied(g: f64, lambda: f64, tol: f64) -> bool {
    g.abs() <= tol || (lambda == 0.0 && g < 0.0)
}

fn track_batch<P: DualProblem + ?Sized>(problem: &P, cfg: &TrackerConfig) -> TrackReport {
    let n = problem.num_constraints();
    let mut lambda = vec![cfg.lambda_init; n];
    let mut step = vec![cfg.step; n];
    let mut prev_sign = vec![0.0f64; n];
    let mut infeasible = vec![false; n];
    let mut history: Vec<Vec<f64>> = Vec::new();
    let mut last_feasible: Option<(Vec<f64>, Vec<f64>)> = None;
    let (mut converged, mut stalled) = (false, false);
    let mut g = mean_residuals(problem, &lambda);
    let mut iterations = 0;
    while iterations < cfg.budget {
        if (0..n).all(|i| satisfied(g[i], lambda[i], cfg.tolerance)) {
            converged = true;
            break;
        }
        if g.iter().all(|&x| x <= 0.0) {
            last_feasible = Some((lambda.clone(), g.clone()));
        }
        for i in 0..n {
            infeasible[i] = lambda[i] >= cfg.ceiling && g[i] > 0.0;
        }
        if infeasible.iter().any(|&x| x) {
            break;
        }
        let mut moved = false;
        for i in 0..n {
            if satisfied(g[i], lambda[i], cfg.tolerance) {
                continue;
            }
            let sign = g[i].signum();
            let delta = if cfg.adaptive {
                if prev_sign[i] * sign < 0.0 {
                    step[i] *= 0.5;
                } else if prev_sign[i] == sign {
                    step[i] = (step[i] * 1.5).min(cfg.ceiling);
                }
                step[i] * sign
            } else {
                step[i] * g[i]
            };
            prev_sign[i] = sign;
            let next = (lambda[i] + delta).clamp(0.0, cfg.ceiling);
            if (next - lambda[i]).abs() > 1e-13 * lambda[i].max(1.0) {
                moved = true;
            }
            lambda[i] = next;
        }
        iterations += 1;
        history.push(lambda.clone());
        g = mean_residuals(problem, &lambda);
        if !moved {
            stalled = true;
            converged = true;
            break;
        }
    }
    // A stalled or exhausted run ends on whichever side of a residual jump it
    // happened to be; prefer the latest iterate that met every constraint.
    if !(0..n).all(|i| satisfied(g[i], lambda[i], cfg.tolerance)) && !infeasible.iter().any(|&x| x)
    {
        if let Some((l, r)) = last_feasible {
            lambda = l;
            g = r;
        }
    }
    TrackReport {
        oscillation: band(&history, n),
        lambda,
        residuals: g,
        converged,
        stalled,
        infeasible,
        iterations,
    }
}

fn track_streaming<P: DualProblem + ?Sized>(problem: &P, cfg: &TrackerConfig) -> TrackReport {
    let n = problem.num_constraints();
    let frames = problem.num_frames();
    let mut lambda = vec![cfg.lambda_init; n];
    let mut filtered = vec![0.0; n];
    let mut buf = vec![0.0; n];
    let mut sum = vec![0.0; n];
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let mut infeasible = vec![false; n];
    let mut iterations = 0;
    for k in 0..cfg.budget {
        problem.frame_residuals(k % frames, &lambda, &mut buf);
        for i in 0..n {
            filtered[i] = cfg.filter * filtered[i] + (1.0 - cfg.filter) * buf[i];
            lambda[i] = (lambda[i] + cfg.step * filtered[i]).clamp(0.0, cfg.ceiling);
        }
        iterations = k + 1;
        if k >= cfg.warmup {
            for i in 0..n {
                sum[i] += lambda[i];
                lo[i] = lo[i].min(lambda[i]);
                hi[i] = hi[i].max(lambda[i]);
            }
        }
        if (0..n).any(|i| lambda[i] >= cfg.ceiling && filtered[i] > 0.0) {
            for i in 0..n {
                infeasible[i] = lambda[i] >= cfg.ceiling && filtered[i] > 0.0;
            }
            break;
        }
    }
    let averaged = iterations.saturating_sub(cfg.warmup);
    let lambda: Vec<f64> = if averaged > 0 && !infeasible.iter().any(|&x| x) {
        sum.iter().map(|s| s / averaged as f64).collect()
    } else {
        lambda
    };
    let residuals = mean_residuals(problem, &lambda);
    let converged = !infeasible.iter().any(|&x| x)
        && (0..n).all(|i| satisfied(residuals[i], lambda[i], cfg.tolerance));
    TrackReport {
        oscillation: (0..n)
            .map(|i| if hi[i] >= lo[i] { hi[i] - lo[i] } else { 0.0 })
            .collect(),
        lambda,
        residuals,
        converged,
        stalled: false,
        infeasible,
        iterations,
    }
}

/// Spread of each component over the last tenth of the history.
fn band(history: &[Vec<f64>], n: usize) -> Vec<f64> {
    let tail = &history[history.len() - history.len().div_ceil(10)..];
    (0..n)
        .map(|i| {
            let (lo, hi) = tail
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| {
                    (lo.min(l[i]), hi.max(l[i]))
                });
            if hi >= lo {
                hi - lo
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Residual `e^{-λ_i} - c_i` on every frame.
    struct Exp(Vec<f64>);

    impl DualProblem for Exp {
        fn num_constraints(&self) -> usize {
            self.0.len()
        }
        fn num_frames(&self) -> usize {
            4
        }
        fn frame_residuals(&self, _frame: usize, lambda: &[f64], out: &mut [f64]) {
            for (i, c) in self.0.iter().enumerate() {
                out[i] = (-lambda[i]).exp() - c;
            }
        }
    }

    fn plain(step: f64, budget: usize) -> TrackerConfig {
        TrackerConfig {
            step,
            budget,
            adaptive: false,
            tolerance: 1e-9,
            ..TrackerConfig::default()
        }
    }

    #[test]
    fn batch_finds_closed_form_root() {
        let rep = track(&Exp(vec![0.5]), &plain(0.5, 10_000)).unwrap();
        assert!(rep.converged);
        assert!((rep.lambda[0] - 2f64.ln()).abs() < 1e-3);
        let rep = track(&Exp(vec![0.5]), &TrackerConfig::default()).unwrap();
        assert!((rep.lambda[0] - 2f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn fixed_point_is_kept() {
        let c = (-1f64).exp();
        let rep = track(&Exp(vec![c]), &plain(0.5, 100)).unwrap();
        assert_eq!(rep.lambda, vec![1.0]);
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn separable_components() {
        let rep = track(&Exp(vec![0.5, 0.2]), &plain(0.5, 10_000)).unwrap();
        assert!((rep.lambda[0] - 2f64.ln()).abs() < 1e-3);
        assert!((rep.lambda[1] - 5f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn residual_shrinks_monotonically() {
        struct Trace<'a>(&'a Exp, std::sync::Mutex<Vec<f64>>);
        impl DualProblem for Trace<'_> {
            fn num_constraints(&self) -> usize {
                1
            }
            fn num_frames(&self) -> usize {
                1
            }
            fn frame_residuals(&self, f: usize, l: &[f64], out: &mut [f64]) {
                self.0.frame_residuals(f, l, out);
                self.1.lock().unwrap().push(out[0].abs());
            }
        }
        let base = Exp(vec![0.2]);
        let t = Trace(&base, Default::default());
        track(&t, &plain(0.1, 5_000)).unwrap();
        let seen = t.1.into_inner().unwrap();
        assert!(seen.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn projection_and_infeasibility() {
        // Constraint slack even at λ = 0: λ is driven to zero and stays there.
        let rep = track(&Exp(vec![2.0]), &plain(0.5, 1_000)).unwrap();
        assert_eq!(rep.lambda, vec![0.0]);
        assert!(rep.converged);
        // Residual always positive: λ hits the ceiling.
        let rep = track(
            &Exp(vec![-0.1]),
            &TrackerConfig {
                ceiling: 1e3,
                ..TrackerConfig::default()
            },
        )
        .unwrap();
        assert!(rep.any_infeasible());
        assert!(!rep.converged);
    }

    /// Step residual: 0.3 below λ = 2, -0.1 at or above it; no exact root.
    struct Step;

    impl DualProblem for Step {
        fn num_constraints(&self) -> usize {
            1
        }
        fn num_frames(&self) -> usize {
            1
        }
        fn frame_residuals(&self, _frame: usize, lambda: &[f64], out: &mut [f64]) {
            out[0] = if lambda[0] < 2.0 { 0.3 } else { -0.1 };
        }
    }

    #[test]
    fn jump_settles_on_feasible_side() {
        let rep = track(
            &Step,
            &TrackerConfig {
                lambda_init: 0.0,
                ..TrackerConfig::default()
            },
        )
        .unwrap();
        assert!(rep.stalled);
        assert!(
            rep.lambda[0] >= 2.0 && rep.lambda[0] < 2.01,
            "{:?}",
            rep.lambda
        );
        assert_eq!(rep.residuals, vec![-0.1]);
        assert!(!rep.any_infeasible());
    }

    #[test]
    fn streaming_agrees_with_batch() {
        let cfg = TrackerConfig {
            mode: TrackerMode::Streaming,
            step: 0.05,
            budget: 50_000,
            ..TrackerConfig::default()
        };
        let rep = track(&Exp(vec![0.5]), &cfg).unwrap();
        assert!((rep.lambda[0] - 2f64.ln()).abs() < 0.05 * 2f64.ln());
    }
}
