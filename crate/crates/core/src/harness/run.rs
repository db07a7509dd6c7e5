use rayon::prelude::*;

use crate::channel::ChannelModel;
use crate::dual::{track, TrackReport};
use crate::error::{Error, Result};
use crate::metrics::{interfering_area, AreaGrid};
use crate::multi::{
    full_cooperation_rates, priority_order, Access, MultiUserPolicy, PriorityOrder, Selection,
};
use crate::qos::{constraint_residual, effective_capacity, QoSSpec};
use crate::scheme::{prepare_frames, FramePolicy, PolicyProblem};
use crate::single::{fixed_cardinality, SingleScheme, SingleUserPolicy};

use super::config::{ScenarioConfig, Scheme, SweepAxis};

#[derive(Debug, Clone)]
pub enum AnyPolicy {
    Single(SingleUserPolicy),
    Multi(MultiUserPolicy),
}

/// A scheme ready to run: its policy and multipliers.
#[derive(Debug, Clone)]
pub struct Solution {
    pub policy: AnyPolicy,
    pub lambda: Vec<f64>,
    pub tracker: Option<TrackReport>,
    /// Per-user effective capacity with every BS at full-mode power.
    pub c_max: Vec<f64>,
    pub priority: Option<PriorityOrder>,
    pub fixed_l: Option<usize>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Infeasibility {
    pub users: Vec<usize>,
    pub c_max: Vec<f64>,
    pub required: Vec<f64>,
    pub reason: String,
}

impl Infeasibility {
    pub fn to_error(&self) -> Error {
        let n = self.users.first().copied().unwrap_or(0);
        Error::Infeasible {
            user: n,
            c_max: self.c_max[n],
            required: self.required[n],
        }
    }
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Solved(Box<Solution>),
    Infeasible(Infeasibility),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub frame: u64,
    pub usage: f64,
    /// nats/frame per user.
    pub rates: Vec<f64>,
    /// m², on sampled frames only.
    pub area: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub scheme: Scheme,
    pub seed: u64,
    pub frames: usize,
    pub avg_bs_usage: Option<f64>,
    pub avg_interfering_area: Option<f64>,
    /// Held-out `mean(e^{-θR}) - e^{-θC̄}` per user.
    pub residuals: Vec<f64>,
    /// Held-out effective capacity per user, nats/frame.
    pub effective_capacity: Vec<f64>,
    pub converged: bool,
    pub infeasibility: Option<Infeasibility>,
    pub lambda: Vec<f64>,
    pub fixed_l: Option<usize>,
    pub tracker: Option<TrackReport>,
    pub records: Vec<FrameRecord>,
}

impl RunResult {
    pub fn is_feasible(&self) -> bool {
        self.infeasibility.is_none()
    }
}

/// A configured experiment: channel model, QoS targets, and frame split.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub cfg: ScenarioConfig,
    pub model: ChannelModel,
    pub qos: Vec<QoSSpec>,
    pub grid: AreaGrid,
}

impl Experiment {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            model: cfg.channel_model()?,
            qos: cfg.qos()?,
            grid: cfg.area_grid()?,
            cfg: cfg.clone(),
        })
    }

    pub fn train_frames(&self) -> usize {
        self.cfg.frames / 2
    }

    pub fn eval_frames(&self) -> usize {
        self.cfg.frames - self.train_frames()
    }

    fn bt(&self) -> f64 {
        self.cfg.bt()
    }

    fn single_policy(&self, scheme: SingleScheme) -> Result<SingleUserPolicy> {
        SingleUserPolicy::new(
            scheme,
            self.qos[0],
            self.cfg.power,
            self.bt(),
            self.model.deployment.clone(),
        )
    }

    /// `C_max` per user from the training frames.
    pub fn max_effective_capacity(&self) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let rates = (0..self.train_frames() as u64)
            .into_par_iter()
            .map(|f| {
                full_cooperation_rates(
                    &self.model.draw(self.cfg.seed, f),
                    &self.cfg.power,
                    self.bt(),
                )
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        let c_max = self
            .qos
            .iter()
            .enumerate()
            .map(|(n, q)| {
                effective_capacity(&rates.iter().map(|r| r[n]).collect::<Vec<_>>(), q.theta)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok((c_max, rates))
    }

    fn infeasible(&self, users: Vec<usize>, c_max: &[f64], reason: &str) -> Outcome {
        Outcome::Infeasible(Infeasibility {
            users,
            c_max: c_max.to_vec(),
            required: self.qos.iter().map(|q| q.arrival).collect(),
            reason: reason.to_string(),
        })
    }

    fn track_policy<P: FramePolicy>(&self, policy: &P) -> Result<TrackReport> {
        let frames = prepare_frames(policy, &self.model, self.cfg.seed, 0, self.train_frames())?;
        track(
            &PolicyProblem {
                policy,
                frames: &frames,
                qos: &self.qos,
            },
            &self.cfg.tracker,
        )
    }

    /// Feasibility check, then multiplier tracking (or the fixed cardinality)
    /// on the training frames.
    pub fn solve(&self) -> Result<Outcome> {
        let (c_max, full_rates) = self.max_effective_capacity()?;
        let short: Vec<usize> = (0..self.qos.len())
            .filter(|&n| self.qos[n].arrival > c_max[n])
            .collect();
        if !short.is_empty() {
            return Ok(self.infeasible(
                short,
                &c_max,
                "load exceeds the full-cooperation effective capacity",
            ));
        }
        let mut priority = None;
        let (policy, report) = match self.cfg.scheme {
            Scheme::FixedL => {
                let mut policy = self.single_policy(SingleScheme::FixedL)?;
                let frames =
                    prepare_frames(&policy, &self.model, self.cfg.seed, 0, self.train_frames())?;
                let rates: Vec<Vec<f64>> = frames.iter().map(|f| f.rates()).collect();
                let Some(l) = fixed_cardinality(&rates, &self.qos[0]) else {
                    return Ok(self.infeasible(
                        vec![0],
                        &c_max,
                        "no fixed cardinality meets the constraint",
                    ));
                };
                policy.fixed_l = Some(l);
                return Ok(Outcome::Solved(Box::new(Solution {
                    policy: AnyPolicy::Single(policy),
                    lambda: vec![0.0],
                    tracker: None,
                    c_max,
                    priority: None,
                    fixed_l: Some(l),
                    converged: true,
                })));
            }
            Scheme::IbsTs | Scheme::OgbsPt | Scheme::OptimalTs => {
                let kind = match self.cfg.scheme {
                    Scheme::IbsTs => SingleScheme::IbsTs,
                    Scheme::OgbsPt => SingleScheme::OgbsPt,
                    _ => SingleScheme::OptimalTs,
                };
                let policy = self.single_policy(kind)?;
                let report = self.track_policy(&policy)?;
                (AnyPolicy::Single(policy), report)
            }
            Scheme::PbsBdPt
            | Scheme::PbsTdmaPt
            | Scheme::SemirandomBdPt
            | Scheme::SemirandomTdmaPt => {
                let access = match self.cfg.scheme {
                    Scheme::PbsBdPt | Scheme::SemirandomBdPt => Access::Bd,
                    _ => Access::Tdma,
                };
                let selection = match self.cfg.scheme {
                    Scheme::PbsBdPt | Scheme::PbsTdmaPt => {
                        let order = priority_order(&full_rates, &self.qos)?;
                        let sel = Selection::Priority(order.order.clone());
                        priority = Some(order);
                        sel
                    }
                    _ => Selection::SemiRandom {
                        seed: self.cfg.seed,
                    },
                };
                let policy = MultiUserPolicy::new(
                    access,
                    selection,
                    self.qos.clone(),
                    self.cfg.power,
                    self.bt(),
                    self.model.deployment.clone(),
                )?;
                let report = self.track_policy(&policy)?;
                (AnyPolicy::Multi(policy), report)
            }
        };
        if report.any_infeasible() {
            let users = (0..report.infeasible.len())
                .filter(|&n| report.infeasible[n])
                .collect();
            return Ok(self.infeasible(
                users,
                &c_max,
                "multiplier reached the ceiling with the constraint still violated",
            ));
        }
        Ok(Outcome::Solved(Box::new(Solution {
            policy,
            lambda: report.lambda.clone(),
            converged: report.converged,
            tracker: Some(report),
            c_max,
            priority,
            fixed_l: None,
        })))
    }

    fn records_with<P: FramePolicy>(
        &self,
        policy: &P,
        lambda: &[f64],
        first: u64,
        count: usize,
        area: bool,
    ) -> Result<Vec<FrameRecord>> {
        let stride = self.cfg.area.stride;
        let dep = &self.model.deployment;
        (0..count)
            .into_par_iter()
            .map(|k| {
                let f = first + k as u64;
                let state = self.model.draw(self.cfg.seed, f);
                let frame = policy.prepare(&state)?;
                let decision = policy.decide(&frame, lambda);
                let area = if area && k % stride == 0 {
                    let powers = policy.radiated_power(&state, &frame, &decision)?;
                    Some(interfering_area(
                        &dep.bs_positions,
                        &powers,
                        &self.model.path_loss,
                        &self.grid,
                    ))
                } else {
                    None
                };
                Ok(FrameRecord {
                    frame: f,
                    usage: decision.usage,
                    rates: decision.rates,
                    area,
                })
            })
            .collect()
    }

    /// Per-frame decisions of a solved scheme on frames `first..first + count`.
    pub fn records(
        &self,
        solution: &Solution,
        first: u64,
        count: usize,
        area: bool,
    ) -> Result<Vec<FrameRecord>> {
        match &solution.policy {
            AnyPolicy::Single(p) => self.records_with(p, &solution.lambda, first, count, area),
            AnyPolicy::Multi(p) => self.records_with(p, &solution.lambda, first, count, area),
        }
    }

    /// Service delivered to each user, `[user][frame]`, nats/frame.
    pub fn service_trace(
        &self,
        solution: &Solution,
        first: u64,
        count: usize,
    ) -> Result<Vec<Vec<f64>>> {
        let records = self.records(solution, first, count, false)?;
        Ok((0..self.qos.len())
            .map(|n| records.iter().map(|r| r.rates[n]).collect())
            .collect())
    }

    pub fn run(&self) -> Result<RunResult> {
        let mut result = RunResult {
            scheme: self.cfg.scheme,
            seed: self.cfg.seed,
            frames: self.cfg.frames,
            avg_bs_usage: None,
            avg_interfering_area: None,
            residuals: Vec::new(),
            effective_capacity: Vec::new(),
            converged: false,
            infeasibility: None,
            lambda: Vec::new(),
            fixed_l: None,
            tracker: None,
            records: Vec::new(),
        };
        let solution = match self.solve()? {
            Outcome::Infeasible(inf) => {
                result.infeasibility = Some(inf);
                return Ok(result);
            }
            Outcome::Solved(s) => s,
        };
        let records = self.records(
            &solution,
            self.train_frames() as u64,
            self.eval_frames(),
            true,
        )?;
        let n = records.len() as f64;
        result.avg_bs_usage = Some(records.iter().map(|r| r.usage).sum::<f64>() / n);
        let areas: Vec<f64> = records.iter().filter_map(|r| r.area).collect();
        result.avg_interfering_area = Some(areas.iter().sum::<f64>() / areas.len() as f64);
        for (k, q) in self.qos.iter().enumerate() {
            let service: Vec<f64> = records.iter().map(|r| r.rates[k]).collect();
            result
                .residuals
                .push(constraint_residual(&service, q.theta, q.arrival)?);
            result
                .effective_capacity
                .push(effective_capacity(&service, q.theta)?);
        }
        result.converged = solution.converged;
        result.lambda = solution.lambda.clone();
        result.fixed_l = solution.fixed_l;
        result.tracker = solution.tracker.clone();
        result.records = records;
        Ok(result)
    }
}

pub fn run_experiment(cfg: &ScenarioConfig) -> Result<RunResult> {
    Experiment::new(cfg)?.run()
}

/// One run per value along `axis`, sharing the seed.
pub fn sweep(cfg: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<RunResult>> {
    values
        .iter()
        .map(|&v| run_experiment(&cfg.with_axis(axis, v)?))
        .collect()
}

fn run_as(cfg: &ScenarioConfig, scheme: Scheme) -> Result<RunResult> {
    let mut cfg = cfg.clone();
    cfg.scheme = scheme;
    run_experiment(&cfg)
}

pub fn ibs_ts_solve(cfg: &ScenarioConfig) -> Result<RunResult> {
    run_as(cfg, Scheme::IbsTs)
}

pub fn ogbs_pt_solve(cfg: &ScenarioConfig) -> Result<RunResult> {
    run_as(cfg, Scheme::OgbsPt)
}

pub fn fixed_cardinality_solve(cfg: &ScenarioConfig) -> Result<RunResult> {
    run_as(cfg, Scheme::FixedL)
}

pub fn pbs_bd_pt_solve(cfg: &ScenarioConfig) -> Result<RunResult> {
    run_as(cfg, Scheme::PbsBdPt)
}

pub fn pbs_tdma_pt_solve(cfg: &ScenarioConfig) -> Result<RunResult> {
    run_as(cfg, Scheme::PbsTdmaPt)
}
