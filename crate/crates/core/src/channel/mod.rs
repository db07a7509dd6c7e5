//! Deployment geometry, path loss, and i.i.d. block-fading channel draws.

pub mod rng;
mod scenarios;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub use scenarios::{builtin_scenario, BuiltinScenario, BUILTIN_SCENARIOS};

/// Positions (metres) and antenna counts of BSs and users.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub bs_positions: Vec<[f64; 2]>,
    pub bs_antennas: Vec<usize>,
    pub user_positions: Vec<[f64; 2]>,
    pub user_antennas: Vec<usize>,
}

impl Deployment {
    pub fn new(
        bs_positions: Vec<[f64; 2]>,
        bs_antennas: Vec<usize>,
        user_positions: Vec<[f64; 2]>,
        user_antennas: Vec<usize>,
    ) -> Result<Self> {
        if bs_positions.is_empty() || user_positions.is_empty() {
            return Err(Error::InvalidArgument(
                "deployment needs at least one BS and one user".into(),
            ));
        }
        if bs_positions.len() != bs_antennas.len() || user_positions.len() != user_antennas.len() {
            return Err(Error::InvalidArgument(
                "antenna counts must match positions".into(),
            ));
        }
        if bs_antennas.iter().chain(&user_antennas).any(|&a| a == 0) {
            return Err(Error::InvalidArgument("antenna counts must be >= 1".into()));
        }
        if bs_positions
            .iter()
            .chain(&user_positions)
            .flatten()
            .any(|c| !c.is_finite())
        {
            return Err(Error::NonFinite("deployment coordinates".into()));
        }
        Ok(Self {
            bs_positions,
            bs_antennas,
            user_positions,
            user_antennas,
        })
    }

    pub fn num_bs(&self) -> usize {
        self.bs_positions.len()
    }

    pub fn num_users(&self) -> usize {
        self.user_positions.len()
    }

    pub fn distance(&self, user: usize, bs: usize) -> f64 {
        let [ux, uy] = self.user_positions[user];
        let [bx, by] = self.bs_positions[bs];
        (ux - bx).hypot(uy - by)
    }

    /// Total transmit antennas over a BS subset.
    pub fn antennas_in(&self, subset: &[usize]) -> usize {
        subset.iter().map(|&m| self.bs_antennas[m]).sum()
    }
}

/// Free-space (`G d^-2`) up to `d_ref`, then `G (d_ref/d)^η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    pub d_ref: f64,
    pub exponent: f64,
    pub gain: f64,
}

impl PathLossModel {
    pub fn new(d_ref: f64, exponent: f64, gain: f64) -> Result<Self> {
        if !(d_ref > 0.0 && d_ref.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "d_ref must be positive, got {d_ref}"
            )));
        }
        if !(2.0..=6.0).contains(&exponent) {
            return Err(Error::InvalidArgument(format!(
                "path-loss exponent must lie in [2, 6], got {exponent}"
            )));
        }
        if !(gain > 0.0 && gain.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "aggregate gain must be positive, got {gain}"
            )));
        }
        Ok(Self {
            d_ref,
            exponent,
            gain,
        })
    }

    /// Pick `G` so that the mean gain equals `gain_at` (linear) at `distance`.
    pub fn calibrated(d_ref: f64, exponent: f64, distance: f64, gain_at: f64) -> Result<Self> {
        if !(distance > 0.0) || !(gain_at > 0.0) {
            return Err(Error::InvalidArgument(
                "calibration point must be positive".into(),
            ));
        }
        let unit = Self::new(d_ref, exponent, 1.0)?.mean_gain(distance)?;
        Self::new(d_ref, exponent, gain_at / unit)
    }

    /// d_ref = 1 m, η = 3, 0 dB at 50 m.
    pub fn reference() -> Self {
        Self::calibrated(1.0, 3.0, 50.0, 1.0).expect("reference constants are valid")
    }

    pub fn mean_gain(&self, d: f64) -> Result<f64> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "distance must be positive, got {d}"
            )));
        }
        Ok(self.mean_gain_unchecked(d))
    }

    #[inline]
    pub(crate) fn mean_gain_unchecked(&self, d: f64) -> f64 {
        if d <= self.d_ref {
            self.gain / (d * d)
        } else {
            self.gain * (self.d_ref / d).powf(self.exponent)
        }
    }

    /// Distance at which the mean gain times `power` drops to `threshold`.
    pub fn range_for(&self, power: f64, threshold: f64) -> f64 {
        if power <= 0.0 {
            return 0.0;
        }
        let ratio = power * self.gain / threshold;
        let far = self.d_ref * ratio.powf(1.0 / self.exponent);
        if far > self.d_ref {
            far
        } else {
            ratio.sqrt()
        }
    }
}

/// One frame's channel: `blocks[n][m]` is the `N_n × M_m` matrix from BS m to user n.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingState {
    pub frame: u64,
    pub blocks: Vec<Vec<ComplexMatrix>>,
}

impl FadingState {
    pub fn num_users(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_bs(&self) -> usize {
        self.blocks.first().map_or(0, Vec::len)
    }

    pub fn block(&self, user: usize, bs: usize) -> &ComplexMatrix {
        &self.blocks[user][bs]
    }

    /// `[H_{n,i1} H_{n,i2} ...]` over the subset, in subset order.
    pub fn user_channel(&self, user: usize, subset: &[usize]) -> ComplexMatrix {
        let blocks = subset.iter().map(|&m| &self.blocks[user][m]);
        let h = ComplexMatrix::hstack(blocks).expect("blocks of one user share the row count");
        if subset.is_empty() {
            ComplexMatrix::zeros(self.blocks[user][0].rows(), 0)
        } else {
            h
        }
    }

    /// `γ_{n,m}` for every BS.
    pub fn aggregate_gains(&self, user: usize) -> Vec<f64> {
        self.blocks[user]
            .iter()
            .map(|b| aggregate_gain(b, b.cols()))
            .collect()
    }
}

/// Deployment plus path loss with the mean gains cached.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    pub deployment: Deployment,
    pub path_loss: PathLossModel,
    mean_gains: Vec<Vec<f64>>,
}

impl ChannelModel {
    pub fn new(deployment: Deployment, path_loss: PathLossModel) -> Result<Self> {
        let mean_gains = (0..deployment.num_users())
            .map(|n| {
                (0..deployment.num_bs())
                    .map(|m| path_loss.mean_gain(deployment.distance(n, m)))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            deployment,
            path_loss,
            mean_gains,
        })
    }

    pub fn mean_gain(&self, user: usize, bs: usize) -> f64 {
        self.mean_gains[user][bs]
    }

    pub fn draw(&self, seed: u64, frame: u64) -> FadingState {
        let dep = &self.deployment;
        let blocks = (0..dep.num_users())
            .map(|n| {
                (0..dep.num_bs())
                    .map(|m| {
                        let block_id = (n * dep.num_bs() + m) as u64;
                        let mut rng = rng::stream(seed, rng::Purpose::Fading, frame, block_id);
                        let sd = (self.mean_gains[n][m] / 2.0).sqrt();
                        let (rows, cols) = (dep.user_antennas[n], dep.bs_antennas[m]);
                        let data = (0..rows * cols)
                            .map(|_| {
                                let re: f64 = StandardNormal.sample(&mut rng);
                                let im: f64 = StandardNormal.sample(&mut rng);
                                Complex64::new(sd * re, sd * im)
                            })
                            .collect();
                        ComplexMatrix::from_col_major(rows, cols, data).expect("shape")
                    })
                    .collect()
            })
            .collect();
        FadingState { frame, blocks }
    }
}

/// Draw frame `frame` of the i.i.d. block-fading process: entries of
/// `H_{n,m}` are CN(0, h̄_{n,m}).
pub fn draw_fading_state(
    dep: &Deployment,
    model: &PathLossModel,
    seed: u64,
    frame: u64,
) -> Result<FadingState> {
    Ok(ChannelModel::new(dep.clone(), *model)?.draw(seed, frame))
}

/// `γ = (1/M_m) Σ_ij |H_ij|²`
pub fn aggregate_gain(h: &ComplexMatrix, bs_antennas: usize) -> f64 {
    h.frobenius_norm_sq() / bs_antennas as f64
}
