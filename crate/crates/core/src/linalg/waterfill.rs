use super::{svd, ComplexMatrix};
use crate::error::{Error, Result};

/// Singular values at or below this fraction of the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WaterFillResult {
    /// Water level μ. Zero when there are no subchannels.
    pub water_level: f64,
    /// Per-subchannel power, aligned with the input gains.
    pub powers: Vec<f64>,
    /// Number of subchannels with (weakly) positive power; 0 for an empty gain list.
    pub active: usize,
    /// `BT Σ_active log(μ ε_z)`, nats/frame.
    pub rate: f64,
}

/// Water-filling over parallel Gaussian subchannels with SNR gains `gains`
/// (descending, positive) and total power `budget`.
///
/// The active count `i` is the one for which `μ ∈ [1/ε_i, 1/ε_{i+1})`, so
/// `budget = iμ − Σ_{j≤i} 1/ε_j`.
pub fn water_fill(gains: &[f64], budget: f64, bt: f64) -> Result<WaterFillResult> {
    if !budget.is_finite() || budget < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "power budget must be finite and >= 0, got {budget}"
        )));
    }
    if gains.iter().any(|g| !g.is_finite() || *g <= 0.0) {
        return Err(Error::InvalidArgument(
            "subchannel gains must be finite and positive".into(),
        ));
    }
    if gains.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "subchannel gains must be sorted descending".into(),
        ));
    }
    if gains.is_empty() {
        return Ok(WaterFillResult {
            water_level: 0.0,
            powers: Vec::new(),
            active: 0,
            rate: 0.0,
        });
    }

    let mut active = 1;
    let mut inv_sum = 1.0 / gains[0];
    loop {
        let mu = (budget + inv_sum) / active as f64;
        if active < gains.len() && mu > 1.0 / gains[active] {
            inv_sum += 1.0 / gains[active];
            active += 1;
        } else {
            break;
        }
    }
    let mu = (budget + inv_sum) / active as f64;
    let powers = gains
        .iter()
        .enumerate()
        .map(|(z, g)| {
            if z < active {
                (mu - 1.0 / g).max(0.0)
            } else {
                0.0
            }
        })
        .collect();
    let rate = bt
        * gains[..active]
            .iter()
            .map(|g| (mu * g).ln().max(0.0))
            .sum::<f64>();
    Ok(WaterFillResult {
        water_level: mu,
        powers,
        active,
        rate,
    })
}

/// Nonzero squared singular values of `h`, descending: the SNR gains of its
/// eigenmodes at unit noise power.
pub fn eigenmode_gains(h: &ComplexMatrix) -> Result<Vec<f64>> {
    if h.is_empty() {
        return Ok(Vec::new());
    }
    let sv = svd::singular_values(h)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return Ok(Vec::new());
    }
    Ok(sv
        .into_iter()
        .filter(|&s| s > RANK_TOL * smax)
        .map(|s| s * s)
        .collect())
}

/// `max_{Tr Ξ = P} BT log det(I + H Ξ H†)` in nats/frame.
pub fn mimo_capacity(h: &ComplexMatrix, power: f64, bt: f64) -> Result<f64> {
    if !power.is_finite() || power < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "power must be finite and >= 0, got {power}"
        )));
    }
    if h.is_empty() || power == 0.0 {
        if !h.is_finite() {
            return Err(Error::NonFinite("channel matrix".into()));
        }
        return Ok(0.0);
    }
    Ok(water_fill(&eigenmode_gains(h)?, power, bt)?.rate)
}

/// `dR/dP = BT/μ` at budget `power`. Zero for a channel with no eigenmodes.
pub fn rate_derivative(h: &ComplexMatrix, power: f64, bt: f64) -> Result<f64> {
    if !power.is_finite() || power <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "rate derivative needs power > 0, got {power}"
        )));
    }
    let gains = eigenmode_gains(h)?;
    if gains.is_empty() {
        return Ok(0.0);
    }
    Ok(bt / water_fill(&gains, power, bt)?.water_level)
}
