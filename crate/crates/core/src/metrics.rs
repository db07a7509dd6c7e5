//! Transmit-power policy, per-BS radiated power, and interfering area.

use serde::{Deserialize, Serialize};

use crate::channel::{Deployment, PathLossModel};
use crate::error::{Error, Result};

/// `P_L = P_ref + κ(L - 1)` for `L ≥ 1`, `P_0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPolicy {
    pub p_ref: f64,
    pub kappa: f64,
}

impl PowerPolicy {
    pub fn new(p_ref: f64, kappa: f64) -> Result<Self> {
        if !(p_ref > 0.0 && p_ref.is_finite()) || !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need P_ref > 0 and κ >= 0, got {p_ref}, {kappa}"
            )));
        }
        Ok(Self { p_ref, kappa })
    }

    pub fn power(&self, l: usize) -> f64 {
        transmit_power(self, l)
    }
}

pub fn transmit_power(policy: &PowerPolicy, l: usize) -> f64 {
    if l == 0 {
        0.0
    } else {
        policy.p_ref + policy.kappa * (l - 1) as f64
    }
}

/// Fold a per-antenna power profile over the concatenated subset back into
/// per-BS totals (length `K_bs`).
pub fn per_bs_radiated_power(
    dep: &Deployment,
    subset: &[usize],
    antenna_powers: &[f64],
) -> Vec<f64> {
    let mut out = vec![0.0; dep.num_bs()];
    let mut offset = 0;
    for &m in subset {
        let width = dep.bs_antennas[m];
        out[m] += antenna_powers[offset..offset + width].iter().sum::<f64>();
        offset += width;
    }
    debug_assert_eq!(offset, antenna_powers.len());
    out
}

/// Grid settings for the interfering-area integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaGrid {
    /// Received-power threshold σ_th² (linear).
    pub threshold: f64,
    /// Cell edge, metres.
    pub resolution: f64,
}

impl AreaGrid {
    pub fn new(threshold: f64, resolution: f64) -> Result<Self> {
        if !(threshold > 0.0) || !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidArgument(
                "threshold and grid resolution must be positive".into(),
            ));
        }
        Ok(Self {
            threshold,
            resolution,
        })
    }
}

/// Area (m²) where `Σ_m P_m h̄(d(p, BS_m)) > σ_th²`, counted on a square grid.
///
/// The box is sized so that the received power on its edge is below
/// `σ_th²/100`; rows are scanned only over the union of disks that can
/// exceed the threshold.
pub fn interfering_area(
    positions: &[[f64; 2]],
    powers: &[f64],
    model: &PathLossModel,
    grid: &AreaGrid,
) -> f64 {
    let sources: Vec<([f64; 2], f64)> = positions
        .iter()
        .zip(powers)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&x, &p)| (x, p))
        .collect();
    if sources.is_empty() {
        return 0.0;
    }
    let total: f64 = sources.iter().map(|s| s.1).sum();
    let reach = model.range_for(total, grid.threshold);
    let margin = model.range_for(total, grid.threshold / 100.0);
    let h = grid.resolution;
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for ([x, y], _) in &sources {
        x0 = x0.min(x - margin);
        x1 = x1.max(x + margin);
        y0 = y0.min(y - margin);
        y1 = y1.max(y + margin);
    }
    let nx = ((x1 - x0) / h).ceil() as i64;
    let ny = ((y1 - y0) / h).ceil() as i64;
    let cube = model.exponent == 3.0;
    let gain_at = |d2: f64| -> f64 {
        if d2 <= model.d_ref * model.d_ref {
            model.gain / d2
        } else if cube {
            model.gain * model.d_ref.powi(3) / (d2 * d2.sqrt())
        } else {
            model.gain * (model.d_ref * model.d_ref / d2).powf(model.exponent / 2.0)
        }
    };

    let mut spans: Vec<(i64, i64)> = Vec::with_capacity(sources.len());
    let mut count: u64 = 0;
    for j in 0..ny {
        let y = y0 + (j as f64 + 0.5) * h;
        spans.clear();
        for ([sx, sy], _) in &sources {
            let dy = y - sy;
            if dy.abs() > reach {
                continue;
            }
            let half = (reach * reach - dy * dy).sqrt();
            let a = (((sx - half - x0) / h - 0.5).floor() as i64).max(0);
            let b = (((sx + half - x0) / h - 0.5).ceil() as i64).min(nx - 1);
            if a <= b {
                spans.push((a, b));
            }
        }
        spans.sort_unstable();
        let mut next = 0;
        for &(a, b) in &spans {
            for i in a.max(next)..=b {
                let x = x0 + (i as f64 + 0.5) * h;
                let received: f64 = sources
                    .iter()
                    .map(|([sx, sy], p)| {
                        let d2 = ((x - sx) * (x - sx) + (y - sy) * (y - sy)).max(1e-12);
                        p * gain_at(d2)
                    })
                    .sum();
                if received > grid.threshold {
                    count += 1;
                }
            }
            next = next.max(b + 1);
        }
    }
    count as f64 * h * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn power_policy() {
        let p = PowerPolicy::new(4.0, 2.4).unwrap();
        assert_eq!(p.power(0), 0.0);
        assert_eq!(p.power(1), 4.0);
        assert!((p.power(2) - 6.4).abs() < 1e-15);
        let flat = PowerPolicy::new(3.0, 0.0).unwrap();
        assert!((1..6).all(|l| flat.power(l) == 3.0));
        assert!(PowerPolicy::new(0.0, 1.0).is_err());
    }

    #[test]
    fn single_disk() {
        let model = PathLossModel::reference();
        let grid = AreaGrid::new(1.0, 0.5).unwrap();
        let a = interfering_area(&[[3.0, -7.0]], &[4.0], &model, &grid);
        let r = (4.0f64 * 125_000.0).cbrt();
        assert!((r - 79.37).abs() < 0.01);
        let exact = PI * r * r;
        assert!((a - exact).abs() <= 0.01 * exact, "{a} vs {exact}");
    }

    #[test]
    fn disjoint_disks_and_silence() {
        let model = PathLossModel::reference();
        let grid = AreaGrid::new(1.0, 0.5).unwrap();
        // Far apart so that the tails do not add up.
        let a = interfering_area(&[[0.0, 0.0], [2000.0, 0.0]], &[4.0, 4.0], &model, &grid);
        let r = (4.0f64 * 125_000.0).cbrt();
        let exact = 2.0 * PI * r * r;
        assert!((a - exact).abs() <= 0.01 * exact);
        assert_eq!(interfering_area(&[[0.0, 0.0]], &[0.0], &model, &grid), 0.0);
        assert_eq!(interfering_area(&[], &[], &model, &grid), 0.0);
    }

    #[test]
    fn overlapping_disks_exceed_union() {
        let model = PathLossModel::reference();
        let grid = AreaGrid::new(1.0, 1.0).unwrap();
        let one = interfering_area(&[[0.0, 0.0]], &[4.0], &model, &grid);
        let two = interfering_area(&[[0.0, 0.0], [30.0, 0.0]], &[4.0, 4.0], &model, &grid);
        assert!(two > one && two < 2.0 * one);
    }

    #[test]
    fn fold_by_bs() {
        let dep = Deployment::new(
            vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]],
            vec![2, 1, 3],
            vec![[5.0, 5.0]],
            vec![1],
        )
        .unwrap();
        let p = per_bs_radiated_power(&dep, &[2, 0], &[1.0, 2.0, 3.0, 0.5, 0.25]);
        assert_eq!(p, vec![0.75, 0.0, 6.0]);
    }
}
