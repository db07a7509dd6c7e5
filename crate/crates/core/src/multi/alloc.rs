//! Inner per-frame solves: BD power split and TDMA time split.

use crate::linalg::water_fill;

/// One user's inputs to the BD power split.
#[derive(Debug, Clone, Copy)]
pub struct BdUser<'a> {
    /// Effective-channel gains, descending; empty for a skipped user.
    pub gains: &'a [f64],
    pub theta: f64,
    pub lambda: f64,
}

impl BdUser<'_> {
    fn eligible(&self) -> bool {
        self.lambda > 0.0 && !self.gains.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserPower {
    pub power: f64,
    /// Water level; `1/ε_1` when the user gets no power, 0 if it has no gains.
    pub water_level: f64,
    /// Number of active subchannels.
    pub active: usize,
    /// nats/frame.
    pub rate: f64,
    /// `dP/d(-ln ζ)`.
    slope: f64,
}

const NO_POWER: UserPower = UserPower {
    power: 0.0,
    water_level: 0.0,
    active: 0,
    rate: 0.0,
    slope: 0.0,
};

/// Allocation of one user at multiplier `ζ = e^{-s}`: the water level solves
/// `ζ = BT λ θ e^{-θR}/μ` under the water-filling rate, clamped at `1/ε_1`.
fn user_power_at(u: &BdUser, s: f64, bt: f64) -> UserPower {
    if !u.eligible() {
        return UserPower {
            water_level: u.gains.first().map_or(0.0, |g| 1.0 / g),
            ..NO_POWER
        };
    }
    let k = bt * u.theta;
    let c = (k * u.lambda).ln() + s;
    let first = -u.gains[0].ln();
    if c <= first {
        return UserPower {
            water_level: u.gains[0].recip(),
            ..NO_POWER
        };
    }
    let mut log_sum = 0.0;
    let mut inv_sum = 0.0;
    for (idx, &g) in u.gains.iter().enumerate() {
        let i = idx + 1;
        log_sum += g.ln();
        inv_sum += 1.0 / g;
        let x = (c - k * log_sum) / (1.0 + i as f64 * k);
        let last = i == u.gains.len();
        if last || x < -u.gains[i].ln() {
            let x = x.max(-g.ln());
            let mu = x.exp();
            return UserPower {
                power: (i as f64 * mu - inv_sum).max(0.0),
                water_level: mu,
                active: i,
                rate: bt * (log_sum + i as f64 * x).max(0.0),
                slope: i as f64 * mu / (1.0 + i as f64 * k),
            };
        }
    }
    unreachable!("loop returns on the last subchannel")
}

/// Per-user powers, water levels and rates at a given `ζ > 0`.
pub fn bd_power_alloc(users: &[BdUser], zeta: f64, bt: f64) -> Vec<UserPower> {
    let s = -zeta.ln();
    users.iter().map(|u| user_power_at(u, s, bt)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaSolution {
    pub zeta: f64,
    pub users: Vec<UserPower>,
}

/// `-ln ζ` at which user `u` alone would draw `power`.
fn solo_log_inverse(u: &BdUser, power: f64, bt: f64) -> f64 {
    let wf = water_fill(u.gains, power, bt).expect("gains are positive");
    wf.water_level.ln() + u.theta * wf.rate - (bt * u.theta * u.lambda).ln()
}

/// `ζ*` such that the user powers add up to `total`. `None` when no user has
/// both a positive multiplier and a usable subchannel.
///
/// Total power is increasing and convex in `-ln ζ`, so Newton steps taken
/// from above the root converge monotonically; bisection guards the bracket.
/// The root lies between the points where the hungriest user alone would
/// draw `total / K` and `total`.
pub fn solve_zeta(users: &[BdUser], total: f64, bt: f64) -> Option<ZetaSolution> {
    if !(total > 0.0) {
        return None;
    }
    let eligible: Vec<&BdUser> = users.iter().filter(|u| u.eligible()).collect();
    if eligible.is_empty() {
        return None;
    }
    let share = total / eligible.len() as f64;
    let mut lo = eligible
        .iter()
        .map(|u| solo_log_inverse(u, share, bt))
        .fold(f64::INFINITY, f64::min);
    let mut hi = eligible
        .iter()
        .map(|u| solo_log_inverse(u, total, bt))
        .fold(f64::INFINITY, f64::min);
    let eval = |s: f64| {
        users.iter().fold((-total, 0.0), |(sum, slope), u| {
            let a = user_power_at(u, s, bt);
            (sum + a.power, slope + a.slope)
        })
    };
    let mut s = hi;
    let mut cur = eval(s);
    for _ in 0..200 {
        if cur.0.abs() <= 1e-12 * total {
            break;
        }
        if cur.0 > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let newton = if cur.1 > 0.0 {
            s - cur.0 / cur.1
        } else {
            f64::NAN
        };
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == s {
            break;
        }
        s = next;
        cur = eval(s);
    }
    Some(ZetaSolution {
        zeta: (-s).exp(),
        users: users.iter().map(|u| user_power_at(u, s, bt)).collect(),
    })
}

/// `t_n = [ln(λ_n θ_n R_n / δ) / (θ_n R_n)]^+`; users with no rate or no
/// multiplier get nothing.
pub fn tdma_time_alloc(rates: &[f64], thetas: &[f64], lambdas: &[f64], delta: f64) -> Vec<f64> {
    rates
        .iter()
        .zip(thetas)
        .zip(lambdas)
        .map(|((&r, &th), &l)| {
            let w = th * r;
            if w > 0.0 && l > 0.0 {
                ((l * w / delta).ln() / w).max(0.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// `δ*` with `Σ t_n = 1`. Each share is linear in `ln δ` while positive, so
/// the root is found exactly by growing the active set in decreasing
/// `ln(λθR)`. `None` when every `λθR` is zero.
pub fn solve_delta(rates: &[f64], thetas: &[f64], lambdas: &[f64]) -> Option<f64> {
    let mut cand: Vec<(f64, f64)> = rates
        .iter()
        .zip(thetas)
        .zip(lambdas)
        .filter_map(|((&r, &th), &l)| {
            let w = th * r;
            (w > 0.0 && l > 0.0).then(|| ((l * w).ln(), w))
        })
        .collect();
    if cand.is_empty() {
        return None;
    }
    cand.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..cand.len() {
        let (b, w) = cand[k];
        num += b / w;
        den += 1.0 / w;
        let u = (num - 1.0) / den;
        if k + 1 == cand.len() || u >= cand[k + 1].0 {
            return Some(u.exp());
        }
    }
    unreachable!()
}

/// Mode minimizing `L + Σ_n λ_n e^{-θ_n R_n(L)}`; `per_mode_rates[L]` holds
/// the user rates in mode `L` (mode 0 is silence). Lowest `L` wins ties.
pub fn select_mode(per_mode_rates: &[Vec<f64>], thetas: &[f64], lambdas: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (l, rates) in per_mode_rates.iter().enumerate() {
        let obj = mode_objective(l, rates, thetas, lambdas);
        if obj < best.1 {
            best = (l, obj);
        }
    }
    best.0
}

pub fn mode_objective(l: usize, rates: &[f64], thetas: &[f64], lambdas: &[f64]) -> f64 {
    l as f64
        + rates
            .iter()
            .zip(thetas)
            .zip(lambdas)
            .map(|((r, th), lam)| lam * (-th * r).exp())
            .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_user_reproduces_water_filling() {
        let gains = [3.0, 1.2, 0.4];
        let users = [BdUser {
            gains: &gains,
            theta: 0.002,
            lambda: 5.0,
        }];
        for &p in &[0.1, 1.0, 7.5, 40.0] {
            let sol = solve_zeta(&users, p, 1000.0).unwrap();
            let wf = water_fill(&gains, p, 1000.0).unwrap();
            assert!((sol.users[0].power - p).abs() <= 1e-9 * p);
            assert!((sol.users[0].rate - wf.rate).abs() <= 1e-9 * wf.rate.max(1.0));
            assert_eq!(sol.users[0].active, wf.active);
        }
    }

    #[test]
    fn symmetric_users_split_evenly() {
        let gains = [2.0, 0.5];
        let u = BdUser {
            gains: &gains,
            theta: 0.001,
            lambda: 3.0,
        };
        let sol = solve_zeta(&[u, u], 6.0, 1000.0).unwrap();
        assert!((sol.users[0].power - 3.0).abs() < 1e-9 && (sol.users[1].power - 3.0).abs() < 1e-9);
    }

    #[test]
    fn kkt_residual_and_monotonicity() {
        let g1 = [4.0, 1.0];
        let g2 = [0.8];
        let users = [
            BdUser {
                gains: &g1,
                theta: 0.0015,
                lambda: 2.0,
            },
            BdUser {
                gains: &g2,
                theta: 0.0009,
                lambda: 7.0,
            },
        ];
        let bt = 1000.0;
        let mut prev = f64::INFINITY;
        for i in -40..40 {
            let zeta = 10f64.powf(i as f64 / 4.0);
            let alloc = bd_power_alloc(&users, zeta, bt);
            let total: f64 = alloc.iter().map(|a| a.power).sum();
            assert!(total <= prev + 1e-12);
            prev = total;
            for (u, a) in users.iter().zip(&alloc) {
                if a.power > 0.0 {
                    let implied =
                        bt * u.lambda * u.theta * (-u.theta * a.rate).exp() / a.water_level;
                    assert!(
                        (zeta - implied).abs() <= 1e-6 * zeta,
                        "ζ={zeta} implied={implied}"
                    );
                }
            }
        }
        assert!(bd_power_alloc(&users, 1e30, bt)
            .iter()
            .all(|a| a.power == 0.0));
        assert!(bd_power_alloc(&users, 1e-30, bt)
            .iter()
            .all(|a| a.power > 1e6));
    }

    #[test]
    fn split_matches_grid_search() {
        let bt = 1000.0;
        let g1 = [2.5, 0.7];
        let g2 = [1.1, 0.9];
        let (t1, t2, l1, l2) = (0.004, 0.006, 3.0, 1.5);
        let users = [
            BdUser {
                gains: &g1,
                theta: t1,
                lambda: l1,
            },
            BdUser {
                gains: &g2,
                theta: t2,
                lambda: l2,
            },
        ];
        let total = 0.8;
        let sol = solve_zeta(&users, total, bt).unwrap();
        let obj = |p1: f64| {
            let r1 = water_fill(&g1, p1, bt).unwrap().rate;
            let r2 = water_fill(&g2, total - p1, bt).unwrap().rate;
            l1 * (-t1 * r1).exp() + l2 * (-t2 * r2).exp()
        };
        let best = (0..=1000)
            .map(|i| total * i as f64 / 1000.0)
            .min_by(|a, b| obj(*a).total_cmp(&obj(*b)))
            .unwrap();
        assert!(
            (sol.users[0].power - best).abs() <= 1e-3 * total,
            "{} vs {best}",
            sol.users[0].power
        );
        assert!(obj(sol.users[0].power) <= obj(best) + 1e-12);
    }

    #[test]
    fn skipped_or_unweighted_users_get_nothing() {
        let g = [1.0];
        let users = [
            BdUser {
                gains: &[],
                theta: 1e-3,
                lambda: 1.0,
            },
            BdUser {
                gains: &g,
                theta: 1e-3,
                lambda: 0.0,
            },
        ];
        assert!(solve_zeta(&users, 1.0, 1000.0).is_none());
        let users = [
            BdUser {
                gains: &[],
                theta: 1e-3,
                lambda: 1.0,
            },
            BdUser {
                gains: &g,
                theta: 1e-3,
                lambda: 1.0,
            },
        ];
        let sol = solve_zeta(&users, 2.0, 1000.0).unwrap();
        assert_eq!(sol.users[0].power, 0.0);
        assert!((sol.users[1].power - 2.0).abs() < 1e-9);
    }

    #[test]
    fn tdma_examples() {
        let (r, th, l) = ([1.0, 2.0], [1.0, 1.0], [1.0, 1.0]);
        let d = solve_delta(&r, &th, &l).unwrap();
        assert!((d - 0.6467).abs() < 5e-4);
        let t = tdma_time_alloc(&r, &th, &l, d);
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((t[0] - 0.4356).abs() < 1e-4 && (t[1] - 0.5644).abs() < 1e-4);

        let d = solve_delta(&[3.0], &[0.5], &[2.0]).unwrap();
        assert!((d - 2.0 * 1.5 * (-1.5f64).exp()).abs() < 1e-12);
        assert!((tdma_time_alloc(&[3.0], &[0.5], &[2.0], d)[0] - 1.0).abs() < 1e-12);

        let d = solve_delta(&[2.0; 3], &[0.3; 3], &[1.5; 3]).unwrap();
        for t in tdma_time_alloc(&[2.0; 3], &[0.3; 3], &[1.5; 3], d) {
            assert!((t - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(solve_delta(&[0.0, 0.0], &[1.0, 1.0], &[1.0, 1.0]).is_none());
        let t = tdma_time_alloc(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 1.0], 0.1);
        assert_eq!(t[0], 0.0);
    }

    #[test]
    fn weak_user_can_be_left_out() {
        let r = [10.0, 0.01];
        let (th, l) = ([0.1, 0.1], [1.0, 1.0]);
        let d = solve_delta(&r, &th, &l).unwrap();
        let t = tdma_time_alloc(&r, &th, &l, d);
        assert_eq!(t[1], 0.0);
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mode_choice() {
        let per_mode = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![3.0, 3.0]];
        assert_eq!(select_mode(&per_mode, &[1.0, 1.0], &[0.0, 0.0]), 0);
        let flat = vec![vec![0.0, 0.0]; 3];
        assert_eq!(select_mode(&flat, &[1.0, 1.0], &[5.0, 5.0]), 0);
        assert_eq!(select_mode(&per_mode, &[1.0, 1.0], &[50.0, 50.0]), 2);
    }
}
