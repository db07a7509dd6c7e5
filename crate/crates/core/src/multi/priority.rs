use rand::seq::index::sample;

use crate::channel::rng::{stream, Purpose};
use crate::error::{Error, Result};
use crate::qos::{effective_capacity, QoSSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct PriorityOrder {
    /// Effective capacity of each user served alone by every BS.
    pub c_max: Vec<f64>,
    /// `C̄_n / C_max^{(n)}`.
    pub fraction: Vec<f64>,
    /// Users by decreasing fraction, ties by index.
    pub order: Vec<usize>,
}

impl PriorityOrder {
    /// Users whose demand exceeds what full cooperation can deliver.
    pub fn infeasible_users(&self) -> Vec<usize> {
        (0..self.fraction.len())
            .filter(|&n| self.fraction[n] > 1.0)
            .collect()
    }
}

/// `per_frame_rates[k][n]`: rate of user `n` in frame `k` when served alone
/// by all BSs at full-mode power.
pub fn priority_order(per_frame_rates: &[Vec<f64>], qos: &[QoSSpec]) -> Result<PriorityOrder> {
    if per_frame_rates.is_empty() {
        return Err(Error::InvalidArgument(
            "priority order needs at least one frame".into(),
        ));
    }
    let c_max = qos
        .iter()
        .enumerate()
        .map(|(n, q)| {
            let samples: Vec<f64> = per_frame_rates.iter().map(|r| r[n]).collect();
            effective_capacity(&samples, q.theta)
        })
        .collect::<Result<Vec<f64>>>()?;
    let fraction: Vec<f64> = qos
        .iter()
        .zip(&c_max)
        .map(|(q, &c)| {
            if c > 0.0 {
                q.arrival / c
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..qos.len()).collect();
    order.sort_by(|&a, &b| fraction[b].total_cmp(&fraction[a]).then(a.cmp(&b)));
    Ok(PriorityOrder {
        c_max,
        fraction,
        order,
    })
}

/// Round-robin over `order`: each user in turn takes the free BS with the
/// largest aggregate gain `gains[user][bs]`, until `l` BSs are taken.
pub fn priority_select(gains: &[Vec<f64>], order: &[usize], l: usize) -> Vec<usize> {
    let k_bs = gains.first().map_or(0, Vec::len);
    let l = l.min(k_bs);
    let mut taken = vec![false; k_bs];
    let mut subset = Vec::with_capacity(l);
    for j in 0..l {
        let user = order[j % order.len()];
        let best = (0..k_bs)
            .filter(|&m| !taken[m])
            .max_by(|&a, &b| gains[user][a].total_cmp(&gains[user][b]).then(b.cmp(&a)))
            .expect("fewer than K_bs BSs taken");
        taken[best] = true;
        subset.push(best);
    }
    subset
}

/// Nested priority subsets for `L = 0..=K_bs`.
pub fn priority_chain(gains: &[Vec<f64>], order: &[usize]) -> Vec<Vec<usize>> {
    let full = priority_select(gains, order, gains.first().map_or(0, Vec::len));
    (0..=full.len()).map(|l| full[..l].to_vec()).collect()
}

/// `l` BSs drawn uniformly without replacement, sorted; a pure function of
/// `(seed, frame, l)`.
pub fn semi_random_select(k_bs: usize, l: usize, seed: u64, frame: u64) -> Vec<usize> {
    let l = l.min(k_bs);
    let mut rng = stream(seed, Purpose::SubsetDraw, frame, l as u64);
    let mut subset = sample(&mut rng, k_bs, l).into_vec();
    subset.sort_unstable();
    subset
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn hand_traced_selection() {
        // users 0 and 1; user 1 has priority.
        let gains = vec![vec![3.0, 1.0, 0.2], vec![0.5, 2.0, 1.0]];
        assert_eq!(priority_select(&gains, &[1, 0], 2), vec![1, 0]);
        let mut all = priority_select(&gains, &[1, 0], 3);
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2]);
        assert_eq!(priority_select(&gains, &[0, 1], 0), Vec::<usize>::new());
    }

    #[test]
    fn single_user_is_ordered_gain() {
        let gains = vec![vec![0.3, 5.0, 1.0, 2.0]];
        assert_eq!(priority_select(&gains, &[0], 3), vec![1, 3, 2]);
        let chain = priority_chain(&gains, &[0]);
        assert_eq!(chain.len(), 5);
        assert_eq!(chain[2], vec![1, 3]);
    }

    #[test]
    fn wraps_around_the_order() {
        let gains = vec![vec![1.0, 2.0, 3.0, 4.0], vec![4.0, 3.0, 2.0, 1.0]];
        assert_eq!(priority_select(&gains, &[0, 1], 4), vec![3, 0, 2, 1]);
    }

    #[test]
    fn order_from_fractions() {
        let q = QoSSpec::new(10.0, 5.0, 0.01).unwrap();
        let rates = vec![vec![40.0, 40.0]; 3];
        let p = priority_order(&rates, &[q, q]).unwrap();
        assert_eq!(p.order, vec![0, 1]);
        assert!((p.c_max[0] - 40.0).abs() < 1e-9);
        let q2 = QoSSpec::new(20.0, 5.0, 0.01).unwrap();
        let p = priority_order(&rates, &[q, q2]).unwrap();
        assert_eq!(p.order, vec![1, 0]);
        assert!(p.infeasible_users().is_empty());
        let q3 = QoSSpec::new(60.0, 5.0, 0.01).unwrap();
        assert_eq!(
            priority_order(&rates, &[q, q3]).unwrap().infeasible_users(),
            vec![1]
        );
    }

    #[test]
    fn semi_random_is_deterministic_and_uniform() {
        assert_eq!(semi_random_select(5, 5, 1, 2), vec![0, 1, 2, 3, 4]);
        assert_eq!(
            semi_random_select(6, 3, 9, 4),
            semi_random_select(6, 3, 9, 4)
        );
        let draws = 100_000;
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for f in 0..draws {
            *counts.entry(semi_random_select(4, 2, 7, f)).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = draws as f64 / 6.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 5 degrees of freedom, 0.1% critical value.
        assert!(chi2 < 20.52, "chi2 {chi2}");
    }
}
