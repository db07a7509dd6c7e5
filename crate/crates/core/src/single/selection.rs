use crate::channel::FadingState;
use crate::error::{Error, Result};
use crate::linalg::mimo_capacity;
use crate::metrics::PowerPolicy;

/// A BS subset and its single-user rate at `P_{|subset|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSelection {
    pub subset: Vec<usize>,
    pub rate: f64,
}

impl SubsetSelection {
    pub fn silent() -> Self {
        Self {
            subset: Vec::new(),
            rate: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.subset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subset.is_empty()
    }
}

/// Capacity of `user` over the concatenated subset at budget `power`.
pub fn subset_rate(
    state: &FadingState,
    user: usize,
    subset: &[usize],
    power: f64,
    bt: f64,
) -> Result<f64> {
    if subset.is_empty() {
        return Ok(0.0);
    }
    mimo_capacity(&state.user_channel(user, subset), power, bt)
}

fn check_cardinality(state: &FadingState, l: usize) -> Result<()> {
    if l > state.num_bs() {
        return Err(Error::InvalidArgument(format!(
            "L = {l} exceeds K_bs = {}",
            state.num_bs()
        )));
    }
    Ok(())
}

/// Greedy selections for every `L = 0..=K_bs`. Each step adds the BS that
/// maximizes the rate of the enlarged subset at its own budget, so the
/// subsets are nested.
pub fn incremental_chain(
    state: &FadingState,
    user: usize,
    policy: &PowerPolicy,
    bt: f64,
) -> Result<Vec<SubsetSelection>> {
    incremental_chain_to(state, user, state.num_bs(), policy, bt)
}

fn incremental_chain_to(
    state: &FadingState,
    user: usize,
    l_max: usize,
    policy: &PowerPolicy,
    bt: f64,
) -> Result<Vec<SubsetSelection>> {
    let k = state.num_bs();
    let mut chain = vec![SubsetSelection::silent()];
    let mut chosen: Vec<usize> = Vec::with_capacity(l_max);
    let mut remaining: Vec<usize> = (0..k).collect();
    for step in 1..=l_max {
        let power = policy.power(step);
        let mut best: Option<(usize, f64)> = None;
        for (pos, &m) in remaining.iter().enumerate() {
            chosen.push(m);
            let r = subset_rate(state, user, &chosen, power, bt)?;
            chosen.pop();
            if best.is_none_or(|(_, br)| r > br) {
                best = Some((pos, r));
            }
        }
        let (pos, rate) = best.expect("remaining BSs while step <= K_bs");
        chosen.push(remaining.remove(pos));
        chain.push(SubsetSelection {
            subset: chosen.clone(),
            rate,
        });
    }
    Ok(chain)
}

/// Greedy subset of size `l`.
pub fn incremental_select(
    state: &FadingState,
    user: usize,
    l: usize,
    policy: &PowerPolicy,
    bt: f64,
) -> Result<SubsetSelection> {
    check_cardinality(state, l)?;
    Ok(incremental_chain_to(state, user, l, policy, bt)?
        .pop()
        .expect("chain has L + 1 entries"))
}

/// Indices of the `l` largest gains, ties broken toward the lower index.
pub fn ordered_gain_select(gains: &[f64], l: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..gains.len()).collect();
    idx.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]).then(a.cmp(&b)));
    idx.truncate(l);
    idx
}

/// Ordered-gain selections and rates for every `L = 0..=K_bs`.
pub fn ordered_gain_chain(
    state: &FadingState,
    user: usize,
    policy: &PowerPolicy,
    bt: f64,
) -> Result<Vec<SubsetSelection>> {
    let order = ordered_gain_select(&state.aggregate_gains(user), state.num_bs());
    (0..=order.len())
        .map(|l| {
            let subset = order[..l].to_vec();
            let rate = subset_rate(state, user, &subset, policy.power(l), bt)?;
            Ok(SubsetSelection { subset, rate })
        })
        .collect()
}

/// Largest number of subsets the exhaustive search will visit.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Best subset of size `l` over all `C(K_bs, l)` candidates; the first in
/// lexicographic order wins ties.
pub fn exhaustive_select(
    state: &FadingState,
    user: usize,
    l: usize,
    policy: &PowerPolicy,
    bt: f64,
) -> Result<SubsetSelection> {
    check_cardinality(state, l)?;
    let k = state.num_bs();
    let count = binomial(k, l);
    if count > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    if l == 0 {
        return Ok(SubsetSelection::silent());
    }
    let power = policy.power(l);
    let mut comb: Vec<usize> = (0..l).collect();
    let mut best = SubsetSelection {
        subset: comb.clone(),
        rate: subset_rate(state, user, &comb, power, bt)?,
    };
    while next_combination(&mut comb, k) {
        let r = subset_rate(state, user, &comb, power, bt)?;
        if r > best.rate {
            best = SubsetSelection {
                subset: comb.clone(),
                rate: r,
            };
        }
    }
    Ok(best)
}

/// Exhaustive optimum for every `L = 0..=K_bs`.
pub fn exhaustive_chain(
    state: &FadingState,
    user: usize,
    policy: &PowerPolicy,
    bt: f64,
) -> Result<Vec<SubsetSelection>> {
    (0..=state.num_bs())
        .map(|l| exhaustive_select(state, user, l, policy, bt))
        .collect()
}

/// Advance to the next `l`-combination of `0..n` in lexicographic order.
pub(crate) fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let l = comb.len();
    for i in (0..l).rev() {
        if comb[i] < n - l + i {
            comb[i] += 1;
            for j in i + 1..l {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{builtin_scenario, BuiltinScenario, ChannelModel, PathLossModel};

    fn model() -> ChannelModel {
        ChannelModel::new(
            builtin_scenario(BuiltinScenario::SingleUser, 2, 2),
            PathLossModel::reference(),
        )
        .unwrap()
    }

    #[test]
    fn ordered_gain_examples() {
        assert_eq!(ordered_gain_select(&[0.5, 2.0, 1.0], 2), vec![1, 2]);
        assert!(ordered_gain_select(&[0.5, 2.0, 1.0], 0).is_empty());
        assert_eq!(ordered_gain_select(&[1.0, 1.0, 0.0], 1), vec![0]);
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut comb = vec![0, 1];
        let mut seen = vec![comb.clone()];
        while next_combination(&mut comb, 4) {
            seen.push(comb.clone());
        }
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(40, 20), 137_846_528_820);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn selection_edge_cases() {
        let m = model();
        let s = m.draw(1, 0);
        let p = PowerPolicy::new(4.0, 2.4).unwrap();
        let full = incremental_select(&s, 0, 5, &p, 1000.0).unwrap();
        let mut sorted = full.subset.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        let one = incremental_select(&s, 0, 1, &p, 1000.0).unwrap();
        let best = (0..5)
            .map(|m| subset_rate(&s, 0, &[m], 4.0, 1000.0).unwrap())
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert_eq!(one.subset, vec![best.0]);
        assert!(incremental_select(&s, 0, 6, &p, 1000.0).is_err());
        let zero = exhaustive_select(&s, 0, 0, &p, 1000.0).unwrap();
        assert_eq!((zero.rate, zero.subset.len()), (0.0, 0));
    }

    #[test]
    fn exhaustive_dominates_heuristics() {
        let m = model();
        let p = PowerPolicy::new(4.0, 2.4).unwrap();
        for frame in 0..20 {
            let s = m.draw(5, frame);
            let inc = incremental_chain(&s, 0, &p, 1000.0).unwrap();
            let ord = ordered_gain_chain(&s, 0, &p, 1000.0).unwrap();
            for l in 0..=5 {
                let ex = exhaustive_select(&s, 0, l, &p, 1000.0).unwrap();
                assert!(ex.rate >= inc[l].rate - 1e-12);
                assert!(ex.rate >= ord[l].rate - 1e-12);
                assert_eq!(inc[l].subset.len(), l);
                if l > 0 {
                    assert_eq!(&inc[l].subset[..l - 1], &inc[l - 1].subset[..]);
                }
            }
        }
    }
}
