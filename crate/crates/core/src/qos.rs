//! Statistical delay QoS: exponents, effective capacity, and a fluid queue
//! simulator for checking the delay-tail approximation.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Bits/s to nats per frame of length `frame_s` seconds.
pub fn load_to_nats_per_frame(bits_per_s: f64, frame_s: f64) -> f64 {
    bits_per_s * LN_2 * frame_s
}

/// Per-user delay requirement in frame units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QoSSpec {
    /// Constant arrival rate C̄, nats/frame.
    pub arrival: f64,
    /// Delay bound, frames.
    pub delay_bound: f64,
    /// Bound on the delay-violation probability.
    pub xi: f64,
    pub theta: f64,
}

impl QoSSpec {
    pub fn new(arrival: f64, delay_bound: f64, xi: f64) -> Result<Self> {
        if !(arrival > 0.0 && arrival.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "arrival rate must be positive, got {arrival}"
            )));
        }
        if !(delay_bound >= 1.0 && delay_bound.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "delay bound must be at least one frame, got {delay_bound}"
            )));
        }
        let theta = qos_exponent(arrival, delay_bound, xi)?;
        Ok(Self {
            arrival,
            delay_bound,
            xi,
            theta,
        })
    }

    /// From a load in bit/s and a delay bound in seconds.
    pub fn from_physical(load_bps: f64, delay_s: f64, xi: f64, frame_s: f64) -> Result<Self> {
        Self::new(
            load_to_nats_per_frame(load_bps, frame_s),
            delay_s / frame_s,
            xi,
        )
    }

    /// `e^{-θ C̄}`, the right-hand side of the effective-capacity constraint.
    pub fn target(&self) -> f64 {
        (-self.theta * self.arrival).exp()
    }
}

/// `θ = -ln ξ / (C̄ D_th)`
pub fn qos_exponent(arrival: f64, delay_bound: f64, xi: f64) -> Result<f64> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "violation probability must lie in (0, 1), got {xi}"
        )));
    }
    let scale = arrival * delay_bound;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "arrival x delay bound must be positive, got {scale}"
        )));
    }
    Ok(-xi.ln() / scale)
}

/// `ln mean(e^{-θ r})`, shifted by the minimum sample to avoid underflow.
fn log_mean_exp_neg(samples: &[f64], theta: f64) -> f64 {
    let rmin = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = samples
        .iter()
        .map(|r| (-theta * (r - rmin)).exp())
        .sum::<f64>()
        / samples.len() as f64;
    -theta * rmin + mean.ln()
}

/// `-(1/θ) ln mean(e^{-θ R})` over the samples.
pub fn effective_capacity(samples: &[f64], theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "θ must be positive, got {theta}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "effective capacity needs at least one sample".into(),
        ));
    }
    if samples.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite("rate samples".into()));
    }
    Ok(-log_mean_exp_neg(samples, theta) / theta)
}

/// `mean(e^{-θ R}) - e^{-θ C̄}`; non-positive iff the constraint holds.
pub fn constraint_residual(samples: &[f64], theta: f64, arrival: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "θ must be positive, got {theta}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "residual needs at least one sample".into(),
        ));
    }
    let mean = samples.iter().map(|r| (-theta * r).exp()).sum::<f64>() / samples.len() as f64;
    Ok(mean - (-theta * arrival).exp())
}

/// Fluid FIFO queue fed at a constant rate and drained by a service trace.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueTrace {
    pub arrival: f64,
    pub service: Vec<f64>,
    /// Backlog at the end of each frame.
    pub backlog: Vec<f64>,
}

impl QueueTrace {
    /// Lindley recursion from an empty queue.
    pub fn run(arrival: f64, service: &[f64]) -> Self {
        let mut q = 0.0;
        let backlog = service
            .iter()
            .map(|r| {
                q = (q + arrival - r).max(0.0);
                q
            })
            .collect();
        Self {
            arrival,
            service: service.to_vec(),
            backlog,
        }
    }

    /// Virtual delay of the last bit queued in each frame: the fewest later
    /// frames whose service covers the backlog. `None` when the trace ends first.
    pub fn virtual_delays(&self) -> Vec<Option<usize>> {
        let n = self.service.len();
        let prefix = prefix_sums(&self.service);
        let mut out = Vec::with_capacity(n);
        let mut j = 0;
        for k in 0..n {
            // target = S[k] + Q[k] is non-decreasing in k, so j never moves back.
            let target = prefix[k + 1] + self.backlog[k];
            j = j.max(k + 1);
            while j <= n && prefix[j] < target {
                j += 1;
            }
            out.push((j <= n).then(|| j - (k + 1)));
        }
        out
    }
}

fn prefix_sums(xs: &[f64]) -> Vec<f64> {
    let mut s = Vec::with_capacity(xs.len() + 1);
    let mut acc = 0.0;
    s.push(0.0);
    for x in xs {
        acc += x;
        s.push(acc);
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueReport {
    /// Empirical `Pr{D > D_th}` over frames whose outcome is observable.
    pub violation_probability: f64,
    /// Decay rate of `Pr{Q > q}` (minus the log-linear slope); `None` when the
    /// tail is too short to fit.
    pub tail_decay: Option<f64>,
    pub mean_service: f64,
    /// Mean service is below the arrival rate.
    pub unstable: bool,
    pub frames_evaluated: usize,
}

/// Run the queue over `service` and measure delay violations against
/// `delay_bound` frames and the backlog tail decay.
pub fn simulate_queue(arrival: f64, service: &[f64], delay_bound: f64) -> Result<QueueReport> {
    if !(arrival > 0.0) || !(delay_bound >= 0.0) {
        return Err(Error::InvalidArgument(
            "arrival must be positive and the delay bound non-negative".into(),
        ));
    }
    if service.is_empty() {
        return Err(Error::InvalidArgument("empty service trace".into()));
    }
    if service.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::InvalidArgument(
            "service rates must be finite and non-negative".into(),
        ));
    }
    let trace = QueueTrace::run(arrival, service);
    let n = service.len();
    let d = delay_bound.floor() as usize;
    let prefix = prefix_sums(service);
    // D[k] > d  iff  the d frames after k cannot clear Q[k].
    let observable = n.saturating_sub(d);
    let violations = (0..observable)
        .filter(|&k| prefix[k + 1 + d] - prefix[k + 1] < trace.backlog[k])
        .count();
    let mean_service = prefix[n] / n as f64;
    Ok(QueueReport {
        violation_probability: if observable == 0 {
            0.0
        } else {
            violations as f64 / observable as f64
        },
        tail_decay: tail_decay(&trace.backlog),
        mean_service,
        unstable: mean_service < arrival,
        frames_evaluated: observable,
    })
}

/// Least-squares slope of `ln Pr{Q > q}` against `q` at the 0.90..0.999
/// quantiles of `Q`, negated.
fn tail_decay(backlog: &[f64]) -> Option<f64> {
    let mut sorted = backlog.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut points: Vec<(f64, f64)> = Vec::new();
    const STEPS: usize = 40;
    for i in 0..=STEPS {
        let p = 0.90 + (0.999 - 0.90) * i as f64 / STEPS as f64;
        let q = sorted[((p * n as f64) as usize).min(n - 1)];
        if points.last().is_some_and(|&(prev, _)| prev == q) {
            continue;
        }
        let above = n - sorted.partition_point(|&x| x <= q);
        if above == 0 {
            continue;
        }
        points.push((q, (above as f64 / n as f64).ln()));
    }
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    (sxx > 0.0).then(|| -sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exponent_examples() {
        assert!((qos_exponent(1.0, 1.0, (-1f64).exp()).unwrap() - 1.0).abs() < 1e-15);
        assert!((qos_exponent(9.2103, 1.0, 1e-4).unwrap() - 1.0).abs() < 1e-4);
        let q = QoSSpec::from_physical(600e3, 0.05, 1e-6, 0.01).unwrap();
        assert!((q.delay_bound - 5.0).abs() < 1e-12);
        assert!((q.theta - 6.645e-4).abs() < 1e-6, "{}", q.theta);
        assert!(qos_exponent(1.0, 1.0, 1.0).is_err());
        assert!(qos_exponent(1.0, 1.0, 0.0).is_err());
        assert!(qos_exponent(0.0, 1.0, 0.5).is_err());
        assert!(QoSSpec::new(1.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn effective_capacity_examples() {
        assert!((effective_capacity(&[3.5; 7], 2.0).unwrap() - 3.5).abs() < 1e-12);
        let two = [0.0, 2.0];
        let c = effective_capacity(&two, 1.0).unwrap();
        let closed = -((1.0 + (-2f64).exp()) / 2.0).ln();
        assert!((c - closed).abs() < 1e-14 && (c - 0.5662).abs() < 1e-4);
        let xs = [0.3, 1.7, 2.2, 0.9];
        let mean = xs.iter().sum::<f64>() / 4.0;
        assert!((effective_capacity(&xs, 1e-6).unwrap() - mean).abs() <= 1e-4 * mean);
        // Large θR must not underflow to -inf.
        let big = effective_capacity(&[5000.0, 6000.0], 1.0).unwrap();
        assert!((big - (5000.0 + 2f64.ln())).abs() < 1e-9);
        assert!(effective_capacity(&[], 1.0).is_err());
        assert!(effective_capacity(&[1.0], 0.0).is_err());
    }

    #[test]
    fn residual_examples() {
        assert_eq!(constraint_residual(&[1.3, 1.3], 0.7, 1.3).unwrap(), 0.0);
        let r = constraint_residual(&[0.0], 0.5, 2.0).unwrap();
        assert!((r - (1.0 - (-1f64).exp())).abs() < 1e-15);
        let c = effective_capacity(&[0.0, 2.0], 1.0).unwrap();
        assert!(constraint_residual(&[0.0, 2.0], 1.0, c).unwrap().abs() < 1e-12);
    }

    #[test]
    fn effective_capacity_monotone_in_theta() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..500).map(|_| rng.random_range(0.0..4.0)).collect();
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let c = effective_capacity(&xs, 0.02 * i as f64).unwrap();
            assert!(c <= prev + 1e-12);
            prev = c;
        }
    }

    #[test]
    fn deterministic_queues() {
        let rep = simulate_queue(2.0, &[3.0; 1000], 1.0).unwrap();
        assert_eq!(rep.violation_probability, 0.0);
        let t = QueueTrace::run(2.0, &[2.0; 50]);
        assert!(t.backlog.iter().all(|&q| q == 0.0));
        assert_eq!(
            simulate_queue(2.0, &[2.0; 50], 1.0)
                .unwrap()
                .violation_probability,
            0.0
        );
        let rep = simulate_queue(2.0, &[1.0; 100], 3.0).unwrap();
        assert!(rep.unstable);
    }

    #[test]
    fn virtual_delay_matches_direct_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let service: Vec<f64> = (0..400)
            .map(|_| if rng.random_bool(0.55) { 2.0 } else { 0.0 })
            .collect();
        let t = QueueTrace::run(1.0, &service);
        let delays = t.virtual_delays();
        for k in 0..service.len() {
            let mut acc = 0.0;
            let mut direct = None;
            if t.backlog[k] <= 0.0 {
                direct = Some(0);
            } else {
                for (d, r) in service[k + 1..].iter().enumerate() {
                    acc += r;
                    if acc >= t.backlog[k] {
                        direct = Some(d + 1);
                        break;
                    }
                }
            }
            assert_eq!(delays[k], direct, "frame {k}");
        }
        let rep = simulate_queue(1.0, &service, 3.0).unwrap();
        let observable = service.len() - 3;
        let count = delays[..observable]
            .iter()
            .filter(|d| d.is_none_or(|d| d > 3))
            .count();
        assert!((rep.violation_probability - count as f64 / observable as f64).abs() < 1e-15);
    }

    #[test]
    fn two_point_tail_matches_fixed_point() {
        // R in {0, 2} with P(2) = 0.6 and C̄ = 1: E e^{-θR} = e^{-θ} at θ = ln 1.5.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let service: Vec<f64> = (0..200_000)
            .map(|_| if rng.random_bool(0.6) { 2.0 } else { 0.0 })
            .collect();
        let theta_star = 1.5f64.ln();
        let c = effective_capacity(&[0.0, 0.0, 2.0, 2.0, 2.0], theta_star).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        let rep = simulate_queue(1.0, &service, 5.0).unwrap();
        let decay = rep.tail_decay.unwrap();
        assert!(
            (decay - theta_star).abs() <= 0.15 * theta_star,
            "decay {decay} vs {theta_star}"
        );
    }
}
