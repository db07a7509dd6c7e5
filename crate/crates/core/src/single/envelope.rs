use crate::error::{Error, Result};

/// Upper concave hull of `{(L, R_L)}`: vertices `m_0 = 0 < … < m_K = K_bs`
/// and segment slopes `ν_1 > … > ν_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEnvelope {
    pub vertices: Vec<usize>,
    pub values: Vec<f64>,
    /// `slopes[j-1]` is the slope of the segment ending at `vertices[j]`.
    pub slopes: Vec<f64>,
}

/// Monotone-chain upper hull; collinear interior points are dropped.
pub fn rate_envelope(rates: &[f64]) -> Result<RateEnvelope> {
    if rates.is_empty() {
        return Err(Error::InvalidArgument(
            "need the rate of at least mode 0".into(),
        ));
    }
    if rates[0] != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mode 0 must have zero rate, got {}",
            rates[0]
        )));
    }
    if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::InvalidArgument(
            "rates must be finite and non-negative".into(),
        ));
    }
    let mut hull: Vec<usize> = Vec::with_capacity(rates.len());
    for l in 0..rates.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b unless it lies strictly above the chord a→l.
            let cross =
                (b - a) as f64 * (rates[l] - rates[a]) - (l - a) as f64 * (rates[b] - rates[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    let values: Vec<f64> = hull.iter().map(|&m| rates[m]).collect();
    let slopes = hull
        .windows(2)
        .zip(values.windows(2))
        .map(|(m, r)| (r[1] - r[0]) / (m[1] - m[0]) as f64)
        .collect();
    Ok(RateEnvelope {
        vertices: hull,
        values,
        slopes,
    })
}

impl RateEnvelope {
    pub fn max_usage(&self) -> usize {
        *self.vertices.last().expect("hull has at least one vertex")
    }

    /// Index `j ≥ 1` of the segment `[m_{j-1}, m_j]` containing `usage`.
    fn segment(&self, usage: f64) -> usize {
        let j = self.vertices.partition_point(|&m| (m as f64) < usage);
        j.clamp(1, self.vertices.len() - 1)
    }

    /// `R̃(usage)` by linear interpolation.
    pub fn value(&self, usage: f64) -> f64 {
        if self.vertices.len() == 1 {
            return self.values[0];
        }
        let j = self.segment(usage);
        self.values[j - 1] + self.slopes[j - 1] * (usage - self.vertices[j - 1] as f64)
    }
}

/// Time-sharing vector (length `K_bs + 1`) realizing `usage` on the hull: at
/// most two adjacent vertices carry weight.
pub fn usage_to_alpha(env: &RateEnvelope, usage: f64) -> Result<Vec<f64>> {
    let k = env.max_usage();
    if !(0.0..=k as f64).contains(&usage) {
        return Err(Error::InvalidArgument(format!(
            "usage {usage} outside [0, {k}]"
        )));
    }
    let mut alpha = vec![0.0; k + 1];
    if let Some(pos) = env.vertices.iter().position(|&m| m as f64 == usage) {
        alpha[env.vertices[pos]] = 1.0;
        return Ok(alpha);
    }
    let j = env.segment(usage);
    let (lo, hi) = (env.vertices[j - 1], env.vertices[j]);
    let width = (hi - lo) as f64;
    alpha[lo] = (hi as f64 - usage) / width;
    alpha[hi] = (usage - lo as f64) / width;
    Ok(alpha)
}

/// Minimizer over `[0, K_bs]` of `𝓛 + λ e^{-θ R̃(𝓛)}`.
///
/// Walks the hull left to right: stop at vertex `m_{j-1}` if the right
/// derivative there is non-negative, otherwise stop inside segment `j` if the
/// derivative changes sign before `m_j`. Comparisons are done in log form.
pub fn theorem1_usage(env: &RateEnvelope, theta: f64, lambda: f64) -> f64 {
    if !(lambda > 0.0) || !(theta > 0.0) {
        return 0.0;
    }
    for (j, &nu) in env.slopes.iter().enumerate() {
        if nu <= 0.0 {
            return env.vertices[j] as f64;
        }
        let a = (theta * lambda * nu).ln();
        if a <= theta * env.values[j] {
            return env.vertices[j] as f64;
        }
        if a < theta * env.values[j + 1] {
            let r_star = a / theta;
            return env.vertices[j] as f64 + (r_star - env.values[j]) / nu;
        }
    }
    env.max_usage() as f64
}

/// Subdifferential of `𝓛 + λ(e^{-θR̃(𝓛)} - c)` at `usage`, as `(lo, hi)`.
/// Infinite ends come from the sentinel slopes at the domain boundary.
pub fn lagrangian_subdifferential(
    env: &RateEnvelope,
    theta: f64,
    lambda: f64,
    usage: f64,
) -> (f64, f64) {
    let decay = (-theta * env.value(usage)).exp();
    let grad = |nu: f64| 1.0 - theta * lambda * nu * decay;
    if let Some(j) = env.vertices.iter().position(|&m| m as f64 == usage) {
        let left = if j == 0 {
            f64::NEG_INFINITY
        } else {
            grad(env.slopes[j - 1])
        };
        let right = if j + 1 == env.vertices.len() {
            f64::INFINITY
        } else {
            grad(env.slopes[j])
        };
        (left, right)
    } else {
        let g = grad(env.slopes[env.segment(usage) - 1]);
        (g, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_drops_points_below_chord() {
        let env = rate_envelope(&[0.0, 1.0, 1.5, 2.2]).unwrap();
        assert_eq!(env.vertices, vec![0, 1, 3]);
        assert!((env.slopes[0] - 1.0).abs() < 1e-15 && (env.slopes[1] - 0.6).abs() < 1e-12);
        assert!((env.value(2.0) - 1.6).abs() < 1e-12);
    }

    #[test]
    fn hull_collinear_and_concave() {
        let env = rate_envelope(&[0.0, 0.7, 1.4, 2.1]).unwrap();
        assert_eq!(env.vertices, vec![0, 3]);
        assert!((env.slopes[0] - 0.7).abs() < 1e-12);
        let env = rate_envelope(&[0.0, 1.0, 1.8, 2.4, 2.7]).unwrap();
        assert_eq!(env.vertices, vec![0, 1, 2, 3, 4]);
        assert!(env.slopes.windows(2).all(|w| w[0] > w[1]));
        assert!(rate_envelope(&[0.5, 1.0]).is_err());
    }

    #[test]
    fn alpha_examples() {
        let env = rate_envelope(&[0.0, 1.0, 1.5, 2.2]).unwrap();
        assert_eq!(usage_to_alpha(&env, 1.0).unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(usage_to_alpha(&env, 0.0).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        let a = usage_to_alpha(&env, 2.0).unwrap();
        assert_eq!(a, vec![0.0, 0.5, 0.0, 0.5]);
        let rate: f64 = a.iter().zip([0.0, 1.0, 1.5, 2.2]).map(|(x, r)| x * r).sum();
        assert!((rate - env.value(2.0)).abs() < 1e-12);
        assert!(usage_to_alpha(&env, 3.5).is_err());
        assert!(usage_to_alpha(&env, -0.1).is_err());
    }

    #[test]
    fn usage_examples() {
        let env = rate_envelope(&[0.0, 1.0, 1.5, 2.2]).unwrap();
        assert_eq!(theorem1_usage(&env, 1.0, 3.0), 1.0);
        assert_eq!(theorem1_usage(&env, 1.0, 1e-9), 0.0);
        assert_eq!(theorem1_usage(&env, 1.0, 0.0), 0.0);
        assert_eq!(theorem1_usage(&env, 1.0, 1e9), 3.0);
        let (lo, hi) = lagrangian_subdifferential(&env, 1.0, 3.0, 1.0);
        assert!(lo <= 0.0 && 0.0 <= hi);
    }

    #[test]
    fn interior_solution_is_stationary() {
        let env = rate_envelope(&[0.0, 1.0, 1.5, 2.2]).unwrap();
        // Pick λ so that the root falls inside the second segment.
        let lambda = (1.3f64).exp() / 0.6;
        let u = theorem1_usage(&env, 1.0, lambda);
        assert!(u > 1.0 && u < 3.0);
        let (lo, hi) = lagrangian_subdifferential(&env, 1.0, lambda, u);
        assert!(lo.abs() < 1e-12 && hi.abs() < 1e-12);
    }
}
