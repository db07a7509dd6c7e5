//! Complex linear algebra and MIMO rate computations.

mod matrix;
pub mod svd;
mod waterfill;

pub use matrix::ComplexMatrix;
pub use svd::{right_null_space, singular_values, svd, SvdResult};
pub use waterfill::{
    eigenmode_gains, mimo_capacity, rate_derivative, water_fill, WaterFillResult, RANK_TOL,
};

use num_complex::Complex64;

/// Diagonal of the capacity-achieving transmit covariance `V diag(ρ) V†` of
/// `h` at budget `power`: the power radiated by each transmit antenna.
pub fn transmit_power_profile(h: &ComplexMatrix, power: f64) -> crate::Result<Vec<f64>> {
    let mut out = vec![0.0; h.cols()];
    if h.is_empty() || power == 0.0 {
        return Ok(out);
    }
    let dec = svd(h)?;
    let smax = dec.singular_values.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        // No usable eigenmode; spread evenly so the budget is still accounted for.
        let share = power / h.cols() as f64;
        out.iter_mut().for_each(|x| *x = share);
        return Ok(out);
    }
    let gains: Vec<f64> = dec
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_TOL * smax)
        .map(|s| s * s)
        .collect();
    let wf = water_fill(&gains, power, 1.0)?;
    accumulate_profile(&dec.v, &wf.powers, &mut out);
    Ok(out)
}

/// `out[k] += Σ_z ρ_z |v_{k,z}|²`
pub(crate) fn accumulate_profile(v: &ComplexMatrix, powers: &[f64], out: &mut [f64]) {
    for (z, &rho) in powers.iter().enumerate() {
        if rho == 0.0 {
            continue;
        }
        for (k, x) in v.col(z).iter().enumerate() {
            out[k] += rho * Complex64::norm_sqr(x);
        }
    }
}
