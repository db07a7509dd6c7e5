use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{
    accumulate_profile, right_null_space, singular_values, svd, water_fill, ComplexMatrix,
};

/// Relative tolerance for rank decisions in the BD construction.
pub const BD_RANK_TOL: f64 = 1e-10;

/// Zero-forcing block-diagonalization data for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct BdDecomposition {
    /// Orthonormal basis of the other users' joint null space; `None` when
    /// that null space is empty and the user is skipped.
    pub precoder: Option<ComplexMatrix>,
    /// `H_n Γ_n`.
    pub effective: Option<ComplexMatrix>,
    /// Squared nonzero singular values of the effective channel, descending.
    pub gains: Vec<f64>,
}

impl BdDecomposition {
    pub fn skipped(&self) -> bool {
        self.precoder.is_none()
    }

    pub fn rank(&self) -> usize {
        self.gains.len()
    }
}

fn stack_others(channels: &[ComplexMatrix], user: usize) -> ComplexMatrix {
    let cols = channels[user].cols();
    let others: Vec<&ComplexMatrix> = channels
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != user)
        .map(|(_, h)| h)
        .collect();
    if others.is_empty() {
        ComplexMatrix::zeros(0, cols)
    } else {
        ComplexMatrix::vstack(others).expect("users share the transmit dimension")
    }
}

fn nonzero_gains(sv: &[f64], scale: f64) -> Vec<f64> {
    sv.iter()
        .filter(|&&s| s > BD_RANK_TOL * scale)
        .map(|s| s * s)
        .collect()
}

/// Per-user BD precoders from an explicit null-space basis of the stacked
/// channels of all other users. `channels[n]` is `H^{(n)}` over the selected
/// subset.
pub fn bd_precoders(channels: &[ComplexMatrix]) -> Result<Vec<BdDecomposition>> {
    (0..channels.len())
        .map(|n| {
            let gamma = right_null_space(&stack_others(channels, n), BD_RANK_TOL)?;
            if gamma.cols() == 0 {
                return Ok(BdDecomposition {
                    precoder: None,
                    effective: None,
                    gains: Vec::new(),
                });
            }
            let effective = channels[n].matmul(&gamma)?;
            let gains = nonzero_gains(&singular_values(&effective)?, channels[n].frobenius_norm());
            Ok(BdDecomposition {
                precoder: Some(gamma),
                effective: Some(effective),
                gains,
            })
        })
        .collect()
}

/// Orthonormal basis of the span of the rows of `a` (as columns of length
/// `a.cols()`), by modified Gram-Schmidt.
fn row_space_basis(a: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    let scale = a.frobenius_norm();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let mut v: Vec<Complex64> = (0..a.cols()).map(|j| a[(i, j)].conj()).collect();
        for _ in 0..2 {
            for q in &basis {
                let dot: Complex64 = q.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                v.iter_mut().zip(q).for_each(|(y, x)| *y -= dot * x);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > BD_RANK_TOL * scale.max(f64::MIN_POSITIVE) {
            v.iter_mut().for_each(|z| *z /= norm);
            basis.push(v);
        }
    }
    basis
}

/// `H_n` with the other users' row space projected out. Its nonzero singular
/// values equal those of `H_n Γ_n`; `None` when the null space is empty.
pub fn projected_channel(channels: &[ComplexMatrix], user: usize) -> Option<ComplexMatrix> {
    let h = &channels[user];
    let basis = row_space_basis(&stack_others(channels, user));
    if basis.len() >= h.cols() {
        return None;
    }
    let mut p = h.clone();
    for q in &basis {
        for i in 0..h.rows() {
            let coef: Complex64 = (0..h.cols()).map(|j| h[(i, j)] * q[j]).sum();
            for j in 0..h.cols() {
                p[(i, j)] -= coef * q[j].conj();
            }
        }
    }
    Some(p)
}

/// BD subchannel gains for every user (empty for skipped users).
pub fn bd_gains(channels: &[ComplexMatrix]) -> Result<Vec<Vec<f64>>> {
    (0..channels.len())
        .map(|n| match projected_channel(channels, n) {
            None => Ok(Vec::new()),
            Some(p) => Ok(nonzero_gains(
                &singular_values(&p)?,
                channels[n].frobenius_norm(),
            )),
        })
        .collect()
}

/// Per-antenna power of user `n`'s BD transmit covariance when it gets
/// `power` and water-fills over its effective channel.
pub fn bd_antenna_profile(channels: &[ComplexMatrix], user: usize, power: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; channels[user].cols()];
    if power <= 0.0 {
        return Ok(out);
    }
    let Some(p) = projected_channel(channels, user) else {
        return Ok(out);
    };
    let dec = svd(&p)?;
    let gains = nonzero_gains(&dec.singular_values, channels[user].frobenius_norm());
    if gains.is_empty() {
        return Ok(out);
    }
    let wf = water_fill(&gains, power, 1.0)?;
    accumulate_profile(&dec.v, &wf.powers, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> ComplexMatrix {
        let data = (0..r * c)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::from_col_major(r, c, data).unwrap()
    }

    #[test]
    fn single_user_keeps_full_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random(&mut rng, 2, 4);
        let d = bd_precoders(std::slice::from_ref(&h)).unwrap();
        let g = d[0].precoder.as_ref().unwrap();
        assert_eq!(g.cols(), 4);
        assert!(g.orthonormality_defect() < 1e-12);
        let direct: Vec<f64> = singular_values(&h).unwrap().iter().map(|s| s * s).collect();
        for (a, b) in d[0].gains.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-10 * b);
        }
    }

    #[test]
    fn two_users_are_decoupled() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let hs = vec![random(&mut rng, 2, 4), random(&mut rng, 2, 4)];
        let d = bd_precoders(&hs).unwrap();
        for n in 0..2 {
            let g = d[n].precoder.as_ref().expect("null space exists");
            assert!(g.orthonormality_defect() < 1e-9);
            let leak = hs[1 - n].matmul(g).unwrap().frobenius_norm();
            assert!(leak <= 1e-9, "leak {leak}");
        }
    }

    #[test]
    fn too_few_antennas_skips_everyone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let hs = vec![random(&mut rng, 2, 2), random(&mut rng, 2, 2)];
        let d = bd_precoders(&hs).unwrap();
        assert!(d.iter().all(|u| u.skipped() && u.rank() == 0));
        assert!(bd_gains(&hs).unwrap().iter().all(|g| g.is_empty()));
    }

    #[test]
    fn projection_route_matches_null_space_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &(users, rx, tx) in &[(3, 2, 8), (3, 2, 12), (2, 2, 6), (3, 2, 4)] {
            let hs: Vec<ComplexMatrix> = (0..users).map(|_| random(&mut rng, rx, tx)).collect();
            let a = bd_precoders(&hs).unwrap();
            let b = bd_gains(&hs).unwrap();
            for n in 0..users {
                assert_eq!(a[n].gains.len(), b[n].len(), "{users}x{rx}x{tx} user {n}");
                for (x, y) in a[n].gains.iter().zip(&b[n]) {
                    assert!((x - y).abs() <= 1e-9 * x.max(1.0));
                }
            }
        }
    }

    #[test]
    fn covariance_stays_in_null_space_and_conserves_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let hs: Vec<ComplexMatrix> = (0..3).map(|_| random(&mut rng, 2, 12)).collect();
        for n in 0..3 {
            let prof = bd_antenna_profile(&hs, n, 2.5).unwrap();
            assert!((prof.iter().sum::<f64>() - 2.5).abs() < 1e-9);
        }
        // The dominant right singular vector of the projected channel is
        // invisible to the other users.
        let p = projected_channel(&hs, 0).unwrap();
        let v = svd(&p).unwrap().v.select_cols(&[0]);
        for other in &hs[1..] {
            assert!(other.matmul(&v).unwrap().frobenius_norm() < 1e-9);
        }
    }
}
