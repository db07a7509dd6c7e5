//! One-sided (Hestenes) Jacobi SVD for small complex matrices.
//!
//! Channel matrices here never exceed a few dozen columns, so the simple
//! cyclic-sweep scheme is accurate and fast enough.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;
const ORTHO_TOL: f64 = 1e-15;

/// Thin SVD `A = U diag(s) V†` with `k = min(rows, cols)` singular triplets.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// rows × k, orthonormal columns.
    pub u: ComplexMatrix,
    /// Non-negative, descending.
    pub singular_values: Vec<f64>,
    /// cols × k, orthonormal columns.
    pub v: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.u.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            for z in us.col_mut(j) {
                *z *= s;
            }
        }
        us.matmul(&self.v.adjoint())
            .expect("svd factors have consistent shapes")
    }

    /// Singular values above `rel_tol * s_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        if smax <= 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .filter(|&&s| s > rel_tol * smax)
            .count()
    }
}

fn check_input(a: &ComplexMatrix) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("svd of an empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite(format!(
            "{}x{} matrix has NaN/inf entries",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// Orthogonalise the columns of `w` in place, applying the same rotations to
/// `v` when given. On return the columns of `w` are mutually orthogonal.
fn jacobi_sweeps(w: &mut ComplexMatrix, mut v: Option<&mut ComplexMatrix>) {
    let n = w.cols();
    let m = w.rows();
    let mut norms: Vec<f64> = (0..n).map(|j| col_norm_sq(w.col(j))).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: Complex64 = {
                    let (cp, cq) = (w.col(p), w.col(q));
                    cp.iter().zip(cq).map(|(x, y)| x.conj() * y).sum()
                };
                let g = gamma.norm();
                if g <= ORTHO_TOL * (alpha * beta).sqrt() || g < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_cols(w, p, q, c, s, phase, m);
                if let Some(v) = v.as_deref_mut() {
                    let rows = v.rows();
                    rotate_cols(v, p, q, c, s, phase, rows);
                }
                norms[p] = col_norm_sq(w.col(p));
                norms[q] = col_norm_sq(w.col(q));
            }
        }
        if !rotated {
            break;
        }
    }
}

/// `[a_p a_q] <- [c a_p - s conj(phase) a_q,  s phase a_p + c a_q]`
fn rotate_cols(
    w: &mut ComplexMatrix,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    phase: Complex64,
    m: usize,
) {
    let (col_p, col_q) = w.col_pair_mut(p, q);
    let pc = phase.conj();
    for i in 0..m {
        let (x, y) = (col_p[i], col_q[i]);
        col_p[i] = x * c - y * pc * s;
        col_q[i] = x * phase * s + y * c;
    }
}

fn col_norm_sq(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum()
}

/// Sort orthogonalised columns by norm, descending; returns (order, norms).
fn sorted_norms(w: &ComplexMatrix) -> (Vec<usize>, Vec<f64>) {
    let norms: Vec<f64> = (0..w.cols())
        .map(|j| col_norm_sq(w.col(j)).sqrt())
        .collect();
    let mut order: Vec<usize> = (0..w.cols()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    let sorted = order.iter().map(|&j| norms[j]).collect();
    (order, sorted)
}

/// Extend orthonormal columns `basis` (some of which may be missing, marked
/// `None`) to a full orthonormal set by Gram-Schmidt against unit vectors.
fn complete_orthonormal(rows: usize, cols: Vec<Option<Vec<Complex64>>>) -> Vec<Vec<Complex64>> {
    let mut done: Vec<Vec<Complex64>> = Vec::with_capacity(cols.len());
    let present: Vec<Vec<Complex64>> = cols.iter().flatten().cloned().collect();
    let mut extra: Vec<Vec<Complex64>> = Vec::new();
    let missing = cols.iter().filter(|c| c.is_none()).count();
    let mut e = 0;
    while extra.len() < missing && e < rows {
        let mut cand = vec![Complex64::new(0.0, 0.0); rows];
        cand[e] = Complex64::new(1.0, 0.0);
        e += 1;
        for _ in 0..2 {
            for b in present.iter().chain(extra.iter()) {
                let dot: Complex64 = b.iter().zip(&cand).map(|(x, y)| x.conj() * y).sum();
                for (c, x) in cand.iter_mut().zip(b) {
                    *c -= dot * x;
                }
            }
        }
        let n = col_norm_sq(&cand).sqrt();
        if n > 1e-8 {
            for c in cand.iter_mut() {
                *c /= n;
            }
            extra.push(cand);
        }
    }
    let mut extra = extra.into_iter();
    for c in cols {
        match c {
            Some(v) => done.push(v),
            None => done.push(
                extra
                    .next()
                    .unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); rows]),
            ),
        }
    }
    done
}

/// SVD of a matrix with `cols <= rows`.
fn svd_tall(a: &ComplexMatrix) -> SvdResult {
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    jacobi_sweeps(&mut w, Some(&mut v));
    let (order, s) = sorted_norms(&w);
    let smax = s.first().copied().unwrap_or(0.0);
    let cutoff = smax * 1e-14;
    let u_cols: Vec<Option<Vec<Complex64>>> = order
        .iter()
        .zip(&s)
        .map(|(&j, &sj)| {
            (sj > cutoff && sj > 0.0).then(|| w.col(j).iter().map(|z| z / sj).collect())
        })
        .collect();
    let u_cols = complete_orthonormal(m, u_cols);
    let u = ComplexMatrix::from_col_major(m, n, u_cols.concat()).expect("shape");
    let v = v.select_cols(&order);
    SvdResult {
        u,
        singular_values: s,
        v,
    }
}

/// Thin singular value decomposition.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    check_input(a)?;
    if a.cols() <= a.rows() {
        Ok(svd_tall(a))
    } else {
        let t = svd_tall(&a.adjoint());
        Ok(SvdResult {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        })
    }
}

/// Singular values only, descending; length `min(rows, cols)`.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_input(a)?;
    let mut w = if a.cols() <= a.rows() {
        a.clone()
    } else {
        a.adjoint()
    };
    jacobi_sweeps(&mut w, None);
    Ok(sorted_norms(&w).1)
}

/// Orthonormal basis (cols × d) of the right null space `{x : A x = 0}`.
///
/// Singular values at or below `rel_tol * s_max` count as zero. A matrix with
/// no rows has the whole space as its null space.
pub fn right_null_space(a: &ComplexMatrix, rel_tol: f64) -> Result<ComplexMatrix> {
    let n = a.cols();
    if a.rows() == 0 {
        return Ok(ComplexMatrix::identity(n));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite(
            "null-space input has NaN/inf entries".into(),
        ));
    }
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    jacobi_sweeps(&mut w, Some(&mut v));
    let (order, s) = sorted_norms(&w);
    let smax = s.first().copied().unwrap_or(0.0);
    let null: Vec<usize> = order
        .iter()
        .zip(&s)
        .filter(|(_, &sj)| smax == 0.0 || sj <= rel_tol * smax)
        .map(|(&j, _)| j)
        .collect();
    Ok(v.select_cols(&null))
}
