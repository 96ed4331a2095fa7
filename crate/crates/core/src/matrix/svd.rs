//! Cyclic Jacobi routines for small dense real matrices.
//!
//! Singular values use one-sided (Hestenes) Jacobi: plane rotations applied
//! to the columns of `A` diagonalize `A^T A` implicitly, and the singular
//! values are the final column norms. Symmetric eigen-decomposition uses the
//! classical two-sided cyclic sweep.

use crate::error::{Error, Result};

pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 30;
/// Squared column norms below this are near the subnormal range, where the
/// rotation formulas lose all precision.
const TINY_SQ: f64 = 1e-290;

/// Descending singular values of the row-major `rows x cols` matrix `a`.
pub fn singular_values_of(rows: usize, cols: usize, a: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(a.len(), rows * cols);
    let amax = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if amax == 0.0 {
        return Ok(vec![0.0; rows.min(cols)]);
    }
    // exact power-of-two prescale keeps sums of squares in range
    let shift = (amax.log2().floor() as i32).clamp(-1000, 1000);
    let down = pow2(-shift);
    let up = pow2(shift);
    // work on columns: col j lives at u[j*rows .. (j+1)*rows]
    let mut u = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            u[j * rows + i] = a[i * cols + j] * down;
        }
    }
    // a column that has shrunk to rounding size of its starting entries is
    // numerically zero; rotating it again only reshuffles noise
    let floor_sq: Vec<f64> = (0..cols)
        .map(|j| (8.0 * f64::EPSILON * hypot_norm(&u[j * rows..(j + 1) * rows])).powi(2))
        .collect();
    let mut residual = 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        residual = 0.0f64;
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..rows {
                    let x = u[p * rows + i];
                    let y = u[q * rows + i];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0
                    || alpha <= floor_sq[p].max(TINY_SQ)
                    || beta <= floor_sq[q].max(TINY_SQ)
                {
                    continue;
                }
                // alpha * beta can underflow on graded columns
                let off = gamma.abs() / (alpha.sqrt() * beta.sqrt());
                residual = residual.max(off);
                if off <= JACOBI_TOL {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let x = u[p * rows + i];
                    let y = u[q * rows + i];
                    let (nx, ny) = (c * x - s * y, s * x + c * y);
                    // a rotation below the rounding of both columns is a fixed
                    // point: sweeping again cannot change anything
                    rotated |= nx != x || ny != y;
                    u[p * rows + i] = nx;
                    u[q * rows + i] = ny;
                }
            }
        }
        if !rotated {
            let mut sv: Vec<f64> = (0..cols)
                .map(|j| {
                    let col = &u[j * rows..(j + 1) * rows];
                    hypot_norm(col) * up
                })
                .collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            sv.truncate(rows.min(cols));
            return Ok(sv);
        }
    }
    Err(Error::Numeric {
        message: format!("Jacobi SVD did not converge in {JACOBI_MAX_SWEEPS} sweeps"),
        residual,
    })
}

pub(crate) fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

/// Overflow-safe Euclidean norm.
fn hypot_norm(v: &[f64]) -> f64 {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * v.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
}

#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Column `k` (row-major layout `vectors[i*n + k]`) is the eigenvector for `values[k]`.
    pub vectors: Vec<f64>,
}

/// Eigen-decomposition of a symmetric `n x n` matrix by cyclic Jacobi.
pub fn symmetric_eigen(n: usize, m: &[f64]) -> Result<SymmetricEigen> {
    assert_eq!(m.len(), n * n);
    let mut a = m.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut converged = n < 2 || scale == 0.0;
    let mut off = 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[p * n + q] * a[p * n + q];
                }
            }
        }
        off = off.sqrt();
        converged = off <= JACOBI_TOL * scale;
    }
    if !converged {
        return Err(Error::Numeric {
            message: "Jacobi eigen-decomposition did not converge".into(),
            residual: off / scale,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + k] = v[i * n + src];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}
