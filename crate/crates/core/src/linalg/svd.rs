//! One-sided (Hestenes) Jacobi SVD and the rank / least-squares helpers
//! built on it.

use super::{frobenius_norm, ComplexMatrix, ComplexScalar, LinalgError};

const MAX_SWEEPS: usize = 80;

/// Singular values below this fraction of the largest are treated as zero
/// when forming minimum-norm solutions.
const SOLVE_CUTOFF: f64 = 1e-10;

/// Relative residual bound for accepting a solve as consistent.
const SOLVE_RESIDUAL: f64 = 1e-9;

/// Thin SVD `A = U diag(s) V^H` with `s` sorted in decreasing order.
///
/// Columns of `u` that belong to exactly zero singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// Right singular vector belonging to the smallest singular value.
    pub fn smallest_right_vector(&self) -> Vec<ComplexScalar> {
        self.v.column(self.s.len() - 1)
    }
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd, LinalgError> {
    if m.n_rows() >= m.n_cols() {
        jacobi_svd(m)
    } else {
        let t = jacobi_svd(&m.adjoint())?;
        Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    Ok(svd(m)?.s)
}

/// Number of singular values above `tol * sigma_max`; 0 for the zero matrix.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> Result<usize, LinalgError> {
    check_tol(tol)?;
    let s = singular_values(m)?;
    let smax = s[0];
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&x| x > tol * smax).count())
}

pub(crate) fn check_tol(tol: f64) -> Result<(), LinalgError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(LinalgError::InvalidTolerance(tol))
    }
}

/// Minimum-norm solution of `a x = rhs`.
///
/// Rank-deficient but consistent systems are accepted; an inconsistent
/// right-hand side yields [`LinalgError::Inconsistent`] with the residual.
pub fn solve(a: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    a.require_square()?;
    if rhs.n_rows() != a.n_rows() {
        return Err(LinalgError::DimensionMismatch {
            op: "solve",
            left: a.shape(),
            right: rhs.shape(),
        });
    }
    let dec = svd(a)?;
    let n = a.n_cols();
    let cutoff = SOLVE_CUTOFF * dec.s[0];
    let mut x = ComplexMatrix::zeros(n, rhs.n_cols());
    for (k, &sk) in dec.s.iter().enumerate() {
        if sk <= cutoff || sk == 0.0 {
            continue;
        }
        for col in 0..rhs.n_cols() {
            // coefficient (u_k^H b) / s_k
            let mut coef = ComplexScalar::new(0.0, 0.0);
            for i in 0..a.n_rows() {
                coef += dec.u[(i, k)].conj() * rhs[(i, col)];
            }
            coef /= sk;
            for i in 0..n {
                x[(i, col)] += dec.v[(i, k)] * coef;
            }
        }
    }
    let residual = frobenius_norm(&a.matmul(&x)?.sub(rhs)?);
    let bound = SOLVE_RESIDUAL * frobenius_norm(a) * frobenius_norm(&x);
    if residual > bound {
        return Err(LinalgError::Inconsistent { residual, bound });
    }
    Ok(x)
}

/// Column-major working copy, so Jacobi rotations touch contiguous memory.
fn jacobi_svd(m: &ComplexMatrix) -> Result<Svd, LinalgError> {
    let rows = m.n_rows();
    let n = m.n_cols();
    let mut a: Vec<Vec<ComplexScalar>> = (0..n).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<ComplexScalar>> = (0..n)
        .map(|j| {
            let mut e = vec![ComplexScalar::new(0.0, 0.0); n];
            e[j] = ComplexScalar::new(1.0, 0.0);
            e
        })
        .collect();
    let threshold = (rows as f64).sqrt() * f64::EPSILON;
    // pairs whose coupling is at rounding level of the whole matrix are left alone;
    // otherwise columns of norm ~eps*|A| can keep rotating on noise
    let total: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    let floor = f64::EPSILON * f64::EPSILON * total;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: ComplexScalar = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= threshold * (alpha * beta).sqrt() || g <= floor {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // [a_p a_q] <- [a_p a_q] [[c, s e^{i phi}], [-s e^{-i phi}, c]]
                rotate(&mut a, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            what: "Jacobi SVD",
            iterations: MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = a.iter().map(|col| super::vec_norm(col)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = ComplexMatrix::zeros(rows, n);
    let mut vm = ComplexMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let sj = norms[j];
        s.push(sj);
        for i in 0..rows {
            if sj > 0.0 {
                u[(i, k)] = a[j][i] / sj;
            }
        }
        for i in 0..n {
            vm[(i, k)] = v[j][i];
        }
    }
    Ok(Svd { u, s, v: vm })
}

fn rotate(
    cols: &mut [Vec<ComplexScalar>],
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    phase: ComplexScalar,
) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let yq = *y;
        *x = xp * c - yq * phase.conj() * s;
        *y = xp * phase * s + yq * c;
    }
}
