//! Eigenvalues of general complex matrices: Householder reduction to upper
//! Hessenberg form, then single-shift QR with Wilkinson shifts and
//! deflation on negligible subdiagonals.

use super::{ComplexMatrix, ComplexScalar, LinalgError, MAX_EIGEN_DIM};

const ITERATIONS_PER_EIGENVALUE: usize = 40;

/// All `n` eigenvalues of a square matrix, with multiplicity, unsorted.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<ComplexScalar>, LinalgError> {
    m.require_square()?;
    let n = m.n_rows();
    if n > MAX_EIGEN_DIM {
        return Err(LinalgError::TooLarge(n));
    }
    let mut h = Dense::from(m);
    h.reduce_to_hessenberg();
    h.shifted_qr()
}

/// Square scratch buffer with plain `(i, j)` indexing.
struct Dense {
    n: usize,
    a: Vec<ComplexScalar>,
}

impl From<&ComplexMatrix> for Dense {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            n: m.n_rows(),
            a: m.entries().to_vec(),
        }
    }
}

impl Dense {
    #[inline]
    fn at(&self, i: usize, j: usize) -> ComplexScalar {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut ComplexScalar {
        &mut self.a[i * self.n + j]
    }

    fn reduce_to_hessenberg(&mut self) {
        let n = self.n;
        for k in 0..n.saturating_sub(2) {
            let col: Vec<ComplexScalar> = (k + 1..n).map(|i| self.at(i, k)).collect();
            // already Hessenberg in this column: leave it exactly as is
            if col[1..].iter().all(|z| *z == ComplexScalar::new(0.0, 0.0)) {
                continue;
            }
            let norm = super::vec_norm(&col);
            let alpha = col[0];
            let phase = if alpha.norm() == 0.0 {
                ComplexScalar::new(1.0, 0.0)
            } else {
                alpha / alpha.norm()
            };
            // v = x + e^{i arg x0} |x| e1, reflector H = I - 2 v v^H / (v^H v)
            let mut v = col;
            v[0] += phase * norm;
            let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            let beta = 2.0 / vnorm2;

            // left: rows k+1.., all columns from k
            for j in k..n {
                let mut s = ComplexScalar::new(0.0, 0.0);
                for (t, vt) in v.iter().enumerate() {
                    s += vt.conj() * self.at(k + 1 + t, j);
                }
                s *= beta;
                for (t, vt) in v.iter().enumerate() {
                    *self.at_mut(k + 1 + t, j) -= vt * s;
                }
            }
            // right: all rows, columns k+1..
            for i in 0..n {
                let mut s = ComplexScalar::new(0.0, 0.0);
                for (t, vt) in v.iter().enumerate() {
                    s += self.at(i, k + 1 + t) * vt;
                }
                s *= beta;
                for (t, vt) in v.iter().enumerate() {
                    *self.at_mut(i, k + 1 + t) -= s * vt.conj();
                }
            }
            for i in k + 2..n {
                *self.at_mut(i, k) = ComplexScalar::new(0.0, 0.0);
            }
        }
    }

    fn shifted_qr(mut self) -> Result<Vec<ComplexScalar>, LinalgError> {
        let n = self.n;
        let eps = f64::EPSILON;
        let norm = self.a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut eig = vec![ComplexScalar::new(0.0, 0.0); n];
        if norm == 0.0 {
            return Ok(eig);
        }
        let max_iter = ITERATIONS_PER_EIGENVALUE * n;
        let mut total = 0usize;
        let mut its = 0usize;
        let mut hi = n - 1;

        loop {
            if hi == 0 {
                eig[0] = self.at(0, 0);
                break;
            }
            // locate the start of the trailing unreduced block
            let mut lo = hi;
            while lo > 0 {
                let sub = self.at(lo, lo - 1).l1_norm();
                let mut diag = self.at(lo - 1, lo - 1).l1_norm() + self.at(lo, lo).l1_norm();
                if diag == 0.0 {
                    diag = norm;
                }
                if sub <= eps * diag {
                    *self.at_mut(lo, lo - 1) = ComplexScalar::new(0.0, 0.0);
                    break;
                }
                lo -= 1;
            }

            if lo == hi {
                eig[hi] = self.at(hi, hi);
                hi -= 1;
                its = 0;
                continue;
            }
            if lo + 1 == hi {
                let (l1, l2) = eig2x2(
                    self.at(hi - 1, hi - 1),
                    self.at(hi - 1, hi),
                    self.at(hi, hi - 1),
                    self.at(hi, hi),
                );
                eig[hi - 1] = l1;
                eig[hi] = l2;
                if hi == 1 {
                    break;
                }
                hi -= 2;
                its = 0;
                continue;
            }

            total += 1;
            its += 1;
            if total > max_iter {
                return Err(LinalgError::NoConvergence {
                    what: "shifted QR",
                    iterations: total,
                });
            }

            let shift = if its.is_multiple_of(10) {
                // exceptional shift to break cycles
                let s = self.at(hi, hi - 1).re.abs() + self.at(hi - 1, hi - 2).re.abs();
                self.at(hi, hi) + ComplexScalar::new(0.75 * s, 0.0)
            } else {
                wilkinson_shift(
                    self.at(hi - 1, hi - 1),
                    self.at(hi - 1, hi),
                    self.at(hi, hi - 1),
                    self.at(hi, hi),
                )
            };
            self.qr_step(lo, hi, shift);
        }
        Ok(eig)
    }

    /// One explicit shifted QR step `H - mu I = QR`, `H <- RQ + mu I` on the
    /// active window `lo..=hi`. Only the window is updated; eigenvalues of
    /// the window do not depend on the coupling to the rest of the matrix.
    fn qr_step(&mut self, lo: usize, hi: usize, shift: ComplexScalar) {
        for i in lo..=hi {
            *self.at_mut(i, i) -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(self.at(k, k), self.at(k + 1, k));
            // rows k, k+1 <- G^H [row k; row k+1]
            for j in k..=hi {
                let x = self.at(k, j);
                let y = self.at(k + 1, j);
                *self.at_mut(k, j) = x * c + y * s.conj();
                *self.at_mut(k + 1, j) = -x * s + y * c;
            }
            *self.at_mut(k + 1, k) = ComplexScalar::new(0.0, 0.0);
            rots.push((c, s));
        }
        for (t, &(c, s)) in rots.iter().enumerate() {
            let k = lo + t;
            // columns k, k+1 <- [col k, col k+1] G
            for i in lo..=(k + 1).min(hi) {
                let x = self.at(i, k);
                let y = self.at(i, k + 1);
                *self.at_mut(i, k) = x * c + y * s;
                *self.at_mut(i, k + 1) = -x * s.conj() + y * c;
            }
        }
        for i in lo..=hi {
            *self.at_mut(i, i) += shift;
        }
    }
}

/// Rotation with real cosine such that `[c, conj(s); -s, c] [a; b] = [r; 0]`.
fn givens(a: ComplexScalar, b: ComplexScalar) -> (f64, ComplexScalar) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ComplexScalar::new(0.0, 0.0));
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    // s chosen so that -s a + c b = 0  =>  s = c b / a
    let s = (b / a) * c;
    (c, s)
}

fn eig2x2(
    a: ComplexScalar,
    b: ComplexScalar,
    c: ComplexScalar,
    d: ComplexScalar,
) -> (ComplexScalar, ComplexScalar) {
    let half_tr = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    // pick the root of larger modulus first, recover the other from the determinant
    let l1 = if (half_tr + disc).norm() >= (half_tr - disc).norm() {
        half_tr + disc
    } else {
        half_tr - disc
    };
    let det = a * d - b * c;
    let l2 = if l1.norm() == 0.0 {
        half_tr - (l1 - half_tr)
    } else {
        det / l1
    };
    (l1, l2)
}

fn wilkinson_shift(
    a: ComplexScalar,
    b: ComplexScalar,
    c: ComplexScalar,
    d: ComplexScalar,
) -> ComplexScalar {
    let (l1, l2) = eig2x2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sort_spectrum, ComplexMatrix};

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    #[test]
    fn ep2_block_has_double_zero() {
        let h = ComplexMatrix::from_rows(&[
            vec![c(0.0, -1.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 1.0)],
        ])
        .unwrap();
        for z in eigenvalues(&h).unwrap() {
            assert!(z.norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn diagonal_spectrum() {
        let m = ComplexMatrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ])
        .unwrap();
        let mut ev = eigenvalues(&m).unwrap();
        sort_spectrum(&mut ev);
        for (z, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z - c(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn h3_at_gamma_point_six() {
        // diag i*0.6*(-2, 0, 2), off-diagonals sqrt 2; spectrum 0.8 * {-2, 0, 2}
        let s2 = 2f64.sqrt();
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, -1.2), c(s2, 0.0), c(0.0, 0.0)],
            vec![c(s2, 0.0), c(0.0, 0.0), c(s2, 0.0)],
            vec![c(0.0, 0.0), c(s2, 0.0), c(0.0, 1.2)],
        ])
        .unwrap();
        let mut ev = eigenvalues(&m).unwrap();
        sort_spectrum(&mut ev);
        let tol = 1e-10 * m.frobenius_norm();
        for (z, want) in ev.iter().zip([-1.6, 0.0, 1.6]) {
            assert!((z - c(want, 0.0)).norm() < tol, "{z} vs {want}");
        }
    }

    #[test]
    fn dense_random_like_matrix_trace_and_determinant() {
        let m = ComplexMatrix::from_fn(6, 6, |i, j| {
            let x = ((i * 7 + j * 13) % 11) as f64 - 5.0;
            c(x, ((i + 2 * j) % 5) as f64 - 2.0)
        })
        .unwrap();
        let ev = eigenvalues(&m).unwrap();
        let trace: ComplexScalar = m.diagonal().iter().sum();
        let sum: ComplexScalar = ev.iter().sum();
        assert!((trace - sum).norm() < 1e-10 * m.frobenius_norm());
    }

    #[test]
    fn rejects_non_square_and_oversized() {
        assert!(matches!(
            eigenvalues(&ComplexMatrix::zeros(2, 3)),
            Err(LinalgError::NotSquare { rows: 2, cols: 3 })
        ));
        assert!(matches!(
            eigenvalues(&ComplexMatrix::identity(65)),
            Err(LinalgError::TooLarge(65))
        ));
    }

    #[test]
    fn zero_matrix() {
        assert!(eigenvalues(&ComplexMatrix::zeros(4, 4))
            .unwrap()
            .iter()
            .all(|z| z.norm() == 0.0));
    }
}
