//! Dense complex matrix kernel.
//!
//! Everything downstream works with small (N <= 64) dense complex matrices,
//! so the kernel keeps a plain row-major `Vec` and favours accuracy over
//! speed: eigenvalues come from Hessenberg reduction plus shifted QR, rank
//! decisions and least-squares solves from a one-sided Jacobi SVD.

mod eigen;
mod svd;

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

pub use eigen::eigenvalues;
pub use svd::{numerical_rank, singular_values, solve, svd, Svd};

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

/// Default relative tolerance for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Largest dimension the kernel accepts for eigenvalue problems.
pub const MAX_EIGEN_DIM: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("{op}: dimension mismatch between {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    Empty { rows: usize, cols: usize },
    #[error("expected {expected} entries for the requested shape, got {actual}")]
    EntryCount { expected: usize, actual: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension {0} exceeds the supported maximum of {MAX_EIGEN_DIM}")]
    TooLarge(usize),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("inconsistent system: residual {residual:.3e} exceeds bound {bound:.3e}")]
    Inconsistent { residual: f64, bound: f64 },
}

/// Dense row-major complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ComplexScalar>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<ComplexScalar>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(k) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input; meant for
    /// literals in tests and small constructions.
    pub fn from_rows(rows: &[Vec<ComplexScalar>]) -> Result<Self, LinalgError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Self::new(n_rows, n_cols, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let rows: Vec<Vec<ComplexScalar>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| ComplexScalar::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> ComplexScalar,
    ) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "zero-sized matrix");
        Self {
            rows,
            cols,
            data: vec![ComplexScalar::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ComplexScalar::new(1.0, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<ComplexScalar>]) -> Result<Self, LinalgError> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(LinalgError::DimensionMismatch {
                op: "from_columns",
                left: (rows, 1),
                right: (bad.len(), 1),
            });
        }
        Self::from_fn(rows, cols, |i, j| columns[j][i])
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[ComplexScalar] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<ComplexScalar> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<ComplexScalar> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn scale(&self, factor: ComplexScalar) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(ComplexScalar::new(factor, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(ComplexScalar, ComplexScalar) -> ComplexScalar,
    ) -> Result<Self, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self - shift * I`.
    pub fn shifted(&self, shift: ComplexScalar) -> Result<Self, LinalgError> {
        self.require_square()?;
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] -= shift;
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        matmul(self, other)
    }

    pub fn mul_vec(&self, v: &[ComplexScalar]) -> Result<Vec<ComplexScalar>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "mul_vec",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn pow(&self, k: u32) -> Result<Self, LinalgError> {
        self.require_square()?;
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = matmul(&out, self)?;
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Reorders rows and columns: `out[(a, b)] = self[(perm[a], perm[b])]`,
    /// i.e. `P^T M P` for the permutation matrix sending basis `perm[a]` to `a`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Result<Self, LinalgError> {
        self.require_square()?;
        check_permutation(perm, self.rows)?;
        Self::from_fn(self.rows, self.cols, |a, b| self[(perm[a], perm[b])])
    }

    /// Reorders rows only: `out[(a, j)] = self[(perm[a], j)]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self, LinalgError> {
        check_permutation(perm, self.rows)?;
        Self::from_fn(self.rows, self.cols, |a, j| self[(perm[a], j)])
    }

    /// Block-diagonal direct sum of square or rectangular blocks.
    pub fn direct_sum(blocks: &[Self]) -> Self {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub(crate) fn require_square(&self) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<(), LinalgError> {
    let mut seen = vec![false; n];
    let ok = perm.len() == n
        && perm
            .iter()
            .all(|&p| p < n && !std::mem::replace(&mut seen[p], true));
    if ok {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch {
            op: "permute",
            left: (n, n),
            right: (perm.len(), 1),
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = ComplexScalar;

    fn index(&self, (i, j): (usize, usize)) -> &ComplexScalar {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ComplexScalar {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if a.cols != b.rows {
        return Err(LinalgError::DimensionMismatch {
            op: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik == ComplexScalar::new(0.0, 0.0) {
                continue;
            }
            for j in 0..b.cols {
                out.data[i * b.cols + j] += aik * b.data[k * b.cols + j];
            }
        }
    }
    Ok(out)
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    // scaled accumulation, entries here never approach overflow but the
    // Jacobi sweeps call this on intermediate columns too
    let scale = m.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = m.data.iter().map(|z| (z / scale).norm_sqr()).sum();
    scale * sum.sqrt()
}

pub fn vec_norm(v: &[ComplexScalar]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `<u, v> = sum conj(u_i) v_i`.
pub fn inner(u: &[ComplexScalar], v: &[ComplexScalar]) -> ComplexScalar {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Lexicographic order on (real, imaginary); the canonical order for
/// comparing spectra.
pub fn cmp_lex(a: &ComplexScalar, b: &ComplexScalar) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn sort_spectrum(values: &mut [ComplexScalar]) {
    values.sort_by(cmp_lex);
}
