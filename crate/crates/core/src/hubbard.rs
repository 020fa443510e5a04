//! Bose-Hubbard building blocks and their rescaled direct sums.
//!
//! The two-mode non-Hermitian Bose-Hubbard operator
//! `(a1^+ a2 + a2^+ a1) - i gamma (a1^+ a1 - a2^+ a2)` conserves the boson
//! number, so it splits into finite tridiagonal blocks `H^(N)(gamma)` of size
//! `N = N_B + 1`. Rescaling blocks and gluing them together as a direct sum
//! keeps the spectrum exactly solvable while changing the Jordan structure at
//! `gamma = 1`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{admissibility_violation, AdmissibilityViolation};
use crate::linalg::{ComplexMatrix, ComplexScalar};

/// Value of the coupling at which every block of the model becomes nilpotent.
pub const GAMMA_EPN: f64 = 1.0;

/// Relative defect accepted by [`symmetry_report`].
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("block size must be at least 2, got {0}")]
    BlockTooSmall(usize),
    #[error("block scale must be a positive integer, got {0}")]
    BadScale(u32),
    #[error("boson number must be at least 1, got {0}")]
    NoBosons(usize),
    #[error("dimension mismatch: block sizes sum to {sum}, expected N = {dimension}")]
    SizeMismatch { dimension: usize, sum: usize },
    #[error("a model needs at least one block")]
    NoBlocks,
    #[error("partition has {parts} parts but {scales} scales were given")]
    ScaleCount { parts: usize, scales: usize },
    #[error("inadmissible configuration: {0}")]
    Inadmissible(AdmissibilityViolation),
    #[error("closed-form spectrum is real only for |gamma| <= 1, got {0}")]
    BrokenRegime(f64),
    #[error("gamma must be finite, got {0}")]
    NonFiniteGamma(f64),
}

/// One building block `c * H^(M)(gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockSpec {
    size: usize,
    scale: u32,
}

impl BlockSpec {
    pub fn new(size: usize, scale: u32) -> Result<Self, ModelError> {
        if size < 2 {
            return Err(ModelError::BlockTooSmall(size));
        }
        if scale == 0 {
            return Err(ModelError::BadScale(scale));
        }
        Ok(Self { size, scale })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Imaginary diagonal coefficients `c (2j - M - 1)`, `j = 1..=M`.
    pub fn diagonal_coefficients(&self) -> impl Iterator<Item = i64> + '_ {
        let m = self.size as i64;
        let c = i64::from(self.scale);
        (1..=m).map(move |j| c * (2 * j - m - 1))
    }
}

/// Partition of `N` with one scale per part, stored in canonical order:
/// sizes nonincreasing, and scales nondecreasing among equal sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelConfig {
    dimension: usize,
    blocks: Vec<BlockSpec>,
}

impl ModelConfig {
    /// Validates the blocks and sorts them into canonical order.
    pub fn new(dimension: usize, mut blocks: Vec<BlockSpec>) -> Result<Self, ModelError> {
        if blocks.is_empty() {
            return Err(ModelError::NoBlocks);
        }
        let sum: usize = blocks.iter().map(BlockSpec::size).sum();
        if sum != dimension {
            return Err(ModelError::SizeMismatch { dimension, sum });
        }
        blocks.sort_by(|a, b| b.size.cmp(&a.size).then(a.scale.cmp(&b.scale)));
        Ok(Self { dimension, blocks })
    }

    pub fn from_parts(
        dimension: usize,
        partition: &[usize],
        scales: &[u32],
    ) -> Result<Self, ModelError> {
        if partition.len() != scales.len() {
            return Err(ModelError::ScaleCount {
                parts: partition.len(),
                scales: scales.len(),
            });
        }
        let blocks = partition
            .iter()
            .zip(scales)
            .map(|(&m, &c)| BlockSpec::new(m, c))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(dimension, blocks)
    }

    /// The unscaled single-block model `{[N], (1)}`.
    pub fn single_block(dimension: usize) -> Result<Self, ModelError> {
        Self::new(dimension, vec![BlockSpec::new(dimension, 1)?])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    /// Geometric multiplicity `K` of the exceptional point.
    pub fn multiplicity(&self) -> usize {
        self.blocks.len()
    }

    pub fn partition(&self) -> Vec<usize> {
        self.blocks.iter().map(BlockSpec::size).collect()
    }

    pub fn scales(&self) -> Vec<u32> {
        self.blocks.iter().map(BlockSpec::scale).collect()
    }
}

impl fmt::Display for ModelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        write!(
            f,
            "N={} [{}] scales ({})",
            self.dimension,
            join(self.partition().iter().map(ToString::to_string).collect()),
            join(self.scales().iter().map(ToString::to_string).collect()),
        )
    }
}

/// Which side of the exceptional point a coupling sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `|gamma| < 1`: real, diagonalizable spectrum.
    Unbroken,
    /// `|gamma| = 1`: all levels and eigenvectors coalesce.
    Exceptional,
    /// `|gamma| > 1`: complex spectrum.
    Broken,
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CouplingParameter(pub f64);

impl CouplingParameter {
    pub fn regime(self) -> Regime {
        let g = self.0.abs();
        if g == GAMMA_EPN {
            Regime::Exceptional
        } else if g < GAMMA_EPN {
            Regime::Unbroken
        } else {
            Regime::Broken
        }
    }
}

fn check_gamma(gamma: f64) -> Result<(), ModelError> {
    if gamma.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonFiniteGamma(gamma))
    }
}

fn cplx(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

/// The tridiagonal block `H^(N)(gamma)`: diagonal `i gamma (2j - N - 1)` and
/// symmetric couplings `sqrt(j (N - j))`, rows `j = 1..=N`.
pub fn bh_block(n: usize, gamma: f64) -> Result<ComplexMatrix, ModelError> {
    if n < 2 {
        return Err(ModelError::BlockTooSmall(n));
    }
    check_gamma(gamma)?;
    let mut h = ComplexMatrix::zeros(n, n);
    for j in 1..=n {
        h[(j - 1, j - 1)] = cplx(0.0, gamma * ((2 * j) as f64 - (n + 1) as f64));
    }
    for j in 1..n {
        let t = ((j * (n - j)) as f64).sqrt();
        h[(j - 1, j)] = cplx(t, 0.0);
        h[(j, j - 1)] = cplx(t, 0.0);
    }
    Ok(h)
}

/// Two-mode Fock state `|n1, n2>`.
type Fock = (usize, usize);

/// `a_to^+ a_from` acting on a Fock state: returns the image state and the
/// matrix element, or `None` when the annihilated mode is empty.
fn hop(state: Fock, to_first: bool) -> Option<(Fock, f64)> {
    let (n1, n2) = state;
    if to_first {
        // a1^+ a2
        (n2 > 0).then(|| {
            (
                (n1 + 1, n2 - 1),
                ((n1 + 1) as f64).sqrt() * (n2 as f64).sqrt(),
            )
        })
    } else {
        // a2^+ a1
        (n1 > 0).then(|| {
            (
                (n1 - 1, n2 + 1),
                ((n2 + 1) as f64).sqrt() * (n1 as f64).sqrt(),
            )
        })
    }
}

/// The Bose-Hubbard operator restricted to the sector with `n_bosons`
/// particles, built from ladder-operator matrix elements in the basis
/// `|n1, n2>` ordered by decreasing `n1`.
pub fn fock_block(n_bosons: usize, gamma: f64) -> Result<ComplexMatrix, ModelError> {
    if n_bosons < 1 {
        return Err(ModelError::NoBosons(n_bosons));
    }
    check_gamma(gamma)?;
    let basis: Vec<Fock> = (0..=n_bosons).rev().map(|n1| (n1, n_bosons - n1)).collect();
    let index: HashMap<Fock, usize> = basis.iter().enumerate().map(|(k, &s)| (s, k)).collect();
    let dim = basis.len();
    let mut h = ComplexMatrix::zeros(dim, dim);
    for (col, &state) in basis.iter().enumerate() {
        let (n1, n2) = state;
        // -i gamma (a1^+ a1 - a2^+ a2) is diagonal in the Fock basis
        h[(col, col)] += cplx(0.0, -gamma * (n1 as f64 - n2 as f64));
        for to_first in [true, false] {
            if let Some((image, amp)) = hop(state, to_first) {
                h[(index[&image], col)] += cplx(amp, 0.0);
            }
        }
    }
    Ok(h)
}

/// `c * H^(M)(gamma)`.
pub fn scaled_block(spec: BlockSpec, gamma: f64) -> Result<ComplexMatrix, ModelError> {
    Ok(bh_block(spec.size, gamma)?.scale_real(f64::from(spec.scale)))
}

/// Basis order that sorts the diagonal of the raw direct sum by imaginary
/// coefficient; ties (impossible for admissible models) fall back to block
/// index, then position inside the block. `perm[new] = old`.
pub fn canonical_permutation(config: &ModelConfig) -> Vec<usize> {
    let mut keys: Vec<(i64, usize, usize, usize)> = Vec::with_capacity(config.dimension);
    let mut offset = 0;
    for (b, spec) in config.blocks.iter().enumerate() {
        for (j, coef) in spec.diagonal_coefficients().enumerate() {
            keys.push((coef, b, j, offset + j));
        }
        offset += spec.size;
    }
    keys.sort_unstable();
    keys.into_iter().map(|k| k.3).collect()
}

/// For every canonical basis position, the index of the block it came from.
pub fn block_membership(config: &ModelConfig) -> Vec<usize> {
    let owner: Vec<usize> = config
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(b, spec)| std::iter::repeat_n(b, spec.size))
        .collect();
    canonical_permutation(config)
        .into_iter()
        .map(|old| owner[old])
        .collect()
}

/// A constructed direct-sum Hamiltonian with the bookkeeping needed to map
/// back to its blocks.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub config: ModelConfig,
    pub gamma: f64,
    pub matrix: ComplexMatrix,
    /// `perm[canonical position] = position in the raw block-diagonal sum`.
    pub permutation: Vec<usize>,
    pub admissible: bool,
}

/// Direct sum of the scaled blocks, reordered so that the diagonal is
/// sorted by imaginary coefficient.
///
/// Inadmissible models are rejected unless `allow_inadmissible` is set, in
/// which case the result is tagged `admissible: false`.
pub fn direct_sum_hamiltonian(
    config: &ModelConfig,
    gamma: f64,
    allow_inadmissible: bool,
) -> Result<Hamiltonian, ModelError> {
    check_gamma(gamma)?;
    let violation = admissibility_violation(config);
    if let (Some(v), false) = (&violation, allow_inadmissible) {
        return Err(ModelError::Inadmissible(v.clone()));
    }
    let blocks = config
        .blocks
        .iter()
        .map(|&spec| scaled_block(spec, gamma))
        .collect::<Result<Vec<_>, _>>()?;
    let raw = ComplexMatrix::direct_sum(&blocks);
    let permutation = canonical_permutation(config);
    let matrix = raw
        .permute_symmetric(&permutation)
        .expect("canonical permutation has the right length");
    Ok(Hamiltonian {
        config: config.clone(),
        gamma,
        matrix,
        permutation,
        admissible: violation.is_none(),
    })
}

/// Shorthand for admissible models: the canonical matrix only.
pub fn model_matrix(config: &ModelConfig, gamma: f64) -> Result<ComplexMatrix, ModelError> {
    Ok(direct_sum_hamiltonian(config, gamma, false)?.matrix)
}

/// Quantum-number set `{1-N, 3-N, ..., N-1}`.
pub fn level_indices(n: usize) -> Vec<i64> {
    let n = n as i64;
    (0..n).map(|k| 2 * k + 1 - n).collect()
}

/// Exact spectrum `n sqrt(1 - gamma^2)` over the level indices, sorted.
pub fn closed_form_spectrum(n: usize, gamma: f64) -> Result<Vec<f64>, ModelError> {
    if n < 2 {
        return Err(ModelError::BlockTooSmall(n));
    }
    check_gamma(gamma)?;
    if gamma.abs() > GAMMA_EPN {
        return Err(ModelError::BrokenRegime(gamma));
    }
    let root = (1.0 - gamma * gamma).sqrt();
    Ok(level_indices(n)
        .into_iter()
        .map(|k| k as f64 * root)
        .collect())
}

/// Antidiagonal unit matrix.
pub fn parity_matrix(n: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        p[(i, n - 1 - i)] = cplx(1.0, 0.0);
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub complex_symmetric: bool,
    pub pt_symmetric: bool,
    pub max_defect: f64,
}

/// Relative transposition and PT defects of a square matrix.
pub fn symmetry_report(m: &ComplexMatrix) -> Result<SymmetryReport, crate::linalg::LinalgError> {
    m.require_square()?;
    let scale = m.frobenius_norm();
    let rel = |d: f64| if scale == 0.0 { 0.0 } else { d / scale };
    let sym = rel(m.sub(&m.transpose())?.frobenius_norm());
    let p = parity_matrix(m.n_rows());
    let pt = rel(p.matmul(&m.conj())?.matmul(&p)?.sub(m)?.frobenius_norm());
    Ok(SymmetryReport {
        complex_symmetric: sym <= SYMMETRY_TOL,
        pt_symmetric: pt <= SYMMETRY_TOL,
        max_defect: sym.max(pt),
    })
}
