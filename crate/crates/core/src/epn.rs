//! Structure of the exceptional point at `gamma = 1`.
//!
//! At the EPN every admissible Hamiltonian is nilpotent. Its Jordan form is
//! a direct sum of nilpotent Jordan blocks whose sizes are the partition of
//! the model, and the transition matrix `Q` with `H Q = Q J` is assembled
//! from one Jordan chain per building block.

use serde::Serialize;
use thiserror::Error;

use crate::hubbard::{
    block_membership, direct_sum_hamiltonian, scaled_block, ModelConfig, ModelError, GAMMA_EPN,
};
use crate::linalg::{
    self, inner, singular_values, solve, svd, vec_norm, ComplexMatrix, ComplexScalar, LinalgError,
    DEFAULT_RANK_TOL,
};

/// Relative bound on `||H Q - Q J||_F / (||H||_F ||Q||_F)`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Smallest accepted `sigma_min(Q) / sigma_max(Q)`.
pub const INVERTIBILITY_TOL: f64 = 1e-8;

/// Relative tie window when picking the largest entry of `v_1`.
const PIVOT_TIE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EpnError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("rank sequence {0:?} is not consistent with a nilpotent Jordan structure")]
    RankSequence(Vec<usize>),
    #[error("matrix is not nilpotent: rank sequence {0:?} never reaches zero")]
    NotNilpotent(Vec<usize>),
    #[error("block has nullity {0}, expected a single Jordan chain")]
    NotSingleChain(usize),
    #[error("Jordan chain breaks at step {step}: {source}")]
    ChainBroken { step: usize, source: LinalgError },
    #[error("transition matrix residual {0:.3e} exceeds {RESIDUAL_TOL:e}")]
    Residual(f64),
    #[error("transition matrix is ill-conditioned (condition estimate {0:.3e})")]
    IllConditioned(f64),
    #[error("gamma {0} outside [0, 1) where eigenvectors are distinct")]
    GammaOutOfRange(f64),
    #[error(
        "cannot assign eigenvector of {value} to a block (max block weight {weight:.3}); nearest eigenvalue {nearest}"
    )]
    AmbiguousGrouping {
        value: ComplexScalar,
        nearest: ComplexScalar,
        weight: f64,
    },
    #[error("block {block} received {got} eigenvectors, expected {expected}")]
    GroupSize {
        block: usize,
        got: usize,
        expected: usize,
    },
}

/// Result of the EPN analysis of one admissible model.
#[derive(Debug, Clone)]
pub struct JordanReport {
    pub dimension: usize,
    /// Common eigenvalue at the EPN; fixed to zero by PT symmetry.
    pub eta: f64,
    pub geometric_multiplicity: usize,
    pub segre: Vec<usize>,
    pub transition_matrix: ComplexMatrix,
    pub residual: f64,
    pub condition_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Multiplicity {
    pub value: usize,
    /// Set when `||h^N||_F > tol ||h||_F^N`, i.e. the input does not look nilpotent.
    pub warning: Option<String>,
}

/// `||h^N||_F / ||h||_F^N`, zero for the zero matrix.
pub fn nilpotency_defect(h: &ComplexMatrix) -> Result<f64, EpnError> {
    h.require_square()?;
    let n = h.n_rows();
    let norm = h.frobenius_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    // normalise first so the power cannot overflow
    let unit = h.scale_real(1.0 / norm);
    Ok(unit.pow(n as u32)?.frobenius_norm())
}

/// `N - rank(h)`: number of Jordan blocks of a nilpotent matrix.
pub fn geometric_multiplicity(h: &ComplexMatrix, tol: f64) -> Result<Multiplicity, EpnError> {
    h.require_square()?;
    let rank = linalg::numerical_rank(h, tol)?;
    let defect = nilpotency_defect(h)?;
    let warning = (defect > tol)
        .then(|| format!("matrix does not look nilpotent: ||h^N|| / ||h||^N = {defect:.3e}"));
    Ok(Multiplicity {
        value: h.n_rows() - rank,
        warning,
    })
}

/// Ranks of `h^0, h^1, ...` up to the first zero (or `h^N`).
///
/// The rank of `h^j` counts singular values above `tol * sigma_max(h)^j`;
/// measuring against the power of the norm rather than `sigma_max(h^j)`
/// keeps rounding noise in a vanished power from reading as full rank.
pub fn rank_sequence(h: &ComplexMatrix, tol: f64) -> Result<Vec<usize>, EpnError> {
    h.require_square()?;
    linalg::numerical_rank(h, tol)?; // validates tol
    let n = h.n_rows();
    let smax = singular_values(h)?[0];
    let mut ranks = vec![n];
    if smax == 0.0 {
        ranks.push(0);
        return Ok(ranks);
    }
    let unit = h.scale_real(1.0 / smax);
    let mut power = ComplexMatrix::identity(n);
    for _ in 1..=n {
        power = power.matmul(&unit)?;
        let r = singular_values(&power)?
            .iter()
            .filter(|&&s| s > tol)
            .count();
        ranks.push(r);
        if r == 0 {
            break;
        }
    }
    Ok(ranks)
}

/// Jordan block sizes of a nilpotent matrix, nonincreasing.
pub fn segre_characteristic(h: &ComplexMatrix, tol: f64) -> Result<Vec<usize>, EpnError> {
    let ranks = rank_sequence(h, tol)?;
    segre_from_ranks(&ranks)
}

/// Blocks of size `>= j` number `r_{j-1} - r_j`.
pub fn segre_from_ranks(ranks: &[usize]) -> Result<Vec<usize>, EpnError> {
    if ranks.last() != Some(&0) {
        return Err(EpnError::NotNilpotent(ranks.to_vec()));
    }
    if ranks.windows(2).any(|w| w[1] > w[0]) {
        return Err(EpnError::RankSequence(ranks.to_vec()));
    }
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    if at_least.windows(2).any(|w| w[1] > w[0]) {
        return Err(EpnError::RankSequence(ranks.to_vec()));
    }
    let mut sizes = Vec::new();
    for (j, &count) in at_least.iter().enumerate().rev() {
        let larger = at_least.get(j + 1).copied().unwrap_or(0);
        sizes.extend(std::iter::repeat_n(j + 1, count - larger));
    }
    Ok(sizes)
}

/// `J^(M_1)(0) + ... + J^(M_K)(0)` with ones on the superdiagonal.
pub fn jordan_matrix(segre: &[usize]) -> ComplexMatrix {
    let blocks: Vec<ComplexMatrix> = segre
        .iter()
        .map(|&m| {
            let mut j = ComplexMatrix::zeros(m, m);
            for i in 0..m.saturating_sub(1) {
                j[(i, i + 1)] = ComplexScalar::new(1.0, 0.0);
            }
            j
        })
        .collect();
    ComplexMatrix::direct_sum(&blocks)
}

/// Jordan chain `v_1 .. v_M` of a nilpotent matrix with a single Jordan
/// block: `h v_1 = 0`, `h v_{j+1} = v_j`.
///
/// Each `v_{j+1}` is the minimum-norm solution; the chain is then rescaled
/// so the largest entry of `v_1` (first one on ties) equals exactly 1.
pub fn jordan_chain(h: &ComplexMatrix) -> Result<Vec<Vec<ComplexScalar>>, EpnError> {
    h.require_square()?;
    let n = h.n_rows();
    let dec = svd(h)?;
    let nullity = dec
        .s
        .iter()
        .filter(|&&s| s <= DEFAULT_RANK_TOL * dec.s[0])
        .count();
    if nullity != 1 {
        return Err(EpnError::NotSingleChain(nullity));
    }
    let mut chain = vec![dec.smallest_right_vector()];
    for step in 1..n {
        let rhs = ComplexMatrix::from_columns(&chain[step - 1..step])?;
        let next = solve(h, &rhs).map_err(|source| EpnError::ChainBroken { step, source })?;
        chain.push(next.column(0));
    }

    let v1 = &chain[0];
    let peak = v1.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v1
        .iter()
        .position(|z| z.norm() >= peak * (1.0 - PIVOT_TIE))
        .expect("kernel vector is nonzero");
    let factor = ComplexScalar::new(1.0, 0.0) / v1[pivot];
    for v in &mut chain {
        for z in v.iter_mut() {
            *z *= factor;
        }
    }
    chain[0][pivot] = ComplexScalar::new(1.0, 0.0);
    Ok(chain)
}

/// Transition matrix to Jordan form at the EPN, with residual and
/// invertibility checks.
pub fn transition_matrix(config: &ModelConfig) -> Result<JordanReport, EpnError> {
    let ham = direct_sum_hamiltonian(config, GAMMA_EPN, false)?;
    let mut block_q = Vec::with_capacity(config.blocks().len());
    for &spec in config.blocks() {
        let h = scaled_block(spec, GAMMA_EPN)?;
        let chain = jordan_chain(&h)?;
        block_q.push(ComplexMatrix::from_columns(&chain)?);
    }
    let q = ComplexMatrix::direct_sum(&block_q).permute_rows(&ham.permutation)?;
    let segre = config.partition();
    let jordan = jordan_matrix(&segre);

    let h = &ham.matrix;
    let scale = h.frobenius_norm() * q.frobenius_norm();
    let residual = h.matmul(&q)?.sub(&q.matmul(&jordan)?)?.frobenius_norm() / scale;
    if residual > RESIDUAL_TOL {
        return Err(EpnError::Residual(residual));
    }
    let s = singular_values(&q)?;
    let smin = *s.last().expect("nonempty");
    let condition_estimate = if smin == 0.0 {
        f64::INFINITY
    } else {
        s[0] / smin
    };
    if smin <= INVERTIBILITY_TOL * s[0] {
        return Err(EpnError::IllConditioned(condition_estimate));
    }
    Ok(JordanReport {
        dimension: config.dimension(),
        eta: 0.0,
        geometric_multiplicity: segre.len(),
        segre,
        transition_matrix: q,
        residual,
        condition_estimate,
    })
}

/// Right eigenpairs of a diagonalizable matrix; each vector has unit norm.
pub fn eigenpairs(h: &ComplexMatrix) -> Result<Vec<(ComplexScalar, Vec<ComplexScalar>)>, EpnError> {
    let mut values = linalg::eigenvalues(h)?;
    linalg::sort_spectrum(&mut values);
    values
        .into_iter()
        .map(|lambda| {
            let v = svd(&h.shifted(lambda)?)?.smallest_right_vector();
            let norm = vec_norm(&v);
            Ok((lambda, v.into_iter().map(|z| z / norm).collect()))
        })
        .collect()
}

/// Principal angle between the lines spanned by two vectors.
pub fn principal_angle(u: &[ComplexScalar], v: &[ComplexScalar]) -> f64 {
    let nu = vec_norm(u);
    let nv = vec_norm(v);
    let overlap = inner(u, v) / (nu * nv);
    // component of v/|v| orthogonal to u/|u|
    let perp: f64 = u
        .iter()
        .zip(v)
        .map(|(a, b)| (b / nv - a / nu * overlap).norm_sqr())
        .sum::<f64>()
        .sqrt();
    perp.atan2(overlap.norm())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoalescenceSample {
    pub gamma: f64,
    /// Largest pairwise principal angle among the eigenvectors of each block,
    /// in config block order.
    pub per_block_max_angle: Vec<f64>,
}

/// How far apart the eigenvectors inside each block are as `gamma -> 1`.
pub fn coalescence_profile(
    config: &ModelConfig,
    gammas: &[f64],
) -> Result<Vec<CoalescenceSample>, EpnError> {
    let membership = block_membership(config);
    let k = config.blocks().len();
    gammas
        .iter()
        .map(|&gamma| {
            if !(0.0..GAMMA_EPN).contains(&gamma) {
                return Err(EpnError::GammaOutOfRange(gamma));
            }
            let h = direct_sum_hamiltonian(config, gamma, false)?.matrix;
            let pairs = eigenpairs(&h)?;
            let mut groups: Vec<Vec<&Vec<ComplexScalar>>> = vec![Vec::new(); k];
            for (idx, (lambda, v)) in pairs.iter().enumerate() {
                let mut weight = vec![0.0; k];
                for (pos, z) in v.iter().enumerate() {
                    weight[membership[pos]] += z.norm_sqr();
                }
                let (block, &w) = weight
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .expect("at least one block");
                if w <= 0.5 {
                    let nearest = pairs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != idx)
                        .map(|(_, p)| p.0)
                        .min_by(|a, b| (a - lambda).norm().total_cmp(&(b - lambda).norm()))
                        .unwrap_or(*lambda);
                    return Err(EpnError::AmbiguousGrouping {
                        value: *lambda,
                        nearest,
                        weight: w,
                    });
                }
                groups[block].push(v);
            }
            let mut per_block_max_angle = Vec::with_capacity(k);
            for (b, (group, spec)) in groups.iter().zip(config.blocks()).enumerate() {
                if group.len() != spec.size() {
                    return Err(EpnError::GroupSize {
                        block: b,
                        got: group.len(),
                        expected: spec.size(),
                    });
                }
                let mut worst: f64 = 0.0;
                for i in 0..group.len() {
                    for j in i + 1..group.len() {
                        worst = worst.max(principal_angle(group[i], group[j]));
                    }
                }
                per_block_max_angle.push(worst);
            }
            Ok(CoalescenceSample {
                gamma,
                per_block_max_angle,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hubbard::{bh_block, model_matrix, BlockSpec};

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    fn cfg(n: usize, parts: &[usize], scales: &[u32]) -> ModelConfig {
        ModelConfig::from_parts(n, parts, scales).unwrap()
    }

    #[test]
    fn multiplicity_examples() {
        let m = geometric_multiplicity(&bh_block(6, 1.0).unwrap(), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(m.value, 1);
        assert!(m.warning.is_none());
        let h = model_matrix(&cfg(4, &[2, 2], &[1, 3]), 1.0).unwrap();
        assert_eq!(
            geometric_multiplicity(&h, DEFAULT_RANK_TOL).unwrap().value,
            2
        );
        let h = model_matrix(&cfg(6, &[2, 2, 2], &[1, 3, 5]), 1.0).unwrap();
        assert_eq!(
            geometric_multiplicity(&h, DEFAULT_RANK_TOL).unwrap().value,
            3
        );
    }

    #[test]
    fn non_nilpotent_input_gets_a_warning() {
        let m = geometric_multiplicity(&bh_block(4, 0.5).unwrap(), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(m.value, 0);
        assert!(m.warning.is_some());
    }

    #[test]
    fn segre_examples() {
        let h = bh_block(5, 1.0).unwrap();
        assert_eq!(
            rank_sequence(&h, DEFAULT_RANK_TOL).unwrap(),
            vec![5, 4, 3, 2, 1, 0]
        );
        assert_eq!(segre_characteristic(&h, DEFAULT_RANK_TOL).unwrap(), vec![5]);
        let h = model_matrix(&cfg(7, &[3, 2, 2], &[1, 4, 6]), 1.0).unwrap();
        assert_eq!(
            segre_characteristic(&h, DEFAULT_RANK_TOL).unwrap(),
            vec![3, 2, 2]
        );
        assert_eq!(
            segre_characteristic(&ComplexMatrix::zeros(3, 3), DEFAULT_RANK_TOL).unwrap(),
            vec![1, 1, 1]
        );
    }

    #[test]
    fn segre_rejects_broken_sequences() {
        assert!(matches!(
            segre_from_ranks(&[3, 2, 1]),
            Err(EpnError::NotNilpotent(_))
        ));
        assert!(matches!(
            segre_from_ranks(&[4, 2, 3, 0]),
            Err(EpnError::RankSequence(_))
        ));
        // drops 1 then 2: not a valid Jordan rank profile
        assert!(matches!(
            segre_from_ranks(&[4, 3, 1, 0]),
            Err(EpnError::RankSequence(_))
        ));
        assert_eq!(segre_from_ranks(&[7, 4, 1, 0]).unwrap(), vec![3, 2, 2]);
    }

    #[test]
    fn hand_transition_matrix_for_n2() {
        let h = bh_block(2, 1.0).unwrap();
        let q = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let j = jordan_matrix(&[2]);
        let defect = h
            .matmul(&q)
            .unwrap()
            .sub(&q.matmul(&j).unwrap())
            .unwrap()
            .frobenius_norm();
        assert!(defect < 1e-15);

        let report = transition_matrix(&cfg(2, &[2], &[1])).unwrap();
        assert_eq!(report.segre, vec![2]);
        assert!(report.residual < 1e-14);
        // v1 is proportional to (1, i) with the pivot entry fixed to 1
        let q = &report.transition_matrix;
        assert_eq!(q[(0, 0)], c(1.0, 0.0));
        assert!((q[(1, 0)] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn k2_report() {
        let r = transition_matrix(&cfg(4, &[2, 2], &[1, 3])).unwrap();
        assert_eq!(r.geometric_multiplicity, 2);
        assert_eq!(r.segre, vec![2, 2]);
        assert_eq!(r.eta, 0.0);
        assert!(r.residual <= RESIDUAL_TOL);
        for n in 2..9 {
            assert_eq!(
                transition_matrix(&ModelConfig::single_block(n).unwrap())
                    .unwrap()
                    .segre,
                vec![n]
            );
        }
    }

    #[test]
    fn chain_rejects_blocks_with_larger_kernel() {
        let h = model_matrix(&cfg(4, &[2, 2], &[1, 3]), 1.0).unwrap();
        assert!(matches!(jordan_chain(&h), Err(EpnError::NotSingleChain(2))));
    }

    #[test]
    fn chain_scaling_covariance() {
        for (m, scale) in [(2, 3), (3, 2), (4, 3), (5, 2)] {
            let base = jordan_chain(&bh_block(m, 1.0).unwrap()).unwrap();
            let h = scaled_block(BlockSpec::new(m, scale).unwrap(), 1.0).unwrap();
            let cs = f64::from(scale);
            let scaled: Vec<Vec<ComplexScalar>> = base
                .iter()
                .enumerate()
                .map(|(j, v)| v.iter().map(|z| z / cs.powi(j as i32 + 1)).collect())
                .collect();
            let tol = 1e-12 * h.frobenius_norm();
            assert!(vec_norm(&h.mul_vec(&scaled[0]).unwrap()) < tol);
            for j in 1..m {
                let hv = h.mul_vec(&scaled[j]).unwrap();
                let d: Vec<ComplexScalar> =
                    hv.iter().zip(&scaled[j - 1]).map(|(a, b)| a - b).collect();
                assert!(vec_norm(&d) < tol, "m={m} c={scale} j={j}");
            }
        }
    }

    #[test]
    fn angles() {
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let e2 = vec![c(0.0, 0.0), c(0.0, 2.0)];
        assert!((principal_angle(&e1, &e2) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let phased = vec![c(0.0, 3.0), c(0.0, 0.0)];
        assert!(principal_angle(&e1, &phased) < 1e-15);
    }

    #[test]
    fn coalescence_at_zero_is_orthogonal() {
        let prof = coalescence_profile(&cfg(4, &[2, 2], &[1, 3]), &[0.0]).unwrap();
        for a in &prof[0].per_block_max_angle {
            assert!(*a > 0.0 && (*a - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
        }
    }

    #[test]
    fn coalescence_single_block_shrinks() {
        let prof = coalescence_profile(&cfg(3, &[3], &[1]), &[0.5, 0.9, 0.99, 0.999]).unwrap();
        assert_eq!(prof[0].per_block_max_angle.len(), 1);
        for w in prof.windows(2) {
            assert!(w[1].per_block_max_angle[0] < w[0].per_block_max_angle[0]);
        }
        assert!(prof[3].per_block_max_angle[0] < 0.2);
    }

    #[test]
    fn coalescence_rejects_epn() {
        assert!(matches!(
            coalescence_profile(&cfg(2, &[2], &[1]), &[1.0]),
            Err(EpnError::GammaOutOfRange(_))
        ));
    }
}
