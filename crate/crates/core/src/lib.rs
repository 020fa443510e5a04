//! PT-symmetric Bose-Hubbard Hamiltonians with exceptional points of
//! arbitrary geometric multiplicity.
//!
//! - [`linalg`]: dense complex kernel (eigenvalues, SVD, rank, solves).
//! - [`hubbard`]: Bose-Hubbard blocks, the Fock-space construction, rescaled
//!   direct sums in canonical basis order.
//! - [`classify`]: partitions, admissibility, exhaustive model enumeration,
//!   index notation.
//! - [`epn`]: Jordan structure and transition matrices at `gamma = 1`,
//!   eigenvector coalescence below it.
//! - [`cli`]: the `ptbh` command-line surface.

pub mod classify;
pub mod cli;
pub mod epn;
pub mod hubbard;
pub mod linalg;

pub use classify::{
    block_index_set, count_models, count_partitions, enumerate_models, is_admissible,
    partitions_min2, render_index_notation, IndexSet, Partition,
};
pub use epn::{
    coalescence_profile, geometric_multiplicity, segre_characteristic, transition_matrix,
    JordanReport,
};
pub use hubbard::{
    bh_block, closed_form_spectrum, direct_sum_hamiltonian, fock_block, parity_matrix,
    scaled_block, symmetry_report, BlockSpec, ModelConfig,
};
pub use linalg::{ComplexMatrix, ComplexScalar};
