//! Energy-jump structure extraction, the dichotomy drivers built on it and
//! the density-regularization loop.

mod corollary;
pub mod f2;
mod params;
mod pipeline;
mod regularize;
mod search;

pub use corollary::{certify_difference_subset, coset_decomposition, dichotomy_m};
pub use params::{check_hypotheses, derive_params, HypothesisReport, PairStats, ParamOverrides, StructureParams};
pub use pipeline::{
    extract, extract_bohr, extract_bohr_unchecked, extract_subspace, extract_subspace_unchecked,
    find_energy_jump, phi_k, spectral_stage, BohrPiece, CosetDecomposition, EnergyJump, ExtractMode,
    InclusionReport, PhiTable, Piece, SpectralStage, StructureResult, SubspacePiece, C_LOCAL_RETRIES,
};
pub use regularize::{
    regularize_density, RegularizationBranch, RegularizationStep, RegularizationTrace, REGULARIZE_MAX_RANK,
};
pub use search::{brute_force_3b_subspace, SubspaceWitness, DEFAULT_NODE_CAP, SEARCH_MAX_RANK};
