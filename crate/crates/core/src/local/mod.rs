//! Congruence structure modulo `W` and prime powers: power residues,
//! multiplicities `σ(b)`, sumset coverage, Waring pairs and the weighted
//! local decomposition.

mod decompose;
mod residues;
mod waring;

pub use decompose::{
    local_decompose, weights_on_z, DecomposeOutcome, LocalDecomposition, LocalDp, Weight, DEFAULT_DP_CAP,
};
pub use residues::{lemma43_count, lemma43_count_with_cap, sigma_b, PowerResidueTable, DEFAULT_ENUM_CAP};
pub use waring::{
    structured_families, sumset_cover_check, waring_pair_check, waring_pair_check_with_budget, CoverCheck,
    CoverContext, Strategy, Verdict, WaringPairReport, Witness, DEFAULT_EXHAUSTIVE_BUDGET,
};
