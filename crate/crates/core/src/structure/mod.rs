//! Choi matrices and structural classification of MAD channels.

pub mod choi;
pub mod connecting;
pub mod degradability;
pub mod extension;
pub mod monotonicity;

pub use choi::{ChoiMatrix, choi_of};
pub use connecting::{connecting_choi, connecting_eigenvalues, connecting_map};
pub use degradability::{
    ClassificationResult, DegradabilityStatus, DegradabilityVerdict, classify, degrading_choi, degrading_map,
    is_degradable, is_degradable_strict,
};
pub use extension::{TwoExtension, build_two_extension, capacity_positive_witness, is_antidegradable, log2_f};
pub use monotonicity::{MonotonicityCertificate, Side, monotonicity_certificate};
