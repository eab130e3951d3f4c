//! Coherent information, diagonal maximisation and capacity certificates.

pub mod certificate;
pub mod coherent;
pub mod mad3;
pub mod reduction;

pub use certificate::{CapacityCertificate, CertificateKind, CertifyOptions, certify_capacity, certify_with};
pub use coherent::{
    DiagonalDistribution, adc_capacity, coherent_information, diagonal_coherent_information,
    max_diagonal_coherent_info, max_diagonal_coherent_info_with,
};
pub use mad3::{Mad3Options, Mad3Report, mad3_acge_verification};
pub use reduction::{
    CompleteDampingBounds, complete_damping_bounds, ds_channel, level_erasure, reduce_complete_damping,
    verify_cd_decomposition,
};
