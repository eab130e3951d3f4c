//! Multi-level amplitude damping (MAD) channels: construction, structural
//! classification and single-letter quantum capacity certificates.

pub mod capacity;
pub mod channel;
pub mod environment;
pub mod error;
pub mod inverse;
pub mod kernel;
pub mod maps;
pub mod random;
pub mod structure;

pub use capacity::{
    CapacityCertificate, CertificateKind, CertifyOptions, adc_capacity, certify_capacity, certify_with,
    max_diagonal_coherent_info,
};
pub use channel::{ChannelSpec, Decay, TransitionMatrix};
pub use error::{Error, Result};
pub use kernel::{C64, CMatrix, DensityMatrix};
pub use maps::{KrausSet, LinearMap, PseudoKrausMap, Sign};
