use serde::{Deserialize, Serialize};

use crate::channel::{TransitionMatrix, has_ladder_structure};
use crate::environment::complementary_as_map;
use crate::error::Result;
use crate::inverse::mad_inverse;
use crate::maps::LinearMap;
use crate::structure::choi::{ChoiMatrix, choi_of};
use crate::structure::extension::is_antidegradable;

/// Relative width of the band around zero reported as `Boundary`.
pub const BOUNDARY_BAND: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegradabilityStatus {
    Degradable,
    /// Smallest Choi eigenvalue is slightly negative, inside the boundary band.
    Boundary,
    NotDegradable,
    /// Some level has zero survival; no degrading map can be built.
    Unknown,
}

impl DegradabilityStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DegradabilityStatus::Degradable => "1",
            DegradabilityStatus::Boundary => "boundary",
            DegradabilityStatus::NotDegradable => "0",
            DegradabilityStatus::Unknown => "unknown",
        }
    }

    pub fn is_degradable_or_boundary(self) -> bool {
        matches!(self, DegradabilityStatus::Degradable | DegradabilityStatus::Boundary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradabilityVerdict {
    pub status: DegradabilityStatus,
    /// Smallest eigenvalue of the normalised Choi matrix of the degrading map.
    pub min_eig: Option<f64>,
}

/// `Λ_Γ = Φ̃_Γ ∘ Φ_Γ^{-1}`.
pub fn degrading_map(g: &TransitionMatrix) -> Result<LinearMap> {
    mad_inverse(g)?.then(complementary_as_map(g))
}

pub fn degrading_choi(g: &TransitionMatrix) -> Result<ChoiMatrix> {
    Ok(choi_of(&degrading_map(g)?))
}

/// Degradable if the smallest Choi eigenvalue is at least `-tol·s`, boundary
/// down to `-max(tol, BOUNDARY_BAND)·s`, with `s = max(1, ‖C‖∞)`.
pub fn is_degradable(g: &TransitionMatrix, tol: f64) -> DegradabilityVerdict {
    let Ok(choi) = degrading_choi(g) else {
        return DegradabilityVerdict { status: DegradabilityStatus::Unknown, min_eig: None };
    };
    let min = match choi.min_eigenvalue() {
        Ok(v) => v,
        Err(_) => return DegradabilityVerdict { status: DegradabilityStatus::Unknown, min_eig: None },
    };
    let s = choi.scale();
    let status = if min >= -tol * s {
        DegradabilityStatus::Degradable
    } else if min >= -tol.max(BOUNDARY_BAND) * s {
        DegradabilityStatus::Boundary
    } else {
        DegradabilityStatus::NotDegradable
    };
    DegradabilityVerdict { status, min_eig: Some(min) }
}

/// Eigenvalue-free yes/no test used inside bisections; `false` when the
/// degrading map does not exist.
pub fn is_degradable_strict(g: &TransitionMatrix, tol: f64) -> bool {
    match degrading_choi(g) {
        Ok(choi) => choi.is_psd(tol).unwrap_or(false),
        Err(_) => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub degradable: DegradabilityStatus,
    pub antidegradable: bool,
    pub min_eig: Option<f64>,
    pub ladder: bool,
}

pub fn classify(g: &TransitionMatrix, tol: f64) -> ClassificationResult {
    let v = is_degradable(g, tol);
    ClassificationResult {
        degradable: v.status,
        antidegradable: is_antidegradable(g),
        min_eig: v.min_eig,
        ladder: has_ladder_structure(g),
    }
}
