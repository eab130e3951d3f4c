//! The channel `Φ_L` with `Φ_L ∘ Φ_Γ1 = Φ_Γ2` between a point on the plane
//! `γ21 + 2γ20 = 1` and a point on the line `ω21 = 1 − k ω20` of a
//! three-level MAD with a shared `γ10`.

use crate::channel::{Decay, TransitionMatrix, as_map};
use crate::error::{Error, Result};
use crate::inverse::mad_inverse;
use crate::maps::LinearMap;
use crate::structure::choi::{ChoiMatrix, choi_unnormalized};

fn mad3(g10: f64, g20: f64, g21: f64) -> Result<TransitionMatrix> {
    TransitionMatrix::from_decays(
        3,
        &[Decay { from: 1, to: 0, p: g10 }, Decay { from: 2, to: 0, p: g20 }, Decay { from: 2, to: 1, p: g21 }],
    )
}

fn check_k(k: f64) -> Result<()> {
    if !(1.0..2.0).contains(&k) {
        return Err(Error::ConditionViolated(format!("k = {k} outside [1, 2)")));
    }
    Ok(())
}

/// `Φ_Γ2 ∘ Φ_Γ1^{-1}` with `Γ1 = (γ10, (1−γ21)/2, γ21)` and
/// `Γ2 = (γ10, (1−ω21)/k, ω21)`.
pub fn connecting_map(g10: f64, g21: f64, w21: f64, k: f64) -> Result<LinearMap> {
    check_k(k)?;
    if g21 >= 1.0 {
        return Err(Error::SingularInverse { levels: vec![2] });
    }
    let g1 = mad3(g10, (1.0 - g21) / 2.0, g21)?;
    let g2 = mad3(g10, (1.0 - w21) / k, w21)?;
    mad_inverse(&g1)?.then(as_map(&g2))
}

/// Unnormalised Choi matrix of the connecting map. It does not depend on the
/// shared `γ10`, which is set to zero here.
pub fn connecting_choi(g21: f64, w21: f64, k: f64) -> Result<ChoiMatrix> {
    Ok(choi_unnormalized(&connecting_map(0.0, g21, w21, k)?))
}

/// The three eigenvalues that can be nonzero, in the order
/// `Φ_L(|2⟩⟨2|)_00`, `Φ_L(|2⟩⟨2|)_11`, and the rank-one block eigenvalue.
pub fn connecting_eigenvalues(g21: f64, w21: f64, k: f64) -> [f64; 3] {
    let den = k * (1.0 - g21);
    [
        (2.0 * (1.0 - w21) - den) / den,
        2.0 * (w21 - g21) / (1.0 - g21),
        (2.0 * k * (2.0 - g21 - w21) - 2.0 * (1.0 - w21)) / den,
    ]
}

/// Upper end of the CP range, `ω21 ≤ 1 − k(1 − γ21)/2`.
pub fn connecting_upper_bound(g21: f64, k: f64) -> f64 {
    1.0 - k * (1.0 - g21) / 2.0
}
