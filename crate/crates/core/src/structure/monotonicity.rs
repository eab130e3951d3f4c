use serde::{Deserialize, Serialize};

use crate::channel::{TransitionMatrix, as_map};
use crate::error::{Error, Result};
use crate::inverse::mad_inverse;
use crate::structure::choi::choi_of;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `Λ_L = Φ_Γ′ ∘ Φ_Γ^{-1}`, a post-processing of `Φ_Γ`.
    Left,
    /// `Λ_R = Φ_Γ^{-1} ∘ Φ_Γ′`, a pre-processing of `Φ_Γ`.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCertificate {
    pub side: Side,
    pub cp: bool,
    pub min_eig: f64,
    /// The entry `(j, i)` in which the two matrices differ, if any.
    pub entry: Option<(usize, usize)>,
}

fn differing_entry(g: &TransitionMatrix, h: &TransitionMatrix) -> Result<Option<(usize, usize)>> {
    if g.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: h.dim() });
    }
    let d = g.dim();
    let mut found = None;
    for j in 1..d {
        for i in 0..j {
            let (a, b) = (g.get(j, i), h.get(j, i));
            if a != b {
                if found.is_some() {
                    return Err(Error::NotComparable("matrices differ in more than one decay".into()));
                }
                if b < a {
                    return Err(Error::NotComparable(format!("decay {j}->{i} decreases")));
                }
                found = Some((j, i));
            }
        }
    }
    Ok(found)
}

/// Checks whether `Φ_Γ′` is obtained from `Φ_Γ` by a channel on the given
/// side; if so `Q(Φ_Γ′) ≤ Q(Φ_Γ)`.
pub fn monotonicity_certificate(
    g: &TransitionMatrix,
    g_more: &TransitionMatrix,
    side: Side,
    tol: f64,
) -> Result<MonotonicityCertificate> {
    let entry = differing_entry(g, g_more)?;
    let inv = mad_inverse(g)?;
    let map = match side {
        Side::Left => inv.then(as_map(g_more))?,
        Side::Right => as_map(g_more).then(inv)?,
    };
    let choi = choi_of(&map);
    let min_eig = choi.min_eigenvalue()?;
    let cp = min_eig >= -tol * choi.scale();
    Ok(MonotonicityCertificate { side, cp, min_eig, entry })
}

/// Entries whose increase is a composition with a MAD channel on one side,
/// and therefore always decreases the capacity: every decay out of the top
/// level and the decay `1 → 0`.
pub fn always_monotone(d: usize, j: usize, i: usize) -> bool {
    i < j && (j + 1 == d || (j, i) == (1, 0))
}
