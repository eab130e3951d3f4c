//! Channels whose top level decays completely.

use serde::{Deserialize, Serialize};

use crate::capacity::coherent::{diagonal_coherent_information, max_diagonal_coherent_info};
use crate::channel::{Decay, TransitionMatrix, as_map, kraus_from_gamma};
use crate::error::{Error, Result};
use crate::kernel::{CMatrix, c};
use crate::maps::{KrausSet, LinearMap, unit};

const CD_TOL: f64 = 1e-12;

fn check_complete_damping(g: &TransitionMatrix) -> Result<usize> {
    let d = g.dim();
    if d < 2 {
        return Err(Error::ConditionViolated("dimension must be at least 2".into()));
    }
    let top = d - 1;
    if g.survival(top) > CD_TOL {
        return Err(Error::ConditionViolated(format!("top level survives with probability {}", g.survival(top))));
    }
    Ok(top)
}

/// The MAD on the lower `d−1` levels.
pub fn reduce_complete_damping(g: &TransitionMatrix) -> Result<TransitionMatrix> {
    let top = check_complete_damping(g)?;
    let decays: Vec<Decay> = g.decays().into_iter().filter(|x| x.from != top).collect();
    TransitionMatrix::from_decays(top, &decays)
}

/// Direct sum of the reduced channel on the lower block with the trivial
/// channel on the top level; coherences between the blocks are removed.
pub fn ds_channel(g: &TransitionMatrix) -> Result<KrausSet> {
    let reduced = reduce_complete_damping(g)?;
    let d = g.dim();
    let mut ops: Vec<CMatrix> = kraus_from_gamma(&reduced)
        .ops()
        .iter()
        .map(|k| {
            let mut big = CMatrix::zeros(d, d);
            big.view_mut((0, 0), (d - 1, d - 1)).copy_from(k);
            big
        })
        .collect();
    ops.push(unit(d, d - 1, d - 1));
    KrausSet::new(d, d, ops)
}

/// Keeps the lower block (diagonal included) and sends the top population to
/// level `i` with probability `γ_{d−1,i}`.
pub fn level_erasure(g: &TransitionMatrix) -> Result<KrausSet> {
    let top = check_complete_damping(g)?;
    let d = g.dim();
    let mut low = CMatrix::identity(d, d);
    low[(top, top)] = c(0.0);
    let mut ops = vec![low];
    for i in 0..top {
        let p = g.get(top, i);
        if p > 0.0 {
            ops.push(unit(d, i, top) * c(p.sqrt()));
        }
    }
    KrausSet::new(d, d, ops)
}

/// Checks `Φ_Γ = LE ∘ DS` on the matrix-unit basis at `1e-10`.
pub fn verify_cd_decomposition(g: &TransitionMatrix) -> Result<bool> {
    let composite = LinearMap::from(ds_channel(g)?).then(level_erasure(g)?)?;
    let direct = as_map(g);
    let d = g.dim();
    for i in 0..d {
        for j in 0..d {
            let e = unit(d, i, j);
            if (composite.apply(&e)? - direct.apply(&e)?).iter().any(|z| z.norm() > 1e-10) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Diagonal-maximum values bracketing a complete-damping channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompleteDampingBounds {
    /// Best diagonal input of the full channel supported on the lower levels.
    pub restricted: f64,
    /// Diagonal maximum of the reduced channel.
    pub reduced: f64,
    /// Diagonal maximum of the full channel, top level allowed.
    pub full: f64,
}

pub fn complete_damping_bounds(g: &TransitionMatrix) -> Result<CompleteDampingBounds> {
    let reduced_g = reduce_complete_damping(g)?;
    let (reduced, p) = max_diagonal_coherent_info(&reduced_g);
    let mut padded = p.as_slice().to_vec();
    padded.push(0.0);
    let restricted = diagonal_coherent_information(g, &padded);
    let (full, _) = max_diagonal_coherent_info(g);
    Ok(CompleteDampingBounds { restricted, reduced, full })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_adc_full_decay() {
        let g = TransitionMatrix::from_decays(2, &[Decay { from: 1, to: 0, p: 1.0 }]).unwrap();
        assert_eq!(reduce_complete_damping(&g).unwrap().dim(), 1);
        assert!(verify_cd_decomposition(&g).unwrap());
    }

    #[test]
    fn requires_complete_damping() {
        let g = TransitionMatrix::from_decays(2, &[Decay { from: 1, to: 0, p: 0.9 }]).unwrap();
        assert!(matches!(reduce_complete_damping(&g), Err(Error::ConditionViolated(_))));
        assert!(verify_cd_decomposition(&g).is_err());
    }

    #[test]
    fn three_level_composition() {
        let g = TransitionMatrix::from_decays(
            3,
            &[Decay { from: 2, to: 0, p: 0.5 }, Decay { from: 2, to: 1, p: 0.5 }, Decay { from: 1, to: 0, p: 0.2 }],
        )
        .unwrap();
        assert!(verify_cd_decomposition(&g).unwrap());
        let r = reduce_complete_damping(&g).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.get(1, 0), 0.2);
    }
}
