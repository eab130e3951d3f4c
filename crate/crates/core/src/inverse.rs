//! Inverse maps of amplitude damping channels. They are linear and trace
//! preserving but in general not completely positive.

use crate::channel::{TransitionMatrix, decompose_single_decays};
use crate::error::{Error, Result};
use crate::kernel::{CMatrix, c};
use crate::maps::{LinearMap, PseudoKrausMap, Sign};

/// Survival probability below which the inverse is considered ill-conditioned.
pub const CONDITION_WARN: f64 = 1e-6;

/// Inverse of the decay `k → n` with the given amplitude, in dimension `d`.
pub fn single_decay_inverse(k: usize, n: usize, amplitude: f64, d: usize) -> Result<PseudoKrausMap> {
    for x in [k, n] {
        if x >= d {
            return Err(Error::IndexOutOfRange { index: x, dim: d });
        }
    }
    if n >= k {
        return Err(Error::InvalidTransitionMatrix(format!("decay {k}->{n} does not go to a lower level")));
    }
    if !(0.0..1.0).contains(&amplitude) {
        return Err(Error::SingularInverse { levels: vec![k] });
    }
    let mut k0 = CMatrix::identity(d, d);
    k0[(k, k)] = c((1.0 - amplitude).sqrt().recip());
    let mut k1 = CMatrix::zeros(d, d);
    k1[(n, k)] = c((amplitude / (1.0 - amplitude)).sqrt());
    PseudoKrausMap::new(d, d, vec![(Sign::Plus, k0), (Sign::Minus, k1)])
}

pub fn adc_inverse(gamma: f64) -> Result<PseudoKrausMap> {
    single_decay_inverse(1, 0, gamma, 2)
}

/// `Φ_Γ^{-1}`: the single-decay inverses applied in the reverse order of the
/// single-decay decomposition.
pub fn mad_inverse(g: &TransitionMatrix) -> Result<LinearMap> {
    let d = g.dim();
    let singular: Vec<usize> = (0..d).filter(|&k| g.survival(k) <= 0.0).collect();
    if !singular.is_empty() {
        return Err(Error::SingularInverse { levels: singular });
    }
    let weak: Vec<usize> = (0..d).filter(|&k| g.survival(k) < CONDITION_WARN).collect();
    if !weak.is_empty() {
        log::warn!("inverse is ill-conditioned: levels {weak:?} have survival below {CONDITION_WARN:e}");
    }
    let mut map = LinearMap::identity(d);
    for f in decompose_single_decays(g)?.iter().rev() {
        map = map.then(single_decay_inverse(f.from, f.to, f.amplitude, d)?)?;
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Decay, as_map};
    use crate::kernel::C64;
    use crate::maps::unit;

    #[test]
    fn zero_amplitude_is_identity() {
        let m = adc_inverse(0.0).unwrap();
        let x = CMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 + 1.0, j as f64));
        assert!((m.apply(&x).unwrap() - x).norm() < 1e-15);
    }

    #[test]
    fn adc_inverse_example() {
        let m = adc_inverse(0.5).unwrap();
        let theta = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.2), c(0.2), c(0.5)]);
        let out = m.apply(&theta).unwrap();
        let s = 0.2 * 2f64.sqrt();
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0), c(s), c(s), c(1.0)]);
        assert!((out - expected).norm() < 1e-15);
        assert!(m.is_trace_preserving(1e-14));
    }

    #[test]
    fn singular_rejected() {
        assert!(matches!(adc_inverse(1.0), Err(Error::SingularInverse { .. })));
        let g = TransitionMatrix::from_decays(3, &[Decay { from: 2, to: 0, p: 1.0 }]).unwrap();
        assert_eq!(mad_inverse(&g).unwrap_err(), Error::SingularInverse { levels: vec![2] });
    }

    #[test]
    fn mad_round_trip() {
        let g = TransitionMatrix::from_decays(
            3,
            &[Decay { from: 1, to: 0, p: 0.3 }, Decay { from: 2, to: 0, p: 0.2 }, Decay { from: 2, to: 1, p: 0.4 }],
        )
        .unwrap();
        let inv = mad_inverse(&g).unwrap();
        let left = as_map(&g).then(inv.clone()).unwrap();
        let right = inv.then(as_map(&g)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let e = unit(3, i, j);
                assert!((left.apply(&e).unwrap() - &e).norm() < 1e-12);
                assert!((right.apply(&e).unwrap() - &e).norm() < 1e-12);
            }
        }
    }
}
