//! Complementary channel to the environment.

use crate::channel::{TransitionMatrix, kraus_from_gamma};
use crate::error::{Error, Result};
use crate::kernel::{C64, CMatrix, DensityMatrix, c};
use crate::maps::{KrausSet, LinearMap};

/// Environment basis: `|0,0⟩` first, then `|i,j⟩` for `i < j`, ordered by
/// `j` and then by `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvBasisIndex {
    dim: usize,
    labels: Vec<(usize, usize)>,
}

impl EnvBasisIndex {
    pub fn new(dim: usize) -> Self {
        let mut labels = vec![(0, 0)];
        for j in 1..dim {
            for i in 0..j {
                labels.push((i, j));
            }
        }
        Self { dim, labels }
    }

    pub fn system_dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    /// Flat index of `|i,j⟩` with `i < j`.
    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        if i >= j || j >= self.dim {
            return None;
        }
        Some(1 + j * (j - 1) / 2 + i)
    }
}

pub fn env_dim(d: usize) -> usize {
    1 + d * (d - 1) / 2
}

/// Closed-form environment output on an arbitrary `d×d` matrix.
pub fn complementary_matrix(g: &TransitionMatrix, rho: &CMatrix) -> Result<CMatrix> {
    let d = g.dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: rho.nrows() });
    }
    let idx = EnvBasisIndex::new(d);
    let mut out = CMatrix::zeros(idx.len(), idx.len());
    out[(0, 0)] = (0..d).map(|j| rho[(j, j)] * g.survival(j)).sum::<C64>();
    for (a, &(i, j)) in idx.labels().iter().enumerate().skip(1) {
        let v = rho[(i, j)] * (g.survival(i) * g.get(j, i)).sqrt();
        out[(0, a)] = v;
        out[(a, 0)] = v.conj();
        for (b, &(m, n)) in idx.labels().iter().enumerate().skip(1) {
            if i == m {
                out[(a, b)] = rho[(j, n)] * (g.get(j, i) * g.get(n, i)).sqrt();
            }
        }
    }
    Ok(out)
}

pub fn complementary(g: &TransitionMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(complementary_matrix(g, rho.matrix())?)
}

/// Kraus operators `R_b = Σ_α |α⟩⟨b| K_α` of the complementary map, one per
/// output level `b`, with `K_α` labelled by the environment basis.
pub fn complementary_kraus(g: &TransitionMatrix) -> KrausSet {
    let d = g.dim();
    let idx = EnvBasisIndex::new(d);
    let kraus = kraus_from_gamma(g);
    let k00 = &kraus.ops()[0];
    let mut ops = Vec::with_capacity(d);
    for b in 0..d {
        let mut r = CMatrix::zeros(idx.len(), d);
        for col in 0..d {
            r[(0, col)] = k00[(b, col)];
        }
        // K_ij = √γ_ji |i⟩⟨j| has a single nonzero entry in row i.
        for j in 1..d {
            let p = g.get(j, b);
            if b < j && p > 0.0 {
                let a = idx.index_of(b, j).expect("i < j");
                r[(a, j)] = c(p.sqrt());
            }
        }
        ops.push(r);
    }
    KrausSet::new(d, idx.len(), ops).expect("shapes built above")
}

pub fn complementary_as_map(g: &TransitionMatrix) -> LinearMap {
    complementary_kraus(g).into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Decay;
    use crate::kernel::von_neumann_entropy;

    #[test]
    fn basis_ordering() {
        let idx = EnvBasisIndex::new(4);
        assert_eq!(idx.len(), 7);
        assert_eq!(idx.labels(), &[(0, 0), (0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]);
        for (a, &(i, j)) in idx.labels().iter().enumerate().skip(1) {
            assert_eq!(idx.index_of(i, j), Some(a));
        }
        assert_eq!(idx.index_of(2, 2), None);
    }

    #[test]
    fn identity_leaks_nothing() {
        let g = TransitionMatrix::identity(3);
        let rho = DensityMatrix::maximally_mixed(3);
        let e = complementary(&g, &rho).unwrap();
        assert!((e.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(von_neumann_entropy(&e).abs() < 1e-12);
    }

    #[test]
    fn full_decay_goes_to_pair() {
        let g = TransitionMatrix::from_decays(2, &[Decay { from: 1, to: 0, p: 1.0 }]).unwrap();
        let e = complementary(&g, &DensityMatrix::basis(2, 1).unwrap()).unwrap();
        assert!((e.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn half_damping_mixed_input() {
        let g = TransitionMatrix::from_decays(2, &[Decay { from: 1, to: 0, p: 0.5 }]).unwrap();
        let e = complementary(&g, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((e.matrix()[(0, 0)].re - 0.75).abs() < 1e-15);
        assert!((e.matrix()[(1, 1)].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn kraus_matches_closed_form() {
        let g = TransitionMatrix::from_decays(
            3,
            &[Decay { from: 1, to: 0, p: 0.3 }, Decay { from: 2, to: 0, p: 0.2 }, Decay { from: 2, to: 1, p: 0.4 }],
        )
        .unwrap();
        let rho = CMatrix::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.05));
        let rho = &rho + rho.adjoint();
        let a = complementary_matrix(&g, &rho).unwrap();
        let b = complementary_kraus(&g).apply(&rho).unwrap();
        assert!((a - b).norm() < 1e-14);
        assert!(complementary_kraus(&g).is_trace_preserving(1e-14));
    }
}
