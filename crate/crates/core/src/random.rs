//! Seeded random instances for tests and sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::channel::{Decay, TransitionMatrix};
use crate::kernel::{C64, CMatrix, DensityMatrix};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the probability simplex of dimension `n` (normalised
/// exponential draws, i.e. a flat Dirichlet distribution).
pub fn simplex_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Each row `(γ_j0, …, γ_jj)` drawn from a uniform Dirichlet distribution.
pub fn transition_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> TransitionMatrix {
    transition_matrix_with_survival(rng, d, 0.0)
}

/// As [`transition_matrix`], with every survival probability at least `min_survival`.
pub fn transition_matrix_with_survival<R: Rng + ?Sized>(rng: &mut R, d: usize, min_survival: f64) -> TransitionMatrix {
    let mut decays = Vec::new();
    for j in 1..d {
        let row = simplex_point(rng, j + 1);
        for (i, &w) in row.iter().take(j).enumerate() {
            decays.push(Decay { from: j, to: i, p: w * (1.0 - min_survival) });
        }
    }
    TransitionMatrix::from_decays(d, &decays).expect("rows sum to one")
}

/// Single-level transition matrix for level `k` with random decays.
pub fn single_level<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> TransitionMatrix {
    let row = simplex_point(rng, k + 1);
    let decays: Vec<Decay> = (0..k).map(|i| Decay { from: k, to: i, p: row[i] }).collect();
    TransitionMatrix::from_decays(d, &decays).expect("row sums to one")
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// `G G† / tr(G G†)` with a square Ginibre matrix `G`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    let g = ginibre(rng, d, d);
    let m = &g * g.adjoint();
    let t = m.trace();
    let mut m = m / t;
    m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::new(m).expect("Ginibre states are valid")
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let g = ginibre(rng, d, d);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = transition_matrix(&mut seeded(7), 4);
        let b = transition_matrix(&mut seeded(7), 4);
        assert_eq!(a, b);
    }

    #[test]
    fn survival_floor() {
        let mut rng = seeded(1);
        for _ in 0..50 {
            let g = transition_matrix_with_survival(&mut rng, 5, 0.2);
            assert!((0..5).all(|k| g.survival(k) >= 0.2 - 1e-15));
        }
    }

    #[test]
    fn states_are_normalised() {
        let rho = density_matrix(&mut seeded(3), 4);
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
    }
}
