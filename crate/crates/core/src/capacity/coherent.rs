use serde::{Deserialize, Serialize};

use crate::channel::{Decay, TransitionMatrix, apply};
use crate::environment::complementary;
use crate::error::{Error, Result};
use crate::kernel::{DensityMatrix, entropy_bits, von_neumann_entropy};

/// Default coarse grid spacing on the simplex.
pub const GRID_STEP: f64 = 0.02;
const GOLDEN_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalDistribution(Vec<f64>);

impl DiagonalDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|&x| x.is_nan() || x < -1e-12) {
            return Err(Error::InvalidState("negative population".into()));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("populations sum to {s}")));
        }
        Ok(Self(p.into_iter().map(|x| x.max(0.0)).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `S(Φ(ρ)) − S(Φ̃(ρ))` in bits.
pub fn coherent_information(g: &TransitionMatrix, rho: &DensityMatrix) -> Result<f64> {
    let out = apply(g, rho)?;
    let env = complementary(g, rho)?;
    Ok(von_neumann_entropy(&out) - von_neumann_entropy(&env))
}

/// Coherent information of the diagonal input `diag(p)`. Both outputs are
/// diagonal, so only classical entropies are needed.
pub fn diagonal_coherent_information(g: &TransitionMatrix, p: &[f64]) -> f64 {
    let d = g.dim();
    let mut h_out = 0.0;
    let mut h_env = 0.0;
    let mut e00 = 0.0;
    for (i, &pi) in p.iter().enumerate().take(d) {
        let mut q = g.survival(i) * pi;
        for (j, &pj) in p.iter().enumerate().take(d).skip(i + 1) {
            let w = g.get(j, i) * pj;
            q += w;
            h_env += entropy_bits([w]);
        }
        h_out += entropy_bits([q]);
        e00 += g.survival(i) * pi;
    }
    h_out - h_env - entropy_bits([e00])
}

fn compositions(parts: usize, total: usize, prefix: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if parts == 1 {
        prefix.push(total);
        visit(prefix);
        prefix.pop();
        return;
    }
    for k in 0..=total {
        prefix.push(k);
        compositions(parts - 1, total - k, prefix, visit);
        prefix.pop();
    }
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > GOLDEN_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 { (x1, f1) } else { (x2, f2) }
}

/// Maximum of the diagonal coherent information: a grid search with the
/// given spacing followed by pairwise mass-transfer golden-section refinement.
pub fn max_diagonal_coherent_info_with(g: &TransitionMatrix, step: f64) -> (f64, DiagonalDistribution) {
    let d = g.dim();
    if d == 1 {
        return (0.0, DiagonalDistribution(vec![1.0]));
    }
    let n = (1.0 / step).round().max(1.0) as usize;
    let mut best = (f64::NEG_INFINITY, vec![0.0; d]);
    let mut p = vec![0.0; d];
    compositions(d, n, &mut Vec::with_capacity(d), &mut |c| {
        for (x, &k) in p.iter_mut().zip(c) {
            *x = k as f64 / n as f64;
        }
        let v = diagonal_coherent_information(g, &p);
        if v > best.0 {
            best = (v, p.clone());
        }
    });
    let (mut val, mut p) = best;
    for _ in 0..MAX_SWEEPS {
        let start = val;
        for i in 0..d {
            for j in i + 1..d {
                let (lo, hi) = (-p[i], p[j]);
                if hi - lo <= 0.0 {
                    continue;
                }
                let base = p.clone();
                let f = |t: f64| {
                    let mut q = base.clone();
                    q[i] = (base[i] + t).max(0.0);
                    q[j] = (base[j] - t).max(0.0);
                    diagonal_coherent_information(g, &q)
                };
                let (t, v) = golden_max(&f, lo, hi);
                if v > val {
                    val = v;
                    p[i] = (base[i] + t).max(0.0);
                    p[j] = (base[j] - t).max(0.0);
                }
            }
        }
        if val - start < 1e-14 {
            break;
        }
    }
    let s: f64 = p.iter().sum();
    let p = p.into_iter().map(|x| x / s).collect();
    (val, DiagonalDistribution(p))
}

pub fn max_diagonal_coherent_info(g: &TransitionMatrix) -> (f64, DiagonalDistribution) {
    max_diagonal_coherent_info_with(g, GRID_STEP)
}

/// Quantum capacity of the qubit amplitude damping channel.
pub fn adc_capacity(gamma: f64) -> f64 {
    if gamma >= 0.5 {
        return 0.0;
    }
    let g = TransitionMatrix::from_decays(2, &[Decay { from: 1, to: 0, p: gamma.max(0.0) }])
        .expect("probability in [0, 1/2)");
    max_diagonal_coherent_info(&g).0.max(0.0)
}
