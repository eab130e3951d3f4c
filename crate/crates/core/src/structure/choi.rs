use crate::error::{Error, Result};
use crate::kernel::{C64, CMatrix, hermitian_eigenvalues, is_psd, norm_inf, partial_trace};
use crate::maps::{LinearMap, unit};

/// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, input factor first, optionally
/// divided by the input dimension.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    d_in: usize,
    d_out: usize,
    matrix: CMatrix,
    normalized: bool,
}

pub fn choi_of(map: &LinearMap) -> ChoiMatrix {
    let mut c = choi_unnormalized(map);
    c.matrix /= C64::new(c.d_in as f64, 0.0);
    c.normalized = true;
    c
}

pub fn choi_unnormalized(map: &LinearMap) -> ChoiMatrix {
    let (din, dout) = (map.d_in(), map.d_out());
    let mut m = CMatrix::zeros(din * dout, din * dout);
    for i in 0..din {
        for j in 0..din {
            let out = map.apply(&unit(din, i, j)).expect("dimensions fixed at construction");
            m.view_mut((i * dout, j * dout), (dout, dout)).copy_from(&out);
        }
    }
    ChoiMatrix { d_in: din, d_out: dout, matrix: m, normalized: false }
}

impl ChoiMatrix {
    pub fn from_matrix(d_in: usize, d_out: usize, matrix: CMatrix, normalized: bool) -> Result<Self> {
        if matrix.nrows() != d_in * d_out || matrix.ncols() != d_in * d_out {
            return Err(Error::DimensionMismatch { expected: d_in * d_out, got: matrix.nrows() });
        }
        Ok(Self { d_in, d_out, matrix, normalized })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// PSD at relative tolerance `tol`, decided by a shifted Cholesky factorisation.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        is_psd(&self.matrix, tol)
    }

    pub fn scale(&self) -> f64 {
        norm_inf(&self.matrix).max(1.0)
    }

    /// `tr_out C`; equals `I/d_in` for a normalised trace-preserving map.
    pub fn input_marginal(&self) -> CMatrix {
        partial_trace(&self.matrix, &[self.d_in, self.d_out], &[1]).expect("dims match")
    }

    /// Recovers the map: `Φ(X)_ab = s Σ_ij X_ij C_(i,a),(j,b)` with `s = d_in`
    /// for the normalised convention.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let (din, dout) = (self.d_in, self.d_out);
        if x.nrows() != din || x.ncols() != din {
            return Err(Error::DimensionMismatch { expected: din, got: x.nrows() });
        }
        let s = if self.normalized { din as f64 } else { 1.0 };
        let mut out = CMatrix::zeros(dout, dout);
        for i in 0..din {
            for j in 0..din {
                if x[(i, j)] != C64::new(0.0, 0.0) {
                    out += self.matrix.view((i * dout, j * dout), (dout, dout)) * x[(i, j)];
                }
            }
        }
        Ok(out * C64::new(s, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::c;
    use crate::maps::KrausSet;

    #[test]
    fn identity_choi_is_maximally_entangled() {
        let ch = choi_of(&LinearMap::identity(2));
        let ev = ch.eigenvalues().unwrap();
        assert!((ev[3] - 1.0).abs() < 1e-14);
        assert!(ev[..3].iter().all(|e| e.abs() < 1e-14));
    }

    #[test]
    fn depolarizing_choi() {
        // Completely depolarising qubit map: Kraus ops |a⟩⟨b|/√2.
        let ops = (0..4).map(|k| unit(2, k / 2, k % 2) * c(0.5f64.sqrt())).collect();
        let map: LinearMap = KrausSet::new(2, 2, ops).unwrap().into();
        let ch = choi_of(&map);
        assert!((ch.matrix() - CMatrix::identity(4, 4) * c(0.25)).norm() < 1e-14);
    }

    #[test]
    fn recovers_map() {
        let ops = vec![CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.8)]), unit(2, 0, 1) * c(0.6)];
        let map: LinearMap = KrausSet::new(2, 2, ops).unwrap().into();
        let ch = choi_of(&map);
        let x = CMatrix::from_row_slice(2, 2, &[c(0.3), C64::new(0.1, 0.4), C64::new(-0.2, 0.1), c(0.7)]);
        assert!((ch.apply(&x).unwrap() - map.apply(&x).unwrap()).norm() < 1e-14);
        assert!((ch.input_marginal() - CMatrix::identity(2, 2) * c(0.5)).norm() < 1e-14);
    }
}
