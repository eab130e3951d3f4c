//! Dense complex-matrix primitives: Hermitian spectra, entropies, tensor
//! products, partial traces and positivity tests.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Default relative tolerance for positive semi-definiteness.
pub const PSD_TOL: f64 = 1e-9;

const HERMITIAN_REL_TOL: f64 = 1e-10;
const STATE_TOL: f64 = 1e-12;
const STATE_EIG_FLOOR: f64 = -1e-9;
const ENTROPY_CUTOFF: f64 = 1e-12;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Induced infinity norm (maximum absolute row sum).
pub fn norm_inf(m: &CMatrix) -> f64 {
    m.row_iter().map(|row| row.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Largest entrywise deviation from Hermiticity, `max |m_ij - conj(m_ji)|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    Ok(())
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    check_square(m)?;
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_REL_TOL * norm_inf(m) {
        return Err(Error::NonHermitian(defect));
    }
    Ok(())
}

fn symmetrized(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let mut values: Vec<f64> = symmetrized(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Ascending eigenvalues with the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(m)?;
    let eig = symmetrized(m).symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok((values, vectors))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.first().copied().unwrap_or(0.0))
}

/// Shannon entropy in bits of a list of nonnegative weights; entries below
/// `1e-12` count as zero.
pub fn entropy_bits<I: IntoIterator<Item = f64>>(weights: I) -> f64 {
    weights.into_iter().filter(|&w| w > ENTROPY_CUTOFF).map(|w| -w * w.log2()).sum()
}

/// PSD test against a scale-relative floor: passes iff the smallest
/// eigenvalue is at least `-tol * max(1, ‖m‖∞)`.
///
/// Implemented as a Cholesky factorization of the shifted matrix.
pub fn is_psd(m: &CMatrix, tol: f64) -> Result<bool> {
    check_hermitian(m)?;
    let shift = tol * norm_inf(m).max(1.0);
    let n = m.nrows();
    let shifted = symmetrized(m) + CMatrix::identity(n, n).scale(shift);
    Ok(cholesky_succeeds(shifted))
}

/// In-place Hermitian Cholesky; fails on the first non-positive pivot.
/// (nalgebra's complex Cholesky takes complex square roots and never fails.)
fn cholesky_succeeds(mut a: CMatrix) -> bool {
    let n = a.nrows();
    for k in 0..n {
        let mut pivot = a[(k, k)].re;
        for p in 0..k {
            pivot -= a[(k, p)].norm_sqr();
        }
        if pivot.is_nan() || pivot <= 0.0 {
            return false;
        }
        let l = pivot.sqrt();
        a[(k, k)] = C64::new(l, 0.0);
        for i in k + 1..n {
            let mut v = a[(i, k)];
            for p in 0..k {
                v -= a[(i, p)] * a[(k, p)].conj();
            }
            a[(i, k)] = v / l;
        }
    }
    true
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Traces out the subsystems listed in `traced` (indices into `dims`) and
/// returns the operator on the remaining subsystems, in their original order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], traced: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::DimensionMismatch { expected: total, got: m.nrows() });
    }
    if let Some(&bad) = traced.iter().find(|&&t| t >= dims.len()) {
        return Err(Error::IndexOutOfRange { index: bad, dim: dims.len() });
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|k| !traced.contains(k)).collect();
    let gone: Vec<usize> = (0..dims.len()).filter(|k| traced.contains(k)).collect();
    let kept_dim: usize = kept.iter().map(|&k| dims[k]).product();
    let gone_dim: usize = gone.iter().map(|&k| dims[k]).product();

    // strides of each subsystem in the row-major composite index
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let offset = |sel: &[usize], mut flat: usize| -> usize {
        let mut acc = 0;
        for &k in sel.iter().rev() {
            acc += (flat % dims[k]) * strides[k];
            flat /= dims[k];
        }
        acc
    };
    let kept_off: Vec<usize> = (0..kept_dim).map(|i| offset(&kept, i)).collect();
    let gone_off: Vec<usize> = (0..gone_dim).map(|i| offset(&gone, i)).collect();

    Ok(CMatrix::from_fn(kept_dim, kept_dim, |r, col| {
        gone_off.iter().map(|&g| m[(kept_off[r] + g, kept_off[col] + g)]).sum()
    }))
}

/// A validated quantum state: Hermitian, unit trace, positive semi-definite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::InvalidState(format!("shape {}x{} is not square", matrix.nrows(), matrix.ncols())));
        }
        let defect = hermitian_defect(&matrix);
        if defect > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lowest = min_eigenvalue(&matrix)?;
        if lowest < STATE_EIG_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {lowest:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let n = populations.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| if i == j { c(populations[i]) } else { C64::new(0.0, 0.0) }))
    }

    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let n = amplitudes.len();
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        Self::new(CMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj() / norm))
    }

    pub fn basis(dim: usize, level: usize) -> Result<Self> {
        let mut pops = vec![0.0; dim];
        pops[level] = 1.0;
        Self::diagonal(&pops)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim).scale(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { matrix: kron(&self.matrix, &other.matrix) }
    }
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let spectrum = symmetrized(rho.matrix()).symmetric_eigenvalues();
    entropy_bits(spectrum.iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x)))
    }

    #[test]
    fn eigenvalues_of_small_cases() {
        let id = CMatrix::identity(3, 3);
        assert_eq!(hermitian_eigenvalues(&id).unwrap(), vec![1.0; 3]);

        let diag = real(2, 2, &[0.8, 0.0, 0.0, 0.2]);
        let ev = hermitian_eigenvalues(&diag).unwrap();
        assert_abs_diff_eq!(ev[0], 0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 0.8, epsilon = 1e-14);

        let x = real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let ev = hermitian_eigenvalues(&x).unwrap();
        assert_abs_diff_eq!(ev[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigen_rejects_bad_shapes() {
        let skew = real(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(matches!(hermitian_eigenvalues(&skew), Err(Error::NonHermitian(_))));
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigenvalues(&rect), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::basis(4, 0).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&pure), 0.0, epsilon = 1e-14);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert_abs_diff_eq!(von_neumann_entropy(&mixed), 2.0, epsilon = 1e-12);
        let half = DensityMatrix::diagonal(&[0.5, 0.5, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&half), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(real(2, 2, &[0.5, 0.0, 0.0, 0.4])).is_err());
        assert!(DensityMatrix::new(real(2, 2, &[1.2, 0.0, 0.0, -0.2])).is_err());
        assert!(DensityMatrix::new(real(2, 2, &[0.5, 0.1, 0.2, 0.5])).is_err());
        assert!(DensityMatrix::new(real(2, 2, &[0.5, 0.5, 0.5, 0.5])).is_ok());
    }

    #[test]
    fn partial_trace_of_products_and_identity() {
        let a = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let b = real(3, 3, &[0.2, 0.1, 0.0, 0.1, 0.5, 0.0, 0.0, 0.0, 0.3]);
        let ab = kron(a.matrix(), &b);
        let out = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert_abs_diff_eq!((out - a.matrix()).norm(), 0.0, epsilon = 1e-14);

        let big = CMatrix::identity(9, 9);
        let out = partial_trace(&big, &[3, 3], &[1]).unwrap();
        assert_abs_diff_eq!((out - CMatrix::identity(3, 3).scale(3.0)).norm(), 0.0, epsilon = 1e-14);

        let out = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        assert_abs_diff_eq!((out - &b).norm(), 0.0, epsilon = 1e-14);
        assert!(partial_trace(&ab, &[2, 2], &[1]).is_err());
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&CMatrix::identity(3, 3), PSD_TOL).unwrap());
        assert!(!is_psd(&real(2, 2, &[1.0, 0.0, 0.0, -0.1]), PSD_TOL).unwrap());
        // rank-one projector sits exactly on the boundary
        assert!(is_psd(&real(2, 2, &[0.5, 0.5, 0.5, 0.5]), PSD_TOL).unwrap());
        assert!(!is_psd(&real(2, 2, &[1.0, 0.0, 0.0, -1e-6]), PSD_TOL).unwrap());
    }
}
