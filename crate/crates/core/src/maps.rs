//! Linear maps on matrices: Kraus channels, signed (pseudo-)Kraus maps and
//! compositions of both.

use crate::error::{Error, Result};
use crate::kernel::{C64, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A completely positive map `ρ ↦ Σ K ρ K†`.
#[derive(Debug, Clone)]
pub struct KrausSet {
    d_in: usize,
    d_out: usize,
    ops: Vec<CMatrix>,
}

impl KrausSet {
    pub fn new(d_in: usize, d_out: usize, ops: Vec<CMatrix>) -> Result<Self> {
        for op in &ops {
            check_shape(op, d_in, d_out)?;
        }
        Ok(Self { d_in, d_out, ops })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `Σ K†K`, the identity for a trace-preserving set.
    pub fn completeness(&self) -> CMatrix {
        let mut acc = CMatrix::zeros(self.d_in, self.d_in);
        for k in &self.ops {
            acc += k.adjoint() * k;
        }
        acc
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        completeness_defect(&self.completeness()) <= tol
    }

    pub fn apply(&self, m: &CMatrix) -> Result<CMatrix> {
        check_input(m, self.d_in)?;
        let mut out = CMatrix::zeros(self.d_out, self.d_out);
        for k in &self.ops {
            out += k * m * k.adjoint();
        }
        Ok(out)
    }
}

/// A map `ρ ↦ Σ s_a A_a ρ A_a†` with signs `s_a = ±1`. Inverses of channels
/// take this form and are generally not completely positive.
#[derive(Debug, Clone)]
pub struct PseudoKrausMap {
    d_in: usize,
    d_out: usize,
    terms: Vec<(Sign, CMatrix)>,
}

impl PseudoKrausMap {
    pub fn new(d_in: usize, d_out: usize, terms: Vec<(Sign, CMatrix)>) -> Result<Self> {
        for (_, op) in &terms {
            check_shape(op, d_in, d_out)?;
        }
        Ok(Self { d_in, d_out, terms })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn terms(&self) -> &[(Sign, CMatrix)] {
        &self.terms
    }

    /// `Σ s A†A`; equals the identity exactly when the map preserves trace.
    pub fn completeness(&self) -> CMatrix {
        let mut acc = CMatrix::zeros(self.d_in, self.d_in);
        for (s, a) in &self.terms {
            acc += (a.adjoint() * a) * C64::new(s.factor(), 0.0);
        }
        acc
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        completeness_defect(&self.completeness()) <= tol
    }

    pub fn apply(&self, m: &CMatrix) -> Result<CMatrix> {
        check_input(m, self.d_in)?;
        let mut out = CMatrix::zeros(self.d_out, self.d_out);
        for (s, a) in &self.terms {
            let t = a * m * a.adjoint();
            match s {
                Sign::Plus => out += t,
                Sign::Minus => out -= t,
            }
        }
        Ok(out)
    }
}

impl From<KrausSet> for PseudoKrausMap {
    fn from(k: KrausSet) -> Self {
        Self { d_in: k.d_in, d_out: k.d_out, terms: k.ops.into_iter().map(|op| (Sign::Plus, op)).collect() }
    }
}

/// Superoperator acting on row-major vectorisations:
/// `vec(X)[i*d + j] = X[i, j]`.
#[derive(Debug, Clone)]
pub struct Superoperator {
    d_in: usize,
    d_out: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn new(d_in: usize, d_out: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != d_out * d_out {
            return Err(Error::DimensionMismatch { expected: d_out * d_out, got: matrix.nrows() });
        }
        if matrix.ncols() != d_in * d_in {
            return Err(Error::DimensionMismatch { expected: d_in * d_in, got: matrix.ncols() });
        }
        Ok(Self { d_in, d_out, matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, m: &CMatrix) -> Result<CMatrix> {
        check_input(m, self.d_in)?;
        let v = vectorize(m);
        Ok(unvectorize(&(&self.matrix * v), self.d_out))
    }
}

#[derive(Debug, Clone)]
pub enum Stage {
    Kraus(PseudoKrausMap),
    Dense(Superoperator),
}

impl Stage {
    fn d_in(&self) -> usize {
        match self {
            Stage::Kraus(k) => k.d_in,
            Stage::Dense(s) => s.d_in,
        }
    }

    fn d_out(&self) -> usize {
        match self {
            Stage::Kraus(k) => k.d_out,
            Stage::Dense(s) => s.d_out,
        }
    }

    fn apply(&self, m: &CMatrix) -> Result<CMatrix> {
        match self {
            Stage::Kraus(k) => k.apply(m),
            Stage::Dense(s) => s.apply(m),
        }
    }
}

/// A chain of stages applied first-to-last.
#[derive(Debug, Clone)]
pub struct LinearMap {
    stages: Vec<Stage>,
}

impl LinearMap {
    pub fn identity(d: usize) -> Self {
        let id = PseudoKrausMap { d_in: d, d_out: d, terms: vec![(Sign::Plus, CMatrix::identity(d, d))] };
        Self { stages: vec![Stage::Kraus(id)] }
    }

    pub fn from_stage(stage: Stage) -> Self {
        Self { stages: vec![stage] }
    }

    pub fn d_in(&self) -> usize {
        self.stages[0].d_in()
    }

    pub fn d_out(&self) -> usize {
        self.stages[self.stages.len() - 1].d_out()
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// `next ∘ self`.
    pub fn then(mut self, next: impl Into<LinearMap>) -> Result<Self> {
        let next = next.into();
        if next.d_in() != self.d_out() {
            return Err(Error::DimensionMismatch { expected: self.d_out(), got: next.d_in() });
        }
        self.stages.extend(next.stages);
        Ok(self)
    }

    pub fn apply(&self, m: &CMatrix) -> Result<CMatrix> {
        let mut cur = m.clone();
        for s in &self.stages {
            cur = s.apply(&cur)?;
        }
        Ok(cur)
    }

    pub fn superoperator(&self) -> Superoperator {
        let (din, dout) = (self.d_in(), self.d_out());
        let mut s = CMatrix::zeros(dout * dout, din * din);
        for i in 0..din {
            for j in 0..din {
                let out = self.apply(&unit(din, i, j)).expect("dimensions fixed at construction");
                s.set_column(i * din + j, &vectorize(&out));
            }
        }
        Superoperator { d_in: din, d_out: dout, matrix: s }
    }

    /// Checks `tr Φ(|i⟩⟨j|) = δ_ij` on the matrix-unit basis.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let d = self.d_in();
        for i in 0..d {
            for j in 0..d {
                let Ok(out) = self.apply(&unit(d, i, j)) else { return false };
                let expected = if i == j { 1.0 } else { 0.0 };
                if (out.trace() - C64::new(expected, 0.0)).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

impl From<PseudoKrausMap> for LinearMap {
    fn from(k: PseudoKrausMap) -> Self {
        Self::from_stage(Stage::Kraus(k))
    }
}

impl From<KrausSet> for LinearMap {
    fn from(k: KrausSet) -> Self {
        Self::from_stage(Stage::Kraus(k.into()))
    }
}

impl From<Superoperator> for LinearMap {
    fn from(s: Superoperator) -> Self {
        Self::from_stage(Stage::Dense(s))
    }
}

pub fn unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

fn vectorize(m: &CMatrix) -> nalgebra::DVector<C64> {
    let d = m.nrows();
    nalgebra::DVector::from_fn(d * d, |k, _| m[(k / d, k % d)])
}

fn unvectorize(v: &nalgebra::DVector<C64>, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

fn completeness_defect(sum: &CMatrix) -> f64 {
    let d = sum.nrows();
    (sum - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_shape(op: &CMatrix, d_in: usize, d_out: usize) -> Result<()> {
    if op.ncols() != d_in {
        return Err(Error::DimensionMismatch { expected: d_in, got: op.ncols() });
    }
    if op.nrows() != d_out {
        return Err(Error::DimensionMismatch { expected: d_out, got: op.nrows() });
    }
    Ok(())
}

fn check_input(m: &CMatrix, d: usize) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: m.nrows().max(m.ncols()) });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::c;

    fn adc(g: f64) -> KrausSet {
        let k0 = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c((1.0 - g).sqrt())]);
        let k1 = CMatrix::from_row_slice(2, 2, &[c(0.0), c(g.sqrt()), c(0.0), c(0.0)]);
        KrausSet::new(2, 2, vec![k0, k1]).unwrap()
    }

    #[test]
    fn kraus_completeness() {
        assert!(adc(0.3).is_trace_preserving(1e-14));
        let bad = KrausSet::new(2, 2, vec![CMatrix::identity(2, 2) * c(0.5)]).unwrap();
        assert!(!bad.is_trace_preserving(1e-6));
    }

    #[test]
    fn shape_checked() {
        let r = KrausSet::new(2, 3, vec![CMatrix::identity(2, 2)]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn adc_moves_population() {
        let out = adc(0.3).apply(&unit(2, 1, 1)).unwrap();
        assert!((out[(0, 0)].re - 0.3).abs() < 1e-15);
        assert!((out[(1, 1)].re - 0.7).abs() < 1e-15);
    }

    #[test]
    fn superoperator_matches_apply() {
        let m: LinearMap = adc(0.4).into();
        let s = m.superoperator();
        let x = CMatrix::from_row_slice(2, 2, &[c(0.6), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.4)]);
        let a = m.apply(&x).unwrap();
        let b = s.apply(&x).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn composition_order() {
        // Apply ADC(0.5) twice: total decay 0.75.
        let m = LinearMap::from(adc(0.5)).then(adc(0.5)).unwrap();
        let out = m.apply(&unit(2, 1, 1)).unwrap();
        assert!((out[(0, 0)].re - 0.75).abs() < 1e-15);
        assert!(m.is_trace_preserving(1e-14));
    }

    #[test]
    fn signed_terms_subtract() {
        let p = PseudoKrausMap::new(
            2,
            2,
            vec![(Sign::Plus, CMatrix::identity(2, 2) * c(2f64.sqrt())), (Sign::Minus, CMatrix::identity(2, 2))],
        )
        .unwrap();
        assert!(p.is_trace_preserving(1e-14));
        let out = p.apply(&unit(2, 0, 1)).unwrap();
        assert!((out[(0, 1)].re - 1.0).abs() < 1e-14);
    }
}
