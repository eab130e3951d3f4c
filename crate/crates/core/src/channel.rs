//! Transition matrices and the MAD channels they define.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{C64, CMatrix, DensityMatrix, c};
use crate::maps::{KrausSet, LinearMap};

/// Slack allowed on row sums and probability bounds.
pub const ROW_TOL: f64 = 1e-12;

/// Lower-triangular row-stochastic matrix; entry `(j, i)` is the probability
/// that level `j` decays onto level `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    gamma: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Decay {
    pub from: usize,
    pub to: usize,
    pub p: f64,
}

/// JSON form of a channel: `{"dim": d, "decays": [{"from": j, "to": i, "p": γ_ji}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub dim: usize,
    pub decays: Vec<Decay>,
}

fn clean_probability(p: f64, what: &str) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::InvalidTransitionMatrix(format!("{what} is not finite")));
    }
    if !(-ROW_TOL..=1.0 + ROW_TOL).contains(&p) {
        return Err(Error::InvalidTransitionMatrix(format!("{what} = {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

impl TransitionMatrix {
    pub fn identity(dim: usize) -> Self {
        Self { gamma: DMatrix::identity(dim, dim) }
    }

    /// Builds Γ from its off-diagonal decays; survival probabilities are implied.
    pub fn from_decays(dim: usize, decays: &[Decay]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidTransitionMatrix("dimension must be positive".into()));
        }
        let mut g = DMatrix::zeros(dim, dim);
        let mut seen = DMatrix::from_element(dim, dim, false);
        for d in decays {
            if d.from >= dim {
                return Err(Error::IndexOutOfRange { index: d.from, dim });
            }
            if d.to >= d.from {
                return Err(Error::InvalidTransitionMatrix(format!(
                    "decay {}->{} does not go to a lower level",
                    d.from, d.to
                )));
            }
            if seen[(d.from, d.to)] {
                return Err(Error::InvalidTransitionMatrix(format!("duplicate decay {}->{}", d.from, d.to)));
            }
            seen[(d.from, d.to)] = true;
            g[(d.from, d.to)] = clean_probability(d.p, &format!("gamma[{}][{}]", d.from, d.to))?;
        }
        Self::finish(g)
    }

    /// Accepts a full matrix; the diagonal must agree with the implied
    /// survival probabilities to `ROW_TOL`.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        let d = m.nrows();
        if m.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: m.ncols() });
        }
        let mut g = DMatrix::zeros(d, d);
        for j in 0..d {
            for i in 0..d {
                let v = m[(j, i)];
                if i > j {
                    if v.abs() > ROW_TOL {
                        return Err(Error::InvalidTransitionMatrix(format!(
                            "entry ({j},{i}) above the diagonal is {v}"
                        )));
                    }
                } else if i < j {
                    g[(j, i)] = clean_probability(v, &format!("gamma[{j}][{i}]"))?;
                }
            }
        }
        let t = Self::finish(g)?;
        for j in 0..d {
            if (t.gamma[(j, j)] - m[(j, j)]).abs() > ROW_TOL {
                return Err(Error::InvalidTransitionMatrix(format!("row {j} does not sum to one")));
            }
        }
        Ok(t)
    }

    fn finish(mut g: DMatrix<f64>) -> Result<Self> {
        let d = g.nrows();
        for j in 0..d {
            let s: f64 = (0..j).map(|i| g[(j, i)]).sum();
            if s > 1.0 + ROW_TOL {
                return Err(Error::InvalidTransitionMatrix(format!("row {j} decays sum to {s} > 1")));
            }
            g[(j, j)] = (1.0 - s).max(0.0);
        }
        Ok(Self { gamma: g })
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    /// `γ_ji`, the probability of `j → i` (`γ_jj` for survival).
    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.gamma[(j, i)]
    }

    pub fn survival(&self, j: usize) -> f64 {
        self.gamma[(j, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    /// Strictly positive decays, ordered by source level then target level.
    pub fn decays(&self) -> Vec<Decay> {
        let d = self.dim();
        let mut out = Vec::new();
        for j in 1..d {
            for i in 0..j {
                let p = self.gamma[(j, i)];
                if p > 0.0 {
                    out.push(Decay { from: j, to: i, p });
                }
            }
        }
        out
    }

    /// Copy with `γ_ji` replaced; the survival probability of `j` is updated.
    pub fn with_decay(&self, j: usize, i: usize, p: f64) -> Result<Self> {
        let d = self.dim();
        if j >= d {
            return Err(Error::IndexOutOfRange { index: j, dim: d });
        }
        if i >= j {
            return Err(Error::InvalidTransitionMatrix(format!("decay {j}->{i} does not go to a lower level")));
        }
        let mut g = self.gamma.clone();
        g[(j, i)] = clean_probability(p, &format!("gamma[{j}][{i}]"))?;
        Self::finish(g)
    }

    pub fn to_spec(&self) -> ChannelSpec {
        ChannelSpec { dim: self.dim(), decays: self.decays() }
    }

    pub fn is_identity(&self) -> bool {
        self.decays().is_empty()
    }
}

impl TryFrom<&ChannelSpec> for TransitionMatrix {
    type Error = Error;

    fn try_from(spec: &ChannelSpec) -> Result<Self> {
        Self::from_decays(spec.dim, &spec.decays)
    }
}

impl Serialize for TransitionMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TransitionMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = ChannelSpec::deserialize(d)?;
        TransitionMatrix::try_from(&spec).map_err(serde::de::Error::custom)
    }
}

/// Minimal Kraus set: `K_00 = Σ √γ_jj |j⟩⟨j|` followed by `K_ij = √γ_ji |i⟩⟨j|`
/// for every positive decay.
pub fn kraus_from_gamma(g: &TransitionMatrix) -> KrausSet {
    let d = g.dim();
    let mut k00 = CMatrix::zeros(d, d);
    for j in 0..d {
        k00[(j, j)] = c(g.survival(j).sqrt());
    }
    let mut ops = vec![k00];
    for dec in g.decays() {
        let mut k = CMatrix::zeros(d, d);
        k[(dec.to, dec.from)] = c(dec.p.sqrt());
        ops.push(k);
    }
    KrausSet::new(d, d, ops).expect("square operators of matching size")
}

/// Closed-form action on an arbitrary `d×d` matrix.
pub fn apply_matrix(g: &TransitionMatrix, rho: &CMatrix) -> Result<CMatrix> {
    let d = g.dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: rho.nrows() });
    }
    let mut out = CMatrix::zeros(d, d);
    for m in 0..d {
        for n in 0..d {
            if m != n {
                out[(m, n)] = rho[(m, n)] * (g.survival(m) * g.survival(n)).sqrt();
            }
        }
    }
    for i in 0..d {
        let mut v = rho[(i, i)] * g.survival(i);
        for j in i + 1..d {
            v += rho[(j, j)] * g.get(j, i);
        }
        out[(i, i)] = v;
    }
    Ok(out)
}

pub fn apply(g: &TransitionMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(apply_matrix(g, rho.matrix())?)
}

pub fn as_map(g: &TransitionMatrix) -> LinearMap {
    kraus_from_gamma(g).into()
}

/// `Γ′Γ″`: the channel that applies `Φ_Γ′` first and `Φ_Γ″` second.
pub fn compose(first: &TransitionMatrix, second: &TransitionMatrix) -> Result<TransitionMatrix> {
    if first.dim() != second.dim() {
        return Err(Error::DimensionMismatch { expected: first.dim(), got: second.dim() });
    }
    TransitionMatrix::from_matrix(&first.gamma * &second.gamma)
}

/// Factors `[Γ_1, …, Γ_{d−1}]` with `Γ = Γ_1Γ_2⋯Γ_{d−1}`; `Γ_k` keeps only row `k`.
pub fn decompose_by_level(g: &TransitionMatrix) -> Vec<TransitionMatrix> {
    let d = g.dim();
    (1..d)
        .map(|k| {
            let decays: Vec<Decay> = g.decays().into_iter().filter(|x| x.from == k).collect();
            TransitionMatrix::from_decays(d, &decays).expect("row of a valid matrix")
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleDecay {
    pub from: usize,
    pub to: usize,
    pub amplitude: f64,
}

impl SingleDecay {
    pub fn matrix(&self, dim: usize) -> Result<TransitionMatrix> {
        TransitionMatrix::from_decays(dim, &[Decay { from: self.from, to: self.to, p: self.amplitude }])
    }
}

/// Single-decay factors in application order: increasing source level `k`,
/// and within a level the decay onto `k−1` first down to the ground state.
/// Their product in this order reproduces Γ.
pub fn decompose_single_decays(g: &TransitionMatrix) -> Result<Vec<SingleDecay>> {
    let d = g.dim();
    let mut out = Vec::new();
    for k in 1..d {
        for n in (0..k).rev() {
            let p = g.get(k, n);
            if p <= 0.0 {
                continue;
            }
            let denom = g.survival(k) + (0..=n).map(|i| g.get(k, i)).sum::<f64>();
            if denom <= 0.0 {
                return Err(Error::DegenerateDecomposition { from: k, to: n });
            }
            out.push(SingleDecay { from: k, to: n, amplitude: (p / denom).min(1.0) });
        }
    }
    Ok(out)
}

/// Level with decays if Γ is a single-level matrix, `None` for the identity.
fn single_level(g: &TransitionMatrix) -> Result<Option<usize>> {
    let mut level = None;
    for dec in g.decays() {
        match level {
            None => level = Some(dec.from),
            Some(k) if k != dec.from => {
                return Err(Error::ConditionViolated("transition matrix has decays from more than one level".into()));
            }
            _ => {}
        }
    }
    Ok(level)
}

/// Splits a single-level `Γ_k` as `Γ_k = T_k^(n) Γ_k^(n)`, where `Γ_k^(n)`
/// holds only the decay `k → n` and acts last.
pub fn isolate_decay(gk: &TransitionMatrix, n: usize) -> Result<(TransitionMatrix, TransitionMatrix)> {
    let d = gk.dim();
    let Some(k) = single_level(gk)? else {
        return Ok((gk.clone(), TransitionMatrix::identity(d)));
    };
    if n >= k {
        return Err(Error::IndexOutOfRange { index: n, dim: k });
    }
    let p = gk.get(k, n);
    if p == 0.0 {
        return Ok((gk.clone(), TransitionMatrix::identity(d)));
    }
    let denom = 1.0 - (0..k).filter(|&i| i != n).map(|i| gk.get(k, i)).sum::<f64>();
    if denom <= 0.0 {
        return Err(Error::DegenerateDecomposition { from: k, to: n });
    }
    let gn = TransitionMatrix::from_decays(d, &[Decay { from: k, to: n, p: p / denom }])?;
    let rest: Vec<Decay> = gk.decays().into_iter().filter(|x| x.to != n).collect();
    let t = TransitionMatrix::from_decays(d, &rest)?;
    Ok((t, gn))
}

/// Permutation unitary exchanging levels `m` and `n`.
pub fn swap_unitary(d: usize, m: usize, n: usize) -> Result<CMatrix> {
    for x in [m, n] {
        if x >= d {
            return Err(Error::IndexOutOfRange { index: x, dim: d });
        }
    }
    let mut u = CMatrix::zeros(d, d);
    for i in 0..d {
        let j = if i == m {
            n
        } else if i == n {
            m
        } else {
            i
        };
        u[(j, i)] = C64::new(1.0, 0.0);
    }
    Ok(u)
}

/// `ρ ↦ U Φ_Γ(U ρ U) U` for the swap `U` of levels `m` and `n`.
pub fn conjugate_by_swap(g: &TransitionMatrix, m: usize, n: usize) -> Result<LinearMap> {
    let d = g.dim();
    let u = swap_unitary(d, m, n)?;
    let ops = kraus_from_gamma(g).ops().iter().map(|k| &u * k * &u).collect();
    Ok(KrausSet::new(d, d, ops)?.into())
}

/// The swap-conjugated channel as a transition matrix, when the relabelled
/// decays still point downwards.
pub fn relabel_by_swap(g: &TransitionMatrix, m: usize, n: usize) -> Result<Option<TransitionMatrix>> {
    let d = g.dim();
    for x in [m, n] {
        if x >= d {
            return Err(Error::IndexOutOfRange { index: x, dim: d });
        }
    }
    let s = |x: usize| {
        if x == m {
            n
        } else if x == n {
            m
        } else {
            x
        }
    };
    let mut decays = Vec::new();
    for dec in g.decays() {
        let (from, to) = (s(dec.from), s(dec.to));
        if to > from {
            return Ok(None);
        }
        decays.push(Decay { from, to, p: dec.p });
    }
    Ok(Some(TransitionMatrix::from_decays(d, &decays)?))
}

/// True iff some level both receives a decay from above and decays further down.
pub fn has_ladder_structure(g: &TransitionMatrix) -> bool {
    let d = g.dim();
    (1..d).any(|b| {
        let receives = (b + 1..d).any(|a| g.get(a, b) > 0.0);
        let emits = (0..b).any(|c| g.get(b, c) > 0.0);
        receives && emits
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(from: usize, to: usize, p: f64) -> Decay {
        Decay { from, to, p }
    }

    #[test]
    fn diagonal_is_implied() {
        let g = TransitionMatrix::from_decays(3, &[dec(2, 0, 0.25), dec(2, 1, 0.25)]).unwrap();
        assert_eq!(g.survival(2), 0.5);
        assert_eq!(g.survival(1), 1.0);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(TransitionMatrix::from_decays(3, &[dec(2, 0, 0.6), dec(2, 1, 0.6)]).is_err());
        assert!(TransitionMatrix::from_decays(3, &[dec(1, 2, 0.1)]).is_err());
        assert!(TransitionMatrix::from_decays(3, &[dec(3, 0, 0.1)]).is_err());
        assert!(TransitionMatrix::from_decays(3, &[dec(1, 0, -0.1)]).is_err());
        assert!(TransitionMatrix::from_decays(3, &[dec(1, 0, 0.1), dec(1, 0, 0.2)]).is_err());
        // Within the row tolerance the survival is clamped to zero.
        let g = TransitionMatrix::from_decays(3, &[dec(2, 0, 0.5), dec(2, 1, 0.5 + 5e-13)]).unwrap();
        assert_eq!(g.survival(2), 0.0);
    }

    #[test]
    fn identity_has_single_kraus() {
        let k = kraus_from_gamma(&TransitionMatrix::identity(4));
        assert_eq!(k.ops().len(), 1);
        assert!((&k.ops()[0] - CMatrix::identity(4, 4)).norm() == 0.0);
    }

    #[test]
    fn adc_kraus() {
        let g = TransitionMatrix::from_decays(2, &[dec(1, 0, 0.36)]).unwrap();
        let k = kraus_from_gamma(&g);
        assert_eq!(k.ops().len(), 2);
        assert!((k.ops()[0][(1, 1)].re - 0.8).abs() < 1e-15);
        assert!((k.ops()[1][(0, 1)].re - 0.6).abs() < 1e-15);
        assert!(k.is_trace_preserving(1e-12));
    }

    #[test]
    fn example_kraus_count() {
        let g = TransitionMatrix::from_decays(4, &[dec(1, 0, 0.3), dec(3, 2, 0.2), dec(3, 0, 0.1)]).unwrap();
        assert_eq!(kraus_from_gamma(&g).ops().len(), 4);
    }

    #[test]
    fn apply_examples() {
        let g = TransitionMatrix::from_decays(2, &[dec(1, 0, 1.0)]).unwrap();
        let out = apply(&g, &DensityMatrix::basis(2, 1).unwrap()).unwrap();
        assert!((out.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);

        let g = TransitionMatrix::from_decays(2, &[dec(1, 0, 0.5)]).unwrap();
        let plus = CMatrix::from_element(2, 2, c(0.5));
        let out = apply_matrix(&g, &plus).unwrap();
        assert!((out[(0, 0)].re - 0.75).abs() < 1e-15);
        assert!((out[(1, 1)].re - 0.25).abs() < 1e-15);
        assert!((out[(0, 1)].re - 0.5 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn compose_adc() {
        let g = TransitionMatrix::from_decays(2, &[dec(1, 0, 0.5)]).unwrap();
        let h = compose(&g, &g).unwrap();
        assert!((h.get(1, 0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn single_decay_amplitudes() {
        let g = TransitionMatrix::from_decays(3, &[dec(2, 0, 0.25), dec(2, 1, 0.25)]).unwrap();
        let f = decompose_single_decays(&g).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!((f[0].from, f[0].to), (2, 1));
        assert!((f[0].amplitude - 0.25).abs() < 1e-15);
        assert_eq!((f[1].from, f[1].to), (2, 0));
        assert!((f[1].amplitude - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn isolate_example() {
        let g = TransitionMatrix::from_decays(4, &[dec(3, 2, 0.2), dec(3, 1, 0.2), dec(3, 0, 0.2)]).unwrap();
        let (t, gn) = isolate_decay(&g, 1).unwrap();
        assert!((gn.get(3, 1) - 1.0 / 3.0).abs() < 1e-15);
        let prod = t.matrix() * gn.matrix();
        assert!((prod - g.matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn isolate_rejects_multi_level() {
        let g = TransitionMatrix::from_decays(3, &[dec(1, 0, 0.2), dec(2, 0, 0.2)]).unwrap();
        assert!(isolate_decay(&g, 0).is_err());
    }

    #[test]
    fn ladder_detection() {
        assert!(!has_ladder_structure(&TransitionMatrix::identity(4)));
        let g = TransitionMatrix::from_decays(4, &[dec(2, 1, 0.3), dec(1, 0, 0.3)]).unwrap();
        assert!(has_ladder_structure(&g));
        let g = TransitionMatrix::from_decays(4, &[dec(3, 0, 0.3), dec(2, 0, 0.3), dec(1, 0, 0.3)]).unwrap();
        assert!(!has_ladder_structure(&g));
    }

    #[test]
    fn relabel_keeps_direction() {
        let g = TransitionMatrix::from_decays(3, &[dec(2, 0, 0.4)]).unwrap();
        assert!(relabel_by_swap(&g, 0, 2).unwrap().is_none());
        let h = relabel_by_swap(&g, 1, 2).unwrap().unwrap();
        assert_eq!(h.get(1, 0), 0.4);
    }

    #[test]
    fn json_round_trip() {
        let g = TransitionMatrix::from_decays(3, &[dec(2, 0, 0.25), dec(1, 0, 0.5)]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let back: TransitionMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
        let bad = r#"{"dim":2,"decays":[{"from":1,"to":0,"p":1.5}]}"#;
        assert!(serde_json::from_str::<TransitionMatrix>(bad).is_err());
    }
}
