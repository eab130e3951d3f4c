//! Capacity certificates: a decision cascade over antidegradability,
//! degradability, complete-damping reduction and monotone region extension.

use serde::{Deserialize, Serialize};

use crate::capacity::coherent::{GRID_STEP, max_diagonal_coherent_info_with};
use crate::capacity::reduction::reduce_complete_damping;
use crate::channel::{TransitionMatrix, relabel_by_swap};
use crate::kernel::PSD_TOL;
use crate::structure::degradability::{DegradabilityStatus, is_degradable, is_degradable_strict};
use crate::structure::extension::{capacity_positive_witness, is_antidegradable};
use crate::structure::monotonicity::{Side, always_monotone, monotonicity_certificate};

const BISECTION_STEPS: usize = 48;
const ZERO_SURVIVAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    Zero,
    ExactDegradable,
    ExactByReduction,
    ExactByRegionExtension,
    LowerBound,
    Unknown,
}

impl CertificateKind {
    pub fn is_exact(self) -> bool {
        matches!(
            self,
            CertificateKind::Zero
                | CertificateKind::ExactDegradable
                | CertificateKind::ExactByReduction
                | CertificateKind::ExactByRegionExtension
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::Zero => "Zero",
            CertificateKind::ExactDegradable => "ExactDegradable",
            CertificateKind::ExactByReduction => "ExactByReduction",
            CertificateKind::ExactByRegionExtension => "ExactByRegionExtension",
            CertificateKind::LowerBound => "LowerBound",
            CertificateKind::Unknown => "Unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityCertificate {
    pub gamma: TransitionMatrix,
    pub kind: CertificateKind,
    pub value: Option<f64>,
    pub provenance: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub tol_psd: f64,
    /// Largest gap between border certificates accepted as equality.
    pub tol_border: f64,
    /// Maximum number of single-entry segments in a monotone path.
    pub max_path: usize,
    /// Nesting depth for certifying the far end of a monotone segment.
    pub depth: usize,
    pub grid_step: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { tol_psd: PSD_TOL, tol_border: 1e-6, max_path: 2, depth: 1, grid_step: GRID_STEP }
    }
}

pub fn certify_capacity(g: &TransitionMatrix) -> CapacityCertificate {
    certify_with(g, &CertifyOptions::default())
}

pub fn certify_with(g: &TransitionMatrix, opts: &CertifyOptions) -> CapacityCertificate {
    certify_inner(g, opts, opts.depth)
}

fn cert(
    g: &TransitionMatrix,
    kind: CertificateKind,
    value: Option<f64>,
    provenance: Vec<String>,
) -> CapacityCertificate {
    CapacityCertificate { gamma: g.clone(), kind, value, provenance }
}

fn certify_inner(g: &TransitionMatrix, opts: &CertifyOptions, depth: usize) -> CapacityCertificate {
    let d = g.dim();
    if is_antidegradable(g) {
        return cert(
            g,
            CertificateKind::Zero,
            Some(0.0),
            vec!["antidegradable: gamma_j0 >= gamma_jj for every level".into()],
        );
    }

    let diag = || max_diagonal_coherent_info_with(g, opts.grid_step).0;

    let verdict = is_degradable(g, opts.tol_psd);
    if verdict.status.is_degradable_or_boundary() {
        let mut prov = vec![format!("degrading map Choi min eigenvalue {:.3e}", verdict.min_eig.unwrap_or(f64::NAN))];
        if verdict.status == DegradabilityStatus::Boundary {
            prov.push("min eigenvalue inside the boundary band".into());
        }
        prov.push("maximised coherent information over diagonal inputs".into());
        return cert(g, CertificateKind::ExactDegradable, Some(diag()), prov);
    }

    let mut carried_lower: Option<(f64, String)> = None;
    if let Some((h, swaps)) = complete_damping_form(g) {
        let reduced = reduce_complete_damping(&h).expect("top level fully damped");
        let sub = certify_inner(&reduced, opts, depth);
        let mut prov = Vec::new();
        if !swaps.is_empty() {
            prov.push(format!("relabelled by level swaps {swaps:?}"));
        }
        prov.push(format!("complete damping of the top level reduces to dimension {}", d - 1));
        prov.extend(sub.provenance.iter().map(|p| format!("reduced: {p}")));
        if sub.kind.is_exact() {
            return cert(g, CertificateKind::ExactByReduction, sub.value, prov);
        }
        if let Some(v) = sub.value {
            carried_lower = Some((v, "lower bound of the reduced channel".into()));
        }
    }

    let p_value = diag();
    if depth > 0
        && let Some(c) = region_extension(g, opts, depth, p_value)
    {
        return c;
    }

    let mut lower = p_value;
    let mut prov = vec![format!("diagonal maximum {p_value:.9}")];
    let noiseless = noiseless_bound(g);
    if noiseless > lower {
        lower = noiseless;
    }
    if noiseless > 0.0 {
        prov.push(format!("noiseless subspace bound {noiseless:.9}"));
    }
    for j in 1..d {
        if let Ok(w) = capacity_positive_witness(g, j) {
            if w > lower {
                lower = w;
            }
            prov.push(format!("positive-capacity witness on level {j}: {w:.9}"));
        }
    }
    if let Some((v, why)) = carried_lower {
        if v > lower {
            lower = v;
        }
        prov.push(format!("{why}: {v:.9}"));
    }
    if lower > 0.0 {
        cert(g, CertificateKind::LowerBound, Some(lower), prov)
    } else {
        cert(g, CertificateKind::Unknown, None, prov)
    }
}

/// `log₂` of the number of levels that never decay; inputs supported on them
/// pass unchanged.
fn noiseless_bound(g: &TransitionMatrix) -> f64 {
    let n = (0..g.dim()).filter(|&k| g.survival(k) == 1.0).count();
    (n as f64).log2()
}

/// A level with zero survival and no incoming decays, moved to the top by
/// adjacent swaps. Returns the relabelled matrix and the swaps used.
fn complete_damping_form(g: &TransitionMatrix) -> Option<(TransitionMatrix, Vec<(usize, usize)>)> {
    let d = g.dim();
    let k = (1..d).rev().find(|&k| g.survival(k) <= ZERO_SURVIVAL && (k + 1..d).all(|j| g.get(j, k) == 0.0))?;
    let mut h = g.clone();
    let mut swaps = Vec::new();
    for m in k..d - 1 {
        h = relabel_by_swap(&h, m, m + 1).ok()??;
        swaps.push((m, m + 1));
    }
    Some((h, swaps))
}

/// Whether `Q(more) ≤ Q(less)` is certified for matrices differing in entry `(j, i)`.
fn monotone_step(less: &TransitionMatrix, more: &TransitionMatrix, j: usize, i: usize, tol: f64) -> Option<String> {
    if always_monotone(less.dim(), j, i) {
        return Some(format!("decay {j}->{i} composes with a MAD channel"));
    }
    for side in [Side::Right, Side::Left] {
        if let Ok(c) = monotonicity_certificate(less, more, side, tol)
            && c.cp
        {
            return Some(format!("decay {j}->{i}: {side:?} connecting map CP (min eig {:.3e})", c.min_eig));
        }
    }
    None
}

/// Largest `t ∈ [0, hi]` with `pred(t)`, given `pred(0)` and not `pred(hi)`.
fn bisect(pred: &dyn Fn(f64) -> bool, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn set(g: &TransitionMatrix, entries: &[(usize, usize)], values: &[f64]) -> Option<TransitionMatrix> {
    let mut h = g.clone();
    for (&(j, i), &v) in entries.iter().zip(values) {
        h = h.with_decay(j, i, v).ok()?;
    }
    Some(h)
}

/// Sequences of distinct entries of length `1..=max_len`.
fn paths(entries: &[(usize, usize)], max_len: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out: Vec<Vec<(usize, usize)>> = entries.iter().map(|&e| vec![e]).collect();
    let mut frontier = out.clone();
    for _ in 1..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for &e in entries {
                if !p.contains(&e) {
                    let mut q = p.clone();
                    q.push(e);
                    next.push(q);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Upper bound from the degradable border reached by decreasing the entries
/// of a monotone path in turn; lower bound from the diagonal maximum at `g`
/// and from certified borders reached by increasing a single decay.
fn region_extension(
    g: &TransitionMatrix,
    opts: &CertifyOptions,
    depth: usize,
    p_value: f64,
) -> Option<CapacityCertificate> {
    let entries: Vec<(usize, usize)> = g.decays().iter().map(|x| (x.from, x.to)).collect();
    let tol = opts.tol_psd;

    let mut upper: Option<(f64, Vec<String>)> = None;
    for path in paths(&entries, opts.max_path) {
        let zeros = vec![0.0; path.len()];
        if !set(g, &path, &zeros).is_some_and(|b| is_degradable_strict(&b, tol)) {
            continue;
        }
        let mut cur = g.clone();
        let mut prov = Vec::new();
        let mut ok = true;
        for (s, &(j, i)) in path.iter().enumerate() {
            let rest = &path[s + 1..];
            let at = |t: f64| -> Option<TransitionMatrix> {
                let h = cur.with_decay(j, i, t).ok()?;
                set(&h, rest, &vec![0.0; rest.len()])
            };
            let v = cur.get(j, i);
            if at(v).is_some_and(|h| is_degradable_strict(&h, tol)) {
                ok = false;
                break;
            }
            let pred = |t: f64| at(t).is_some_and(|h| is_degradable_strict(&h, tol));
            let t = bisect(&pred, v);
            let next = cur.with_decay(j, i, t).ok()?;
            match monotone_step(&next, &cur, j, i, tol) {
                Some(why) => prov.push(format!("{why}; decreased {v:.6} -> {t:.9}")),
                None => {
                    ok = false;
                    break;
                }
            }
            cur = next;
        }
        if !ok {
            continue;
        }
        let u = max_diagonal_coherent_info_with(&cur, opts.grid_step).0;
        prov.push(format!("degradable border value {u:.9}"));
        if upper.as_ref().is_none_or(|(best, _)| u < *best) {
            upper = Some((u, prov));
        }
    }
    let (u, uprov) = upper?;

    let mut lower = p_value;
    let mut lprov = format!("diagonal maximum at the point {p_value:.9}");
    for &(j, i) in &entries {
        let room = g.survival(j);
        if room <= ZERO_SURVIVAL {
            continue;
        }
        let Ok(far) = g.with_decay(j, i, g.get(j, i) + room) else { continue };
        if monotone_step(g, &far, j, i, tol).is_none() {
            continue;
        }
        let c = certify_inner(&far, opts, depth - 1);
        if c.kind.is_exact()
            && let Some(v) = c.value
            && v > lower
        {
            lower = v;
            lprov = format!("border with decay {j}->{i} raised to full damping: {} {v:.9}", c.kind.as_str());
        }
    }

    if (u - lower).abs() <= opts.tol_border {
        let mut prov = uprov;
        prov.push(lprov);
        prov.push(format!("border gap {:.3e}", u - lower));
        return Some(cert(g, CertificateKind::ExactByRegionExtension, Some(u), prov));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Decay;

    fn dec(from: usize, to: usize, p: f64) -> Decay {
        Decay { from, to, p }
    }

    #[test]
    fn identity_is_exact() {
        let c = certify_capacity(&TransitionMatrix::identity(4));
        assert_eq!(c.kind, CertificateKind::ExactDegradable);
        assert!((c.value.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn antidegradable_is_zero() {
        let g = TransitionMatrix::from_decays(2, &[dec(1, 0, 0.6)]).unwrap();
        let c = certify_capacity(&g);
        assert_eq!(c.kind, CertificateKind::Zero);
    }

    #[test]
    fn reduction_of_top_level() {
        let g = TransitionMatrix::from_decays(3, &[dec(2, 0, 0.5), dec(2, 1, 0.5), dec(1, 0, 0.2)]).unwrap();
        let c = certify_capacity(&g);
        assert_eq!(c.kind, CertificateKind::ExactByReduction);
        assert!((c.value.unwrap() - crate::capacity::adc_capacity(0.2)).abs() < 1e-9);
    }

    #[test]
    fn reduction_after_swaps() {
        // Level 1 is fully damped and receives nothing.
        let g = TransitionMatrix::from_decays(3, &[dec(1, 0, 1.0), dec(2, 0, 0.1)]).unwrap();
        let (h, swaps) = complete_damping_form(&g).unwrap();
        assert_eq!(swaps, vec![(1, 2)]);
        assert_eq!(h.survival(2), 0.0);
        assert_eq!(h.get(1, 0), 0.1);
        assert_eq!(certify_capacity(&g).kind, CertificateKind::ExactByReduction);
    }

    #[test]
    fn path_enumeration() {
        let e = [(1, 0), (2, 0), (2, 1)];
        assert_eq!(paths(&e, 1).len(), 3);
        assert_eq!(paths(&e, 2).len(), 9);
    }
}
