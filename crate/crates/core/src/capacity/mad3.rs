//! Fixed-`γ10` slices of three-level MADs between the plane `γ21 + 2γ20 = 1`
//! and the complete-damping face `γ20 + γ21 = 1`.

use serde::{Deserialize, Serialize};

use crate::capacity::certificate::{CertificateKind, CertifyOptions, certify_with};
use crate::capacity::coherent::{adc_capacity, max_diagonal_coherent_info_with};
use crate::channel::{Decay, TransitionMatrix};
use crate::error::{Error, Result};
use crate::structure::connecting::{connecting_choi, connecting_upper_bound};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mad3Options {
    pub gamma10: f64,
    /// Steps `n = 0..=iterations` of `γ21^(n) = 1 − 2^{−n}`.
    pub iterations: usize,
    pub k_values: Vec<f64>,
    /// Number of `ω21` intervals scanned on `[γ21^(n), 1]`.
    pub omega_points: usize,
    pub slice_step: f64,
    pub certify: CertifyOptions,
}

impl Mad3Options {
    pub fn new(gamma10: f64) -> Self {
        Self {
            gamma10,
            iterations: 4,
            k_values: (0..10).map(|i| 1.0 + 0.1 * i as f64).collect(),
            omega_points: 256,
            slice_step: 0.05,
            certify: CertifyOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryScan {
    pub n: usize,
    pub k: f64,
    pub gamma21: f64,
    /// `1 − k/2^{n+1}`.
    pub predicted: f64,
    /// Largest scanned `ω21` with a PSD Choi matrix.
    pub found: Option<f64>,
    pub resolution: f64,
    /// Every scanned point farther than one step from the prediction agrees with it.
    pub agrees: bool,
    pub verdicts: Vec<(f64, bool)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SliceStatus {
    /// Lower and upper bounds meet within the border tolerance.
    Certified,
    /// Only a lower bound is established.
    LowerBoundOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlicePoint {
    pub gamma20: f64,
    pub gamma21: f64,
    pub lower: f64,
    pub upper: Option<f64>,
    pub diagonal_max: f64,
    pub value: f64,
    pub status: SliceStatus,
    pub via: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub n: usize,
    pub gamma20: f64,
    pub gamma21: f64,
    pub kind: CertificateKind,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mad3Report {
    pub gamma10: f64,
    pub adc_value: f64,
    pub scans: Vec<BoundaryScan>,
    pub anchors: Vec<Anchor>,
    pub slice: Vec<SlicePoint>,
    pub boundary_agrees: bool,
    /// Every slice value equals `Q_ADC(γ10)` within the border tolerance.
    pub values_match: bool,
    pub certified: usize,
}

fn mad3(g10: f64, g20: f64, g21: f64) -> Result<TransitionMatrix> {
    TransitionMatrix::from_decays(
        3,
        &[Decay { from: 1, to: 0, p: g10 }, Decay { from: 2, to: 0, p: g20 }, Decay { from: 2, to: 1, p: g21 }],
    )
}

pub fn scan_boundary(n: usize, k: f64, points: usize, tol: f64) -> Result<BoundaryScan> {
    let g21 = 1.0 - 0.5f64.powi(n as i32);
    let predicted = connecting_upper_bound(g21, k);
    let resolution = (1.0 - g21) / points as f64;
    let mut verdicts = Vec::with_capacity(points + 1);
    for m in 0..=points {
        let w = g21 + m as f64 * resolution;
        verdicts.push((w, connecting_choi(g21, w, k)?.is_psd(tol)?));
    }
    let found =
        verdicts.iter().filter(|v| v.1).map(|v| v.0).fold(None, |a: Option<f64>, w| Some(a.map_or(w, |x| x.max(w))));
    let agrees = verdicts.iter().all(|&(w, psd)| (w - predicted).abs() <= resolution || psd == (w < predicted));
    Ok(BoundaryScan { n, k, gamma21: g21, predicted, found, resolution, agrees, verdicts })
}

pub fn mad3_acge_verification(opts: &Mad3Options) -> Result<Mad3Report> {
    let g10 = opts.gamma10;
    if !(0.0..=0.5).contains(&g10) {
        return Err(Error::ConditionViolated(format!("gamma10 = {g10} outside [0, 1/2]")));
    }
    let tol = opts.certify.tol_psd;
    let tol_border = opts.certify.tol_border;
    let adc_value = adc_capacity(g10);

    let mut scans = Vec::new();
    for n in 0..=opts.iterations {
        for &k in &opts.k_values {
            scans.push(scan_boundary(n, k, opts.omega_points, tol)?);
        }
    }

    let anchors = anchors(g10, opts.iterations, &opts.certify)?;

    let steps = (1.0 / opts.slice_step).round() as usize;
    let mut slice = Vec::new();
    for a in 0..=steps {
        let g20 = a as f64 / steps as f64;
        for b in 0..=steps - a {
            let g21 = b as f64 / steps as f64;
            if g21 + 2.0 * g20 < 1.0 - 1e-12 {
                continue;
            }
            slice.push(slice_point(g10, g20, g21.min(1.0 - g20), &anchors, &opts.certify)?);
        }
    }

    let boundary_agrees = scans.iter().all(|s| s.agrees);
    let values_match = slice.iter().all(|p| (p.value - adc_value).abs() <= tol_border);
    let certified = slice.iter().filter(|p| p.status == SliceStatus::Certified).count();
    Ok(Mad3Report { gamma10: g10, adc_value, scans, anchors, slice, boundary_agrees, values_match, certified })
}

/// Certificates at `γ21^(n) = 1 − 2^{−n}`, `γ20 = 2^{−(n+1)}` for `n = 0..=iterations`.
pub fn anchors(g10: f64, iterations: usize, certify: &CertifyOptions) -> Result<Vec<Anchor>> {
    (0..=iterations)
        .map(|n| {
            let (g20, g21) = (0.5f64.powi(n as i32 + 1), 1.0 - 0.5f64.powi(n as i32));
            let c = certify_with(&mad3(g10, g20, g21)?, certify);
            Ok(Anchor { n, gamma20: g20, gamma21: g21, kind: c.kind, value: c.value })
        })
        .collect()
}

/// Lower bound from the complete-damping face and, when available, an upper
/// bound from the point's own certificate or a connecting map from an anchor.
pub fn slice_point(g10: f64, g20: f64, g21: f64, anchors: &[Anchor], opts: &CertifyOptions) -> Result<SlicePoint> {
    let tol = opts.tol_psd;
    let g = mad3(g10, g20, g21)?;
    // Raising γ20 to full damping of level 2 is a top-level increase.
    let face = certify_with(&mad3(g10, 1.0 - g21, g21)?, opts);
    let lower = face.value.unwrap_or(0.0);
    let own = certify_with(&g, opts);
    let diagonal_max = max_diagonal_coherent_info_with(&g, opts.grid_step).0;

    let mut upper = None;
    let mut via = String::new();
    if own.kind.is_exact() {
        upper = own.value;
        via = own.kind.as_str().to_string();
    }
    if g20 > 0.0 {
        let k = (1.0 - g21) / g20;
        if (1.0..2.0).contains(&k) {
            for a in anchors.iter().filter(|a| a.kind.is_exact()) {
                let Some(v) = a.value else { continue };
                if g21 < a.gamma21 || upper.is_some_and(|u| u <= v) {
                    continue;
                }
                if connecting_choi(a.gamma21, g21, k)?.is_psd(tol)? {
                    upper = Some(v);
                    via = format!("connecting map from anchor n={}", a.n);
                }
            }
        }
    }

    let (value, status) = match upper {
        Some(u) if u - lower <= opts.tol_border => (lower.max(own.value.unwrap_or(lower)), SliceStatus::Certified),
        _ => {
            via = "lower bound only".into();
            (lower.max(own.value.unwrap_or(0.0)), SliceStatus::LowerBoundOnly)
        }
    };
    Ok(SlicePoint { gamma20: g20, gamma21: g21, lower, upper, diagonal_max, value, status, via })
}
