//! Capacity certificates on the four-level example family and on
//! three-level slices.

use mad_capacity::capacity::mad3::{SliceStatus, scan_boundary};
use mad_capacity::capacity::{Mad3Options, adc_capacity, mad3_acge_verification};
use mad_capacity::structure::{DegradabilityStatus, is_degradable};
use mad_capacity::{CertificateKind, Decay, TransitionMatrix, certify_capacity};

/// `γ10` plus a top level that keeps `γ33` and splits the rest between the
/// decays to levels 2 and 0.
fn example(g10: f64, g33: f64, share32: f64) -> TransitionMatrix {
    let rest = 1.0 - g33;
    TransitionMatrix::from_decays(
        4,
        &[
            Decay { from: 1, to: 0, p: g10 },
            Decay { from: 3, to: 2, p: rest * share32 },
            Decay { from: 3, to: 0, p: rest * (1.0 - share32) },
        ],
    )
    .unwrap()
}

#[test]
fn example_degradability_quadrant() {
    for (g11, g33, expect) in
        [(0.8, 0.8, true), (0.6, 0.55, true), (0.4, 0.8, false), (0.8, 0.4, false), (0.3, 0.3, false)]
    {
        let v = is_degradable(&example(1.0 - g11, g33, 0.5), 1e-9);
        assert_eq!(v.status == DegradabilityStatus::Degradable, expect, "γ11={g11}, γ33={g33}: {v:?}");
    }
}

#[test]
fn constant_along_gamma33_below_border() {
    let g10 = 0.25;
    let border = certify_capacity(&example(g10, 0.5, 0.5));
    assert_eq!(border.kind, CertificateKind::ExactDegradable);
    let b = border.value.unwrap();
    for g33 in [0.0, 0.15, 0.3, 0.45] {
        let c = certify_capacity(&example(g10, g33, 0.5));
        assert!(c.kind.is_exact(), "γ33={g33}: {:?}", c.kind);
        assert!((c.value.unwrap() - b).abs() <= 1e-6, "γ33={g33}: {:?} vs {b}", c.value);
    }
}

#[test]
fn lower_left_quadrant_is_one() {
    // γ11 = 0.3, γ33 = 0.3 with the decayed weight of level 3 split evenly.
    let c = certify_capacity(&example(0.7, 0.3, 0.5));
    assert!(c.kind.is_exact(), "{:?}", c);
    assert!((c.value.unwrap() - 1.0).abs() <= 1e-6);
}

#[test]
fn trivial_certificates() {
    let id = certify_capacity(&TransitionMatrix::identity(4));
    assert_eq!(id.kind, CertificateKind::ExactDegradable);
    assert!((id.value.unwrap() - 2.0).abs() < 1e-9);
    let adc = TransitionMatrix::from_decays(2, &[Decay { from: 1, to: 0, p: 0.6 }]).unwrap();
    assert_eq!(certify_capacity(&adc).kind, CertificateKind::Zero);
}

#[test]
fn boundary_sequence_values() {
    for n in 0..=3 {
        for k in [1.0, 1.3, 1.7] {
            let s = scan_boundary(n, k, 128, 1e-9).unwrap();
            assert!((s.predicted - (1.0 - k / 2f64.powi(n as i32 + 1))).abs() < 1e-15);
            assert!(s.agrees, "n={n}, k={k}");
        }
    }
}

#[test]
fn slice_extremes() {
    for (g10, expected) in [(0.0, 1.0), (0.5, 0.0)] {
        let mut opts = Mad3Options::new(g10);
        opts.slice_step = 0.1;
        opts.iterations = 2;
        let r = mad3_acge_verification(&opts).unwrap();
        assert!((r.adc_value - expected).abs() < 1e-9);
        assert!(r.values_match);
        assert!(r.slice.iter().all(|p| p.status == SliceStatus::Certified));
    }
}

#[test]
fn slice_interior_values() {
    let mut opts = Mad3Options::new(0.2);
    opts.slice_step = 0.1;
    opts.iterations = 3;
    let r = mad3_acge_verification(&opts).unwrap();
    assert!((r.adc_value - adc_capacity(0.2)).abs() < 1e-12);
    assert!(r.values_match);
    assert!(r.slice.iter().all(|p| p.lower <= r.adc_value + 1e-6));
}
