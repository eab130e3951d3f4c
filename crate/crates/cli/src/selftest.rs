//! A fast subset of the library's consistency checks, runnable from the binary.

use anyhow::anyhow;
use mad_capacity::channel::{as_map, compose};
use mad_capacity::inverse::mad_inverse;
use mad_capacity::maps::unit;
use mad_capacity::random::{seeded, transition_matrix, transition_matrix_with_survival};
use mad_capacity::structure::{DegradabilityStatus, choi_of, is_antidegradable, is_degradable};
use mad_capacity::{Decay, TransitionMatrix, adc_capacity, certify_with};
use rand::Rng;

use crate::{CmdResult, Failure, GlobalOpts};

type Check = (&'static str, Box<dyn Fn(&GlobalOpts) -> Result<(), String>>);

fn adc(g: f64) -> TransitionMatrix {
    TransitionMatrix::from_decays(2, &[Decay { from: 1, to: 0, p: g }]).expect("probability in [0, 1]")
}

fn checks() -> Vec<Check> {
    vec![
        (
            "adc anchors",
            Box::new(|_| {
                let (a, b) = (adc_capacity(0.0), adc_capacity(0.5));
                if (a - 1.0).abs() < 1e-7 && b.abs() < 1e-7 { Ok(()) } else { Err(format!("Q(0) = {a}, Q(1/2) = {b}")) }
            }),
        ),
        (
            "adc classification",
            Box::new(|g| {
                for k in 0..=20 {
                    let gamma = k as f64 / 20.0;
                    let s = is_degradable(&adc(gamma), g.tol_psd).status;
                    let expect_deg = gamma <= 0.5;
                    if (s == DegradabilityStatus::Degradable) != expect_deg && gamma != 0.5 {
                        return Err(format!("γ = {gamma}: {s:?}"));
                    }
                    if is_antidegradable(&adc(gamma)) != (gamma >= 0.5) {
                        return Err(format!("antidegradability wrong at γ = {gamma}"));
                    }
                }
                Ok(())
            }),
        ),
        (
            "composition",
            Box::new(|g| {
                let mut rng = seeded(g.seed);
                for _ in 0..20 {
                    let d = rng.random_range(2..=4);
                    let (a, b) = (transition_matrix(&mut rng, d), transition_matrix(&mut rng, d));
                    let lhs = choi_of(&as_map(&compose(&a, &b).map_err(|e| e.to_string())?));
                    let rhs = choi_of(&as_map(&a).then(as_map(&b)).map_err(|e| e.to_string())?);
                    let dist = (lhs.matrix() - rhs.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                    if dist > 1e-11 {
                        return Err(format!("Choi distance {dist:e}"));
                    }
                }
                Ok(())
            }),
        ),
        (
            "inverse round trip",
            Box::new(|g| {
                let mut rng = seeded(g.seed.wrapping_add(1));
                for _ in 0..20 {
                    let d = rng.random_range(2..=4);
                    let gamma = transition_matrix_with_survival(&mut rng, d, 0.1);
                    let round = as_map(&gamma)
                        .then(mad_inverse(&gamma).map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?;
                    for i in 0..d {
                        for j in 0..d {
                            let e = unit(d, i, j);
                            let out = round.apply(&e).map_err(|e| e.to_string())?;
                            let err = (out - &e).iter().map(|z| z.norm()).fold(0.0, f64::max);
                            if err > 1e-10 {
                                return Err(format!("round-trip error {err:e}"));
                            }
                        }
                    }
                }
                Ok(())
            }),
        ),
        (
            "four-level example, lower-left quadrant",
            Box::new(|g| {
                let gamma = TransitionMatrix::from_decays(
                    4,
                    &[
                        Decay { from: 1, to: 0, p: 0.7 },
                        Decay { from: 3, to: 2, p: 0.35 },
                        Decay { from: 3, to: 0, p: 0.35 },
                    ],
                )
                .map_err(|e| e.to_string())?;
                let c = certify_with(&gamma, &g.certify().map_err(|_| "bad options".to_string())?);
                match c.value {
                    Some(v) if c.kind.is_exact() && (v - 1.0).abs() <= 1e-6 => Ok(()),
                    _ => Err(format!("{:?} {:?}", c.kind, c.value)),
                }
            }),
        ),
    ]
}

pub fn run(g: &GlobalOpts) -> CmdResult {
    g.certify()?;
    let mut failed = 0;
    for (name, check) in checks() {
        match check(g) {
            Ok(()) => println!("PASS {name}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        return Err(Failure::Numeric(anyhow!("{failed} self-test check(s) failed")));
    }
    Ok(())
}
