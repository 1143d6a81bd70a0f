//! Cross-validation of the two spin-evolution paths on genuine kicked-map
//! trajectories, plus long-run stability checks.

use nems_core::cantilever::{iterate_trajectory, PhasePoint};
use nems_core::spin::{
    coupling_chi, evolve_direct, evolve_spectral, floquet_operator, SpinParams, Spinor,
};
use nems_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn lifted_kicks(k: f64, n_kicks: usize, seed: u64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p0 = PhasePoint::new(rng.random_range(0.05..0.6), rng.random_range(0.0..TAU)).unwrap();
    iterate_trajectory(p0, k, n_kicks)
        .unwrap()
        .into_iter()
        .skip(1)
        .map(|p| p.lifted())
        .collect()
}

#[test]
fn spectral_and_direct_paths_agree_on_a_hundred_map_trajectories() {
    let sp = SpinParams::default();
    let psi0 = Spinor::basis0();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = rng.random_range(1..=50usize);
        let k = if trial % 2 == 0 { 5.0 } else { 0.5 };
        let kicks = lifted_kicks(k, n, 1000 + trial as u64);
        let direct = evolve_direct(&psi0, &kicks, &sp).unwrap();
        let spectral = evolve_spectral(&kicks, &sp).unwrap();
        worst = worst.max(spectral.state.distance(direct.last().unwrap()));
    }
    assert!(
        worst < 1e-10,
        "worst spectral/direct mismatch {worst:.3e} exceeds 1e-10"
    );
}

#[test]
fn norm_survives_a_hundred_thousand_chaotic_kicks() {
    let sp = SpinParams::default();
    let kicks = lifted_kicks(5.0, 100_000, 4);
    let states = evolve_direct(&Spinor::basis0(), &kicks, &sp).unwrap();
    let worst = states
        .iter()
        .map(|s| (s.norm() - 1.0).abs())
        .fold(0.0f64, f64::max);
    assert!(
        worst < 1e-10,
        "norm drifted by {worst:.3e} over 1e5 kicks"
    );
}

#[test]
fn every_sampled_operator_along_a_long_run_is_unitary() {
    let sp = SpinParams::default();
    let kicks = lifted_kicks(5.0, 20_000, 6);
    let mut worst = 0.0f64;
    for kick in &kicks {
        let chi = coupling_chi(kick, &sp).unwrap();
        worst = worst.max(floquet_operator(chi, &sp).unitarity_defect());
    }
    assert!(
        worst < 1e-13,
        "worst unitarity defect {worst:.3e} exceeds 1e-13"
    );
}

#[test]
fn general_mixing_angle_supports_direct_but_not_spectral_evolution() {
    let sp = SpinParams {
        mixing_angle: 0.9,
        ..SpinParams::default()
    };
    let kicks = lifted_kicks(5.0, 50, 8);
    let states = evolve_direct(&Spinor::basis0(), &kicks, &sp).unwrap();
    assert_eq!(states.len(), 51);
    for s in &states {
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }
    assert!(matches!(
        evolve_spectral(&kicks, &sp),
        Err(Error::NonResonantMixingAngle { .. })
    ));
}

#[test]
fn raw_signed_trajectories_are_rejected_until_lifted() {
    // A chaotic run drives the raw map action significantly negative; the
    // spin layer must refuse it rather than silently take a square root.
    let p0 = PhasePoint::new(0.3, 0.1).unwrap();
    let raw: Vec<PhasePoint> = iterate_trajectory(p0, 5.0, 200)
        .unwrap()
        .into_iter()
        .skip(1)
        .collect();
    assert!(
        raw.iter().any(|p| p.action < -1e-6),
        "expected the chaotic run to reach negative raw action"
    );
    let sp = SpinParams::default();
    assert!(matches!(
        evolve_direct(&Spinor::basis0(), &raw, &sp),
        Err(Error::NegativeAction { .. })
    ));
    let lifted: Vec<PhasePoint> = raw.iter().map(|p| p.lifted()).collect();
    assert!(evolve_direct(&Spinor::basis0(), &lifted, &sp).is_ok());
}
