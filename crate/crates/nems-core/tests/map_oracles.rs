//! Numerical oracles for the kicked-map layer: finite-difference area
//! preservation, regime contrast, and Monte Carlo diffusion estimates
//! checked against quadrature values.

use nems_core::cantilever::{
    estimate_diffusion, iterate_trajectory, standard_map_step, AngleDistribution, EnsembleSpec,
    PhasePoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Shortest signed angular difference, for differentiating the reduced
/// angle across the 2π seam.
fn wrap_signed(d: f64) -> f64 {
    d - TAU * (d / TAU).round()
}

/// Finite-difference Jacobian determinant of one map step.
///
/// The action update is linear in `I` and the angle update adds the new
/// action to `θ`, so the sinc factor from differencing `sin θ` cancels
/// identically in the determinant and only rounding survives; a generous
/// step size keeps that rounding small.
fn jacobian_determinant(p: PhasePoint, k: f64, h: f64) -> f64 {
    let step = |action: f64, angle: f64| -> (f64, f64) {
        let next = standard_map_step(PhasePoint { action, angle }, k).unwrap();
        (next.action, next.angle)
    };
    let (ip, tp) = step(p.action + h, p.angle);
    let (im, tm) = step(p.action - h, p.angle);
    let d_i_d_i = (ip - im) / (2.0 * h);
    let d_t_d_i = wrap_signed(tp - tm) / (2.0 * h);
    let (ip, tp) = step(p.action, p.angle + h);
    let (im, tm) = step(p.action, p.angle - h);
    let d_i_d_t = (ip - im) / (2.0 * h);
    let d_t_d_t = wrap_signed(tp - tm) / (2.0 * h);
    d_i_d_i * d_t_d_t - d_i_d_t * d_t_d_i
}

#[test]
fn map_step_is_area_preserving_at_a_thousand_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = PhasePoint {
            action: rng.random_range(-6.0..6.0),
            angle: rng.random_range(0.0..TAU),
        };
        let k = rng.random_range(0.0..8.0);
        let det = jacobian_determinant(p, k, 0.05);
        worst = worst.max((det - 1.0).abs());
    }
    assert!(
        worst < 1e-12,
        "worst |det J - 1| = {worst:.3e} exceeds 1e-12"
    );
}

#[test]
fn regular_orbit_stays_bounded_while_chaotic_ensemble_spreads() {
    // Regular side: single orbit at K = 0.5 keeps its action excursion
    // small over ten thousand kicks.
    let p0 = PhasePoint::new(0.3, 0.1).unwrap();
    let orbit = iterate_trajectory(p0, 0.5, 10_000).unwrap();
    let max_excursion = orbit
        .iter()
        .map(|p| (p.action - 0.3).abs())
        .fold(0.0f64, f64::max);
    assert!(
        max_excursion < 1.5,
        "regular orbit wandered by {max_excursion}"
    );

    // Chaotic side: a thousand-member ensemble at K = 5 spreads its action
    // across phase space far beyond the regular excursion.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut spread = 0.0f64;
    for _ in 0..1000 {
        let start = PhasePoint::new(0.3, rng.random_range(0.0..TAU)).unwrap();
        let traj = iterate_trajectory(start, 5.0, 1000).unwrap();
        spread = spread.max((traj.last().unwrap().action - 0.3).abs());
    }
    assert!(
        spread > 10.0 * max_excursion,
        "chaotic spread {spread} not much larger than regular excursion {max_excursion}"
    );
}

/// Simpson-rule quadrature of `∫₀^{2π} (K sin θ)² dθ / 2π`, the
/// angle-averaged one-kick squared action change.
fn quadrature_second_moment(k: f64) -> f64 {
    let n = 2000usize; // even
    let h = TAU / n as f64;
    let f = |theta: f64| {
        let s = k * theta.sin();
        s * s
    };
    let mut acc = f(0.0) + f(TAU);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0 / TAU
}

#[test]
fn one_kick_moments_match_quadrature_within_standard_errors() {
    let spec = EnsembleSpec {
        n_trajectories: 20_000,
        n_kicks: 1,
        seed: 11,
        initial_action: 0.3,
        angle_distribution: AngleDistribution::Uniform,
    };
    let est = estimate_diffusion(&spec, 5.0, 1.0).unwrap();
    let expected_b = quadrature_second_moment(5.0);
    assert!(
        (expected_b - 12.5).abs() < 1e-9,
        "quadrature sanity: got {expected_b}"
    );
    assert!(
        est.drift.abs() < 3.0 * est.drift_se,
        "drift {} not within 3 SE ({}) of zero",
        est.drift,
        est.drift_se
    );
    assert!(
        (est.diffusion - expected_b).abs() < 3.0 * est.diffusion_se,
        "diffusion {} not within 3 SE ({}) of {expected_b}",
        est.diffusion,
        est.diffusion_se
    );
    assert!(!est.regular_warning);
}

#[test]
fn second_moment_growth_slope_matches_quasilinear_theory_within_factor_two() {
    let spec = EnsembleSpec {
        n_trajectories: 10_000,
        n_kicks: 200,
        seed: 13,
        initial_action: 0.3,
        angle_distribution: AngleDistribution::Uniform,
    };
    let est = estimate_diffusion(&spec, 5.0, 1.0).unwrap();
    let theory = 5.0 * 5.0 / 2.0;
    assert!(
        est.fitted_slope > theory / 2.0 && est.fitted_slope < theory * 2.0,
        "fitted slope {} outside factor 2 of {theory}",
        est.fitted_slope
    );
    assert_eq!(est.moments.len(), 201);
    assert_eq!(est.moments[0].msd, 0.0);
}

#[test]
fn kick_period_scales_the_coefficients_but_not_the_map() {
    let spec = EnsembleSpec {
        n_trajectories: 2_000,
        n_kicks: 1,
        seed: 17,
        initial_action: 0.3,
        angle_distribution: AngleDistribution::Uniform,
    };
    let unit = estimate_diffusion(&spec, 5.0, 1.0).unwrap();
    let half = estimate_diffusion(&spec, 5.0, 0.5).unwrap();
    assert!((half.diffusion - 2.0 * unit.diffusion).abs() < 1e-9);
    assert_eq!(half.moments, unit.moments, "moments are period-independent");
}
