//! Kicked-cantilever phase-space dynamics.
//!
//! The cantilever is driven by periodic kicks and reduced to the
//! area-preserving standard map in action-angle variables `(I, θ)`:
//!
//! ```text
//! I_{n+1} = I_n − K sin θ_n
//! θ_{n+1} = θ_n + I_{n+1}   (mod 2π)
//! ```
//!
//! This module provides the map itself, translation of physical drive
//! parameters into the dimensionless stochasticity `K`, reconstruction of
//! oscillator coordinates `(x, p)` from `(I, θ)`, and ensemble estimates of
//! the per-kick drift and diffusion coefficients.

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::math;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stochasticity value at which neighbouring stochastic layers start to
/// merge; quoted alongside the regular/chaotic classification.
pub const LAYER_MERGING_THRESHOLD: f64 = 0.9716;

/// A point of the kicked map in action-angle variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    /// Map action `I`. The raw map can drive it negative; see
    /// [`PhasePoint::oscillator_action`].
    pub action: f64,
    /// Angle `θ` in radians, reduced to `[0, 2π)` by every constructor and
    /// map step.
    pub angle: f64,
}

impl PhasePoint {
    /// Validated constructor: requires finite inputs and stores the angle
    /// reduced to `[0, 2π)`.
    pub fn new(action: f64, angle: f64) -> Result<Self> {
        ensure_finite("action", action)?;
        ensure_finite("angle", angle)?;
        Ok(Self {
            action,
            angle: math::reduce_angle(angle),
        })
    }

    /// Non-negative action used wherever `√I` enters a physical formula
    /// (coordinate reconstruction, spin coupling).
    ///
    /// The raw map action is signed; the oscillator lives on `|I|`.
    #[inline]
    pub fn oscillator_action(&self) -> f64 {
        self.action.abs()
    }

    /// The same phase-space point with the action lifted to its
    /// non-negative oscillator value.
    #[inline]
    pub fn lifted(&self) -> Self {
        Self {
            action: self.oscillator_action(),
            angle: self.angle,
        }
    }
}

/// One application of the standard map with stochasticity `k`.
///
/// Returns the next point with the angle reduced to `[0, 2π)`.
pub fn standard_map_step(p: PhasePoint, k: f64) -> Result<PhasePoint> {
    ensure_finite("stochasticity", k)?;
    ensure_finite("action", p.action)?;
    ensure_finite("angle", p.angle)?;
    let action = p.action - k * math::sin(p.angle);
    let angle = math::reduce_angle(p.angle + action);
    ensure_finite("next action", action)?;
    Ok(PhasePoint { action, angle })
}

/// Iterates the standard map for `n_kicks` steps.
///
/// Returns the full orbit of length `n_kicks + 1`, starting with `p0`
/// itself; element `n` is the state after the `n`-th kick.
pub fn iterate_trajectory(p0: PhasePoint, k: f64, n_kicks: usize) -> Result<Vec<PhasePoint>> {
    let mut orbit = Vec::with_capacity(n_kicks + 1);
    let mut p = PhasePoint::new(p0.action, p0.angle)?;
    orbit.push(p);
    for _ in 0..n_kicks {
        p = standard_map_step(p, k)?;
        orbit.push(p);
    }
    Ok(orbit)
}

/// Dynamical regime implied by the stochasticity parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `K < 1`: phase space dominated by invariant curves; bounded action.
    Regular,
    /// `K ≥ 1`: resonances overlap and a connected chaotic sea forms.
    Chaotic,
}

impl Regime {
    /// Classifies a stochasticity value. The boundary `K = 1` is grouped
    /// with the chaotic side.
    pub fn classify(k: f64) -> Self {
        if k < 1.0 {
            Regime::Regular
        } else {
            Regime::Chaotic
        }
    }
}

/// Physical drive parameters from which the stochasticity is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalDrive {
    /// Dimensionless drive strength `ε ≥ 0`.
    pub drive_strength: f64,
    /// Kick period `T > 0`.
    pub kick_period: f64,
    /// Oscillator nonlinearity coefficient `μ > 0`.
    pub nonlinearity: f64,
    /// Effective mass `m > 0`.
    pub mass: f64,
    /// Resonator angular frequency `ω_r > 0`.
    pub resonator_freq: f64,
    /// Reference action `I₀ > 0` at which resonance overlap is evaluated.
    pub initial_action: f64,
}

impl PhysicalDrive {
    /// Stochasticity `K = ε I₀ T · 6πμ / (m² ω_r²)`.
    pub fn stochasticity(&self) -> Result<f64> {
        if self.drive_strength.is_finite() && self.drive_strength >= 0.0 {
            // zero drive is allowed and yields K = 0
        } else {
            return Err(Error::ParamOutOfRange {
                name: "drive_strength",
                value: self.drive_strength,
                requirement: "finite and >= 0",
            });
        }
        ensure_positive("kick_period", self.kick_period)?;
        ensure_positive("nonlinearity", self.nonlinearity)?;
        ensure_positive("mass", self.mass)?;
        ensure_positive("resonator_freq", self.resonator_freq)?;
        ensure_positive("initial_action", self.initial_action)?;
        let k = self.drive_strength * self.initial_action * self.kick_period * 6.0
            * core::f64::consts::PI
            * self.nonlinearity
            / (self.mass * self.mass * self.resonator_freq * self.resonator_freq);
        ensure_finite("stochasticity", k)
    }
}

/// Stochasticity together with its regime classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaosParameter {
    /// The dimensionless stochasticity `K`.
    pub stochasticity: f64,
    /// Regular (`K < 1`) or chaotic (`K ≥ 1`).
    pub regime: Regime,
    /// The layer-merging threshold `K_c = 0.9716`, reported alongside for
    /// context.
    pub merging_threshold: f64,
}

/// Computes the stochasticity from physical drive parameters and classifies
/// the regime.
pub fn chaos_parameter(drive: &PhysicalDrive) -> Result<ChaosParameter> {
    let k = drive.stochasticity()?;
    Ok(ChaosParameter {
        stochasticity: k,
        regime: Regime::classify(k),
        merging_threshold: LAYER_MERGING_THRESHOLD,
    })
}

/// Map parameterization: the stochasticity `K`, optionally backed by the
/// physical drive parameters it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    stochasticity: f64,
    drive: Option<PhysicalDrive>,
}

impl MapParams {
    /// Builds from a directly supplied stochasticity (`K > 0`, finite).
    pub fn from_stochasticity(k: f64) -> Result<Self> {
        ensure_positive("stochasticity", k)?;
        Ok(Self {
            stochasticity: k,
            drive: None,
        })
    }

    /// Builds from physical drive parameters, computing `K` from them.
    pub fn from_drive(drive: PhysicalDrive) -> Result<Self> {
        let k = drive.stochasticity()?;
        Ok(Self {
            stochasticity: k,
            drive: Some(drive),
        })
    }

    /// Builds from both a direct `K` and drive parameters, requiring them to
    /// agree within `1e-9` relative.
    pub fn reconciled(k: f64, drive: PhysicalDrive) -> Result<Self> {
        ensure_positive("stochasticity", k)?;
        let computed = drive.stochasticity()?;
        let scale = k.abs().max(computed.abs()).max(f64::MIN_POSITIVE);
        if (k - computed).abs() / scale > 1e-9 {
            return Err(Error::InconsistentStochasticity {
                given: k,
                computed,
            });
        }
        Ok(Self {
            stochasticity: k,
            drive: Some(drive),
        })
    }

    /// The stochasticity `K`.
    #[inline]
    pub fn stochasticity(&self) -> f64 {
        self.stochasticity
    }

    /// The physical drive parameters, when `K` was derived from them.
    #[inline]
    pub fn drive(&self) -> Option<&PhysicalDrive> {
        self.drive.as_ref()
    }

    /// Regime classification of this parameterization.
    #[inline]
    pub fn regime(&self) -> Regime {
        Regime::classify(self.stochasticity)
    }
}

/// Oscillator coordinates from action-angle variables:
/// `x = √(2I/mω_r) cos θ`, `p = −√(2Iω_r m) sin θ`.
///
/// The action must be non-negative up to rounding: values in `[−1e-12, 0)`
/// are clamped to zero, anything lower is a domain error. Callers holding a
/// raw signed map action lift it first via [`PhasePoint::oscillator_action`].
pub fn reconstruct_xp(p: &PhasePoint, mass: f64, resonator_freq: f64) -> Result<(f64, f64)> {
    ensure_positive("mass", mass)?;
    ensure_positive("resonator_freq", resonator_freq)?;
    ensure_finite("action", p.action)?;
    if p.action < -1e-12 {
        return Err(Error::NegativeAction { value: p.action });
    }
    let action = p.action.max(0.0);
    let x = math::sqrt(2.0 * action / (mass * resonator_freq)) * math::cos(p.angle);
    let momentum = -math::sqrt(2.0 * action * resonator_freq * mass) * math::sin(p.angle);
    Ok((x, momentum))
}

/// Inverse of [`reconstruct_xp`]: recovers `(I, θ)` from oscillator
/// coordinates via `I = (mω_r x² + p²/(mω_r)) / 2`.
pub fn phase_point_from_xp(
    x: f64,
    momentum: f64,
    mass: f64,
    resonator_freq: f64,
) -> Result<PhasePoint> {
    ensure_positive("mass", mass)?;
    ensure_positive("resonator_freq", resonator_freq)?;
    ensure_finite("x", x)?;
    ensure_finite("momentum", momentum)?;
    let u = x * math::sqrt(mass * resonator_freq / 2.0);
    let v = momentum / math::sqrt(2.0 * mass * resonator_freq);
    let action = u * u + v * v;
    let angle = math::reduce_angle(math::atan2(-v, u));
    Ok(PhasePoint { action, angle })
}

/// How ensemble members draw their initial angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleDistribution {
    /// `θ₀ ~ U(0, 2π)`, required for the one-kick drift/diffusion
    /// coefficients.
    Uniform,
    /// Every member starts at the same angle.
    Fixed(f64),
}

/// Ensemble description for drift/diffusion estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    /// Number of independent trajectories (at least 1000).
    pub n_trajectories: usize,
    /// Kicks per trajectory (at least 1).
    pub n_kicks: usize,
    /// RNG seed; member `i` uses ChaCha8 stream `i` of this seed.
    pub seed: u64,
    /// Common initial action `I₀`.
    pub initial_action: f64,
    /// Initial-angle law.
    pub angle_distribution: AngleDistribution,
}

/// Per-kick ensemble moments of the action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickMoment {
    /// Ensemble mean of `I_n`.
    pub mean_action: f64,
    /// Ensemble variance of `I_n`.
    pub var_action: f64,
    /// Ensemble mean of `(I_n − I₀)²`.
    pub msd: f64,
}

/// Drift/diffusion estimate from a kicked-map ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionEstimate {
    /// One-kick drift coefficient `A = ⟨ΔI⟩ / T`.
    pub drift: f64,
    /// Standard error of [`DiffusionEstimate::drift`].
    pub drift_se: f64,
    /// One-kick diffusion coefficient `B = ⟨(ΔI)²⟩ / T`.
    pub diffusion: f64,
    /// Standard error of [`DiffusionEstimate::diffusion`].
    pub diffusion_se: f64,
    /// Least-squares slope of the centered second moment `⟨(I_n − I₀)²⟩`
    /// against elapsed time `nT`.
    pub fitted_slope: f64,
    /// Set when `K < 1`: the diffusive fit is not meaningful in the regular
    /// regime.
    pub regular_warning: bool,
    /// Moments per kick, length `n_kicks + 1` (element 0 is the initial
    /// condition).
    pub moments: Vec<KickMoment>,
}

/// Runs the ensemble and estimates drift/diffusion coefficients and the
/// second-moment growth slope.
///
/// The one-kick coefficients `A` and `B` are ensemble averages over the
/// first kick; uniform initial angles are required so they estimate the
/// angle-averaged conditional moments.
pub fn estimate_diffusion(
    spec: &EnsembleSpec,
    k: f64,
    kick_period: f64,
) -> Result<DiffusionEstimate> {
    if spec.n_trajectories < 1000 {
        return Err(Error::EnsembleTooSmall {
            got: spec.n_trajectories,
            min: 1000,
        });
    }
    if spec.n_kicks == 0 {
        return Err(Error::ParamOutOfRange {
            name: "n_kicks",
            value: 0.0,
            requirement: ">= 1",
        });
    }
    if !matches!(spec.angle_distribution, AngleDistribution::Uniform) {
        return Err(Error::NonUniformEnsembleAngles);
    }
    ensure_finite("initial_action", spec.initial_action)?;
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "stochasticity",
            value: k,
            requirement: "finite and >= 0",
        });
    }
    ensure_positive("kick_period", kick_period)?;

    let n_points = spec.n_kicks + 1;
    let mut sum = vec![0.0f64; n_points];
    let mut sum_sq = vec![0.0f64; n_points];
    let mut sum_dev_sq = vec![0.0f64; n_points];
    // One-kick increment moments for A, B and their standard errors.
    let (mut d1, mut d2, mut d3, mut d4) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);

    for member in 0..spec.n_trajectories {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(member as u64);
        let theta0 = match spec.angle_distribution {
            AngleDistribution::Uniform => rng.random_range(0.0..TAU),
            AngleDistribution::Fixed(theta) => theta,
        };
        let mut p = PhasePoint::new(spec.initial_action, theta0)?;
        for n in 0..n_points {
            if n > 0 {
                p = standard_map_step(p, k)?;
            }
            sum[n] += p.action;
            sum_sq[n] += p.action * p.action;
            let dev = p.action - spec.initial_action;
            sum_dev_sq[n] += dev * dev;
            if n == 1 {
                let d = dev;
                d1 += d;
                d2 += d * d;
                d3 += d * d * d;
                d4 += d * d * d * d;
            }
        }
    }

    let m = spec.n_trajectories as f64;
    let moments: Vec<KickMoment> = (0..n_points)
        .map(|n| {
            let mean = sum[n] / m;
            KickMoment {
                mean_action: mean,
                var_action: (sum_sq[n] / m - mean * mean).max(0.0),
                msd: sum_dev_sq[n] / m,
            }
        })
        .collect();

    let mean_d = d1 / m;
    let var_d = (d2 / m - mean_d * mean_d).max(0.0);
    let mean_d2 = d2 / m;
    let var_d2 = (d4 / m - mean_d2 * mean_d2).max(0.0);
    let _ = d3; // third moment not reported

    // Least-squares slope of msd against elapsed time nT.
    let t_mean = kick_period * (n_points as f64 - 1.0) / 2.0;
    let y_mean = moments.iter().map(|mo| mo.msd).sum::<f64>() / n_points as f64;
    let mut s_tt = 0.0;
    let mut s_ty = 0.0;
    for (n, mo) in moments.iter().enumerate() {
        let dt = n as f64 * kick_period - t_mean;
        s_tt += dt * dt;
        s_ty += dt * (mo.msd - y_mean);
    }
    let fitted_slope = if s_tt > 0.0 { s_ty / s_tt } else { 0.0 };

    Ok(DiffusionEstimate {
        drift: mean_d / kick_period,
        drift_se: math::sqrt(var_d / m) / kick_period,
        diffusion: mean_d2 / kick_period,
        diffusion_se: math::sqrt(var_d2 / m) / kick_period,
        fitted_slope,
        regular_warning: k < 1.0,
        moments,
    })
}
