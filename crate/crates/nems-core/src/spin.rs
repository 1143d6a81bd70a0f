//! Two-level spin driven by the cantilever trajectory.
//!
//! Each cantilever kick `n` contributes a piecewise-constant Hamiltonian
//!
//! ```text
//! H_n = ½ ω₀ σ_z + (χ_n/2)(cos α · σ_z + sin α · σ_x),
//! χ_n = g √(2 I_n / m ω_r) cos θ_n,
//! ```
//!
//! so the state advances by the exact per-kick Floquet unitary
//! `F_n = exp(−i H_n T)`. Two independent constructions are provided:
//!
//! - [`evolve_direct`]: the time-ordered product of closed-form 2×2 matrix
//!   exponentials, valid for any mixing angle `α`;
//! - [`evolve_spectral`]: the resonant-limit (`α = π/2`) closed form that
//!   expands each propagator in its own eigenbasis and accumulates a
//!   transfer matrix of basis-overlap factors.
//!
//! The two paths agree to near machine precision and cross-validate each
//! other; [`verify_normalization_identities`] additionally checks the
//! closed-form normalization identities on random kick sequences.

use crate::cantilever::PhasePoint;
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::linalg::{self, Mat2, ONE, ZERO};
use crate::math;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Parameters of the spin and of its coupling to the cantilever.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinParams {
    /// Level splitting `ω₀ > 0`.
    pub level_splitting: f64,
    /// Coupling strength `g`.
    pub coupling: f64,
    /// Mixing angle `α` in radians; `π/2` is the resonant limit used by the
    /// spectral construction.
    pub mixing_angle: f64,
    /// Kick period `T > 0`.
    pub kick_period: f64,
    /// Cantilever mass `m > 0` (enters the coupling normalization).
    pub mass: f64,
    /// Resonator frequency `ω_r > 0` (enters the coupling normalization).
    pub resonator_freq: f64,
}

impl SpinParams {
    /// Validated constructor.
    pub fn new(
        level_splitting: f64,
        coupling: f64,
        mixing_angle: f64,
        kick_period: f64,
        mass: f64,
        resonator_freq: f64,
    ) -> Result<Self> {
        ensure_positive("level_splitting", level_splitting)?;
        ensure_finite("coupling", coupling)?;
        ensure_finite("mixing_angle", mixing_angle)?;
        ensure_positive("kick_period", kick_period)?;
        ensure_positive("mass", mass)?;
        ensure_positive("resonator_freq", resonator_freq)?;
        Ok(Self {
            level_splitting,
            coupling,
            mixing_angle,
            kick_period,
            mass,
            resonator_freq,
        })
    }

    /// Whether the mixing angle is the resonant value `π/2` (within 1e-12),
    /// the regime in which the spectral closed form is derived.
    #[inline]
    pub fn is_resonant(&self) -> bool {
        (self.mixing_angle - FRAC_PI_2).abs() <= 1e-12
    }

    /// Coupling degeneracy threshold below which `|χ|` is treated as zero
    /// when forming eigenvectors (avoids dividing by a vanishing `χ`).
    #[inline]
    pub fn coupling_tolerance(&self) -> f64 {
        1e-12 * self.level_splitting
    }
}

impl Default for SpinParams {
    /// Canonical parameter set: `ω₀ = 0.2`, `g = 1`, `α = π/2`, `T = 1`,
    /// `m = 1`, `ω_r = 1`.
    fn default() -> Self {
        Self {
            level_splitting: 0.2,
            coupling: 1.0,
            mixing_angle: FRAC_PI_2,
            kick_period: 1.0,
            mass: 1.0,
            resonator_freq: 1.0,
        }
    }
}

/// Two-component complex state vector `ψ = amp0·|0⟩ + amp1·|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    /// Coefficient of `|0⟩`.
    pub amp0: Complex64,
    /// Coefficient of `|1⟩`.
    pub amp1: Complex64,
}

impl Spinor {
    /// Builds a state from its two complex amplitudes (no normalization
    /// imposed).
    #[inline]
    pub fn new(amp0: Complex64, amp1: Complex64) -> Self {
        Self { amp0, amp1 }
    }

    /// The basis state `|0⟩`.
    #[inline]
    pub fn basis0() -> Self {
        Self::new(ONE, ZERO)
    }

    /// The basis state `|1⟩`.
    #[inline]
    pub fn basis1() -> Self {
        Self::new(ZERO, ONE)
    }

    /// A real-amplitude state `(c0, c1)`.
    #[inline]
    pub fn from_reals(c0: f64, c1: f64) -> Self {
        Self::new(Complex64::new(c0, 0.0), Complex64::new(c1, 0.0))
    }

    /// Squared norm `|amp0|² + |amp1|²`.
    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    /// Norm `‖ψ‖`.
    #[inline]
    pub fn norm(&self) -> f64 {
        math::sqrt(self.norm_sqr())
    }

    /// Inner product `⟨self|other⟩` (conjugate-linear in `self`).
    #[inline]
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }

    /// Euclidean distance `‖self − other‖` over the four real components.
    #[inline]
    pub fn distance(&self, other: &Spinor) -> f64 {
        let d0 = self.amp0 - other.amp0;
        let d1 = self.amp1 - other.amp1;
        math::sqrt(d0.norm_sqr() + d1.norm_sqr())
    }

    /// Phase-insensitive overlap `|⟨self|other⟩|`.
    #[inline]
    pub fn overlap(&self, other: &Spinor) -> f64 {
        math::sqrt(self.inner(other).norm_sqr())
    }

    pub(crate) fn ensure_normalized(&self, tolerance: f64) -> Result<()> {
        let deviation = (self.norm_sqr() - 1.0).abs();
        if deviation > tolerance {
            Err(Error::NotNormalized { deviation })
        } else {
            Ok(())
        }
    }
}

/// A 2×2 unitary matrix (row-major entries).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    entries: Mat2,
}

impl Unitary2 {
    /// The identity operator.
    #[inline]
    pub fn identity() -> Self {
        Self {
            entries: linalg::identity(),
        }
    }

    /// Builds from row-major entries. The caller is responsible for
    /// unitarity; [`Unitary2::unitarity_defect`] measures it.
    #[inline]
    pub fn from_rows(rows: Mat2) -> Self {
        Self { entries: rows }
    }

    /// Entry at `(row, col)`.
    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    /// Row-major entries.
    #[inline]
    pub fn rows(&self) -> &Mat2 {
        &self.entries
    }

    /// Applies the operator to a state.
    #[inline]
    pub fn apply(&self, psi: &Spinor) -> Spinor {
        let (a0, a1) = linalg::apply(&self.entries, psi.amp0, psi.amp1);
        Spinor::new(a0, a1)
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    #[inline]
    pub fn compose(&self, rhs: &Unitary2) -> Unitary2 {
        Unitary2 {
            entries: linalg::mul(&self.entries, &rhs.entries),
        }
    }

    /// Conjugate transpose.
    #[inline]
    pub fn adjoint(&self) -> Unitary2 {
        Unitary2 {
            entries: linalg::adjoint(&self.entries),
        }
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let product = linalg::mul(&linalg::adjoint(&self.entries), &self.entries);
        linalg::max_abs_diff(&product, &linalg::identity())
    }

    /// Determinant.
    #[inline]
    pub fn determinant(&self) -> Complex64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }
}

/// A traceless Hermitian generator `z·σ_z + x·σ_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian2 {
    /// Coefficient of `σ_z`.
    pub z_coeff: f64,
    /// Coefficient of `σ_x`.
    pub x_coeff: f64,
}

impl Hermitian2 {
    /// Matrix form `[[z, x], [x, −z]]`.
    #[inline]
    pub fn matrix(&self) -> Mat2 {
        let z = Complex64::new(self.z_coeff, 0.0);
        let x = Complex64::new(self.x_coeff, 0.0);
        [[z, x], [x, -z]]
    }

    /// Magnitude of the eigenvalues, `√(z² + x²)`.
    #[inline]
    pub fn eigenvalue_magnitude(&self) -> f64 {
        math::hypot(self.z_coeff, self.x_coeff)
    }

    /// Eigenvalue pair `(+√(z²+x²), −√(z²+x²))`.
    #[inline]
    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = self.eigenvalue_magnitude();
        (m, -m)
    }

    /// Expectation value `⟨ψ|H|ψ⟩` (real by hermiticity).
    pub fn expectation(&self, psi: &Spinor) -> f64 {
        let pop = psi.amp0.norm_sqr() - psi.amp1.norm_sqr();
        let cross = (psi.amp0.conj() * psi.amp1).re;
        self.z_coeff * pop + 2.0 * self.x_coeff * cross
    }
}

/// Spin-cantilever coupling at one kick:
/// `χ = g √(2 I / m ω_r) cos θ`.
///
/// The action must be non-negative up to rounding (`≥ −1e-12`, clamped to
/// zero); raw signed map actions are lifted by the caller via
/// [`PhasePoint::oscillator_action`].
pub fn coupling_chi(p: &PhasePoint, sp: &SpinParams) -> Result<f64> {
    ensure_finite("action", p.action)?;
    if p.action < -1e-12 {
        return Err(Error::NegativeAction { value: p.action });
    }
    let action = p.action.max(0.0);
    Ok(sp.coupling * math::sqrt(2.0 * action / (sp.mass * sp.resonator_freq)) * math::cos(p.angle))
}

/// Per-kick Hamiltonian
/// `H = ½ ω₀ σ_z + (χ/2)(cos α · σ_z + sin α · σ_x)`.
pub fn kick_hamiltonian(chi: f64, sp: &SpinParams) -> Hermitian2 {
    Hermitian2 {
        z_coeff: 0.5 * (sp.level_splitting + chi * math::cos(sp.mixing_angle)),
        x_coeff: 0.5 * chi * math::sin(sp.mixing_angle),
    }
}

/// Exact per-kick propagator `F = exp(−i H T)` via the half-angle closed
/// form for a traceless 2×2 generator:
/// `F = cos(ωT)·1 − i sin(ωT)·(H/ω)` with `ω = √(z² + x²)`.
pub fn floquet_operator(chi: f64, sp: &SpinParams) -> Unitary2 {
    let h = kick_hamiltonian(chi, sp);
    let omega = h.eigenvalue_magnitude();
    if omega == 0.0 {
        return Unitary2::identity();
    }
    let phi = omega * sp.kick_period;
    let (c, s) = (math::cos(phi), math::sin(phi));
    let nz = h.z_coeff / omega;
    let nx = h.x_coeff / omega;
    Unitary2::from_rows([
        [
            Complex64::new(c, -s * nz),
            Complex64::new(0.0, -s * nx),
        ],
        [
            Complex64::new(0.0, -s * nx),
            Complex64::new(c, s * nz),
        ],
    ])
}

/// Eigen-decomposition of one resonant (`α = π/2`) kick propagator.
///
/// The quasiphase is `φ = √(χ² + ω₀²)·T/2` and the eigenvector parameters
/// follow `k = (ω₀ + √(χ² + ω₀²))/χ`, `η = k/√(1+k²)`, `ξ = 1/√(1+k²)`,
/// with the degenerate `χ → 0` limit `(η, ξ) = (1, 0)` taken explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickEigensystem {
    /// The coupling value `χ` of this kick.
    pub coupling_value: f64,
    /// Quasiphase `φ = √(χ² + ω₀²)·T/2`.
    pub quasiphase: f64,
    /// Eigenvector ratio `k`; `+∞` in the degenerate `χ → 0` limit.
    pub ratio: f64,
    /// Eigenvector component `η` (`η² + ξ² = 1`).
    pub eta: f64,
    /// Eigenvector component `ξ`.
    pub xi: f64,
}

impl KickEigensystem {
    /// Eigenstate with eigenvalue `+½√(χ²+ω₀²)`: `η|0⟩ + ξ|1⟩`.
    #[inline]
    pub fn plus_state(&self) -> Spinor {
        Spinor::from_reals(self.eta, self.xi)
    }

    /// Eigenstate with eigenvalue `−½√(χ²+ω₀²)`: `ξ|0⟩ − η|1⟩`.
    #[inline]
    pub fn minus_state(&self) -> Spinor {
        Spinor::from_reals(self.xi, -self.eta)
    }

    /// The propagator rebuilt spectrally:
    /// `e^{−iφ}|+⟩⟨+| + e^{+iφ}|−⟩⟨−|`.
    pub fn operator(&self) -> Unitary2 {
        let (eta, xi) = (self.eta, self.xi);
        let em = linalg::cis(-self.quasiphase);
        let ep = linalg::cis(self.quasiphase);
        let m00 = em * (eta * eta) + ep * (xi * xi);
        let m11 = em * (xi * xi) + ep * (eta * eta);
        let m01 = (em - ep) * (eta * xi);
        Unitary2::from_rows([[m00, m01], [m01, m11]])
    }
}

/// Builds the resonant-kick eigensystem for coupling `χ`.
///
/// Fails with [`Error::NonResonantMixingAngle`] unless `α = π/2`; below the
/// coupling degeneracy threshold the analytic division by `χ` is bypassed
/// and the exact limit `(η, ξ) = (1, 0)` is returned.
pub fn kick_eigensystem(chi: f64, sp: &SpinParams) -> Result<KickEigensystem> {
    if !sp.is_resonant() {
        return Err(Error::NonResonantMixingAngle {
            alpha: sp.mixing_angle,
        });
    }
    ensure_finite("coupling chi", chi)?;
    let splitting = math::hypot(chi, sp.level_splitting);
    let quasiphase = splitting * sp.kick_period / 2.0;
    if chi.abs() < sp.coupling_tolerance() {
        return Ok(KickEigensystem {
            coupling_value: chi,
            quasiphase,
            ratio: f64::INFINITY,
            eta: 1.0,
            xi: 0.0,
        });
    }
    let ratio = (sp.level_splitting + splitting) / chi;
    let denom = math::sqrt(1.0 + ratio * ratio);
    Ok(KickEigensystem {
        coupling_value: chi,
        quasiphase,
        ratio,
        eta: ratio / denom,
        xi: 1.0 / denom,
    })
}

/// Direct Floquet evolution: `ψ_n = F_n ψ_{n−1}`.
///
/// `kicks` holds one phase-space point per kick — for an orbit produced by
/// [`crate::cantilever::iterate_trajectory`], pass the points after the
/// initial condition, lifted to non-negative action. Returns the state
/// sequence of length `kicks.len() + 1` starting with `psi0`. No
/// renormalization is performed; a norm drift beyond `1e-9` is reported as
/// an error rather than silently corrected.
pub fn evolve_direct(psi0: &Spinor, kicks: &[PhasePoint], sp: &SpinParams) -> Result<Vec<Spinor>> {
    psi0.ensure_normalized(1e-9)?;
    let mut states = Vec::with_capacity(kicks.len() + 1);
    let mut psi = *psi0;
    states.push(psi);
    for kick in kicks {
        let chi = coupling_chi(kick, sp)?;
        let op = floquet_operator(chi, sp);
        psi = op.apply(&psi);
        let drift = (psi.norm() - 1.0).abs();
        if drift > 1e-9 {
            return Err(Error::NormDrift {
                drift,
                limit: 1e-9,
            });
        }
        states.push(psi);
    }
    Ok(states)
}

/// Cumulative propagators `[1, F₁, F₂F₁, …]` (length `kicks.len() + 1`).
///
/// Useful for evolving mixed states: `ρ_n = U_n ρ₀ U_n†`.
pub fn cumulative_propagators(kicks: &[PhasePoint], sp: &SpinParams) -> Result<Vec<Unitary2>> {
    let mut ops = Vec::with_capacity(kicks.len() + 1);
    let mut u = Unitary2::identity();
    ops.push(u);
    for kick in kicks {
        let chi = coupling_chi(kick, sp)?;
        u = floquet_operator(chi, sp).compose(&u);
        ops.push(u);
    }
    Ok(ops)
}

/// Accumulated product of per-kick basis-overlap factors in the spectral
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    /// The accumulated 2×2 matrix (unitary: each factor is a relative basis
    /// rotation times eigenphases).
    pub matrix: Unitary2,
}

/// Result of the resonant closed-form evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEvolution {
    /// The evolved state after the final kick.
    pub state: Spinor,
    /// The accumulated transfer matrix (identity for fewer than two kicks).
    pub transfer: TransferMatrix,
    /// Coefficients `(c₊, c₋)` of the state in the final kick's eigenbasis
    /// (`(1, 0)` for the degenerate zero-kick case).
    pub coefficients: (Complex64, Complex64),
    /// Per-kick eigensystems, one per kick in order.
    pub eigensystems: Vec<KickEigensystem>,
}

/// Closed-form spectral evolution of `ψ₀ = |0⟩` under resonant kicks.
///
/// Each propagator is expanded in its own eigenbasis; consecutive
/// eigenbases are connected by overlap factors
///
/// ```text
/// a_n = η_n η_{n−1} + ξ_n ξ_{n−1},   b_n = η_n ξ_{n−1} − ξ_n η_{n−1},
/// G_n = [[e^{−iφ_n} a_n, e^{−iφ_n} b_n], [−e^{+iφ_n} b_n, e^{+iφ_n} a_n]],
/// ```
///
/// accumulated in time order into `𝒜 = G_N ⋯ G₂` (latest factor leftmost).
/// The first kick contributes the weight vector
/// `w = (η₁ e^{−iφ₁}, ξ₁ e^{+iφ₁})`; then `(c₊, c₋) = 𝒜·w` and
/// `ψ_N = c₊(η_N|0⟩ + ξ_N|1⟩) + c₋(ξ_N|0⟩ − η_N|1⟩)`.
pub fn evolve_spectral(kicks: &[PhasePoint], sp: &SpinParams) -> Result<SpectralEvolution> {
    if !sp.is_resonant() {
        return Err(Error::NonResonantMixingAngle {
            alpha: sp.mixing_angle,
        });
    }
    let mut eigensystems = Vec::with_capacity(kicks.len());
    for kick in kicks {
        let chi = coupling_chi(kick, sp)?;
        eigensystems.push(kick_eigensystem(chi, sp)?);
    }
    if eigensystems.is_empty() {
        return Ok(SpectralEvolution {
            state: Spinor::basis0(),
            transfer: TransferMatrix {
                matrix: Unitary2::identity(),
            },
            coefficients: (ONE, ZERO),
            eigensystems,
        });
    }

    let first = &eigensystems[0];
    let w0 = linalg::cis(-first.quasiphase) * first.eta;
    let w1 = linalg::cis(first.quasiphase) * first.xi;

    let mut transfer = Unitary2::identity();
    for n in 1..eigensystems.len() {
        let prev = &eigensystems[n - 1];
        let cur = &eigensystems[n];
        let a = cur.eta * prev.eta + cur.xi * prev.xi;
        let b = cur.eta * prev.xi - cur.xi * prev.eta;
        let em = linalg::cis(-cur.quasiphase);
        let ep = linalg::cis(cur.quasiphase);
        let g = Unitary2::from_rows([[em * a, em * b], [-(ep * b), ep * a]]);
        transfer = g.compose(&transfer);
    }

    let (c_plus, c_minus) = linalg::apply(transfer.rows(), w0, w1);
    let last = &eigensystems[eigensystems.len() - 1];
    let state = Spinor::new(
        c_plus * last.eta + c_minus * last.xi,
        c_plus * last.xi - c_minus * last.eta,
    );
    let drift = (state.norm() - 1.0).abs();
    if drift > 1e-10 {
        return Err(Error::NormDrift {
            drift,
            limit: 1e-10,
        });
    }
    Ok(SpectralEvolution {
        state,
        transfer: TransferMatrix { matrix: transfer },
        coefficients: (c_plus, c_minus),
        eigensystems,
    })
}

/// Numerical check report for the closed-form normalization identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationReport {
    /// Number of kicks per random sequence.
    pub kick_count: usize,
    /// Number of random sequences evaluated.
    pub draws: usize,
    /// Worst deviation of `|c₊|² + |c₋|²` from 1 over the draws.
    pub max_norm_residual: f64,
    /// Worst componentwise mismatch between the spectral and direct final
    /// states over the draws.
    pub max_direct_mismatch: f64,
    /// Worst norm deviation for sequences of identical kicks, where the
    /// transfer matrix is diagonal and the norm is exact.
    pub identical_kick_residual: f64,
    /// Worst off-diagonal transfer-matrix magnitude in the identical-kick
    /// case (exactly zero analytically).
    pub identical_kick_offdiagonal: f64,
    /// For three-kick sequences: worst deviation of the squared norm from
    /// the factored product `(η₁²+ξ₁²)²(η₂²+ξ₂²)²(η₃²+ξ₃²)`.
    pub factored_residual: Option<f64>,
}

impl NormalizationReport {
    /// The largest of all tracked residuals.
    pub fn max_residual(&self) -> f64 {
        let mut worst = self
            .max_norm_residual
            .max(self.max_direct_mismatch)
            .max(self.identical_kick_residual)
            .max(self.identical_kick_offdiagonal);
        if let Some(f) = self.factored_residual {
            worst = worst.max(f);
        }
        worst
    }
}

/// A phase-space point whose coupling `χ` (for unit `g`, `m`, `ω_r`)
/// equals the requested value: `I = χ²/2` with `θ = 0` or `π`.
pub fn kick_for_coupling(chi: f64) -> PhasePoint {
    PhasePoint {
        action: chi * chi / 2.0,
        angle: if chi < 0.0 { core::f64::consts::PI } else { 0.0 },
    }
}

/// Evaluates the closed-form normalization identities on 1000 random kick
/// sequences of length `kick_count` (couplings drawn uniformly from
/// `[−4, 4]`, canonical spin parameters) and reports the worst residuals.
///
/// Checked identities: `|c₊|² + |c₋|² = 1` for every sequence; spectral
/// equals direct evolution; identical kicks give a diagonal transfer matrix
/// and an exactly normalized state; three-kick sequences reproduce the
/// factored norm product. A residual above `1e-9` is an error (it would
/// signal a transcription bug in the closed form).
pub fn verify_normalization_identities(kick_count: usize, seed: u64) -> Result<NormalizationReport> {
    if kick_count == 0 || kick_count > 20 {
        return Err(Error::ParamOutOfRange {
            name: "kick_count",
            value: kick_count as f64,
            requirement: "1..=20",
        });
    }
    let draws = 1000usize;
    let sp = SpinParams::default();
    let psi0 = Spinor::basis0();
    let mut report = NormalizationReport {
        kick_count,
        draws,
        max_norm_residual: 0.0,
        max_direct_mismatch: 0.0,
        identical_kick_residual: 0.0,
        identical_kick_offdiagonal: 0.0,
        factored_residual: if kick_count == 3 { Some(0.0) } else { None },
    };

    let mut kicks = Vec::with_capacity(kick_count);
    for draw in 0..draws {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(draw as u64);
        kicks.clear();
        for _ in 0..kick_count {
            kicks.push(kick_for_coupling(rng.random_range(-4.0..4.0)));
        }

        let spectral = evolve_spectral(&kicks, &sp)?;
        let (c_plus, c_minus) = spectral.coefficients;
        let norm_residual = (c_plus.norm_sqr() + c_minus.norm_sqr() - 1.0).abs();
        report.max_norm_residual = report.max_norm_residual.max(norm_residual);

        let direct = evolve_direct(&psi0, &kicks, &sp)?;
        let mismatch = spectral.state.distance(direct.last().unwrap());
        report.max_direct_mismatch = report.max_direct_mismatch.max(mismatch);

        // Identical-kick sequence built from this draw's first coupling.
        let same: Vec<PhasePoint> = core::iter::repeat(kicks[0]).take(kick_count).collect();
        let same_spectral = evolve_spectral(&same, &sp)?;
        report.identical_kick_residual = report
            .identical_kick_residual
            .max((same_spectral.state.norm_sqr() - 1.0).abs());
        let t = same_spectral.transfer.matrix;
        let offdiag = math::sqrt(
            t.entry(0, 1)
                .norm_sqr()
                .max(t.entry(1, 0).norm_sqr()),
        );
        report.identical_kick_offdiagonal = report.identical_kick_offdiagonal.max(offdiag);

        if kick_count == 3 {
            let e = &spectral.eigensystems;
            let f1 = e[0].eta * e[0].eta + e[0].xi * e[0].xi;
            let f2 = e[1].eta * e[1].eta + e[1].xi * e[1].xi;
            let f3 = e[2].eta * e[2].eta + e[2].xi * e[2].xi;
            let factored = f1 * f1 * f2 * f2 * f3;
            let residual = (spectral.state.norm_sqr() - factored).abs();
            let worst = report.factored_residual.unwrap_or(0.0).max(residual);
            report.factored_residual = Some(worst);
        }
    }

    let residual = report.max_residual();
    if residual > 1e-9 {
        return Err(Error::IdentityViolation {
            residual,
            limit: 1e-9,
        });
    }
    Ok(report)
}
