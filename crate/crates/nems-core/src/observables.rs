//! Diagnostics built on the kicked-map and spin-evolution layers: Pauli
//! expectation values, density matrices and relative-entropy coherence,
//! recurrence distances, discrete Fourier power spectra, level-spacing
//! statistics, Hamiltonian correlations, freezing runs, and detection of
//! state recurrences whose observables fail to recur.
//!
//! Operations with a `_spectral` suffix evaluate the closed-form
//! eigenbasis expansions coming out of [`crate::spin::evolve_spectral`];
//! they serve as independent cross-checks of the direct computations.

use crate::cantilever::PhasePoint;
use crate::error::{ensure_positive, Error, Result};
use crate::linalg::{self, Mat2, ZERO};
use crate::math;
use crate::spin::{
    coupling_chi, kick_hamiltonian, SpectralEvolution, SpinParams, Spinor, Unitary2,
};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;

/// The three Pauli expectation values of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliExpectations {
    /// `⟨σ_x⟩`
    pub x: f64,
    /// `⟨σ_y⟩`
    pub y: f64,
    /// `⟨σ_z⟩`
    pub z: f64,
}

impl PauliExpectations {
    /// Euclidean length of the expectation vector (1 for pure states).
    #[inline]
    pub fn norm(&self) -> f64 {
        math::sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
    }

    /// Euclidean distance to another expectation vector.
    #[inline]
    pub fn distance(&self, other: &PauliExpectations) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        math::sqrt(dx * dx + dy * dy + dz * dz)
    }
}

/// Pauli expectation values `⟨ψ|σ_α|ψ⟩` of a normalized state.
pub fn pauli_expectations(psi: &Spinor) -> Result<PauliExpectations> {
    psi.ensure_normalized(1e-6)?;
    let cross = psi.amp0.conj() * psi.amp1;
    Ok(PauliExpectations {
        x: 2.0 * cross.re,
        y: 2.0 * cross.im,
        z: psi.amp0.norm_sqr() - psi.amp1.norm_sqr(),
    })
}

/// Pauli expectations evaluated through the closed-form eigenbasis
/// expansion: `⟨σ⟩ = Σ_ab c_a* c_b ⟨φ_a|σ|φ_b⟩` with the final kick's
/// eigenstates `|φ_±⟩` and the transfer-matrix coefficients `c_±`.
pub fn pauli_expectations_spectral(evolution: &SpectralEvolution) -> Result<PauliExpectations> {
    let Some(last) = evolution.eigensystems.last() else {
        return pauli_expectations(&evolution.state);
    };
    let (eta, xi) = (last.eta, last.xi);
    let two_ex = 2.0 * eta * xi;
    let diff = xi * xi - eta * eta;
    let i = Complex64::new(0.0, 1.0);
    let re = Complex64::new(1.0, 0.0);
    let m_x: Mat2 = [
        [re * two_ex, re * diff],
        [re * diff, re * -two_ex],
    ];
    let m_y: Mat2 = [[ZERO, i], [-i, ZERO]];
    let m_z: Mat2 = [
        [re * -diff, re * two_ex],
        [re * two_ex, re * diff],
    ];
    let (c_plus, c_minus) = evolution.coefficients;
    let project = |m: &Mat2| -> f64 { linalg::expectation(m, c_plus, c_minus).re };
    Ok(PauliExpectations {
        x: project(&m_x),
        y: project(&m_y),
        z: project(&m_z),
    })
}

/// A validated 2×2 density matrix (Hermitian, unit trace, positive
/// semidefinite up to rounding).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    entries: Mat2,
}

impl DensityMatrix2 {
    /// Validates and wraps row-major entries: hermiticity and unit trace
    /// within `1e-12`, eigenvalues within `[−1e-10, 1 + 1e-10]`.
    pub fn new(entries: Mat2) -> Result<Self> {
        let herm = (entries[0][1] - entries[1][0].conj()).norm_sqr();
        let diag_imag = entries[0][0].im.abs().max(entries[1][1].im.abs());
        if math::sqrt(herm) > 1e-12 || diag_imag > 1e-12 {
            return Err(Error::InvalidDensityMatrix {
                reason: "not Hermitian",
                residual: math::sqrt(herm).max(diag_imag),
            });
        }
        let trace = entries[0][0].re + entries[1][1].re;
        if (trace - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDensityMatrix {
                reason: "trace differs from 1",
                residual: (trace - 1.0).abs(),
            });
        }
        let rho = Self { entries };
        let (e_plus, e_minus) = rho.eigenvalues();
        if e_minus < -1e-10 || e_plus > 1.0 + 1e-10 {
            return Err(Error::InvalidDensityMatrix {
                reason: "eigenvalue outside [0, 1]",
                residual: (-e_minus).max(e_plus - 1.0),
            });
        }
        Ok(rho)
    }

    /// Pure-state density matrix `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &Spinor) -> Result<Self> {
        psi.ensure_normalized(1e-9)?;
        let entries = [
            [
                psi.amp0 * psi.amp0.conj(),
                psi.amp0 * psi.amp1.conj(),
            ],
            [
                psi.amp1 * psi.amp0.conj(),
                psi.amp1 * psi.amp1.conj(),
            ],
        ];
        Self::new(entries)
    }

    /// Convex mixture `Σ wᵢ ρᵢ`; weights must be non-negative and sum to 1
    /// within `1e-12`.
    pub fn mixture(components: &[(f64, DensityMatrix2)]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptySeries);
        }
        let mut total = 0.0;
        let mut entries = [[ZERO; 2]; 2];
        for (w, rho) in components {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::ParamOutOfRange {
                    name: "mixture weight",
                    value: *w,
                    requirement: "finite and >= 0",
                });
            }
            total += w;
            for r in 0..2 {
                for c in 0..2 {
                    entries[r][c] += rho.entries[r][c] * *w;
                }
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::ParamOutOfRange {
                name: "mixture weight sum",
                value: total,
                requirement: "sums to 1 within 1e-12",
            });
        }
        Self::new(entries)
    }

    /// Conjugation `U ρ U†`.
    pub fn evolve(&self, u: &Unitary2) -> Result<Self> {
        let prod = linalg::mul(u.rows(), &self.entries);
        let rotated = linalg::mul(&prod, &linalg::adjoint(u.rows()));
        Self::new(rotated)
    }

    /// Entry at `(row, col)`.
    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    /// Population of `|0⟩` (real diagonal).
    #[inline]
    pub fn rho11(&self) -> f64 {
        self.entries[0][0].re
    }

    /// Population of `|1⟩` (real diagonal).
    #[inline]
    pub fn rho22(&self) -> f64 {
        self.entries[1][1].re
    }

    /// Eigenvalue pair `E± = ½(ρ11 + ρ22 ± √((ρ11 − ρ22)² + 4 ρ12 ρ21))`,
    /// ordered `(E₊, E₋)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let d = self.rho11() - self.rho22();
        let cross = (self.entries[0][1] * self.entries[1][0]).re.max(0.0);
        let gap = math::sqrt(d * d + 4.0 * cross);
        let trace = self.rho11() + self.rho22();
        (0.5 * (trace + gap), 0.5 * (trace - gap))
    }

    /// Pauli expectations `tr(ρ σ_α)`.
    pub fn pauli_expectations(&self) -> PauliExpectations {
        PauliExpectations {
            x: (self.entries[0][1] + self.entries[1][0]).re,
            y: (self.entries[1][0] - self.entries[0][1]).im,
            z: self.rho11() - self.rho22(),
        }
    }
}

/// Density matrix of a pure state (outer-product construction).
pub fn density_matrix(psi: &Spinor) -> Result<DensityMatrix2> {
    DensityMatrix2::from_pure(psi)
}

/// Density matrix assembled from the closed-form expansion: each pair of
/// eigenbasis coefficients contributes `c_a c_b* |φ_a⟩⟨φ_b|` with the final
/// kick's real eigenvectors.
pub fn density_matrix_spectral(evolution: &SpectralEvolution) -> Result<DensityMatrix2> {
    let Some(last) = evolution.eigensystems.last() else {
        return DensityMatrix2::from_pure(&evolution.state);
    };
    let vectors = [[last.eta, last.xi], [last.xi, -last.eta]];
    let coeff = [evolution.coefficients.0, evolution.coefficients.1];
    let mut entries = [[ZERO; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let weight = coeff[a] * coeff[b].conj();
            for r in 0..2 {
                for c in 0..2 {
                    entries[r][c] += weight * (vectors[a][r] * vectors[b][c]);
                }
            }
        }
    }
    DensityMatrix2::new(entries)
}

fn xlnx(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * math::ln(t)
    }
}

/// Relative entropy of coherence
/// `D = E₊ ln E₊ + E₋ ln E₋ − ρ11 ln ρ11 − ρ22 ln ρ22` (natural log,
/// `0·ln 0 ≡ 0`), where `E±` are the density-matrix eigenvalues.
///
/// `D ∈ [0, ln 2]`; it vanishes exactly for diagonal `ρ`. Rounding slack
/// below `1e-12` on the lower bound is clamped to zero.
pub fn coherence_relative_entropy(rho: &DensityMatrix2) -> Result<f64> {
    let (e_plus, e_minus) = rho.eigenvalues();
    if e_minus < -1e-10 {
        return Err(Error::InvalidDensityMatrix {
            reason: "negative eigenvalue",
            residual: -e_minus,
        });
    }
    let e_plus = e_plus.clamp(0.0, 1.0);
    let e_minus = e_minus.clamp(0.0, 1.0);
    let p1 = rho.rho11().clamp(0.0, 1.0);
    let p2 = rho.rho22().clamp(0.0, 1.0);
    let d = xlnx(e_plus) + xlnx(e_minus) - xlnx(p1) - xlnx(p2);
    if d < 0.0 && d >= -1e-12 {
        Ok(0.0)
    } else {
        Ok(d)
    }
}

/// Squared Hilbert-space return distance `‖ψ_t − ψ_0‖² = 2 − 2 Re⟨ψ_0|ψ_t⟩`
/// for normalized states, clamped into its analytic range `[0, 4]`.
pub fn recurrence_distance(psi_t: &Spinor, psi_0: &Spinor) -> f64 {
    (2.0 - 2.0 * psi_0.inner(psi_t).re).clamp(0.0, 4.0)
}

/// Return distance of the closed-form evolved state from `|0⟩`, computed
/// from the transfer-matrix coefficients:
/// `2 − 2 Re(c₊ η_N + c₋ ξ_N)`.
pub fn recurrence_distance_spectral(evolution: &SpectralEvolution) -> f64 {
    let Some(last) = evolution.eigensystems.last() else {
        return 0.0;
    };
    let overlap = evolution.coefficients.0 * last.eta + evolution.coefficients.1 * last.xi;
    (2.0 - 2.0 * overlap.re).clamp(0.0, 4.0)
}

/// Which spin component a spectrum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinComponent {
    X,
    Y,
    Z,
}

impl SpinComponent {
    /// Lower-case component letter, for file headers.
    pub fn letter(&self) -> &'static str {
        match self {
            SpinComponent::X => "x",
            SpinComponent::Y => "y",
            SpinComponent::Z => "z",
        }
    }
}

/// A one-sided discrete power spectrum on the DFT frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    /// Angular frequencies `ω_k = 2πk/(NT)`, `k = 0..N−1`.
    pub frequencies: Vec<f64>,
    /// Power `|T·Σ_n s_n e^{−iω_k nT}|²` per bin (non-negative).
    pub power: Vec<f64>,
    /// Optional component tag.
    pub component: Option<SpinComponent>,
}

impl SpectrumSeries {
    /// Tags the spectrum with the spin component it was computed from.
    pub fn with_component(mut self, component: SpinComponent) -> Self {
        self.component = Some(component);
        self
    }
}

/// Plain (unwindowed) DFT power spectrum of a uniformly sampled series:
/// `power[k] = |T·Σ_n s_n e^{−2πikn/N}|²` at `ω_k = 2πk/(NT)`.
///
/// The twiddle factors are taken from an exact `k·n mod N` root-of-unity
/// table, so a pure tone at a bin frequency leaks only at rounding level.
pub fn power_spectrum(series: &[f64], sample_period: f64) -> Result<SpectrumSeries> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if series.len() < 2 {
        return Err(Error::ParamOutOfRange {
            name: "series length",
            value: series.len() as f64,
            requirement: ">= 2",
        });
    }
    ensure_positive("sample_period", sample_period)?;
    let n = series.len();
    let roots: Vec<Complex64> = (0..n)
        .map(|j| linalg::cis(-TAU * j as f64 / n as f64))
        .collect();
    let mut frequencies = Vec::with_capacity(n);
    let mut power = Vec::with_capacity(n);
    let t_sq = sample_period * sample_period;
    for k in 0..n {
        let mut acc = ZERO;
        for (idx, &s) in series.iter().enumerate() {
            acc += roots[(k * idx) % n] * s;
        }
        frequencies.push(TAU * k as f64 / (n as f64 * sample_period));
        power.push(t_sq * acc.norm_sqr());
    }
    Ok(SpectrumSeries {
        frequencies,
        power,
        component: None,
    })
}

/// Fraction of frequency bins whose power reaches `rel_threshold` times the
/// maximum power. `rel_threshold` must lie strictly inside `(0, 1)`.
pub fn spectral_occupancy(spectrum: &SpectrumSeries, rel_threshold: f64) -> Result<f64> {
    if spectrum.power.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(rel_threshold.is_finite() && rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(Error::ParamOutOfRange {
            name: "rel_threshold",
            value: rel_threshold,
            requirement: "in (0, 1)",
        });
    }
    let max = spectrum.power.iter().cloned().fold(0.0f64, f64::max);
    let cut = rel_threshold * max;
    let hits = spectrum.power.iter().filter(|&&p| p >= cut).count();
    Ok(hits as f64 / spectrum.power.len() as f64)
}

/// A density-normalized histogram over uniform bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// Bin edges, length `bins + 1`.
    pub edges: Vec<f64>,
    /// Densities per bin; `Σ density·width = 1`.
    pub densities: Vec<f64>,
}

impl Histogram {
    fn from_samples(samples: &[f64], bins: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySeries);
        }
        if bins == 0 {
            return Err(Error::ParamOutOfRange {
                name: "bins",
                value: 0.0,
                requirement: ">= 1",
            });
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &s in samples {
            lo = lo.min(s);
            hi = hi.max(s);
        }
        if hi <= lo {
            // Degenerate sample set: center a unit-wide range on the value.
            lo -= 0.5;
            hi = lo + 1.0;
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for &s in samples {
            let idx = (((s - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let edges = (0..=bins)
            .map(|b| {
                if b == bins {
                    hi
                } else {
                    lo + b as f64 * width
                }
            })
            .collect();
        let total = samples.len() as f64;
        let densities = counts
            .iter()
            .map(|&c| c as f64 / (total * width))
            .collect();
        Ok(Self { edges, densities })
    }

    /// Integral `Σ density·width`; 1 up to rounding by construction.
    pub fn total_mass(&self) -> f64 {
        self.densities
            .iter()
            .enumerate()
            .map(|(b, d)| d * (self.edges[b + 1] - self.edges[b]))
            .sum()
    }
}

/// Instantaneous level spacings along a trajectory, with their histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSpacingSample {
    /// One spacing `S_n = √(ω₀² + χ_n²) ≥ ω₀` per kick.
    pub spacings: Vec<f64>,
    /// Density-normalized histogram of the spacings.
    pub histogram: Histogram,
}

/// Eigenvalue gaps `S_n = √(ω₀² + χ_n²)` of the per-kick Hamiltonians,
/// floored at `ω₀` exactly, plus a density-normalized histogram.
pub fn level_spacings(
    kicks: &[PhasePoint],
    sp: &SpinParams,
    bins: usize,
) -> Result<LevelSpacingSample> {
    if kicks.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut spacings = Vec::with_capacity(kicks.len());
    for kick in kicks {
        let chi = coupling_chi(kick, sp)?;
        let s = math::hypot(sp.level_splitting, chi);
        spacings.push(s.max(sp.level_splitting));
    }
    let histogram = Histogram::from_samples(&spacings, bins)?;
    Ok(LevelSpacingSample {
        spacings,
        histogram,
    })
}

/// Lag-averaged covariance of the per-kick Hamiltonians in a fixed state:
/// `C(lag) = (1/(N−lag)) Σ_n [⟨½{H_n, H_{n+lag}}⟩_ψ − ⟨H_n⟩_ψ⟨H_{n+lag}⟩_ψ]`.
///
/// The operator product is symmetrized so the covariance is real; a
/// residual imaginary part above `1e-10` is reported as an error.
pub fn hamiltonian_correlation(
    kicks: &[PhasePoint],
    sp: &SpinParams,
    psi_ref: &Spinor,
    lag: usize,
) -> Result<f64> {
    if kicks.is_empty() {
        return Err(Error::EmptySeries);
    }
    if lag >= kicks.len() {
        return Err(Error::LagOutOfRange {
            lag,
            len: kicks.len(),
        });
    }
    psi_ref.ensure_normalized(1e-6)?;
    let mut matrices = Vec::with_capacity(kicks.len());
    let mut means = Vec::with_capacity(kicks.len());
    for kick in kicks {
        let h = kick_hamiltonian(coupling_chi(kick, sp)?, sp);
        matrices.push(h.matrix());
        means.push(h.expectation(psi_ref));
    }
    let mut acc = ZERO;
    let count = kicks.len() - lag;
    for n in 0..count {
        let forward = linalg::mul(&matrices[n], &matrices[n + lag]);
        let backward = linalg::mul(&matrices[n + lag], &matrices[n]);
        let mut sym = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                sym[r][c] = (forward[r][c] + backward[r][c]) * 0.5;
            }
        }
        let second = linalg::expectation(&sym, psi_ref.amp0, psi_ref.amp1);
        acc += second - Complex64::new(means[n] * means[n + lag], 0.0);
    }
    let mean = acc / count as f64;
    if mean.im.abs() > 1e-10 {
        return Err(Error::ImaginaryResidual {
            value: mean.im.abs(),
            limit: 1e-10,
        });
    }
    Ok(mean.re)
}

/// A state-recurrence event and whether the observables recurred with it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TtsbEvent {
    /// Earlier kick index.
    pub n: usize,
    /// Separation to the later kick (`n + k`).
    pub k: usize,
    /// Hilbert-space distance `‖ψ(n+k) − ψ(n)‖`.
    pub state_distance: f64,
    /// Euclidean distance between the two Pauli expectation vectors.
    pub observable_distance: f64,
    /// Always true for emitted events: the state recurred within
    /// `eps_state`.
    pub state_recurred: bool,
    /// Whether the observables also recurred (distance ≤ `eps_obs`).
    pub observable_recurred: bool,
}

impl TtsbEvent {
    /// A recurrence whose observables failed to return: the time-translation
    /// signature the detector exists to flag.
    #[inline]
    pub fn breaks_observable_return(&self) -> bool {
        self.state_recurred && !self.observable_recurred
    }
}

/// Scans all ordered pairs `(n, n+k)` for state recurrences
/// (`‖ψ(n+k) − ψ(n)‖ < eps_state`) and reports, for each, whether the
/// Pauli expectation vectors also returned within `eps_obs`.
pub fn ttsb_detector(
    states: &[Spinor],
    expectations: &[PauliExpectations],
    eps_state: f64,
    eps_obs: f64,
) -> Result<Vec<TtsbEvent>> {
    if states.len() != expectations.len() {
        return Err(Error::MismatchedLengths {
            left: states.len(),
            right: expectations.len(),
        });
    }
    ensure_positive("eps_state", eps_state)?;
    ensure_positive("eps_obs", eps_obs)?;
    let mut events = Vec::new();
    for n in 0..states.len() {
        for m in (n + 1)..states.len() {
            let state_distance = states[n].distance(&states[m]);
            if state_distance < eps_state {
                let observable_distance = expectations[n].distance(&expectations[m]);
                events.push(TtsbEvent {
                    n,
                    k: m - n,
                    state_distance,
                    observable_distance,
                    state_recurred: true,
                    observable_recurred: observable_distance <= eps_obs,
                });
            }
        }
    }
    Ok(events)
}

/// Longest consecutive run of samples within `band` of `level`.
pub fn freezing_detector(series: &[f64], level: f64, band: f64) -> Result<usize> {
    ensure_positive("band", band)?;
    let mut longest = 0usize;
    let mut current = 0usize;
    for &s in series {
        if (s - level).abs() <= band {
            current += 1;
            longest = longest.max(current);
        } else {
            current = 0;
        }
    }
    Ok(longest)
}

/// Mean-removed sample autocorrelation at the given lag: the per-pair
/// average of lagged products divided by the series variance, so a strictly
/// periodic series scores 1 at its period regardless of how many periods
/// fit in the window.
pub fn autocorrelation(series: &[f64], lag: usize) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if lag >= series.len() {
        return Err(Error::LagOutOfRange {
            lag,
            len: series.len(),
        });
    }
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let denom = series.iter().map(|&s| (s - mean) * (s - mean)).sum::<f64>() / n as f64;
    if denom <= 0.0 {
        return Err(Error::ConstantSeries);
    }
    let count = n - lag;
    let num = (0..count)
        .map(|i| (series[i] - mean) * (series[i + lag] - mean))
        .sum::<f64>()
        / count as f64;
    Ok(num / denom)
}

/// The lag in `1..=len/2` with the largest autocorrelation, together with
/// that autocorrelation value. A strongly periodic series scores near 1 at
/// its period; an aperiodic one stays low everywhere.
pub fn dominant_period(series: &[f64]) -> Result<(usize, f64)> {
    if series.len() < 4 {
        return Err(Error::ParamOutOfRange {
            name: "series length",
            value: series.len() as f64,
            requirement: ">= 4",
        });
    }
    let mut best_lag = 1usize;
    let mut best_value = f64::NEG_INFINITY;
    for lag in 1..=series.len() / 2 {
        let r = autocorrelation(series, lag)?;
        if r > best_value {
            best_value = r;
            best_lag = lag;
        }
    }
    Ok((best_lag, best_value))
}
