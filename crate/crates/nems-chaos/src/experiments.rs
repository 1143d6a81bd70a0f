//! The nine named experiments and their CSV artifacts.
//!
//! Every experiment runs the same pipeline skeleton — kicked-map trajectory,
//! lifted kick sequence, spin evolution, diagnostics — and differs only in
//! which series it extracts and writes. Each (K, seed) pair produces its own
//! file(s), named `{experiment}_K{K}_seed{seed}*.csv`, so artifact names are
//! stable identifiers for reruns and diffing.
//!
//! Artifact schemas:
//!
//! | experiment      | file(s) per (K, seed)                | columns |
//! |-----------------|--------------------------------------|---------|
//! | phase-portrait  | `phase_portrait_…`                   | `n,I,theta,x,p` |
//! | spin-dynamics   | `spin_dynamics_…`, `trajectory_…` (+ `eigensystem_…`) | `n,sx,sy,sz`; `n,I,theta,chi,phi,sx,sy,sz,recurrence,coherence` (+ `n,chi,phi,eta,xi`) |
//! | psd             | `psd_…`, `psd_occupancy_…`           | `omega,Ix,Iy,Iz`; `component,occupancy` |
//! | coherence       | `coherence_…`                        | `n,coherence` |
//! | recurrence      | `recurrence_…`                       | `n,recurrence` |
//! | levels          | `levels_…`, `levels_hist_…`          | `S`; `bin_lo,bin_hi,density` |
//! | diffusion       | `diffusion_…`, `diffusion_fit_…`     | `n,mean_I,var_I,msd`; fit summary |
//! | correlations    | `correlations_…`                     | `lag,covariance` |
//! | ttsb            | `ttsb_…`                             | `n,k,state_distance,observable_distance,state_recurred,observable_recurred` |

use nems_core::cantilever::{
    estimate_diffusion, iterate_trajectory, reconstruct_xp, AngleDistribution, EnsembleSpec,
    PhasePoint,
};
use nems_core::observables::{
    coherence_relative_entropy, density_matrix, hamiltonian_correlation, level_spacings,
    pauli_expectations, power_spectrum, recurrence_distance, spectral_occupancy, ttsb_detector,
    DensityMatrix2, PauliExpectations, SpinComponent,
};
use nems_core::spin::{
    coupling_chi, cumulative_propagators, evolve_direct, kick_eigensystem, kick_hamiltonian,
    SpinParams, Spinor,
};

use crate::config::{initial_point, Experiment, RunConfig};
use crate::error::Result;
use crate::gformat::format_g17;
use crate::output::{ArtifactWriter, Cell, Csv, RunManifest};

/// Runs the configured experiment, writing all artifacts plus the manifest
/// into the resolved output directory.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunManifest> {
    let mut writer = ArtifactWriter::create(&cfg.output_dir)?;
    let sp = cfg.spin_params()?;
    for &k in &cfg.k_values {
        for &seed in &cfg.seeds {
            for csv in artifacts_for(cfg, &sp, k, seed)? {
                writer.write_csv(&csv)?;
            }
        }
    }
    writer.finish(cfg)
}

/// One classical trajectory and the kick sequence the spin sees.
struct Pipeline {
    /// Raw map iterates `(I_n, θ_n)`, length `n_kicks + 1`; actions signed.
    trajectory: Vec<PhasePoint>,
    /// Post-kick points lifted to oscillator actions `|I|`, length `n_kicks`;
    /// kick `n` (1-based) drives the spin between samples `n−1` and `n`.
    kicks: Vec<PhasePoint>,
}

fn pipeline(cfg: &RunConfig, k: f64, seed: u64) -> Result<Pipeline> {
    let p0 = initial_point(cfg, seed)?;
    let trajectory = iterate_trajectory(p0, k, cfg.n_kicks)?;
    let kicks = trajectory[1..].iter().map(PhasePoint::lifted).collect();
    Ok(Pipeline { trajectory, kicks })
}

fn file_name(cfg: &RunConfig, suffix: &str, k: f64, seed: u64) -> String {
    format!("{}{}_K{}_seed{}.csv", cfg.experiment.stem(), suffix, format_g17(k), seed)
}

fn artifacts_for(cfg: &RunConfig, sp: &SpinParams, k: f64, seed: u64) -> Result<Vec<Csv>> {
    match cfg.experiment {
        Experiment::PhasePortrait => phase_portrait(cfg, k, seed),
        Experiment::SpinDynamics => spin_dynamics(cfg, sp, k, seed),
        Experiment::Psd => psd(cfg, sp, k, seed),
        Experiment::Coherence => coherence(cfg, sp, k, seed),
        Experiment::Recurrence => recurrence(cfg, sp, k, seed),
        Experiment::Levels => levels(cfg, sp, k, seed),
        Experiment::Diffusion => diffusion(cfg, k, seed),
        Experiment::Correlations => correlations(cfg, sp, k, seed),
        Experiment::Ttsb => ttsb(cfg, sp, k, seed),
    }
}

/// Map iterates with reconstructed oscillator coordinates. `I` keeps its
/// sign (diffusion can drive it negative); `x`/`p` are built from the lifted
/// action `|I|`, matching how the spin layer reads the trajectory.
fn phase_portrait(cfg: &RunConfig, k: f64, seed: u64) -> Result<Vec<Csv>> {
    let pipe = pipeline(cfg, k, seed)?;
    let mut csv = Csv::new(file_name(cfg, "", k, seed), &["n", "I", "theta", "x", "p"]);
    for (n, point) in pipe.trajectory.iter().enumerate() {
        let (x, p) = reconstruct_xp(&point.lifted(), cfg.mass, cfg.omega_r)?;
        csv.row(&[n.into(), point.action.into(), point.angle.into(), x.into(), p.into()]);
    }
    Ok(vec![csv])
}

/// Per-kick Pauli expectations of the driven spin, starting from `|0⟩`,
/// plus the combined per-kick sample record joining the classical and spin
/// sides (action, angle, instantaneous coupling and quasiphase, Bloch
/// components, return distance, coherence). Optionally also the per-kick
/// eigensystem table (resonant drive only).
fn spin_dynamics(cfg: &RunConfig, sp: &SpinParams, k: f64, seed: u64) -> Result<Vec<Csv>> {
    let pipe = pipeline(cfg, k, seed)?;
    let states = evolve_direct(&Spinor::basis0(), &pipe.kicks, sp)?;
    let mut spin_csv = Csv::new(file_name(cfg, "", k, seed), &["n", "sx", "sy", "sz"]);
    let mut record_csv = Csv::new(
        format!("trajectory_K{}_seed{}.csv", format_g17(k), seed),
        &["n", "I", "theta", "chi", "phi", "sx", "sy", "sz", "recurrence", "coherence"],
    );
    for (n, psi) in states.iter().enumerate() {
        let e = pauli_expectations(psi)?;
        spin_csv.row(&[n.into(), e.x.into(), e.y.into(), e.z.into()]);

        // χ and φ are evaluated at the instantaneous (lifted) oscillator
        // state; for n ≥ 1 that is exactly the coupling of kick n, for
        // n = 0 the coupling the initial condition would exert.
        let point = &pipe.trajectory[n];
        let chi = coupling_chi(&point.lifted(), sp)?;
        let phi = kick_hamiltonian(chi, sp).eigenvalue_magnitude() * sp.kick_period;
        let recurrence = recurrence_distance(psi, &states[0]);
        let coherence = coherence_relative_entropy(&density_matrix(psi)?)?;
        record_csv.row(&[
            n.into(),
            point.action.into(),
            point.angle.into(),
            chi.into(),
            phi.into(),
            e.x.into(),
            e.y.into(),
            e.z.into(),
            recurrence.into(),
            coherence.into(),
        ]);
    }
    let mut out = vec![spin_csv, record_csv];
    if cfg.eigensystem_csv {
        let name = format!("eigensystem_K{}_seed{}.csv", format_g17(k), seed);
        let mut eig_csv = Csv::new(name, &["n", "chi", "phi", "eta", "xi"]);
        for (i, kick) in pipe.kicks.iter().enumerate() {
            let chi = coupling_chi(kick, sp)?;
            let eig = kick_eigensystem(chi, sp)?;
            eig_csv.row(&[
                (i + 1).into(),
                eig.coupling_value.into(),
                eig.quasiphase.into(),
                eig.eta.into(),
                eig.xi.into(),
            ]);
        }
        out.push(eig_csv);
    }
    Ok(out)
}

/// Unwindowed DFT power spectra of the three Pauli series (post-kick samples
/// `n = 1..n_kicks`), plus the fraction of bins whose power exceeds the
/// configured threshold relative to each spectrum's peak.
fn psd(cfg: &RunConfig, sp: &SpinParams, k: f64, seed: u64) -> Result<Vec<Csv>> {
    let pipe = pipeline(cfg, k, seed)?;
    let states = evolve_direct(&Spinor::basis0(), &pipe.kicks, sp)?;
    let series: Vec<PauliExpectations> = states[1..]
        .iter()
        .map(pauli_expectations)
        .collect::<nems_core::Result<_>>()?;
    let sx: Vec<f64> = series.iter().map(|e| e.x).collect();
    let sy: Vec<f64> = series.iter().map(|e| e.y).collect();
    let sz: Vec<f64> = series.iter().map(|e| e.z).collect();
    let spec_x = power_spectrum(&sx, cfg.kick_period)?.with_component(SpinComponent::X);
    let spec_y = power_spectrum(&sy, cfg.kick_period)?.with_component(SpinComponent::Y);
    let spec_z = power_spectrum(&sz, cfg.kick_period)?.with_component(SpinComponent::Z);

    let mut csv = Csv::new(file_name(cfg, "", k, seed), &["omega", "Ix", "Iy", "Iz"]);
    for bin in 0..spec_x.frequencies.len() {
        csv.row(&[
            spec_x.frequencies[bin].into(),
            spec_x.power[bin].into(),
            spec_y.power[bin].into(),
            spec_z.power[bin].into(),
        ]);
    }

    let mut occ = Csv::new(
        file_name(cfg, "_occupancy", k, seed),
        &["component", "occupancy"],
    );
    for spec in [&spec_x, &spec_y, &spec_z] {
        let fraction = spectral_occupancy(spec, cfg.occupancy_threshold)?;
        let letter = spec.component.expect("component tagged above").letter();
        occ.row(&[Cell::Text(letter), fraction.into()]);
    }
    Ok(vec![csv, occ])
}

/// Relative entropy of coherence of `ρ_n = U_n ρ(0) U_n†` with
/// `ρ(0) = p1·|0⟩⟨0| + p2·|1⟩⟨1|`. The default weights (1, 0) make this the
/// pure-state evolution of `|0⟩`.
fn coherence(cfg: &RunConfig, sp: &SpinParams, k: f64, seed: u64) -> Result<Vec<Csv>> {
    let pipe = pipeline(cfg, k, seed)?;
    let rho0 = DensityMatrix2::mixture(&[
        (cfg.p1, DensityMatrix2::from_pure(&Spinor::basis0())?),
        (cfg.p2, DensityMatrix2::from_pure(&Spinor::basis1())?),
    ])?;
    let propagators = cumulative_propagators(&pipe.kicks, sp)?;
    let mut csv = Csv::new(file_name(cfg, "", k, seed), &["n", "coherence"]);
    for (n, u) in propagators.iter().enumerate() {
        let d = coherence_relative_entropy(&rho0.evolve(u)?)?;
        csv.row(&[n.into(), d.into()]);
    }
    Ok(vec![csv])
}

/// Hilbert-space return distance `‖ψ_n − ψ_0‖²`-style recurrence series
/// (`2 − 2·Re⟨ψ_0|ψ_n⟩`, in `[0, 4]`).
fn recurrence(cfg: &RunConfig, sp: &SpinParams, k: f64, seed: u64) -> Result<Vec<Csv>> {
    let pipe = pipeline(cfg, k, seed)?;
    let states = evolve_direct(&Spinor::basis0(), &pipe.kicks, sp)?;
    let mut csv = Csv::new(file_name(cfg, "", k, seed), &["n", "recurrence"]);
    for (n, psi) in states.iter().enumerate() {
        csv.row(&[n.into(), recurrence_distance(psi, &states[0]).into()]);
    }
    Ok(vec![csv])
}

/// Instantaneous eigenvalue gaps of the per-kick Hamiltonians, one per kick,
/// plus their density-normalized histogram.
fn levels(cfg: &RunConfig, sp: &SpinParams, k: f64, seed: u64) -> Result<Vec<Csv>> {
    let pipe = pipeline(cfg, k, seed)?;
    let sample = level_spacings(&pipe.kicks, sp, cfg.histogram_bins)?;
    let mut spacings = Csv::new(file_name(cfg, "", k, seed), &["S"]);
    for &s in &sample.spacings {
        spacings.row(&[s.into()]);
    }
    let mut hist = Csv::new(
        file_name(cfg, "_hist", k, seed),
        &["bin_lo", "bin_hi", "density"],
    );
    for (b, &density) in sample.histogram.densities.iter().enumerate() {
        hist.row(&[
            sample.histogram.edges[b].into(),
            sample.histogram.edges[b + 1].into(),
            density.into(),
        ]);
    }
    Ok(vec![spacings, hist])
}

/// Ensemble action moments per kick and the drift/diffusion fit. The
/// ensemble starts at the configured action with uniformly drawn angles;
/// the seed keys the ensemble's generator.
fn diffusion(cfg: &RunConfig, k: f64, seed: u64) -> Result<Vec<Csv>> {
    let spec = EnsembleSpec {
        n_trajectories: cfg.n_trajectories,
        n_kicks: cfg.n_kicks,
        seed,
        initial_action: cfg.initial_action,
        angle_distribution: AngleDistribution::Uniform,
    };
    let estimate = estimate_diffusion(&spec, k, cfg.kick_period)?;
    let mut moments = Csv::new(file_name(cfg, "", k, seed), &["n", "mean_I", "var_I", "msd"]);
    for (n, m) in estimate.moments.iter().enumerate() {
        moments.row(&[n.into(), m.mean_action.into(), m.var_action.into(), m.msd.into()]);
    }
    let mut fit = Csv::new(
        file_name(cfg, "_fit", k, seed),
        &["drift", "drift_se", "diffusion", "diffusion_se", "fitted_slope", "regular_warning"],
    );
    fit.row(&[
        estimate.drift.into(),
        estimate.drift_se.into(),
        estimate.diffusion.into(),
        estimate.diffusion_se.into(),
        estimate.fitted_slope.into(),
        estimate.regular_warning.into(),
    ]);
    Ok(vec![moments, fit])
}

/// Symmetrized two-time Hamiltonian covariance in the configured reference
/// state, for lags `0..=max_lag`.
fn correlations(cfg: &RunConfig, sp: &SpinParams, k: f64, seed: u64) -> Result<Vec<Csv>> {
    let pipe = pipeline(cfg, k, seed)?;
    let psi_ref = cfg.reference_state();
    let mut csv = Csv::new(file_name(cfg, "", k, seed), &["lag", "covariance"]);
    for lag in 0..=cfg.max_lag {
        let c = hamiltonian_correlation(&pipe.kicks, sp, &psi_ref, lag)?;
        csv.row(&[lag.into(), c.into()]);
    }
    Ok(vec![csv])
}

/// All state recurrences `‖ψ(n+k) − ψ(n)‖ < ε_state` with their observable
/// distances; rows with `observable_recurred = 0` are the time-translation
/// symmetry-breaking events.
fn ttsb(cfg: &RunConfig, sp: &SpinParams, k: f64, seed: u64) -> Result<Vec<Csv>> {
    let pipe = pipeline(cfg, k, seed)?;
    let states = evolve_direct(&Spinor::basis0(), &pipe.kicks, sp)?;
    let expectations: Vec<PauliExpectations> = states
        .iter()
        .map(pauli_expectations)
        .collect::<nems_core::Result<_>>()?;
    let events = ttsb_detector(&states, &expectations, cfg.eps_state, cfg.eps_obs)?;
    let mut csv = Csv::new(
        file_name(cfg, "", k, seed),
        &["n", "k", "state_distance", "observable_distance", "state_recurred", "observable_recurred"],
    );
    for event in &events {
        csv.row(&[
            event.n.into(),
            event.k.into(),
            event.state_distance.into(),
            event.observable_distance.into(),
            event.state_recurred.into(),
            event.observable_recurred.into(),
        ]);
    }
    Ok(vec![csv])
}
