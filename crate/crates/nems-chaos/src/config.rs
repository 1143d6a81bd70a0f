//! Run configuration: TOML file keys, CLI overrides, defaults, validation.
//!
//! A run is described by a flat TOML file (all keys optional — an empty file
//! yields the canonical defaults) plus command-line overrides. Resolution
//! order for every setting: CLI flag, then config file, then per-experiment
//! default. The output directory additionally falls back to the `NEMS_OUT`
//! environment variable before the built-in `nems-out`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nems_core::cantilever::{MapParams, PhysicalDrive};
use nems_core::spin::SpinParams;
use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

const TAU: f64 = core::f64::consts::TAU;

/// The nine named experiments, one per produced artifact family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PhasePortrait,
    SpinDynamics,
    Psd,
    Coherence,
    Recurrence,
    Levels,
    Diffusion,
    Correlations,
    Ttsb,
}

impl Experiment {
    /// All experiments, in documentation order.
    pub const ALL: [Experiment; 9] = [
        Experiment::PhasePortrait,
        Experiment::SpinDynamics,
        Experiment::Psd,
        Experiment::Coherence,
        Experiment::Recurrence,
        Experiment::Levels,
        Experiment::Diffusion,
        Experiment::Correlations,
        Experiment::Ttsb,
    ];

    /// Command-line name (kebab-case).
    pub fn name(self) -> &'static str {
        match self {
            Experiment::PhasePortrait => "phase-portrait",
            Experiment::SpinDynamics => "spin-dynamics",
            Experiment::Psd => "psd",
            Experiment::Coherence => "coherence",
            Experiment::Recurrence => "recurrence",
            Experiment::Levels => "levels",
            Experiment::Diffusion => "diffusion",
            Experiment::Correlations => "correlations",
            Experiment::Ttsb => "ttsb",
        }
    }

    /// File-name stem (underscores, so artifact names stay shell-friendly).
    pub fn stem(self) -> &'static str {
        match self {
            Experiment::PhasePortrait => "phase_portrait",
            Experiment::SpinDynamics => "spin_dynamics",
            Experiment::Psd => "psd",
            Experiment::Coherence => "coherence",
            Experiment::Recurrence => "recurrence",
            Experiment::Levels => "levels",
            Experiment::Diffusion => "diffusion",
            Experiment::Correlations => "correlations",
            Experiment::Ttsb => "ttsb",
        }
    }

    /// Default kick count when neither the config file nor `--kicks` sets one.
    fn default_kicks(self) -> usize {
        match self {
            Experiment::PhasePortrait => 10_000,
            Experiment::SpinDynamics | Experiment::Psd => 2048,
            Experiment::Coherence | Experiment::Recurrence | Experiment::Ttsb => 1000,
            Experiment::Levels => 10_000,
            Experiment::Correlations => 4096,
            Experiment::Diffusion => 500,
        }
    }

    /// Default seed list. Portrait and spin runs scan sixteen seeds so the
    /// regime contrast is visible across initial conditions; single-series
    /// diagnostics default to one seed.
    fn default_seeds(self) -> Vec<u64> {
        match self {
            Experiment::PhasePortrait | Experiment::SpinDynamics => (1..=16).collect(),
            _ => vec![1],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
                CliError::config(format!(
                    "unknown experiment `{s}`; expected one of: {}",
                    names.join(", ")
                ))
            })
    }
}

/// How each (K, seed) pair picks its starting phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialMode {
    /// Draw (I₀, θ₀) from the documented per-seed distribution.
    Seeded,
    /// Use `initial_action` / `initial_angle` verbatim for every seed.
    Fixed,
}

/// One value or a list, so `K = 5` and `K = [0.5, 5]` both parse.
#[derive(Debug, Clone)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

impl<'de> Deserialize<'de> for OneOrMany {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = OneOrMany;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or an array of numbers")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<OneOrMany, E> {
                Ok(OneOrMany::One(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<OneOrMany, E> {
                Ok(OneOrMany::One(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<OneOrMany, E> {
                Ok(OneOrMany::One(v as f64))
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<OneOrMany, A::Error> {
                let mut values = Vec::new();
                while let Some(x) = seq.next_element::<f64>()? {
                    values.push(x);
                }
                Ok(OneOrMany::Many(values))
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Raw config-file keys, all optional. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "K")]
    k: Option<OneOrMany>,
    n_kicks: Option<usize>,
    seeds: Option<Vec<u64>>,
    omega0: Option<f64>,
    g: Option<f64>,
    alpha: Option<f64>,
    kick_period: Option<f64>,
    mass: Option<f64>,
    omega_r: Option<f64>,
    initial: Option<String>,
    initial_action: Option<f64>,
    initial_angle: Option<f64>,
    histogram_bins: Option<usize>,
    eps_state: Option<f64>,
    eps_obs: Option<f64>,
    occupancy_threshold: Option<f64>,
    n_trajectories: Option<usize>,
    max_lag: Option<usize>,
    p1: Option<f64>,
    p2: Option<f64>,
    ref_state: Option<[f64; 4]>,
    eigensystem_csv: Option<bool>,
    output_dir: Option<String>,
    phys_drive_strength: Option<f64>,
    phys_kick_period: Option<f64>,
    phys_nonlinearity: Option<f64>,
    phys_mass: Option<f64>,
    phys_resonator_freq: Option<f64>,
    phys_initial_action: Option<f64>,
}

/// Parses the TOML config text. Unknown keys and type mismatches are
/// reported with the offending key name; an empty string yields all-defaults.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    toml::from_str(text).map_err(|e| CliError::config(format!("config file: {e}")))
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Default, Clone)]
pub struct CliOverrides {
    pub k: Option<f64>,
    pub kicks: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Fully resolved, validated run description. Serialized verbatim into the
/// run manifest so an artifact set is reproducible from its manifest alone.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub k_values: Vec<f64>,
    pub n_kicks: usize,
    pub seeds: Vec<u64>,
    pub omega0: f64,
    pub g: f64,
    pub alpha: f64,
    pub kick_period: f64,
    pub mass: f64,
    pub omega_r: f64,
    pub initial: InitialMode,
    pub initial_action: f64,
    pub initial_angle: f64,
    pub histogram_bins: usize,
    pub eps_state: f64,
    pub eps_obs: f64,
    pub occupancy_threshold: f64,
    pub n_trajectories: usize,
    pub max_lag: usize,
    pub p1: f64,
    pub p2: f64,
    pub ref_state: [f64; 4],
    pub eigensystem_csv: bool,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Merges file keys, CLI flags, the `NEMS_OUT` fallback, and defaults,
    /// then validates every setting. All failures are configuration errors.
    pub fn resolve(
        experiment: Experiment,
        file: ConfigFile,
        cli: &CliOverrides,
        env_out: Option<PathBuf>,
    ) -> Result<RunConfig> {
        let drive = physical_drive(&file)?;

        // K precedence: CLI flag, file key, physical drive, canonical pair.
        let k_values = match (cli.k, file.k) {
            (Some(k), _) => vec![k],
            (None, Some(spec)) => spec.into_vec(),
            (None, None) => match &drive {
                Some(d) => vec![map_params_from_drive(d)?.stochasticity()],
                None => vec![0.5, 5.0],
            },
        };
        if k_values.is_empty() {
            return Err(CliError::config("K: list must not be empty"));
        }
        for &k in &k_values {
            if !k.is_finite() || k <= 0.0 {
                return Err(CliError::config(format!(
                    "K: must be a positive finite real, got {k}"
                )));
            }
        }
        // A physical drive pins a single kick strength; cross-check any
        // explicitly given K against it (1e-9 relative agreement).
        if let Some(d) = drive {
            if k_values.len() > 1 {
                return Err(CliError::config(
                    "K: physical drive parameters determine a single value; \
                     remove the K list or the phys_* keys",
                ));
            }
            MapParams::reconciled(k_values[0], d)
                .map_err(|e| CliError::config(format!("K vs phys_* keys: {e}")))?;
        }

        let n_kicks = cli
            .kicks
            .or(file.n_kicks)
            .unwrap_or_else(|| experiment.default_kicks());
        if n_kicks == 0 {
            return Err(CliError::config("n_kicks: must be at least 1"));
        }
        if experiment == Experiment::Psd && n_kicks < 2 {
            return Err(CliError::config(
                "n_kicks: the psd experiment needs at least 2 kicks to form a spectrum",
            ));
        }

        let seeds = match cli.seed {
            Some(s) => vec![s],
            None => file.seeds.unwrap_or_else(|| experiment.default_seeds()),
        };
        if seeds.is_empty() {
            return Err(CliError::config("seeds: list must not be empty"));
        }

        let omega0 = file.omega0.unwrap_or(0.2);
        require(omega0.is_finite() && omega0 > 0.0, "omega0", "positive finite")?;
        let g = file.g.unwrap_or(1.0);
        require(g.is_finite(), "g", "finite")?;
        let alpha = file.alpha.unwrap_or(core::f64::consts::FRAC_PI_2);
        require(alpha.is_finite(), "alpha", "finite")?;
        let kick_period = file.kick_period.unwrap_or(1.0);
        require(kick_period.is_finite() && kick_period > 0.0, "kick_period", "positive finite")?;
        let mass = file.mass.unwrap_or(1.0);
        require(mass.is_finite() && mass > 0.0, "mass", "positive finite")?;
        let omega_r = file.omega_r.unwrap_or(1.0);
        require(omega_r.is_finite() && omega_r > 0.0, "omega_r", "positive finite")?;

        let initial = match file.initial.as_deref() {
            None => InitialMode::Seeded,
            Some("seeded") => InitialMode::Seeded,
            Some("fixed") => InitialMode::Fixed,
            Some(other) => {
                return Err(CliError::config(format!(
                    "initial: expected \"seeded\" or \"fixed\", got \"{other}\""
                )))
            }
        };
        let initial_action = file.initial_action.unwrap_or(0.3);
        require(initial_action.is_finite(), "initial_action", "finite")?;
        let initial_angle = file.initial_angle.unwrap_or(0.1);
        require(initial_angle.is_finite(), "initial_angle", "finite")?;

        let histogram_bins = file.histogram_bins.unwrap_or(60);
        if histogram_bins == 0 {
            return Err(CliError::config("histogram_bins: must be at least 1"));
        }

        let eps_state = file.eps_state.unwrap_or(0.05);
        require(eps_state.is_finite() && eps_state > 0.0, "eps_state", "positive finite")?;
        let eps_obs = file.eps_obs.unwrap_or(0.1);
        require(eps_obs.is_finite() && eps_obs > 0.0, "eps_obs", "positive finite")?;

        let occupancy_threshold = file.occupancy_threshold.unwrap_or(1e-4);
        require(
            occupancy_threshold.is_finite()
                && occupancy_threshold > 0.0
                && occupancy_threshold < 1.0,
            "occupancy_threshold",
            "strictly between 0 and 1",
        )?;

        let n_trajectories = file.n_trajectories.unwrap_or(10_000);
        if experiment == Experiment::Diffusion && n_trajectories < 1000 {
            return Err(CliError::config(format!(
                "n_trajectories: diffusion needs at least 1000 ensemble members, got {n_trajectories}"
            )));
        }

        let max_lag = file.max_lag.unwrap_or(1000).min(n_kicks.saturating_sub(1));
        if experiment == Experiment::Correlations {
            if let Some(requested) = file.max_lag {
                if requested >= n_kicks {
                    return Err(CliError::config(format!(
                        "max_lag: must be smaller than n_kicks ({n_kicks}), got {requested}"
                    )));
                }
            }
        }

        let p1 = file.p1.unwrap_or(1.0);
        let p2 = file.p2.unwrap_or(0.0);
        require(p1.is_finite() && p1 >= 0.0, "p1", "finite and non-negative")?;
        require(p2.is_finite() && p2 >= 0.0, "p2", "finite and non-negative")?;
        if (p1 + p2 - 1.0).abs() > 1e-12 {
            return Err(CliError::config(format!(
                "p1/p2: mixture weights must sum to 1, got {p1} + {p2} = {}",
                p1 + p2
            )));
        }

        let ref_state = file.ref_state.unwrap_or([1.0, 0.0, 0.0, 0.0]);
        let norm_sqr: f64 = ref_state.iter().map(|c| c * c).sum();
        if (norm_sqr.sqrt() - 1.0).abs() > 1e-9 {
            return Err(CliError::config(format!(
                "ref_state: [re0, im0, re1, im1] must be unit-norm (norm = {})",
                norm_sqr.sqrt()
            )));
        }

        let eigensystem_csv = file.eigensystem_csv.unwrap_or(false);
        if eigensystem_csv && (alpha - core::f64::consts::FRAC_PI_2).abs() > 1e-12 {
            return Err(CliError::config(
                "eigensystem_csv: the per-kick eigensystem table is only defined \
                 for the resonant mixing angle alpha = pi/2",
            ));
        }

        let output_dir = cli
            .out
            .clone()
            .or_else(|| file.output_dir.map(PathBuf::from))
            .or(env_out)
            .unwrap_or_else(|| PathBuf::from("nems-out"));

        Ok(RunConfig {
            experiment,
            k_values,
            n_kicks,
            seeds,
            omega0,
            g,
            alpha,
            kick_period,
            mass,
            omega_r,
            initial,
            initial_action,
            initial_angle,
            histogram_bins,
            eps_state,
            eps_obs,
            occupancy_threshold,
            n_trajectories,
            max_lag,
            p1,
            p2,
            ref_state,
            eigensystem_csv,
            output_dir,
        })
    }

    /// Spin-layer parameters implied by this config.
    pub fn spin_params(&self) -> Result<SpinParams> {
        SpinParams::new(
            self.omega0,
            self.g,
            self.alpha,
            self.kick_period,
            self.mass,
            self.omega_r,
        )
        .map_err(|e| CliError::config(format!("spin parameters: {e}")))
    }

    /// Reference state for the correlation diagnostic.
    pub fn reference_state(&self) -> nems_core::spin::Spinor {
        let [re0, im0, re1, im1] = self.ref_state;
        nems_core::spin::Spinor::new(Complex64::new(re0, im0), Complex64::new(re1, im1))
    }
}

fn require(ok: bool, key: &str, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::config(format!("{key}: must be {what}")))
    }
}

/// Collects the optional physical-drive block: all six keys or none.
fn physical_drive(file: &ConfigFile) -> Result<Option<PhysicalDrive>> {
    let keys = [
        ("phys_drive_strength", file.phys_drive_strength),
        ("phys_kick_period", file.phys_kick_period),
        ("phys_nonlinearity", file.phys_nonlinearity),
        ("phys_mass", file.phys_mass),
        ("phys_resonator_freq", file.phys_resonator_freq),
        ("phys_initial_action", file.phys_initial_action),
    ];
    let given: Vec<&str> = keys.iter().filter(|(_, v)| v.is_some()).map(|(k, _)| *k).collect();
    if given.is_empty() {
        return Ok(None);
    }
    if given.len() < keys.len() {
        let missing: Vec<&str> =
            keys.iter().filter(|(_, v)| v.is_none()).map(|(k, _)| *k).collect();
        return Err(CliError::config(format!(
            "physical drive block is incomplete: given {}, missing {}",
            given.join(", "),
            missing.join(", ")
        )));
    }
    Ok(Some(PhysicalDrive {
        drive_strength: file.phys_drive_strength.unwrap(),
        kick_period: file.phys_kick_period.unwrap(),
        nonlinearity: file.phys_nonlinearity.unwrap(),
        mass: file.phys_mass.unwrap(),
        resonator_freq: file.phys_resonator_freq.unwrap(),
        initial_action: file.phys_initial_action.unwrap(),
    }))
}

fn map_params_from_drive(drive: &PhysicalDrive) -> Result<MapParams> {
    MapParams::from_drive(drive.clone()).map_err(|e| CliError::config(format!("phys_* keys: {e}")))
}

/// Per-seed starting point for trajectory experiments.
///
/// Seeded mode draws from a ChaCha8 generator keyed by the seed alone, so a
/// seed identifies the same initial condition across experiments and runs:
/// action first, then angle. Phase portraits spread the action over a full
/// `2π` torus period; every other experiment draws it from `[0.05, 0.6)` to
/// stay in the physically motivated low-action band. Angles are uniform on
/// `[0, 2π)` in both cases.
pub fn initial_point(cfg: &RunConfig, seed: u64) -> Result<nems_core::cantilever::PhasePoint> {
    use rand::{Rng, SeedableRng};
    let (action, angle) = match cfg.initial {
        InitialMode::Fixed => (cfg.initial_action, cfg.initial_angle),
        InitialMode::Seeded => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let action = if cfg.experiment == Experiment::PhasePortrait {
                rng.random_range(0.0..TAU)
            } else {
                rng.random_range(0.05..0.6)
            };
            let angle = rng.random_range(0.0..TAU);
            (action, angle)
        }
    };
    nems_core::cantilever::PhasePoint::new(action, angle)
        .map_err(|e| CliError::config(format!("initial condition: {e}")))
}
