//! One batch run: integrate, extract observables, detect and fit the front,
//! write the output files.

use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use dipcone::frontkit::detect_front_with_floor;
use dipcone::frontkit::master_rescale_with_floor;
use dipcone::{
    make_preset, run_simulation_from, FitReport, FrontTrace, MasterPlot, Observable, ObservableSeries, Preset,
    SimConfig, Trajectory,
};
use thiserror::Error;

use crate::output;

/// Largest acceptable norm drift for a run to count as conserving.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Largest acceptable relative energy drift for a run to count as conserving.
pub const ENERGY_TOLERANCE: f64 = 1e-4;

pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const OBSERVABLES_FILE: &str = "observables.csv";
pub const FRONT_FILE: &str = "front.csv";
pub const REPORT_FILE: &str = "report.txt";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Simulation(#[from] dipcone::Error),

    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationSummary {
    /// Maximum norm drift over the recorded snapshots.
    pub max_norm_drift: f64,
    /// Maximum relative energy drift over the recorded snapshots.
    pub max_energy_drift: f64,
    /// Same two maxima taken over every integration step.
    pub max_norm_drift_all_steps: f64,
    pub max_energy_drift_all_steps: f64,
}

impl ConservationSummary {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let e0 = traj.initial_energy;
        let rel = |e: f64| if e0 != 0.0 { (e - e0).abs() / e0.abs() } else { (e - e0).abs() };
        ConservationSummary {
            max_norm_drift: traj.stats.iter().map(|s| s.max_norm_drift).fold(0.0, f64::max),
            max_energy_drift: traj.stats.iter().map(|s| rel(s.energy)).fold(0.0, f64::max),
            max_norm_drift_all_steps: traj.max_norm_drift,
            max_energy_drift_all_steps: traj.max_energy_drift,
        }
    }

    pub fn ok(&self) -> bool {
        self.max_norm_drift_all_steps < NORM_TOLERANCE && self.max_energy_drift_all_steps < ENERGY_TOLERANCE
    }
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config: SimConfig,
    pub version: &'static str,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub steps_taken: usize,
    pub n_snapshots: usize,
    pub initial_energy: f64,
    pub conservation: ConservationSummary,
    pub fit: FitReport,
    /// Only for runs tracking the normal component.
    pub master: Option<Result<MasterPlot, String>>,
    pub wall_time: Duration,
}

impl RunManifest {
    pub fn conservation_ok(&self) -> bool {
        self.conservation.ok()
    }
}

/// Observable tracked for a preset.
pub fn tracked_observable(preset: Preset) -> Observable {
    match preset {
        Preset::Supp => Observable::NormalComponent,
        _ => Observable::OneMinusFidelity,
    }
}

/// Runs a configuration and writes its outputs into `out_dir`, which is
/// created if missing.
pub fn run_experiment(config: &SimConfig, out_dir: &Path) -> Result<RunManifest, ExperimentError> {
    let started = Instant::now();
    config.validate()?;
    let chain = make_preset(config.preset, config.n_sites)?;
    let bulk = config.preset.bulk().ok_or_else(|| dipcone::Error::InvalidPreset(config.preset.to_string()))?;
    let center = config.preset.perturbed_site(config.n_sites)?;

    let traj = run_simulation_from(chain, config)?;
    let series = ObservableSeries::from_trajectory(&traj, bulk);

    let observable = tracked_observable(config.preset);
    let matrix = series.matrix(observable);
    let trace = detect_front_with_floor(matrix, config.contour_level, center, config.noise_floor)?;
    let fit = FitReport::from_trace(&trace, observable.name(), config.early_window(), config.linear_window());
    let master = (observable == Observable::NormalComponent).then(|| {
        master_rescale_with_floor(matrix, center, config.early_window(), config.noise_floor).map_err(|e| e.to_string())
    });

    let mut manifest = RunManifest {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION"),
        out_dir: out_dir.to_path_buf(),
        files: [SNAPSHOTS_FILE, OBSERVABLES_FILE, FRONT_FILE, REPORT_FILE].iter().map(|f| out_dir.join(f)).collect(),
        steps_taken: traj.steps_taken,
        n_snapshots: traj.len(),
        initial_energy: traj.initial_energy,
        conservation: ConservationSummary::from_trajectory(&traj),
        fit,
        master,
        wall_time: Duration::ZERO,
    };
    write_outputs(&manifest, &traj, &series, &trace)?;
    manifest.wall_time = started.elapsed();
    Ok(manifest)
}

fn write_outputs(
    manifest: &RunManifest,
    traj: &Trajectory,
    series: &ObservableSeries,
    trace: &FrontTrace,
) -> Result<(), ExperimentError> {
    let dir = &manifest.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| ExperimentError::Io { path: dir.clone(), source })?;
    let files = &manifest.files;
    let io_err = |path: &PathBuf| {
        let path = path.clone();
        move |source| ExperimentError::Io { path, source }
    };
    output::write_snapshots(&files[0], traj).map_err(io_err(&files[0]))?;
    output::write_observables(&files[1], series).map_err(io_err(&files[1]))?;
    output::write_front(&files[2], trace).map_err(io_err(&files[2]))?;
    output::write_report(&files[3], manifest).map_err(io_err(&files[3]))
}
