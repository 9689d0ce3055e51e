//! Time stepping for `ds/dt = -s x H` without damping.
//!
//! Each spin is advanced by an exact rotation about its local field, so
//! `|s| = 1` holds up to rounding regardless of the step size. The Heun
//! corrector rotates the *initial* spin about the average of the predictor
//! and corrector fields instead of averaging two rotated states.

use crate::chain::{make_preset, Spin, SpinChain, Vec3};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::field::{energy_from_field, FieldArray, FieldSolver};

/// Conservation diagnostics recorded with each snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub time: f64,
    /// `max_l | |s_l| - 1 |` for the recorded state.
    pub max_norm_drift: f64,
    pub energy: f64,
    /// Largest `|H| dt` applied by any step since the previous record.
    pub max_precession_angle: f64,
}

/// Rotates `s` by the angle `|h| dt` about `h / |h|`.
///
/// With `u = sin w`, `v = cos w`, `w' = 1 - v` the rotation matrix is
///
/// ```text
/// | hx hx w' + v      hx hy w' - hz u   hx hz w' + hy u |
/// | hx hy w' + hz u   hy hy w' + v      hy hz w' - hx u |
/// | hx hz w' - hy u   hy hz w' + hx u   hz hz w' + v    |
/// ```
///
/// which to first order in `dt` is `s + dt h x s = s - dt s x h`.
pub fn rodrigues_rotate(s: Spin, h: Vec3, dt: f64) -> Spin {
    let magnitude = h.norm();
    if magnitude == 0.0 {
        return s;
    }
    let omega = magnitude * dt;
    let (hx, hy, hz) = (h.x / magnitude, h.y / magnitude, h.z / magnitude);
    let (u, v) = omega.sin_cos();
    let w = 1.0 - v;
    let (sx, sy, sz) = (s.x(), s.y(), s.z());
    Spin::from_rotated(Vec3::new(
        (hx * hx * w + v) * sx + (hx * hy * w - hz * u) * sy + (hx * hz * w + hy * u) * sz,
        (hx * hy * w + hz * u) * sx + (hy * hy * w + v) * sy + (hy * hz * w - hx * u) * sz,
        (hx * hz * w - hy * u) * sx + (hy * hz * w + hx * u) * sy + (hz * hz * w + v) * sz,
    ))
}

fn rotate_all(chain: &SpinChain, field: &[Vec3], dt: f64) -> SpinChain {
    let spins = chain
        .spins()
        .iter()
        .zip(field)
        .map(|(&s, &h)| rodrigues_rotate(s, h, dt))
        .collect();
    SpinChain::from_parts(spins, chain.spacing())
}

/// Heun step given the dipolar field of `chain`. Returns the new chain and the
/// largest precession angle used by the corrector.
fn heun_with_field(
    chain: &SpinChain,
    dipolar: &[Vec3],
    solver: &FieldSolver,
    dt: f64,
) -> Result<(SpinChain, f64)> {
    let h0 = solver.precession_field(dipolar);
    let predicted = rotate_all(chain, &h0, dt);
    let h1 = solver.precession_field(&solver.dipolar_field(&predicted)?);
    let averaged: FieldArray = h0.iter().zip(&h1).map(|(a, b)| (a + b) * 0.5).collect();
    let max_angle = averaged.iter().map(|h| h.norm() * dt).fold(0.0, f64::max);
    Ok((rotate_all(chain, &averaged, dt), max_angle))
}

/// One predictor-corrector step of length `dt`.
pub fn heun_step(chain: &SpinChain, solver: &FieldSolver, dt: f64) -> Result<SpinChain> {
    let dipolar = solver.dipolar_field(chain)?;
    heun_with_field(chain, &dipolar, solver, dt).map(|(next, _)| next)
}

/// Recorded evolution of a run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Snapshot times, starting at 0.
    pub times: Vec<f64>,
    pub snapshots: Vec<SpinChain>,
    /// One entry per snapshot.
    pub stats: Vec<StepStats>,
    pub steps_taken: usize,
    /// Maximum over every step, not only the recorded ones.
    pub max_norm_drift: f64,
    /// Maximum relative energy drift over every step.
    pub max_energy_drift: f64,
    pub initial_energy: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> &SpinChain {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &SpinChain {
        self.snapshots.last().expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial time")
    }
}

pub(crate) fn relative_drift(energy: f64, initial: f64) -> f64 {
    let diff = (energy - initial).abs();
    if initial != 0.0 {
        diff / initial.abs()
    } else {
        diff
    }
}

/// Runs a preset configuration.
pub fn run_simulation(config: &SimConfig) -> Result<Trajectory> {
    config.validate()?;
    let chain = make_preset(config.preset, config.n_sites)?;
    run_simulation_from(chain, config)
}

/// Runs from an explicit initial chain; `config.preset` is ignored.
pub fn run_simulation_from(initial: SpinChain, config: &SimConfig) -> Result<Trajectory> {
    config.validate_for_chain(&initial)?;
    let solver = FieldSolver::for_chain(&initial, config.alpha, config.c_m, config.field_sign);

    // (step size, number of steps, phase start time)
    let mut phases = Vec::with_capacity(2);
    let mut phase_start = 0.0;
    if let Some(fine_dt) = config.fine_start_dt {
        let steps = (config.fine_phase_end() / fine_dt).round() as usize;
        phases.push((fine_dt, steps, 0.0));
        phase_start = steps as f64 * fine_dt;
    }
    let coarse_steps = ((config.t_end - phase_start).max(0.0) / config.dt).round() as usize;
    phases.push((config.dt, coarse_steps, phase_start));

    let mut chain = initial;
    let mut dipolar = solver.dipolar_field(&chain)?;
    let initial_energy = energy_from_field(&chain, &dipolar);
    let initial_drift = chain.max_norm_drift();

    let mut traj = Trajectory {
        times: vec![0.0],
        snapshots: vec![chain.clone()],
        stats: vec![StepStats {
            time: 0.0,
            max_norm_drift: initial_drift,
            energy: initial_energy,
            max_precession_angle: 0.0,
        }],
        steps_taken: 0,
        max_norm_drift: initial_drift,
        max_energy_drift: 0.0,
        initial_energy,
    };

    let mut angle_since_record: f64 = 0.0;
    for (dt, steps, start) in phases {
        for k in 1..=steps {
            let (next, angle) = heun_with_field(&chain, &dipolar, &solver, dt)?;
            chain = next;
            dipolar = solver.dipolar_field(&chain)?;
            let time = start + k as f64 * dt;
            traj.steps_taken += 1;

            let energy = energy_from_field(&chain, &dipolar);
            let drift = relative_drift(energy, initial_energy);
            if drift > config.abort_energy_drift {
                return Err(Error::EnergyDrift { time, drift, threshold: config.abort_energy_drift });
            }
            let norm_drift = chain.max_norm_drift();
            traj.max_energy_drift = traj.max_energy_drift.max(drift);
            traj.max_norm_drift = traj.max_norm_drift.max(norm_drift);
            angle_since_record = angle_since_record.max(angle);

            if traj.steps_taken.is_multiple_of(config.snapshot_stride) {
                traj.times.push(time);
                traj.snapshots.push(chain.clone());
                traj.stats.push(StepStats {
                    time,
                    max_norm_drift: norm_drift,
                    energy,
                    max_precession_angle: angle_since_record,
                });
                angle_since_record = 0.0;
            }
        }
    }
    Ok(traj)
}
