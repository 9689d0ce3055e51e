//! Per-site diagnostics: departure from the bulk direction (`1 - F`) and the
//! component normal to the chain axis (`S_N`).

use crate::chain::{Spin, SpinChain};
use crate::error::{Error, Result};
use crate::integrator::Trajectory;

/// `1 - s_l . r_l` per site, against a reference chain of equal length.
///
/// Computed as `|s - r|^2 / 2`, which equals `1 - s . r` for unit vectors and
/// keeps full relative precision when the departure is tiny.
pub fn fidelity(chain: &SpinChain, reference: &SpinChain) -> Result<Vec<f64>> {
    if chain.len() != reference.len() {
        return Err(Error::LengthMismatch { expected: reference.len(), actual: chain.len() });
    }
    Ok(chain
        .spins()
        .iter()
        .zip(reference.spins())
        .map(|(s, r)| departure(s, r))
        .collect())
}

/// `1 - s_l . r` per site for a single reference direction.
pub fn departure_from(chain: &SpinChain, reference: Spin) -> Vec<f64> {
    chain.spins().iter().map(|s| departure(s, &reference)).collect()
}

fn departure(s: &Spin, r: &Spin) -> f64 {
    (0.5 * (s.vector() - r.vector()).norm_squared()).clamp(0.0, 2.0)
}

/// `sqrt(s_y^2 + s_z^2)` per site.
pub fn normal_component(chain: &SpinChain) -> Vec<f64> {
    chain.spins().iter().map(|s| s.y().hypot(s.z()).min(1.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    OneMinusFidelity,
    NormalComponent,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::OneMinusFidelity => "one_minus_F",
            Observable::NormalComponent => "S_N",
        }
    }
}

/// One observable sampled at snapshot times; `values[t][l - 1]` for site `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableMatrix {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub spacing: f64,
}

impl ObservableMatrix {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>, spacing: f64) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch { expected: times.len(), actual: values.len() });
        }
        let n = values.first().map_or(0, Vec::len);
        if let Some(row) = values.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch { expected: n, actual: row.len() });
        }
        Ok(ObservableMatrix { times, values, spacing })
    }

    pub fn n_sites(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    /// Value at time index `t` and 1-indexed `site`.
    pub fn at(&self, t: usize, site: usize) -> f64 {
        self.values[t][site - 1]
    }

    /// Reflects every row about the chain midpoint.
    pub fn mirrored(&self) -> ObservableMatrix {
        let values = self
            .values
            .iter()
            .map(|row| row.iter().rev().copied().collect())
            .collect();
        ObservableMatrix { times: self.times.clone(), values, spacing: self.spacing }
    }

    /// Largest `|a - b|` between this matrix and its mirror image.
    pub fn mirror_asymmetry(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|row| {
                let n = row.len();
                (0..n / 2).map(move |i| (row[i] - row[n - 1 - i]).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Both observables over a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub one_minus_f: ObservableMatrix,
    pub normal: ObservableMatrix,
}

impl ObservableSeries {
    /// Fidelity is measured against a single bulk direction, not the per-site
    /// initial state.
    pub fn from_trajectory(traj: &Trajectory, reference: Spin) -> Self {
        Self::from_snapshots(&traj.times, &traj.snapshots, reference)
    }

    pub fn from_snapshots(times: &[f64], snapshots: &[SpinChain], reference: Spin) -> Self {
        let spacing = snapshots.first().map_or(1.0, SpinChain::spacing);
        let one_minus_f = snapshots.iter().map(|c| departure_from(c, reference)).collect();
        let normal = snapshots.iter().map(normal_component).collect();
        ObservableSeries {
            one_minus_f: ObservableMatrix { times: times.to_vec(), values: one_minus_f, spacing },
            normal: ObservableMatrix { times: times.to_vec(), values: normal, spacing },
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.one_minus_f.times
    }

    pub fn matrix(&self, observable: Observable) -> &ObservableMatrix {
        match observable {
            Observable::OneMinusFidelity => &self.one_minus_f,
            Observable::NormalComponent => &self.normal,
        }
    }
}
