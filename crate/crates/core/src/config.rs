//! Run parameters.

use std::fmt;

use crate::chain::{make_preset, Preset, SpinChain};
use crate::error::{Error, Result};
use crate::field::field_direct;

/// A closed time interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub const fn new(start: f64, end: f64) -> Self {
        Interval { start, end }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn clipped_to(&self, t_end: f64) -> Interval {
        Interval::new(self.start.min(t_end), self.end.min(t_end))
    }

    /// Same interval on a time axis stretched by `factor`.
    pub fn scaled(&self, factor: f64) -> Interval {
        Interval::new(self.start * factor, self.end * factor)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.start, self.end)
    }
}

/// Overall sign applied to the dipolar field. `Negative` reproduces the
/// opposite sign convention; it only reverses the precession sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldSign {
    #[default]
    Positive,
    Negative,
}

impl FieldSign {
    pub fn factor(self) -> f64 {
        match self {
            FieldSign::Positive => 1.0,
            FieldSign::Negative => -1.0,
        }
    }
}

pub const DEFAULT_EARLY_WINDOW: Interval = Interval::new(0.0, 0.1);
pub const DEFAULT_LINEAR_START: f64 = 0.15;
pub const DEFAULT_CONTOUR_LEVEL: f64 = 1e-8;
pub const DEFAULT_NOISE_FLOOR: f64 = 1e-12;
pub const DEFAULT_ABORT_ENERGY_DRIFT: f64 = 1e-2;
/// Largest allowed precession angle per step for the initial state.
pub const MAX_INITIAL_ANGLE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub preset: Preset,
    pub n_sites: usize,
    /// Interaction exponent; the dipolar case is 3.
    pub alpha: f64,
    pub c_m: f64,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub contour_level: f64,
    pub noise_floor: f64,
    pub field_sign: FieldSign,
    /// `None` means the default `[0, 0.1]`, clipped to `t_end`.
    pub fit_window_early: Option<Interval>,
    /// `None` means the default `[0.15, t_end]`.
    pub fit_window_linear: Option<Interval>,
    /// Finer step used over the early fit window before switching to `dt`.
    pub fine_start_dt: Option<f64>,
    pub abort_energy_drift: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig::for_preset(Preset::HighEnergy)
    }
}

impl SimConfig {
    /// Defaults for a preset, with the chain length used for that experiment.
    pub fn for_preset(preset: Preset) -> Self {
        SimConfig {
            preset,
            n_sites: default_sites(preset),
            alpha: 3.0,
            c_m: 1.0,
            dt: 2.5e-3,
            t_end: 2.0,
            snapshot_stride: 4,
            contour_level: DEFAULT_CONTOUR_LEVEL,
            noise_floor: DEFAULT_NOISE_FLOOR,
            field_sign: FieldSign::Positive,
            fit_window_early: None,
            fit_window_linear: None,
            fine_start_dt: None,
            abort_energy_drift: DEFAULT_ABORT_ENERGY_DRIFT,
        }
    }

    pub fn early_window(&self) -> Interval {
        self.fit_window_early
            .unwrap_or_else(|| DEFAULT_EARLY_WINDOW.clipped_to(self.t_end))
    }

    pub fn linear_window(&self) -> Interval {
        self.fit_window_linear
            .unwrap_or_else(|| Interval::new(DEFAULT_LINEAR_START.min(self.t_end), self.t_end))
    }

    /// End of the fine-step phase (zero when no fine step is configured).
    pub fn fine_phase_end(&self) -> f64 {
        match self.fine_start_dt {
            Some(_) => self.early_window().end.min(self.t_end),
            None => 0.0,
        }
    }

    /// Checks every parameter and builds the initial chain for non-custom presets.
    pub fn validate(&self) -> Result<()> {
        self.validate_scalars()?;
        if self.preset != Preset::Custom {
            let chain = make_preset(self.preset, self.n_sites)?;
            self.validate_for_chain(&chain)?;
        }
        Ok(())
    }

    /// Checks the step-size bound against a concrete initial chain.
    pub fn validate_for_chain(&self, chain: &SpinChain) -> Result<()> {
        self.validate_scalars()?;
        if chain.len() != self.n_sites {
            return Err(Error::LengthMismatch { expected: self.n_sites, actual: chain.len() });
        }
        let h_max = field_direct(chain, self.alpha, self.c_m)
            .iter()
            .map(|h| h.norm())
            .fold(0.0, f64::max);
        let dt_max = self.fine_start_dt.map_or(self.dt, |f| f.max(self.dt));
        if dt_max * h_max >= MAX_INITIAL_ANGLE {
            return Err(Error::InvalidParameter {
                key: "dt",
                reason: format!(
                    "dt * max|H| = {:e} must stay below {MAX_INITIAL_ANGLE} (max|H| = {h_max})",
                    dt_max * h_max
                ),
            });
        }
        Ok(())
    }

    fn validate_scalars(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(invalid("n_sites", "must be a positive integer"));
        }
        if !(self.alpha >= 2.0) || !self.alpha.is_finite() {
            return Err(invalid("alpha", format!("must be a finite real >= 2, got {}", self.alpha)));
        }
        positive("c_m", self.c_m)?;
        positive("dt", self.dt)?;
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(invalid("t_end", format!("must be a finite real >= 0, got {}", self.t_end)));
        }
        if self.snapshot_stride == 0 {
            return Err(invalid("snapshot_stride", "must be a positive integer"));
        }
        positive("contour_level", self.contour_level)?;
        positive("noise_floor", self.noise_floor)?;
        if self.contour_level < self.noise_floor {
            return Err(invalid(
                "contour_level",
                format!("{:e} is below the noise floor {:e}", self.contour_level, self.noise_floor),
            ));
        }
        positive("abort_energy_drift", self.abort_energy_drift)?;
        if let Some(fine) = self.fine_start_dt {
            positive("fine_start_dt", fine)?;
            if fine > self.dt {
                return Err(invalid("fine_start_dt", format!("{fine} must not exceed dt = {}", self.dt)));
            }
        }
        for (key, window) in [
            ("fit_window_early", self.fit_window_early),
            ("fit_window_linear", self.fit_window_linear),
        ] {
            if let Some(w) = window {
                if !(w.start >= 0.0 && w.start <= w.end && w.end <= self.t_end) {
                    return Err(invalid(
                        key,
                        format!("[{}, {}] must be ordered and inside [0, t_end = {}]", w.start, w.end, self.t_end),
                    ));
                }
            }
        }
        let (early, linear) = (self.early_window(), self.linear_window());
        if early.end > linear.start {
            return Err(invalid(
                "fit_window_linear",
                format!("must start after the early window ends ({} > {})", early.end, linear.start),
            ));
        }
        Ok(())
    }
}

pub fn default_sites(preset: Preset) -> usize {
    match preset {
        Preset::HighEnergy | Preset::Custom => 213,
        Preset::GroundState => 257,
        Preset::Supp => 1024,
    }
}

fn invalid(key: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { key, reason: reason.into() }
}

fn positive(key: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("must be a positive finite real, got {value}")))
    }
}
