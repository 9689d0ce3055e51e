use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spin ({x}, {y}, {z}) is not unit-norm (| |s| - 1 | = {drift:e})")]
    NotUnitNorm { x: f64, y: f64, z: f64, drift: f64 },

    #[error("a chain needs at least one site")]
    EmptyChain,

    #[error("preset {preset} requires an odd n_sites so that a single center site exists, got {n_sites}")]
    EvenCenteredChain { preset: &'static str, n_sites: usize },

    #[error("{0}")]
    InvalidPreset(String),

    #[error("invalid value for `{key}`: {reason}")]
    InvalidParameter { key: &'static str, reason: String },

    #[error("length mismatch: expected {expected} sites, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("energy drift {drift:e} exceeded the abort threshold {threshold:e} at t = {time}; dt is likely too large")]
    EnergyDrift { time: f64, drift: f64, threshold: f64 },

    #[error("contour level {level:e} is below the noise floor {floor:e}")]
    BelowNoiseFloor { level: f64, floor: f64 },

    #[error("insufficient data: {needed} points required in [{start}, {end}], found {found}")]
    InsufficientData { needed: usize, found: usize, start: f64, end: f64 },

    #[error("fit window [{start}, {end}] overlaps the end contact of the front at t = {contact}")]
    EndContact { start: f64, end: f64, contact: f64 },
}
