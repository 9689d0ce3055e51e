//! Spins, chains, and the initial configurations used in the experiments.

use std::fmt;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Tolerance on `| |s| - 1 |` accepted when constructing a [`Spin`].
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A classical dipole direction, a unit 3-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spin(Vec3);

impl Spin {
    pub const X: Spin = Spin(Vec3::new(1.0, 0.0, 0.0));
    pub const Y: Spin = Spin(Vec3::new(0.0, 1.0, 0.0));
    pub const Z: Spin = Spin(Vec3::new(0.0, 0.0, 1.0));

    /// Builds a spin from components that must already be unit-norm.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Vec3::new(x, y, z);
        let drift = (v.norm() - 1.0).abs();
        if !(drift <= UNIT_NORM_TOL) {
            return Err(Error::NotUnitNorm { x, y, z, drift });
        }
        Ok(Spin(v))
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn from_direction(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotUnitNorm { x: v.x, y: v.y, z: v.z, drift: f64::NAN });
        }
        Ok(Spin(v / n))
    }

    /// Wraps a vector produced by a norm-preserving operation. No check is made.
    pub(crate) fn from_rotated(v: Vec3) -> Self {
        Spin(v)
    }

    pub fn vector(&self) -> &Vec3 {
        &self.0
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn norm_drift(&self) -> f64 {
        (self.0.norm() - 1.0).abs()
    }
}

/// Spins on a regular 1D lattice along the x axis.
///
/// Sites are addressed 1-indexed on every public surface: site `l` sits at
/// `x = l * spacing`. Storage is a plain 0-indexed vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinChain {
    spins: Vec<Spin>,
    spacing: f64,
}

impl SpinChain {
    pub fn new(spins: Vec<Spin>) -> Result<Self> {
        Self::with_spacing(spins, 1.0)
    }

    pub fn with_spacing(spins: Vec<Spin>, spacing: f64) -> Result<Self> {
        if spins.is_empty() {
            return Err(Error::EmptyChain);
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidParameter {
                key: "spacing",
                reason: format!("must be a positive finite length, got {spacing}"),
            });
        }
        Ok(SpinChain { spins, spacing })
    }

    pub fn uniform(n_sites: usize, spin: Spin) -> Result<Self> {
        Self::new(vec![spin; n_sites])
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    /// Spin at 1-indexed `site`.
    pub fn site(&self, site: usize) -> Spin {
        self.spins[site - 1]
    }

    /// Position of 1-indexed `site` along the chain axis.
    pub fn position(&self, site: usize) -> f64 {
        site as f64 * self.spacing
    }

    pub(crate) fn set_site(&mut self, site: usize, spin: Spin) {
        self.spins[site - 1] = spin;
    }

    pub(crate) fn from_parts(spins: Vec<Spin>, spacing: f64) -> Self {
        SpinChain { spins, spacing }
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.spins.iter().map(Spin::norm_drift).fold(0.0, f64::max)
    }

    /// The chain reflected about its midpoint: site `l` maps to `N + 1 - l`.
    pub fn mirrored(&self) -> SpinChain {
        let mut spins = self.spins.clone();
        spins.reverse();
        SpinChain { spins, spacing: self.spacing }
    }
}

/// Initial configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Bulk along +y, center site along +x.
    HighEnergy,
    /// Bulk along +y, center site along +z.
    GroundState,
    /// Bulk along +x (the chain axis), site `n/2` along +z.
    Supp,
    /// Caller-supplied initial chain.
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::HighEnergy, Preset::GroundState, Preset::Supp, Preset::Custom];

    pub fn name(self) -> &'static str {
        match self {
            Preset::HighEnergy => "HIGH_ENERGY",
            Preset::GroundState => "GROUND_STATE",
            Preset::Supp => "SUPP",
            Preset::Custom => "CUSTOM",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(name.trim()))
    }

    /// Whether the perturbed site must be the exact center of the chain.
    pub fn is_centered(self) -> bool {
        matches!(self, Preset::HighEnergy | Preset::GroundState)
    }

    /// Orientation shared by all unperturbed sites.
    pub fn bulk(self) -> Option<Spin> {
        match self {
            Preset::HighEnergy | Preset::GroundState => Some(Spin::Y),
            Preset::Supp => Some(Spin::X),
            Preset::Custom => None,
        }
    }

    fn perturbation(self) -> Option<Spin> {
        match self {
            Preset::HighEnergy => Some(Spin::X),
            Preset::GroundState | Preset::Supp => Some(Spin::Z),
            Preset::Custom => None,
        }
    }

    /// 1-indexed perturbed site for a chain of `n_sites`.
    pub fn perturbed_site(self, n_sites: usize) -> Result<usize> {
        match self {
            Preset::HighEnergy | Preset::GroundState => {
                if n_sites == 0 {
                    return Err(Error::EmptyChain);
                }
                if n_sites.is_multiple_of(2) {
                    return Err(Error::EvenCenteredChain { preset: self.name(), n_sites });
                }
                Ok(n_sites.div_ceil(2))
            }
            Preset::Supp => {
                if n_sites < 2 {
                    return Err(Error::InvalidPreset(format!(
                        "preset SUPP perturbs site n_sites/2 and needs n_sites >= 2, got {n_sites}"
                    )));
                }
                Ok(n_sites / 2)
            }
            Preset::Custom => Err(custom_error()),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn custom_error() -> Error {
    Error::InvalidPreset(
        "preset CUSTOM has no built-in initial state; build a SpinChain and use run_simulation_from".into(),
    )
}

/// Builds the initial chain for a preset. Exactly one site differs from the bulk.
pub fn make_preset(preset: Preset, n_sites: usize) -> Result<SpinChain> {
    let (bulk, kick) = match (preset.bulk(), preset.perturbation()) {
        (Some(b), Some(k)) => (b, k),
        _ => return Err(custom_error()),
    };
    let site = preset.perturbed_site(n_sites)?;
    let mut chain = SpinChain::uniform(n_sites, bulk)?;
    chain.set_site(site, kick);
    Ok(chain)
}
