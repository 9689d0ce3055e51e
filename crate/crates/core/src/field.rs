//! Long-range dipolar field on a chain along the x axis.
//!
//! For a chain along `e_x` the dipolar sum reduces to one scalar kernel
//! `k(d) = 1 / |d a|^alpha` (with `k(0) = 0`) applied to each spin component:
//!
//! ```text
//! H_l = C_M * sum_{l' != l} k(l - l') * (2 s_x', -s_y', -s_z')
//! ```
//!
//! [`field_direct`] evaluates the sum pairwise; [`field_fft`] evaluates the same
//! linear convolution with zero-padded transforms.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::chain::{SpinChain, Vec3};
use crate::config::FieldSign;
use crate::error::{Error, Result};

/// Per-site field vectors, same length and order as the chain.
pub type FieldArray = Vec<Vec3>;

/// Chains at least this long use the FFT evaluator inside the time loop.
pub const FFT_CROSSOVER: usize = 64;

fn kernel_value(distance: usize, spacing: f64, alpha: f64) -> f64 {
    if distance == 0 {
        0.0
    } else {
        (distance as f64 * spacing).powf(-alpha)
    }
}

#[inline]
fn axial_combination(sum: Vec3, c_m: f64) -> Vec3 {
    Vec3::new(2.0 * sum.x, -sum.y, -sum.z) * c_m
}

/// Exact pairwise field. Each site accumulates neighbours in ascending distance,
/// adding the left and right partner at the same distance together, so a
/// mirrored chain yields a bit-exact mirrored field.
pub fn field_direct(chain: &SpinChain, alpha: f64, c_m: f64) -> FieldArray {
    let spins = chain.spins();
    let n = spins.len();
    let kernel: Vec<f64> = (0..n).map(|d| kernel_value(d, chain.spacing(), alpha)).collect();
    (0..n)
        .map(|i| {
            let mut sum = Vec3::zeros();
            for (d, &k) in kernel.iter().enumerate().skip(1) {
                let left = (i >= d).then(|| *spins[i - d].vector());
                let right = (i + d < n).then(|| *spins[i + d].vector());
                let pair = match (left, right) {
                    (Some(l), Some(r)) => l + r,
                    (Some(v), None) | (None, Some(v)) => v,
                    (None, None) => break,
                };
                sum += pair * k;
            }
            axial_combination(sum, c_m)
        })
        .collect()
}

/// Precomputed spectrum of the scalar kernel for one chain length and exponent.
#[derive(Clone)]
pub struct FieldKernel {
    alpha: f64,
    n_sites: usize,
    spacing: f64,
    spectrum: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FieldKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldKernel")
            .field("alpha", &self.alpha)
            .field("n_sites", &self.n_sites)
            .field("spacing", &self.spacing)
            .field("padded_len", &self.spectrum.len())
            .finish()
    }
}

impl FieldKernel {
    pub fn new(n_sites: usize, spacing: f64, alpha: f64) -> Self {
        let len = (2 * n_sites.max(1)).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);

        // Even kernel wrapped circularly: k[d] and k[len - d] for 0 < d < n.
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        for d in 1..n_sites {
            let k = kernel_value(d, spacing, alpha);
            buf[d].re = k;
            buf[len - d].re = k;
        }
        forward.process(&mut buf);
        // The transform of a real even sequence is real.
        let spectrum = buf.iter().map(|c| c.re).collect();

        FieldKernel { alpha, n_sites, spacing, spectrum, forward, inverse }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn padded_len(&self) -> usize {
        self.spectrum.len()
    }

    /// Real-space kernel value at `distance` lattice sites.
    pub fn value(&self, distance: usize) -> f64 {
        kernel_value(distance, self.spacing, self.alpha)
    }

    /// Convolves `(x + i y)` and `z` channels in place.
    fn convolve(&self, a: &mut [Complex<f64>], b: &mut [Complex<f64>]) {
        let scale = 1.0 / self.spectrum.len() as f64;
        for buf in [a, b] {
            self.forward.process(buf);
            for (c, &k) in buf.iter_mut().zip(&self.spectrum) {
                *c *= k * scale;
            }
            self.inverse.process(buf);
        }
    }
}

/// Field by zero-padded FFT convolution.
///
/// The kernel is real, so the x and y components share one complex transform.
pub fn field_fft(chain: &SpinChain, kernel: &FieldKernel, c_m: f64) -> Result<FieldArray> {
    let n = chain.len();
    if n != kernel.n_sites {
        return Err(Error::LengthMismatch { expected: kernel.n_sites, actual: n });
    }
    if chain.spacing() != kernel.spacing {
        return Err(Error::InvalidParameter {
            key: "spacing",
            reason: format!("kernel built for spacing {}, chain has {}", kernel.spacing, chain.spacing()),
        });
    }
    let len = kernel.padded_len();
    let zero = Complex::new(0.0, 0.0);
    let mut xy = vec![zero; len];
    let mut z = vec![zero; len];
    for (i, s) in chain.spins().iter().enumerate() {
        xy[i] = Complex::new(s.x(), s.y());
        z[i].re = s.z();
    }
    kernel.convolve(&mut xy, &mut z);
    Ok((0..n)
        .map(|i| axial_combination(Vec3::new(xy[i].re, xy[i].im, z[i].re), c_m))
        .collect())
}

/// Total dipolar energy, each pair counted once:
/// `E = C_M * sum_{l<l'} (s_l . s_l' - 3 s_l^x s_l'^x) / r^alpha`.
///
/// The field of [`field_direct`] is minus the gradient of this energy.
pub fn total_energy(chain: &SpinChain, alpha: f64, c_m: f64) -> f64 {
    let spins = chain.spins();
    let n = spins.len();
    let mut energy = 0.0;
    for d in 1..n {
        let k = kernel_value(d, chain.spacing(), alpha);
        let mut shell = 0.0;
        for i in 0..n - d {
            let (a, b) = (spins[i].vector(), spins[i + d].vector());
            shell += a.dot(b) - 3.0 * a.x * b.x;
        }
        energy += k * shell;
    }
    c_m * energy
}

/// Energy from an already evaluated field: `E = -1/2 sum_l s_l . H_l`.
pub fn energy_from_field(chain: &SpinChain, field: &[Vec3]) -> f64 {
    -0.5 * chain
        .spins()
        .iter()
        .zip(field)
        .map(|(s, h)| s.vector().dot(h))
        .sum::<f64>()
}

/// Field evaluator bound to a chain length and interaction parameters.
///
/// Uses the FFT route for chains of [`FFT_CROSSOVER`] sites or more.
#[derive(Debug, Clone)]
pub struct FieldSolver {
    alpha: f64,
    c_m: f64,
    sign: FieldSign,
    n_sites: usize,
    kernel: Option<FieldKernel>,
}

impl FieldSolver {
    pub fn new(n_sites: usize, spacing: f64, alpha: f64, c_m: f64, sign: FieldSign) -> Self {
        let kernel = (n_sites >= FFT_CROSSOVER).then(|| FieldKernel::new(n_sites, spacing, alpha));
        FieldSolver { alpha, c_m, sign, n_sites, kernel }
    }

    pub fn for_chain(chain: &SpinChain, alpha: f64, c_m: f64, sign: FieldSign) -> Self {
        Self::new(chain.len(), chain.spacing(), alpha, c_m, sign)
    }

    /// Forces the direct evaluator regardless of chain length.
    pub fn direct_only(mut self) -> Self {
        self.kernel = None;
        self
    }

    pub fn uses_fft(&self) -> bool {
        self.kernel.is_some()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c_m(&self) -> f64 {
        self.c_m
    }

    pub fn sign(&self) -> FieldSign {
        self.sign
    }

    /// Dipolar field without the sign flag applied; this is the energy gradient.
    pub fn dipolar_field(&self, chain: &SpinChain) -> Result<FieldArray> {
        if chain.len() != self.n_sites {
            return Err(Error::LengthMismatch { expected: self.n_sites, actual: chain.len() });
        }
        match &self.kernel {
            Some(kernel) => field_fft(chain, kernel, self.c_m),
            None => Ok(field_direct(chain, self.alpha, self.c_m)),
        }
    }

    /// Field driving the precession, including the sign flag.
    pub fn precession_field(&self, dipolar: &[Vec3]) -> FieldArray {
        let f = self.sign.factor();
        dipolar.iter().map(|h| h * f).collect()
    }
}
