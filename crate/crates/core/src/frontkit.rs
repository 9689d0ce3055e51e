//! Front detection on observable matrices and the two-regime fits.
//!
//! A front is the outermost position, on each side of the perturbed site,
//! where an observable crosses a fixed contour level. Its reach from the
//! center is fitted by a power law `A t^beta` at early times and by a line
//! `B + v_s t` afterwards.

use std::fmt;

use crate::config::{Interval, DEFAULT_NOISE_FLOOR};
use crate::error::{Error, Result};
use crate::observables::ObservableMatrix;

/// Minimum number of trace samples a fit window must contain.
pub const MIN_FIT_POINTS: usize = 10;

/// Front reach on both sides of the perturbed site over time.
///
/// Reaches are distances from the center in units of length; positions are
/// `center * spacing -/+ reach`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontTrace {
    pub times: Vec<f64>,
    pub reach_left: Vec<f64>,
    pub reach_right: Vec<f64>,
    /// 1-indexed perturbed site.
    pub center: usize,
    pub n_sites: usize,
    pub spacing: f64,
    pub contour_level: f64,
}

impl FrontTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn center_position(&self) -> f64 {
        self.center as f64 * self.spacing
    }

    pub fn x_left(&self, i: usize) -> f64 {
        self.center_position() - self.reach_left[i]
    }

    pub fn x_right(&self, i: usize) -> f64 {
        self.center_position() + self.reach_right[i]
    }

    /// Mean reach of the two sides.
    pub fn half_width(&self, i: usize) -> f64 {
        0.5 * (self.reach_left[i] + self.reach_right[i])
    }

    /// First time the front touches site 1 or site N.
    pub fn first_end_contact(&self) -> Option<f64> {
        let max_left = (self.center - 1) as f64 * self.spacing;
        let max_right = (self.n_sites - self.center) as f64 * self.spacing;
        (0..self.len())
            .find(|&i| self.reach_left[i] >= max_left || self.reach_right[i] >= max_right)
            .map(|i| self.times[i])
    }

    /// `window` shortened to end at the last sample before end contact.
    pub fn window_before_contact(&self, window: Interval) -> Interval {
        match self.first_end_contact() {
            Some(contact) => {
                let last = self
                    .times
                    .iter()
                    .copied()
                    .filter(|&t| t < contact)
                    .fold(window.start, f64::max);
                Interval::new(window.start, window.end.min(last))
            }
            None => window,
        }
    }

    fn samples_in(&self, window: Interval) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len())
            .filter(move |&i| window.contains(self.times[i]))
            .map(move |i| (self.times[i], self.half_width(i)))
    }
}

/// Scans one side outward from the center. `sites` lists 1-indexed sites in
/// outward order. Returns the reach in lattice units.
fn side_reach(row: &[f64], center: usize, sites: &[usize], level: f64) -> Option<f64> {
    let last = sites.iter().rposition(|&l| row[l - 1] >= level)?;
    let site = sites[last];
    let steps = site.abs_diff(center) as f64;
    let Some(&beyond) = sites.get(last + 1) else {
        return Some(steps);
    };
    let (inside, outside) = (row[site - 1], row[beyond - 1]);
    if outside <= 0.0 {
        return Some(steps);
    }
    let frac = (inside.ln() - level.ln()) / (inside.ln() - outside.ln());
    Some(steps + frac.clamp(0.0, 1.0))
}

/// Front reach at a contour level, using the default noise floor.
pub fn detect_front(matrix: &ObservableMatrix, contour_level: f64, center: usize) -> Result<FrontTrace> {
    detect_front_with_floor(matrix, contour_level, center, DEFAULT_NOISE_FLOOR)
}

/// On each side the front is the outermost site at or above the level,
/// refined by linear interpolation of `ln(observable)` toward the next site
/// out. The perturbed site itself never counts. Times where either side has
/// no crossing are left out of the trace.
pub fn detect_front_with_floor(
    matrix: &ObservableMatrix,
    contour_level: f64,
    center: usize,
    noise_floor: f64,
) -> Result<FrontTrace> {
    if !(contour_level >= noise_floor) {
        return Err(Error::BelowNoiseFloor { level: contour_level, floor: noise_floor });
    }
    let n = matrix.n_sites();
    if center == 0 || center > n {
        return Err(Error::InvalidParameter {
            key: "center",
            reason: format!("site {center} is outside 1..={n}"),
        });
    }
    let right: Vec<usize> = (center + 1..=n).collect();
    let left: Vec<usize> = (1..center).rev().collect();

    let mut trace = FrontTrace {
        times: Vec::new(),
        reach_left: Vec::new(),
        reach_right: Vec::new(),
        center,
        n_sites: n,
        spacing: matrix.spacing,
        contour_level,
    };
    for (&t, row) in matrix.times.iter().zip(&matrix.values) {
        let l = side_reach(row, center, &left, contour_level);
        let r = side_reach(row, center, &right, contour_level);
        if let (Some(l), Some(r)) = (l, r) {
            trace.times.push(t);
            trace.reach_left.push(l * matrix.spacing);
            trace.reach_right.push(r * matrix.spacing);
        }
    }
    Ok(trace)
}

/// Ordinary least squares `y = intercept + slope x`.
#[derive(Debug, Clone, Copy)]
struct LineFit {
    intercept: f64,
    slope: f64,
    slope_stderr: f64,
}

fn least_squares(points: &[(f64, f64)]) -> LineFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let slope_stderr = if points.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    LineFit { intercept, slope, slope_stderr }
}

fn rms(residuals: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = residuals.fold((0.0, 0usize), |(s, c), r| (s + r * r, c + 1));
    (sum / count.max(1) as f64).sqrt()
}

/// Power-law precursor `reach = amplitude * t^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecursorFit {
    pub amplitude: f64,
    pub exponent: f64,
    /// RMS of `reach - amplitude t^exponent`, in units of length.
    pub residual_rms: f64,
    pub points: usize,
}

impl PrecursorFit {
    /// Front speed `A beta t^(beta - 1)` implied by the fit.
    pub fn speed_at(&self, t: f64) -> f64 {
        self.amplitude * self.exponent * t.powf(self.exponent - 1.0)
    }
}

/// Least-squares fit of `ln(reach)` against `ln t` over the window.
pub fn fit_precursor(trace: &FrontTrace, window: Interval) -> Result<PrecursorFit> {
    let samples: Vec<(f64, f64)> = trace.samples_in(window).filter(|&(t, d)| t > 0.0 && d > 0.0).collect();
    if samples.len() < MIN_FIT_POINTS {
        return Err(insufficient(samples.len(), window));
    }
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(t, d)| (t.ln(), d.ln())).collect();
    let fit = least_squares(&logs);
    let amplitude = fit.intercept.exp();
    let exponent = fit.slope;
    Ok(PrecursorFit {
        amplitude,
        exponent,
        residual_rms: rms(samples.iter().map(|&(t, d)| d - amplitude * t.powf(exponent))),
        points: samples.len(),
    })
}

/// Linear light cone `reach = intercept + speed t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    /// Offset from the center, in units of length.
    pub intercept: f64,
    pub speed: f64,
    /// Standard error of `speed` from the regression.
    pub speed_stderr: f64,
    pub residual_rms: f64,
    pub points: usize,
}

/// Least-squares line through the reach over the window. The window must end
/// before the front first touches an end of the chain.
pub fn fit_linear(trace: &FrontTrace, window: Interval) -> Result<LinearFit> {
    if let Some(contact) = trace.first_end_contact() {
        if window.end >= contact {
            return Err(Error::EndContact { start: window.start, end: window.end, contact });
        }
    }
    let samples: Vec<(f64, f64)> = trace.samples_in(window).collect();
    if samples.len() < MIN_FIT_POINTS {
        return Err(insufficient(samples.len(), window));
    }
    let fit = least_squares(&samples);
    Ok(LinearFit {
        intercept: fit.intercept,
        speed: fit.slope,
        speed_stderr: fit.slope_stderr,
        residual_rms: rms(samples.iter().map(|&(t, d)| d - fit.intercept - fit.slope * t)),
        points: samples.len(),
    })
}

fn insufficient(found: usize, window: Interval) -> Error {
    Error::InsufficientData { needed: MIN_FIT_POINTS, found, start: window.start, end: window.end }
}

/// Intercept of the line tangent to `A t^(1/3)`: matching value and slope of
/// the two regimes gives `B = (2 / sqrt 27) A^(3/2) / sqrt(v_s)`.
pub fn predicted_b(amplitude: f64, speed: f64) -> f64 {
    if amplitude == 0.0 {
        return 0.0;
    }
    2.0 / 27f64.sqrt() * amplitude.powf(1.5) / speed.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterEntry {
    pub site: usize,
    pub distance: f64,
    /// Slope through the origin of `S_N` against `t` over the window.
    pub coefficient: f64,
}

/// Per-site early-time scale coefficients and their power law in distance.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterPlot {
    pub window: Interval,
    pub entries: Vec<MasterEntry>,
    /// Sites whose signal never left the noise floor inside the window.
    pub excluded: Vec<usize>,
    /// Log-log slope of coefficient against distance.
    pub distance_exponent: f64,
    pub prefactor: f64,
}

impl MasterPlot {
    /// Largest `|S_N / coefficient - t|` over the window: how far the rescaled
    /// curves are from collapsing onto `S = t`.
    pub fn collapse_deviation(&self, matrix: &ObservableMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for (ti, &t) in matrix.times.iter().enumerate() {
            if !self.window.contains(t) {
                continue;
            }
            for e in &self.entries {
                worst = worst.max((matrix.at(ti, e.site) / e.coefficient - t).abs());
            }
        }
        worst
    }
}

pub fn master_rescale(matrix: &ObservableMatrix, center: usize, window: Interval) -> Result<MasterPlot> {
    master_rescale_with_floor(matrix, center, window, DEFAULT_NOISE_FLOOR)
}

pub fn master_rescale_with_floor(
    matrix: &ObservableMatrix,
    center: usize,
    window: Interval,
    noise_floor: f64,
) -> Result<MasterPlot> {
    let rows: Vec<usize> = (0..matrix.n_times()).filter(|&i| window.contains(matrix.times[i])).collect();
    let tt: f64 = rows.iter().map(|&i| matrix.times[i].powi(2)).sum();
    if rows.len() < 2 || tt == 0.0 {
        return Err(insufficient(rows.len(), window));
    }
    let mut entries = Vec::new();
    let mut excluded = Vec::new();
    for site in (1..=matrix.n_sites()).filter(|&l| l != center) {
        let peak = rows.iter().map(|&i| matrix.at(i, site)).fold(0.0, f64::max);
        if peak < noise_floor {
            excluded.push(site);
            continue;
        }
        let ts: f64 = rows.iter().map(|&i| matrix.times[i] * matrix.at(i, site)).sum();
        entries.push(MasterEntry {
            site,
            distance: site.abs_diff(center) as f64 * matrix.spacing,
            coefficient: ts / tt,
        });
    }
    if entries.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, found: entries.len(), start: window.start, end: window.end });
    }
    let logs: Vec<(f64, f64)> = entries.iter().map(|e| (e.distance.ln(), e.coefficient.ln())).collect();
    let fit = least_squares(&logs);
    Ok(MasterPlot {
        window,
        entries,
        excluded,
        distance_exponent: fit.slope,
        prefactor: fit.intercept.exp(),
    })
}

/// Summary of the front analysis of one run. Missing fits carry a reason.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub observable: &'static str,
    pub contour_level: f64,
    pub early_window: Interval,
    pub linear_window: Interval,
    pub precursor: std::result::Result<PrecursorFit, String>,
    pub linear: std::result::Result<LinearFit, String>,
    pub end_contact: Option<f64>,
}

impl FitReport {
    pub fn from_trace(trace: &FrontTrace, observable: &'static str, early: Interval, linear: Interval) -> Self {
        let linear_window = trace.window_before_contact(linear);
        FitReport {
            observable,
            contour_level: trace.contour_level,
            early_window: early,
            linear_window,
            precursor: fit_precursor(trace, early).map_err(|e| e.to_string()),
            linear: fit_linear(trace, linear_window).map_err(|e| e.to_string()),
            end_contact: trace.first_end_contact(),
        }
    }

    pub fn b_predicted(&self) -> Option<f64> {
        match (&self.precursor, &self.linear) {
            (Ok(p), Ok(l)) if l.speed > 0.0 => Some(predicted_b(p.amplitude, l.speed)),
            _ => None,
        }
    }

    /// `|B - B_predicted| / B_predicted`.
    pub fn b_relation_error(&self) -> Option<f64> {
        let predicted = self.b_predicted()?;
        let fitted = self.linear.as_ref().ok()?.intercept;
        Some((fitted - predicted).abs() / predicted)
    }
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "observable        {}", self.observable)?;
        writeln!(f, "contour level     {:.7e}", self.contour_level)?;
        match &self.precursor {
            Ok(p) => writeln!(
                f,
                "precursor         reach = {:.7e} * t^{:.7e}  (rms {:.7e}, {} pts, t in [{}, {}])",
                p.amplitude, p.exponent, p.residual_rms, p.points, self.early_window.start, self.early_window.end
            )?,
            Err(why) => writeln!(f, "precursor         skipped: {why}")?,
        }
        match &self.linear {
            Ok(l) => writeln!(
                f,
                "linear            reach = {:.7e} + {:.7e} * t  (+/- {:.7e}, rms {:.7e}, {} pts, t in [{}, {}])",
                l.intercept, l.speed, l.speed_stderr, l.residual_rms, l.points, self.linear_window.start, self.linear_window.end
            )?,
            Err(why) => writeln!(f, "linear            skipped: {why}")?,
        }
        match self.b_predicted() {
            Some(b) => writeln!(f, "B predicted       {:.7e}", b)?,
            None => writeln!(f, "B predicted       n/a")?,
        }
        Ok(())
    }
}
