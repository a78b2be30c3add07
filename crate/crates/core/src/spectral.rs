//! Frequency grids, pump line spectra and band-pass filters.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Vacuum wavelength (m) to angular frequency (rad/s).
pub fn wavelength_to_omega(wavelength: f64) -> f64 {
    TAU * SPEED_OF_LIGHT / wavelength
}

/// Angular frequency (rad/s) to vacuum wavelength (m).
pub fn omega_to_wavelength(omega: f64) -> f64 {
    TAU * SPEED_OF_LIGHT / omega
}

/// Full width in angular frequency of a line of width `width` (m) centred at `center` (m).
pub fn wavelength_width_to_omega(center: f64, width: f64) -> f64 {
    wavelength_to_omega(center - width / 2.0) - wavelength_to_omega(center + width / 2.0)
}

/// Converts a linewidth in Hz to angular frequency.
pub fn hz_to_omega(hz: f64) -> f64 {
    TAU * hz
}

/// Uniform angular-frequency axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    omega_min: f64,
    omega_max: f64,
    n_points: usize,
    step: f64,
}

impl FrequencyGrid {
    pub fn new(omega_min: f64, omega_max: f64, n_points: usize) -> Result<Self> {
        if !(omega_min.is_finite() && omega_max.is_finite()) || omega_max <= omega_min {
            return Err(Error::invalid(format!(
                "grid bounds must satisfy omega_min < omega_max (got {omega_min}, {omega_max})"
            )));
        }
        if n_points < 2 {
            return Err(Error::invalid(format!("grid needs at least 2 points (got {n_points})")));
        }
        let step = (omega_max - omega_min) / (n_points - 1) as f64;
        Ok(Self {
            omega_min,
            omega_max,
            n_points,
            step,
        })
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// The k-th grid point, computed by index multiplication.
    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.omega_min + k as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.point(k)).collect()
    }

    pub fn wavelengths(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| omega_to_wavelength(self.point(k))).collect()
    }

    /// True when `omega` lies within the closed grid range.
    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.omega_min && omega <= self.omega_max
    }

    /// Index of the grid point closest to `omega`, clamped to the grid.
    pub fn nearest_index(&self, omega: f64) -> usize {
        let x = ((omega - self.omega_min) / self.step).round();
        x.clamp(0.0, (self.n_points - 1) as f64) as usize
    }
}

/// Grid spanning `center_wavelength ± span/2`, uniform in angular frequency.
pub fn make_grid(center_wavelength: f64, span: f64, n_points: usize) -> Result<FrequencyGrid> {
    if !(span > 0.0) {
        return Err(Error::invalid(format!("grid span must be positive (got {span})")));
    }
    if !(center_wavelength > span / 2.0) {
        return Err(Error::invalid(format!(
            "grid centre {center_wavelength} m must exceed half the span"
        )));
    }
    let omega_min = wavelength_to_omega(center_wavelength + span / 2.0);
    let omega_max = wavelength_to_omega(center_wavelength - span / 2.0);
    FrequencyGrid::new(omega_min, omega_max, n_points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineShape {
    Gaussian,
    Lorentzian,
}

/// A CW pump laser with a finite effective linewidth.
///
/// `linewidth_fwhm` is the full width at half maximum of the power spectrum
/// `|α(ω)|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpLine {
    center_wavelength: f64,
    linewidth_fwhm: f64,
    shape: LineShape,
    relative_amplitude: Complex64,
}

impl PumpLine {
    pub fn new(
        center_wavelength: f64,
        linewidth_fwhm: f64,
        shape: LineShape,
        relative_amplitude: Complex64,
    ) -> Result<Self> {
        if !(center_wavelength > 0.0 && center_wavelength.is_finite()) {
            return Err(Error::invalid(format!(
                "pump wavelength must be positive (got {center_wavelength})"
            )));
        }
        if !(linewidth_fwhm > 0.0 && linewidth_fwhm.is_finite()) {
            return Err(Error::invalid(format!(
                "pump linewidth must be positive (got {linewidth_fwhm})"
            )));
        }
        if !(relative_amplitude.norm() > 0.0 && relative_amplitude.norm().is_finite()) {
            return Err(Error::invalid("pump relative amplitude must be finite and non-zero"));
        }
        Ok(Self {
            center_wavelength,
            linewidth_fwhm,
            shape,
            relative_amplitude,
        })
    }

    pub fn gaussian(center_wavelength: f64, linewidth_fwhm: f64) -> Result<Self> {
        Self::new(
            center_wavelength,
            linewidth_fwhm,
            LineShape::Gaussian,
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn lorentzian(center_wavelength: f64, linewidth_fwhm: f64) -> Result<Self> {
        Self::new(
            center_wavelength,
            linewidth_fwhm,
            LineShape::Lorentzian,
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn with_relative_amplitude(mut self, amplitude: Complex64) -> Result<Self> {
        if !(amplitude.norm() > 0.0 && amplitude.norm().is_finite()) {
            return Err(Error::invalid("pump relative amplitude must be finite and non-zero"));
        }
        self.relative_amplitude = amplitude;
        Ok(self)
    }

    pub fn center_wavelength(&self) -> f64 {
        self.center_wavelength
    }

    pub fn center_omega(&self) -> f64 {
        wavelength_to_omega(self.center_wavelength)
    }

    pub fn linewidth_fwhm(&self) -> f64 {
        self.linewidth_fwhm
    }

    pub fn shape(&self) -> LineShape {
        self.shape
    }

    pub fn relative_amplitude(&self) -> Complex64 {
        self.relative_amplitude
    }

    /// Continuous amplitude spectrum, normalized so that ∫|α|²dω = |relative_amplitude|².
    pub fn amplitude(&self, omega: f64) -> Complex64 {
        self.relative_amplitude * self.profile(omega - self.center_omega())
    }

    fn profile(&self, detuning: f64) -> Complex64 {
        match self.shape {
            LineShape::Gaussian => {
                let sigma = self.linewidth_fwhm / (2.0 * (2.0 * 2f64.ln()).sqrt());
                let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
                Complex64::new(norm * (-detuning * detuning / (4.0 * sigma * sigma)).exp(), 0.0)
            }
            LineShape::Lorentzian => {
                let gamma = self.linewidth_fwhm / 2.0;
                let norm = 1.0 / (PI * gamma).sqrt();
                norm * gamma / Complex64::new(gamma, -detuning)
            }
        }
    }
}

/// Samples `line` on `grid`, normalized to Σ|α|²dω = 1.
///
/// The modulus of the relative amplitude is normalized away; its phase is kept.
pub fn sample_pump(line: &PumpLine, grid: &FrequencyGrid) -> Result<Vec<Complex64>> {
    if !grid.contains(line.center_omega()) {
        return Err(Error::OutOfBand {
            wavelength_nm: line.center_wavelength * 1e9,
        });
    }
    if line.linewidth_fwhm < 2.0 * grid.step() {
        return Err(Error::UnderResolved(format!(
            "pump linewidth {:.4e} rad/s is below two grid steps ({:.4e} rad/s)",
            line.linewidth_fwhm,
            grid.step()
        )));
    }
    let mut values: Vec<Complex64> = (0..grid.len()).map(|k| line.amplitude(grid.point(k))).collect();
    let norm = (values.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.step()).sqrt();
    for v in &mut values {
        *v /= norm;
    }
    Ok(values)
}

/// Discrete overlap Σ a b̄ dω of two spectra sampled on the same grid.
pub fn spectral_overlap(a: &[Complex64], b: &[Complex64], grid: &FrequencyGrid) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() * grid.step()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterProfile {
    AllPass,
    IdealRectangle,
    /// Raised-cosine edges; `rolloff` in [0, 1] is the fraction of the band spent in the edges.
    RaisedCosine {
        rolloff: f64,
    },
}

/// Band-pass amplitude filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    center_wavelength: f64,
    bandwidth: f64,
    profile: FilterProfile,
}

impl FilterSpec {
    pub fn new(center_wavelength: f64, bandwidth: f64, profile: FilterProfile) -> Result<Self> {
        if let FilterProfile::AllPass = profile {
            return Ok(Self::all_pass());
        }
        if !(center_wavelength > 0.0 && center_wavelength.is_finite()) {
            return Err(Error::invalid(format!(
                "filter centre must be positive (got {center_wavelength})"
            )));
        }
        if !(bandwidth > 0.0 && bandwidth < 2.0 * center_wavelength) {
            return Err(Error::invalid(format!(
                "filter bandwidth out of range (got {bandwidth})"
            )));
        }
        if let FilterProfile::RaisedCosine { rolloff } = profile {
            if !(0.0..=1.0).contains(&rolloff) {
                return Err(Error::invalid(format!("rolloff must lie in [0, 1] (got {rolloff})")));
            }
        }
        Ok(Self {
            center_wavelength,
            bandwidth,
            profile,
        })
    }

    pub fn rectangle(center_wavelength: f64, bandwidth: f64) -> Result<Self> {
        Self::new(center_wavelength, bandwidth, FilterProfile::IdealRectangle)
    }

    pub fn all_pass() -> Self {
        Self {
            center_wavelength: 0.0,
            bandwidth: 0.0,
            profile: FilterProfile::AllPass,
        }
    }

    pub fn center_wavelength(&self) -> f64 {
        self.center_wavelength
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn profile(&self) -> FilterProfile {
        self.profile
    }

    /// Band edges in angular frequency, low then high.
    pub fn band_edges(&self) -> (f64, f64) {
        (
            wavelength_to_omega(self.center_wavelength + self.bandwidth / 2.0),
            wavelength_to_omega(self.center_wavelength - self.bandwidth / 2.0),
        )
    }
}

/// Amplitude transmission of `filter` on every grid point.
///
/// Rectangle edges snap to the nearest grid points; the low-frequency edge
/// point is inside the band and the high-frequency edge point is outside.
pub fn sample_filter(filter: &FilterSpec, grid: &FrequencyGrid) -> Vec<f64> {
    let n = grid.len();
    match filter.profile {
        FilterProfile::AllPass => vec![1.0; n],
        FilterProfile::IdealRectangle | FilterProfile::RaisedCosine { rolloff: 0.0 } => {
            let (lo, hi) = filter.band_edges();
            rectangle_mask(grid, lo, hi)
        }
        FilterProfile::RaisedCosine { rolloff } => {
            let (lo, hi) = filter.band_edges();
            let width = hi - lo;
            let mid = 0.5 * (lo + hi);
            let flat = 0.5 * (1.0 - rolloff) * width;
            let outer = 0.5 * (1.0 + rolloff) * width;
            (0..n)
                .map(|k| {
                    let d = (grid.point(k) - mid).abs();
                    if d <= flat {
                        1.0
                    } else if d < outer {
                        0.5 * (1.0 + (PI * (d - flat) / (rolloff * width)).cos())
                    } else {
                        0.0
                    }
                })
                .collect()
        }
    }
}

fn rectangle_mask(grid: &FrequencyGrid, lo: f64, hi: f64) -> Vec<f64> {
    let snap = |omega: f64| ((omega - grid.omega_min()) / grid.step()).round();
    let (k_lo, k_hi) = (snap(lo), snap(hi));
    (0..grid.len())
        .map(|k| {
            let k = k as f64;
            if k >= k_lo && k < k_hi {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Full width at half maximum of a sampled non-negative curve.
///
/// Crossings are located by linear interpolation on each side of the
/// maximum. Returns `None` if the curve does not fall below half maximum on
/// both sides.
pub fn fwhm(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (peak, &max) = ys.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if !(max > 0.0) {
        return None;
    }
    let half = 0.5 * max;
    let crossing = |a: usize, b: usize| xs[a] + (half - ys[a]) * (xs[b] - xs[a]) / (ys[b] - ys[a]);
    let left = (0..peak).rev().find(|&k| ys[k] < half).map(|k| crossing(k, k + 1))?;
    let right = (peak + 1..ys.len())
        .find(|&k| ys[k] < half)
        .map(|k| crossing(k - 1, k))?;
    Some((right - left).abs())
}
