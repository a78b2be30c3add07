//! Joint spectral amplitudes of waveguide and microring sources.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::DispersionModel;
use crate::error::{Error, Result};
use crate::spectral::{
    omega_to_wavelength, sample_filter, wavelength_to_omega, FilterSpec, FrequencyGrid, LineShape, PumpLine,
    SPEED_OF_LIGHT,
};

const NORM_TOL: f64 = 1e-9;

/// Discretized JSA F(ωs, ωi); row index is the signal, column the idler.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectralAmplitude {
    grid_s: FrequencyGrid,
    grid_i: FrequencyGrid,
    values: DMatrix<Complex64>,
    norm_applied: bool,
    survival: f64,
}

impl JointSpectralAmplitude {
    /// Wraps raw values without normalizing them.
    pub fn from_values(grid_s: FrequencyGrid, grid_i: FrequencyGrid, values: DMatrix<Complex64>) -> Result<Self> {
        if values.nrows() != grid_s.len() || values.ncols() != grid_i.len() {
            return Err(Error::invalid(format!(
                "JSA values are {}x{} but the grids have {}x{} points",
                values.nrows(),
                values.ncols(),
                grid_s.len(),
                grid_i.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::DegenerateInput("JSA contains non-finite values".into()));
        }
        Ok(Self {
            grid_s,
            grid_i,
            values,
            norm_applied: false,
            survival: 1.0,
        })
    }

    /// Samples `f(ωs, ωi)` on the grids without normalizing.
    pub fn from_fn(grid_s: FrequencyGrid, grid_i: FrequencyGrid, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let values = DMatrix::from_fn(grid_s.len(), grid_i.len(), |j, k| f(grid_s.point(j), grid_i.point(k)));
        Self::from_values(grid_s, grid_i, values)
    }

    /// Scales to Σ|F|²dωs dωi = 1.
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sqr();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "JSA has norm {norm}; pumps may lie outside the grid"
            )));
        }
        let scale = 1.0 / norm.sqrt();
        self.values *= Complex64::new(scale, 0.0);
        self.norm_applied = true;
        Ok(self)
    }

    pub fn grid_s(&self) -> &FrequencyGrid {
        &self.grid_s
    }

    pub fn grid_i(&self) -> &FrequencyGrid {
        &self.grid_i
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.norm_applied
    }

    /// Fraction of the pair norm that survived all filters applied so far.
    pub fn survival(&self) -> f64 {
        self.survival
    }

    /// Σ|F|² dωs dωi.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_area()
    }

    pub fn cell_area(&self) -> f64 {
        self.grid_s.step() * self.grid_i.step()
    }

    /// F·√(dωs dωi): the matrix whose Frobenius norm is the state norm.
    pub fn weighted_matrix(&self) -> DMatrix<Complex64> {
        &self.values * Complex64::new(self.cell_area().sqrt(), 0.0)
    }

    /// Errors unless the JSA is normalized within 1e-9.
    pub fn check_normalized(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    /// Signal marginal Σₖ |F_jk|² dωi.
    pub fn signal_marginal(&self) -> Vec<f64> {
        let di = self.grid_i.step();
        (0..self.values.nrows())
            .map(|j| self.values.row(j).iter().map(|v| v.norm_sqr()).sum::<f64>() * di)
            .collect()
    }

    /// Idler marginal Σⱼ |F_jk|² dωs.
    pub fn idler_marginal(&self) -> Vec<f64> {
        let ds = self.grid_s.step();
        (0..self.values.ncols())
            .map(|k| self.values.column(k).iter().map(|v| v.norm_sqr()).sum::<f64>() * ds)
            .collect()
    }

    /// Largest |F_jk − F_kj|·√(dωs dωi), or `None` if the grids differ.
    pub fn max_exchange_asymmetry(&self) -> Option<f64> {
        if self.grid_s != self.grid_i {
            return None;
        }
        let w = self.cell_area().sqrt();
        let n = self.values.nrows();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in j + 1..n {
                worst = worst.max((self.values[(j, k)] - self.values[(k, j)]).norm() * w);
            }
        }
        Some(worst)
    }
}

/// Elementwise |F|².
pub fn jsi(jsa: &JointSpectralAmplitude) -> DMatrix<f64> {
    jsa.values.map(|v| v.norm_sqr())
}

/// Trapezoid rule over a pump line, used for the convolution integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpQuadrature {
    /// Nodes per resolution width; at least 8.
    pub points_per_fwhm: f64,
    /// Half-width of the integration window in units of the pump FWHM.
    /// `None` picks 3 for Gaussian and 60 for Lorentzian lines.
    pub half_span_fwhm: Option<f64>,
}

impl Default for PumpQuadrature {
    fn default() -> Self {
        Self {
            points_per_fwhm: 16.0,
            half_span_fwhm: None,
        }
    }
}

impl PumpQuadrature {
    /// Nodes and trapezoid weights around `line`, with step at most `resolution / points_per_fwhm`.
    pub fn nodes(&self, line: &PumpLine, resolution: f64) -> Result<Vec<(f64, f64)>> {
        if !(self.points_per_fwhm >= 8.0) {
            return Err(Error::UnderResolved(format!(
                "pump quadrature needs at least 8 points per linewidth (got {})",
                self.points_per_fwhm
            )));
        }
        let half_span = self.half_span_fwhm.unwrap_or(match line.shape() {
            LineShape::Gaussian => 3.0,
            LineShape::Lorentzian => 60.0,
        });
        if !(half_span > 0.0) {
            return Err(Error::invalid("pump quadrature half-span must be positive"));
        }
        let h = half_span * line.linewidth_fwhm();
        let target = resolution.min(line.linewidth_fwhm()) / self.points_per_fwhm;
        let intervals = ((2.0 * h / target) - 1e-9).ceil().max(1.0) as usize;
        if intervals > 2_000_000 {
            return Err(Error::invalid("pump quadrature would need more than 2e6 nodes"));
        }
        let step = 2.0 * h / intervals as f64;
        let start = line.center_omega() - h;
        Ok((0..=intervals)
            .map(|m| {
                let w = if m == 0 || m == intervals { 0.5 * step } else { step };
                (start + m as f64 * step, w)
            })
            .collect())
    }
}

/// Waveguide JSA F(ωs, ωi) = ∫dω α(ω) β(ωs+ωi−ω) φ(ωs, ωi, ω), normalized.
///
/// The integral runs over a trapezoid grid around `pump1`.
pub fn build_waveguide_jsa(
    pump1: &PumpLine,
    pump2: &PumpLine,
    model: &DispersionModel,
    length: f64,
    grid: &FrequencyGrid,
    quadrature: &PumpQuadrature,
) -> Result<JointSpectralAmplitude> {
    if !(length >= 0.0 && length.is_finite()) {
        return Err(Error::invalid(format!(
            "waveguide length must be non-negative (got {length})"
        )));
    }
    let nodes: Vec<(f64, Complex64)> = quadrature
        .nodes(pump1, pump1.linewidth_fwhm().min(pump2.linewidth_fwhm()))?
        .into_iter()
        .map(|(w, weight)| (w, pump1.amplitude(w) * weight))
        .collect();

    let n = grid.len();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let ws = grid.point(j);
            (0..n)
                .map(|k| {
                    let wi = grid.point(k);
                    let sum = ws + wi;
                    nodes
                        .iter()
                        .map(|&(w, a)| a * pump2.amplitude(sum - w) * model.phase_matching(length, ws, wi, w))
                        .sum()
                })
                .collect()
        })
        .collect();
    let values = DMatrix::from_fn(n, n, |j, k| rows[j][k]);
    JointSpectralAmplitude::from_values(*grid, *grid, values)?.normalized()
}

/// A single cavity resonance with a peak-normalized complex Lorentzian amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingResonance {
    center_omega: f64,
    q: f64,
}

impl RingResonance {
    pub fn new(center_wavelength: f64, q: f64) -> Result<Self> {
        if !(center_wavelength > 0.0) || !(q > 0.0 && q.is_finite()) {
            return Err(Error::invalid(format!(
                "invalid resonance (λ = {center_wavelength}, Q = {q})"
            )));
        }
        Ok(Self {
            center_omega: wavelength_to_omega(center_wavelength),
            q,
        })
    }

    fn at_omega(center_omega: f64, q: f64) -> Self {
        Self { center_omega, q }
    }

    pub fn center_omega(&self) -> f64 {
        self.center_omega
    }

    pub fn center_wavelength(&self) -> f64 {
        omega_to_wavelength(self.center_omega)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Wavelength FWHM λ/Q.
    pub fn fwhm(&self) -> f64 {
        self.center_wavelength() / self.q
    }

    /// Angular-frequency FWHM ω/Q.
    pub fn linewidth_omega(&self) -> f64 {
        self.center_omega / self.q
    }

    /// (Γ/2) / (Γ/2 − i(ω − ωr)); equals 1 on resonance.
    pub fn amplitude(&self, omega: f64) -> Complex64 {
        let half = 0.5 * self.linewidth_omega();
        half / Complex64::new(half, -(omega - self.center_omega))
    }
}

/// Microring described by its loaded Q and a frequency-uniform resonance comb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSource {
    q: f64,
    fsr: f64,
    anchor_wavelength: Option<f64>,
}

/// Resonances addressed by the two pumps and the degenerate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingResonances {
    pub pair: RingResonance,
    pub pump1: RingResonance,
    pub pump2: RingResonance,
    /// |pump centre − resonance| in units of the resonance linewidth.
    pub pump_detuning: [f64; 2],
}

impl RingResonances {
    /// True when a pump sits more than 10 linewidths from its resonance.
    pub fn is_off_resonance(&self) -> bool {
        self.pump_detuning.iter().any(|&d| d > 10.0)
    }
}

impl RingSource {
    /// `fsr` is the free spectral range in wavelength (m), converted to
    /// frequency at the anchor. Without an anchor the degenerate resonance
    /// sits at the mean pump frequency.
    pub fn new(q: f64, fsr: f64, anchor_wavelength: Option<f64>) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::invalid(format!("ring Q must be positive (got {q})")));
        }
        if !(fsr > 0.0 && fsr.is_finite()) {
            return Err(Error::invalid(format!("ring FSR must be positive (got {fsr})")));
        }
        if let Some(a) = anchor_wavelength {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::invalid(format!(
                    "ring anchor wavelength must be positive (got {a})"
                )));
            }
        }
        Ok(Self {
            q,
            fsr,
            anchor_wavelength,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn fsr(&self) -> f64 {
        self.fsr
    }

    pub fn anchor_wavelength(&self) -> Option<f64> {
        self.anchor_wavelength
    }

    pub fn with_q(self, q: f64) -> Result<Self> {
        Self::new(q, self.fsr, self.anchor_wavelength)
    }

    pub fn resonances(&self, pump1: &PumpLine, pump2: &PumpLine) -> RingResonances {
        let anchor = match self.anchor_wavelength {
            Some(l) => wavelength_to_omega(l),
            None => 0.5 * (pump1.center_omega() + pump2.center_omega()),
        };
        let lambda = omega_to_wavelength(anchor);
        let fsr_omega = std::f64::consts::TAU * SPEED_OF_LIGHT * self.fsr / (lambda * lambda);
        let nearest = |line: &PumpLine| {
            let m = ((line.center_omega() - anchor) / fsr_omega).round();
            let r = RingResonance::at_omega(anchor + m * fsr_omega, self.q);
            (r, (line.center_omega() - r.center_omega).abs() / r.linewidth_omega())
        };
        let (r1, d1) = nearest(pump1);
        let (r2, d2) = nearest(pump2);
        RingResonances {
            pair: RingResonance::at_omega(anchor, self.q),
            pump1: r1,
            pump2: r2,
            pump_detuning: [d1, d2],
        }
    }
}

/// Ring JSA l(ωs) l(ωi) ∫dω α(ω) l₁(ω) β(ωs+ωi−ω) l₂(ωs+ωi−ω), normalized.
///
/// The integral depends only on ωs+ωi and is evaluated once per grid sum.
pub fn build_ring_jsa(
    pump1: &PumpLine,
    pump2: &PumpLine,
    ring: &RingSource,
    grid: &FrequencyGrid,
    quadrature: &PumpQuadrature,
) -> Result<JointSpectralAmplitude> {
    let res = ring.resonances(pump1, pump2);
    let resolution = pump1
        .linewidth_fwhm()
        .min(pump2.linewidth_fwhm())
        .min(res.pump1.linewidth_omega())
        .min(res.pump2.linewidth_omega());
    let nodes: Vec<(f64, Complex64)> = quadrature
        .nodes(pump1, resolution)?
        .into_iter()
        .map(|(w, weight)| (w, pump1.amplitude(w) * res.pump1.amplitude(w) * weight))
        .collect();

    let n = grid.len();
    let base = 2.0 * grid.omega_min();
    let conv: Vec<Complex64> = (0..2 * n - 1)
        .into_par_iter()
        .map(|idx| {
            let sum = base + idx as f64 * grid.step();
            nodes
                .iter()
                .map(|&(w, a)| a * pump2.amplitude(sum - w) * res.pump2.amplitude(sum - w))
                .sum()
        })
        .collect();
    let lorentz: Vec<Complex64> = (0..n).map(|k| res.pair.amplitude(grid.point(k))).collect();
    let values = DMatrix::from_fn(n, n, |j, k| lorentz[j] * lorentz[k] * conv[j + k]);
    JointSpectralAmplitude::from_values(*grid, *grid, values)?.normalized()
}

/// Multiplies by f(ωs) f(ωi), records the surviving fraction and renormalizes.
pub fn apply_filter(
    jsa: &JointSpectralAmplitude,
    filter_s: &FilterSpec,
    filter_i: &FilterSpec,
) -> Result<JointSpectralAmplitude> {
    jsa.check_normalized()?;
    let fs = sample_filter(filter_s, &jsa.grid_s);
    let fi = sample_filter(filter_i, &jsa.grid_i);
    let values = DMatrix::from_fn(fs.len(), fi.len(), |j, k| jsa.values[(j, k)] * (fs[j] * fi[k]));
    let mut out = JointSpectralAmplitude::from_values(jsa.grid_s, jsa.grid_i, values)?;
    let survival = out.norm_sqr() / jsa.norm_sqr();
    if !(survival >= 1e-12) {
        return Err(Error::DegenerateFilter { survival });
    }
    out = out.normalized()?;
    out.survival = jsa.survival * survival;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{hz_to_omega, make_grid};

    const NM: f64 = 1e-9;

    fn pumps(fwhm_ghz: f64) -> (PumpLine, PumpLine) {
        let w = hz_to_omega(fwhm_ghz * 1e9);
        (
            PumpLine::gaussian(1544.08 * NM, w).unwrap(),
            PumpLine::gaussian(1556.18 * NM, w).unwrap(),
        )
    }

    fn degenerate_omega(p1: &PumpLine, p2: &PumpLine) -> f64 {
        0.5 * (p1.center_omega() + p2.center_omega())
    }

    #[test]
    fn quadrature_node_count_and_weights() {
        let (p1, _) = pumps(50.0);
        let q = PumpQuadrature {
            points_per_fwhm: 8.0,
            half_span_fwhm: Some(1.25),
        };
        let nodes = q.nodes(&p1, p1.linewidth_fwhm()).unwrap();
        assert_eq!(nodes.len(), 21);
        let total: f64 = nodes.iter().map(|n| n.1).sum();
        assert!((total - 2.5 * p1.linewidth_fwhm()).abs() < 1e-6 * total);
        let low = PumpQuadrature {
            points_per_fwhm: 7.9,
            half_span_fwhm: None,
        };
        assert!(matches!(
            low.nodes(&p1, p1.linewidth_fwhm()),
            Err(Error::UnderResolved(_))
        ));
    }

    #[test]
    fn zero_length_dispersionless_is_antidiagonal() {
        let (p1, p2) = pumps(50.0);
        let w0 = degenerate_omega(&p1, &p2);
        let model = DispersionModel::from_betas(w0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let grid = make_grid(1550.12 * NM, 2.0 * NM, 41).unwrap();
        let jsa = build_waveguide_jsa(&p1, &p2, &model, 0.0, &grid, &PumpQuadrature::default()).unwrap();
        let f = jsa.values();
        let scale = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for j in 1..41 {
            for k in 0..40 {
                // (j, k) and (j−1, k+1) share the same sum frequency
                assert!((f[(j, k)] - f[(j - 1, k + 1)]).norm() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn waveguide_ridge_centred_at_degeneracy() {
        let (p1, p2) = pumps(50.0);
        let w0 = degenerate_omega(&p1, &p2);
        let model = DispersionModel::pump_matched(w0, 0.5 * (p1.center_omega() - p2.center_omega()), -2e-22).unwrap();
        let grid = make_grid(1550.12 * NM, 2.0 * NM, 81).unwrap();
        let jsa = build_waveguide_jsa(&p1, &p2, &model, 0.015, &grid, &PumpQuadrature::default()).unwrap();
        jsa.check_normalized().unwrap();
        assert!(jsa.max_exchange_asymmetry().unwrap() < 1e-9);
        let i = jsi(&jsa);
        let (mut best, mut arg) = (0.0, (0, 0));
        for j in 0..81 {
            for k in 0..81 {
                if i[(j, k)] > best {
                    best = i[(j, k)];
                    arg = (j, k);
                }
            }
        }
        let centre = grid.nearest_index(wavelength_to_omega(1550.12 * NM));
        assert!(
            arg.0 + arg.1 >= 2 * centre - 2 && arg.0 + arg.1 <= 2 * centre + 2,
            "{arg:?}"
        );
    }

    #[test]
    fn out_of_band_pumps_give_degenerate_input() {
        let w = hz_to_omega(5e9);
        let p1 = PumpLine::gaussian(1500.0 * NM, w).unwrap();
        let p2 = PumpLine::gaussian(1510.0 * NM, w).unwrap();
        let model = DispersionModel::from_betas(p1.center_omega(), 0.0, 0.0, 0.0, 0.0).unwrap();
        let grid = make_grid(1550.12 * NM, 1.0 * NM, 21).unwrap();
        let err = build_waveguide_jsa(&p1, &p2, &model, 0.0, &grid, &PumpQuadrature::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateInput(_)));
    }

    #[test]
    fn resonance_shape() {
        let r = RingResonance::new(1550.12 * NM, 1.5e4).unwrap();
        assert_eq!(r.amplitude(r.center_omega()), Complex64::new(1.0, 0.0));
        assert!((r.fwhm() - 1550.12 * NM / 1.5e4).abs() < 1e-9 * r.fwhm());
        let half = r.amplitude(r.center_omega() + 0.5 * r.linewidth_omega()).norm_sqr();
        assert!((half - 0.5).abs() < 1e-12);
        let r2 = RingResonance::new(1550.12 * NM, 3e4).unwrap();
        assert!((r2.fwhm() * 2.0 - r.fwhm()).abs() < 1e-15 * r.fwhm());
    }

    #[test]
    fn comb_places_pumps_two_fsr_away() {
        let (p1, p2) = pumps(50.0);
        let ring = RingSource::new(3e4, 3.2 * NM, None).unwrap();
        let res = ring.resonances(&p1, &p2);
        assert!(!res.is_off_resonance());
        let d1 = res.pump1.center_omega() - res.pair.center_omega();
        let d2 = res.pump2.center_omega() - res.pair.center_omega();
        assert!((d1 + d2).abs() < 1e-3 * d1.abs());
        let anchored = RingSource::new(3e4, 3.2 * NM, Some(1551.0 * NM)).unwrap();
        assert!(anchored.resonances(&p1, &p2).is_off_resonance());
    }

    #[test]
    fn ring_marginal_width_tracks_q() {
        let (p1, p2) = pumps(50.0);
        let grid = make_grid(1550.12 * NM, 1.2 * NM, 201).unwrap();
        let wl = grid.wavelengths();
        let mut widths = Vec::new();
        for q in [1.5e4, 3e4] {
            let ring = RingSource::new(q, 3.025 * NM, None).unwrap();
            let jsa = build_ring_jsa(&p1, &p2, &ring, &grid, &PumpQuadrature::default()).unwrap();
            widths.push(crate::spectral::fwhm(&wl, &jsa.signal_marginal()).unwrap());
        }
        assert!((widths[0] / NM - 0.1).abs() < 0.015, "{widths:?}");
        assert!((widths[1] / NM - 0.05).abs() < 0.0075, "{widths:?}");
    }

    #[test]
    fn all_pass_filter_is_identity() {
        let grid = make_grid(1550.12 * NM, 2.0 * NM, 31).unwrap();
        let jsa = JointSpectralAmplitude::from_fn(grid, grid, |a, b| {
            let x = (a - grid.point(15)) / grid.step();
            let y = (b - grid.point(15)) / grid.step();
            Complex64::new((-(x * x + y * y) / 30.0).exp(), 0.1 * x)
        })
        .unwrap()
        .normalized()
        .unwrap();
        let out = apply_filter(&jsa, &FilterSpec::all_pass(), &FilterSpec::all_pass()).unwrap();
        assert_eq!(out.survival(), 1.0);
        for (a, b) in out.values().iter().zip(jsa.values().iter()) {
            assert!((a - b).norm() <= 1e-15 * b.norm().max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn filter_that_blocks_everything_errors() {
        let grid = make_grid(1550.12 * NM, 2.0 * NM, 31).unwrap();
        let jsa = JointSpectralAmplitude::from_fn(grid, grid, |_, _| Complex64::new(1.0, 0.0))
            .unwrap()
            .normalized()
            .unwrap();
        let far = FilterSpec::rectangle(1600.0 * NM, 0.8 * NM).unwrap();
        assert!(matches!(
            apply_filter(&jsa, &far, &far),
            Err(Error::DegenerateFilter { .. })
        ));
        let raw = JointSpectralAmplitude::from_fn(grid, grid, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            apply_filter(&raw, &FilterSpec::all_pass(), &FilterSpec::all_pass()),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn jsi_of_zero_is_zero() {
        let grid = make_grid(1550.12 * NM, 2.0 * NM, 5).unwrap();
        let z = JointSpectralAmplitude::from_fn(grid, grid, |_, _| Complex64::new(0.0, 0.0)).unwrap();
        assert!(jsi(&z).iter().all(|&v| v == 0.0));
        assert!(z.normalized().is_err());
    }
}
