//! Schmidt decomposition, purity and the overlap between two JSAs.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jsa::{apply_filter, JointSpectralAmplitude};
use crate::spectral::FilterSpec;

/// Coefficients below this fraction of the leading one are not reported.
pub const REPORT_CUTOFF: f64 = 1e-12;

/// Schmidt coefficients rλ (descending) and their mode functions.
///
/// Modes are unit-L2 as functions: Σ|u(ωk)|²dω = 1.
#[derive(Debug, Clone)]
pub struct SchmidtSpectrum {
    coefficients: Vec<f64>,
    total: f64,
    signal_modes: Vec<DVector<Complex64>>,
    idler_modes: Vec<DVector<Complex64>>,
}

impl SchmidtSpectrum {
    /// Reported coefficients, largest first.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Σ rλ over all coefficients, including those below the report cutoff.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn signal_modes(&self) -> &[DVector<Complex64>] {
        &self.signal_modes
    }

    pub fn idler_modes(&self) -> &[DVector<Complex64>] {
        &self.idler_modes
    }

    pub fn purity(&self) -> f64 {
        self.coefficients.iter().map(|r| r * r).sum()
    }

    /// Weight left outside the first `n` modes.
    pub fn tail(&self, n: usize) -> f64 {
        (self.total - self.coefficients.iter().take(n).sum::<f64>()).max(0.0)
    }

    /// Effective number of modes 1/P.
    pub fn effective_modes(&self) -> f64 {
        1.0 / self.purity()
    }
}

fn singular_values(jsa: &JointSpectralAmplitude) -> Result<Vec<f64>> {
    jsa.check_normalized()?;
    let m = jsa.weighted_matrix();
    let s = m.singular_values();
    Ok(s.iter().copied().collect())
}

/// Schmidt decomposition via the SVD of F·√(dωs dωi).
pub fn schmidt_decompose(jsa: &JointSpectralAmplitude) -> Result<SchmidtSpectrum> {
    jsa.check_normalized()?;
    let svd = jsa.weighted_matrix().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    let r: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    order.sort_by(|&a, &b| r[b].total_cmp(&r[a]).then(a.cmp(&b)));

    let total = r.iter().sum();
    let lead = order.first().map(|&i| r[i]).unwrap_or(0.0);
    let scale_s = Complex64::new(1.0 / jsa.grid_s().step().sqrt(), 0.0);
    let scale_i = Complex64::new(1.0 / jsa.grid_i().step().sqrt(), 0.0);

    let mut coefficients = Vec::new();
    let mut signal_modes = Vec::new();
    let mut idler_modes = Vec::new();
    for &idx in &order {
        if r[idx] < REPORT_CUTOFF * lead {
            break;
        }
        coefficients.push(r[idx]);
        signal_modes.push(u.column(idx).into_owned() * scale_s);
        // F = Σ s u v^T with v the rows of V^T.
        idler_modes.push(v_t.row(idx).transpose() * scale_i);
    }
    Ok(SchmidtSpectrum {
        coefficients,
        total,
        signal_modes,
        idler_modes,
    })
}

/// Σ rλ² from the singular values alone.
pub fn purity(jsa: &JointSpectralAmplitude) -> Result<f64> {
    Ok(singular_values(jsa)?.iter().map(|s| s.powi(4)).sum())
}

/// N e^{iδ} between two JSAs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapResult {
    pub magnitude: f64,
    /// In (−π, π].
    pub phase: f64,
}

/// Overlap Σ F₁ F̄₂ dω² after filtering and renormalizing both JSAs.
pub fn jsa_overlap(
    jsa1: &JointSpectralAmplitude,
    jsa2: &JointSpectralAmplitude,
    filter_s: &FilterSpec,
    filter_i: &FilterSpec,
) -> Result<OverlapResult> {
    if jsa1.grid_s() != jsa2.grid_s() || jsa1.grid_i() != jsa2.grid_i() {
        return Err(Error::GridMismatch);
    }
    let f1 = apply_filter(jsa1, filter_s, filter_i)?;
    let f2 = apply_filter(jsa2, filter_s, filter_i)?;
    Ok(overlap_of(f1.values(), f2.values(), f1.cell_area()))
}

fn overlap_of(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, area: f64) -> OverlapResult {
    let sum: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum::<Complex64>() * area;
    let mut phase = sum.arg();
    if phase <= -PI {
        phase += 2.0 * PI;
    }
    OverlapResult {
        magnitude: sum.norm().min(1.0),
        phase,
    }
}

/// V = 2N/(1+N).
pub fn visibility_from_overlap(n: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&n) {
        return Err(Error::invalid(format!("overlap must lie in [0, 1] (got {n})")));
    }
    Ok(2.0 * n / (1.0 + n))
}

/// N = V/(2−V).
pub fn overlap_from_visibility(v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(format!("visibility must lie in [0, 1] (got {v})")));
    }
    Ok(v / (2.0 - v))
}
