//! Propagation constant, phase mismatch and the sinc phase-matching function.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Taylor model of the propagation constant about `reference_omega`:
/// k(ω) = Σₙ βₙ (ω − ω₀)ⁿ / n!.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionModel {
    reference_omega: f64,
    betas: Vec<f64>,
}

impl DispersionModel {
    /// `betas[n]` is βₙ in units of sⁿ/m.
    pub fn new(reference_omega: f64, betas: Vec<f64>) -> Result<Self> {
        if !(reference_omega > 0.0 && reference_omega.is_finite()) {
            return Err(Error::invalid(format!(
                "dispersion reference frequency must be positive (got {reference_omega})"
            )));
        }
        if betas.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("dispersion coefficients must be finite"));
        }
        Ok(Self { reference_omega, betas })
    }

    pub fn from_betas(reference_omega: f64, beta0: f64, beta1: f64, beta2: f64, beta3: f64) -> Result<Self> {
        Self::new(reference_omega, vec![beta0, beta1, beta2, beta3])
    }

    /// Even-order model whose dispersion curve is phase- and group-velocity
    /// matched at the two pump detunings ±`pump_half_separation` from
    /// `reference_omega`:
    ///
    /// k(ω) − β₀ − β₁Ω = (β₂/2) Ω² (1 − Ω²/Δ²)², Ω = ω − ω₀, Δ = pump half-separation.
    ///
    /// With the pumps on the flat points of this curve their mutual walk-off
    /// vanishes and the JSA width along the signal-idler difference is set by
    /// `beta2` and the device length. β₀ and β₁ are zero; they cancel in Δk.
    pub fn pump_matched(reference_omega: f64, pump_half_separation: f64, beta2: f64) -> Result<Self> {
        if !(pump_half_separation > 0.0) {
            return Err(Error::invalid("pump half-separation must be positive"));
        }
        let p = pump_half_separation * pump_half_separation;
        Self::new(
            reference_omega,
            vec![0.0, 0.0, beta2, 0.0, -24.0 * beta2 / p, 0.0, 360.0 * beta2 / (p * p)],
        )
    }

    pub fn reference_omega(&self) -> f64 {
        self.reference_omega
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Propagation constant k(ω) in 1/m.
    pub fn k_of_omega(&self, omega: f64) -> f64 {
        taylor(&self.betas, omega - self.reference_omega, 0)
    }

    /// Phase mismatch k(ωs) + k(ωi) − k(ωp1) − k(ωs + ωi − ωp1) in 1/m.
    ///
    /// Orders 0 and 1 cancel identically under energy conservation and are
    /// skipped, which keeps the result free of cancellation against β₀.
    pub fn delta_k(&self, omega_s: f64, omega_i: f64, omega_p1: f64) -> f64 {
        let w0 = self.reference_omega;
        let ds = omega_s - w0;
        let di = omega_i - w0;
        let d1 = omega_p1 - w0;
        let d2 = ds + di - d1;
        taylor(&self.betas, ds, 2) + taylor(&self.betas, di, 2)
            - taylor(&self.betas, d1, 2)
            - taylor(&self.betas, d2, 2)
    }

    /// exp(iΔkL/2)·sinc(ΔkL/2) for a device of length `length` (m).
    pub fn phase_matching(&self, length: f64, omega_s: f64, omega_i: f64, omega_p1: f64) -> Complex64 {
        let x = 0.5 * self.delta_k(omega_s, omega_i, omega_p1) * length;
        Complex64::from_polar(sinc(x), x)
    }
}

/// Σ_{n ≥ from} βₙ dⁿ/n! by Horner's rule.
fn taylor(betas: &[f64], d: f64, from: usize) -> f64 {
    if betas.len() <= from {
        return 0.0;
    }
    let top = betas.len() - 1;
    let mut acc = 0.0;
    for n in (from..=top).rev() {
        acc = betas[n] + acc * d / (n + 1) as f64;
    }
    // acc = Σ βₙ d^(n−from) · from!/n!
    let mut scale = 1.0;
    for m in 1..=from {
        scale *= d / m as f64;
    }
    acc * scale
}

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Free-standing form of [`DispersionModel::k_of_omega`].
pub fn k_of_omega(model: &DispersionModel, omega: f64) -> f64 {
    model.k_of_omega(omega)
}

/// Free-standing form of [`DispersionModel::delta_k`].
pub fn delta_k(model: &DispersionModel, omega_s: f64, omega_i: f64, omega_p1: f64) -> f64 {
    model.delta_k(omega_s, omega_i, omega_p1)
}

/// Free-standing form of [`DispersionModel::phase_matching`].
pub fn phase_matching(model: &DispersionModel, length: f64, omega_s: f64, omega_i: f64, omega_p1: f64) -> Complex64 {
    model.phase_matching(length, omega_s, omega_i, omega_p1)
}
