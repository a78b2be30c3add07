//! Photon statistics of multimode squeezed vacuum with per-mode loss.

use statrs::distribution::{Binomial, Discrete};

use crate::error::{Error, Result};
use crate::schmidt::SchmidtSpectrum;

/// Fock tail tolerated by [`lossy_density_diagonal`].
pub const TAIL_TOLERANCE: f64 = 1e-10;

pub const DEFAULT_MAX_N: usize = 20;

/// Global squeezing ξ split over Schmidt modes as ξλ = ξ√rλ, each mode with
/// amplitude transmission ηλ.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingSpec {
    xi: f64,
    coefficients: Vec<f64>,
    transmissions: Vec<f64>,
}

impl SqueezingSpec {
    pub fn new(xi: f64, coefficients: Vec<f64>, transmissions: Vec<f64>) -> Result<Self> {
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(Error::invalid(format!(
                "squeezing parameter must be non-negative (got {xi})"
            )));
        }
        if coefficients.len() != transmissions.len() {
            return Err(Error::invalid(format!(
                "{} Schmidt coefficients but {} transmissions",
                coefficients.len(),
                transmissions.len()
            )));
        }
        if coefficients.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return Err(Error::invalid("Schmidt coefficients must be non-negative"));
        }
        if transmissions.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::invalid("transmissions must lie in [0, 1]"));
        }
        Ok(Self {
            xi,
            coefficients,
            transmissions,
        })
    }

    /// Same transmission for every mode.
    pub fn uniform(xi: f64, coefficients: Vec<f64>, transmission: f64) -> Result<Self> {
        let n = coefficients.len();
        Self::new(xi, coefficients, vec![transmission; n])
    }

    pub fn from_spectrum(xi: f64, spectrum: &SchmidtSpectrum, transmission: f64) -> Result<Self> {
        Self::uniform(xi, spectrum.coefficients().to_vec(), transmission)
    }

    /// Single mode with ξλ = ξ.
    pub fn single_mode(xi: f64, transmission: f64) -> Result<Self> {
        Self::new(xi, vec![1.0], vec![transmission])
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn modes(&self) -> usize {
        self.coefficients.len()
    }

    pub fn mode_xi(&self, mode: usize) -> f64 {
        self.xi * self.coefficients[mode].sqrt()
    }

    pub fn transmission(&self, mode: usize) -> f64 {
        self.transmissions[mode]
    }
}

/// ⟨n⟩ = Σ ηλ² sinh²ξλ.
pub fn mean_photon_number(spec: &SqueezingSpec) -> f64 {
    (0..spec.modes())
        .map(|l| {
            let eta = spec.transmission(l);
            eta * eta * spec.mode_xi(l).sinh().powi(2)
        })
        .sum()
}

/// Probability that a threshold detector clicks:
/// 1 − Πλ sech ξλ / √(1 − (1 − ηλ²)² tanh²ξλ).
pub fn trigger_probability(spec: &SqueezingSpec) -> f64 {
    // Each vacuum factor equals (1 + η²(2 − η²) sinh²ξ)^(−1/2); summing logs keeps small ξ accurate.
    let log_no_click: f64 = (0..spec.modes())
        .map(|l| {
            let eta2 = spec.transmission(l).powi(2);
            -0.5 * (eta2 * (2.0 - eta2) * spec.mode_xi(l).sinh().powi(2)).ln_1p()
        })
        .sum();
    -log_no_click.exp_m1()
}

/// Photon-number probabilities P(0..=2·max_n) of one Schmidt mode after loss.
///
/// Each pair-number term of the squeezed vacuum, P(2n) = sech ξ (2n)!/(2ⁿn!)² tanh²ⁿξ,
/// is spread binomially with survival probability η². Fails if the Fock
/// weight beyond `max_n` pairs exceeds [`TAIL_TOLERANCE`].
pub fn lossy_density_diagonal(spec: &SqueezingSpec, mode: usize, max_n: usize) -> Result<Vec<f64>> {
    if mode >= spec.modes() {
        return Err(Error::invalid(format!(
            "mode {mode} out of range (spec has {} modes)",
            spec.modes()
        )));
    }
    let xi = spec.mode_xi(mode);
    let eta2 = spec.transmission(mode).powi(2);
    let pairs = pair_distribution(xi, max_n);
    let tail = 1.0 - pairs.iter().sum::<f64>();
    if tail > TAIL_TOLERANCE {
        return Err(Error::Truncation {
            max_n,
            tail,
            suggested: suggest_max_n(xi),
        });
    }
    let mut probs = vec![0.0; 2 * max_n + 1];
    for (n, &pn) in pairs.iter().enumerate() {
        if pn == 0.0 {
            continue;
        }
        let trials = 2 * n as u64;
        let dist = Binomial::new(eta2, trials).expect("η² lies in [0, 1]");
        for (m, p) in probs.iter_mut().enumerate().take(2 * n + 1) {
            *p += pn * dist.pmf(m as u64);
        }
    }
    Ok(probs)
}

/// [`lossy_density_diagonal`] starting at [`DEFAULT_MAX_N`] and extended until the tail is small enough.
pub fn lossy_density_diagonal_auto(spec: &SqueezingSpec, mode: usize) -> Result<Vec<f64>> {
    match lossy_density_diagonal(spec, mode, DEFAULT_MAX_N) {
        Err(Error::Truncation { suggested, .. }) => lossy_density_diagonal(spec, mode, suggested),
        other => other,
    }
}

fn pair_distribution(xi: f64, max_n: usize) -> Vec<f64> {
    let t2 = xi.tanh().powi(2);
    let mut out = Vec::with_capacity(max_n + 1);
    let mut p = 1.0 / xi.cosh();
    for n in 0..=max_n {
        out.push(p);
        p *= t2 * (2 * n + 1) as f64 / (2 * n + 2) as f64;
    }
    out
}

fn suggest_max_n(xi: f64) -> usize {
    let t2 = xi.tanh().powi(2);
    let mut p = 1.0 / xi.cosh();
    let mut acc = 0.0;
    for n in 0..10_000_000usize {
        acc += p;
        if 1.0 - acc <= TAIL_TOLERANCE * 0.5 {
            return n;
        }
        p *= t2 * (2 * n + 1) as f64 / (2 * n + 2) as f64;
    }
    10_000_000
}
