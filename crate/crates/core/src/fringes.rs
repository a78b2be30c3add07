//! Coincidence fringes of the reverse-HOM and two-MZI circuits, classical
//! transmissions, visibility extraction and accidental-count correction.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

fn check_overlap(n: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&n) {
        return Err(Error::invalid(format!("overlap must lie in [0, 1] (got {n})")));
    }
    Ok(())
}

/// Raw reverse-HOM coincidence probability ½(1 + N cos(2φ + δ)).
pub fn reverse_hom_coincidence(n: f64, delta: f64, phi: f64) -> Result<f64> {
    check_overlap(n)?;
    Ok(0.5 * (1.0 + n * (2.0 * phi + delta).cos()))
}

/// Reverse-HOM probability scaled to a unit fringe maximum: (1 + N cos(2φ + δ))/(1 + N).
pub fn reverse_hom_coincidence_normalized(n: f64, delta: f64, phi: f64) -> Result<f64> {
    check_overlap(n)?;
    Ok((1.0 + n * (2.0 * phi + delta).cos()) / (1.0 + n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelPair {
    P12,
    P13,
    P14,
    P23,
    P24,
    P34,
}

impl ChannelPair {
    pub const ALL: [ChannelPair; 6] = [
        ChannelPair::P12,
        ChannelPair::P13,
        ChannelPair::P14,
        ChannelPair::P23,
        ChannelPair::P24,
        ChannelPair::P34,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ChannelPair::P12 => "p12",
            ChannelPair::P13 => "p13",
            ChannelPair::P14 => "p14",
            ChannelPair::P23 => "p23",
            ChannelPair::P24 => "p24",
            ChannelPair::P34 => "p34",
        }
    }

    /// Coefficients (c₁, c₂) of φ1 and φ2 in the fringe argument.
    fn phase_coefficients(&self) -> (f64, f64) {
        match self {
            ChannelPair::P12 => (2.0, 0.0),
            ChannelPair::P13 | ChannelPair::P24 | ChannelPair::P14 | ChannelPair::P23 => (2.0, -1.0),
            ChannelPair::P34 => (2.0, -2.0),
        }
    }

    /// Sign of the interference term.
    fn fringe_sign(&self) -> f64 {
        match self {
            ChannelPair::P14 | ChannelPair::P23 => -1.0,
            _ => 1.0,
        }
    }
}

impl std::str::FromStr for ChannelPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChannelPair::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::invalid(format!("unknown channel pair `{s}`")))
    }
}

/// Coincidence probabilities of all six output pairs of the two-MZI circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoMziProbabilities {
    pub p12: f64,
    pub p13: f64,
    pub p14: f64,
    pub p23: f64,
    pub p24: f64,
    pub p34: f64,
}

impl TwoMziProbabilities {
    pub fn get(&self, pair: ChannelPair) -> f64 {
        match pair {
            ChannelPair::P12 => self.p12,
            ChannelPair::P13 => self.p13,
            ChannelPair::P14 => self.p14,
            ChannelPair::P23 => self.p23,
            ChannelPair::P24 => self.p24,
            ChannelPair::P34 => self.p34,
        }
    }

    pub fn sum(&self) -> f64 {
        self.p12 + self.p13 + self.p14 + self.p23 + self.p24 + self.p34
    }

    fn scaled(self, s: f64) -> Self {
        Self {
            p12: self.p12 * s,
            p13: self.p13 * s,
            p14: self.p14 * s,
            p23: self.p23 * s,
            p24: self.p24 * s,
            p34: self.p34 * s,
        }
    }
}

/// Raw two-MZI probabilities, each ⅛[1 ± N cos(c₁φ1 + c₂φ2 + δ)].
///
/// These are the probabilities of finding one photon in each of two distinct
/// outputs; the remaining weight is in bunched outcomes.
pub fn two_mzi_coincidences(n: f64, delta: f64, phi1: f64, phi2: f64) -> Result<TwoMziProbabilities> {
    check_overlap(n)?;
    let p = |pair: ChannelPair| {
        let (c1, c2) = pair.phase_coefficients();
        0.125 * (1.0 + pair.fringe_sign() * n * (c1 * phi1 + c2 * phi2 + delta).cos())
    };
    let bright = p(ChannelPair::P13);
    let dark = p(ChannelPair::P14);
    Ok(TwoMziProbabilities {
        p12: p(ChannelPair::P12),
        p13: bright,
        p14: dark,
        p23: dark,
        p24: bright,
        p34: p(ChannelPair::P34),
    })
}

/// Two-MZI probabilities scaled so each pair's fringe maximum is 1.
pub fn two_mzi_coincidences_normalized(n: f64, delta: f64, phi1: f64, phi2: f64) -> Result<TwoMziProbabilities> {
    Ok(two_mzi_coincidences(n, delta, phi1, phi2)?.scaled(8.0 / (1.0 + n)))
}

/// Classical MZI output transmissions (cos²(φ/2), sin²(φ/2)).
pub fn classical_transmission(phi: f64) -> (f64, f64) {
    let c = (0.5 * phi).cos();
    let s = (0.5 * phi).sin();
    (c * c, s * s)
}

/// [`classical_transmission`] with the quadrature bias φ → φ − π/2 of the reverse-HOM circuit.
pub fn classical_transmission_offset(phi: f64) -> (f64, f64) {
    classical_transmission(phi - FRAC_PI_2)
}

/// Which circuit phase a two-MZI scan sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScannedPhase {
    Phi1,
    Phi2,
}

/// Sampled coincidence fringe.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    phases: Vec<f64>,
    channel_pair: ChannelPair,
    probabilities: Vec<f64>,
    normalized: bool,
    /// Fringe period in the scanned phase; `None` if the channel does not depend on it.
    period: Option<f64>,
}

impl FringeScan {
    /// Reverse-HOM scan; the single coincidence channel is labelled p12.
    pub fn reverse_hom(n: f64, delta: f64, phases: &[f64], normalized: bool) -> Result<Self> {
        let probabilities = phases
            .iter()
            .map(|&phi| {
                if normalized {
                    reverse_hom_coincidence_normalized(n, delta, phi)
                } else {
                    reverse_hom_coincidence(n, delta, phi)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            phases: phases.to_vec(),
            channel_pair: ChannelPair::P12,
            probabilities,
            normalized,
            period: Some(PI),
        })
    }

    /// Two-MZI scan of `pair` sweeping `scanned` with the other phase held at `fixed`.
    pub fn two_mzi(
        n: f64,
        delta: f64,
        pair: ChannelPair,
        scanned: ScannedPhase,
        fixed: f64,
        phases: &[f64],
        normalized: bool,
    ) -> Result<Self> {
        let probabilities = phases
            .iter()
            .map(|&phi| {
                let (p1, p2) = match scanned {
                    ScannedPhase::Phi1 => (phi, fixed),
                    ScannedPhase::Phi2 => (fixed, phi),
                };
                let p = if normalized {
                    two_mzi_coincidences_normalized(n, delta, p1, p2)?
                } else {
                    two_mzi_coincidences(n, delta, p1, p2)?
                };
                Ok(p.get(pair))
            })
            .collect::<Result<Vec<_>>>()?;
        let (c1, c2) = pair.phase_coefficients();
        let coef = match scanned {
            ScannedPhase::Phi1 => c1,
            ScannedPhase::Phi2 => c2,
        };
        let period = (coef != 0.0).then(|| TAU / coef.abs());
        Ok(Self {
            phases: phases.to_vec(),
            channel_pair: pair,
            probabilities,
            normalized,
            period,
        })
    }

    /// Wraps externally produced samples.
    pub fn from_samples(
        phases: Vec<f64>,
        probabilities: Vec<f64>,
        channel_pair: ChannelPair,
        period: Option<f64>,
        normalized: bool,
    ) -> Result<Self> {
        if phases.len() != probabilities.len() {
            return Err(Error::invalid("phase and probability lists differ in length"));
        }
        if probabilities.iter().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) {
            return Err(Error::invalid("probabilities must lie in [0, 1]"));
        }
        Ok(Self {
            phases,
            channel_pair,
            probabilities,
            normalized,
            period,
        })
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn channel_pair(&self) -> ChannelPair {
        self.channel_pair
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }
}

/// Fringe visibility (max − min)/max of a scan covering at least one period.
pub fn extract_visibility(scan: &FringeScan) -> Result<f64> {
    if scan.probabilities.is_empty() {
        return Err(Error::InsufficientCoverage {
            covered: 0.0,
            period: scan.period.unwrap_or(0.0),
        });
    }
    if let Some(period) = scan.period {
        let lo = scan.phases.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = scan.phases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let covered = hi - lo;
        if covered < period * (1.0 - 1e-9) {
            return Err(Error::InsufficientCoverage { covered, period });
        }
    }
    let max = scan.probabilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = scan.probabilities.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) {
        return Err(Error::DegenerateInput("fringe has no counts".into()));
    }
    Ok((max - min) / max)
}

/// Accidental-count share implied by a coincidence-to-accidental ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarRecord {
    car: f64,
}

impl CarRecord {
    pub fn new(car: f64) -> Result<Self> {
        if !(car > 0.0 && car.is_finite()) {
            return Err(Error::invalid(format!("CAR must be positive (got {car})")));
        }
        Ok(Self { car })
    }

    pub fn car(&self) -> f64 {
        self.car
    }

    /// a = 1/(CAR + 1).
    pub fn accidental_fraction(&self) -> f64 {
        1.0 / (self.car + 1.0)
    }

    /// min(1, V/(1 − a)).
    pub fn corrected_visibility(&self, v: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(format!("visibility must lie in [0, 1] (got {v})")));
        }
        Ok((v / (1.0 - self.accidental_fraction())).min(1.0))
    }
}

pub fn accidental_fraction(car: f64) -> Result<f64> {
    Ok(CarRecord::new(car)?.accidental_fraction())
}

pub fn corrected_visibility(v: f64, car: f64) -> Result<f64> {
    CarRecord::new(car)?.corrected_visibility(v)
}
