//! Scenario files: TOML with strict keys. See `docs/scenario-schema.md`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sfwm_core::dispersion::DispersionModel;
use sfwm_core::fringes::ChannelPair;
use sfwm_core::jsa::RingSource;
use sfwm_core::spectral::{
    hz_to_omega, make_grid, omega_to_wavelength, FilterProfile, FilterSpec, FrequencyGrid, LineShape, PumpLine,
};

use crate::error::{CliError, Result};

const NM: f64 = 1e-9;

pub const DEFAULT_LINEWIDTH_GHZ: f64 = 5.0;
pub const DEFAULT_POINTS: usize = 401;
pub const DEFAULT_RING_SPAN_NM: f64 = 1.2;
pub const DEFAULT_WAVEGUIDE_SPAN_NM: f64 = 2.0;
pub const DEFAULT_BETA2: f64 = -2e-24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub pumps: Vec<PumpConfig>,
    pub source: SourceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub car: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fringe: Option<FringeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured: Option<MeasuredConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squeezing: Option<SqueezingConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Gaussian,
    Lorentzian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    pub wavelength_nm: f64,
    /// Power-spectrum FWHM.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linewidth_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Shape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_rad: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", try_from = "toml::Table")]
pub enum SourceConfig {
    Waveguide {
        length_mm: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dispersion: Option<DispersionConfig>,
    },
    Ring {
        q: f64,
        fsr_nm: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor_nm: Option<f64>,
    },
    /// Two different sources in the two interferometer arms.
    Pair {
        first: Box<SourceConfig>,
        second: Box<SourceConfig>,
    },
}

impl SourceConfig {
    fn is_ring(&self) -> bool {
        match self {
            SourceConfig::Ring { .. } => true,
            SourceConfig::Waveguide { .. } => false,
            SourceConfig::Pair { first, .. } => first.is_ring(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", try_from = "toml::Table")]
pub enum DispersionConfig {
    /// k − β0 − β1Ω = (β2/2)Ω²(1 − Ω²/Δ²)², Δ half the pump separation.
    PumpMatched { beta2_s2_per_m: f64 },
    /// Taylor coefficients β0, β1, β2, … in SI units about `reference_nm`
    /// (default: the degenerate wavelength).
    Taylor {
        betas: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference_nm: Option<f64>,
    },
}

// Tagged tables are read by hand so that errors inside a variant keep their key path.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WaveguideFields {
    length_mm: f64,
    #[serde(default)]
    dispersion: Option<DispersionConfig>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RingFields {
    q: f64,
    fsr_nm: f64,
    #[serde(default)]
    anchor_nm: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFields {
    first: Box<SourceConfig>,
    second: Box<SourceConfig>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PumpMatchedFields {
    beta2_s2_per_m: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TaylorFields {
    betas: Vec<f64>,
    #[serde(default)]
    reference_nm: Option<f64>,
}

fn take_tag(table: &mut toml::Table, tag: &str, variants: &[&str]) -> std::result::Result<String, String> {
    match table.remove(tag) {
        None => Err(format!("missing field `{tag}`")),
        Some(toml::Value::String(s)) if variants.contains(&s.as_str()) => Ok(s),
        Some(other) => Err(format!(
            "{tag}: unknown variant {other}, expected one of {}",
            variants.join(", ")
        )),
    }
}

fn fields<T: serde::de::DeserializeOwned>(table: toml::Table) -> std::result::Result<T, String> {
    serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        let msg = e.into_inner().message().trim_end().to_string();
        if path == "." || path.is_empty() {
            msg
        } else {
            format!("{path}: {msg}")
        }
    })
}

impl TryFrom<toml::Table> for SourceConfig {
    type Error = String;

    fn try_from(mut table: toml::Table) -> std::result::Result<Self, String> {
        match take_tag(&mut table, "kind", &["waveguide", "ring", "pair"])?.as_str() {
            "waveguide" => {
                let f: WaveguideFields = fields(table)?;
                Ok(SourceConfig::Waveguide {
                    length_mm: f.length_mm,
                    dispersion: f.dispersion,
                })
            }
            "ring" => {
                let f: RingFields = fields(table)?;
                Ok(SourceConfig::Ring {
                    q: f.q,
                    fsr_nm: f.fsr_nm,
                    anchor_nm: f.anchor_nm,
                })
            }
            _ => {
                let f: PairFields = fields(table)?;
                Ok(SourceConfig::Pair {
                    first: f.first,
                    second: f.second,
                })
            }
        }
    }
}

impl TryFrom<toml::Table> for DispersionConfig {
    type Error = String;

    fn try_from(mut table: toml::Table) -> std::result::Result<Self, String> {
        match take_tag(&mut table, "model", &["pump-matched", "taylor"])?.as_str() {
            "pump-matched" => {
                let f: PumpMatchedFields = fields(table)?;
                Ok(DispersionConfig::PumpMatched {
                    beta2_s2_per_m: f.beta2_s2_per_m,
                })
            }
            _ => {
                let f: TaylorFields = fields(table)?;
                Ok(DispersionConfig::Taylor {
                    betas: f.betas,
                    reference_nm: f.reference_nm,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterShape {
    Rectangle,
    RaisedCosine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub center_nm: f64,
    pub bandwidth_nm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<FilterShape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rolloff: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Circuit {
    ReverseHom,
    TwoMzi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pair {
    P12,
    P13,
    P14,
    P23,
    P24,
    P34,
}

impl From<Pair> for ChannelPair {
    fn from(p: Pair) -> Self {
        match p {
            Pair::P12 => ChannelPair::P12,
            Pair::P13 => ChannelPair::P13,
            Pair::P14 => ChannelPair::P14,
            Pair::P23 => ChannelPair::P23,
            Pair::P24 => ChannelPair::P24,
            Pair::P34 => ChannelPair::P34,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scanned {
    Phi1,
    Phi2,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FringeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<Circuit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scanned: Option<Scanned>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_phase_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_start_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_stop_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_step_rad: Option<f64>,
    /// Replaces the computed JSA overlap magnitude.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<f64>,
    /// Replaces the computed JSA overlap phase.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_rad: Option<f64>,
    /// Use the classical transmissions shifted by π/2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_offset: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasuredConfig {
    pub visibility: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezingConfig {
    pub xi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transmission: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
}

/// Phase scan with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct FringePlan {
    pub circuit: Circuit,
    pub pair: ChannelPair,
    pub scanned: Scanned,
    pub fixed_phase: f64,
    pub phases: Vec<f64>,
    pub overlap: Option<f64>,
    pub delta: Option<f64>,
    pub classical_offset: bool,
}

fn positive(value: f64, key: &str) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{key}: must be positive (got {value})")))
    }
}

fn finite(value: f64, key: &str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{key}: must be finite (got {value})")))
    }
}

impl Scenario {
    /// Parses TOML text; `fallback_name` is used when the file has no `name`.
    pub fn from_toml(text: &str, fallback_name: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let msg = inner.message().trim_end().to_string();
            if path == "." || path.is_empty() {
                CliError::Config(msg)
            } else {
                CliError::Config(format!("{path}: {msg}"))
            }
        })?;
        if scenario.name.is_none() {
            scenario.name = Some(fallback_name.to_string());
        }
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
        Self::from_toml(&text, stem).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario fields are all TOML-representable")
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("scenario")
    }

    pub fn validate(&self) -> Result<()> {
        if self.pumps.len() != 2 {
            return Err(CliError::Config(format!(
                "pumps: expected exactly 2 pump lines, found {}",
                self.pumps.len()
            )));
        }
        for (i, p) in self.pumps.iter().enumerate() {
            positive(p.wavelength_nm, &format!("pumps[{i}].wavelength_nm"))?;
            if let Some(w) = p.linewidth_ghz {
                positive(w, &format!("pumps[{i}].linewidth_ghz"))?;
            }
            if let Some(a) = p.amplitude {
                positive(a, &format!("pumps[{i}].amplitude"))?;
            }
            if let Some(ph) = p.phase_rad {
                finite(ph, &format!("pumps[{i}].phase_rad"))?;
            }
        }
        validate_source(&self.source, "source", true)?;
        if let Some(car) = self.car {
            positive(car, "car")?;
        }
        if let Some(f) = &self.filter {
            positive(f.center_nm, "filter.center_nm")?;
            positive(f.bandwidth_nm, "filter.bandwidth_nm")?;
            if let Some(r) = f.rolloff {
                if !(0.0..=1.0).contains(&r) {
                    return Err(CliError::Config(format!(
                        "filter.rolloff: must lie in [0, 1] (got {r})"
                    )));
                }
                if f.profile != Some(FilterShape::RaisedCosine) {
                    return Err(CliError::Config(
                        "filter.rolloff: only valid with profile = \"raised-cosine\"".into(),
                    ));
                }
            }
        }
        if let Some(g) = &self.grid {
            if let Some(c) = g.center_nm {
                positive(c, "grid.center_nm")?;
            }
            if let Some(s) = g.span_nm {
                positive(s, "grid.span_nm")?;
            }
            if let Some(n) = g.points {
                if n < 2 {
                    return Err(CliError::Config(format!("grid.points: need at least 2 (got {n})")));
                }
            }
        }
        if let Some(fr) = &self.fringe {
            if let Some(step) = fr.phase_step_rad {
                positive(step, "fringe.phase_step_rad")?;
            }
            for (v, key) in [
                (fr.phase_start_rad, "fringe.phase_start_rad"),
                (fr.phase_stop_rad, "fringe.phase_stop_rad"),
                (fr.fixed_phase_rad, "fringe.fixed_phase_rad"),
                (fr.delta_rad, "fringe.delta_rad"),
            ] {
                if let Some(v) = v {
                    finite(v, key)?;
                }
            }
            if let Some(n) = fr.overlap {
                if !(0.0..=1.0).contains(&n) {
                    return Err(CliError::Config(format!(
                        "fringe.overlap: must lie in [0, 1] (got {n})"
                    )));
                }
            }
            let start = fr.phase_start_rad.unwrap_or(0.0);
            let stop = fr.phase_stop_rad.unwrap_or(std::f64::consts::TAU);
            if stop < start {
                return Err(CliError::Config(
                    "fringe.phase_stop_rad: must not be below phase_start_rad".into(),
                ));
            }
            if fr.circuit != Some(Circuit::TwoMzi)
                && (fr.pair.is_some_and(|p| p != Pair::P12) || fr.scanned == Some(Scanned::Phi2))
            {
                return Err(CliError::Config(
                    "fringe: the reverse-hom circuit has only pair p12 and phase phi1".into(),
                ));
            }
        }
        if let Some(m) = &self.measured {
            if !(0.0..=1.0).contains(&m.visibility) {
                return Err(CliError::Config(format!(
                    "measured.visibility: must lie in [0, 1] (got {})",
                    m.visibility
                )));
            }
        }
        if let Some(s) = &self.squeezing {
            if !(s.xi >= 0.0 && s.xi.is_finite()) {
                return Err(CliError::Config(format!(
                    "squeezing.xi: must be non-negative (got {})",
                    s.xi
                )));
            }
            if let Some(t) = s.transmission {
                if !(0.0..=1.0).contains(&t) {
                    return Err(CliError::Config(format!(
                        "squeezing.transmission: must lie in [0, 1] (got {t})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn pump_lines(&self) -> Result<(PumpLine, PumpLine)> {
        let line = |p: &PumpConfig| -> Result<PumpLine> {
            let shape = match p.shape.unwrap_or(Shape::Gaussian) {
                Shape::Gaussian => LineShape::Gaussian,
                Shape::Lorentzian => LineShape::Lorentzian,
            };
            let amp = num_complex::Complex64::from_polar(p.amplitude.unwrap_or(1.0), p.phase_rad.unwrap_or(0.0));
            Ok(PumpLine::new(
                p.wavelength_nm * NM,
                hz_to_omega(p.linewidth_ghz.unwrap_or(DEFAULT_LINEWIDTH_GHZ) * 1e9),
                shape,
                amp,
            )?)
        };
        Ok((line(&self.pumps[0])?, line(&self.pumps[1])?))
    }

    /// Wavelength of the degenerate pair, at the mean pump frequency.
    pub fn degenerate_wavelength(&self) -> Result<f64> {
        let (p1, p2) = self.pump_lines()?;
        Ok(omega_to_wavelength(0.5 * (p1.center_omega() + p2.center_omega())))
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        let g = self.grid.clone().unwrap_or_default();
        let center = match g.center_nm {
            Some(c) => c * NM,
            None => self.degenerate_wavelength()?,
        };
        let default_span = if self.source.is_ring() {
            DEFAULT_RING_SPAN_NM
        } else {
            DEFAULT_WAVEGUIDE_SPAN_NM
        };
        Ok(make_grid(
            center,
            g.span_nm.unwrap_or(default_span) * NM,
            g.points.unwrap_or(DEFAULT_POINTS),
        )?)
    }

    pub fn filter_spec(&self) -> Result<FilterSpec> {
        match &self.filter {
            None => Ok(FilterSpec::all_pass()),
            Some(f) => {
                let profile = match f.profile.unwrap_or(FilterShape::Rectangle) {
                    FilterShape::Rectangle => FilterProfile::IdealRectangle,
                    FilterShape::RaisedCosine => FilterProfile::RaisedCosine {
                        rolloff: f.rolloff.unwrap_or(0.0),
                    },
                };
                Ok(FilterSpec::new(f.center_nm * NM, f.bandwidth_nm * NM, profile)?)
            }
        }
    }

    pub fn fringe_plan(&self) -> FringePlan {
        let f = self.fringe.clone().unwrap_or_default();
        let start = f.phase_start_rad.unwrap_or(0.0);
        let stop = f.phase_stop_rad.unwrap_or(std::f64::consts::TAU);
        let step = f.phase_step_rad.unwrap_or(std::f64::consts::TAU / 400.0);
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        FringePlan {
            circuit: f.circuit.unwrap_or(Circuit::ReverseHom),
            pair: f.pair.unwrap_or(Pair::P12).into(),
            scanned: f.scanned.unwrap_or(Scanned::Phi1),
            fixed_phase: f.fixed_phase_rad.unwrap_or(0.0),
            phases: (0..count).map(|k| start + k as f64 * step).collect(),
            overlap: f.overlap,
            delta: f.delta_rad,
            classical_offset: f.classical_offset.unwrap_or(false),
        }
    }
}

fn validate_source(src: &SourceConfig, key: &str, top: bool) -> Result<()> {
    match src {
        SourceConfig::Waveguide { length_mm, dispersion } => {
            if !(*length_mm >= 0.0 && length_mm.is_finite()) {
                return Err(CliError::Config(format!(
                    "{key}.length_mm: must be non-negative (got {length_mm})"
                )));
            }
            match dispersion {
                Some(DispersionConfig::PumpMatched { beta2_s2_per_m }) => {
                    finite(*beta2_s2_per_m, &format!("{key}.dispersion.beta2_s2_per_m"))?
                }
                Some(DispersionConfig::Taylor { betas, reference_nm }) => {
                    if betas.is_empty() {
                        return Err(CliError::Config(format!("{key}.dispersion.betas: must not be empty")));
                    }
                    for (i, b) in betas.iter().enumerate() {
                        finite(*b, &format!("{key}.dispersion.betas[{i}]"))?;
                    }
                    if let Some(r) = reference_nm {
                        positive(*r, &format!("{key}.dispersion.reference_nm"))?;
                    }
                }
                None => {}
            }
        }
        SourceConfig::Ring { q, fsr_nm, anchor_nm } => {
            positive(*q, &format!("{key}.q"))?;
            positive(*fsr_nm, &format!("{key}.fsr_nm"))?;
            if let Some(a) = anchor_nm {
                positive(*a, &format!("{key}.anchor_nm"))?;
            }
        }
        SourceConfig::Pair { first, second } => {
            if !top {
                return Err(CliError::Config(format!("{key}: pairs cannot be nested")));
            }
            validate_source(first, &format!("{key}.first"), false)?;
            validate_source(second, &format!("{key}.second"), false)?;
        }
    }
    Ok(())
}

/// Dispersion model for a waveguide arm.
pub fn dispersion_model(config: Option<&DispersionConfig>, p1: &PumpLine, p2: &PumpLine) -> Result<DispersionModel> {
    let w0 = 0.5 * (p1.center_omega() + p2.center_omega());
    Ok(match config {
        None => DispersionModel::from_betas(w0, 0.0, 0.0, DEFAULT_BETA2, 0.0)?,
        Some(DispersionConfig::PumpMatched { beta2_s2_per_m }) => {
            DispersionModel::pump_matched(w0, 0.5 * (p1.center_omega() - p2.center_omega()), *beta2_s2_per_m)?
        }
        Some(DispersionConfig::Taylor { betas, reference_nm }) => {
            let reference = reference_nm
                .map(|r| sfwm_core::spectral::wavelength_to_omega(r * NM))
                .unwrap_or(w0);
            DispersionModel::new(reference, betas.clone())?
        }
    })
}

pub fn ring_source(q: f64, fsr_nm: f64, anchor_nm: Option<f64>) -> Result<RingSource> {
    Ok(RingSource::new(q, fsr_nm * NM, anchor_nm.map(|a| a * NM))?)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
