//! Command implementations. Each returns the text it produces; writing is
//! left to the caller.

use sfwm_core::fringes::{
    accidental_fraction, classical_transmission, classical_transmission_offset, corrected_visibility,
    extract_visibility, two_mzi_coincidences, two_mzi_coincidences_normalized, ChannelPair, FringeScan, ScannedPhase,
};
use sfwm_core::jsa::{apply_filter, build_ring_jsa, build_waveguide_jsa, JointSpectralAmplitude, PumpQuadrature};
use sfwm_core::schmidt::{jsa_overlap, overlap_from_visibility, schmidt_decompose, visibility_from_overlap};
use sfwm_core::spectral::{FilterSpec, FrequencyGrid, PumpLine};
use sfwm_core::squeezing::{
    lossy_density_diagonal, lossy_density_diagonal_auto, mean_photon_number, trigger_probability, SqueezingSpec,
};

use crate::bundled;
use crate::error::{CliError, Result};
use crate::format::{num, percent};
use crate::jsi_file;
use crate::scenario::{dispersion_model, ring_source, Circuit, Scanned, Scenario, SourceConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Txt,
    Csv,
}

/// Overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub grid_points: Option<usize>,
    pub no_filter: bool,
    pub car: Option<f64>,
}

impl Overrides {
    /// The scenario actually run; its hash goes into every header.
    pub fn apply(&self, scenario: &Scenario) -> Result<Scenario> {
        let mut s = scenario.clone();
        if let Some(n) = self.grid_points {
            s.grid.get_or_insert_with(Default::default).points = Some(n);
        }
        if self.no_filter {
            s.filter = None;
        }
        if let Some(car) = self.car {
            s.car = Some(car);
        }
        s.validate()?;
        Ok(s)
    }
}

/// What a command produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    /// Report text, printed to stdout (or written to `--out` when there is no data file).
    pub report: String,
    /// Data file contents, written to `--out` (or stdout when no path is given).
    pub data: Option<String>,
    pub warnings: Vec<String>,
}

pub fn header(command: &str, scenario: &Scenario) -> String {
    format!(
        "# sfwm schema={SCHEMA_VERSION} command={command} scenario={} sha256={}\n",
        scenario.name(),
        scenario.hash()
    )
}

/// Key/value report as aligned text or a two-line CSV.
fn render_report(head: &str, rows: &[(&str, String)], format: Format) -> String {
    let mut out = String::from(head);
    match format {
        Format::Txt => {
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in rows {
                out.push_str(&format!("{k:<width$}  {v}\n"));
            }
        }
        Format::Csv => {
            out.push_str(&rows.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(","));
            out.push('\n');
            out.push_str(&rows.iter().map(|(_, v)| v.as_str()).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
    }
    out
}

/// Unfiltered JSAs of both interferometer arms; `second` is `None` when the
/// arms hold identical sources.
pub struct Sources {
    pub first: JointSpectralAmplitude,
    pub second: Option<JointSpectralAmplitude>,
    pub filter: FilterSpec,
    pub warnings: Vec<String>,
}

impl Sources {
    pub fn build(scenario: &Scenario) -> Result<Self> {
        let (p1, p2) = scenario.pump_lines()?;
        let grid = scenario.grid()?;
        let filter = scenario.filter_spec()?;
        let mut warnings = Vec::new();
        let (first, second) = match &scenario.source {
            SourceConfig::Pair { first, second } => (
                build_arm(first, &p1, &p2, &grid, "source.first", &mut warnings)?,
                Some(build_arm(second, &p1, &p2, &grid, "source.second", &mut warnings)?),
            ),
            single => (build_arm(single, &p1, &p2, &grid, "source", &mut warnings)?, None),
        };
        Ok(Self {
            first,
            second,
            filter,
            warnings,
        })
    }

    pub fn filtered_first(&self) -> Result<JointSpectralAmplitude> {
        Ok(apply_filter(&self.first, &self.filter, &self.filter)?)
    }
}

fn build_arm(
    source: &SourceConfig,
    p1: &PumpLine,
    p2: &PumpLine,
    grid: &FrequencyGrid,
    key: &str,
    warnings: &mut Vec<String>,
) -> Result<JointSpectralAmplitude> {
    let quad = PumpQuadrature::default();
    match source {
        SourceConfig::Waveguide { length_mm, dispersion } => {
            let model = dispersion_model(dispersion.as_ref(), p1, p2)?;
            Ok(build_waveguide_jsa(p1, p2, &model, length_mm * 1e-3, grid, &quad)?)
        }
        SourceConfig::Ring { q, fsr_nm, anchor_nm } => {
            let ring = ring_source(*q, *fsr_nm, *anchor_nm)?;
            let res = ring.resonances(p1, p2);
            if res.is_off_resonance() {
                warnings.push(format!(
                    "{key}: pumps sit {:.1} and {:.1} linewidths from their ring resonances",
                    res.pump_detuning[0], res.pump_detuning[1]
                ));
            }
            Ok(build_ring_jsa(p1, p2, &ring, grid, &quad)?)
        }
        SourceConfig::Pair { .. } => Err(CliError::Config(format!("{key}: pairs cannot be nested"))),
    }
}

pub fn jsi(scenario: &Scenario) -> Result<Output> {
    let sources = Sources::build(scenario)?;
    let filtered = sources.filtered_first()?;
    let data = jsi_file::render(&header("jsi", scenario), &filtered);
    let g = filtered.grid_s();
    let report = format!(
        "{}x{} JSI of {} (filter survival {})\n",
        g.len(),
        filtered.grid_i().len(),
        scenario.name(),
        num(filtered.survival())
    );
    Ok(Output {
        report,
        data: Some(data),
        warnings: sources.warnings,
    })
}

pub fn purity(scenario: &Scenario, format: Format) -> Result<Output> {
    let sources = Sources::build(scenario)?;
    let filtered = sources.filtered_first()?;
    let spectrum = schmidt_decompose(&filtered)?;
    let mut rows = vec![
        ("scenario", scenario.name().to_string()),
        ("purity", num(spectrum.purity())),
        ("schmidt_tail", num(spectrum.tail(spectrum.coefficients().len()))),
        ("survival", num(filtered.survival())),
        ("effective_modes", num(spectrum.effective_modes())),
        ("schmidt_modes", spectrum.coefficients().len().to_string()),
    ];
    if let Some(second) = &sources.second {
        let f2 = apply_filter(second, &sources.filter, &sources.filter)?;
        rows.push(("purity_second", num(schmidt_decompose(&f2)?.purity())));
    }
    let report = render_report(&header("purity", scenario), &rows, format);
    Ok(Output {
        report,
        data: None,
        warnings: sources.warnings,
    })
}

pub fn schmidt(scenario: &Scenario) -> Result<Output> {
    let sources = Sources::build(scenario)?;
    let spectrum = schmidt_decompose(&sources.filtered_first()?)?;
    let mut data = header("schmidt", scenario);
    data.push_str("mode,coefficient\n");
    for (l, r) in spectrum.coefficients().iter().enumerate() {
        data.push_str(&format!("{l},{}\n", num(*r)));
    }
    let report = format!(
        "{} Schmidt modes, purity {}\n",
        spectrum.coefficients().len(),
        num(spectrum.purity())
    );
    Ok(Output {
        report,
        data: Some(data),
        warnings: sources.warnings,
    })
}

/// Overlap magnitude and phase used for the fringe, plus any build warnings.
fn fringe_overlap(
    scenario: &Scenario,
    forced_n: Option<f64>,
    forced_delta: Option<f64>,
) -> Result<(f64, f64, Vec<String>)> {
    let paired = matches!(scenario.source, SourceConfig::Pair { .. });
    if !paired || (forced_n.is_some() && forced_delta.is_some()) {
        return Ok((forced_n.unwrap_or(1.0), forced_delta.unwrap_or(0.0), Vec::new()));
    }
    let sources = Sources::build(scenario)?;
    let second = sources.second.as_ref().expect("pair scenarios build both arms");
    let o = jsa_overlap(&sources.first, second, &sources.filter, &sources.filter)?;
    Ok((
        forced_n.unwrap_or(o.magnitude),
        forced_delta.unwrap_or(o.phase),
        sources.warnings,
    ))
}

pub fn fringe(scenario: &Scenario, format: Format) -> Result<Output> {
    let plan = scenario.fringe_plan();
    let (n, delta, warnings) = fringe_overlap(scenario, plan.overlap, plan.delta)?;
    let classical = |phi: f64| {
        if plan.classical_offset {
            classical_transmission_offset(phi)
        } else {
            classical_transmission(phi)
        }
    };

    let mut table = String::new();
    let scan = match plan.circuit {
        Circuit::ReverseHom => {
            table.push_str("phase_rad,p12_raw,p12_norm,classical_a,classical_b\n");
            let raw = FringeScan::reverse_hom(n, delta, &plan.phases, false)?;
            let norm = FringeScan::reverse_hom(n, delta, &plan.phases, true)?;
            for (k, &phi) in plan.phases.iter().enumerate() {
                let (a, b) = classical(phi);
                table.push_str(&format!(
                    "{},{},{},{},{}\n",
                    num(phi),
                    num(raw.probabilities()[k]),
                    num(norm.probabilities()[k]),
                    num(a),
                    num(b)
                ));
            }
            raw
        }
        Circuit::TwoMzi => {
            let cols: Vec<String> = ChannelPair::ALL
                .iter()
                .flat_map(|p| [format!("{}_raw", p.label()), format!("{}_norm", p.label())])
                .collect();
            table.push_str(&format!("phase_rad,{},classical_a,classical_b\n", cols.join(",")));
            for &phi in &plan.phases {
                let (phi1, phi2) = match plan.scanned {
                    Scanned::Phi1 => (phi, plan.fixed_phase),
                    Scanned::Phi2 => (plan.fixed_phase, phi),
                };
                let raw = two_mzi_coincidences(n, delta, phi1, phi2)?;
                let norm = two_mzi_coincidences_normalized(n, delta, phi1, phi2)?;
                let cells: Vec<String> = ChannelPair::ALL
                    .iter()
                    .flat_map(|&p| [num(raw.get(p)), num(norm.get(p))])
                    .collect();
                let (a, b) = classical(phi);
                table.push_str(&format!("{},{},{},{}\n", num(phi), cells.join(","), num(a), num(b)));
            }
            let scanned = match plan.scanned {
                Scanned::Phi1 => ScannedPhase::Phi1,
                Scanned::Phi2 => ScannedPhase::Phi2,
            };
            FringeScan::two_mzi(n, delta, plan.pair, scanned, plan.fixed_phase, &plan.phases, false)?
        }
    };

    let visibility = extract_visibility(&scan)?;
    let mut rows = vec![
        ("scenario", scenario.name().to_string()),
        ("pair", plan.pair.label().to_string()),
        ("overlap", num(n)),
        ("delta_rad", num(delta)),
        ("visibility", num(visibility)),
        ("visibility_from_overlap", num(visibility_from_overlap(n)?)),
    ];
    if let Some(car) = scenario.car {
        rows.push(("car", num(car)));
        rows.push(("accidental_fraction", num(accidental_fraction(car)?)));
        rows.push(("visibility_corrected", num(corrected_visibility(visibility, car)?)));
    }

    let head = header("fringe", scenario);
    let mut data = head.clone();
    for (k, v) in &rows {
        data.push_str(&format!("# {k}={v}\n"));
    }
    data.push_str(&table);
    Ok(Output {
        report: render_report(&head, &rows, format),
        data: Some(data),
        warnings,
    })
}

pub fn stats(scenario: &Scenario, format: Format) -> Result<Output> {
    let sources = Sources::build(scenario)?;
    let spectrum = schmidt_decompose(&sources.filtered_first()?)?;
    let cfg = scenario.squeezing.clone();
    let xi = cfg.as_ref().map(|c| c.xi).unwrap_or(0.1);
    let eta = cfg.as_ref().and_then(|c| c.transmission).unwrap_or(1.0);
    let spec = SqueezingSpec::from_spectrum(xi, &spectrum, eta)?;
    let fock = match cfg.as_ref().and_then(|c| c.max_n) {
        Some(max_n) => lossy_density_diagonal(&spec, 0, max_n)?,
        None => lossy_density_diagonal_auto(&spec, 0)?,
    };
    let names: Vec<String> = (0..fock.len()).map(|m| format!("p{m}_leading_mode")).collect();
    let shown = fock.iter().rposition(|&p| p >= 1e-15).map_or(1, |i| i + 1);
    let mut rows = vec![
        ("scenario", scenario.name().to_string()),
        ("xi", num(xi)),
        ("transmission", num(eta)),
        ("schmidt_modes", spec.modes().to_string()),
        ("purity", num(spectrum.purity())),
        ("mean_photon_number", num(mean_photon_number(&spec))),
        ("trigger_probability", num(trigger_probability(&spec))),
    ];
    for (m, p) in fock.iter().enumerate().take(shown) {
        rows.push((names[m].as_str(), num(*p)));
    }
    let report = render_report(&header("stats", scenario), &rows, format);
    Ok(Output {
        report,
        data: None,
        warnings: sources.warnings,
    })
}

/// One row of the source summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub label: String,
    pub visibility: f64,
    pub purity: f64,
    pub overlap: f64,
}

pub fn table1_rows(overrides: &Overrides) -> Result<(Vec<Table1Row>, Vec<Scenario>, Vec<String>)> {
    let mut rows = Vec::new();
    let mut used = Vec::new();
    let mut warnings = Vec::new();
    for name in bundled::TABLE1 {
        let scenario = overrides.apply(&bundled::load(name)?)?;
        let measured = scenario
            .measured
            .clone()
            .ok_or_else(|| CliError::Config(format!("{name}: bundled scenario lacks [measured]")))?;
        let sources = Sources::build(&scenario)?;
        warnings.extend(sources.warnings.iter().cloned());
        let purity = schmidt_decompose(&sources.filtered_first()?)?.purity();
        rows.push(Table1Row {
            label: measured.label.unwrap_or_else(|| name.to_string()),
            visibility: measured.visibility,
            purity,
            overlap: overlap_from_visibility(measured.visibility)?,
        });
        used.push(scenario);
    }
    Ok((rows, used, warnings))
}

pub fn table1(overrides: &Overrides, format: Format) -> Result<Output> {
    let (rows, used, warnings) = table1_rows(overrides)?;
    let hashes: Vec<String> = used.iter().map(|s| format!("{}:{}", s.name(), s.hash())).collect();
    let mut out = format!(
        "# sfwm schema={SCHEMA_VERSION} command=table1 scenarios={}\n",
        hashes.join(";")
    );
    match format {
        Format::Csv => {
            out.push_str("source,observed_visibility,simulated_purity,jsa_overlap\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    r.label,
                    num(r.visibility),
                    num(r.purity),
                    num(r.overlap)
                ));
            }
        }
        Format::Txt => {
            let titles = ["Source", "Observed visibility", "Simulated purity", "JSA overlap"];
            let cells: Vec<[String; 4]> = rows
                .iter()
                .map(|r| {
                    [
                        r.label.clone(),
                        percent(r.visibility),
                        percent(r.purity),
                        percent(r.overlap),
                    ]
                })
                .collect();
            let width = |c: usize| {
                cells
                    .iter()
                    .map(|r| r[c].len())
                    .chain([titles[c].len()])
                    .max()
                    .unwrap_or(0)
            };
            let w = [width(0), width(1), width(2), width(3)];
            out.push_str(&format!(
                "{:<a$}  {:>b$}  {:>c$}  {:>d$}\n",
                titles[0],
                titles[1],
                titles[2],
                titles[3],
                a = w[0],
                b = w[1],
                c = w[2],
                d = w[3]
            ));
            for r in &cells {
                out.push_str(&format!(
                    "{:<a$}  {:>b$}  {:>c$}  {:>d$}\n",
                    r[0],
                    r[1],
                    r[2],
                    r[3],
                    a = w[0],
                    b = w[1],
                    c = w[2],
                    d = w[3]
                ));
            }
        }
    }
    Ok(Output {
        report: out,
        data: None,
        warnings,
    })
}
