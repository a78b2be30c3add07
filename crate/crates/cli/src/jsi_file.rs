//! JSI grid files: `#` header lines, then one CSV row per signal frequency.

use sfwm_core::jsa::{jsi, JointSpectralAmplitude};
use sfwm_core::spectral::{omega_to_wavelength, FrequencyGrid};

use crate::error::{CliError, Result};
use crate::format::{exact, num};

/// JSI values read back from a grid file.
#[derive(Debug, Clone, PartialEq)]
pub struct JsiFile {
    pub grid_s: FrequencyGrid,
    pub grid_i: FrequencyGrid,
    /// Row-major, `values[j * ny + k]` for signal index j and idler index k.
    pub values: Vec<f64>,
}

impl JsiFile {
    pub fn nx(&self) -> usize {
        self.grid_s.len()
    }

    pub fn ny(&self) -> usize {
        self.grid_i.len()
    }

    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.ny() + k]
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: String| CliError::Config(format!("JSI file: {msg}"));
        let mut nx = None;
        let mut ny = None;
        let mut omega_s = None;
        let mut omega_i = None;
        let mut values = Vec::new();
        let mut rows = 0usize;
        for line in text.lines() {
            if let Some(comment) = line.strip_prefix('#') {
                for field in comment.split_whitespace() {
                    let Some((key, value)) = field.split_once('=') else {
                        continue;
                    };
                    match key {
                        "nx" => nx = Some(value.parse::<usize>().map_err(|e| bad(format!("nx: {e}")))?),
                        "ny" => ny = Some(value.parse::<usize>().map_err(|e| bad(format!("ny: {e}")))?),
                        "omega_s" => omega_s = Some(pair(value).ok_or_else(|| bad("bad omega_s range".into()))?),
                        "omega_i" => omega_i = Some(pair(value).ok_or_else(|| bad("bad omega_i range".into()))?),
                        _ => {}
                    }
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            for cell in line.split(',') {
                values.push(
                    cell.trim()
                        .parse::<f64>()
                        .map_err(|e| bad(format!("row {rows}: {e}")))?,
                );
            }
            rows += 1;
        }
        let (nx, ny) = (
            nx.ok_or_else(|| bad("missing nx".into()))?,
            ny.ok_or_else(|| bad("missing ny".into()))?,
        );
        let (s0, s1) = omega_s.ok_or_else(|| bad("missing omega_s".into()))?;
        let (i0, i1) = omega_i.ok_or_else(|| bad("missing omega_i".into()))?;
        if rows != nx || values.len() != nx * ny {
            return Err(bad(format!(
                "expected {nx} rows of {ny} values, found {rows} rows and {} values",
                values.len()
            )));
        }
        Ok(Self {
            grid_s: FrequencyGrid::new(s0, s1, nx)?,
            grid_i: FrequencyGrid::new(i0, i1, ny)?,
            values,
        })
    }
}

fn pair(value: &str) -> Option<(f64, f64)> {
    let (a, b) = value.split_once(',')?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

/// Renders `|F|²` of `jsa` below `header`, which should end with a newline.
pub fn render(header: &str, jsa: &JointSpectralAmplitude) -> String {
    let gs = jsa.grid_s();
    let gi = jsa.grid_i();
    let intensity = jsi(jsa);
    let mut out = String::from(header);
    out.push_str(&format!("# nx={} ny={}\n", gs.len(), gi.len()));
    out.push_str(&format!(
        "# omega_s={},{} omega_i={},{}\n",
        exact(gs.omega_min()),
        exact(gs.omega_max()),
        exact(gi.omega_min()),
        exact(gi.omega_max())
    ));
    out.push_str(&format!(
        "# signal_nm={},{} idler_nm={},{}\n",
        num(omega_to_wavelength(gs.omega_min()) * 1e9),
        num(omega_to_wavelength(gs.omega_max()) * 1e9),
        num(omega_to_wavelength(gi.omega_min()) * 1e9),
        num(omega_to_wavelength(gi.omega_max()) * 1e9)
    ));
    out.push_str("# rows: signal frequency ascending; columns: idler frequency ascending; values: |F|^2 in s^2\n");
    for j in 0..gs.len() {
        let row: Vec<String> = (0..gi.len()).map(|k| exact(intensity[(j, k)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
